from .lattice import LatticeOperator
from .residual import WeakResidualReport
from .residual import c2_pointwise_to_weak_check
from .residual import classify_weak
from .residual import refinement_study
from .residual import weak_pairing
from .solver import DirichletProblem
from .solver import DirichletSolver
from .solver import SolverError
from .solver import linear_oracle
from .solver import solve_dirichlet


__all__ = [
    'DirichletProblem',
    'DirichletSolver',
    'LatticeOperator',
    'SolverError',
    'WeakResidualReport',
    'c2_pointwise_to_weak_check',
    'classify_weak',
    'linear_oracle',
    'refinement_study',
    'solve_dirichlet',
    'weak_pairing',
]
