
import logging

import numpy as np

from dataclasses import dataclass
from functools import cached_property
from scipy.linalg import LinAlgError
from scipy.linalg import cho_factor
from scipy.linalg import cho_solve
from scipy.optimize import brentq

from ..space.domain import FunctionSpaceError
from ..space.grid import GridFunction
from .lattice import LatticeOperator


LOGGER = logging.getLogger(__name__)

METHODS = ('newton', 'coordinate')
ARMIJO = 1e-4
MAX_BACKTRACKS = 50
DELTA_FLOOR = 1e-8
DELTA_START = 1e-2
DELTA_SHRINK = 0.1


class SolverError(Exception):
    '''Non-convergence; carries the best iterate and its residual.'''
    def __init__(self, message, best=None, residual=None):
        super().__init__(message)
        self.best = best
        self.residual = residual


@dataclass(frozen=True)
class DirichletProblem:
    '''Minimize the lattice energy over the interior values of exterior.'''
    spec: object
    exterior: GridFunction
    solver_tol: float = 1e-9
    max_iter: int = 200

    def __post_init__(self):
        if self.exterior.n != self.spec.n:
            raise FunctionSpaceError(f'exterior datum has dimension {self.exterior.n}, '
                                     f'kernel has {self.spec.n}')
        self.exterior.far_field.check_tailspace(self.spec.s, self.spec.p)
        if not np.any(self.exterior.interior):
            raise FunctionSpaceError('no lattice node lies inside the domain')
        if not self.solver_tol > 0:
            raise SolverError(f'solver tolerance must be positive: {self.solver_tol}')

    @property
    def domain(self):
        return self.exterior.domain

    @classmethod
    def from_exterior(cls, spec, domain, h, collar_width, far_field, interior=0.0, **kwargs):
        return cls(spec, GridFunction.from_exterior(domain, h, collar_width, far_field,
                                                    interior=interior), **kwargs)

    def shifted(self, c):
        return DirichletProblem(self.spec, self.exterior.shifted(c), self.solver_tol,
                                self.max_iter)

    def negated(self):
        return DirichletProblem(self.spec, self.exterior.negated(), self.solver_tol,
                                self.max_iter)


class DirichletSolver(object):
    '''Energy minimization with a convergence history.

    Stops once max|R_i| < solver_tol * (1 + |E|), R being the discrete operator at
    the interior nodes.
    '''
    def __init__(self, problem, method='newton', operator=None):
        if method not in METHODS:
            raise SolverError(f"unknown solver method '{method}', expected one of {METHODS}")
        self.problem = problem
        self.method = method
        self.operator = operator or LatticeOperator(problem.exterior, problem.spec)
        self.history = []
        self.delta = None

    def _record(self, iteration, u_int, step, how):
        energy = self.operator.energy(u_int)
        residual = float(np.max(np.abs(self.operator.residual(u_int))))
        previous = self.history[-1]['energy'] if self.history else None
        if previous is not None and energy > previous + 1e-12 * abs(previous):
            LOGGER.warning(f'energy increased at iteration {iteration}: '
                           f'{previous!r} -> {energy!r}')
        self.history.append({'iteration': iteration, 'energy': energy, 'residual': residual,
                             'step': float(step), 'method': how})
        LOGGER.debug(f'iteration {iteration} ({how}): energy {energy!r} residual {residual!r}')
        return energy, residual

    def converged(self, energy, residual):
        return residual < self.problem.solver_tol * (1 + abs(energy))

    def solve(self):
        u_int = self.operator.initial
        energy, residual = self._record(0, u_int, 0.0, 'initial')
        step = self._newton_step if self.method == 'newton' else self._coordinate_sweep
        for iteration in range(1, self.problem.max_iter + 1):
            if self.converged(energy, residual):
                break
            u_new, size, how = step(u_int, energy)
            if u_new is None:
                break
            u_int = u_new
            energy, residual = self._record(iteration, u_int, size, how)
        if not self.converged(energy, residual):
            raise SolverError(f'{self.method} solver stopped at residual {residual!r} '
                              f'(energy {energy!r}) after {len(self.history) - 1} iterations',
                              best=self.operator.full(u_int), residual=residual)
        LOGGER.info(f'Solved {self.operator.size} unknowns in {len(self.history) - 1} '
                    f'{self.method} iterations, residual {residual:.3g}')
        return self.operator.full(u_int)

    def _line_search(self, u_int, energy, direction, gradient, alpha=1.0):
        slope = float(gradient @ direction)
        if not slope < 0:
            return None, 0.0
        for _ in range(MAX_BACKTRACKS):
            trial = u_int + alpha * direction
            if self.operator.energy(trial) <= energy + ARMIJO * alpha * slope:
                return trial, alpha
            alpha /= 2
        return None, 0.0

    def _delta_bounds(self, u_int):
        scale = 1 + np.max(np.abs(np.concatenate([u_int, self.operator.exterior_values])))
        return DELTA_FLOOR * scale, scale

    def _newton_step(self, u_int, energy):
        '''One Newton step with an adaptive |t|^{p-2} regularization.

        For p < 2 the regularization starts coarse and shrinks after every step the
        line search damps at most once. A failed line search widens it and falls back
        to a coordinate sweep.
        '''
        floor, ceiling = self._delta_bounds(u_int)
        if self.delta is None:
            self.delta = DELTA_START * ceiling if self.problem.spec.p < 2 else floor
        self.delta = min(max(self.delta, floor), ceiling)
        gradient = self.operator.gradient(u_int)
        H = self.operator.hessian(u_int, self.delta)
        try:
            direction = -cho_solve(cho_factor(H), gradient)
        except LinAlgError as e:
            LOGGER.debug(f'Newton direction failed: {e}')
            direction = None
        if direction is not None:
            trial, alpha = self._line_search(u_int, energy, direction, gradient)
            if trial is not None:
                if alpha >= 0.5:
                    self.delta = max(self.delta * DELTA_SHRINK, floor)
                return trial, alpha, 'newton'
        LOGGER.debug(f'Newton step found no decrease at delta {self.delta!r}')
        self.delta = min(self.delta / DELTA_SHRINK, ceiling)
        trial, moved, how = self._coordinate_sweep(u_int, energy)
        if moved == 0.0:
            return None, 0.0, how
        return trial, moved, how

    @cached_property
    def ordering(self):
        '''Coarse strides first, red-black within each stride.'''
        grid = self.problem.exterior
        k = np.array(np.unravel_index(self.operator.interior, grid.shape)).T - grid.N
        order = []
        seen = np.zeros(len(k), dtype=bool)
        stride = 2 ** int(np.floor(np.log2(max(grid.N, 1))))
        while stride >= 1:
            level = ~seen & np.all(k % stride == 0, axis=-1)
            color = (np.sum(k // stride, axis=-1) % 2)
            for c in (0, 1):
                order.extend(np.flatnonzero(level & (color == c)))
            seen |= level
            stride //= 2
        return order

    def _coordinate_sweep(self, u_int, energy):
        u_int = u_int.copy()
        moved = 0.0
        op = self.operator
        for i in self.ordering:
            lo, hi = op.bracket(i, u_int)
            if lo == hi:
                t = lo
            else:
                f_lo = op.node_derivative(i, lo, u_int)
                f_hi = op.node_derivative(i, hi, u_int)
                if f_lo >= 0:
                    t = lo
                elif f_hi <= 0:
                    t = hi
                else:
                    t = self._root(i, lo, hi, u_int)
            moved = max(moved, abs(t - u_int[i]))
            u_int[i] = t
        return u_int, moved, 'coordinate'

    def _root(self, i, lo, hi, u_int):
        def f(t):
            return self.operator.node_derivative(i, t, u_int)
        return brentq(f, lo, hi, xtol=1e-15 * (1 + abs(lo) + abs(hi)),
                      rtol=4 * np.finfo(float).eps)


def solve_dirichlet(problem, method='newton'):
    '''Minimizer of the discrete energy with the problem's exterior datum.'''
    return DirichletSolver(problem, method).solve()


def linear_oracle(problem, operator=None):
    '''For p = 2 the residual is linear: solve (D - W) u = E f directly.'''
    if problem.spec.p != 2:
        raise SolverError(f'the linear oracle needs p = 2, got {problem.spec.p}')
    op = operator or LatticeOperator(problem.exterior, problem.spec)
    E = op.exterior_weights
    A = -op.W.copy()
    A[np.diag_indices_from(A)] += np.sum(op.W, axis=1) + np.sum(E, axis=1)
    return op.full(np.linalg.solve(A, E @ op.exterior_values))
