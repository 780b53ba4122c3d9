
import logging

import numpy as np

from dataclasses import dataclass

from ..pv.engine import pv_evaluate
from ..space.grid import GridFunction
from ..space.seminorm import gagliardo_seminorm
from .lattice import LatticeOperator
from .solver import DirichletSolver
from .solver import SolverError


LOGGER = logging.getLogger(__name__)

SUPERSOLUTION = 'supersolution'
SUBSOLUTION = 'subsolution'
SOLUTION = 'solution'
NEITHER = 'neither'


def _operator(u, spec, operator=None):
    return operator or LatticeOperator(u, spec)


def weak_pairing(u, phi, spec, operator=None):
    '''sum over ordered node pairs of g(u_x - u_y)(phi_x - phi_y) K h^{2n} = 2 h^n sum phi_i R_i.

    This is 1/p times the derivative of the lattice energy in the direction phi.
    phi is a GridFunction compatible with u or an array of interior values.
    '''
    op = _operator(u, spec, operator)
    if isinstance(phi, GridFunction):
        if not phi.compatible(u):
            raise SolverError('test function lattice does not match the solution lattice')
        outside = phi.active & ~u.interior
        if np.any(phi.flat[outside] != 0) or phi.far_field.constant_value != 0:
            raise SolverError('test function must vanish outside the interior nodes')
        phi = phi.flat[op.interior]
    phi = np.asarray(phi, dtype=float)
    if phi.shape != (op.size,):
        raise SolverError(f'expected {op.size} interior test values, got {phi.shape}')
    return float(2 * op.hn * np.sum(phi * op.residual(u.flat[op.interior])))


@dataclass
class WeakResidualReport:
    pairings: list
    min_pairing: float
    max_pairing: float
    tol: float
    supersolution: bool
    subsolution: bool

    @property
    def classification(self):
        if self.supersolution and self.subsolution:
            return SOLUTION
        if self.supersolution:
            return SUPERSOLUTION
        if self.subsolution:
            return SUBSOLUTION
        return NEITHER

    @property
    def solution(self):
        return self.classification == SOLUTION

    def to_dict(self):
        return {'pairings': list(self.pairings), 'min_pairing': self.min_pairing,
                'max_pairing': self.max_pairing, 'tol': self.tol,
                'supersolution': self.supersolution, 'subsolution': self.subsolution,
                'classification': self.classification}


def classify_weak(u, spec, tol=None, operator=None):
    '''Pairings against every interior hat function, 2 R_i h^n, classified at tol.

    The default tol is 1e-6 times the energy scale 1 + |E(u)|.
    '''
    op = _operator(u, spec, operator)
    u_int = u.flat[op.interior]
    pairings = 2 * op.hn * op.residual(u_int)
    if tol is None:
        tol = 1e-6 * (1 + abs(op.energy(u_int)))
    report = WeakResidualReport(pairings=pairings.tolist(), min_pairing=float(pairings.min()),
                                max_pairing=float(pairings.max()), tol=float(tol),
                                supersolution=bool(pairings.min() >= -tol),
                                subsolution=bool(pairings.max() <= tol))
    LOGGER.debug(f'weak classification: {report.classification} '
                 f'(pairings in [{report.min_pairing!r}, {report.max_pairing!r}])')
    return report


def c2_pointwise_to_weak_check(u, region, spec, h, samples=9, tol=1e-8, weak_tol=None):
    '''Pointwise L u >= 0 on sampled nodes of region must imply a weak supersolution.

    u is sampled on a lattice whose ball covers the support of u's non-far part.
    '''
    if u.far_field is None:
        raise SolverError(f'{u!r} needs a far-field model to be sampled on a lattice')
    needed = region.max_distance(region.center) + region.diam
    reach = float(np.linalg.norm(region.center - u.center)) + u.support_radius
    grid = GridFunction.sample(u.value, region, h, max(needed, reach) + h, u.far_field)
    nodes = grid.interior_points
    picks = np.unique(np.linspace(0, len(nodes) - 1, min(samples, len(nodes))).astype(int))
    pointwise = [pv_evaluate(u, nodes[i], spec, tol=tol, certify=False) for i in picks]
    converged = all(r.converged for r in pointwise)
    values = np.array([r.value for r in pointwise])
    weak = classify_weak(grid, spec, tol=weak_tol)
    nonnegative = bool(converged and np.min(values) >= -tol)
    return {'points': [nodes[i].tolist() for i in picks], 'pointwise': values.tolist(),
            'pointwise_converged': converged, 'pointwise_min': float(np.min(values)),
            'pointwise_nonnegative': nonnegative, 'weak': weak.to_dict(),
            'consistent': bool(not nonnegative or weak.supersolution)}


def refinement_study(problem_factory, levels, method='newton'):
    '''Solve problem_factory(h) for h = 2^{-k} and report how the solution settles.'''
    rows = []
    previous = None
    for k in levels:
        h = 2.0 ** -k
        problem = problem_factory(h)
        solver = DirichletSolver(problem, method)
        u = solver.solve()
        center = u.evaluate(problem.domain.center)
        row = {'level': int(k), 'h': h, 'unknowns': solver.operator.size,
               'energy': solver.history[-1]['energy'],
               'residual': solver.history[-1]['residual'],
               'seminorm': gagliardo_seminorm(u, problem.domain, problem.spec.s,
                                              problem.spec.p),
               'center_value': float(center)}
        if previous is not None:
            row['center_change'] = abs(row['center_value'] - previous['center_value'])
            row['seminorm_change'] = abs(row['seminorm'] - previous['seminorm'])
        rows.append(row)
        previous = row
    changes = [r['center_change'] for r in rows if r.get('center_change')]
    order = None
    if len(changes) >= 2 and changes[-1] > 0:
        order = float(np.log2(changes[-2] / changes[-1]))
    return {'rows': rows, 'observed_order': order}
