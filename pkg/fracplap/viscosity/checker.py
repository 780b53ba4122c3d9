
import logging
import math

import numpy as np

from dataclasses import dataclass

from ..kernels import sphere_directions
from ..pv.engine import CONVERGED
from ..pv.engine import DIVERGED
from ..pv.engine import DEFAULT_RADIUS
from ..pv.engine import pv_evaluate
from ..space.farfield import ConstantFarField
from ..space.farfield import far_min
from ..space.grid import GridFunction
from .glued import GluedFunction
from .testfunctions import SIDES
from .testfunctions import SUB
from .testfunctions import SUPER
from .testfunctions import TestFunction
from .testfunctions import TouchingError
from .testfunctions import ViscosityError
from .testfunctions import default_radius
from .testfunctions import test_family


LOGGER = logging.getLogger(__name__)

PASS = 'pass'
FAIL = 'fail'
INCONCLUSIVE = 'inconclusive'

TOUCH_TOL = 1e-12
VISCOSITY_TOL = 1e-6
TOUCH_GRID = 33
TOUCH_LADDER = 30
TRUNCATION_LEVELS = (1.0, 2.0, 4.0, 8.0)


@dataclass
class TouchingReport:
    '''Sign of L phi_r(x0) for one touching, in the orientation of the side checked.

    For the super side the pass condition is value >= -tol, for the sub side
    value <= tol.
    '''
    x0: list
    side: str
    test: str
    regime: str
    beta: float
    value: float
    verdict: str
    tol: float
    scale: float
    status: str
    reason: str = ''

    @property
    def passed(self):
        return self.status == PASS

    def to_dict(self):
        return {'x0': self.x0, 'side': self.side, 'test': self.test, 'regime': self.regime,
                'beta': self.beta, 'value': self.value, 'verdict': self.verdict,
                'tol': self.tol, 'scale': self.scale, 'status': self.status,
                'pass': self.passed, 'reason': self.reason}


def negate(u):
    return u.negated() if isinstance(u, GridFunction) else -u


def _touch_points(u, x0, radius):
    if isinstance(u, GridFunction):
        inside = u.active & (np.linalg.norm(u.points - x0, axis=-1) <= radius)
        return u.points[inside], u.flat[inside]
    axes = [np.linspace(c - radius, c + radius, TOUCH_GRID) for c in x0]
    box = np.stack(np.meshgrid(*axes, indexing='ij'), axis=-1).reshape(-1, u.n)
    box = box[np.linalg.norm(box - x0, axis=-1) <= radius]
    omega, _ = sphere_directions(u.n, 16)
    rho = radius * 2.0 ** -np.arange(TOUCH_LADDER)
    ladder = (x0 + rho[:, None, None] * omega[None]).reshape(-1, u.n)
    points = np.concatenate([box, ladder])
    return points, np.asarray(u.value(points), dtype=float)


def touching_excess(u, phi):
    '''(largest phi - u on the touch ball, witness point, value scale).'''
    points, values = _touch_points(u, phi.x0, phi.radius)
    excess = np.asarray(phi.value(points), dtype=float) - values
    worst = int(np.argmax(excess))
    scale = 1 + float(np.max(np.abs(values)))
    return float(excess[worst]), points[worst].tolist(), scale


def check_touching(u, phi):
    '''phi(x0) = u(x0) and phi <= u on the ball, to 1e-12 times the value scale.'''
    u0 = u.value_at(phi.x0) if isinstance(u, GridFunction) else float(u.value(phi.x0))
    excess, witness, scale = touching_excess(u, phi)
    slack = TOUCH_TOL * max(scale, 1 + abs(u0))
    if abs(phi.value_at_x0 - u0) > slack:
        raise TouchingError(f'{phi!r} passes through {phi.value_at_x0!r}, not u(x0) = {u0!r}',
                            witness=phi.x0.tolist(), excess=phi.value_at_x0 - u0)
    if excess > slack:
        raise TouchingError(f'{phi!r} exceeds u by {excess:.3g} at {witness}',
                            witness=witness, excess=excess)
    return excess


def pv_scale(u, phi, spec):
    '''(1 + |u(x0)|)^{p-1} r^{-sp} with r the engine's first radius.'''
    r = u.h / 2 if isinstance(u, GridFunction) else phi.radius
    return (1 + abs(phi.value_at_x0)) ** (spec.p - 1) * r ** -spec.sp


def _status(result, tol):
    if result.verdict == CONVERGED:
        return PASS if result.value >= -tol else FAIL
    if result.verdict == DIVERGED:
        return PASS if result.value == math.inf else FAIL
    return INCONCLUSIVE


def _as_test(u, x0, phi, spec, radius, beta):
    if isinstance(phi, TestFunction):
        return phi
    return TestFunction(phi, x0, default_radius(u) if radius is None else radius, spec, beta)


def check_viscosity_at(u, x0, phi, spec, tol=None, side=SUPER, radius=None, beta=None,
                       rtol=VISCOSITY_TOL):
    '''Sign of L phi_r(x0) for a test function touching u at x0.

    On the super side phi touches from below and L phi_r(x0) >= -tol passes; the
    sub side (phi from above, L phi_r(x0) <= tol) is checked through -u and -phi.
    tol defaults to rtol times the principal-value scale.
    '''
    if side not in SIDES:
        raise ViscosityError(f"unknown side '{side}', expected one of {SIDES}")
    phi = _as_test(u, x0, phi, spec, radius, beta)
    sign = 1.0
    if side == SUB:
        u, phi, sign = negate(u), phi.negated(), -1.0
    check_touching(u, phi)
    scale = pv_scale(u, phi, spec)
    tol = rtol * scale if tol is None else float(tol)
    result = pv_evaluate(GluedFunction(phi, u), phi.x0, spec, tol=tol, certify=False)
    status = _status(result, tol)
    report = TouchingReport(x0=phi.x0.tolist(), side=side, test=phi.base.name,
                            regime=phi.regime, beta=phi.beta, value=sign * result.value,
                            verdict=result.verdict, tol=tol, scale=scale, status=status,
                            reason=result.reason)
    LOGGER.debug(f'{side} touching by {phi.base.name} at {report.x0}: {status} '
                 f'({result.verdict}, {report.value!r})')
    return report


def touching_principal_value(u, x0, phi, spec, tol=None, radius=None, beta=None,
                             rtol=VISCOSITY_TOL):
    '''L u(x0) at a point where phi touches u from below; it exists and is >= 0
    for a supersolution.

    On a lattice only the node's own cell is replaced by phi.
    '''
    phi = _as_test(u, x0, phi, spec, radius, beta)
    check_touching(u, phi)
    if isinstance(u, GridFunction):
        scale = pv_scale(u, phi, spec)
        target = GluedFunction(phi, u, radius=u.h / 2)
    else:
        scale = (1 + abs(phi.value_at_x0)) ** (spec.p - 1) * DEFAULT_RADIUS ** -spec.sp
        target = u
    tol = rtol * scale if tol is None else float(tol)
    result = pv_evaluate(target, phi.x0, spec, tol=tol, certify=False)
    return TouchingReport(x0=phi.x0.tolist(), side=SUPER, test=phi.base.name,
                          regime=phi.regime, beta=phi.beta, value=result.value,
                          verdict=result.verdict, tol=tol, scale=scale,
                          status=_status(result, tol), reason=result.reason)


def truncate_min(u, v):
    '''Pointwise minimum of two lattice functions, far fields combined likewise.'''
    if not isinstance(v, GridFunction):
        return min_with_constant(u, v)
    if not u.compatible(v) or u.domain != v.domain:
        raise ViscosityError(f'cannot take the minimum of incompatible lattices {u!r} and {v!r}')
    return GridFunction(u.domain, u.h, u.collar_width, np.minimum(u.values, v.values),
                        far_min(u.far_field, v.far_field), u.center)


def min_with_constant(u, M):
    M = float(M)
    if M == math.inf:
        return u
    return GridFunction(u.domain, u.h, u.collar_width, np.minimum(u.values, M),
                        far_min(u.far_field, ConstantFarField(M)), u.center)


def check_truncation(u, x0, phi, spec, levels=TRUNCATION_LEVELS, tol=None):
    '''Viscosity checks on min(u, M) for each level M, and on u itself.

    Passing for every truncation must imply passing for u; the values are
    nonincreasing in M since u_M increases to u.
    '''
    phi = _as_test(u, x0, phi, spec, None, None)
    rows = []
    for M in levels:
        row = {'M': float(M)}
        try:
            report = check_viscosity_at(min_with_constant(u, M), x0, phi, spec, tol=tol)
            row.update(value=report.value, status=report.status, tol=report.tol)
        except TouchingError as e:
            row.update(value=None, status='untouched', reason=str(e))
        rows.append(row)
    full = check_viscosity_at(u, x0, phi, spec, tol=tol)
    tested = [r for r in rows if r['value'] is not None]
    all_pass = bool(tested) and all(r['status'] == PASS for r in tested)
    values = [r['value'] for r in tested] + [full.value]
    slack = 1e-9 * (1 + max([abs(v) for v in values if np.isfinite(v)], default=0.0))
    monotone = all(b <= a + slack for a, b in zip(values, values[1:]))
    return {'x0': np.ravel(x0).tolist(), 'test': phi.base.name, 'truncations': rows,
            'full': full.to_dict(), 'all_truncations_pass': all_pass,
            'implication_holds': bool(not all_pass or full.passed), 'monotone': monotone}


def corrupt(u, seed=None, amplitude=None, margin=3):
    '''u with a dip at a random interior node at least margin steps from the boundary.

    amplitude defaults to a tenth of the interior range (0.1 when u is flat).
    Returns (corrupted grid, node).
    '''
    rng = np.random.default_rng(seed)
    nodes = np.flatnonzero(u.interior)
    away = u.domain.distance_to_boundary(u.points[nodes]) >= margin * u.h
    if np.any(away):
        nodes = nodes[away]
    index = int(rng.choice(nodes))
    if amplitude is None:
        spread = float(np.ptp(u.interior_values))
        amplitude = 0.1 * spread if spread > 0 else 0.1
    values = u.flat.copy()
    values[index] -= amplitude
    LOGGER.debug(f'dip of {amplitude!r} at {u.points[index].tolist()}')
    return u.with_values(values), u.points[index].tolist()


def _scan_point(u, x0, spec, side, tol, rtol, radius, cones, quadratics):
    field = negate(u) if side == SUB else u
    family, skipped = test_family(field, x0, spec, radius=radius, cones=cones,
                                  quadratics=quadratics)
    out = {'records': [], 'skipped': len(skipped), 'untouched': 0}
    for phi in family:
        try:
            report = check_viscosity_at(field, x0, phi, spec, tol=tol, rtol=rtol)
        except TouchingError:
            out['untouched'] += 1
            continue
        report.side = side
        report.value = -report.value if side == SUB else report.value
        out['records'].append(report.to_dict())
    return out


def scan_equivalence(u, spec, tol=None, side='both', cones=True, quadratics=True,
                     points=None, margin=0.0, radius=None, mapper=None, rtol=VISCOSITY_TOL):
    '''Viscosity checks at every interior node against every touching test function.

    Sub-side records report L phi_r(x0) for phi touching from above. Inconclusive
    principal values are counted apart from failures.
    '''
    sides = SIDES if side == 'both' else (side,)
    for s in sides:
        if s not in SIDES:
            raise ViscosityError(f"unknown side '{s}'")
    if points is None:
        nodes = u.interior_points
        if margin > 0:
            nodes = nodes[u.domain.distance_to_boundary(nodes) >= margin]
    else:
        nodes = np.asarray(points, dtype=float).reshape(-1, spec.n)
    cells = [(tuple(x), s) for x in nodes for s in sides]

    def action(cell):
        return _scan_point(u, np.array(cell[0]), spec, cell[1], tol, rtol, radius, cones,
                           quadratics)

    results = [action(c) for c in cells] if mapper is None else mapper(cells, action)
    records = [r for out in results if out for r in out['records']]
    failures = [r for r in records if r['status'] == FAIL]
    report = {'nodes': len(nodes), 'sides': list(sides), 'touchings': len(records),
              'failures': len(failures),
              'inconclusive': sum(r['status'] == INCONCLUSIVE for r in records),
              'skipped': sum(out['skipped'] for out in results if out),
              'untouched': sum(out['untouched'] for out in results if out),
              'records': records}
    report['pass'] = report['failures'] == 0
    for r in failures:
        LOGGER.info(f"{r['side']} touching by {r['test']} at {r['x0']} fails: {r['value']!r}")
    LOGGER.info(f"{report['touchings']} touchings at {report['nodes']} nodes, "
                f"{report['failures']} failures, {report['inconclusive']} inconclusive")
    return report
