
import logging
import math

import numpy as np

from dataclasses import dataclass
from dataclasses import field
from scipy.stats import linregress

from ..algebra import P_VALUES
from ..algebra import g
from ..kernels import KernelSpec
from ..kernels import as_points
from ..space.analytic import AnalyticFunction
from ..space.domain import FunctionSpaceError
from ..space.domain import NotInTailSpaceError
from ..space.grid import GridFunction
from .bounds import PVError
from .bounds import near_zone_bound
from .quadrature import annulus
from .quadrature import cell_corners
from .quadrature import mapped_tail
from .quadrature import panels


LOGGER = logging.getLogger(__name__)

CONVERGED = 'converged'
DIVERGED = 'diverged'
INCONCLUSIVE = 'inconclusive'

MAX_HALVINGS = 40
DEFAULT_RADIUS = 0.5
DIVERGENCE_FACTOR = 1e6
RATE_FLOOR = 0.01
MIN_R_SQUARED = 0.9
MIN_FIT_POINTS = 4


@dataclass
class PVResult:
    '''Principal value L u(x) with the truncated integrals it was read from.

    partials[k] is the integral over |y - x| > epsilons[k]; value is the limit
    estimate (+-inf when diverged).
    '''
    point: list
    value: float
    verdict: str
    epsilons: list
    partials: list
    fitted_rate: float
    r_squared: float
    scale: float
    tol: float
    near_zone_bound: float = None
    reason: str = ''
    extra: dict = field(default_factory=dict)

    @property
    def converged(self):
        return self.verdict == CONVERGED

    @property
    def contributions(self):
        return np.diff(self.partials)

    def to_dict(self):
        d = {'point': self.point, 'value': self.value, 'verdict': self.verdict,
             'epsilons': list(self.epsilons), 'partials': list(self.partials),
             'fitted_rate': self.fitted_rate, 'r_squared': self.r_squared,
             'scale': self.scale, 'tol': self.tol, 'near_zone_bound': self.near_zone_bound,
             'reason': self.reason}
        d.update(self.extra)
        return d


class Zones(object):
    '''The pieces of one principal value: increments u(x + z) - u(x) compensated by
    the gradient at x on (0, radius), and the fixed integral over |y - x| > radius.'''
    def __init__(self, x, center_value, increment, gradient, outer, radius, kind):
        self.x = x
        self.center_value = center_value
        self.increment = increment
        self.gradient = gradient
        self.outer = outer
        self.radius = radius
        self.kind = kind

    def annulus(self, spec, lo, hi):
        nodes = annulus(self.x, lo, hi, spec.n)
        diff = -self.increment(nodes.z)
        affine = -(nodes.z @ self.gradient)
        return float(np.sum((g(diff, spec.p) - g(affine, spec.p)) * nodes.kernel_weights(spec)))


def _tail_kappa(growth, spec):
    gp = growth * (spec.p - 1)
    if not gp < spec.sp:
        raise NotInTailSpaceError(f'growth {growth} is outside the tail space for '
                                  f's={spec.s}, p={spec.p}')
    return 1 / (spec.sp - gp)


def outer_integral(u0, outer, x, radius, reach, growth, spec):
    '''Integral of g(u0 - outer(y)) K(x - y) over |y - x| > radius.'''
    total = 0.0
    mid = panels(x, radius, max(reach, radius), spec.n)
    if mid is not None:
        total += float(np.sum(g(u0 - outer(mid.points), spec.p) * mid.kernel_weights(spec)))
    tail = mapped_tail(x, max(reach, radius), spec.n, _tail_kappa(growth, spec))
    total += float(np.sum(g(u0 - outer(tail.points), spec.p) * tail.kernel_weights(spec)))
    return total


def analytic_zones(u, x, spec, radius=None, ambient=None, outer=True):
    '''Zones for an analytic function, or for u glued into an analytic ambient.

    With outer false only the annuli inside radius are kept, so u need not lie in
    the tail space.
    '''
    radius = DEFAULT_RADIUS if radius is None else radius
    ambient_fn = ambient or u
    u0 = float(u.value(x))
    reach = float(np.linalg.norm(x - ambient_fn.center)) + ambient_fn.support_radius
    total = 0.0
    if outer:
        total = outer_integral(u0, ambient_fn.value, x, radius, reach, ambient_fn.growth, spec)
    gradient = np.atleast_1d(u.gradient(x)).reshape(spec.n)
    return Zones(x, u0, lambda z: u.increment(x, z), gradient, total, radius, 'analytic')


def lattice_sum(u, index, values, spec):
    '''sum_{j != i} g(v_i - v_j) K(x_i - x_j) h^n over active nodes, plus the far field.'''
    x = u.points[index]
    mask = u.active.copy()
    mask[index] = False
    diff = x - u.points[mask]
    r = np.linalg.norm(diff, axis=-1)
    weights = spec.radial(r, diff / r[:, None]) * u.h ** u.n
    total = float(np.sum(g(values[index] - values[mask], spec.p) * weights))
    far_values, far_weights = u.far_field.quadrature(x[None, :], u.center, u.radius, spec)
    return total + float(np.sum(g(values[index] - far_values, spec.p) * far_weights[0]))


def grid_zones(u, x, spec, values=None, near=None):
    '''Zones at a lattice node: the lattice sum outside the node's own cell, and
    inside it a quadratic surrogate (or the supplied near function).'''
    index = u.node_index(x)
    x = u.points[index]
    values = u.flat if values is None else values
    u0 = float(values[index])
    if near is None:
        gradient, hessian = u.local_jet(index)

        def increment(z):
            return z @ gradient + 0.5 * np.einsum('mi,ij,mj->m', z, hessian, z)
    else:
        def increment(z):
            return near.increment(x, z)
        gradient = np.atleast_1d(near.gradient(x)).reshape(u.n)
    outer = lattice_sum(u, index, values, spec)
    if u.n == 2:
        corners = cell_corners(x, u.h)
        outer += float(np.sum(g(-increment(corners.z), spec.p)
                              * corners.kernel_weights(spec)))
    return Zones(x, u0, increment, gradient, outer, u.h / 2, 'grid')


def fit_rate(epsilons, contributions):
    '''Slope and R^2 of log|A_k| against log eps_k over the second half of the sequence.'''
    eps = np.asarray(epsilons[1:], dtype=float)
    a = np.abs(np.asarray(contributions, dtype=float))
    half = len(a) // 2
    eps, a = eps[half:], a[half:]
    keep = a > 0
    if np.sum(keep) < MIN_FIT_POINTS:
        return math.nan, math.nan
    x, y = np.log(eps[keep]), np.log(a[keep])
    if np.ptp(y) == 0:
        return 0.0, 1.0
    fit = linregress(x, y)
    return float(fit.slope), float(fit.rvalue ** 2)


def verdict(epsilons, partials, tol, scale):
    '''(verdict, value, rate, r_squared, reason) from a partial-integral sequence.'''
    contributions = np.diff(partials)
    last = partials[-1]
    rate, r2 = fit_rate(epsilons, contributions)
    tail = np.abs(contributions[len(contributions) // 2:])
    if np.all(tail <= tol * 1e-3):
        return CONVERGED, last, rate, r2, 'contributions vanish'
    fitted = not math.isnan(rate) and r2 >= MIN_R_SQUARED
    if fitted and rate <= -RATE_FLOOR:
        return (DIVERGED, math.copysign(math.inf, contributions[-1]), rate, r2,
                f'contributions grow like eps^{rate:.3g}')
    if abs(last) > DIVERGENCE_FACTOR * scale and not math.isnan(rate) and rate < 0:
        return (DIVERGED, math.copysign(math.inf, last), rate, r2,
                f'partials exceed {DIVERGENCE_FACTOR:g} x scale')
    if fitted and rate >= RATE_FLOOR:
        q = 2.0 ** -rate
        value = last + contributions[-1] * q / (1 - q)
        return CONVERGED, value, rate, r2, f'contributions decay like eps^{rate:.3g}'
    if abs(contributions[-1]) < tol:
        return CONVERGED, last, rate, r2, 'successive partials within tol'
    return INCONCLUSIVE, last, rate, r2, 'no decisive rate (R^2 or slope too small)'


def _is_glued(u):
    return hasattr(u, 'ambient') and hasattr(u, 'test')


def _zones(u, x, spec, radius, outer):
    if _is_glued(u):
        phi = u.test
        if isinstance(u.ambient, GridFunction):
            zones = grid_zones(u.ambient, x, spec, values=u.lattice_values(), near=phi)
        else:
            return analytic_zones(phi, x, spec, radius=u.radius, ambient=u.ambient,
                                  outer=outer)
    elif isinstance(u, GridFunction):
        zones = grid_zones(u, x, spec)
    elif isinstance(u, AnalyticFunction):
        return analytic_zones(u, x, spec, radius, outer=outer)
    else:
        raise PVError(f'cannot evaluate a principal value of {type(u).__name__}')
    if not outer:
        zones.outer = 0.0
    return zones


def _near_function(u):
    if _is_glued(u):
        return u.test
    return u if isinstance(u, AnalyticFunction) else None


def pv_evaluate(u, x, spec, tol=1e-8, radius=None, K=MAX_HALVINGS, certify=True,
                outer=True):
    '''Principal value of g(u(x) - u(y)) K(x - y) over R^n at x.

    Partial integrals over |y - x| > eps_k, eps_k = r 2^{-k}, k = 0..K, are
    formed from the fixed outer integral plus compensated annuli. outer=False
    drops the integral over |y - x| > r and leaves the near zone alone.
    '''
    if not isinstance(spec, KernelSpec):
        raise PVError(f'expected a KernelSpec, got {type(spec).__name__}')
    if not 1 <= K <= MAX_HALVINGS:
        raise PVError(f'halvings must lie in [1, {MAX_HALVINGS}]: {K}')
    point, _ = as_points(x, spec.n)
    point = point.reshape(spec.n)
    zones = _zones(u, point, spec, radius, outer)
    epsilons = zones.radius * 2.0 ** -np.arange(K + 1)
    partials = [zones.outer]
    for lo, hi in zip(epsilons[1:], epsilons[:-1]):
        partials.append(partials[-1] + zones.annulus(spec, lo, hi))
    scale = (1 + abs(zones.center_value)) ** (spec.p - 1) * zones.radius ** -spec.sp
    result, value, rate, r2, reason = verdict(epsilons, partials, tol, scale)

    near = _near_function(u)
    if near is not None and spec.singular and result != CONVERGED:
        G = np.linalg.norm(zones.gradient)
        if G <= 1e-14 * (1 + abs(zones.center_value)) and not near.is_isolated_critical(point):
            result, value = INCONCLUSIVE, partials[-1]
            reason = 'critical point of unknown character in the singular regime'

    bound = None
    if certify and near is not None and zones.kind == 'analytic':
        try:
            bound = near_zone_bound(near, point, zones.radius, spec)['bound']
        except (PVError, FunctionSpaceError) as e:
            LOGGER.debug(f'no near-zone bound at {point.tolist()}: {e}')
    LOGGER.debug(f'pv at {point.tolist()}: {result} {value} (rate {rate})')
    return PVResult(point=point.tolist(), value=float(value), verdict=result,
                    epsilons=epsilons.tolist(), partials=[float(v) for v in partials],
                    fitted_rate=rate, r_squared=r2, scale=float(scale), tol=float(tol),
                    near_zone_bound=bound, reason=reason)


def affine_annulus_integral(ell, x, r0, r1, spec):
    '''Direct and compensated integral of g(l(x) - l(y)) K(x - y) over r0 < |y - x| < r1.

    Both vanish for affine l; scale is the integral of the absolute integrand.
    '''
    point, _ = as_points(x, spec.n)
    point = point.reshape(spec.n)
    nodes = panels(point, r0, r1, spec.n)
    weights = nodes.kernel_weights(spec)
    direct = g(ell.value(point) - ell.value(nodes.points), spec.p)
    affine = g(-(nodes.z @ np.atleast_1d(ell.gradient(point)).reshape(spec.n)), spec.p)
    scale = float(np.sum(np.abs(direct) * weights))
    result = {'direct': float(np.sum(direct * weights)),
              'compensated': float(np.sum((direct - affine) * weights)),
              'scale': scale}
    result['ok'] = bool(max(abs(result['direct']), abs(result['compensated']))
                        <= 1e-8 * max(scale, 1e-300))
    return result


def suite_affine_annulus(rng, samples):
    '''Random affine functions on random annuli for random (n, s, p).'''
    violations = 0
    worst = 0.0
    for _ in range(samples):
        n = int(rng.choice([1, 2]))
        spec = KernelSpec(n=n, s=float(rng.uniform(0.05, 0.95)), p=float(rng.choice(P_VALUES)))
        ell = AnalyticFunction.affine(rng.uniform(-10, 10, n), rng.uniform(-10, 10))
        r0 = 10 ** rng.uniform(-3, 0)
        r1 = r0 * 10 ** rng.uniform(0.1, 2)
        result = affine_annulus_integral(ell, rng.uniform(-5, 5, n), r0, r1, spec)
        violations += not result['ok']
        if result['scale'] > 0:
            worst = max(worst, abs(result['direct']) / result['scale'] / 1e-8,
                        abs(result['compensated']) / result['scale'] / 1e-8)
    return {'lemma': 'affine_annulus', 'samples': int(samples), 'violations': int(violations),
            'worst_ratio': float(worst)}
