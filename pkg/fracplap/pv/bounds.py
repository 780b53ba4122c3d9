
import logging

import numpy as np

from scipy.special import beta as beta_function

from ..algebra import PowerIntegralConstants
from ..kernels import as_points
from ..kernels import sphere_directions
from ..kernels import sphere_measure
from ..space.analytic import ALL_CRITICAL
from ..space.domain import DomainSpec
from .quadrature import gauss_legendre


LOGGER = logging.getLogger(__name__)

RADIAL_PANELS = 40
C2BETA_LEVELS = 14
C2BETA_GRID = 33


class PVError(ValueError):
    pass


def _radial_integral(f, eps, panels=RADIAL_PANELS):
    '''Integral of f over (0, eps] on halving panels plus a geometric remainder.'''
    t, w = gauss_legendre()
    contributions = []
    for k in range(panels):
        hi = eps * 2.0 ** -k
        lo = hi / 2
        rho = lo + (hi - lo) * t
        contributions.append(float(np.sum((hi - lo) * w * f(rho))))
    contributions = np.array(contributions)
    if not np.all(np.isfinite(contributions)):
        return np.inf
    last, before = contributions[-1], contributions[-2]
    if last == 0:
        return float(np.sum(contributions))
    q = last / before if before else np.inf
    if not 0 <= q < 1:
        return np.inf
    return float(np.sum(contributions) + last * q / (1 - q))


def _sample_region(region, center_points, levels):
    lo, hi = region.bounds
    axes = [np.linspace(a, b, C2BETA_GRID) for a, b in zip(lo, hi)]
    grid = np.stack(np.meshgrid(*axes, indexing='ij'), axis=-1).reshape(-1, region.n)
    grid = grid[region.contains(grid, closed=True)]
    omega, _ = sphere_directions(region.n, 16)
    ladders = []
    for k in range(levels):
        delta = region.diam * 2.0 ** -(k + 1)
        ring = np.concatenate([c + delta * omega for c in center_points]) if len(
            center_points) else np.empty((0, region.n))
        ladders.append(ring[region.contains(ring, closed=True)])
    return grid, ladders


def c2beta_norm(phi, region, beta, levels=C2BETA_LEVELS):
    '''Sampled C^2_beta norm of phi over region; inf when the sup grows under refinement.

    The sampled quantity is min(d, 1)^{beta-1}/|grad phi| + |D^2 phi|/d^{beta-2}
    with d the distance to the critical set (inf when there are no critical points).
    '''
    beta = float(beta)
    if phi.critical_points == ALL_CRITICAL:
        return np.inf
    phi.critical_distance(region.center)  # raises when the set is unknown
    centers = [c for c in phi.critical_points
               if np.linalg.norm(c - region.center) <= region.diam]
    grid, ladders = _sample_region(region, centers, levels)

    def sup(points):
        if not len(points):
            return 0.0
        d = np.atleast_1d(phi.critical_distance(points))
        keep = d > 0
        points, d = points[keep], d[keep]
        if not len(points):
            return 0.0
        grad = np.linalg.norm(np.atleast_2d(phi.gradient(points)), axis=-1)
        hess = np.linalg.norm(phi.hessian(points).reshape(-1, phi.n, phi.n), ord=2,
                              axis=(-2, -1))
        with np.errstate(divide='ignore', invalid='ignore'):
            first = np.minimum(d, 1.0) ** (beta - 1) / grad
            second = np.where(hess == 0, 0.0, hess / d ** (beta - 2))
        values = first + second
        values = np.where(np.isnan(values), np.inf, values)
        return float(np.max(values))

    sups = [sup(grid)]
    for ring in ladders:
        sups.append(max(sups[-1], sup(ring)))
    if not np.isfinite(sups[-1]) or (sups[-3] > 0 and sups[-1] > 2 * sups[-3]):
        LOGGER.debug(f'C2_beta norm of {phi!r} diverges: {sups[-3]} -> {sups[-1]}')
        return np.inf
    return sups[-1]


def hessian_sup(u, x, radius, samples=17):
    '''Sampled sup of the spectral norm of D^2 u over the closed ball B_radius(x).'''
    point, _ = as_points(x, u.n)
    omega, _ = sphere_directions(u.n, 16)
    rho = np.linspace(0, radius, samples)
    points = (point.reshape(1, 1, u.n) + rho[:, None, None] * omega[None]).reshape(-1, u.n)
    hess = np.asarray(u.hessian(points)).reshape(-1, u.n, u.n)
    if not np.all(np.isfinite(hess)):
        return np.inf
    return float(np.max(np.linalg.norm(hess, ord=2, axis=(-2, -1))))


def angular_sup(spec):
    omega, _ = sphere_directions(spec.n, 256)
    return float(np.max(spec.profile.angular(omega)))


def near_zone_bound(u, x, eps, spec, beta=None, norm=None):
    '''Explicit bound on the compensated integral over B_eps(x) of the principal value.

    The integrand differs from its affine part by at most
    c_diff (|grad u . z| + b)^{p-2} b with b = tau rho^2 / 2; the spherical integral
    of that is B(rho) and the bound is c_diff * sup(a) * int_0^eps B rho^{-1-sp}.
    '''
    p, sp, n = spec.p, spec.sp, spec.n
    point, _ = as_points(x, n)
    point = point.reshape(n)
    G = float(np.linalg.norm(np.atleast_1d(u.gradient(point))))
    constant = PowerIntegralConstants(p).c_upper * (p - 1) * angular_sup(spec)
    sphere = sphere_measure(n)
    regime = 'c2'
    d = np.inf
    if beta is not None:
        if not beta > sp / (p - 1):
            raise PVError(f'inadmissible test-function class: beta {beta} <= '
                          f'sp/(p-1) = {sp / (p - 1)}')
        d = u.critical_distance(point)
    if beta is not None and np.isfinite(d):
        regime = 'c2beta'
        if norm is None:
            norm = c2beta_norm(u, DomainSpec.ball(point, eps), beta)

        def tau(rho):
            return norm * (d + rho) ** (beta - 2)
    else:
        hess = hessian_sup(u, point, eps)

        def tau(rho):
            return np.full_like(rho, hess)

    if p < 2:
        s_p = 2.0 if n == 1 else 2 * beta_function(0.5, (p - 1) / 2)

    def B(rho):
        b = tau(rho) * rho ** 2 / 2
        with np.errstate(divide='ignore', invalid='ignore'):
            if p >= 2:
                out = sphere * (G * rho + b) ** (p - 2) * b
            else:
                first = s_p * (G * rho) ** (p - 2) * b if G > 0 else np.full_like(rho, np.inf)
                out = np.minimum(first, sphere * b ** (p - 1))
        return np.where(b == 0, 0.0, out) * rho ** (-1 - sp)

    integral = _radial_integral(B, eps)
    bound = constant * integral
    LOGGER.debug(f'near-zone bound at {point.tolist()} eps={eps}: {bound} ({regime})')
    return {'bound': float(bound), 'regime': regime, 'gradient_norm': G,
            'constant': float(constant), 'c2beta_norm': None if norm is None else float(norm)}
