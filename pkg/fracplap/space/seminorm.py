
import logging

import numpy as np

from ..kernels import as_points
from .domain import FunctionSpaceError


LOGGER = logging.getLogger(__name__)

ROW_CHUNK = 256


def pair_sum(points, values, fn, h, chunk=ROW_CHUNK):
    '''Sum over ordered node pairs at distance >= h/2 of fn(diff, r).

    diff = values_i - values_j and r = |x_i - x_j|; rows are processed in chunks.
    '''
    total = 0.0
    for start in range(0, len(points), chunk):
        stop = min(start + chunk, len(points))
        r = np.linalg.norm(points[start:stop, None, :] - points[None, :, :], axis=-1)
        diff = values[start:stop, None] - values[None, :]
        keep = r > h / 2
        with np.errstate(divide='ignore', invalid='ignore'):
            terms = np.where(keep, fn(diff, np.where(keep, r, 1.0)), 0.0)
        total += float(np.sum(terms))
    return total


def gagliardo_seminorm(u, region, s, p):
    '''Discrete W^{s,p} seminorm of u over region with a one-cell diagonal cutoff.'''
    mask = u.active & region.contains(u.points, closed=True)
    if not np.any(mask):
        raise FunctionSpaceError(f'region {region.to_dict()} holds no lattice nodes')
    exponent = u.n + s * p
    total = pair_sum(u.points[mask], u.flat[mask],
                     lambda diff, r: np.abs(diff) ** p * r ** -exponent, u.h)
    return (total * u.h ** (2 * u.n)) ** (1 / p)


def cell_kernel_integral_1d(centers, h, z, r, alpha):
    '''Exact integral of |x - z|^{-1-alpha} over each cell minus (z - r, z + r).'''
    lo = centers - h / 2
    hi = centers + h / 2
    with np.errstate(divide='ignore', invalid='ignore'):
        a = np.maximum(lo, z + r)
        right = np.where(hi > a, ((a - z) ** -alpha - np.abs(hi - z) ** -alpha) / alpha, 0.0)
        b = np.minimum(hi, z - r)
        left = np.where(b > lo, ((z - b) ** -alpha - np.abs(z - lo) ** -alpha) / alpha, 0.0)
    return np.where(hi > a, right, 0.0) + np.where(b > lo, left, 0.0)


def tail(f, z, r, s, p):
    '''Tail(f; z, r) = (r^{sp} * integral over |x-z| >= r of |f|^{p-1}|x-z|^{-n-sp})^{1/(p-1)}.'''
    if not r > 0:
        raise FunctionSpaceError(f'tail radius must be positive: {r}')
    f.far_field.check_tailspace(s, p)
    point, _ = as_points(z, f.n)
    point = point.reshape(f.n)
    if np.linalg.norm(point - f.center) + r > f.radius:
        raise FunctionSpaceError(f'B_{r}({point.tolist()}) leaves the lattice ball')
    sp = s * p
    mask = f.active
    modulus = np.abs(f.flat[mask]) ** (p - 1)
    if f.n == 1:
        weights = cell_kernel_integral_1d(f.points[mask][:, 0], f.h, point[0], r, sp)
    else:
        d = np.linalg.norm(f.points[mask] - point, axis=-1)
        with np.errstate(divide='ignore'):
            weights = np.where(d >= r, f.h ** 2 * d ** (-2 - sp), 0.0)
    lattice = float(np.sum(modulus * weights))
    far = float(np.sum(f.far_field.modulus_integral(point[None, :], f.center, f.radius,
                                                     f.n, s, p)))
    return (r ** sp * (lattice + far)) ** (1 / (p - 1))


def check_tailspace_membership(f, s, p):
    '''Membership in L^{p-1}_{sp}, decided by the far-field growth.'''
    growth = f.far_field.growth if hasattr(f, 'far_field') and f.far_field else f.growth
    marginal = s * p / (p - 1)
    return {'member': bool(growth * (p - 1) < s * p), 'growth': float(growth),
            'marginal_exponent': float(marginal)}
