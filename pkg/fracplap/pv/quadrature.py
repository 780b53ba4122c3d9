
import logging

import numpy as np

from functools import lru_cache

from ..kernels import sphere_directions
from ..space.farfield import mapped_nodes


LOGGER = logging.getLogger(__name__)

RADIAL_ORDER = 16
ANGLES = 64


@lru_cache(maxsize=16)
def gauss_legendre(order=RADIAL_ORDER):
    '''Gauss-Legendre nodes and weights on [0, 1].'''
    t, w = np.polynomial.legendre.leggauss(order)
    return (t + 1) / 2, w / 2


def geometric_panels(lo, hi, ratio=2.0):
    '''Edges lo = e_0 < e_1 < ... = hi with e_{k+1} <= ratio * e_k.'''
    if not 0 < lo < hi:
        return [lo, hi] if hi > lo else []
    count = max(1, int(np.ceil(np.log(hi / lo) / np.log(ratio))))
    return list(lo * (hi / lo) ** (np.arange(count + 1) / count))


class PolarNodes(object):
    '''Quadrature nodes y = x + rho*omega with volume weights rho^{n-1} drho domega.'''
    def __init__(self, x, rho, omega, weights):
        self.x = x
        self.rho = rho
        self.omega = omega
        self.weights = weights

    @property
    def z(self):
        return self.rho[:, None] * self.omega

    @property
    def points(self):
        return self.x + self.z

    def kernel_weights(self, spec):
        return self.weights * spec.radial(self.rho, self.omega)

    @classmethod
    def concat(cls, parts):
        parts = list(parts)
        return cls(parts[0].x,
                   np.concatenate([q.rho for q in parts]),
                   np.concatenate([q.omega for q in parts]),
                   np.concatenate([q.weights for q in parts]))


def annulus(x, lo, hi, n, order=RADIAL_ORDER, angles=ANGLES):
    '''Nodes on lo < |y - x| < hi; the angular rule is symmetric under omega -> -omega.'''
    t, wt = gauss_legendre(order)
    rho = lo + (hi - lo) * t
    wr = (hi - lo) * wt * rho ** (n - 1)
    omega, wang = sphere_directions(n, angles)
    return PolarNodes(np.asarray(x, dtype=float),
                      np.repeat(rho, len(omega)),
                      np.tile(omega, (len(rho), 1)),
                      np.outer(wr, wang).reshape(-1))


def panels(x, lo, hi, n, ratio=2.0, order=RADIAL_ORDER, angles=ANGLES):
    edges = geometric_panels(lo, hi, ratio)
    if len(edges) < 2:
        return None
    return PolarNodes.concat(annulus(x, a, b, n, order, angles)
                             for a, b in zip(edges[:-1], edges[1:]))


def cell_corners(x, h, order=RADIAL_ORDER, angles=ANGLES):
    '''Nodes on the square cell of side h around x (n=2) outside its inscribed disc.'''
    t, wt = gauss_legendre(order)
    omega, wang = sphere_directions(2, angles)
    lo = h / 2
    hi = lo / np.max(np.abs(omega), axis=-1)
    rho = lo + np.outer(hi - lo, t)
    weights = (hi - lo)[:, None] * wt[None, :] * rho * wang[:, None]
    return PolarNodes(np.asarray(x, dtype=float), rho.reshape(-1),
                      np.repeat(omega, order, axis=0), weights.reshape(-1))


def mapped_tail(x, R, n, kappa, angles=ANGLES):
    '''Nodes on |y - x| > R with the radial map rho = R t^{-kappa}.'''
    y, vol = mapped_nodes(x, R, n, kappa, nang=angles)
    z = y - x
    rho = np.linalg.norm(z, axis=-1)
    return PolarNodes(np.asarray(x, dtype=float), rho, z / rho[:, None], vol)
