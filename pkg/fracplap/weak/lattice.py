
import logging

import numpy as np

from functools import cached_property
from scipy.sparse import csr_matrix

from ..algebra import g


LOGGER = logging.getLogger(__name__)

ROW_CHUNK = 256
PAIR_BLOCK = 2 ** 22


def pair_weights(x, y, spec, h):
    '''K(x_i - y_j) h^n with the one-cell diagonal cutoff.'''
    diff = x[:, None, :] - y[None, :, :]
    r = np.linalg.norm(diff, axis=-1)
    keep = r > h / 2
    safe = np.where(keep, r, 1.0)
    with np.errstate(invalid='ignore'):
        weights = spec.radial(safe, diff / safe[..., None])
    return np.where(keep, weights, 0.0) * h ** spec.n


class LatticeOperator(object):
    '''Discrete operator, energy and derivatives in the interior unknowns of a problem.

    Exterior lattice nodes sharing a value are merged into one weight column, and
    the far field enters through its quadrature columns; the energy uses
    |u_i - f|^p - |f|^p there so it stays finite for any tail-space datum.
    '''
    def __init__(self, grid, spec, chunk=ROW_CHUNK):
        self.grid = grid
        self.spec = spec
        self.p = spec.p
        self.hn = grid.h ** grid.n
        self.interior = np.flatnonzero(grid.interior)
        exterior = np.flatnonzero(grid.exterior)
        xi = grid.points[self.interior]
        xe = grid.points[exterior]
        nI = len(self.interior)

        self.ext_values, inverse = np.unique(grid.flat[exterior], return_inverse=True)
        onehot = csr_matrix((np.ones(len(exterior)), (np.arange(len(exterior)), inverse)),
                            shape=(len(exterior), len(self.ext_values)))
        self.W = np.zeros((nI, nI))
        self.WX = np.zeros((nI, len(self.ext_values)))
        # rows per block, so one block of pair weights stays near PAIR_BLOCK entries
        chunk = max(1, min(chunk, PAIR_BLOCK // max(len(xi), len(xe), 1)))
        for start in range(0, nI, chunk):
            rows = slice(start, min(start + chunk, nI))
            self.W[rows] = pair_weights(xi[rows], xi, spec, grid.h)
            self.WX[rows] = np.asarray((onehot.T @ pair_weights(xi[rows], xe, spec, grid.h).T).T)
        self.far_values, self.FW = grid.far_field.quadrature(xi, grid.center, grid.radius, spec)
        self.far_values = np.asarray(self.far_values, dtype=float)
        LOGGER.debug(f'lattice operator: {nI} unknowns, {len(self.ext_values)} exterior '
                     f'groups, {len(self.far_values)} far-field nodes')

    @property
    def size(self):
        return len(self.interior)

    @cached_property
    def exterior_values(self):
        return np.concatenate([self.ext_values, self.far_values])

    @cached_property
    def exterior_weights(self):
        return np.hstack([self.WX, self.FW])

    @property
    def initial(self):
        return self.grid.flat[self.interior].copy()

    def full(self, u_int):
        return self.grid.with_interior(u_int)

    def residual(self, u_int):
        '''R_i = sum_j g(u_i - u_j) W_ij + exterior terms: the discrete L_h u(x_i).'''
        u_int = np.asarray(u_int, dtype=float)
        inner = np.sum(g(u_int[:, None] - u_int[None, :], self.p) * self.W, axis=1)
        outer = np.sum(g(u_int[:, None] - self.exterior_values[None, :], self.p)
                       * self.exterior_weights, axis=1)
        return inner + outer

    def energy(self, u_int):
        u_int = np.asarray(u_int, dtype=float)
        p = self.p
        inner = np.sum(np.abs(u_int[:, None] - u_int[None, :]) ** p * self.W)
        lattice = np.sum(np.abs(u_int[:, None] - self.ext_values[None, :]) ** p * self.WX)
        far = np.sum((np.abs(u_int[:, None] - self.far_values[None, :]) ** p
                      - np.abs(self.far_values[None, :]) ** p) * self.FW)
        return float(self.hn * (inner + 2 * lattice + 2 * far))

    def gradient(self, u_int):
        return 2 * self.p * self.hn * self.residual(u_int)

    def hessian(self, u_int, delta=0.0):
        '''Hessian of the energy with |t|^{p-2} regularized to (t^2 + delta^2)^{(p-2)/2}.'''
        u_int = np.asarray(u_int, dtype=float)
        p = self.p

        def weight(t):
            if p == 2:
                return np.ones_like(t)
            with np.errstate(divide='ignore'):
                return (t ** 2 + delta ** 2) ** ((p - 2) / 2)

        inner = weight(u_int[:, None] - u_int[None, :]) * self.W
        outer = weight(u_int[:, None] - self.exterior_values[None, :]) * self.exterior_weights
        H = -inner
        H[np.diag_indices_from(H)] += np.sum(inner, axis=1) + np.sum(outer, axis=1)
        return 2 * p * (p - 1) * self.hn * H

    def node_derivative(self, i, t, u_int):
        '''Derivative of the energy in the unknown i with value t, the others fixed.'''
        inner = np.sum(g(t - u_int, self.p) * self.W[i])
        outer = np.sum(g(t - self.exterior_values, self.p) * self.exterior_weights[i])
        return 2 * self.p * self.hn * (inner + outer)

    def bracket(self, i, u_int):
        '''Values between which the node derivative changes sign.'''
        linked = self.W[i] > 0
        values = [self.exterior_values[self.exterior_weights[i] > 0]]
        if np.any(linked):
            values.append(u_int[linked])
        values = np.concatenate(values)
        return float(np.min(values)), float(np.max(values))
