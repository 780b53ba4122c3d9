
import logging

import numpy as np

from functools import cached_property
from scipy.interpolate import RegularGridInterpolator
from scipy.linalg import lstsq

from ..kernels import as_points
from .domain import DomainSpec
from .domain import FunctionSpaceError
from .farfield import FarField
from .farfield import ZeroFarField


LOGGER = logging.getLogger(__name__)

JET_STENCIL = 5


class GridFunction(object):
    '''Lattice values on the ball |x - c| <= R plus a far-field model beyond it.

    Nodes are c + h*k with |k_i| <= N; their cells tile the cube of half-width
    R = (N + 1/2) h. In 2D the nodes outside the ball are inactive and the far
    field stands in for them. Instances are treated as immutable.
    '''
    COLLAR_SLACK = 1e-9

    def __init__(self, domain, h, collar_width, values, far_field=None, center=None):
        self.domain = domain
        self.n = domain.n
        self.h = float(h)
        if not self.h > 0:
            raise FunctionSpaceError(f'grid spacing must be positive: {h}')
        self.collar_width = float(collar_width)
        self.N = int(round(self.collar_width / self.h - 0.5))
        if self.N < 1:
            raise FunctionSpaceError(f'collar {collar_width} holds no cells at spacing {h}')
        self.radius = (self.N + 0.5) * self.h
        self.center = domain.center if center is None else np.asarray(center, dtype=float)
        self.center = np.atleast_1d(self.center).astype(float)
        self.far_field = far_field or ZeroFarField()

        needed = domain.max_distance(self.center) + domain.diam
        if self.radius < needed * (1 - self.COLLAR_SLACK):
            raise FunctionSpaceError(f'lattice radius {self.radius} does not cover '
                                     f'diam(domain) beyond the domain (needs {needed})')

        values = np.array(values, dtype=float)
        if values.size != self.shape_size:
            raise FunctionSpaceError(f'expected {self.shape_size} values, got {values.size}')
        values = values.reshape(self.shape)
        if not np.all(np.isfinite(values.reshape(-1)[self.active])):
            raise FunctionSpaceError('values must be finite at every active node')
        values.setflags(write=False)
        self.values = values

    @property
    def shape(self):
        return (2 * self.N + 1,) * self.n

    @property
    def shape_size(self):
        return (2 * self.N + 1) ** self.n

    @classmethod
    def sample(cls, f, domain, h, collar_width, far_field=None, center=None):
        '''Grid function with values f(x) at active nodes and far_field elsewhere.'''
        blank = cls(domain, h, collar_width, np.zeros((2 * int(round(
            collar_width / h - 0.5)) + 1) ** domain.n), far_field, center)
        values = np.asarray(f(blank.points), dtype=float).reshape(-1)
        outside = ~blank.active
        if np.any(outside):
            values = values.copy()
            values[outside] = blank.far_field.evaluate(blank.points[outside], blank.center)
        return blank.with_values(values)

    @classmethod
    def from_exterior(cls, domain, h, collar_width, far_field, interior=0.0, center=None):
        '''Exterior datum: the far-field model on every node, interior set to a guess.'''
        def f(points):
            values = far_field.evaluate(points, cls._center(domain, center))
            inside = domain.contains(points)
            guess = interior(points) if callable(interior) else interior
            return np.where(inside, guess, values)
        return cls.sample(f, domain, h, collar_width, far_field, center)

    @staticmethod
    def _center(domain, center):
        return domain.center if center is None else np.asarray(center, dtype=float)

    def with_values(self, values):
        return GridFunction(self.domain, self.h, self.collar_width, values, self.far_field,
                            self.center)

    def with_interior(self, interior_values):
        values = self.values.reshape(-1).copy()
        values[self.interior] = interior_values
        return self.with_values(values)

    def shifted(self, c):
        return GridFunction(self.domain, self.h, self.collar_width, self.values + c,
                            self.far_field.shifted(c), self.center)

    def scaled(self, factor):
        return GridFunction(self.domain, self.h, self.collar_width, self.values * factor,
                            self.far_field.scaled(factor), self.center)

    def negated(self):
        return self.scaled(-1.0)

    def restricted_to(self, subdomain):
        return GridFunction(subdomain, self.h, self.collar_width, self.values, self.far_field,
                            self.center)

    def compatible(self, other):
        return (self.n == other.n and self.h == other.h and self.N == other.N
                and np.array_equal(self.center, other.center))

    @cached_property
    def axes(self):
        k = np.arange(-self.N, self.N + 1)
        return [c + self.h * k for c in self.center]

    @cached_property
    def points(self):
        mesh = np.meshgrid(*self.axes, indexing='ij')
        return np.stack([m.reshape(-1) for m in mesh], axis=-1)

    @cached_property
    def flat(self):
        return self.values.reshape(-1)

    @cached_property
    def active(self):
        if self.n == 1:
            return np.ones(self.shape_size, dtype=bool)
        d = np.linalg.norm(self.points - self.center, axis=-1)
        return d <= self.radius

    @cached_property
    def interior(self):
        return self.domain.contains(self.points) & self.active

    @cached_property
    def exterior(self):
        return self.active & ~self.interior

    @property
    def interior_points(self):
        return self.points[self.interior]

    @property
    def interior_values(self):
        return self.flat[self.interior]

    def node_index(self, x):
        '''Flat index of the lattice node at x.'''
        point = np.atleast_1d(np.asarray(x, dtype=float)).reshape(self.n)
        k = (point - self.center) / self.h
        kr = np.round(k)
        if np.any(np.abs(k - kr) > 1e-9) or np.any(np.abs(kr) > self.N):
            raise FunctionSpaceError(f'{point.tolist()} is not a lattice node')
        index = np.ravel_multi_index(tuple((kr + self.N).astype(int)), self.shape)
        if not self.active[index]:
            raise FunctionSpaceError(f'{point.tolist()} is outside the lattice ball')
        return int(index)

    def value_at(self, x):
        return float(self.flat[self.node_index(x)])

    def stencil(self, index, width=JET_STENCIL):
        '''Flat indices of the active nodes within width/2 lattice steps of a node.'''
        center = np.array(np.unravel_index(index, self.shape))
        half = width // 2
        offsets = np.stack(np.meshgrid(*[np.arange(-half, half + 1)] * self.n,
                                       indexing='ij'), axis=-1).reshape(-1, self.n)
        k = center + offsets
        inside = np.all((k >= 0) & (k < 2 * self.N + 1), axis=-1)
        flat = np.ravel_multi_index(tuple(k[inside].T), self.shape)
        return flat[self.active[flat]]

    def local_jet(self, index, exclude_center=False):
        '''Least-squares quadratic (gradient, Hessian) on the 5^n stencil of a node.

        By default the fit interpolates the node value; with exclude_center the
        node is left out and the constant term is fitted too.
        '''
        nodes = self.stencil(index)
        nodes = nodes[nodes != index]
        z = self.points[nodes] - self.points[index]
        pairs = [(a, b) for a in range(self.n) for b in range(a, self.n)]
        columns = [z[:, a] for a in range(self.n)]
        columns += [z[:, a] * z[:, b] * (0.5 if a == b else 1.0) for a, b in pairs]
        rhs = self.flat[nodes]
        if exclude_center:
            columns.insert(0, np.ones(len(nodes)))
        else:
            rhs = rhs - self.flat[index]
        coeffs = lstsq(np.stack(columns, axis=-1), rhs)[0]
        if exclude_center:
            coeffs = coeffs[1:]
        gradient = coeffs[:self.n]
        hessian = np.zeros((self.n, self.n))
        for (a, b), c in zip(pairs, coeffs[self.n:]):
            hessian[a, b] = hessian[b, a] = c
        return gradient, hessian

    @cached_property
    def interpolator(self):
        return RegularGridInterpolator(self.axes, self.values, method='linear',
                                       bounds_error=False, fill_value=None)

    def evaluate(self, x):
        '''Multilinear interpolation inside the lattice ball, far-field model outside.'''
        points, scalar = as_points(x, self.n)
        shape = points.shape[:-1]
        points = points.reshape(-1, self.n)
        inside = np.linalg.norm(points - self.center, axis=-1) <= self.radius
        out = np.empty(len(points))
        if np.any(inside):
            out[inside] = self.interpolator(points[inside])
        if np.any(~inside):
            out[~inside] = self.far_field.evaluate(points[~inside], self.center)
        out = out.reshape(shape)
        return float(out.reshape(-1)[0]) if scalar else out

    __call__ = evaluate

    def header(self):
        return {'dimension': self.n, 'domain': self.domain.to_dict(), 'h': self.h,
                'collar': self.collar_width, 'center': self.center.tolist(),
                'far_field': self.far_field.to_dict()}

    @classmethod
    def from_header(cls, header, values):
        return cls(DomainSpec.from_config(header['domain']), header['h'], header['collar'],
                   values, FarField.from_config(header['far_field']), header.get('center'))

    def __repr__(self):
        return f'GridFunction({self.header()})'
