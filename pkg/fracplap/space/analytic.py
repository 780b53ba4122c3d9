
import logging

import numpy as np

from ..kernels import as_points
from .domain import FunctionSpaceError
from .farfield import ConstantFarField


LOGGER = logging.getLogger(__name__)

# critical set descriptors besides an explicit list of isolated points
ALL_CRITICAL = 'all'
UNKNOWN_CRITICAL = None


class AnalyticFunction(object):
    '''Closed-form function with exact gradient, Hessian and critical-set data.

    Evaluators take points shaped (m, n) and return (m,), (m, n) and (m, n, n).
    critical_points is a list of isolated critical points ([] for none), 'all'
    when every point is critical, or None when unknown. growth bounds |u(x)| by
    |x|^growth at infinity and decides tail-space membership; beyond
    |x - center| > support_radius the pv quadrature switches to a mapped tail.
    increment(x, z) gives u(x + z) - u(x) without cancellation against u(x).
    '''
    def __init__(self, n, value, gradient, hessian, *, critical_points=UNKNOWN_CRITICAL,
                 growth=0.0, far_field=None, center=None, support_radius=1.0, name='',
                 increment=None):
        self.n = n
        self._value = value
        self._gradient = gradient
        self._hessian = hessian
        self._increment = increment
        if critical_points not in (UNKNOWN_CRITICAL, ALL_CRITICAL):
            critical_points = [np.atleast_1d(np.asarray(c, dtype=float)).reshape(n)
                               for c in critical_points]
        self.critical_points = critical_points
        self.far_field = far_field
        self._growth = float(growth)
        self.center = np.zeros(n) if center is None else np.atleast_1d(
            np.asarray(center, dtype=float))
        self.support_radius = float(support_radius)
        self.name = name

    def __repr__(self):
        return f'AnalyticFunction({self.name or "anonymous"}, n={self.n})'

    @property
    def growth(self):
        return self.far_field.growth if self.far_field is not None else self._growth

    def in_tailspace(self, s, p):
        return self.growth * (p - 1) < s * p

    def _call(self, fn, x, trailing):
        points, scalar = as_points(x, self.n)
        shape = points.shape[:-1]
        out = np.asarray(fn(points.reshape(-1, self.n)), dtype=float)
        out = out.reshape(shape + trailing)
        return out[0] if scalar else out

    def value(self, x):
        out = self._call(self._value, x, ())
        return float(out) if np.ndim(out) == 0 else out

    __call__ = value
    evaluate = value

    def gradient(self, x):
        return self._call(self._gradient, x, (self.n,))

    def hessian(self, x):
        return self._call(self._hessian, x, (self.n, self.n))

    def increment(self, x, z):
        '''u(x + z) - u(x) for one point x and offsets z shaped (m, n).'''
        point = np.atleast_1d(np.asarray(x, dtype=float)).reshape(self.n)
        z = np.asarray(z, dtype=float).reshape(-1, self.n)
        if self._increment is not None:
            return np.asarray(self._increment(point, z), dtype=float)
        return self._value(point + z) - self._value(point[None, :])

    @property
    def critical_known(self):
        return self.critical_points is not UNKNOWN_CRITICAL

    def is_isolated_critical(self, x, tol=1e-12):
        if not isinstance(self.critical_points, list):
            return False
        point = np.atleast_1d(np.asarray(x, dtype=float))
        return any(np.linalg.norm(point - c) <= tol for c in self.critical_points)

    def critical_distance(self, x):
        '''Distance d_u(x) to the critical set; inf when the set is empty.'''
        points, scalar = as_points(x, self.n)
        if self.critical_points == ALL_CRITICAL:
            d = np.zeros(points.shape[:-1])
        elif not isinstance(self.critical_points, list):
            raise FunctionSpaceError(f'{self!r}: critical set unknown')
        elif not self.critical_points:
            d = np.full(points.shape[:-1], np.inf)
        else:
            crit = np.stack(self.critical_points)
            d = np.min(np.linalg.norm(points[..., None, :] - crit, axis=-1), axis=-1)
        return float(d.reshape(-1)[0]) if scalar else d

    def _combine(self, other, a, b, critical=UNKNOWN_CRITICAL):
        return AnalyticFunction(
            self.n,
            lambda x: a * self._value(x) + b * other._value(x),
            lambda x: a * self._gradient(x) + b * other._gradient(x),
            lambda x: a * self._hessian(x) + b * other._hessian(x),
            critical_points=critical,
            growth=max(self.growth, other.growth),
            center=self.center, support_radius=max(self.support_radius, other.support_radius),
            name=f'{self.name}+{other.name}',
            increment=lambda x, z: a * self.increment(x, z) + b * other.increment(x, z))

    def __add__(self, other):
        if isinstance(other, AnalyticFunction):
            return self._combine(other, 1.0, 1.0)
        return self.shifted(other)

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, AnalyticFunction):
            return self._combine(other, 1.0, -1.0)
        return self.shifted(-other)

    def __mul__(self, factor):
        factor = float(factor)
        critical = self.critical_points if factor != 0 else ALL_CRITICAL
        return AnalyticFunction(
            self.n,
            lambda x: factor * self._value(x),
            lambda x: factor * self._gradient(x),
            lambda x: factor * self._hessian(x),
            critical_points=critical,
            growth=self.growth if factor != 0 else 0.0,
            far_field=self.far_field.scaled(factor) if self.far_field else None,
            center=self.center, support_radius=self.support_radius,
            name=f'{factor}*{self.name}',
            increment=lambda x, z: factor * self.increment(x, z))

    __rmul__ = __mul__

    def __neg__(self):
        return self * -1.0

    def shifted(self, c):
        c = float(c)
        return AnalyticFunction(
            self.n, lambda x: self._value(x) + c, self._gradient, self._hessian,
            critical_points=self.critical_points, growth=self.growth,
            far_field=self.far_field.shifted(c) if self.far_field else None,
            center=self.center, support_radius=self.support_radius,
            name=f'{self.name}+{c}',
            increment=self.increment)

    def translated(self, v):
        '''x -> u(x - v).'''
        v = np.atleast_1d(np.asarray(v, dtype=float)).reshape(self.n)
        critical = self.critical_points
        if isinstance(critical, list):
            critical = [c + v for c in critical]
        return AnalyticFunction(
            self.n, lambda x: self._value(x - v), lambda x: self._gradient(x - v),
            lambda x: self._hessian(x - v), critical_points=critical, growth=self.growth,
            far_field=self.far_field, center=self.center + v,
            support_radius=self.support_radius, name=f'{self.name}(x-{v.tolist()})',
            increment=lambda x, z: self.increment(x - v, z))

    def finite_difference_check(self, points, step=1e-4):
        '''Max deviation of gradient/Hessian from centered differences, both O(step^2).'''
        points, _ = as_points(points, self.n)
        points = points.reshape(-1, self.n)
        eye = np.eye(self.n) * step
        fd_grad = np.stack([(self.value(points + e) - self.value(points - e)) / (2 * step)
                            for e in eye], axis=-1)
        fd_hess = np.stack([(self.gradient(points + e) - self.gradient(points - e)) / (2 * step)
                            for e in eye], axis=-1)
        return {'gradient': float(np.max(np.abs(fd_grad - self.gradient(points)))),
                'hessian': float(np.max(np.abs(fd_hess - self.hessian(points))))}

    @classmethod
    def constant(cls, n, c=0.0):
        c = float(c)
        return cls(n, lambda x: np.full(len(x), c), lambda x: np.zeros((len(x), n)),
                   lambda x: np.zeros((len(x), n, n)), critical_points=ALL_CRITICAL,
                   name=f'const({c})', increment=lambda x, z: np.zeros(len(z)))

    @classmethod
    def affine(cls, a, b=0.0):
        a = np.atleast_1d(np.asarray(a, dtype=float))
        n = len(a)
        b = float(b)
        critical = [] if np.any(a != 0) else ALL_CRITICAL
        return cls(n, lambda x: x @ a + b, lambda x: np.broadcast_to(a, x.shape).copy(),
                   lambda x: np.zeros((len(x), n, n)), critical_points=critical,
                   growth=1.0 if np.any(a != 0) else 0.0, name=f'affine({a.tolist()}, {b})',
                   increment=lambda x, z: z @ a)

    @classmethod
    def quadratic(cls, x0, gradient, hessian, c=0.0):
        '''c + g.(x - x0) + (x - x0)^T H (x - x0) / 2.'''
        x0 = np.atleast_1d(np.asarray(x0, dtype=float))
        n = len(x0)
        g = np.atleast_1d(np.asarray(gradient, dtype=float)).reshape(n)
        H = np.atleast_2d(np.asarray(hessian, dtype=float)).reshape(n, n)
        H = (H + H.T) / 2
        c = float(c)
        critical = UNKNOWN_CRITICAL
        if abs(np.linalg.det(H)) > 1e-14:
            critical = [x0 - np.linalg.solve(H, g)]
        elif not np.any(H) and np.any(g):
            critical = []

        def value(x):
            z = x - x0
            return c + z @ g + 0.5 * np.einsum('mi,ij,mj->m', z, H, z)

        def increment(x, z):
            return z @ (g + H @ (x - x0)) + 0.5 * np.einsum('mi,ij,mj->m', z, H, z)

        return cls(n, value, lambda x: g + (x - x0) @ H,
                   lambda x: np.broadcast_to(H, (len(x), n, n)).copy(),
                   critical_points=critical, growth=2.0 if np.any(H) else 1.0,
                   center=x0, name='quadratic', increment=increment)

    @classmethod
    def power_of_norm(cls, beta, x0=None, n=1, scale=1.0, c=0.0):
        '''c + scale * |x - x0|^beta.'''
        beta = float(beta)
        x0 = np.zeros(n) if x0 is None else np.atleast_1d(np.asarray(x0, dtype=float))
        n = len(x0)
        eye = np.eye(n)

        def value(x):
            return c + scale * np.linalg.norm(x - x0, axis=-1) ** beta

        def gradient(x):
            z = x - x0
            r = np.linalg.norm(z, axis=-1)
            with np.errstate(divide='ignore', invalid='ignore'):
                factor = np.where(r > 0, scale * beta * r ** (beta - 2), 0.0)
            return factor[:, None] * z

        def hessian(x):
            z = x - x0
            r = np.linalg.norm(z, axis=-1)
            with np.errstate(divide='ignore', invalid='ignore'):
                zhat = np.where(r[:, None] > 0, z / r[:, None], 0.0)
                radial = scale * beta * np.where(r > 0, r ** (beta - 2), 0.0)
            out = radial[:, None, None] * (eye + (beta - 2) * zhat[:, :, None] * zhat[:, None, :])
            at_zero = r == 0
            if np.any(at_zero):
                center = 2 * scale * eye if beta == 2 else (0 * eye if beta > 2 else
                                                            np.full((n, n), np.inf))
                out[at_zero] = center
            return out

        def increment(x, z):
            w = x - x0
            r2 = float(w @ w)
            if r2 == 0:
                return scale * np.linalg.norm(z, axis=-1) ** beta
            # |w + z|^beta - |w|^beta = |w|^beta expm1(beta/2 log1p((2 w.z + |z|^2) / |w|^2))
            t = (2 * (z @ w) + np.sum(z * z, axis=-1)) / r2
            with np.errstate(divide='ignore'):
                return scale * r2 ** (beta / 2) * np.expm1(beta / 2 * np.log1p(t))

        return cls(n, value, gradient, hessian, critical_points=[x0], growth=beta,
                   center=x0, name=f'|x|^{beta}', increment=increment)

    @classmethod
    def bump(cls, x0, radius):
        '''C^2 bump (1 - |x - x0|^2 / radius^2)^3, height 1, supported in B_radius(x0).'''
        x0 = np.atleast_1d(np.asarray(x0, dtype=float))
        n = len(x0)
        rho2 = float(radius) ** 2
        eye = np.eye(n)

        def value(x):
            q = np.sum((x - x0) ** 2, axis=-1) / rho2
            return np.where(q < 1, (1 - q) ** 3, 0.0)

        def gradient(x):
            z = x - x0
            q = np.sum(z ** 2, axis=-1) / rho2
            return np.where((q < 1)[:, None], -6 / rho2 * ((1 - q) ** 2)[:, None] * z, 0.0)

        def hessian(x):
            z = x - x0
            q = np.sum(z ** 2, axis=-1) / rho2
            inside = (q < 1)[:, None, None]
            out = (-6 / rho2 * ((1 - q) ** 2)[:, None, None] * eye
                   + 24 / rho2 ** 2 * (1 - q)[:, None, None] * z[:, :, None] * z[:, None, :])
            return np.where(inside, out, 0.0)

        def increment(x, z):
            w = x - x0
            q0 = float(w @ w) / rho2
            dq = (2 * (z @ w) + np.sum(z * z, axis=-1)) / rho2
            q1 = q0 + dq
            plain = value(x + z) - value(x[None, :])
            if q0 >= 1:
                return plain
            # (1 - q1)^3 - (1 - q0)^3 factored through q1 - q0
            a, b = 1 - q1, 1 - q0
            return np.where(q1 < 1, -dq * (a * a + a * b + b * b), plain)

        return cls(n, value, gradient, hessian, critical_points=UNKNOWN_CRITICAL,
                   center=x0, support_radius=float(radius), name='bump', increment=increment)

    @classmethod
    def capped_power(cls, beta, cap=1.0, n=1):
        '''min(|x|^beta, cap): smooth away from the origin and the sphere |x|^beta = cap.'''
        beta = float(beta)
        cap = float(cap)
        edge = cap ** (1 / beta)
        inner = cls.power_of_norm(beta, np.zeros(n))

        def inside(x):
            return np.linalg.norm(x, axis=-1) < edge

        def value(x):
            return np.minimum(inner._value(x), cap)

        def gradient(x):
            return np.where(inside(x)[:, None], inner._gradient(x), 0.0)

        def hessian(x):
            return np.where(inside(x)[:, None, None], inner._hessian(x), 0.0)

        def increment(x, z):
            plain = value(x + z) - value(x[None, :])
            if not inside(x[None, :])[0]:
                return plain
            return np.where(inside(x + z), inner.increment(x, z), plain)

        # outside the cap every point is critical; only the origin is tested
        return cls(n, value, gradient, hessian, critical_points=[np.zeros(n)], growth=0.0,
                   far_field=ConstantFarField(cap), center=np.zeros(n), support_radius=edge,
                   name=f'min(|x|^{beta}, {cap})', increment=increment)

    @classmethod
    def singular_example(cls, n=1):
        '''|x|^2 on the unit ball and 1 outside; smooth near the origin.'''
        u = cls.capped_power(2.0, 1.0, n)
        u.name = 'singular_example'
        return u

    @classmethod
    def negative_norm(cls, n=1):
        '''-|x|, with a kink at the origin.'''
        eye = np.eye(n)

        def gradient(x):
            r = np.linalg.norm(x, axis=-1)
            with np.errstate(divide='ignore', invalid='ignore'):
                return np.where(r[:, None] > 0, -x / r[:, None], 0.0)

        def hessian(x):
            r = np.linalg.norm(x, axis=-1)
            with np.errstate(divide='ignore', invalid='ignore'):
                xhat = np.where(r[:, None] > 0, x / r[:, None], 0.0)
                out = -(eye - xhat[:, :, None] * xhat[:, None, :]) / r[:, None, None]
            return np.where((r > 0)[:, None, None], out, np.inf)

        def increment(x, z):
            # |x| - |x + z| = -(2 x.z + |z|^2) / (|x + z| + |x|)
            r = np.linalg.norm(x)
            rz = np.linalg.norm(x + z, axis=-1)
            with np.errstate(divide='ignore', invalid='ignore'):
                out = -(2 * (z @ x) + np.sum(z * z, axis=-1)) / (rz + r)
            return np.where(rz + r > 0, out, 0.0)

        return cls(n, lambda x: -np.linalg.norm(x, axis=-1), gradient, hessian,
                   critical_points=[], growth=1.0, name='-|x|', increment=increment)
