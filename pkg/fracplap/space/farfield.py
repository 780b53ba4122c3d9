
import inspect
import logging

import numpy as np

from abc import ABC
from abc import abstractmethod
from functools import lru_cache
from scipy.special import hyp2f1

from ..kernels import as_points
from ..kernels import sphere_directions
from .domain import FunctionSpaceError
from .domain import NotInTailSpaceError


LOGGER = logging.getLogger(__name__)

MAPPED_RADIAL_NODES = 32
MAPPED_ANGLES = 64


def ball_complement_integral(x, center, R, n, sp, gp):
    '''Closed form of the integral over |y-c| > R of |y-c|^gp |x-y|^{-n-sp} dy.

    Needs gp < sp and |x-c| < R. Returned per side for n=1, as (right, left).
    '''
    points, _ = as_points(x, n)
    if not gp < sp:
        raise FunctionSpaceError(f'far-field integral diverges: growth {gp} >= {sp}')
    rel = points - np.asarray(center, dtype=float)
    b = sp - gp
    if n == 1:
        d = rel[..., 0] / R
        if np.any(np.abs(d) >= 1):
            raise FunctionSpaceError('evaluation point outside the lattice ball')
        factor = R ** (gp - sp) / b
        return (factor * hyp2f1(1 + sp, b, 1 + b, d),
                factor * hyp2f1(1 + sp, b, 1 + b, -d))

    t2 = np.sum(rel ** 2, axis=-1) / R ** 2
    if np.any(t2 >= 1):
        raise FunctionSpaceError('evaluation point outside the lattice ball')
    lam = 1 + sp / 2
    coeff = np.ones_like(t2)
    power = np.ones_like(t2)
    total = np.full_like(t2, 1 / b)
    for k in range(20000):
        coeff = coeff * ((lam + k) / (k + 1)) ** 2
        power = power * t2
        term = coeff * power / (b + 2 * (k + 1))
        total = total + term
        if np.all(term <= 1e-17 * total):
            break
    return 2 * np.pi * R ** (gp - sp) * total


@lru_cache(maxsize=64)
def _mapped_unit_nodes(n, kappa, nr, nang):
    '''Nodes rho/R = t^{-kappa} and volume weights for |y| > 1, scaled later by R.'''
    t, w = np.polynomial.legendre.leggauss(nr)
    t = (t + 1) / 2
    w = w / 2
    rho = t ** -kappa
    jac = kappa * t ** (-kappa - 1) * rho ** (n - 1) * w
    omega, wang = sphere_directions(n, nang)
    y = (rho[:, None, None] * omega[None, :, :]).reshape(-1, n)
    vol = (jac[:, None] * wang[None, :]).reshape(-1)
    return y, vol


def mapped_nodes(center, R, n, kappa, nr=MAPPED_RADIAL_NODES, nang=MAPPED_ANGLES):
    y, vol = _mapped_unit_nodes(n, float(kappa), nr, nang)
    return np.asarray(center, dtype=float) + R * y, vol * R ** n


def kernel_weights(x, y, vol, kernel):
    '''vol_m K(x_i - y_m) as an array shaped (len(x), len(y)).'''
    diff = x[:, None, :] - y[None, :, :]
    r = np.linalg.norm(diff, axis=-1)
    return vol[None, :] * kernel.radial(r, diff / r[..., None])


class FarField(ABC):
    '''Model of a function on the far region |y - c| > R outside the lattice ball.'''
    SUBCLASSES = {}

    @classmethod
    @abstractmethod
    def TYPE(cls):
        return None

    @classmethod
    def __init_subclass__(cls, **kwargs):
        super().__init_subclass__(**kwargs)
        if not inspect.isabstract(cls):
            cls.SUBCLASSES[cls.TYPE()] = cls

    @classmethod
    def from_config(cls, config):
        config = dict(config or {'type': 'zero'})
        fartype = config.pop('type', None) or config.pop('kind', None)
        subclass = cls.SUBCLASSES.get(fartype)
        if not subclass:
            raise FunctionSpaceError(f"unknown far-field model '{fartype}'")
        if fartype in ('min', 'max'):
            return subclass(cls.from_config(config['left']), cls.from_config(config['right']))
        if fartype == 'offset':
            return subclass(cls.from_config(config['base']), config.get('offset', 0.0))
        return subclass(**config)

    @abstractmethod
    def to_dict(self):
        pass

    def __eq__(self, other):
        return isinstance(other, FarField) and self.to_dict() == other.to_dict()

    def __hash__(self):
        return hash(repr(self.to_dict()))

    def __repr__(self):
        return f'{self.__class__.__name__}({self.to_dict()})'

    @property
    @abstractmethod
    def growth(self):
        pass

    def in_tailspace(self, s, p):
        return self.growth * (p - 1) < s * p

    def check_tailspace(self, s, p):
        if not self.in_tailspace(s, p):
            raise NotInTailSpaceError(f'{self!r} is not in the tail space: growth '
                                      f'{self.growth} * (p-1) >= sp = {s * p}')

    @abstractmethod
    def evaluate(self, y, center):
        pass

    @property
    def constant_value(self):
        '''The value when the model is constant, else None.'''
        return None

    def modulus_integral(self, x, center, R, n, s, p):
        '''Integral of |f|^{p-1} |y-x|^{-n-sp} over the far region.'''
        self.check_tailspace(s, p)
        sp = s * p
        gp = self.growth * (p - 1)
        y, vol = mapped_nodes(center, R, n, 1 / (sp - gp))
        points, _ = as_points(x, n)
        diff = points[:, None, :] - y[None, :, :]
        r = np.linalg.norm(diff, axis=-1)
        integrand = np.abs(self.evaluate(y, center)) ** (p - 1)
        return np.sum(vol[None, :] * integrand[None, :] * r ** (-n - sp), axis=-1)

    def quadrature(self, x, center, R, kernel):
        '''(values, weights) with sum_m F(values_m) weights_im ~ far integral of F(f) K(x_i-y).'''
        self.check_tailspace(kernel.s, kernel.p)
        points, _ = as_points(x, kernel.n)
        gp = self.growth * (kernel.p - 1)
        y, vol = mapped_nodes(center, R, kernel.n, 1 / (kernel.sp - gp))
        return self.evaluate(y, center), kernel_weights(points, y, vol, kernel)

    def shifted(self, c):
        if c == 0:
            return self
        return OffsetFarField(self, c)

    @abstractmethod
    def scaled(self, factor):
        pass

    def negated(self):
        return self.scaled(-1.0)


class ConstantFarField(FarField):
    @classmethod
    def TYPE(cls):
        return 'constant'

    def __init__(self, value=0.0):
        self.value = float(value)

    def to_dict(self):
        return {'type': self.TYPE(), 'value': self.value}

    @property
    def growth(self):
        return 0.0

    @property
    def constant_value(self):
        return self.value

    def evaluate(self, y, center):
        return np.full(np.shape(y)[:-1], self.value)

    def _pure_weights(self, x, center, R, n, sp, kernel=None):
        parts = ball_complement_integral(x, center, R, n, sp, 0.0)
        if n == 1:
            if kernel is not None:
                # y right of x means z = x - y points to -1
                minus = kernel.profile.angular(np.array([[-1.0]]))[0]
                plus = kernel.profile.angular(np.array([[1.0]]))[0]
                return [minus * parts[0], plus * parts[1]]
            return [parts[0], parts[1]]
        scale = 1.0 if kernel is None else kernel.angular_integral / (2 * np.pi)
        return [scale * parts]

    def modulus_integral(self, x, center, R, n, s, p):
        if self.value == 0:
            points, _ = as_points(x, n)
            return np.zeros(points.shape[:-1])
        return abs(self.value) ** (p - 1) * np.sum(
            self._pure_weights(x, center, R, n, s * p), axis=0)

    def side_values(self, n):
        return [self.value, self.value] if n == 1 else [self.value]

    def quadrature(self, x, center, R, kernel):
        if kernel.n == 2 and not kernel.isotropic:
            values, weights = super().quadrature(x, center, R, kernel)
            return np.array([self.value]), np.sum(weights, axis=-1, keepdims=True)
        weights = self._pure_weights(x, center, R, kernel.n, kernel.sp, kernel)
        return np.asarray(self.side_values(kernel.n)), np.stack(weights, axis=-1)

    def shifted(self, c):
        return ConstantFarField(self.value + c)

    def scaled(self, factor):
        return ConstantFarField(self.value * factor)


class ZeroFarField(ConstantFarField):
    @classmethod
    def TYPE(cls):
        return 'zero'

    def __init__(self):
        super().__init__(0.0)

    def to_dict(self):
        return {'type': self.TYPE()}

    def scaled(self, factor):
        return self


class SignFarField(ConstantFarField):
    '''value * sign of the first coordinate of y - c.'''
    @classmethod
    def TYPE(cls):
        return 'sign'

    @property
    def constant_value(self):
        return None if self.value else 0.0

    def evaluate(self, y, center):
        y = np.asarray(y, dtype=float)
        return self.value * np.sign(y[..., 0] - np.asarray(center, dtype=float)[0])

    def side_values(self, n):
        return [self.value, -self.value]

    def quadrature(self, x, center, R, kernel):
        if kernel.n == 1:
            return super().quadrature(x, center, R, kernel)
        return FarField.quadrature(self, x, center, R, kernel)

    def shifted(self, c):
        return FarField.shifted(self, c)

    def scaled(self, factor):
        return SignFarField(self.value * factor)


class PowerFarField(FarField):
    '''amplitude * |y - c|^gamma.'''
    @classmethod
    def TYPE(cls):
        return 'power'

    def __init__(self, amplitude=1.0, gamma=0.0):
        self.amplitude = float(amplitude)
        self.gamma = float(gamma)

    def to_dict(self):
        return {'type': self.TYPE(), 'amplitude': self.amplitude, 'gamma': self.gamma}

    @property
    def growth(self):
        return self.gamma

    def evaluate(self, y, center):
        y = np.asarray(y, dtype=float)
        return self.amplitude * np.linalg.norm(y - np.asarray(center, dtype=float),
                                               axis=-1) ** self.gamma

    def modulus_integral(self, x, center, R, n, s, p):
        self.check_tailspace(s, p)
        parts = ball_complement_integral(x, center, R, n, s * p, self.gamma * (p - 1))
        if n == 1:
            parts = parts[0] + parts[1]
        return abs(self.amplitude) ** (p - 1) * parts

    def scaled(self, factor):
        return PowerFarField(self.amplitude * factor, self.gamma)


class OffsetFarField(FarField):
    '''base + offset, for models without a closed-form shift.'''
    @classmethod
    def TYPE(cls):
        return 'offset'

    def __init__(self, base, offset=0.0):
        self.base = base
        self.offset = float(offset)

    def to_dict(self):
        return {'type': self.TYPE(), 'base': self.base.to_dict(), 'offset': self.offset}

    @property
    def growth(self):
        return self.base.growth

    def evaluate(self, y, center):
        return self.base.evaluate(y, center) + self.offset

    def shifted(self, c):
        return OffsetFarField(self.base, self.offset + c) if self.offset + c else self.base

    def scaled(self, factor):
        return OffsetFarField(self.base.scaled(factor), self.offset * factor)


class MinFarField(FarField):
    @classmethod
    def TYPE(cls):
        return 'min'

    def __init__(self, left, right):
        self.left = left
        self.right = right

    def to_dict(self):
        return {'type': self.TYPE(), 'left': self.left.to_dict(), 'right': self.right.to_dict()}

    @property
    def growth(self):
        return max(self.left.growth, self.right.growth)

    def combine(self, a, b):
        return np.minimum(a, b)

    def evaluate(self, y, center):
        return self.combine(self.left.evaluate(y, center), self.right.evaluate(y, center))

    def shifted(self, c):
        return type(self)(self.left.shifted(c), self.right.shifted(c))

    def scaled(self, factor):
        if factor > 0:
            return type(self)(self.left.scaled(factor), self.right.scaled(factor))
        other = MaxFarField if isinstance(self, MinFarField) and \
            not isinstance(self, MaxFarField) else MinFarField
        return other(self.left.scaled(factor), self.right.scaled(factor))


class MaxFarField(MinFarField):
    @classmethod
    def TYPE(cls):
        return 'max'

    def combine(self, a, b):
        return np.maximum(a, b)


def far_min(a, b):
    '''Pointwise minimum of two far-field models, simplified when both are constant.'''
    if a == b:
        return a
    if b.constant_value is not None and b.constant_value == np.inf:
        return a
    if a.constant_value is not None and a.constant_value == np.inf:
        return b
    if a.constant_value is not None and b.constant_value is not None:
        return ConstantFarField(min(a.constant_value, b.constant_value))
    return MinFarField(a, b)
