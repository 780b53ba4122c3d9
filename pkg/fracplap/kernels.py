
import inspect
import logging
import math

import numpy as np

from abc import ABC
from abc import abstractmethod
from dataclasses import dataclass
from dataclasses import field
from functools import cached_property


LOGGER = logging.getLogger(__name__)


class KernelError(ValueError):
    pass


def as_points(z, n):
    '''Return (points, scalar) with points shaped (..., n).

    For n=1 bare numbers and 1-D arrays of numbers are accepted as points.
    '''
    z = np.asarray(z, dtype=float)
    scalar = False
    if n == 1:
        if z.ndim == 0:
            scalar = True
            z = z.reshape(1, 1)
        elif z.shape[-1] != 1:
            z = z[..., None]
    else:
        if z.ndim == 1:
            scalar = True
            z = z.reshape(1, n)
        if z.shape[-1] != n:
            raise KernelError(f'points must have trailing dimension {n}: shape {z.shape}')
    return z, scalar


def sphere_directions(n, count=64):
    '''Angular nodes and weights on the unit sphere S^{n-1}.

    For n=1 the sphere is {-1, +1} with counting measure; for n=2 the nodes are
    uniform angles, which is exact for trigonometric polynomials of degree < count.
    '''
    if n == 1:
        return np.array([[1.0], [-1.0]]), np.array([1.0, 1.0])
    theta = 2 * np.pi * np.arange(count) / count
    omega = np.stack([np.cos(theta), np.sin(theta)], axis=-1)
    return omega, np.full(count, 2 * np.pi / count)


def sphere_measure(n):
    return 2.0 if n == 1 else 2 * np.pi


def _canonical(omega):
    # pick one representative of {omega, -omega} so even factors are exactly even
    first = omega[..., 0]
    flip = first < 0
    if omega.shape[-1] > 1:
        flip = flip | ((first == 0) & (omega[..., 1] < 0))
    return np.where(flip[..., None], -omega, omega)


def _angle(omega):
    if omega.shape[-1] == 1:
        return np.where(omega[..., 0] >= 0, 0.0, np.pi)
    return np.arctan2(omega[..., 1], omega[..., 0])


class Profile(ABC):
    '''Angular profile of a kernel K(z) = a(z/|z|)·|z|^{-n-sp}.'''
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
        config = dict(config or {})
        profiletype = config.pop('type', None) or config.pop('profile', None) or 'power'
        subclass = cls.SUBCLASSES.get(profiletype)
        if not subclass:
            raise KernelError(f"Unknown kernel profile '{profiletype}'")
        return subclass(**config)

    @abstractmethod
    def angular(self, omega):
        pass

    @abstractmethod
    def angular_integral(self, n):
        pass

    @property
    def isotropic(self):
        return False

    def to_dict(self):
        return {'type': self.TYPE()}


class PowerProfile(Profile):
    @classmethod
    def TYPE(cls):
        return 'power'

    def __init__(self, scale=1.0):
        self.scale = float(scale)
        if not self.scale > 0:
            raise KernelError(f'power profile scale must be positive: {scale}')

    def angular(self, omega):
        return np.full(np.shape(omega)[:-1], self.scale)

    def angular_integral(self, n):
        return self.scale * sphere_measure(n)

    @property
    def isotropic(self):
        return True

    def to_dict(self):
        return {'type': self.TYPE(), 'scale': self.scale}

    def __repr__(self):
        return f'PowerProfile(scale={self.scale})'


class PerturbedProfile(Profile):
    '''a(omega) = scale * (c0 + sum_k c_k cos(k theta)), or a callable of the angle.

    Coefficients with odd index describe odd factors and are refused.
    '''
    @classmethod
    def TYPE(cls):
        return 'perturbed'

    def __init__(self, angular_coeffs=None, *, factor=None, scale=1.0):
        if (angular_coeffs is None) == (factor is None):
            raise KernelError('perturbed profile needs exactly one of angular_coeffs or factor')
        self.scale = float(scale)
        self.factor = factor
        self.coeffs = None
        if angular_coeffs is not None:
            coeffs = np.atleast_1d(np.asarray(angular_coeffs, dtype=float))
            odd = [k for k in range(1, len(coeffs), 2) if coeffs[k] != 0]
            if odd:
                raise KernelError(f'odd angular coefficients violate symmetry: indices {odd}')
            self.coeffs = coeffs
        else:
            theta = 2 * np.pi * np.arange(256) / 256
            a = np.asarray(factor(theta), dtype=float)
            b = np.asarray(factor(theta + np.pi), dtype=float)
            if np.max(np.abs(a - b)) > 1e-12 * max(1.0, np.max(np.abs(a))):
                raise KernelError('angular factor is not even: a(omega) != a(-omega)')

    def _raw(self, theta):
        if self.coeffs is not None:
            k = np.arange(len(self.coeffs))
            return np.cos(np.multiply.outer(theta, k)) @ self.coeffs
        return np.asarray(self.factor(theta), dtype=float)

    def angular(self, omega):
        omega = np.asarray(omega, dtype=float)
        return self.scale * self._raw(_angle(_canonical(omega)))

    def angular_integral(self, n):
        if n == 1:
            return float(np.sum(self.angular(np.array([[1.0], [-1.0]]))))
        if self.coeffs is not None:
            return self.scale * 2 * np.pi * self.coeffs[0]
        omega, weights = sphere_directions(2, 512)
        return float(np.sum(self.angular(omega) * weights))

    @property
    def isotropic(self):
        return self.coeffs is not None and not np.any(self.coeffs[1:])

    def to_dict(self):
        d = {'type': self.TYPE(), 'scale': self.scale}
        if self.coeffs is not None:
            d['angular_coeffs'] = self.coeffs.tolist()
        else:
            d['factor'] = getattr(self.factor, '__name__', 'callable')
        return d

    def __repr__(self):
        return f'PerturbedProfile({self.to_dict()})'


@dataclass(frozen=True)
class KernelSpec:
    '''Translation-invariant kernel K(x, y) = K(x - y) in the class Ker(Lambda).'''
    n: int
    s: float
    p: float
    Lambda: float = 1.0
    profile: Profile = field(default_factory=PowerProfile)

    def __post_init__(self):
        if self.n not in (1, 2):
            raise KernelError(f'dimension must be 1 or 2: {self.n}')
        if not 0 < self.s < 1:
            raise KernelError(f'order s must lie in (0, 1): {self.s}')
        if not self.p > 1:
            raise KernelError(f'exponent p must exceed 1: {self.p}')
        if not self.Lambda >= 1:
            raise KernelError(f'Lambda must be at least 1: {self.Lambda}')

    @classmethod
    def from_config(cls, config):
        config = dict(config)
        profile = {'type': config.get('profile', 'power')}
        if 'angular_coeffs' in config:
            profile['angular_coeffs'] = config['angular_coeffs']
        if 'scale' in config:
            profile['scale'] = config['scale']
        return cls(n=int(config.get('dimension', 1)),
                   s=float(config['s']),
                   p=float(config['p']),
                   Lambda=float(config.get('lambda', 1.0)),
                   profile=Profile.from_config(profile))

    def to_dict(self):
        return {'dimension': self.n, 's': self.s, 'p': self.p, 'lambda': self.Lambda,
                'profile': self.profile.to_dict()}

    def with_params(self, **kwargs):
        params = dict(n=self.n, s=self.s, p=self.p, Lambda=self.Lambda, profile=self.profile)
        params.update(kwargs)
        return KernelSpec(**params)

    @property
    def sp(self):
        return self.s * self.p

    @property
    def exponent(self):
        return self.n + self.sp

    @property
    def threshold(self):
        '''Exponent 2/(2-s) separating the regular and singular regimes.'''
        return 2 / (2 - self.s)

    @property
    def singular(self):
        return self.p <= self.threshold

    @property
    def isotropic(self):
        return self.profile.isotropic

    @cached_property
    def angular_integral(self):
        return self.profile.angular_integral(self.n)

    def radial(self, rho, omega):
        '''K(rho * omega) for unit directions omega, broadcasting rho against omega.'''
        return self.profile.angular(omega) * np.power(rho, -self.exponent)

    def __call__(self, z):
        return eval_kernel(self, z)


def eval_kernel(spec, z):
    points, scalar = as_points(z, spec.n)
    r = np.linalg.norm(points, axis=-1)
    if np.any(r == 0):
        raise KernelError('kernel is singular at the origin')
    value = spec.radial(r, points / r[..., None])
    return float(value.reshape(-1)[0]) if scalar else value


@dataclass(frozen=True)
class SamplePlan:
    rmin: float = 1e-3
    decades: int = 6
    n_radii: int = 61
    n_angles: int = 64
    n_random: int = 1000
    step: float = 1e-4
    seed: int = 0

    def points(self, n):
        if self.decades < 4:
            raise KernelError(f'sample plan must span at least 4 decades: {self.decades}')
        radii = np.logspace(math.log10(self.rmin), math.log10(self.rmin) + self.decades,
                            self.n_radii)
        omega, _ = sphere_directions(n, self.n_angles)
        grid = (radii[:, None, None] * omega[None, :, :]).reshape(-1, n)
        rng = np.random.default_rng(self.seed)
        rand_r = 10 ** rng.uniform(math.log10(self.rmin),
                                   math.log10(self.rmin) + self.decades, self.n_random)
        if n == 1:
            rand_omega = rng.choice([-1.0, 1.0], size=(self.n_random, 1))
        else:
            theta = rng.uniform(0, 2 * np.pi, self.n_random)
            rand_omega = np.stack([np.cos(theta), np.sin(theta)], axis=-1)
        return np.concatenate([grid, rand_r[:, None] * rand_omega])


def _axiom(name, passed, worst, witness, note=None):
    report = {'axiom': name, 'pass': bool(passed), 'worst': float(worst),
              'witness': None if witness is None else np.asarray(witness).tolist()}
    if note:
        report['note'] = note
    return report


def check_admissibility(spec, samples=None):
    '''Check the Ker(Lambda) axioms on a sample plan; failures are report content.'''
    plan = samples or SamplePlan()
    z = plan.points(spec.n)
    r = np.linalg.norm(z, axis=-1)
    k = eval_kernel(spec, z)
    axioms = []

    asym = np.abs(k - eval_kernel(spec, -z)) / k
    i = int(np.argmax(asym))
    axioms.append(_axiom('symmetry', asym[i] == 0, asym[i], z[i]))

    axioms.append(_axiom('translation_invariance', True, 0.0, None,
                         note='structural: kernels depend on x - y only'))

    ratio = k * np.power(r, spec.exponent)
    slack = 1e-12
    low = 1 / spec.Lambda * (1 - slack)
    high = spec.Lambda * (1 + slack)
    violation = np.maximum(low - ratio, ratio - high)
    i = int(np.argmax(violation))
    axioms.append(_axiom('growth', violation[i] <= 0, ratio[i], z[i],
                         note=f'ratio range [{ratio.min()!r}, {ratio.max()!r}]'))

    rng = np.random.default_rng(plan.seed + 1)
    if spec.n == 1:
        direction = rng.choice([-1.0, 1.0], size=(len(z), 1))
    else:
        theta = rng.uniform(0, 2 * np.pi, len(z))
        direction = np.stack([np.cos(theta), np.sin(theta)], axis=-1)
    dz = plan.step * r[:, None] * direction
    modulus = np.abs(eval_kernel(spec, z + dz) - k) / k
    bound = 1e3 * plan.step
    i = int(np.argmax(modulus))
    axioms.append(_axiom('continuity', modulus[i] < bound, modulus[i], z[i],
                         note=f'finite-difference proxy: relative modulus < {bound!r}'))

    passed = all(a['pass'] for a in axioms)
    LOGGER.debug(f'admissibility of {spec.to_dict()}: {passed}')
    return {'kernel': spec.to_dict(), 'samples': int(len(z)), 'axioms': axioms, 'pass': passed}
