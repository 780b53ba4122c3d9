
import logging
import math

import numpy as np

from ..pv.bounds import c2beta_norm
from ..pv.bounds import hessian_sup
from ..space.analytic import AnalyticFunction
from ..space.domain import DomainSpec
from ..space.grid import GridFunction


LOGGER = logging.getLogger(__name__)

# touching from below (supersolution) or from above (subsolution)
SUPER = 'super'
SUB = 'sub'
SIDES = (SUPER, SUB)

REGIME_C2 = 'c2'
REGIME_C2BETA = 'c2beta'

DEFAULT_TOUCH_RADIUS = 0.25
GRID_TOUCH_STEPS = 2
GRADIENT_FLOOR = 1e-10
QUADRATIC_MULTIPLIERS = (1.0, 10.0, 100.0)
# flat cones expose an exterior mass that steep ones hide in the near zone
CONE_MULTIPLIERS = (1e-4, 1e-3, 1e-2) + QUADRATIC_MULTIPLIERS
CONE_EXPONENTS = (2.0, 3.0)


class ViscosityError(Exception):
    pass


class InadmissibleTestFunctionError(ViscosityError):
    pass


class TouchingError(ViscosityError):
    '''The test function does not touch u from below; witness is the worst point.'''
    def __init__(self, message, witness=None, excess=None):
        super().__init__(message)
        self.witness = witness
        self.excess = excess


def default_radius(u):
    if isinstance(u, GridFunction):
        return GRID_TOUCH_STEPS * u.h
    return DEFAULT_TOUCH_RADIUS


class TestFunction(object):
    '''An admissible test function at x0 on the ball B_radius(x0).

    The regime is 'c2' when the kernel is regular (p > 2/(2-s)) or the gradient
    at x0 is nonzero; otherwise it is 'c2beta', which needs beta > sp/(p-1), an
    isolated critical point at x0 and a finite C^2_beta norm on the ball.
    '''
    __test__ = False

    def __init__(self, base, x0, radius, spec, beta=None):
        if base.n != spec.n:
            raise InadmissibleTestFunctionError(f'{base!r} has dimension {base.n}, '
                                                f'kernel has {spec.n}')
        x0 = np.ravel(np.asarray(x0, dtype=float))
        if x0.size != spec.n:
            raise InadmissibleTestFunctionError(f'touch point {x0.tolist()} is not a point of '
                                                f'R^{spec.n}')
        self.base = base
        self.x0 = x0
        self.radius = float(radius)
        self.spec = spec
        self.beta = None if beta is None else float(beta)
        self.norm = None
        if not self.radius > 0:
            raise InadmissibleTestFunctionError(f'touch radius must be positive: {radius}')
        self.value_at_x0 = float(base.value(self.x0))
        self.gradient_at_x0 = np.atleast_1d(base.gradient(self.x0)).reshape(spec.n)
        self.regime = self._regime()
        self._validate()

    def __repr__(self):
        beta = '' if self.beta is None else f', beta={self.beta}'
        return (f'TestFunction({self.base.name}, x0={self.x0.tolist()}, r={self.radius}, '
                f'{self.regime}{beta})')

    @property
    def n(self):
        return self.spec.n

    @property
    def gradient_vanishes(self):
        G = np.linalg.norm(self.gradient_at_x0)
        return G <= GRADIENT_FLOOR * (1 + abs(self.value_at_x0))

    def _regime(self):
        if not self.spec.singular or not self.gradient_vanishes:
            return REGIME_C2
        return REGIME_C2BETA

    def _validate(self):
        if self.regime == REGIME_C2:
            if not np.isfinite(hessian_sup(self.base, self.x0, self.radius)):
                raise InadmissibleTestFunctionError(f'{self.base!r} is not C^2 on '
                                                    f'B_{self.radius}({self.x0.tolist()})')
            return
        bound = self.spec.sp / (self.spec.p - 1)
        if self.beta is None:
            raise InadmissibleTestFunctionError(f'{self.base!r}: the singular regime at '
                                                f'{self.x0.tolist()} needs an exponent beta')
        if not self.beta > bound:
            raise InadmissibleTestFunctionError(f'beta {self.beta} must exceed sp/(p-1) = '
                                                f'{bound}')
        if not self.base.is_isolated_critical(self.x0):
            raise InadmissibleTestFunctionError(f'{self.x0.tolist()} is not an isolated '
                                                f'critical point of {self.base!r}')
        self.norm = c2beta_norm(self.base, DomainSpec.ball(self.x0, self.radius), self.beta)
        if not np.isfinite(self.norm):
            raise InadmissibleTestFunctionError(f'{self.base!r} has no finite C^2_{self.beta} '
                                                f'norm on B_{self.radius}({self.x0.tolist()})')

    def value(self, x):
        return self.base.value(x)

    __call__ = value

    def _rebuild(self, base):
        return TestFunction(base, self.x0, self.radius, self.spec, self.beta)

    def shifted(self, c):
        return self._rebuild(self.base.shifted(c))

    def scaled(self, factor):
        return self._rebuild(self.base * factor)

    def negated(self):
        return self._rebuild(-self.base)

    def describe(self):
        return {'test': self.base.name, 'x0': self.x0.tolist(), 'radius': self.radius,
                'regime': self.regime, 'beta': self.beta, 'c2beta_norm': self.norm}


def quadratic(x0, u0, gradient, M):
    '''u0 + gradient.(x - x0) - M |x - x0|^2.'''
    n = len(np.atleast_1d(x0))
    phi = AnalyticFunction.quadratic(x0, gradient, -2 * M * np.eye(n), c=u0)
    phi.name = f'quadratic(M={M:g})'
    return phi


def cone(x0, u0, beta, M):
    '''u0 - M |x - x0|^beta.'''
    phi = AnalyticFunction.power_of_norm(beta, x0, scale=-M, c=u0)
    phi.name = f'cone(beta={beta:g}, M={M:g})'
    return phi


def cone_exponents(spec):
    '''Cone exponents strictly above sp/(p-1).'''
    bound = spec.sp / (spec.p - 1)
    exponents = (math.ceil(bound) + 0.1,) + CONE_EXPONENTS
    return tuple(sorted(set(b for b in exponents if b > bound)))


def local_data(u, x0):
    '''(u(x0), estimated gradient, estimated Hessian) at x0.'''
    if isinstance(u, GridFunction):
        index = u.node_index(x0)
        gradient, hessian = u.local_jet(index, exclude_center=True)
        return float(u.flat[index]), gradient, hessian
    point = np.atleast_1d(np.asarray(x0, dtype=float))
    return (float(u.value(point)), np.atleast_1d(u.gradient(point)).reshape(u.n),
            np.asarray(u.hessian(point)).reshape(u.n, u.n))


def test_family(u, x0, spec, radius=None, cones=True, quadratics=True):
    '''Downward quadratics and cones through (x0, u(x0)); inadmissible members skipped.

    Returns (admissible test functions, list of skip reasons).
    '''
    radius = default_radius(u) if radius is None else radius
    u0, gradient, hessian = local_data(u, x0)
    scale = max(float(np.linalg.norm(hessian, ord=2)), 1.0)
    if not np.isfinite(scale):
        scale = 1.0
    candidates = []
    if quadratics:
        candidates += [(quadratic(x0, u0, gradient, m * scale), None)
                       for m in QUADRATIC_MULTIPLIERS]
    if cones and spec.singular:
        candidates += [(cone(x0, u0, beta, m * scale), beta)
                       for beta in cone_exponents(spec) for m in CONE_MULTIPLIERS]
    family = []
    skipped = []
    for phi, beta in candidates:
        try:
            family.append(TestFunction(phi, x0, radius, spec, beta))
        except InadmissibleTestFunctionError as e:
            LOGGER.debug(f'skipping {phi.name} at {np.ravel(x0).tolist()}: {e}')
            skipped.append(str(e))
    return family, skipped
