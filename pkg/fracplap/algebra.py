
import logging
import warnings

import numpy as np

from dataclasses import dataclass
from functools import lru_cache
from scipy.integrate import IntegrationWarning
from scipy.integrate import quad


LOGGER = logging.getLogger(__name__)

P_VALUES = (1.2, 1.5, 2.0, 3.0, 4.5)

# relative slack absorbing rounding in the equality cases of the bounds
BOUND_SLACK = 1e-12


class AlgebraError(ValueError):
    pass


def g(t, p):
    '''The monotone power |t|^{p-2} t.'''
    t = np.asarray(t, dtype=float)
    return np.sign(t) * np.power(np.abs(t), p - 1)


@dataclass(frozen=True)
class PowerIntegralConstants:
    p: float

    def __post_init__(self):
        if not self.p > 1:
            raise AlgebraError(f'exponent p must exceed 1: {self.p}')

    @property
    def c_upper(self):
        return 1.0 if self.p >= 2 else 4 ** (2 - self.p) / (self.p - 1)

    @property
    def c_lower(self):
        return 1.0 if self.p < 2 else 4 ** (2 - self.p) / (self.p - 1)


def _scalar(value, *args):
    if all(np.ndim(a) == 0 for a in args):
        return float(value)
    return value


def weighted_power_integral(a, b, p):
    '''Exact value of the integral over [0, 1] of |a + b t|^{p-2} dt.

    a = b = 0 gives inf for p < 2, 1 for p = 2 and 0 for p > 2.
    '''
    if not p > 1:
        raise AlgebraError(f'exponent p must exceed 1: {p}')
    a0, b0 = a, b
    a, b = np.broadcast_arrays(np.asarray(a, dtype=float), np.asarray(b, dtype=float))
    if p == 2:
        return _scalar(np.ones(a.shape), a0, b0)

    absa = np.abs(a)
    absb = np.abs(b)
    out = np.empty(a.shape)
    with np.errstate(all='ignore'):
        zero_b = absb == 0
        both = zero_b & (absa == 0)
        far = ~zero_b & (absa >= 2 * absb)
        near = ~zero_b & ~far

        # |a| >= 2|b|: the integrand never vanishes; expm1/log1p avoid cancellation
        c = np.where(far, b / np.where(far, a, 1.0), 0.5)
        far_val = (np.power(absa, p - 2) * np.expm1((p - 1) * np.log1p(c))
                   / ((p - 1) * c))

        t = np.where(near, a / np.where(near, b, 1.0), 0.0)
        case = np.where(t >= 0,
                        np.power(t + 1, p - 1) - np.power(np.abs(t), p - 1),
                        np.where(t > -1,
                                 np.power(t + 1, p - 1) + np.power(-t, p - 1),
                                 np.power(-t, p - 1) - np.power(np.maximum(-t - 1, 0), p - 1)))
        near_val = np.power(absb, p - 2) / (p - 1) * case

        out = np.where(far, far_val, near_val)
        out = np.where(zero_b, np.power(absa, p - 2), out)
        out = np.where(both, np.inf if p < 2 else 0.0, out)
    return _scalar(out, a0, b0)


def quadrature_oracle(a, b, p):
    '''Adaptive quadrature of the weighted power integral, split at the zero of a + b t.'''
    def f(t):
        with np.errstate(divide='ignore'):
            return float(np.power(np.abs(np.float64(a + b * t)), p - 2))

    tstar = -a / b if b != 0 else None
    with warnings.catch_warnings():
        warnings.simplefilter('ignore', IntegrationWarning)
        if tstar is None or not 0 < tstar < 1:
            return quad(f, 0.0, 1.0, epsabs=0, epsrel=1e-13, limit=200)[0]

        # |a + b t| = |b| |t - t*|: the weight carries |t - t*|^{p-2}, the rest is constant
        def smooth(t):
            return abs(b) ** (p - 2)
        left = quad(smooth, 0.0, tstar, weight='alg', wvar=(0.0, p - 2),
                    epsabs=0, epsrel=1e-13, limit=200)[0]
        right = quad(smooth, tstar, 1.0, weight='alg', wvar=(p - 2, 0.0),
                     epsabs=0, epsrel=1e-13, limit=200)[0]
    return left + right


def two_sided_bounds(a, b, p):
    '''Arrays (value, lower, upper, ok) for the two-sided integral bounds.'''
    constants = PowerIntegralConstants(p)
    a, b = np.broadcast_arrays(np.asarray(a, dtype=float), np.asarray(b, dtype=float))
    if np.any((a == 0) & (b == 0)):
        raise AlgebraError('two-sided bounds need (a, b) != (0, 0)')
    value = np.asarray(weighted_power_integral(a, b, p), dtype=float)
    scale = np.power(np.abs(a) + np.abs(b), p - 2)
    lower = constants.c_lower * scale
    upper = constants.c_upper * scale
    ok = (lower <= value * (1 + BOUND_SLACK)) & (value <= upper * (1 + BOUND_SLACK))
    return value, lower, upper, ok


def check_two_sided_bounds(a, b, p):
    value, lower, upper, ok = two_sided_bounds(a, b, p)
    return {'a': float(a), 'b': float(b), 'p': float(p),
            'value': float(value), 'lower': float(lower), 'upper': float(upper),
            'ok': bool(ok)}


def power_difference(a, b, p):
    '''Arrays (lhs, rhs, ok) for ||a|^{p-2}a - |b|^{p-2}b| <= c (|b|+|a-b|)^{p-2}|a-b|.'''
    constants = PowerIntegralConstants(p)
    a, b = np.broadcast_arrays(np.asarray(a, dtype=float), np.asarray(b, dtype=float))
    lhs = np.abs(g(a, p) - g(b, p))
    diff = np.abs(a - b)
    with np.errstate(all='ignore'):
        rhs = constants.c_upper * (p - 1) * np.power(np.abs(b) + diff, p - 2) * diff
    rhs = np.where(diff == 0, 0.0, rhs)
    ok = lhs <= rhs * (1 + BOUND_SLACK)
    return lhs, rhs, ok


def power_difference_bound(a, b, p):
    lhs, rhs, ok = power_difference(a, b, p)
    return {'a': float(a), 'b': float(b), 'p': float(p),
            'c': PowerIntegralConstants(p).c_upper * (p - 1),
            'lhs': float(lhs), 'rhs': float(rhs), 'ok': bool(ok)}


def spherical_integral(a, p, n):
    '''Integral over S^{n-1} of (|e.omega| + a)^{p-2}, independent of the unit vector e.'''
    if a < 0:
        raise AlgebraError(f'spherical estimate needs a >= 0: {a}')
    if n == 1:
        return 2 * (1 + a) ** (p - 2)
    # theta -> t = |cos theta| over four quarter turns: weight (1-t)^{-1/2}, and t^{p-2} at a=0
    if a == 0:
        f, alpha = (lambda t: (1 + t) ** -0.5), p - 2
    else:
        f, alpha = (lambda t: (t + a) ** (p - 2) * (1 + t) ** -0.5), 0.0
    with warnings.catch_warnings():
        warnings.simplefilter('ignore', IntegrationWarning)
        value = quad(f, 0, 1, weight='alg', wvar=(alpha, -0.5), limit=200)[0]
    return 4 * value


@lru_cache
def spherical_constant(n, p):
    '''Calibrated constant for the spherical estimate, with a 2x safety margin.'''
    if n == 1:
        return 2.0
    grid = np.concatenate([[0.0], np.logspace(-6, 6, 121)])
    ratios = [spherical_integral(a, p, n) / (1 + a) ** (p - 2) for a in grid]
    constant = 2 * max(ratios)
    LOGGER.debug(f'spherical constant c({n}, {p}) = {constant}')
    return constant


def spherical_average_bound(e, a, p, n):
    e = np.atleast_1d(np.asarray(e, dtype=float))
    if e.shape != (n,) or abs(np.linalg.norm(e) - 1) > 1e-12:
        raise AlgebraError(f'e must be a unit vector in R^{n}: {e.tolist()}')
    if a < 0:
        raise AlgebraError(f'spherical estimate needs a >= 0: {a}')
    integral = spherical_integral(a, p, n)
    constant = spherical_constant(n, p)
    bound = constant * (1 + a) ** (p - 2)
    return {'e': e.tolist(), 'a': float(a), 'p': float(p), 'n': n,
            'integral': integral, 'constant': constant, 'bound': bound,
            'ok': bool(integral <= bound)}


def _entry(lemma, samples, violations, worst_ratio, **extra):
    entry = {'lemma': lemma, 'samples': int(samples), 'violations': int(violations),
             'worst_ratio': float(worst_ratio)}
    entry.update(extra)
    return entry


def suite_two_sided(rng, samples):
    p = rng.choice(P_VALUES, size=samples)
    a = rng.uniform(-10, 10, samples)
    b = rng.uniform(-10, 10, samples)
    violations = 0
    worst = 0.0
    for pv in P_VALUES:
        mask = p == pv
        if not np.any(mask):
            continue
        value, lower, upper, ok = two_sided_bounds(a[mask], b[mask], pv)
        violations += int(np.sum(~ok))
        worst = max(worst, float(np.max(value / upper)), float(np.max(lower / value)))
    return _entry('two_sided_bounds', samples, violations, worst)


def suite_power_difference(rng, samples):
    p = rng.choice(P_VALUES, size=samples)
    a = rng.uniform(-10, 10, samples)
    b = rng.uniform(-10, 10, samples)
    violations = 0
    worst = 0.0
    for pv in P_VALUES:
        mask = p == pv
        if not np.any(mask):
            continue
        lhs, rhs, ok = power_difference(a[mask], b[mask], pv)
        violations += int(np.sum(~ok))
        positive = rhs > 0
        if np.any(positive):
            worst = max(worst, float(np.max(lhs[positive] / rhs[positive])))
    return _entry('power_difference', samples, violations, worst)


def suite_spherical(rng, samples):
    p = rng.choice(P_VALUES, size=samples)
    n = rng.choice([1, 2], size=samples)
    a = np.where(rng.random(samples) < 0.1, 0.0, 10 ** rng.uniform(-4, 2, samples))
    theta = rng.uniform(0, 2 * np.pi, samples)
    sign = rng.choice([-1.0, 1.0], size=samples)
    violations = 0
    worst = 0.0
    for i in range(samples):
        e = [sign[i]] if n[i] == 1 else [np.cos(theta[i]), np.sin(theta[i])]
        report = spherical_average_bound(e, a[i], p[i], int(n[i]))
        violations += not report['ok']
        worst = max(worst, report['integral'] / report['bound'])
    return _entry('spherical_estimate', samples, violations, worst)


def suite_oracle(rng, samples, tol=1e-10):
    p = rng.choice(P_VALUES, size=samples)
    a = rng.uniform(-10, 10, samples)
    b = rng.uniform(-10, 10, samples)
    violations = 0
    worst = 0.0
    for i in range(samples):
        exact = weighted_power_integral(a[i], b[i], p[i])
        oracle = quadrature_oracle(a[i], b[i], p[i])
        error = abs(exact - oracle) / abs(oracle)
        violations += error > tol
        worst = max(worst, error)
    return _entry('quadrature_oracle', samples, violations, worst / tol,
                  max_relative_error=worst, tol=tol)


def lemma_suite(samples=100000, seed=42, oracle_samples=10000, extra_suites=()):
    '''Run the algebraic property suites on independent streams of one seed.

    extra_suites holds further (suite, count) pairs; stream k always feeds the
    k-th suite, so appending suites leaves earlier results unchanged.
    '''
    suites = [(suite_two_sided, samples),
              (suite_power_difference, samples),
              (suite_spherical, samples),
              (suite_oracle, oracle_samples)] + list(extra_suites)
    streams = [np.random.default_rng(s)
               for s in np.random.SeedSequence(seed).spawn(len(suites))]
    results = []
    for (suite, count), rng in zip(suites, streams):
        LOGGER.info(f'Running {suite.__name__} with {count} samples')
        results.append(suite(rng, count))
    return results
