
import logging

import numpy as np

from scipy.stats import linregress

from ..kernels import as_points
from ..space.analytic import AnalyticFunction
from .engine import pv_evaluate


LOGGER = logging.getLogger(__name__)

THETAS = (1e-1, 1e-2, 1e-3, 1e-4)


def _values(u, points, spec, tol):
    return np.array([pv_evaluate(u, y, spec, tol=tol, certify=False).value for y in points])


def continuity_check(u, x0, radius, spec, levels=8, thetas=THETAS, tol=1e-10):
    '''Observed modulus of continuity of L u at x0 and the bump-perturbation gaps.

    The perturbation is u + theta*eta with eta the C^2 bump of height 1 on
    B_{radius/2}(x0); gaps are sup |L u - L(u + theta*eta)| over samples of B_radius(x0).
    '''
    point, _ = as_points(x0, spec.n)
    point = point.reshape(spec.n)
    direction = np.eye(spec.n)[0]
    points = [point + radius * 2.0 ** -k * direction for k in range(1, levels + 1)]
    base = pv_evaluate(u, point, spec, tol=tol, certify=False).value
    values = _values(u, points, spec, tol)
    modulus = np.abs(values - base)

    samples = [point] + [point + radius * t * direction for t in (-0.75, -0.25, 0.25, 0.75)]
    reference = _values(u, samples, spec, tol)
    eta = AnalyticFunction.bump(point, radius / 2)
    gaps = []
    for theta in thetas:
        if theta == 0:
            gaps.append(0.0)
            continue
        perturbed = u + eta * theta
        gaps.append(float(np.max(np.abs(_values(perturbed, samples, spec, tol) - reference))))
    gaps = np.array(gaps)
    keep = (np.asarray(thetas) > 0) & (gaps > 0)
    slope = float('nan')
    if np.sum(keep) >= 2:
        slope = float(linregress(np.log(np.asarray(thetas)[keep]), np.log(gaps[keep])).slope)
    LOGGER.debug(f'continuity check at {point.tolist()}: modulus {modulus.max()}, '
                 f'gap slope {slope}')
    return {'points': [p.tolist() for p in points], 'values': values.tolist(),
            'value_at_x0': float(base), 'modulus': modulus.tolist(),
            'theta': [float(t) for t in thetas], 'gaps': gaps.tolist(), 'gap_slope': slope}
