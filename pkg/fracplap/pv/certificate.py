
import logging

import numpy as np

from scipy.stats import linregress

from .bounds import near_zone_bound
from .engine import pv_evaluate


LOGGER = logging.getLogger(__name__)

CERTIFICATE_SLACK = 1e-9


def measured_near_zone(u, x, eps, spec, tol=1e-12):
    '''The compensated integral over B_eps(x); u need not lie in the tail space.'''
    result = pv_evaluate(u, x, spec, tol=tol, radius=eps, certify=False, outer=False)
    if not result.converged:
        return np.inf, result
    return result.value, result


def near_zone_certificate(u, x, eps, spec, beta=None, norm=None):
    '''Certificate c_eps for the near zone together with the measured integral.'''
    report = near_zone_bound(u, x, eps, spec, beta=beta, norm=norm)
    measured, result = measured_near_zone(u, x, eps, spec)
    report.update({'eps': float(eps), 'measured': float(measured),
                   'verdict': result.verdict,
                   'ok': bool(abs(measured) <= report['bound'] * (1 + CERTIFICATE_SLACK))})
    LOGGER.debug(f'near-zone certificate eps={eps}: |{measured}| <= {report["bound"]}')
    return report


def near_zone_rate(u, x, spec, eps_values=None, beta=None):
    '''Log-log slope of |measured near-zone integral| and of the certificate against eps.'''
    eps_values = 2.0 ** -np.arange(4, 13) if eps_values is None else np.asarray(eps_values)
    rows = [near_zone_certificate(u, x, eps, spec, beta=beta) for eps in eps_values]
    measured = np.array([abs(r['measured']) for r in rows])
    bounds = np.array([r['bound'] for r in rows])
    slopes = {}
    for name, values in (('measured_rate', measured), ('bound_rate', bounds)):
        keep = (values > 0) & np.isfinite(values)
        if np.sum(keep) >= 2:
            slopes[name] = float(linregress(np.log(eps_values[keep]),
                                            np.log(values[keep])).slope)
        else:
            slopes[name] = float('nan')
    expected = None
    if beta is not None:
        expected = beta * (spec.p - 1) - spec.sp
    return dict(slopes, expected_rate=expected, eps=eps_values.tolist(), rows=rows)
