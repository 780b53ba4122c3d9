
import logging

import numpy as np

from ..kernels import KernelSpec
from ..space.analytic import AnalyticFunction
from .engine import CONVERGED
from .engine import DIVERGED
from .engine import pv_evaluate


LOGGER = logging.getLogger(__name__)

S_GRID = (0.3, 0.5, 0.7)
P_GRID = tuple(np.round(np.arange(1.05, 2.0001, 0.05), 2))
NEAR_CRITICAL_BAND = 0.02


def scan_cell(s, p, n=1, tol=1e-8):
    '''Principal value of min(|x|^2, 1) at the origin for one (s, p).'''
    spec = KernelSpec(n=n, s=s, p=p)
    result = pv_evaluate(AnalyticFunction.singular_example(n), np.zeros(n), spec, tol=tol)
    threshold = spec.threshold
    near = abs(p - threshold) < NEAR_CRITICAL_BAND
    expected = CONVERGED if p > threshold else DIVERGED
    return {'s': float(s), 'p': float(p), 'threshold': float(threshold),
            'side': 'regular' if p > threshold else 'singular',
            'verdict': result.verdict, 'fitted_rate': result.fitted_rate,
            'expected_rate': float(2 * (p - 1) - s * p), 'value': result.value,
            'near_critical': bool(near), 'agrees': bool(near or result.verdict == expected)}


def threshold_scan(s_grid=S_GRID, p_grid=P_GRID, n=1, tol=1e-8, mapper=None):
    '''Verdict table over (s, p); mapper(cells, action) may run cells concurrently.'''
    cells = [(float(s), float(p)) for s in s_grid for p in p_grid]

    def action(cell):
        return scan_cell(cell[0], cell[1], n=n, tol=tol)

    if mapper is None:
        rows = [action(cell) for cell in cells]
    else:
        rows = mapper(cells, action)
    disagreements = [r for r in rows if r is not None and not r['agrees']]
    for row in disagreements:
        LOGGER.info(f"s={row['s']} p={row['p']}: {row['verdict']} on the {row['side']} side")
    return rows
