
import logging

import numpy as np

from dataclasses import asdict
from dataclasses import dataclass
from dataclasses import field

from .algebra import PowerIntegralConstants
from .algebra import g
from .algebra import weighted_power_integral
from .space.domain import DomainSpec
from .space.farfield import mapped_nodes
from .weak.solver import DirichletProblem
from .weak.solver import DirichletSolver


LOGGER = logging.getLogger(__name__)

COMPARE_TOL = 1e-8
EPS_SEQUENCE = tuple(2.0 ** -k for k in range(13))
MAX_BRUTE_PAIRS = 10 ** 6
ROW_CHUNK = 512
SUP_SLACK = 1e-12


class ComparisonError(Exception):
    '''Exterior ordering violated; witness is the worst point.'''
    def __init__(self, message, witness=None, gap=None):
        super().__init__(message)
        self.witness = witness
        self.gap = gap


def _check_lattices(u, v):
    if not u.compatible(v) or u.domain != v.domain:
        raise ComparisonError(f'{u!r} and {v!r} do not share a lattice')


def exterior_gap(u, v, spec):
    '''Smallest u - v over collar nodes and far-field samples, with its location.'''
    outside = np.flatnonzero(u.exterior)
    gaps = u.flat[outside] - v.flat[outside]
    points = u.points[outside]
    gp = max(u.far_field.growth, v.far_field.growth) * (spec.p - 1)
    kappa = 1 / (spec.sp - gp) if spec.sp > gp else 1.0
    y, _ = mapped_nodes(u.center, u.radius, u.n, kappa)
    gaps = np.concatenate([gaps, u.far_field.evaluate(y, u.center)
                           - v.far_field.evaluate(y, v.center)])
    points = np.concatenate([points, y])
    worst = int(np.argmin(gaps))
    return float(gaps[worst]), points[worst].tolist()


def compare(u, v, spec, tol=COMPARE_TOL):
    '''min over interior nodes of u - v, for a supersolution u above a subsolution v
    outside the domain.'''
    _check_lattices(u, v)
    gap, witness = exterior_gap(u, v, spec)
    if gap < -tol:
        raise ComparisonError(f'exterior data not ordered: u - v = {gap!r} at {witness}',
                              witness=witness, gap=gap)
    inner = u.interior_values - v.interior_values
    worst = int(np.argmin(inner))
    report = {'min_gap': float(inner[worst]), 'argmin': u.interior_points[worst].tolist(),
              'exterior_min_gap': gap, 'tol': float(tol),
              'pass': bool(inner[worst] >= -tol)}
    LOGGER.debug(f"comparison: min(u - v) = {report['min_gap']!r} at {report['argmin']}")
    return report


def doubling_exponent(spec):
    '''2 in the regular regime, otherwise an exponent above sp/(p-1).'''
    if not spec.singular:
        return 2.0
    return spec.sp / (spec.p - 1) + 0.5


@dataclass
class DoublingDiagnostic:
    q: float
    eps_sequence: list
    M_eps: list
    maximizers: list
    pair_gap: list
    sigma: float
    H: float
    pairs: list
    W_eps: list = field(default_factory=list)
    Theta_eps: list = field(default_factory=list)
    checks: dict = field(default_factory=dict)
    no_contradiction_sought: bool = False

    @property
    def ok(self):
        return all(self.checks.values())

    def rows(self):
        return [{'eps': e, 'M_eps': m, 'pair_gap': gap}
                for e, m, gap in zip(self.eps_sequence, self.M_eps, self.pair_gap)]

    def to_dict(self):
        d = asdict(self)
        d['ok'] = self.ok
        return d


def pair_sup(vx, uy, points, q, eps, window=None):
    '''Max of v(x) - u(y) - |x - y|^q / eps over node pairs (x, y).

    Ties go to the smallest |x - y|, then to the first pair in lattice order.
    Pairs farther apart than window cannot attain the max and are skipped.
    Returns (M, i, j, pairs evaluated).
    '''
    best = -np.inf
    candidates = []
    count = 0
    for start in range(0, len(points), ROW_CHUNK):
        rows = slice(start, min(start + ROW_CHUNK, len(points)))
        d = np.linalg.norm(points[rows, None, :] - points[None, :, :], axis=-1)
        psi = vx[rows, None] - uy[None, :] - d ** q / eps
        if window is not None:
            keep = d <= window
            psi = np.where(keep, psi, -np.inf)
            count += int(np.sum(keep))
        else:
            count += psi.size
        top = float(np.max(psi))
        if top < best:
            continue
        if top > best:
            best, candidates = top, []
        i, j = np.nonzero(psi == top)
        candidates.extend(zip(d[i, j], i + start, j))
    _, i, j = min(candidates)
    return best, int(i), int(j), count


def shift_samples(u, v, i, j, p):
    '''W and Theta at every lattice shift z keeping x_i + z and y_j + z in the domain.'''
    interior = np.flatnonzero(u.interior)
    k = np.array(np.unravel_index(interior, u.shape)).T
    lookup = np.full(u.shape_size, -1)
    lookup[interior] = np.arange(len(interior))
    shifted = k - k[i] + k[j]
    inside = np.all((shifted >= 0) & (shifted < 2 * u.N + 1), axis=-1)
    target = np.full(len(k), -1)
    target[inside] = lookup[np.ravel_multi_index(tuple(shifted[inside].T), u.shape)]
    keep = target >= 0
    vx, uy = v.interior_values, u.interior_values
    b = vx[i] - vx[keep]
    a = uy[j] - uy[target[keep]]
    W = b - a
    theta = g(b, p) - g(a, p)
    nonzero = (a != 0) | (W != 0)
    a, W, theta = a[nonzero], W[nonzero], theta[nonzero]
    exact = (p - 1) * np.asarray(weighted_power_integral(a, W, p)) * W
    lower = (p - 1) * PowerIntegralConstants(p).c_lower * (np.abs(a) + np.abs(W)) ** (p - 2) * W
    return W, theta, exact, lower


def doubling_diagnostic(u, v, spec, q=None, eps_sequence=None):
    '''The doubling-of-variables quantities on lattice pairs of the domain.'''
    _check_lattices(u, v)
    q = doubling_exponent(spec) if q is None else float(q)
    eps_sequence = sorted(EPS_SEQUENCE if eps_sequence is None else eps_sequence,
                          reverse=True)
    points = u.interior_points
    vx, uy = v.interior_values, u.interior_values
    sigma = float(np.max(vx - uy))
    H = float(np.max(vx) - np.min(uy))
    slack = SUP_SLACK * (1 + abs(H))
    prune = len(points) ** 2 > MAX_BRUTE_PAIRS
    diag = DoublingDiagnostic(q=q, eps_sequence=[float(e) for e in eps_sequence], M_eps=[],
                              maximizers=[], pair_gap=[], sigma=sigma, H=H, pairs=[],
                              no_contradiction_sought=sigma <= 0)
    theta_ok = True
    w_ok = True
    for eps in eps_sequence:
        window = (eps * (H - sigma + slack)) ** (1 / q) if prune else None
        M, i, j, count = pair_sup(vx, uy, points, q, eps, window)
        d = float(np.linalg.norm(points[i] - points[j]))
        diag.M_eps.append(M)
        diag.maximizers.append([points[i].tolist(), points[j].tolist()])
        diag.pair_gap.append(d ** q / eps)
        diag.pairs.append(count)
        W, theta, exact, lower = shift_samples(u, v, i, j, spec.p)
        scale = 1e-9 * (np.abs(theta) + np.abs(exact) + np.abs(lower)) + 1e-15
        w_ok &= bool(np.all(W >= -slack))
        theta_ok &= bool(np.all(np.abs(theta - exact) <= scale)
                         and np.all(theta[W >= 0] >= lower[W >= 0] - scale[W >= 0]))
        diag.W_eps.append(float(np.min(W)) if len(W) else None)
        diag.Theta_eps.append(float(np.min(theta)) if len(theta) else None)
        LOGGER.debug(f'eps={eps!r}: M={M!r} at {diag.maximizers[-1]} ({count} pairs)')

    M = diag.M_eps
    gaps = diag.pair_gap
    index = {e: k for k, e in enumerate(diag.eps_sequence)}
    telescoping = [gaps[k] <= 2 * (M[index[2 * e]] - M[k]) + slack
                   for k, e in enumerate(diag.eps_sequence) if 2 * e in index]
    diag.checks = {
        'monotone': all(b <= a + slack for a, b in zip(M, M[1:])),
        'bounds': all(sigma - slack <= m <= H + slack for m in M),
        'telescoping': all(telescoping),
        'W_nonnegative': w_ok,
        'Theta_lower_bound': theta_ok,
    }
    if diag.no_contradiction_sought:
        LOGGER.info(f'sup(v - u) = {sigma!r} <= 0 on the domain: no contradiction sought')
    return diag


def check_superharmonic(u, spec, subdomains, tol=None, method='newton'):
    '''For each lattice-aligned sub-box D, u >= the solution with exterior data u on D.'''
    tol = COMPARE_TOL * (1 + float(np.max(np.abs(u.flat[u.active])))) if tol is None else tol
    rows = []
    for sub in subdomains:
        if not isinstance(sub, DomainSpec):
            sub = u.domain.subbox(*sub)
        solver = DirichletSolver(DirichletProblem(spec, u.restricted_to(sub)), method)
        w = solver.solve()
        inside = w.interior
        gap = u.flat[inside] - w.flat[inside]
        worst = int(np.argmin(gap))
        rows.append({'subdomain': sub.to_dict(), 'min_gap': float(gap[worst]),
                     'argmin': u.points[inside][worst].tolist(),
                     'pass': bool(gap[worst] >= -tol)})
    return {'rows': rows, 'tol': float(tol), 'pass': all(r['pass'] for r in rows)}
