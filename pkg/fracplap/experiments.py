#!/usr/bin/python3

import logging
import os

import numpy as np

from concurrent import futures
from functools import partial
from pathlib import Path

from .algebra import AlgebraError
from .algebra import lemma_suite
from .artifacts import SCHEMA_VERSION
from .artifacts import ArtifactDir
from .base import FracplapBase
from .checks import AbsLeCheck
from .checks import EqCheck
from .checks import GeCheck
from .checks import LeCheck
from .checks import checks_pass
from .comparison import ComparisonError
from .comparison import compare
from .comparison import doubling_diagnostic
from .config import InvalidConfigError
from .kernels import KernelError
from .kernels import SamplePlan
from .kernels import check_admissibility
from .pv import PVError
from .pv import continuity_check
from .pv import near_zone_rate
from .pv import pv_evaluate
from .pv import suite_affine_annulus
from .pv import threshold_scan
from .space import AnalyticFunction
from .space import FunctionSpaceError
from .space import write_grid
from .viscosity import TouchingError
from .viscosity import ViscosityError
from .viscosity import corrupt
from .viscosity import scan_equivalence
from .viscosity import test_family
from .viscosity import touching_principal_value
from .weak import DirichletSolver
from .weak import SolverError
from .weak import classify_weak
from .weak import linear_oracle
from .weak import refinement_study


LOGGER = logging.getLogger(__name__)

EXIT_PASS = 0
EXIT_VIOLATION = 1
EXIT_USAGE = 2

# raised by the library for a run that could not finish; the report records it
# ValueError covers scipy rejecting an argument
RUN_ERRORS = (AlgebraError, ComparisonError, FunctionSpaceError, KernelError, PVError,
              SolverError, ViscosityError, ValueError)


def spread(nodes, count):
    '''count nodes evenly spaced through nodes, in order.'''
    if count >= len(nodes):
        return nodes
    return nodes[np.unique(np.round(np.linspace(0, len(nodes) - 1, count)).astype(int))]


class Experiments(FracplapBase):
    '''Runs one subcommand of a RunConfig and writes its artifacts.'''
    DEFAULT_OUTDIR = 'fracplap-output'

    def __init__(self, **kwargs):
        super().__init__(**kwargs)
        self.errored = []
        self.report = None

    HANDLERS = {
        'check-kernel': 'check_kernel',
        'lemma-suite': 'lemma_suite',
        'pv-eval': 'pv_eval',
        'threshold-scan': 'threshold_scan',
        'solve': 'solve',
        'residual': 'residual',
        'viscosity-check': 'viscosity_check',
        'scan-equivalence': 'scan_equivalence',
        'compare': 'compare',
        'doubling-diagnostic': 'doubling_diagnostic',
    }

    @property
    def defaultconfig(self):
        return {'outdir': self.DEFAULT_OUTDIR, 'parallel': 'true'}

    @property
    def parallel(self):
        value = self.config.get('parallel')
        if isinstance(value, bool) or value is None:
            return bool(value)
        if isinstance(value, int):
            return value
        value = str(value).strip().lower()
        if value in ('true', 'yes'):
            return True
        if value in ('false', 'no', '0', ''):
            return False
        try:
            return int(value)
        except ValueError:
            raise InvalidConfigError(f"parallel must be true, false or a worker count: "
                                     f"'{value}'")

    def artifact_dir(self, config):
        outdir = (self.kwargs.get('outdir') or config.output.value('outdir')
                  or self.config.get('outdir'))
        name = config.output.value('name') or config.subcommand
        return ArtifactDir(Path(outdir) / name, dry_run=self.dry_run)

    def _failed(self, cell, e):
        self.errored.append(str(cell))
        LOGGER.error(f'Error processing {cell}: {e}')
        if LOGGER.isEnabledFor(logging.DEBUG):
            LOGGER.exception(e)

    def _attempt(self, action, cell):
        try:
            return action(cell)
        except Exception as e:
            self._failed(cell, e)
            return None

    def _parallel(self, cells, action, parallel=None):
        '''action(cell) for every cell, in cell order; None for a cell that raised.'''
        cells = list(cells)
        parallel = self.parallel if parallel is None else parallel

        if not parallel or len(cells) < 2:
            return [self._attempt(action, c) for c in cells]

        if parallel is True:
            parallel = len(os.sched_getaffinity(0))

        LOGGER.info(f'Starting processing {len(cells)} cells...')
        results = []
        with futures.ThreadPoolExecutor(max_workers=int(parallel)) as executor:
            submissions = {executor.submit(action, c): c for c in cells}
            while any(map(lambda future: future.running(), submissions)):
                (_, not_done) = futures.wait(submissions, timeout=60)
                for (index, future) in enumerate(not_done):
                    cell = submissions.get(future)
                    LOGGER.info(f'Still processing [{index+1}/{len(not_done)}]: {cell}')
            for future in submissions:
                e = future.exception()
                if e:
                    self._failed(submissions.get(future), e)
                    results.append(None)
                else:
                    results.append(future.result())
        LOGGER.info(f'Finished processing {len(cells)} cells')
        return results

    def run(self, config):
        '''Run config.subcommand; returns the exit status, the report stays in self.report.'''
        handler = getattr(self, self.HANDLERS[config.subcommand])
        artifacts = self.artifact_dir(config)
        self.errored = []
        LOGGER.info(f'Running {config.subcommand} (seed {config.seed})')
        try:
            checks, body = handler(config, artifacts)
        except RUN_ERRORS as e:
            LOGGER.error(f'{config.subcommand} did not complete: {e}')
            checks, body = [EqCheck('completed', False, True)], {'error': str(e)}
        if self.errored:
            checks.append(EqCheck('errored_cells', len(self.errored), 0))
            body['errored_cells'] = self.errored

        report = {'schema_version': SCHEMA_VERSION,
                  'subcommand': config.subcommand,
                  'seed': config.seed,
                  'config': config.to_dict(),
                  'checks': [c.to_dict() for c in checks],
                  'pass': checks_pass(checks)}
        report.update(body)
        self.report = report
        artifacts.write_json('report.json', report)

        for c in checks:
            if not c.passed:
                LOGGER.info(f'FAIL {c.describe()}')
            else:
                LOGGER.debug(f'PASS {c.describe()}')
        LOGGER.info(f"{config.subcommand}: {'PASS' if report['pass'] else 'FAIL'} "
                    f"({sum(c.passed for c in checks)}/{len(checks)} checks)")
        return EXIT_PASS if report['pass'] else EXIT_VIOLATION

    def _solve(self, config, problem=None):
        problem = problem or config.problem()
        solver = DirichletSolver(problem, config.params['method'])
        return solver.solve(), solver

    def check_kernel(self, config, artifacts):
        p = config.params
        plan = SamplePlan(decades=p['decades'], n_radii=p['n_radii'], n_angles=p['n_angles'],
                          n_random=p['n_random'], seed=config.seed)
        report = check_admissibility(config.kernel, plan)
        checks = [EqCheck(a['axiom'], a['pass'], True) for a in report['axioms']]
        return checks, {'admissibility': report}

    def lemma_suite(self, config, artifacts):
        p = config.params
        results = lemma_suite(samples=p['samples'], seed=config.seed,
                              oracle_samples=p['oracle_samples'],
                              extra_suites=[(suite_affine_annulus, p['affine_samples'])])
        checks = [EqCheck(f"{r['lemma']}.violations", r['violations'], 0) for r in results]
        for r in results:
            if 'max_relative_error' in r:
                checks.append(LeCheck(f"{r['lemma']}.max_relative_error",
                                      r['max_relative_error'], r['tol']))
        artifacts.write_csv('lemmas.csv', results,
                            ['lemma', 'samples', 'violations', 'worst_ratio'])
        return checks, {'lemmas': results}

    def pv_eval(self, config, artifacts):
        p = config.params
        spec = config.kernel
        u = config.function
        tol = config.tolerance.value('pv_tol')
        checks = []
        rows = []
        points = p['points']
        if p['near_zone_beta'] is not None and not u.in_tailspace(spec.s, spec.p):
            LOGGER.info(f'{u!r} is outside the tail space; measuring the near zone only')
            points = []
        for x in points:
            result = pv_evaluate(u, x, spec, tol=tol, radius=p['radius'])
            rows.append(result.to_dict())
            if p['expect']:
                checks.append(EqCheck(f"verdict at {result.point} is {p['expect']}",
                                      result.verdict == p['expect'], True))
            if p['expected_rate'] is not None:
                rate = p['expected_rate']
                checks.append(AbsLeCheck(f'fitted_rate at {result.point}', result.fitted_rate,
                                         rate, p['rate_tol'] * abs(rate)))
        body = {'points': rows}
        x0 = p['points'][0]
        if p['near_zone_beta'] is not None:
            near = near_zone_rate(u, x0, spec, beta=p['near_zone_beta'])
            expected = near['expected_rate']
            checks.append(AbsLeCheck('near_zone_rate', near['measured_rate'], expected,
                                     p['near_zone_tol'] * abs(expected)))
            checks.append(EqCheck('near_zone_certificates',
                                  all(r['ok'] for r in near['rows']), True))
            artifacts.write_csv('near_zone.csv', near['rows'],
                                ['eps', 'measured', 'bound', 'ok'])
            body['near_zone'] = near
        if p['continuity_radius'] is not None:
            body['continuity'] = continuity_check(u, x0, p['continuity_radius'], spec)
        return checks, body

    def threshold_scan(self, config, artifacts):
        p = config.params
        rows = threshold_scan(p['s_grid'], p['p_grid'], n=p['dimension'],
                              tol=config.tolerance.value('pv_tol'), mapper=self._parallel)
        rows = [r for r in rows if r is not None]
        disagreements = [r for r in rows if not r['agrees']]
        artifacts.write_csv('threshold_scan.csv', rows,
                            ['s', 'p', 'threshold', 'side', 'verdict', 'fitted_rate',
                             'expected_rate', 'value', 'near_critical', 'agrees'])
        checks = [EqCheck('disagreements', len(disagreements), 0)]
        return checks, {'cells': len(rows), 'disagreements': disagreements}

    def solve(self, config, artifacts):
        p = config.params
        problem = config.problem(interior=p['interior'])
        u, solver = self._solve(config, problem)
        last = solver.history[-1]
        checks = [LeCheck('residual', last['residual'],
                          problem.solver_tol * (1 + abs(last['energy'])))]
        body = {'iterations': len(solver.history) - 1, 'energy': last['energy'],
                'residual': last['residual'], 'unknowns': solver.operator.size}
        if config.kernel.p == 2:
            oracle = linear_oracle(problem, solver.operator)
            diff = float(np.max(np.abs(u.interior_values - oracle.interior_values)))
            checks.append(LeCheck('linear_oracle_max_diff', diff, 0.0, p['oracle_tol']))
            body['linear_oracle_max_diff'] = diff
        if p['refine']:
            study = refinement_study(lambda h: config.problem(h=h, interior=p['interior']),
                                     p['refine'], p['method'])
            artifacts.write_csv('refinement.csv', study['rows'],
                                ['level', 'h', 'unknowns', 'energy', 'residual', 'seminorm',
                                 'center_value', 'center_change', 'seminorm_change'])
            body['refinement'] = study
        artifacts.write_csv('history.csv', solver.history,
                            ['iteration', 'energy', 'residual', 'step', 'method'])
        artifacts.write_with('solution.csv', write_grid, u)
        return checks, body

    def residual(self, config, artifacts):
        u, solver = self._solve(config)
        energy = solver.history[-1]['energy']
        tol = config.params['pairing_tol'] * (1 + abs(energy))
        report = classify_weak(u, config.kernel, tol=tol, operator=solver.operator)
        worst = max(abs(report.min_pairing), abs(report.max_pairing))
        checks = [LeCheck('max_abs_pairing', worst, 0.0, tol),
                  EqCheck('weak_solution', report.solution, True)]
        rows = [{'x': x.tolist(), 'pairing': float(v)}
                for x, v in zip(u.interior_points, report.pairings)]
        artifacts.write_csv('pairings.csv', rows)
        body = report.to_dict()
        body.pop('pairings')
        body['energy'] = energy
        return checks, body

    def _touching(self, u, x0, spec, rtol):
        family, skipped = test_family(u, x0, spec)
        for phi in family:
            try:
                return touching_principal_value(u, x0, phi, spec, rtol=rtol)
            except TouchingError as e:
                LOGGER.debug(f'{phi.describe()} does not touch: {e}')
        return None

    def viscosity_check(self, config, artifacts):
        p = config.params
        spec = config.kernel
        u, _ = self._solve(config)
        if p['points'] is not None:
            points = np.asarray(p['points'], dtype=float).reshape(-1, spec.n)
        else:
            points = u.interior_points
            if p['margin'] > 0:
                points = points[u.domain.distance_to_boundary(points) >= p['margin']]
            points = spread(points, p['count'])
        rtol = config.tolerance.value('viscosity_tol')
        reports = self._parallel([tuple(x) for x in points],
                                 lambda x: self._touching(u, np.array(x), spec, rtol))
        touched = [r for r in reports if r is not None]
        checks = [EqCheck('touching_points', len(touched), len(points))]
        for r in touched:
            checks.append(EqCheck(f'verdict at {r.x0} is converged', r.verdict == 'converged',
                                  True))
            checks.append(GeCheck(f'L u at {r.x0}', r.value, 0.0, r.tol))
        artifacts.write_csv('touchings.csv', [r.to_dict() for r in touched],
                            ['x0', 'test', 'regime', 'value', 'verdict', 'tol', 'pass'])
        return checks, {'touchings': [r.to_dict() for r in touched]}

    def scan_equivalence(self, config, artifacts):
        p = config.params
        spec = config.kernel
        u, _ = self._solve(config)
        rtol = config.tolerance.value('viscosity_tol')
        scan = partial(scan_equivalence, spec=spec, side=p['side'], cones=p['cones'],
                       quadratics=p['quadratics'], mapper=self._parallel, rtol=rtol)
        report = scan(u, margin=p['margin'])
        checks = [EqCheck('failures', report['failures'], 0),
                  GeCheck('touchings', report['touchings'], 1)]
        artifacts.write_csv('records.csv', report['records'],
                            ['x0', 'side', 'test', 'regime', 'beta', 'value', 'verdict', 'tol',
                             'status'])
        body = {'scan': report}
        if p['corrupt']:
            bad, node = corrupt(u, seed=config.seed, amplitude=p['corrupt_amplitude'])
            control = scan(bad, points=[node])
            checks.append(GeCheck('corrupted.failures', control['failures'], 1))
            body['corrupted'] = dict(control, node=node)
        return checks, body

    def _compare_trial(self, config, problem, u, artifacts, trial):
        index, seedseq = trial
        rng = np.random.default_rng(seedseq)
        p = config.params
        spec = config.kernel
        lower = problem.exterior.shifted(-rng.uniform(0, p['amplitude']))
        values = lower.flat.copy()
        outside = lower.exterior
        values[outside] -= rng.uniform(0, p['amplitude'], int(np.sum(outside)))
        lower_problem = type(problem)(spec, lower.with_values(values), problem.solver_tol,
                                      problem.max_iter)
        v, _ = self._solve(config, lower_problem)
        result = compare(u, v, spec, tol=config.tolerance.value('compare_tol'))
        result['trial'] = index
        if p['doubling']:
            result['doubling'] = doubling_diagnostic(u, v, spec).to_dict()
        artifacts.write_json(f'trials/trial-{index:03d}.json', result)
        return result

    def compare(self, config, artifacts):
        p = config.params
        problem = config.problem()
        u, _ = self._solve(config, problem)
        seeds = np.random.SeedSequence(config.seed).spawn(p['trials'])
        results = self._parallel(list(enumerate(seeds)),
                                 partial(self._compare_trial, config, problem, u, artifacts))
        results = [r for r in results if r is not None]
        tol = config.tolerance.value('compare_tol')
        checks = [GeCheck('trials', len(results), p['trials'])]
        for r in results:
            checks.append(GeCheck(f"trial {r['trial']} min_gap", r['min_gap'], 0.0, tol))
            for name, ok in r.get('doubling', {}).get('checks', {}).items():
                checks.append(EqCheck(f"trial {r['trial']} doubling {name}", ok, True))
        rows = [{'trial': r['trial'], 'min_gap': r['min_gap'],
                 'exterior_min_gap': r['exterior_min_gap'], 'pass': r['pass']} for r in results]
        artifacts.write_csv('trials.csv', rows)
        return checks, {'trials': rows}

    def doubling_diagnostic(self, config, artifacts):
        p = config.params
        spec = config.kernel
        problem = config.problem()
        u, _ = self._solve(config, problem)
        v, _ = self._solve(config, problem.shifted(-p['shift']))
        if p['violation']:
            domain = problem.domain
            bump = AnalyticFunction.bump(domain.center, domain.radius / 2)
            v = v.with_interior(v.interior_values
                                + p['violation'] * bump.value(v.interior_points))
        diag = doubling_diagnostic(u, v, spec, q=p['q'], eps_sequence=p['eps_sequence'])
        checks = [EqCheck(name, ok, True) for name, ok in diag.checks.items()]
        artifacts.write_csv('doubling.csv', diag.rows(), ['eps', 'M_eps', 'pair_gap'])
        return checks, {'doubling': diag.to_dict()}
