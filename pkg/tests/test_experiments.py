
import os
import tempfile
import unittest
import yaml

from pathlib import Path
from unittest import mock

from fracplap import experiments as experiments_module
from fracplap import json
from fracplap.argparse import FracplapArgumentParser
from fracplap.config import RunConfig
from fracplap.experiments import EXIT_PASS
from fracplap.experiments import EXIT_VIOLATION
from fracplap.experiments import Experiments


LATTICE = {
    'kernel': {'s': 0.5, 'p': 2},
    'domain': {'type': 'interval', 'lo': -1, 'hi': 1},
    'grid': {'h': 0.125, 'collar_width': 3.0},
    'exterior': {'kind': 'sign', 'parameters': {'value': 1.0}},
}

TEST_CONFIGS_PATH = Path(__file__).parent.parent / 'configs'

LEMMAS = {
    'subcommand': 'lemma-suite',
    'seed': 7,
    'params': {'samples': 2000, 'oracle_samples': 200, 'affine_samples': 5},
}


class ExperimentsTest(unittest.TestCase):
    def setUp(self):
        self.testdir = tempfile.TemporaryDirectory()
        self.addCleanup(self.testdir.cleanup)
        self.path = Path(self.testdir.name)

    def experiments(self, outdir=None, **kwargs):
        return Experiments(outdir=str(outdir or self.path), parallel='false', **kwargs)

    def testLemmaSuiteDeterministic(self):
        reports = []
        for name in ('first', 'second'):
            config = RunConfig(dict(LEMMAS, output={'name': name}))
            self.assertEqual(self.experiments().run(config), EXIT_PASS)
            reports.append((self.path / name / 'report.json').read_bytes())
            self.assertTrue((self.path / name / 'lemmas.csv').exists())
        first = json.loads(reports[0])
        second = json.loads(reports[1])
        first['config'].pop('output')
        second['config'].pop('output')
        self.assertEqual(first, second)
        self.assertEqual(first['seed'], 7)
        self.assertTrue(first['pass'])

    def testReportLayout(self):
        experiments = self.experiments()
        experiments.run(RunConfig(LEMMAS))
        report = json.loads((self.path / 'lemma-suite' / 'report.json').read_text())
        self.assertEqual(report, json.loads(json.dumps(experiments.report)))
        for key in ('schema_version', 'subcommand', 'seed', 'config', 'checks', 'pass'):
            self.assertIn(key, report)
        self.assertEqual(report['subcommand'], 'lemma-suite')

    def testDryRun(self):
        experiments = self.experiments(dry_run=True)
        self.assertEqual(experiments.run(RunConfig(LEMMAS)), EXIT_PASS)
        self.assertIsNotNone(experiments.report)
        self.assertEqual(list(self.path.iterdir()), [])

    def testThresholdScanRows(self):
        config = RunConfig({'subcommand': 'threshold-scan',
                            'params': {'s_grid': [0.3, 0.7], 'p_grid': [1.5, 2.0]}})
        experiments = self.experiments()
        experiments.run(config)
        lines = (self.path / 'threshold-scan' / 'threshold_scan.csv').read_text().splitlines()
        self.assertEqual(lines[0].split(',')[:2], ['s', 'p'])
        self.assertEqual(len(lines), 1 + 4)
        self.assertEqual(experiments.report['cells'], 4)

    def testSolve(self):
        config = RunConfig(dict(LATTICE, subcommand='solve'))
        experiments = self.experiments()
        self.assertEqual(experiments.run(config), EXIT_PASS)
        self.assertLess(experiments.report['linear_oracle_max_diff'], 1e-8)
        self.assertEqual(experiments.report['unknowns'], 15)
        for name in ('report.json', 'history.csv', 'solution.csv'):
            self.assertTrue((self.path / 'solve' / name).exists(), name)

    def testViolation(self):
        config = RunConfig({'subcommand': 'pv-eval',
                            'kernel': {'s': 0.5, 'p': 2},
                            'function': {'type': 'singular_example'},
                            'params': {'expect': 'diverged'}})
        experiments = self.experiments()
        self.assertEqual(experiments.run(config), EXIT_VIOLATION)
        self.assertFalse(experiments.report['pass'])

    def testRunError(self):
        config = RunConfig(dict(LATTICE, subcommand='solve', params={'method': 'bisection'}))
        experiments = self.experiments()
        self.assertEqual(experiments.run(config), EXIT_VIOLATION)
        self.assertIn('bisection', experiments.report['error'])
        self.assertEqual([c['name'] for c in experiments.report['checks']], ['completed'])

    def testCompareSolvesUpperOnce(self):
        config = RunConfig(dict(LATTICE, subcommand='compare', params={'trials': 3}))
        with mock.patch.object(experiments_module, 'DirichletSolver',
                               wraps=experiments_module.DirichletSolver) as solver:
            self.assertEqual(self.experiments().run(config), EXIT_PASS)
        self.assertEqual(solver.call_count, 3 + 1)

    def testShippedSublinearConfigs(self):
        for name in ('residual', 'doubling-diagnostic'):
            with self.subTest(config=name):
                definition = yaml.safe_load((TEST_CONFIGS_PATH / f'{name}.yaml').read_text())
                self.assertLess(definition['kernel']['p'], 2)
                definition['grid']['h'] = 0.03125
                experiments = self.experiments()
                self.assertEqual(experiments.run(RunConfig(definition)), EXIT_PASS,
                                 experiments.report)

    def testNearZoneConfig(self):
        experiments = self.experiments()
        config = RunConfig.load(TEST_CONFIGS_PATH / 'pv-near-zone.yaml')
        self.assertEqual(experiments.run(config), EXIT_PASS, experiments.report)
        self.assertEqual(experiments.report['points'], [])
        self.assertIn('near_zone', experiments.report)

    def testOutsideTailSpaceRecorded(self):
        config = RunConfig({'subcommand': 'pv-eval',
                            'kernel': {'s': 0.6, 'p': 1.3},
                            'function': {'type': 'power_of_norm', 'beta': 3.9}})
        experiments = self.experiments()
        self.assertEqual(experiments.run(config), EXIT_VIOLATION)
        self.assertIn('tail space', experiments.report['error'])
        self.assertEqual([c['name'] for c in experiments.report['checks']], ['completed'])

    def testParallelSetting(self):
        self.assertFalse(self.experiments().parallel)
        self.assertEqual(Experiments(parallel='3').parallel, 3)
        self.assertTrue(Experiments(parallel='yes').parallel)

    def testParallelOrder(self):
        experiments = Experiments(parallel=2)
        self.assertEqual(experiments._parallel(range(5), lambda c: c * c), [0, 1, 4, 9, 16])

    def testFailedCell(self):
        def action(cell):
            if cell == 1:
                raise ValueError('bad cell')
            return cell

        experiments = self.experiments()
        self.assertEqual(experiments._parallel([0, 1, 2], action), [0, None, 2])
        self.assertEqual(experiments.errored, ['1'])


class RuntimeSettingsTest(unittest.TestCase):
    def setUp(self):
        self.testdir = tempfile.TemporaryDirectory()
        self.addCleanup(self.testdir.cleanup)
        self.conf = Path(self.testdir.name) / 'fracplap.conf'
        self.conf.write_text('[experiments]\nparallel = 4\noutdir = from-ini\n')
        environ = mock.patch.dict(os.environ, {'XDG_CONFIG_HOME': self.testdir.name})
        environ.start()
        self.addCleanup(environ.stop)

    def testIniFile(self):
        experiments = Experiments(configfile=str(self.conf))
        self.assertEqual(experiments.parallel, 4)
        self.assertEqual(experiments.config['outdir'], 'from-ini')

    def testPrecedence(self):
        with mock.patch.dict(os.environ, {'FRACPLAP_PARALLEL': '2'}):
            self.assertEqual(Experiments(configfile=str(self.conf)).parallel, 2)
            self.assertFalse(Experiments(configfile=str(self.conf), parallel='false').parallel)

    def testDefaults(self):
        experiments = Experiments()
        self.assertEqual(experiments.config['outdir'], Experiments.DEFAULT_OUTDIR)
        self.assertFalse(experiments.dry_run)
        self.assertTrue(Experiments(dry_run=True).dry_run)

    def testDumpconfig(self):
        dump = Experiments(configfile=str(self.conf), dry_run=True).dumpconfig()
        self.assertTrue(dump.startswith('[experiments]\n'))
        self.assertIn('parallel = 4\n', dump)
        self.assertIn('dry_run = True\n', dump)
        self.assertNotIn('configfile', dump)


class ArgumentParserTest(unittest.TestCase):
    def testArgs(self):
        opts = FracplapArgumentParser().parse_args(['-n', '--parallel', 'false',
                                                    'solve', 'run.yaml'])
        self.assertEqual(opts.subcommand, 'solve')
        self.assertEqual(opts.config, 'run.yaml')
        self.assertTrue(opts.dry_run)
        self.assertFalse(opts.has_action)

    def testDumpconfigAlone(self):
        opts = FracplapArgumentParser().parse_args(['--dumpconfig'])
        self.assertTrue(opts.has_action)
        self.assertIsNone(opts.subcommand)

    def testNeedsConfig(self):
        parser = FracplapArgumentParser()
        with self.assertRaises(SystemExit):
            parser.parse_args(['solve'])
        with self.assertRaises(SystemExit):
            parser.parse_args(['solver', 'run.yaml'])
