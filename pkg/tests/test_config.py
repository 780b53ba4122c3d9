
import re
import tempfile
import unittest

from pathlib import Path

from fracplap.config import REQUIRED_BLOCKS
from fracplap.config import InvalidConfigError
from fracplap.config import RunConfig
from fracplap.config.blocks import GridDefinition
from fracplap.config.blocks import ToleranceDefinition
from fracplap.kernels import PerturbedProfile
from fracplap.space import ConstantFarField
from fracplap.space import DomainSpec
from fracplap.space import SignFarField


TEST_CONFIGS_PATH = Path(__file__).parent.parent / 'configs'


def solve_config(**overrides):
    definition = {
        'subcommand': 'solve',
        'kernel': {'s': 0.5, 'p': 2},
        'domain': {'type': 'interval', 'lo': -1, 'hi': 1},
        'grid': {'h': 0.125, 'collar_width': 3.0},
        'exterior': {'kind': 'sign', 'parameters': {'value': 1.0}},
    }
    definition.update(overrides)
    return definition


class RunConfigTest(unittest.TestCase):
    def setUp(self):
        self.testdir = tempfile.TemporaryDirectory()
        self.addCleanup(self.testdir.cleanup)
        self.path = Path(self.testdir.name)

    def write(self, name, text):
        path = self.path / name
        path.write_text(text)
        return path

    def testBlocks(self):
        config = RunConfig(solve_config())
        self.assertEqual(config.subcommand, 'solve')
        self.assertEqual(config.seed, 42)
        self.assertEqual(config.kernel.n, 1)
        self.assertEqual(config.domain, DomainSpec.interval(-1.0, 1.0))
        self.assertEqual(config.far_field, SignFarField(1.0))
        self.assertIsNone(config.function)

    def testTypeDefaults(self):
        grid = GridDefinition({'h': 0.125, 'collar_width': 3.0}, block='grid')
        self.assertEqual(grid['type'], 'grid')
        self.assertEqual(ToleranceDefinition({}, block='tolerance').data, {'type': 'tolerance'})
        self.assertEqual(RunConfig(solve_config()).definition['type'], 'run')

    def testKindAlias(self):
        config = RunConfig(solve_config(exterior={'kind': 'constant', 'value': 2.0}))
        self.assertEqual(config.far_field, ConstantFarField(2.0))
        with self.assertRaises(InvalidConfigError):
            RunConfig(solve_config(exterior={'kind': 'sign', 'type': 'sign', 'value': 1.0}))
        with self.assertRaises(InvalidConfigError):
            RunConfig(solve_config(exterior={'kind': 'sign', 'value': 1.0,
                                             'parameters': {'value': 2.0}}))

    def testKernelProfile(self):
        config = RunConfig(solve_config(kernel={'profile': 'perturbed', 's': 0.5, 'p': 1.5,
                                                'lambda': 2.0, 'angular_coeffs': [1, 0, 0.4],
                                                'dimension': 2},
                                        domain={'type': 'box', 'lo': [-1, -1], 'hi': [1, 1]},
                                        grid={'h': 0.25, 'collar_width': 4.25}))
        self.assertIsInstance(config.kernel.profile, PerturbedProfile)
        self.assertEqual(config.kernel.Lambda, 2.0)

    def testUnknownSubcommand(self):
        with self.assertRaisesRegex(InvalidConfigError, "unknown subcommand 'solver'"):
            RunConfig(solve_config(subcommand='solver'))

    def testMissingBlocks(self):
        definition = solve_config()
        del definition['grid']
        with self.assertRaisesRegex(InvalidConfigError, "needs blocks: 'grid'"):
            RunConfig(definition)

    def testUnknownParams(self):
        with self.assertRaisesRegex(InvalidConfigError, "has no params 'trials'"):
            RunConfig(solve_config(params={'trials': 3}))

    def testParams(self):
        config = RunConfig(solve_config(params={'oracle_tol': '1e-6'}))
        self.assertEqual(config.params['method'], 'newton')
        self.assertEqual(config.params['oracle_tol'], 1e-6)
        self.assertEqual(config.to_dict()['params'], config.params)
        with self.assertRaises(InvalidConfigError):
            RunConfig(solve_config(params={'oracle_tol': 'tight'})).params

    def testSubcommandMismatch(self):
        with self.assertRaises(InvalidConfigError):
            RunConfig(solve_config(), subcommand='compare')
        self.assertEqual(RunConfig({'seed': 7}, subcommand='lemma-suite').seed, 7)

    def testInvalidField(self):
        with self.assertRaisesRegex(InvalidConfigError, "invalid fields: 'colour'"):
            RunConfig(solve_config(grid={'h': 0.125, 'collar_width': 3.0, 'colour': 'red'}))

    def testGridValidation(self):
        with self.assertRaises(InvalidConfigError):
            RunConfig(solve_config(grid={'h': 0.5, 'collar_width': 0.25}))

    def testDimensionMismatch(self):
        with self.assertRaises(InvalidConfigError):
            RunConfig(solve_config(kernel={'s': 0.5, 'p': 2, 'dimension': 2}))

    def testBadKernel(self):
        with self.assertRaisesRegex(InvalidConfigError, 'kernel'):
            RunConfig(solve_config(kernel={'s': 1.5, 'p': 2}))

    def testFunctionNeedsType(self):
        with self.assertRaises(InvalidConfigError):
            RunConfig({'subcommand': 'pv-eval', 'kernel': {'s': 0.5, 'p': 1.5},
                       'function': {'beta': 2.0}})

    def testTolerance(self):
        config = RunConfig(solve_config(tolerance={'pv_tol': '1e-10'}))
        self.assertEqual(config.tolerance.value('pv_tol'), 1e-10)
        self.assertEqual(config.tolerance.value('solver_tol'), 1e-9)
        with self.assertRaises(InvalidConfigError):
            RunConfig(solve_config(tolerance={'solver_tol': -1}))

    def testProblem(self):
        problem = RunConfig(solve_config()).problem()
        self.assertEqual(problem.solver_tol, 1e-9)
        self.assertEqual(len(problem.exterior.interior_points), 15)
        small = RunConfig(solve_config(grid={'h': 0.125, 'collar_width': 1.0}))
        with self.assertRaisesRegex(InvalidConfigError, 'problem'):
            small.problem()

    def testYamlError(self):
        path = self.write('bad.yaml', 'subcommand: solve\nkernel:\n  s: [0.5\n')
        with self.assertRaisesRegex(InvalidConfigError, rf'^{re.escape(str(path))}:\d+:\d+: '):
            RunConfig.load(path)

    def testJsonError(self):
        path = self.write('bad.json', '{"subcommand": }')
        with self.assertRaisesRegex(InvalidConfigError, rf'^{re.escape(str(path))}:1:16: '):
            RunConfig.load(path)

    def testJson(self):
        path = self.write('run.json', '{"subcommand": "lemma-suite", "seed": 3}')
        self.assertEqual(RunConfig.load(path).seed, 3)

    def testMissingFile(self):
        with self.assertRaises(InvalidConfigError):
            RunConfig.load(self.path / 'absent.yaml')

    def testNotAMapping(self):
        with self.assertRaises(InvalidConfigError):
            RunConfig.load(self.write('list.yaml', '- solve\n'))

    def testShippedConfigs(self):
        paths = sorted(TEST_CONFIGS_PATH.glob('*.yaml'))
        self.assertGreater(len(paths), 0)
        for path in paths:
            with self.subTest(config=path.name):
                config = RunConfig.load(path)
                self.assertIn(config.subcommand, REQUIRED_BLOCKS)
                if config.grid is not None:
                    config.problem()

    def testEquivalenceConfigs(self):
        configs = [RunConfig.load(path)
                   for path in sorted(TEST_CONFIGS_PATH.glob('scan-equivalence-*.yaml'))]
        dimensions = sorted(config.kernel.n for config in configs)
        self.assertEqual(dimensions, [1, 1, 2])
        self.assertTrue(any(config.kernel.p < 2 for config in configs))
        for config in configs:
            self.assertIsNone(config.far_field.constant_value, config.source)
