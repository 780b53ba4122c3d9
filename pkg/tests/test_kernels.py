
import math
import unittest

import numpy as np

from fracplap.kernels import KernelError
from fracplap.kernels import KernelSpec
from fracplap.kernels import PerturbedProfile
from fracplap.kernels import SamplePlan
from fracplap.kernels import check_admissibility
from fracplap.kernels import eval_kernel


SMALL_PLAN = SamplePlan(n_radii=21, n_angles=32, n_random=200)


class KernelSpecTest(unittest.TestCase):
    def testValidation(self):
        for kwargs in [dict(n=3, s=0.5, p=2), dict(n=1, s=0.0, p=2), dict(n=1, s=1.0, p=2),
                       dict(n=1, s=0.5, p=1.0), dict(n=1, s=0.5, p=2, Lambda=0.5)]:
            with self.subTest(**kwargs):
                with self.assertRaises(KernelError):
                    KernelSpec(**kwargs)

    def testThreshold(self):
        self.assertAlmostEqual(KernelSpec(n=1, s=0.5, p=1.5).threshold, 4 / 3)
        self.assertTrue(KernelSpec(n=1, s=0.5, p=1.25).singular)
        self.assertFalse(KernelSpec(n=1, s=0.5, p=1.5).singular)

    def testFromConfig(self):
        spec = KernelSpec.from_config({'dimension': 2, 's': 0.5, 'p': 1.5, 'lambda': 2.0,
                                       'profile': 'perturbed', 'angular_coeffs': [1, 0, 0.4]})
        self.assertEqual(spec.n, 2)
        self.assertEqual(spec.Lambda, 2.0)
        self.assertIsInstance(spec.profile, PerturbedProfile)
        self.assertEqual(spec.to_dict()['profile']['angular_coeffs'], [1.0, 0.0, 0.4])

    def testUnknownProfile(self):
        with self.assertRaises(KernelError):
            KernelSpec.from_config({'s': 0.5, 'p': 2, 'profile': 'wobbly'})


class EvalKernelTest(unittest.TestCase):
    def testPureKernel(self):
        spec = KernelSpec(n=1, s=0.5, p=2)
        self.assertAlmostEqual(eval_kernel(spec, 2.0), 0.25)
        self.assertAlmostEqual(eval_kernel(spec, -2.0), 0.25)
        self.assertAlmostEqual(eval_kernel(spec, 1.0), 1.0)

    def testArrayInput(self):
        spec = KernelSpec(n=2, s=0.5, p=2)
        values = eval_kernel(spec, np.array([[1.0, 0.0], [0.0, 2.0]]))
        np.testing.assert_allclose(values, [1.0, 2.0 ** -3])

    def testOrigin(self):
        with self.assertRaises(KernelError):
            eval_kernel(KernelSpec(n=1, s=0.5, p=2), 0.0)

    def testPerturbedSymmetry(self):
        spec = KernelSpec(n=2, s=0.5, p=1.5, Lambda=2.0,
                          profile=PerturbedProfile([1.0, 0.0, 0.4]))
        z = np.array([[0.3, -0.7], [1.5, 0.2]])
        np.testing.assert_array_equal(eval_kernel(spec, z), eval_kernel(spec, -z))


class AdmissibilityTest(unittest.TestCase):
    def testPureKernelPasses(self):
        report = check_admissibility(KernelSpec(n=1, s=0.5, p=2), SMALL_PLAN)
        self.assertTrue(report['pass'])
        self.assertEqual([a['axiom'] for a in report['axioms']],
                         ['symmetry', 'translation_invariance', 'growth', 'continuity'])

    def testPerturbedWithinEnvelope(self):
        spec = KernelSpec(n=2, s=0.5, p=1.5, Lambda=2.0,
                          profile=PerturbedProfile([1.0, 0.0, 0.4]))
        self.assertTrue(check_admissibility(spec, SMALL_PLAN)['pass'])

    def testGrowthViolation(self):
        spec = KernelSpec(n=2, s=0.5, p=1.5, Lambda=1.2,
                          profile=PerturbedProfile([1.0, 0.0, 0.4]))
        report = check_admissibility(spec, SMALL_PLAN)
        self.assertFalse(report['pass'])
        growth = [a for a in report['axioms'] if a['axiom'] == 'growth'][0]
        self.assertFalse(growth['pass'])
        self.assertIsNotNone(growth['witness'])

    def testOddCoefficientsRefused(self):
        with self.assertRaises(KernelError):
            PerturbedProfile([1.0, 0.3])

    def testOddFactorRefused(self):
        with self.assertRaises(KernelError):
            PerturbedProfile(factor=lambda theta: 1 + 0.5 * np.cos(theta))

    def testShortPlanRefused(self):
        with self.assertRaises(KernelError):
            check_admissibility(KernelSpec(n=1, s=0.5, p=2), SamplePlan(decades=3))

    def testIsotropicIntegral(self):
        spec = KernelSpec(n=2, s=0.5, p=2)
        self.assertAlmostEqual(spec.angular_integral, 2 * math.pi)
