
import unittest

import numpy as np

from fracplap.kernels import KernelSpec
from fracplap.pv import CONVERGED
from fracplap.pv import DIVERGED
from fracplap.pv import PVError
from fracplap.pv import affine_annulus_integral
from fracplap.pv import continuity_check
from fracplap.pv import near_zone_bound
from fracplap.pv import near_zone_certificate
from fracplap.pv import near_zone_rate
from fracplap.pv import pv_evaluate
from fracplap.pv import suite_affine_annulus
from fracplap.pv import threshold_scan
from fracplap.space import AnalyticFunction
from fracplap.space import DomainSpec
from fracplap.space import GridFunction
from fracplap.space import NotInTailSpaceError


REGULAR = KernelSpec(n=1, s=0.5, p=1.5)


class PVEvaluateTest(unittest.TestCase):
    def testConstant(self):
        result = pv_evaluate(AnalyticFunction.constant(1, 2.0), 0.3, REGULAR)
        self.assertEqual(result.verdict, CONVERGED)
        self.assertEqual(result.value, 0.0)

    def testAffine(self):
        for spec in [REGULAR, KernelSpec(n=2, s=0.6, p=1.5)]:
            with self.subTest(n=spec.n):
                u = AnalyticFunction.affine(np.arange(1.0, spec.n + 1), 1.0)
                result = pv_evaluate(u, np.full(spec.n, 0.3), spec)
                self.assertEqual(result.verdict, CONVERGED)
                self.assertLess(abs(result.value), 1e-8)

    def testSingularExample(self):
        u = AnalyticFunction.singular_example()
        result = pv_evaluate(u, 0.0, KernelSpec(n=1, s=0.5, p=1.5))
        self.assertEqual(result.verdict, CONVERGED)
        # -2 int_0^1 y^{-3/4} dy - 2 int_1^inf y^{-7/4} dy
        self.assertAlmostEqual(result.value, -8 - 8 / 3, delta=1e-4)
        result = pv_evaluate(u, 0.0, KernelSpec(n=1, s=0.5, p=1.25))
        self.assertEqual(result.verdict, DIVERGED)
        self.assertLess(result.fitted_rate, 0.0)

    def testDivergenceRate(self):
        result = pv_evaluate(AnalyticFunction.singular_example(), 0.0,
                             KernelSpec(n=1, s=0.5, p=1.2))
        self.assertEqual(result.verdict, DIVERGED)
        self.assertAlmostEqual(result.fitted_rate, -0.2, delta=0.02)

    def testOdd(self):
        u = AnalyticFunction.bump([0.0], 1.0)
        plus = pv_evaluate(u, 0.3, REGULAR).value
        minus = pv_evaluate(-u, 0.3, REGULAR).value
        self.assertAlmostEqual(minus, -plus, delta=1e-12 * abs(plus))

    def testShiftAndScale(self):
        u = AnalyticFunction.bump([0.0], 1.0)
        base = pv_evaluate(u, 0.3, REGULAR).value
        self.assertAlmostEqual(pv_evaluate(u.shifted(3.0), 0.3, REGULAR).value, base,
                               delta=1e-6 * abs(base))
        self.assertAlmostEqual(pv_evaluate(u * 4.0, 0.3, REGULAR).value,
                               4.0 ** (REGULAR.p - 1) * base, delta=1e-6 * abs(base))

    def testTranslation(self):
        u = AnalyticFunction.bump([0.0], 1.0)
        base = pv_evaluate(u, 0.3, REGULAR).value
        moved = pv_evaluate(u.translated([0.7]), 1.0, REGULAR).value
        self.assertAlmostEqual(moved, base, delta=1e-9 * abs(base))

    def testNotInTailSpace(self):
        with self.assertRaises(NotInTailSpaceError):
            pv_evaluate(AnalyticFunction.affine([1.0]), 0.0, KernelSpec(n=1, s=0.5, p=2))

    def testBadArguments(self):
        u = AnalyticFunction.constant(1)
        with self.assertRaises(PVError):
            pv_evaluate(u, 0.0, {'s': 0.5, 'p': 2})
        with self.assertRaises(PVError):
            pv_evaluate(u, 0.0, REGULAR, K=41)

    def testGridConstant(self):
        domain = DomainSpec.interval(-1.0, 1.0)
        u = GridFunction.sample(lambda x: np.full(len(x), 1.5), domain, 0.125, 3.0)
        result = pv_evaluate(u.shifted(0.0), 0.25, REGULAR)
        self.assertEqual(result.verdict, CONVERGED)

    def testToDict(self):
        result = pv_evaluate(AnalyticFunction.constant(1), 0.0, REGULAR)
        d = result.to_dict()
        self.assertEqual(d['verdict'], CONVERGED)
        self.assertEqual(len(d['epsilons']), len(d['partials']))


class AffineAnnulusTest(unittest.TestCase):
    def testVanishes(self):
        ell = AnalyticFunction.affine([3.0, -2.0], 5.0)
        result = affine_annulus_integral(ell, [0.5, 0.1], 0.01, 2.0, KernelSpec(n=2, s=0.3, p=3))
        self.assertTrue(result['ok'])

    def testSuite(self):
        report = suite_affine_annulus(np.random.default_rng(1), 20)
        self.assertEqual(report['samples'], 20)
        self.assertEqual(report['violations'], 0)


class ThresholdScanTest(unittest.TestCase):
    def testSmallGrid(self):
        rows = threshold_scan(s_grid=(0.5,), p_grid=(1.2, 1.5))
        self.assertEqual([(r['s'], r['p']) for r in rows], [(0.5, 1.2), (0.5, 1.5)])
        self.assertEqual([r['side'] for r in rows], ['singular', 'regular'])
        self.assertTrue(all(r['agrees'] for r in rows))
        self.assertAlmostEqual(rows[0]['expected_rate'], -0.2)

    def testMapper(self):
        calls = []

        def mapper(cells, action):
            calls.append(len(cells))
            return [action(c) for c in cells]

        rows = threshold_scan(s_grid=(0.3,), p_grid=(1.5,), mapper=mapper)
        self.assertEqual(calls, [1])
        self.assertAlmostEqual(rows[0]['threshold'], 2 / 1.7)


class NearZoneTest(unittest.TestCase):
    def testAffineMeasuresZero(self):
        report = near_zone_certificate(AnalyticFunction.affine([2.0]), 0.3, 0.1, REGULAR)
        self.assertEqual(report['bound'], 0.0)
        self.assertLess(abs(report['measured']), 1e-12)

    def testRegularHalving(self):
        spec = KernelSpec(n=1, s=0.5, p=3)
        u = AnalyticFunction.quadratic([0.0], [1.0], [[2.0]])
        coarse = near_zone_bound(u, 0.0, 1e-3, spec)['bound']
        fine = near_zone_bound(u, 0.0, 5e-4, spec)['bound']
        self.assertAlmostEqual(fine / coarse, 2 ** -1.5, delta=0.01)

    def testInadmissibleBeta(self):
        spec = KernelSpec(n=1, s=0.5, p=1.25)
        with self.assertRaises(PVError):
            near_zone_bound(AnalyticFunction.power_of_norm(2.0), 0.0, 0.1, spec, beta=2.0)

    def testSingularRate(self):
        spec = KernelSpec(n=1, s=0.6, p=1.3)
        beta = 1.5 * spec.sp / (spec.p - 1)
        report = near_zone_rate(AnalyticFunction.power_of_norm(beta), [0.0], spec, beta=beta)
        expected = beta * (spec.p - 1) - spec.sp
        self.assertAlmostEqual(report['expected_rate'], expected)
        self.assertLess(abs(report['measured_rate'] - expected), 0.15 * expected)
        self.assertTrue(all(r['ok'] for r in report['rows']))


class ContinuityCheckTest(unittest.TestCase):
    def testAffine(self):
        report = continuity_check(AnalyticFunction.affine([1.0]), 0.0, 0.2, REGULAR, levels=3,
                                  thetas=(0.0, 1e-2))
        self.assertLess(max(report['modulus']), 1e-8)
        self.assertEqual(report['gaps'][0], 0.0)

    def testLinearGap(self):
        spec = KernelSpec(n=1, s=0.5, p=2)
        report = continuity_check(AnalyticFunction.capped_power(2.0, 1.0), 0.0, 0.2, spec,
                                  levels=2, thetas=(1e-1, 1e-2, 1e-3))
        self.assertAlmostEqual(report['gap_slope'], 1.0, delta=0.05)
