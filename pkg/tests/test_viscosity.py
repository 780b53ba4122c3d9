
import unittest

import numpy as np

from fracplap import viscosity
from fracplap.kernels import KernelSpec
from fracplap.pv import pv_evaluate
from fracplap.space import AnalyticFunction
from fracplap.space import ConstantFarField
from fracplap.space import DomainSpec
from fracplap.space import GridFunction
from fracplap.space import SignFarField
from fracplap.space import ZeroFarField
from fracplap.viscosity import GluedFunction
from fracplap.viscosity import InadmissibleTestFunctionError
from fracplap.viscosity import TouchingError
from fracplap.viscosity import ViscosityError
from fracplap.viscosity import check_touching
from fracplap.viscosity import check_truncation
from fracplap.viscosity import check_viscosity_at
from fracplap.viscosity import corrupt
from fracplap.viscosity import scan_equivalence
from fracplap.viscosity import touching_principal_value
from fracplap.viscosity import truncate_min
from fracplap.weak import DirichletProblem
from fracplap.weak import solve_dirichlet


INTERVAL = DomainSpec.interval(-1.0, 1.0)
H = 0.125
COLLAR = 3.0
LINEAR = KernelSpec(n=1, s=0.5, p=2)
SINGULAR = KernelSpec(n=1, s=0.5, p=1.25)


def parabola(M, x0=0.0, c=0.0):
    '''c + M (x - x0)^2.'''
    return AnalyticFunction.quadratic([x0], [0.0], [[2 * M]], c=c)


class TestFunctionTest(unittest.TestCase):
    def testRegular(self):
        phi = viscosity.TestFunction(parabola(-1.0), 0.0, 0.25, LINEAR)
        self.assertEqual(phi.regime, 'c2')
        self.assertTrue(phi.gradient_vanishes)
        self.assertEqual(phi.describe()['radius'], 0.25)

    def testNonzeroGradientStaysC2(self):
        phi = viscosity.TestFunction(AnalyticFunction.affine([1.0]), 0.0, 0.25, SINGULAR)
        self.assertEqual(phi.regime, 'c2')

    def testSingularNeedsBeta(self):
        cone = AnalyticFunction.power_of_norm(3.0, scale=-1.0)
        with self.assertRaises(InadmissibleTestFunctionError):
            viscosity.TestFunction(cone, 0.0, 0.25, SINGULAR)
        with self.assertRaises(InadmissibleTestFunctionError):
            viscosity.TestFunction(cone, 0.0, 0.25, SINGULAR, beta=2.0)
        phi = viscosity.TestFunction(cone, 0.0, 0.25, SINGULAR, beta=3.0)
        self.assertEqual(phi.regime, 'c2beta')
        self.assertTrue(np.isfinite(phi.norm))

    def testCriticalPointNotIsolated(self):
        with self.assertRaises(InadmissibleTestFunctionError):
            viscosity.TestFunction(AnalyticFunction.constant(1), 0.0, 0.25, SINGULAR, beta=3.0)

    def testBadShape(self):
        with self.assertRaises(InadmissibleTestFunctionError):
            viscosity.TestFunction(parabola(-1.0), 0.0, 0.0, LINEAR)
        with self.assertRaises(InadmissibleTestFunctionError):
            viscosity.TestFunction(parabola(-1.0), 0.0, 0.25, KernelSpec(n=2, s=0.5, p=2))

    def testNegated(self):
        phi = viscosity.TestFunction(parabola(-1.0, c=2.0), 0.0, 0.25, LINEAR).negated()
        self.assertEqual(phi.value_at_x0, -2.0)
        self.assertAlmostEqual(phi.value(0.5), -1.75)


class TestFamilyTest(unittest.TestCase):
    def testSingularFamily(self):
        u = AnalyticFunction.power_of_norm(2.0)
        family, skipped = viscosity.test_family(u, [0.0], SINGULAR)
        self.assertEqual(len(family), 12)
        self.assertEqual(len(skipped), 3)
        self.assertTrue(all(phi.regime == 'c2beta' for phi in family))
        np.testing.assert_allclose(sorted(set(phi.beta for phi in family)), [3.0, 3.1])
        scales = sorted(set(phi.value_at_x0 - float(phi.value(np.array([1.0]))) for phi in family))
        # multiples of the Hessian norm 2
        np.testing.assert_allclose(scales, [2e-4, 2e-3, 2e-2, 2.0, 20.0, 200.0])

    def testRegularFamily(self):
        u = AnalyticFunction.power_of_norm(2.0)
        family, skipped = viscosity.test_family(u, [0.0], LINEAR)
        self.assertEqual(len(family), 3)
        self.assertEqual(skipped, [])


class GluedFunctionTest(unittest.TestCase):
    def testEvaluate(self):
        glued = GluedFunction(parabola(-1.0), AnalyticFunction.singular_example(), [0.0], 0.25)
        np.testing.assert_allclose(glued.evaluate(np.array([[0.1], [0.5], [3.0]])),
                                   [-0.01, 0.25, 1.0])

    def testLatticeValues(self):
        u = GridFunction.sample(lambda x: x[:, 0] ** 2, INTERVAL, H, COLLAR)
        glued = GluedFunction(parabola(-1.0), u, [0.0], 2 * H)
        values = glued.lattice_values()
        changed = np.flatnonzero(values != u.flat)
        np.testing.assert_allclose(np.sort(np.abs(u.points[changed, 0])), [H, H, 2 * H, 2 * H])
        np.testing.assert_allclose(values[changed], -u.points[changed, 0] ** 2)

    def testNeedsRadius(self):
        with self.assertRaises(ValueError):
            GluedFunction(parabola(-1.0), AnalyticFunction.constant(1))


class TouchingTest(unittest.TestCase):
    def setUp(self):
        self.u = AnalyticFunction.singular_example()

    def testTouchesFromBelow(self):
        phi = viscosity.TestFunction(parabola(-1.0), 0.0, 0.25, LINEAR)
        self.assertLessEqual(check_touching(self.u, phi), 0.0)

    def testWrongValue(self):
        phi = viscosity.TestFunction(parabola(-1.0, c=0.1), 0.0, 0.25, LINEAR)
        with self.assertRaises(TouchingError):
            check_touching(self.u, phi)

    def testAbove(self):
        phi = viscosity.TestFunction(parabola(2.0), 0.0, 0.25, LINEAR)
        with self.assertRaises(TouchingError) as cm:
            check_touching(self.u, phi)
        self.assertGreater(cm.exception.excess, 0.0)
        self.assertIsNotNone(cm.exception.witness)


class CheckViscosityTest(unittest.TestCase):
    def setUp(self):
        self.u = AnalyticFunction.singular_example()

    def testSuperFails(self):
        # near ball gives 1/2, the outside -3/2 - 2
        report = check_viscosity_at(self.u, 0.0, parabola(-1.0), LINEAR, radius=0.25)
        self.assertEqual(report.status, 'fail')
        self.assertAlmostEqual(report.value, -3.0, delta=1e-5)
        self.assertEqual(report.side, 'super')

    def testSubPasses(self):
        report = check_viscosity_at(self.u, 0.0, parabola(2.0), LINEAR, side='sub',
                                    radius=0.25)
        self.assertEqual(report.status, 'pass')
        self.assertAlmostEqual(report.value, -4.5, delta=1e-5)

    def testUnknownSide(self):
        with self.assertRaises(ViscosityError):
            check_viscosity_at(self.u, 0.0, parabola(-1.0), LINEAR, side='left')

    def testTouchingPrincipalValue(self):
        phi = AnalyticFunction.quadratic([0.5], [1.0], [[-2.0]], c=0.25)
        report = touching_principal_value(self.u, 0.5, phi, LINEAR)
        direct = pv_evaluate(self.u, 0.5, LINEAR, tol=report.tol, certify=False)
        self.assertEqual(report.verdict, direct.verdict)
        self.assertAlmostEqual(report.value, direct.value, delta=1e-12 * abs(direct.value))


class TruncationTest(unittest.TestCase):
    def setUp(self):
        self.u = GridFunction.sample(lambda x: -np.minimum(x[:, 0] ** 2, 1.0), INTERVAL, H,
                                     COLLAR, ConstantFarField(-1.0))

    def testTruncateMin(self):
        v = GridFunction.sample(lambda x: np.full(len(x), -0.5), INTERVAL, H, COLLAR,
                                ConstantFarField(-0.5))
        w = truncate_min(self.u, v)
        np.testing.assert_array_equal(w.flat, np.minimum(self.u.flat, -0.5))
        np.testing.assert_array_equal(truncate_min(self.u, -0.5).flat, w.flat)
        coarse = GridFunction.sample(lambda x: x[:, 0], INTERVAL, 2 * H, COLLAR)
        with self.assertRaises(ViscosityError):
            truncate_min(self.u, coarse)

    def testLevels(self):
        report = check_truncation(self.u, 0.0, parabola(-2.0), LINEAR, levels=(-0.5, 1.0))
        self.assertEqual(report['truncations'][0]['status'], 'untouched')
        self.assertEqual(report['truncations'][1]['status'], 'pass')
        self.assertTrue(report['all_truncations_pass'])
        self.assertTrue(report['implication_holds'])
        self.assertTrue(report['monotone'])
        self.assertTrue(report['full']['pass'])


class ScanEquivalenceTest(unittest.TestCase):
    @classmethod
    def setUpClass(cls):
        problem = DirichletProblem.from_exterior(LINEAR, INTERVAL, H, COLLAR, SignFarField(1.0))
        cls.solution = solve_dirichlet(problem)

    def testSolutionPasses(self):
        report = scan_equivalence(self.solution, LINEAR, points=[[0.0], [0.25]])
        self.assertEqual(report['nodes'], 2)
        self.assertGreater(report['touchings'], 0)
        self.assertEqual(report['failures'], 0)
        self.assertTrue(report['pass'])

    def testFalseSolutionFails(self):
        bad, node = corrupt(self.solution, seed=1)
        self.assertLessEqual(abs(node[0]), 1 - 3 * H)
        report = scan_equivalence(bad, LINEAR, side='super', points=[node])
        self.assertGreater(report['failures'], 0)
        self.assertFalse(report['pass'])

    def testTouchingValuesNonnegative(self):
        reports = []
        for x0 in self.solution.interior_points[2:12]:
            family, _ = viscosity.test_family(self.solution, x0, LINEAR)
            for phi in family:
                try:
                    reports.append(touching_principal_value(self.solution, x0, phi, LINEAR))
                    break
                except TouchingError:
                    continue
        self.assertEqual(len(reports), 10)
        for report in reports:
            with self.subTest(x0=report.x0):
                self.assertEqual(report.verdict, 'converged')
                self.assertGreaterEqual(report.value, -report.tol)

    def testMapper(self):
        def mapper(cells, action):
            return list(map(action, cells))
        direct = scan_equivalence(self.solution, LINEAR, side='sub', points=[[0.0]])
        mapped = scan_equivalence(self.solution, LINEAR, side='sub', points=[[0.0]],
                                  mapper=mapper)
        self.assertEqual(direct, mapped)

    def testUnknownSide(self):
        with self.assertRaises(ViscosityError):
            scan_equivalence(self.solution, LINEAR, side='left')


class FalseSolutionTest(unittest.TestCase):
    '''1 inside with 0 outside: a supersolution that is not a subsolution.'''
    def setUp(self):
        u = GridFunction.from_exterior(INTERVAL, H, COLLAR, ZeroFarField())
        self.u = u.with_interior(np.ones(len(u.interior_points)))

    def testConesCatchIt(self):
        report = scan_equivalence(self.u, SINGULAR, side='sub', points=[[0.0]])
        self.assertGreater(report['failures'], 0)
        self.assertTrue(scan_equivalence(self.u, SINGULAR, side='super', points=[[0.0]])['pass'])

    def testQuadraticsOnlyPassVacuously(self):
        report = scan_equivalence(self.u, SINGULAR, side='sub', cones=False, points=[[0.0]])
        self.assertEqual(report['touchings'], 0)
        self.assertGreater(report['skipped'], 0)
        self.assertTrue(report['pass'])
