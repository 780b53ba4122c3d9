
import tempfile
import unittest

import numpy as np

from pathlib import Path

from fracplap.space import AnalyticFunction
from fracplap.space import ConstantFarField
from fracplap.space import DomainSpec
from fracplap.space import FarField
from fracplap.space import FunctionSpaceError
from fracplap.space import GridFunction
from fracplap.space import NotInTailSpaceError
from fracplap.space import PowerFarField
from fracplap.space import SignFarField
from fracplap.space import ZeroFarField
from fracplap.space import check_tailspace_membership
from fracplap.space import gagliardo_seminorm
from fracplap.space import read_grid
from fracplap.space import tail
from fracplap.space import write_grid


INTERVAL = DomainSpec.interval(-1.0, 1.0)
H = 0.125
COLLAR = 3.0


def grid(f, far_field=None, domain=INTERVAL, h=H, collar=COLLAR):
    return GridFunction.sample(f, domain, h, collar, far_field)


class DomainTest(unittest.TestCase):
    def testEmptyInterior(self):
        with self.assertRaises(FunctionSpaceError):
            DomainSpec.interval(1.0, 1.0)
        with self.assertRaises(FunctionSpaceError):
            DomainSpec.ball([0.0, 0.0], 0.0)

    def testFromConfig(self):
        box = DomainSpec.from_config({'type': 'box', 'lo': [-1, -1], 'hi': [1, 1]})
        self.assertEqual(box.n, 2)
        np.testing.assert_allclose(box.center, [0.0, 0.0])
        self.assertEqual(DomainSpec.from_config(box.to_dict()), box)

    def testDistance(self):
        self.assertAlmostEqual(INTERVAL.distance_to_boundary(0.25), 0.75)
        ball = DomainSpec.ball([0.0, 0.0], 2.0)
        self.assertAlmostEqual(ball.distance_to_boundary([1.0, 0.0]), 1.0)

    def testSubbox(self):
        self.assertEqual(INTERVAL.subbox(-0.5, 0.5), DomainSpec.interval(-0.5, 0.5))
        with self.assertRaises(FunctionSpaceError):
            INTERVAL.subbox(-0.5, 1.5)


class GridFunctionTest(unittest.TestCase):
    def testCollarCoverage(self):
        with self.assertRaises(FunctionSpaceError):
            grid(lambda x: x[:, 0], collar=1.0)

    def testNonFinite(self):
        u = grid(lambda x: x[:, 0])
        values = u.flat.copy()
        values[3] = np.nan
        with self.assertRaises(FunctionSpaceError):
            u.with_values(values)

    def testInteriorAndExterior(self):
        u = grid(lambda x: x[:, 0])
        self.assertEqual(len(u.interior_points), 15)
        self.assertFalse(np.any(u.interior & u.exterior))
        np.testing.assert_allclose(u.interior_values, u.interior_points[:, 0])

    def testShifted(self):
        u = grid(lambda x: np.zeros(len(x)), ConstantFarField(1.0)).shifted(2.0)
        self.assertEqual(u.far_field, ConstantFarField(3.0))
        np.testing.assert_array_equal(u.flat, 2.0)

    def testEvaluateFarField(self):
        u = grid(lambda x: np.zeros(len(x)), SignFarField(1.0))
        self.assertEqual(u.evaluate(10.0), 1.0)
        self.assertEqual(u.evaluate(-10.0), -1.0)

    def testNodeIndex(self):
        u = grid(lambda x: x[:, 0] ** 2)
        self.assertAlmostEqual(u.value_at(0.5), 0.25)
        with self.assertRaises(FunctionSpaceError):
            u.node_index(0.01)

    def testLocalJet(self):
        u = grid(lambda x: 1 + 2 * x[:, 0] + 1.5 * x[:, 0] ** 2)
        gradient, hessian = u.local_jet(u.node_index(0.0))
        self.assertAlmostEqual(gradient[0], 2.0)
        self.assertAlmostEqual(hessian[0, 0], 3.0)

    def testRoundTrip(self):
        testdir = tempfile.TemporaryDirectory()
        self.addCleanup(testdir.cleanup)
        u = grid(lambda x: np.sin(3 * x[:, 0]) / 7, PowerFarField(0.3, 0.5))
        path = Path(testdir.name) / 'u.csv'
        write_grid(path, u)
        v = read_grid(path)
        np.testing.assert_array_equal(u.values, v.values)
        self.assertEqual(u.far_field, v.far_field)
        self.assertEqual(u.header(), v.header())

    def testMissingHeader(self):
        testdir = tempfile.TemporaryDirectory()
        self.addCleanup(testdir.cleanup)
        path = Path(testdir.name) / 'u.csv'
        path.write_text('x,value\n0.0,0.0\n')
        with self.assertRaises(FunctionSpaceError):
            read_grid(path)


class SeminormTest(unittest.TestCase):
    def testConstant(self):
        u = grid(lambda x: np.full(len(x), 4.0))
        self.assertEqual(gagliardo_seminorm(u, INTERVAL, 0.3, 2), 0.0)

    def testShiftInvariant(self):
        u = grid(lambda x: x[:, 0])
        self.assertAlmostEqual(gagliardo_seminorm(u, INTERVAL, 0.3, 2),
                               gagliardo_seminorm(u.shifted(5.0), INTERVAL, 0.3, 2),
                               places=10)

    def testHomogeneous(self):
        u = grid(lambda x: x[:, 0] ** 3)
        base = gagliardo_seminorm(u, INTERVAL, 0.4, 1.5)
        scaled = gagliardo_seminorm(u.scaled(-3.0), INTERVAL, 0.4, 1.5)
        self.assertLess(abs(scaled - 3 * base) / (3 * base), 1e-12)

    def testRefinement(self):
        unit = DomainSpec.interval(0.0, 1.0)
        values = [gagliardo_seminorm(grid(lambda x: x[:, 0], domain=unit, h=2.0 ** -k),
                                     unit, 0.3, 2) for k in (4, 5, 6)]
        self.assertLess(abs(values[2] - values[1]), abs(values[1] - values[0]))


class TailTest(unittest.TestCase):
    def testZero(self):
        u = grid(lambda x: np.zeros(len(x)), ZeroFarField())
        self.assertEqual(tail(u, 0.0, 0.5, 0.5, 2), 0.0)

    def testConstantOne(self):
        u = grid(lambda x: np.ones(len(x)), ConstantFarField(1.0))
        for z, r in [(0.0, 0.5), (0.25, 0.3), (-0.5, 1.0)]:
            with self.subTest(z=z, r=r):
                self.assertAlmostEqual(tail(u, z, r, 0.5, 2), 2.0, places=8)

    def testMonotone(self):
        small = grid(lambda x: 0.5 * np.cos(x[:, 0]), ConstantFarField(0.5))
        large = grid(lambda x: np.ones(len(x)), ConstantFarField(1.0))
        self.assertLessEqual(tail(small, 0.0, 0.5, 0.5, 1.5), tail(large, 0.0, 0.5, 0.5, 1.5))

    def testNotInTailSpace(self):
        s, p = 0.5, 2.0
        u = grid(lambda x: np.zeros(len(x)), PowerFarField(1.0, s * p / (p - 1)))
        with self.assertRaises(NotInTailSpaceError):
            tail(u, 0.0, 0.5, s, p)

    def testBadRadius(self):
        u = grid(lambda x: np.zeros(len(x)))
        with self.assertRaises(FunctionSpaceError):
            tail(u, 0.0, 0.0, 0.5, 2)


class MembershipTest(unittest.TestCase):
    def testModels(self):
        s, p = 0.5, 1.5
        marginal = s * p / (p - 1)
        u = grid(lambda x: np.zeros(len(x)), ConstantFarField(2.0))
        self.assertTrue(check_tailspace_membership(u, s, p)['member'])
        u = grid(lambda x: np.zeros(len(x)), PowerFarField(1.0, 0.9 * marginal))
        self.assertTrue(check_tailspace_membership(u, s, p)['member'])
        u = grid(lambda x: np.zeros(len(x)), PowerFarField(1.0, 1.1 * marginal))
        report = check_tailspace_membership(u, s, p)
        self.assertFalse(report['member'])
        self.assertAlmostEqual(report['marginal_exponent'], marginal)

    def testFromConfig(self):
        field = FarField.from_config({'type': 'power', 'amplitude': 2.0, 'gamma': 0.25})
        self.assertEqual(field, PowerFarField(2.0, 0.25))
        with self.assertRaises(FunctionSpaceError):
            FarField.from_config({'type': 'wobbly'})


class AnalyticFunctionTest(unittest.TestCase):
    def testFiniteDifferences(self):
        rng = np.random.default_rng(0)
        points = rng.uniform(-0.9, 0.9, (20, 2))
        for u in [AnalyticFunction.quadratic([0.1, 0.2], [1.0, -1.0], [[2.0, 0.5], [0.5, 1.0]]),
                  AnalyticFunction.bump([0.0, 0.0], 1.5),
                  AnalyticFunction.power_of_norm(3.0, [2.0, 2.0])]:
            with self.subTest(u=u):
                errors = u.finite_difference_check(points)
                self.assertLess(errors['gradient'], 1e-6)
                self.assertLess(errors['hessian'], 1e-5)

    def testCriticalPoints(self):
        u = AnalyticFunction.power_of_norm(2.5, n=1)
        self.assertTrue(u.is_isolated_critical(0.0))
        self.assertFalse(AnalyticFunction.constant(1).is_isolated_critical(0.0))

    def testSingularExample(self):
        u = AnalyticFunction.singular_example()
        np.testing.assert_allclose(u.value(np.array([[0.5], [2.0]])), [0.25, 1.0])
        self.assertEqual(u.far_field, ConstantFarField(1.0))
