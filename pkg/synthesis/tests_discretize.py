import math
import random
from fractions import Fraction

import mpmath
from django.test import SimpleTestCase

from synthesis.discretize import ContinuousTF, matrix_exp, mpf_to_fraction, snap_to_rational, zoh_discretize
from synthesis.exceptions import ImproperTransferFunction, NonpositiveSampleTime
from synthesis.transfer import Poly, poly_mul


def first_order(T):
    return ContinuousTF(Poly((1,)), Poly((1, 1)), Fraction(T))


class ZeroOrderHoldTests(SimpleTestCase):
    def test_first_order_lag_matches_closed_form(self):
        for T in ("0.1", "0.2", "1.0"):
            g = zoh_discretize(first_order(T)).normalize()
            a = math.exp(-float(Fraction(T)))
            self.assertEqual(len(g.num.coeffs), 1)
            self.assertAlmostEqual(float(g.num.coeffs[0]), 1 - a, delta=1e-9)
            self.assertEqual(g.den.coeffs[0], 1)
            self.assertAlmostEqual(float(g.den.coeffs[1]), -a, delta=1e-9)
            self.assertLess(g.den.coeffs[1], 0)

    def test_integrator(self):
        g = zoh_discretize(ContinuousTF(Poly((1,)), Poly((1, 0)), Fraction(1, 5))).normalize()
        self.assertEqual(g.num.coeffs, (Fraction(1, 5),))
        self.assertEqual(g.den.coeffs, (1, -1))

    def test_static_gain(self):
        g = zoh_discretize(ContinuousTF(Poly((3,)), Poly((2,)), Fraction(1, 10)))
        self.assertEqual(g.evaluate(Fraction(1)), Fraction(3, 2))

    def test_biproper_plant_keeps_dc_gain(self):
        g = zoh_discretize(ContinuousTF(Poly((1, 2)), Poly((1, 1)), Fraction(1, 10)))
        self.assertAlmostEqual(float(g.evaluate(Fraction(1))), 2.0, places=9)

    def test_random_stable_plants(self):
        rng = random.Random(3)
        for _ in range(100):
            order = rng.randint(1, 3)
            poles = [Fraction(-k, 10) for k in rng.sample(range(2, 31), order)]
            den = Poly((1,))
            for p in poles:
                den = poly_mul(den, Poly((1, -p)))
            num = Poly(tuple(Fraction(rng.randint(-20, 20), 10) for _ in range(rng.randint(1, order))))
            if num.is_zero():
                num = Poly((1,))
            T = Fraction(rng.choice([1, 2, 5]), 10)
            g = zoh_discretize(ContinuousTF(num, den, T))

            dc_continuous = float(num.evaluate(Fraction(0)) / den.evaluate(Fraction(0)))
            dc_discrete = float(g.num.evaluate(Fraction(1)) / g.den.evaluate(Fraction(1)))
            self.assertAlmostEqual(dc_discrete, dc_continuous, delta=1e-9 * max(1.0, abs(dc_continuous)))

            expected = sorted(math.exp(float(p * T)) for p in poles)
            mapped = sorted(z.real for z in g.poles())
            for e, m in zip(expected, mapped):
                self.assertAlmostEqual(m, e, delta=1e-9)

    def test_continuous_poles(self):
        g = ContinuousTF(Poly((1,)), Poly((1, 3, 2)), Fraction(1, 10))
        low, high = sorted(p.real for p in g.poles())
        self.assertAlmostEqual(low, -2.0)
        self.assertAlmostEqual(high, -1.0)
        self.assertEqual(len(ContinuousTF(Poly((1,)), Poly((2,)), Fraction(1, 10)).poles()), 0)

    def test_errors(self):
        with self.assertRaises(NonpositiveSampleTime):
            zoh_discretize(first_order(0))
        with self.assertRaises(ImproperTransferFunction):
            zoh_discretize(ContinuousTF(Poly((1, 0, 0)), Poly((1, 1)), Fraction(1, 10)))

    def test_nyquist_warning(self):
        with self.assertLogs('synthesis.discretize', level='WARNING'):
            zoh_discretize(ContinuousTF(Poly((100,)), Poly((1, 100)), Fraction(1, 10)))


class HelperTests(SimpleTestCase):
    def test_matrix_exp_of_nilpotent_matrix(self):
        E = matrix_exp(mpmath.matrix([[0, 1], [0, 0]]), 3)
        self.assertAlmostEqual(float(E[0, 0]), 1.0)
        self.assertAlmostEqual(float(E[0, 1]), 3.0)
        self.assertAlmostEqual(float(E[1, 0]), 0.0)

    def test_matrix_exp_rejects_non_square(self):
        with self.assertRaises(ValueError):
            matrix_exp(mpmath.matrix([[1, 2, 3], [4, 5, 6]]))

    def test_snap_to_rational(self):
        self.assertEqual(snap_to_rational(mpmath.mpf(1) / 5), Fraction(1, 5))
        self.assertEqual(snap_to_rational(mpmath.mpf('0.9998')), Fraction(4999, 5000))
        self.assertEqual(snap_to_rational(-mpmath.mpf(3) / 4), Fraction(-3, 4))
        self.assertEqual(snap_to_rational(mpmath.mpf('-0.9998')), Fraction(-4999, 5000))

    def test_mpf_to_fraction_keeps_the_sign(self):
        self.assertEqual(mpf_to_fraction(mpmath.mpf(-0.75)), Fraction(-3, 4))
        self.assertEqual(mpf_to_fraction(mpmath.mpf(6)), Fraction(6))
        self.assertEqual(mpf_to_fraction(mpmath.mpf(0)), 0)
        with self.assertRaises(ValueError):
            mpf_to_fraction(mpmath.inf)
