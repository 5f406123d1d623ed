import random
from fractions import Fraction

import numpy as np
from django.test import SimpleTestCase

from synthesis.cegis import sample_family
from synthesis.exceptions import DegenerateCharPoly
from synthesis.fixedpoint import FixedPointFormat
from synthesis.interval import IntervalPoly, RationalInterval
from synthesis.stability import Condition, JuryStatus, jury_stable, jury_stable_interval, root_oracle
from synthesis.transfer import (Controller, PlantFamily, Poly, TransferFunction, char_poly, family_char_poly,
                                poly_add, poly_mul)

Q4_16 = FixedPointFormat(4, 16)
CRUISE = TransferFunction.from_coeffs(["0.0264"], [1, "-0.9998"])


def poly(*coeffs):
    return Poly(tuple(Fraction(str(c)) for c in coeffs))


class JuryTests(SimpleTestCase):
    def test_quantized_controller_loop_is_unstable(self):
        controller = Controller.from_values(["2.72", "-4.153", "1.896"], [1, "-1.843994140625", "0.8496"], Q4_16)
        S = char_poly(controller, CRUISE)
        verdict = jury_stable(S)
        self.assertEqual(verdict.status, JuryStatus.UNSTABLE)
        self.assertGreater(root_oracle(S), 1)
        self.assertAlmostEqual(root_oracle(S), 1.03799, places=4)

    def test_unquantized_controller_loop_is_unstable_too(self):
        num, den = poly(2.72, -4.153, 1.896), poly(1, -1.844, 0.8496)
        S = poly_add(poly_mul(num, CRUISE.num), poly_mul(den, CRUISE.den))
        self.assertGreater(root_oracle(S), 1)
        self.assertFalse(jury_stable(S).stable)

    def test_final_controller_loop_is_stable(self):
        controller = Controller.from_values(["11.035202", "5.846100", "4.901855"],
                                            ["1.097901", "0.063110", "0.128357"], Q4_16)
        S = char_poly(controller, CRUISE)
        self.assertTrue(jury_stable(S).stable)
        self.assertAlmostEqual(root_oracle(S), 0.4509, places=3)

    def test_controller_denominator_roots(self):
        self.assertAlmostEqual(root_oracle(poly(1, -1.844, 0.8496)), 0.944, places=6)

    def test_simple_cases(self):
        self.assertTrue(jury_stable(poly(1, -0.5)).stable)
        self.assertFalse(jury_stable(poly(1, -2)).stable)
        self.assertTrue(jury_stable(poly(3)).stable)
        # root on the unit circle is not strictly inside
        self.assertFalse(jury_stable(poly(1, -1)).stable)
        self.assertFalse(jury_stable(poly(1, 0, 1)).stable)

    def test_negative_leading_coefficient_is_normalized(self):
        self.assertTrue(jury_stable(poly(-1, 0.5)).stable)

    def test_violated_condition(self):
        self.assertEqual(jury_stable(poly(1, -2)).violated, Condition.R1)
        self.assertEqual(jury_stable(poly(1, 2)).violated, Condition.R2)
        self.assertEqual(jury_stable(poly(1, 0, 0, 0.5, 2)).violated, Condition.R3)

    def test_mirrored_r3_form(self):
        # |a_N| - |a_0| > 0 rejects every monic polynomial with |a_N| < 1
        self.assertTrue(jury_stable(poly(1, -0.5)).stable)
        self.assertEqual(jury_stable(poly(1, -0.5), mirrored_r3=True).violated, Condition.R3)
        S = IntervalPoly.from_points([1, Fraction(-1, 2)])
        self.assertEqual(jury_stable_interval(S, mirrored_r3=True).status, JuryStatus.UNSTABLE)

    def test_zero_polynomial(self):
        with self.assertRaises(DegenerateCharPoly):
            jury_stable(poly(0, 0))

    def test_table_has_two_rows_per_reduction(self):
        verdict = jury_stable(poly(1, -0.5, 0.2, 0.1, 0.05))
        self.assertEqual(len(verdict.table.rows), 2 * 4 - 2)

    def test_agrees_with_root_oracle(self):
        rng = random.Random(2024)
        checked = 0
        while checked < 10_000:
            degree = rng.randint(1, 6)
            coeffs = [Fraction(rng.randint(-2000, 2000), 1000) for _ in range(degree + 1)]
            if coeffs[0] == 0:
                continue
            radius = root_oracle(Poly(tuple(coeffs)))
            if abs(radius - 1) < 1e-4:
                continue
            self.assertEqual(jury_stable(Poly(tuple(coeffs))).stable, radius < 1, coeffs)
            checked += 1


class IntervalJuryTests(SimpleTestCase):
    def test_point_intervals_match_exact_test(self):
        rng = random.Random(11)
        for _ in range(500):
            coeffs = [Fraction(1)] + [Fraction(rng.randint(-1500, 1500), 1000) for _ in range(rng.randint(1, 4))]
            exact = jury_stable(Poly(tuple(coeffs)))
            interval = jury_stable_interval(IntervalPoly.from_points(coeffs))
            self.assertEqual(interval.status, exact.status)

    def test_leading_interval_containing_zero_is_unknown(self):
        S = IntervalPoly((RationalInterval(-1, 1), RationalInterval.point(Fraction(1, 2))))
        self.assertEqual(jury_stable_interval(S).status, JuryStatus.UNKNOWN)

    def test_straddling_box_is_unknown(self):
        S = IntervalPoly((RationalInterval.point(1), RationalInterval(Fraction(-3, 2), Fraction(-1, 2))))
        self.assertEqual(jury_stable_interval(S).status, JuryStatus.UNKNOWN)

    def test_wholly_unstable_box(self):
        S = IntervalPoly((RationalInterval.point(1), RationalInterval(-3, -2)))
        self.assertEqual(jury_stable_interval(S).status, JuryStatus.UNSTABLE)

    def test_stable_family_members_pass_root_oracle(self):
        rng = random.Random(5)
        fmt = FixedPointFormat(16, 24)
        stable_families = 0
        for _ in range(1000):
            order = rng.randint(1, 3)
            den = [Fraction(1)] + [Fraction(rng.randint(-900, 900), 1000) for _ in range(order)]
            num = [Fraction(rng.randint(-500, 500), 1000) for _ in range(rng.randint(1, order))]
            delta = [Fraction(rng.randint(0, 5000), 10000) for _ in range(len(num) + len(den))]
            family = PlantFamily(TransferFunction.from_coeffs(num, den), delta, fmt)
            controller_order = rng.randint(0, 1)
            controller = Controller.from_values(
                [Fraction(rng.randint(-1000, 1000), 1000) for _ in range(rng.randint(0, controller_order) + 1)],
                [1] + [Fraction(rng.randint(-500, 500), 1000) for _ in range(controller_order)],
                FixedPointFormat(4, 16))
            try:
                verdict = jury_stable_interval(family_char_poly(controller, family))
            except DegenerateCharPoly:
                continue
            if not verdict.stable:
                continue
            stable_families += 1
            vertex_count = len(list(family.vertices()))
            members = sample_family(family, fmt, max(100, vertex_count), rng)
            self.assertEqual(members[:vertex_count], list(family.vertices()))
            for plant in members:
                self.assertTrue(family.contains(plant, inflate=False))
                self.assertLess(root_oracle(char_poly(controller, plant)), 1)
        self.assertGreater(stable_families, 0)

    def test_oracle_matches_numpy(self):
        S = poly(1, -0.5, 0.06)
        self.assertAlmostEqual(root_oracle(S), float(np.max(np.abs(np.roots([1, -0.5, 0.06])))))
