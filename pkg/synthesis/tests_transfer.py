from fractions import Fraction

from django.test import SimpleTestCase
from hypothesis import given, settings, strategies as st

from synthesis.exceptions import DegenerateCharPoly
from synthesis.fixedpoint import FixedPointFormat
from synthesis.transfer import (Controller, PlantFamily, Poly, TransferFunction, cancellation_on_or_outside_unit_circle,
                                char_poly, family_char_poly, pack_coefficients, poly_add, poly_mul,
                                unpack_coefficients)

Q4_16 = FixedPointFormat(4, 16)
CRUISE = TransferFunction.from_coeffs(["0.0264"], [1, "-0.9998"])

coefficients = st.lists(st.fractions(min_value=-5, max_value=5, max_denominator=100), min_size=1, max_size=4)


def quantized_controller():
    return Controller.from_values(["2.72", "-4.153", "1.896"], [1, "-1.843994140625", "0.8496"], Q4_16)


class PolyTests(SimpleTestCase):
    def test_add_aligns_lower_powers(self):
        self.assertEqual(poly_add(Poly((1, 2, 3)), Poly((1,))).coeffs, (1, 2, 4))

    def test_mul(self):
        self.assertEqual(poly_mul(Poly((1, -1)), Poly((1, 1))).coeffs, (1, 0, -1))

    def test_normalize_strips_leading_zeros(self):
        p = Poly((0, 0, 2, 1)).normalize()
        self.assertEqual(p.coeffs, (2, 1))
        self.assertEqual(p.degree, 1)

    def test_exact_evaluation(self):
        self.assertEqual(Poly((1, 0, -2)).evaluate(Fraction(1, 2)), Fraction(-7, 4))

    @settings(max_examples=100, deadline=None)
    @given(coefficients, coefficients, st.fractions(min_value=-2, max_value=2, max_denominator=50))
    def test_product_evaluates_to_product_of_values(self, a, b, z):
        p, q = Poly(tuple(a)), Poly(tuple(b))
        self.assertEqual(poly_mul(p, q).evaluate(z), p.evaluate(z) * q.evaluate(z))
        self.assertEqual(poly_add(p, q).evaluate(z), p.evaluate(z) + q.evaluate(z))


class TransferFunctionTests(SimpleTestCase):
    def test_pack_and_unpack(self):
        vector = pack_coefficients(CRUISE)
        self.assertEqual(vector, (Fraction("0.0264"), 1, Fraction("-0.9998")))
        self.assertEqual(unpack_coefficients(vector, 1), CRUISE)

    def test_order_and_properness(self):
        self.assertEqual(CRUISE.order, (0, 1))
        self.assertTrue(CRUISE.is_proper())
        self.assertFalse(TransferFunction.from_coeffs([1, 0, 0], [1, 0]).is_proper())

    def test_poles(self):
        self.assertAlmostEqual(CRUISE.poles()[0].real, 0.9998)

    def test_zero_denominator_rejected(self):
        with self.assertRaises(ValueError):
            TransferFunction.from_coeffs([1], [0, 0])


class PlantFamilyTests(SimpleTestCase):
    def test_delta_length_and_sign(self):
        with self.assertRaises(ValueError):
            PlantFamily(CRUISE, (0, 0))
        with self.assertRaises(ValueError):
            PlantFamily(CRUISE, (0, -1, 0))

    def test_vertices(self):
        family = PlantFamily(CRUISE, ("0.5", 0, "0.5"))
        vertices = list(family.vertices())
        self.assertEqual(len(vertices), 4)
        for plant in vertices:
            self.assertTrue(family.contains(plant, inflate=False))

    def test_point_family_has_one_vertex(self):
        self.assertEqual(list(PlantFamily.point(CRUISE).vertices()), [CRUISE])

    def test_grid_box_lies_on_plant_grid(self):
        fmt = FixedPointFormat(16, 24)
        family = PlantFamily(CRUISE, ("0.5", "0.5", "0.5"), fmt)
        for iv, outer in zip(family.grid_box(), family.box()):
            self.assertEqual((iv.lo * fmt.scale).denominator, 1)
            self.assertEqual((iv.hi * fmt.scale).denominator, 1)
            self.assertTrue(iv.subset_of(outer))

    def test_grid_box_snaps_inward(self):
        fmt = FixedPointFormat(4, 2)
        family = PlantFamily(TransferFunction.from_coeffs(["0.3"], [1, "0.3"]), ("0.1", "0", "0.2"), fmt)
        num, lead, tail = family.grid_box()
        self.assertEqual((num.lo, num.hi), (Fraction(1, 4), Fraction(1, 4)))
        self.assertEqual((lead.lo, lead.hi), (1, 1))
        self.assertEqual((tail.lo, tail.hi), (Fraction(1, 4), Fraction(1, 2)))


class CharPolyTests(SimpleTestCase):
    def test_quantized_controller_with_cruise_plant(self):
        S = char_poly(quantized_controller(), CRUISE)
        self.assertEqual(S.degree, 3)
        c = quantized_controller()
        expected = poly_add(poly_mul(c.num_poly, CRUISE.num), poly_mul(c.den_poly, CRUISE.den))
        self.assertEqual(S, expected)
        self.assertAlmostEqual(float(S.coeffs[1]), -2.77198651123, places=8)

    def test_zero_controller_degenerates(self):
        with self.assertRaises(DegenerateCharPoly):
            char_poly(Controller.zero((2, 2), Q4_16), CRUISE)

    def test_fixed_point_path_stays_close_to_exact(self):
        fmt = FixedPointFormat(16, 24)
        exact = char_poly(quantized_controller(), CRUISE)
        fast = char_poly(quantized_controller(), CRUISE, fmt)
        for a, b in zip(exact.coeffs, fast.coeffs):
            self.assertLess(abs(a - b), 16 * fmt.step)

    def test_family_char_poly_encloses_members(self):
        fmt = FixedPointFormat(16, 24)
        family = PlantFamily(CRUISE, ("0.01", "0", "0.01"), fmt)
        S = family_char_poly(quantized_controller(), family)
        for plant in family.vertices():
            self.assertTrue(S.contains_poly(char_poly(quantized_controller(), plant).coeffs))


class CancellationTests(SimpleTestCase):
    def test_unstable_cancellation_is_detected(self):
        # C has a zero at z = 2, G a pole there
        controller = TransferFunction.from_coeffs([1, -2], [1, 0])
        plant = TransferFunction.from_coeffs([1], [1, -2])
        self.assertTrue(cancellation_on_or_outside_unit_circle(controller, plant))

    def test_stable_cancellation_is_allowed(self):
        controller = TransferFunction.from_coeffs([1, "-0.5"], [1, 0])
        plant = TransferFunction.from_coeffs([1], [1, "-0.5"])
        self.assertFalse(cancellation_on_or_outside_unit_circle(controller, plant))

    def test_cruise_loop_has_no_cancellation(self):
        self.assertFalse(cancellation_on_or_outside_unit_circle(quantized_controller(), CRUISE))
