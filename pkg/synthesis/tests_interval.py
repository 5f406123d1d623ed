import random
from fractions import Fraction

from django.test import SimpleTestCase
from hypothesis import given, settings, strategies as st

from synthesis.exceptions import DivisorContainsZero
from synthesis.fixedpoint import FixedPointFormat
from synthesis.interval import (IntervalPoly, RationalInterval, coefficient_interval, family_to_interval_poly,
                                interval_poly_eval, interval_poly_mul, iv_abs, iv_div, iv_mul)
from synthesis.transfer import PlantFamily, TransferFunction

fractions = st.fractions(min_value=-10, max_value=10, max_denominator=1000)


@st.composite
def intervals(draw):
    a, b = draw(fractions), draw(fractions)
    return RationalInterval(min(a, b), max(a, b))


class RationalIntervalTests(SimpleTestCase):
    def test_basic_operations(self):
        a = RationalInterval(1, 2)
        b = RationalInterval(-1, 3)
        self.assertEqual(a + b, RationalInterval(0, 5))
        self.assertEqual(a - b, RationalInterval(-2, 3))
        self.assertEqual(iv_mul(a, b), RationalInterval(-2, 6))
        self.assertEqual(-b, RationalInterval(-3, 1))

    def test_division_by_interval_containing_zero(self):
        with self.assertRaises(DivisorContainsZero):
            iv_div(RationalInterval(1, 2), RationalInterval(-1, 1))

    def test_division(self):
        self.assertEqual(iv_div(RationalInterval(1, 2), RationalInterval(2, 4)),
                         RationalInterval(Fraction(1, 4), 1))

    def test_abs(self):
        self.assertEqual(iv_abs(RationalInterval(-3, 1)), RationalInterval(0, 3))
        self.assertEqual(iv_abs(RationalInterval(-3, -1)), RationalInterval(1, 3))

    def test_empty_interval_is_rejected(self):
        with self.assertRaises(ValueError):
            RationalInterval(2, 1)

    def test_outward_rounding_contains_original(self):
        fmt = FixedPointFormat(4, 4)
        iv = RationalInterval(Fraction(1, 3), Fraction(2, 3))
        out = iv.outward(fmt)
        self.assertTrue(iv.subset_of(out))
        self.assertEqual(out, RationalInterval(Fraction(5, 16), Fraction(11, 16)))

    def test_split(self):
        lo, hi = RationalInterval(0, 1).split()
        self.assertEqual(lo, RationalInterval(0, Fraction(1, 2)))
        self.assertEqual(hi, RationalInterval(Fraction(1, 2), 1))

    @settings(max_examples=300, deadline=None)
    @given(intervals(), intervals(), st.data())
    def test_operations_contain_every_pointwise_result(self, a, b, data):
        x = data.draw(st.fractions(min_value=a.lo, max_value=a.hi))
        y = data.draw(st.fractions(min_value=b.lo, max_value=b.hi))
        self.assertTrue((a + b).contains(x + y))
        self.assertTrue((a - b).contains(x - y))
        self.assertTrue((a * b).contains(x * y))
        if not b.contains_zero():
            self.assertTrue((a / b).contains(x / y))

    @settings(max_examples=200, deadline=None)
    @given(intervals(), intervals())
    def test_multiplication_is_the_exact_hull(self, a, b):
        corners = [a.lo * b.lo, a.lo * b.hi, a.hi * b.lo, a.hi * b.hi]
        self.assertEqual(a * b, RationalInterval(min(corners), max(corners)))


class IntervalPolyTests(SimpleTestCase):
    def test_multiply_and_evaluate(self):
        p = IntervalPoly((RationalInterval(1, 1), RationalInterval(-1, 1)))
        q = IntervalPoly.from_points([1, 2])
        product = interval_poly_mul(p, q)
        self.assertEqual(product.degree, 2)
        self.assertEqual(product.coeffs[0], RationalInterval.point(1))
        self.assertTrue(interval_poly_eval(p, 1).contains(Fraction(1, 2)))

    def test_contains_poly(self):
        p = IntervalPoly((RationalInterval(0, 2), RationalInterval(-1, 1)))
        self.assertTrue(p.contains_poly([1, 0]))
        self.assertTrue(p.contains_poly([0]))
        self.assertFalse(p.contains_poly([3, 0]))

    def test_coefficient_interval(self):
        fmt = FixedPointFormat(16, 24)
        iv = coefficient_interval(Fraction(1, 2), Fraction(1, 10), fmt)
        self.assertEqual(iv.lo, Fraction(1, 2) - Fraction(1, 10) - fmt.step)
        self.assertEqual(iv.hi, Fraction(1, 2) + Fraction(1, 10) + fmt.step)


class FamilyEnclosureTests(SimpleTestCase):
    def test_cruise_family_enclosure(self):
        fmt = FixedPointFormat(16, 24)
        plant = TransferFunction.from_coeffs(["0.0264"], [1, "-0.9998"])
        family = PlantFamily(plant, ("0.5", "0.5", "0.5"), fmt)
        num, den = family_to_interval_poly(family)
        self.assertEqual(num.coeffs[0].lo, Fraction("-0.4736") - fmt.step)
        self.assertEqual(den.coeffs[1].hi, Fraction("-0.4998") + fmt.step)
        bare_num, _ = family_to_interval_poly(family, inflate=False)
        self.assertEqual(bare_num.coeffs[0], RationalInterval(Fraction("-0.4736"), Fraction("0.5264")))

    def test_random_family_members_are_enclosed(self):
        rng = random.Random(7)
        fmt = FixedPointFormat(8, 12)
        for _ in range(200):
            num = [Fraction(rng.randint(-2000, 2000), 1000) for _ in range(rng.randint(1, 3))]
            den = [Fraction(1)] + [Fraction(rng.randint(-2000, 2000), 1000) for _ in range(2)]
            delta = [Fraction(rng.randint(0, 500), 1000) for _ in range(len(num) + len(den))]
            family = PlantFamily(TransferFunction.from_coeffs(num, den), delta, fmt)
            inum, iden = family_to_interval_poly(family)
            member = [c + d * Fraction(rng.randint(-100, 100), 100) for c, d in zip(num + den, delta)]
            self.assertTrue(inum.contains_poly(member[:len(num)]))
            self.assertTrue(iden.contains_poly(member[len(num):]))
