from decimal import Decimal
from fractions import Fraction

from django.test import SimpleTestCase
from hypothesis import given, settings, strategies as st

from synthesis.exceptions import FixedPointDivisionByZero, FixedPointOverflow
from synthesis.fixedpoint import (FixedPointFormat, FixedPointValue, RoundingMode, fp_add, fp_div, fp_mul,
                                  fp_sub, grid_values, quantize, quantize_nearest, quantize_poly,
                                  quantize_truncate)

Q4_16 = FixedPointFormat(4, 16)


class FixedPointFormatTests(SimpleTestCase):
    def test_parse_and_render(self):
        fmt = FixedPointFormat.parse("4,16")
        self.assertEqual(fmt, Q4_16)
        self.assertEqual(FixedPointFormat.parse("<20,28>"), FixedPointFormat(20, 28))
        self.assertEqual(str(fmt), "<4,16>")

    def test_invalid_formats(self):
        with self.assertRaises(ValueError):
            FixedPointFormat(0, 8)
        with self.assertRaises(ValueError):
            FixedPointFormat(4, -1)
        with self.assertRaises(ValueError):
            FixedPointFormat(40, 40)
        with self.assertRaises(ValueError):
            FixedPointFormat.parse("4")

    def test_grid_and_range(self):
        self.assertEqual(Q4_16.step, Fraction(1, 65536))
        self.assertEqual(Q4_16.bound, 16)
        self.assertTrue(Q4_16.contains(Fraction(-159999, 10000)))
        self.assertFalse(Q4_16.contains(16))

    def test_widen_and_covers(self):
        wider = FixedPointFormat(16, 24).widen(4, 4)
        self.assertEqual(wider, FixedPointFormat(20, 28))
        self.assertTrue(FixedPointFormat(32, 32).covers(wider))
        self.assertFalse(FixedPointFormat(32, 32).covers(wider.widen(16, 0)))


class QuantizeTests(SimpleTestCase):
    def test_quantized_numerator_is_bit_exact(self):
        values = quantize_poly(["2.72", "-4.153", "1.896"], Q4_16, RoundingMode.TRUNCATE)
        self.assertEqual([v.to_decimal() for v in values],
                         ["2.7199859619140625", "-4.1529998779296875", "1.89599609375"])
        self.assertEqual(values[0].raw, 178257)
        self.assertEqual(values[2].raw, 124256)

    def test_nearest_rounds_up_where_truncation_does_not(self):
        self.assertEqual(quantize_nearest("2.72", Q4_16).raw, 178258)
        self.assertEqual(quantize_truncate("2.72", Q4_16).raw, 178257)
        self.assertEqual(quantize_nearest("1.896", Q4_16).raw, 124256)

    def test_denominator_value_differs_from_both_modes(self):
        self.assertEqual(quantize_truncate("1.844", Q4_16).value, Fraction("1.84423828125"))
        self.assertEqual(quantize_truncate("1.844", Q4_16).raw, 120864)
        printed = FixedPointValue(120848, Q4_16)
        self.assertEqual(printed.to_decimal(), "1.843994140625")
        self.assertNotEqual(quantize_nearest("1.844", Q4_16), printed)
        self.assertEqual(quantize_truncate("0.8496", Q4_16).to_decimal(), "0.8495941162109375")

    def test_ties_round_away_from_zero(self):
        fmt = FixedPointFormat(4, 1)
        self.assertEqual(quantize_nearest(Fraction(1, 4), fmt).raw, 1)
        self.assertEqual(quantize_nearest(Fraction(-1, 4), fmt).raw, -1)

    def test_truncation_goes_toward_zero(self):
        fmt = FixedPointFormat(4, 2)
        self.assertEqual(quantize_truncate(Fraction(-3, 10), fmt).raw, -1)
        self.assertEqual(quantize_truncate(Fraction(3, 10), fmt).raw, 1)

    def test_overflow(self):
        with self.assertRaises(FixedPointOverflow):
            quantize_truncate(16, Q4_16)
        with self.assertRaises(FixedPointOverflow):
            FixedPointValue(1 << 20, Q4_16)

    def test_quantize_dispatch(self):
        self.assertEqual(quantize("2.72", Q4_16, "nearest").raw, 178258)
        self.assertEqual(quantize(Decimal("2.72"), Q4_16).raw, 178257)

    def test_grid_values_of_tiny_format(self):
        values = grid_values(FixedPointFormat(1, 0))
        self.assertEqual([v.raw for v in values], [-1, 0, 1])


class ArithmeticTests(SimpleTestCase):
    def test_product_is_truncated(self):
        a = quantize_truncate("2.72", Q4_16)
        b = quantize_truncate("-0.5", Q4_16)
        product = fp_mul(a, b)
        self.assertEqual(product.raw, int(Fraction(178257 * -32768, 65536)))

    def test_division(self):
        one = FixedPointValue(65536, Q4_16)
        three = FixedPointValue(3 * 65536, Q4_16)
        self.assertEqual(fp_div(one, three).raw, 21845)
        with self.assertRaises(FixedPointDivisionByZero):
            fp_div(one, FixedPointValue.zero(Q4_16))
        with self.assertRaises(ZeroDivisionError):
            one / FixedPointValue.zero(Q4_16)

    def test_sum_overflow(self):
        big = FixedPointValue((1 << 20) - 1, Q4_16)
        with self.assertRaises(FixedPointOverflow):
            fp_add(big, big)

    def test_format_mismatch(self):
        with self.assertRaises(ValueError):
            fp_sub(FixedPointValue(1, Q4_16), FixedPointValue(1, FixedPointFormat(4, 8)))

    def test_lift_is_exact(self):
        x = quantize_truncate("2.72", Q4_16)
        self.assertEqual(x.lift(FixedPointFormat(16, 24)).value, x.value)

    @settings(max_examples=200, deadline=None)
    @given(st.integers(-(1 << 19) + 1, (1 << 19) - 1), st.integers(-(1 << 19) + 1, (1 << 19) - 1))
    def test_add_sub_are_exact_inside_range(self, a, b):
        x, y = FixedPointValue(a, Q4_16), FixedPointValue(b, Q4_16)
        self.assertEqual(fp_add(x, y).value, x.value + y.value)
        self.assertEqual(fp_sub(x, y).value, x.value - y.value)

    @settings(max_examples=200, deadline=None)
    @given(st.fractions(min_value=-15, max_value=15))
    def test_quantization_error_is_bounded(self, x):
        self.assertLess(abs(quantize_truncate(x, Q4_16).value - x), Q4_16.step)
        self.assertLessEqual(abs(quantize_nearest(x, Q4_16).value - x), Q4_16.step / 2)

    @settings(max_examples=200, deadline=None)
    @given(st.integers(-(1 << 19), (1 << 19)))
    def test_decimal_rendering_is_exact(self, raw):
        x = FixedPointValue(raw, Q4_16)
        self.assertEqual(Fraction(Decimal(x.to_decimal())), x.value)
