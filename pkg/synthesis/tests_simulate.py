import math
import random
from fractions import Fraction

from django.test import SimpleTestCase

from synthesis.exceptions import ArithmeticOverflow, DegenerateLoop
from synthesis.fixedpoint import FixedPointFormat
from synthesis.simulate import (NoiseMode, NoiseModel, format_margins, frequency_margins, sensitivity_functions,
                                step_response)
from synthesis.transfer import Controller, TransferFunction, poly_add

Q4_16 = FixedPointFormat(4, 16)
CRUISE = TransferFunction.from_coeffs(["0.0264"], [1, "-0.9998"])
T = Fraction(1, 5)


def quantized_controller():
    return Controller.from_values(["2.72", "-4.153", "1.896"], [1, "-1.843994140625", "0.8496"], Q4_16)


def final_controller():
    return Controller.from_values(["11.035202", "5.846100", "4.901855"],
                                  ["1.097901", "0.063110", "0.128357"], Q4_16)


class StepResponseTests(SimpleTestCase):
    def test_zero_controller_leaves_plant_at_rest(self):
        trace = step_response(Controller.zero((2, 2), Q4_16), CRUISE, T, 50)
        self.assertEqual(len(trace), 50)
        self.assertTrue(all(y == 0 for y in trace.outputs))
        self.assertTrue(all(s.u.is_zero() for s in trace.samples))
        self.assertIsNone(trace.diverged_at)

    def test_quantized_controller_diverges(self):
        trace = step_response(quantized_controller(), CRUISE, T, 500)
        self.assertIsNotNone(trace.diverged_at)
        self.assertLess(trace.diverged_at, 500)
        self.assertEqual(len(trace), trace.diverged_at + 1)

    def test_final_controller_tracks_the_step(self):
        trace = step_response(final_controller(), CRUISE, T, 500)
        self.assertIsNone(trace.diverged_at)
        self.assertAlmostEqual(float(trace.outputs[-1]), 0.99955, delta=1e-3)

    def test_final_controller_is_bounded_under_worst_case_noise(self):
        noise = NoiseModel(Q4_16.step, Q4_16.step, NoiseMode.WORST_CASE)
        trace = step_response(final_controller(), CRUISE, T, 10_000, noise=noise)
        self.assertIsNone(trace.diverged_at)
        self.assertLess(float(trace.max_abs_output()), 2)

    def test_negative_reference_gives_a_negative_error(self):
        unity = Controller.from_values([1], [1], Q4_16)
        trace = step_response(unity, CRUISE, T, 5, reference=-1)
        self.assertEqual(trace.samples[0].e.value, -1)
        self.assertEqual(trace.samples[0].u.value, -1)
        self.assertLess(trace.outputs[1], 0)

    def test_matches_a_float_recurrence(self):
        controller = final_controller()
        beta = [float(c.value) for c in controller.num]
        alpha = [float(c.value) for c in controller.den]
        b0, (a0, a1) = float(CRUISE.num.coeffs[0]), [float(c) for c in CRUISE.den.coeffs]
        e, u, y = [], [], []
        for k in range(60):
            y.append((b0 * u[k - 1] - a1 * y[k - 1]) / a0 if k else 0.0)
            e.append(1 - y[k])
            acc = sum(beta[i] * e[k - i] for i in range(3) if k - i >= 0)
            acc -= sum(alpha[j] * u[k - j] for j in (1, 2) if k - j >= 0)
            u.append(acc / alpha[0])

        trace = step_response(controller, CRUISE, T, 60)
        self.assertIsNone(trace.diverged_at)
        for k in range(60):
            self.assertAlmostEqual(float(trace.outputs[k]), y[k], delta=5e-3)
        self.assertTrue(any(s.e.value < 0 for s in trace.samples))
        self.assertAlmostEqual(float(trace.outputs[-1]), 0.99955, delta=1e-3)

    def test_first_output_is_delayed_by_the_plant(self):
        trace = step_response(final_controller(), CRUISE, T, 3)
        self.assertEqual(trace.outputs[0], 0)
        self.assertNotEqual(trace.outputs[1], 0)

    def test_seeded_noise_is_deterministic(self):
        noise = NoiseModel(Fraction(1, 256), Fraction(1, 256), NoiseMode.UNIFORM)
        a = step_response(final_controller(), CRUISE, T, 100, noise=noise, seed=7)
        b = step_response(final_controller(), CRUISE, T, 100, noise=noise, seed=7)
        c = step_response(final_controller(), CRUISE, T, 100, noise=noise, seed=8)
        self.assertEqual(a.outputs, b.outputs)
        self.assertNotEqual(a.outputs, c.outputs)

    def test_noise_stays_within_half_step(self):
        rng = random.Random(0)
        q = Fraction(1, 64)
        for mode in NoiseMode:
            model = NoiseModel(q, q, mode)
            for _ in range(500):
                self.assertLessEqual(abs(float(model.sample(q, rng, rng.choice([-1, 1])))), float(q / 2))

    def test_worst_case_noise_follows_the_sign(self):
        model = NoiseModel(Fraction(1, 8), 0, NoiseMode.WORST_CASE)
        self.assertEqual(float(model.sample(Fraction(1, 8), None, 1)), 1 / 16)
        self.assertEqual(float(model.sample(Fraction(1, 8), None, -1)), -1 / 16)

    def test_negative_noise_step_rejected(self):
        with self.assertRaises(ValueError):
            NoiseModel(-1, 0)

    def test_error_outside_signal_format_overflows(self):
        with self.assertRaises(ArithmeticOverflow) as ctx:
            step_response(final_controller(), CRUISE, T, 5, reference=20, signal_format=Q4_16)
        self.assertEqual(ctx.exception.step, 0)

    def test_steps_must_be_positive(self):
        with self.assertRaises(ValueError):
            step_response(final_controller(), CRUISE, T, 0)

    def test_csv(self):
        csv = step_response(final_controller(), CRUISE, T, 4).to_csv()
        lines = csv.splitlines()
        self.assertEqual(lines[0], "k,t,r,e,u,y")
        self.assertEqual(len(lines), 5)
        self.assertTrue(lines[2].startswith("1,0.2,1,"))


class SensitivityTests(SimpleTestCase):
    def test_h1_and_h3_sum_to_one(self):
        h1, h2, h3 = sensitivity_functions(final_controller(), CRUISE)
        self.assertEqual(h1.den, h3.den)
        self.assertEqual(h2.den, h1.den)
        self.assertEqual(poly_add(h1.num, h3.num).normalize(), h1.den)

    def test_zero_controller(self):
        controller = TransferFunction.from_coeffs([0], [1])
        h1, h2, h3 = sensitivity_functions(controller, CRUISE)
        self.assertTrue(h3.num.is_zero())
        self.assertEqual(h1.evaluate(Fraction(2)), 1)
        self.assertEqual(h2.evaluate(Fraction(2)), CRUISE.evaluate(Fraction(2)))

    def test_identically_zero_loop(self):
        with self.assertRaises(DegenerateLoop):
            sensitivity_functions(TransferFunction.from_coeffs([-1], [1]), TransferFunction.from_coeffs([1], [1]))


class MarginTests(SimpleTestCase):
    def test_final_controller_margins(self):
        margins = frequency_margins(final_controller(), CRUISE, T)
        self.assertAlmostEqual(margins.gain_margin_db, 18.82, delta=0.1)
        self.assertAlmostEqual(margins.phase_margin_deg, 65.5, delta=1.0)
        self.assertIsNotNone(margins.phase_crossover)
        self.assertIsNotNone(margins.gain_crossover)

    def test_negative_static_loop(self):
        one = TransferFunction.from_coeffs([1], [1])
        margins = frequency_margins(TransferFunction.from_coeffs(["-0.5"], [1]), one, T)
        self.assertAlmostEqual(margins.gain_margin_db, 20 * math.log10(2), places=6)
        self.assertEqual(margins.phase_margin_deg, math.inf)

    def test_zero_loop_has_infinite_margins(self):
        margins = frequency_margins(TransferFunction.from_coeffs([0], [1]), CRUISE, T)
        self.assertEqual(margins.gain_margin_db, math.inf)
        self.assertEqual(margins.phase_margin_deg, math.inf)
        self.assertIsNone(margins.gain_crossover)

    def test_format(self):
        text = format_margins(frequency_margins(TransferFunction.from_coeffs([0], [1]), CRUISE, T))
        self.assertIn("gain_margin_db=inf\n", text)
        self.assertEqual(len(text.splitlines()), 4)
