import math
import random

from django.test import SimpleTestCase, override_settings

from synthesis.cegis import (DEFAULT_PLANT_FORMAT, FailureReason, Limits, Phase, cegis_one_stage, cegis_two_stage,
                             input_cost, interval_cost, precision_certificate, sample_family,
                             soundness_spot_check, synthesize_candidate, verify_precision, verify_uncertainty)
from synthesis.exceptions import NoCandidate
from synthesis.fixedpoint import FixedPointFormat
from synthesis.stability import jury_stable, root_oracle
from synthesis.transfer import Controller, PlantFamily, TransferFunction, char_poly

Q4_16 = FixedPointFormat(4, 16)
CRUISE = TransferFunction.from_coeffs(["0.0264"], [1, "-0.9998"])


def cruise_family():
    return PlantFamily.point(CRUISE, DEFAULT_PLANT_FORMAT)


def final_controller():
    return Controller.from_values(["11.035202", "5.846100", "4.901855"],
                                  ["1.097901", "0.063110", "0.128357"], Q4_16)


class CandidateSearchTests(SimpleTestCase):
    def test_empty_inputs_accept_the_zero_controller(self):
        candidate = synthesize_candidate([], Q4_16, (2, 2))
        self.assertTrue(candidate.is_zero())
        self.assertEqual(candidate.orders, (2, 2))

    def test_unstabilizable_plant_on_a_tiny_grid(self):
        plant = TransferFunction.from_coeffs([1], [1, -3])
        with self.assertRaises(NoCandidate):
            synthesize_candidate([plant], FixedPointFormat(1, 0), (0, 0))

    def test_stabilizes_an_unstable_first_order_plant(self):
        plant = TransferFunction.from_coeffs(["0.026506"], ["1.000610", "1.002838"])
        self.assertGreater(root_oracle(plant.den), 1)
        candidate = synthesize_candidate([plant], Q4_16, (0, 0), seed=3)
        S = char_poly(candidate, plant)
        self.assertTrue(jury_stable(S).stable)
        self.assertLess(root_oracle(S), 1)

    def test_search_is_deterministic(self):
        plant = TransferFunction.from_coeffs(["0.026506"], ["1.000610", "1.002838"])
        a = synthesize_candidate([plant], Q4_16, (0, 0), seed=9)
        b = synthesize_candidate([plant], Q4_16, (0, 0), seed=9)
        self.assertEqual(a, b)

    def test_budget_is_enforced(self):
        plant = TransferFunction.from_coeffs([1], [1, -3])
        with self.assertRaises(NoCandidate):
            synthesize_candidate([plant], Q4_16, (1, 1), budget=10)

    def test_any_positive_jury_margin_is_accepted(self):
        plant = TransferFunction.from_coeffs([1], [1, "-0.5"])
        candidate = synthesize_candidate([plant], FixedPointFormat(1, 0), (0, 0))
        verdict = jury_stable(char_poly(candidate, plant))
        self.assertTrue(verdict.stable)
        self.assertEqual(input_cost(candidate, [plant]), 0)

    def test_required_margin_is_optional(self):
        plant = TransferFunction.from_coeffs([1], [1, "-0.5"])
        no_control = Controller.from_values([0], [1], FixedPointFormat(1, 0))
        margin = jury_stable(char_poly(no_control, plant)).margin
        self.assertGreater(margin, 0)
        self.assertEqual(input_cost(no_control, [plant]), 0)
        self.assertEqual(input_cost(no_control, [plant], min_margin=margin + 1), 1)
        self.assertEqual(interval_cost(no_control, PlantFamily.point(plant, DEFAULT_PLANT_FORMAT)), 0)

    def test_negative_orders_rejected(self):
        with self.assertRaises(ValueError):
            synthesize_candidate([], Q4_16, (-1, 0))

    def test_costs(self):
        self.assertEqual(input_cost(Controller.zero((0, 0), Q4_16), []), 0)
        self.assertEqual(input_cost(Controller.zero((0, 0), Q4_16), [CRUISE]), math.inf)
        self.assertEqual(interval_cost(Controller.zero((0, 0), Q4_16), cruise_family()), math.inf)
        self.assertEqual(input_cost(final_controller(), [CRUISE]), 0)
        self.assertEqual(interval_cost(final_controller(), cruise_family()), 0)


class VerificationStageTests(SimpleTestCase):
    def test_zero_candidate_yields_a_grid_counterexample(self):
        outcome = verify_uncertainty(Controller.zero((2, 2), Q4_16), cruise_family())
        self.assertFalse(outcome.ok)
        plant = outcome.counterexample
        for c in plant.num.coeffs + plant.den.coeffs:
            self.assertEqual((c * DEFAULT_PLANT_FORMAT.scale).denominator, 1)

    def test_quantized_controller_counterexample_fails_jury(self):
        controller = Controller.from_values(["2.72", "-4.153", "1.896"], [1, "-1.843994140625", "0.8496"], Q4_16)
        outcome = verify_uncertainty(controller, cruise_family())
        self.assertFalse(outcome.ok)
        self.assertFalse(jury_stable(char_poly(controller, outcome.counterexample, DEFAULT_PLANT_FORMAT)).stable)

    def test_final_controller_passes_both_stages(self):
        self.assertTrue(verify_uncertainty(final_controller(), cruise_family()).ok)
        self.assertTrue(verify_precision(final_controller(), cruise_family()))
        self.assertTrue(precision_certificate(final_controller(), cruise_family()).stable)


class EngineTests(SimpleTestCase):
    def test_two_stage_succeeds_on_the_point_cruise_plant(self):
        result = cegis_two_stage(cruise_family(), Q4_16, (2, 2), seed=0)
        self.assertTrue(result.success)
        self.assertEqual(result.outcome, 'Success')
        self.assertIsNone(result.reason)
        self.assertTrue(result.certificate.stable)
        self.assertEqual(result.transcript[0].phase, Phase.SYNTHESIZE)
        self.assertEqual(result.transcript[1].phase, Phase.COUNTEREXAMPLE)
        self.assertEqual(result.transcript[-1].phase, Phase.VERIFIED)
        check = soundness_spot_check(result.controller, cruise_family(), n=1000)
        self.assertEqual(check.samples, 1000)
        self.assertTrue(check.passed)

    def test_two_stage_is_deterministic(self):
        a = cegis_two_stage(cruise_family(), Q4_16, (2, 2), seed=42)
        b = cegis_two_stage(cruise_family(), Q4_16, (2, 2), seed=42)
        self.assertEqual(a.controller, b.controller)
        self.assertEqual([r.as_dict() for r in a.transcript], [r.as_dict() for r in b.transcript])

    def test_iteration_limit(self):
        result = cegis_two_stage(cruise_family(), Q4_16, (2, 2), limits=Limits(max_iterations=0))
        self.assertFalse(result.success)
        self.assertEqual(result.reason, FailureReason.ITERATION_LIMIT)
        self.assertEqual(result.iterations, 0)

    def test_timeout(self):
        result = cegis_one_stage(cruise_family(), Q4_16, (2, 2), limits=Limits(timeout=0))
        self.assertFalse(result.success)
        self.assertEqual(result.reason, FailureReason.TIMEOUT)
        self.assertEqual(result.outcome, 'Failure')

    def test_two_stage_needs_fewer_interval_checks(self):
        two = cegis_two_stage(cruise_family(), Q4_16, (2, 2), seed=1)
        one = cegis_one_stage(cruise_family(), Q4_16, (2, 2), seed=1)
        self.assertTrue(two.success)
        self.assertTrue(one.success)
        self.assertLess(two.interval_checks, one.interval_checks)

    def test_engines_agree_on_a_point_family(self):
        for engine in (cegis_two_stage, cegis_one_stage):
            result = engine(cruise_family(), Q4_16, (2, 2), seed=5)
            self.assertTrue(result.success)
            self.assertLess(root_oracle(char_poly(result.controller, CRUISE)), 1)

    def test_one_stage_reports_no_candidate_at_the_precision_cap(self):
        family = PlantFamily.point(TransferFunction.from_coeffs([1], [1, -3]), DEFAULT_PLANT_FORMAT)
        result = cegis_one_stage(family, FixedPointFormat(1, 0), (0, 0),
                                 limits=Limits(max_precision=DEFAULT_PLANT_FORMAT))
        self.assertEqual(result.reason, FailureReason.NO_CANDIDATE)

    def test_transcript_serializes(self):
        result = cegis_two_stage(cruise_family(), Q4_16, (2, 2))
        record = result.transcript[1].as_dict()
        self.assertEqual(record['phase'], 'counterexample')
        self.assertEqual(record['precision'], '<16,24>')
        self.assertEqual(len(record['candidate']['num']), 3)
        self.assertIsNotNone(record['counterexample'])


class LimitsTests(SimpleTestCase):
    @override_settings(SYNTHESIS={'MAX_ITERATIONS': 7, 'MAX_PRECISION': '24,24', 'TIMEOUT': 5,
                                  'SEARCH_BUDGET': 100})
    def test_from_settings(self):
        limits = Limits.from_settings({'TIMEOUT': 9, 'SEARCH_BUDGET': None})
        self.assertEqual(limits, Limits(7, FixedPointFormat(24, 24), 9.0, 100))


class SpotCheckTests(SimpleTestCase):
    def test_sample_family_starts_with_vertices(self):
        family = PlantFamily(CRUISE, ("0.001", "0", "0.0001"), DEFAULT_PLANT_FORMAT)
        samples = sample_family(family, DEFAULT_PLANT_FORMAT, 10, random.Random(0))
        self.assertEqual(len(samples), 10)
        self.assertEqual(samples[:4], list(family.vertices()))
        for plant in samples:
            self.assertTrue(family.contains(plant, inflate=False))

    def test_unstable_controller_fails_the_spot_check(self):
        controller = Controller.from_values(["2.72", "-4.153", "1.896"], [1, "-1.843994140625", "0.8496"], Q4_16)
        check = soundness_spot_check(controller, cruise_family(), n=20)
        self.assertFalse(check.passed)
        self.assertEqual(check.oracle_failures, 20)
        self.assertEqual(check.as_dict()['passed'], False)

    def test_final_controller_on_an_uncertain_family(self):
        family = PlantFamily(CRUISE, ("0.001", "0.001", "0.0001"), DEFAULT_PLANT_FORMAT)
        self.assertTrue(soundness_spot_check(final_controller(), family, n=200, seed=3).passed)
