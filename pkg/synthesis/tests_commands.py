import json
import tempfile
from dataclasses import replace
from fractions import Fraction
from io import StringIO
from pathlib import Path

from django.core.management import call_command
from django.core.management.base import CommandError
from django.test import SimpleTestCase, TestCase
from rest_framework import serializers

from synthesis.benchmark import (BENCHMARK_KEYS, controller_from_values, parse_benchmark, parse_controller, parse_decimal,
                                 parse_key_values)
from synthesis.exceptions import BenchmarkParseError
from synthesis.fixedpoint import FixedPointFormat, RoundingMode
from synthesis.models import SynthesisRun
from synthesis.reports import render, run_verify
from synthesis.transfer import Controller, TransferFunction

FIXTURES = Path(__file__).resolve().parent / 'fixtures'
CRUISE = str(FIXTURES / 'cruise_control.bench')
UNCERTAIN = str(FIXTURES / 'cruise_control_uncertain.bench')
FINAL = str(FIXTURES / 'cruise_final.ctrl')
QUANTIZED = str(FIXTURES / 'cruise_quantized.ctrl')


class BenchmarkParserTests(SimpleTestCase):
    def test_cruise_fixture(self):
        spec = parse_benchmark(CRUISE)
        self.assertEqual(spec.name, 'cruise_control')
        self.assertEqual(spec.plant.num.coeffs, (Fraction('0.0264'),))
        self.assertEqual(spec.plant.den.coeffs, (1, Fraction('-0.9998')))
        self.assertEqual(spec.controller_format, FixedPointFormat(4, 16))
        self.assertEqual(spec.controller_orders, (2, 2))
        self.assertEqual(spec.sample_time, Fraction(1, 5))

    def test_s_domain_plant_is_discretized(self):
        spec = parse_benchmark(str(FIXTURES / 'integrator_s.bench'))
        self.assertEqual(spec.domain, 's')
        self.assertEqual(spec.plant.num.coeffs, (Fraction(1, 5),))
        self.assertEqual(spec.plant.den.coeffs, (1, -1))
        self.assertEqual(spec.delta, (0, 0, 0))
        self.assertEqual(spec.plant_format, FixedPointFormat(16, 24))

    def test_controller_fixtures(self):
        final = parse_controller(FINAL)
        self.assertEqual(final.orders, (2, 2))
        quantized = parse_controller(QUANTIZED)
        self.assertEqual([c.to_decimal() for c in quantized.den], ['1', '-1.843994140625', '0.8495941162109375'])
        self.assertEqual(quantized.num[0].raw, 178257)

    def test_nearest_rounding_for_inexact_coefficients(self):
        with self.assertLogs('synthesis.benchmark', level='INFO'):
            controller = parse_controller(FINAL, RoundingMode.NEAREST)
        self.assertNotEqual(controller, parse_controller(FINAL))

    def test_unicode_minus(self):
        self.assertEqual(parse_decimal('−0.5'), Fraction(-1, 2))
        with self.assertRaises(ValueError):
            parse_decimal('1/2')

    def test_error_positions(self):
        cases = [
            ("name = x\nfoo = 1\n", 2, 1),
            ("num = 0.1, abc\n", 1, 12),
            ("num = 0.1,, 2\n", 1, 11),
            ("  den\n", 1, 3),
            ("name = a\nname = b\n", 2, 1),
            ("den =   \n", 1, 6),
        ]
        for text, line, column in cases:
            with self.subTest(text=text):
                with self.assertRaises(BenchmarkParseError) as ctx:
                    parse_key_values(text, BENCHMARK_KEYS)
                self.assertEqual((ctx.exception.line, ctx.exception.column), (line, column))

    def test_comments_and_blank_lines(self):
        values = parse_key_values("# header\n\nnum = 1 # trailing\n", BENCHMARK_KEYS)
        self.assertEqual(values, {'num': ['1']})

    def test_delta_length_mismatch(self):
        with tempfile.TemporaryDirectory() as tmp:
            path = Path(tmp) / 'bad.bench'
            path.write_text(Path(CRUISE).read_text().replace('delta = 0, 0, 0', 'delta = 0, 0'))
            with self.assertRaises(serializers.ValidationError):
                parse_benchmark(str(path))

    def test_missing_file(self):
        with self.assertRaises(BenchmarkParseError):
            parse_benchmark(str(FIXTURES / 'missing.bench'))


class VerifyCommandTests(TestCase):
    def verify(self, *args):
        out = StringIO()
        call_command('verify', *args, stdout=out)
        return out.getvalue()

    def test_final_controller_is_stable(self):
        report = json.loads(self.verify(CRUISE, '--controller', FINAL, '--steps', '200'))
        self.assertEqual(report['verdict'], 'Stable')
        self.assertEqual(report['jury']['status'], 'Stable')
        self.assertEqual(report['trace']['diverged_at'], None)
        self.assertAlmostEqual(report['margins']['gain_margin_db'], 18.82, delta=0.1)

    def test_quantized_controller_exits_with_one(self):
        with self.assertRaises(CommandError) as ctx:
            self.verify(CRUISE, '--controller', QUANTIZED)
        self.assertEqual(ctx.exception.returncode, 1)

    def test_uncertain_family_is_not_proven(self):
        out = StringIO()
        with self.assertRaises(CommandError) as ctx:
            call_command('verify', UNCERTAIN, '--controller', FINAL, '--steps', '50', stdout=out)
        self.assertEqual(ctx.exception.returncode, 1)
        self.assertNotEqual(json.loads(out.getvalue())['verdict'], 'Stable')

    def test_trace_out_and_text_report(self):
        with tempfile.TemporaryDirectory() as tmp:
            trace = Path(tmp) / 'trace.csv'
            text = self.verify(CRUISE, '--controller', FINAL, '--steps', '20', '--trace-out', str(trace),
                               '--report', 'text')
            lines = trace.read_text().splitlines()
        self.assertIn("verdict = Stable\n", text)
        self.assertEqual(lines[0], "k,t,r,e,u,y")
        self.assertEqual(len(lines), 21)

    def test_save(self):
        self.verify(CRUISE, '--controller', FINAL, '--steps', '10', '--save')
        run = SynthesisRun.objects.get()
        self.assertEqual(run.kind, 'verify')
        self.assertEqual(run.outcome, 'Stable')

    def test_parse_error_exits_with_two(self):
        with tempfile.TemporaryDirectory() as tmp:
            path = Path(tmp) / 'bad.bench'
            path.write_text("name = x\nnum 1\n")
            with self.assertRaises(CommandError) as ctx:
                self.verify(str(path), '--controller', FINAL)
        self.assertEqual(ctx.exception.returncode, 2)
        self.assertIn("line 2, column 1", str(ctx.exception))

    def test_bad_controller_exits_with_two(self):
        with tempfile.TemporaryDirectory() as tmp:
            path = Path(tmp) / 'bad.ctrl'
            path.write_text("num = 1\nden = 0, 1\n")
            with self.assertRaises(CommandError) as ctx:
                self.verify(CRUISE, '--controller', str(path))
        self.assertEqual(ctx.exception.returncode, 2)

    def test_rounding_overflow_exits_with_two(self):
        with tempfile.TemporaryDirectory() as tmp:
            path = Path(tmp) / 'edge.ctrl'
            path.write_text("num = 15.99999999\nden = 1\nformat = 4,16\n")
            with self.assertRaises(CommandError) as ctx:
                self.verify(CRUISE, '--controller', str(path), '--rounding', 'nearest')
        self.assertEqual(ctx.exception.returncode, 2)
        self.assertIn("do not fit", str(ctx.exception))


class SynthCommandTests(TestCase):
    def synth(self, *args):
        out = StringIO()
        call_command('synth', *args, stdout=out)
        return out.getvalue()

    def test_cruise_synthesis(self):
        report = json.loads(self.synth(CRUISE, '--seed', '1'))
        self.assertEqual(report['outcome'], 'Success')
        self.assertEqual(report['engine'], 'two-stage')
        self.assertTrue(report['oracle']['passed'])
        self.assertIn('wall_time_s', report)

    def test_reports_are_byte_stable_without_timing(self):
        first = self.synth(CRUISE, '--seed', '4', '--omit-timing')
        second = self.synth(CRUISE, '--seed', '4', '--omit-timing')
        self.assertEqual(first, second)
        self.assertNotIn('wall_time_s', json.loads(first))

    def test_iteration_limit_exits_with_one(self):
        out = StringIO()
        with self.assertRaises(CommandError) as ctx:
            call_command('synth', CRUISE, '--max-iters', '0', stdout=out)
        self.assertEqual(ctx.exception.returncode, 1)
        self.assertEqual(json.loads(out.getvalue())['reason'], 'IterationLimit')

    def test_bad_precision_exits_with_two(self):
        with self.assertRaises(CommandError) as ctx:
            self.synth(CRUISE, '--max-precision', '32')
        self.assertEqual(ctx.exception.returncode, 2)

    def test_save_and_trace(self):
        with tempfile.TemporaryDirectory() as tmp:
            trace = Path(tmp) / 'trace.csv'
            self.synth(CRUISE, '--engine', 'one', '--save', '--trace-out', str(trace), '--steps', '30')
            self.assertEqual(len(trace.read_text().splitlines()), 31)
        run = SynthesisRun.objects.get()
        self.assertEqual((run.kind, run.engine, run.outcome), ('synth', 'one-stage', 'Success'))


class ReportTests(SimpleTestCase):
    def test_trivial_loop_follows_plant_stability(self):
        spec = parse_benchmark(CRUISE)
        no_control = Controller.from_values([0], [1], spec.controller_format)
        self.assertEqual(run_verify(spec, no_control, steps=10)['verdict'], 'Stable')
        unstable = replace(spec, plant=TransferFunction.from_coeffs([1], [1, -2]))
        self.assertEqual(run_verify(unstable, no_control, steps=10)['verdict'], 'Unstable')

    def test_controller_decimals_reparse_to_the_same_raw_integers(self):
        spec = parse_benchmark(CRUISE)
        report = run_verify(spec, parse_controller(QUANTIZED), steps=5)
        c = report['controller']
        controller = controller_from_values([x['decimal'] for x in c['num']], [x['decimal'] for x in c['den']],
                                            FixedPointFormat.parse(c['format']))
        self.assertEqual([v.raw for v in controller.coefficients],
                         [x['raw'] for x in c['num'] + c['den']])

    def test_text_report_mirrors_json(self):
        report = run_verify(parse_benchmark(CRUISE), parse_controller(FINAL), steps=5)
        text = render(report, 'text')
        self.assertIn("controller.num.0.raw = ", text)
        self.assertIn("format_version = 1\n", text)
        self.assertEqual(json.loads(render(report, 'json')), report)

    def test_improper_controller_is_reported_not_raised(self):
        spec = parse_benchmark(CRUISE)
        improper = Controller.from_values([1, 0, 0], [1], spec.controller_format)
        report = run_verify(spec, improper, steps=10)
        self.assertIn('improper', report['trace']['error'])
        self.assertEqual(report['trace']['steps'], 0)
        self.assertIn(report['verdict'], ('Stable', 'Unstable', 'Unknown'))
