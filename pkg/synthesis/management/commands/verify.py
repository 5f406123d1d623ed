from django.conf import settings
from django.core.management.base import BaseCommand, CommandError
from rest_framework import serializers

from synthesis.benchmark import parse_controller
from synthesis.exceptions import BenchmarkParseError
from synthesis.reports import exit_code, render, run_verify
from synthesis.models import SynthesisRun
from ._common import USAGE_ERROR, add_report_arguments, load_benchmark


class Command(BaseCommand):
    help = "Check a given controller against a benchmark: Jury, interval Jury, cancellation, margins, trace."

    def add_arguments(self, parser):
        add_report_arguments(parser)
        parser.add_argument('--controller', required=True,
                            help="controller file with num, den and optional format")
        parser.add_argument('--rounding', choices=['truncate', 'nearest'],
                            default=settings.SYNTHESIS['ROUNDING'],
                            help="how coefficients that are not on the format grid are quantized")

    def handle(self, *args, **options):
        spec = load_benchmark(options['file'])
        path = options['controller']
        try:
            controller = parse_controller(path, options['rounding'], spec.controller_format)
        except BenchmarkParseError as exc:
            raise CommandError(f"{path}: {exc}", returncode=USAGE_ERROR)
        except serializers.ValidationError as exc:
            raise CommandError(f"{path}: invalid controller: {exc.detail}", returncode=USAGE_ERROR)

        report = run_verify(spec, controller, steps=options['steps'], trace_out=options['trace_out'],
                            cancellation_tol=settings.SYNTHESIS['CANCELLATION_TOL'])
        self.stdout.write(render(report, options['report']), ending='')
        if options['save']:
            SynthesisRun.record('verify', report, spec.name)
        if exit_code(report):
            raise CommandError(f"closed loop is {report['verdict']}", returncode=exit_code(report))
