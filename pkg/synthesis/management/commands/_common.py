"""Shared argument handling for the synth and verify commands."""
from django.conf import settings
from django.core.management.base import CommandError
from rest_framework import serializers

from synthesis.benchmark import parse_benchmark
from synthesis.exceptions import BenchmarkParseError

USAGE_ERROR = 2


def add_report_arguments(parser):
    parser.add_argument('file', help="benchmark file (key = value lines)")
    parser.add_argument('--report', choices=['json', 'text'], default='json')
    parser.add_argument('--trace-out', dest='trace_out', default=None,
                        help="write the closed-loop step response as CSV")
    parser.add_argument('--steps', type=int, default=settings.SYNTHESIS['SIMULATION_STEPS'])
    parser.add_argument('--save', action='store_true', help="store the report in the run history")


def load_benchmark(path):
    try:
        return parse_benchmark(path)
    except BenchmarkParseError as exc:
        raise CommandError(f"{path}: {exc}", returncode=USAGE_ERROR)
    except serializers.ValidationError as exc:
        raise CommandError(f"{path}: invalid benchmark: {exc.detail}", returncode=USAGE_ERROR)
