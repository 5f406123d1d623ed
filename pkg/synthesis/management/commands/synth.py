from django.conf import settings
from django.core.management.base import BaseCommand, CommandError

from synthesis.benchmark import controller_from_values
from synthesis.cegis import Limits
from synthesis.fixedpoint import FixedPointFormat
from synthesis.reports import exit_code, render, run_synthesis, run_verify
from synthesis.models import SynthesisRun
from ._common import USAGE_ERROR, add_report_arguments, load_benchmark


class Command(BaseCommand):
    help = "Synthesize a fixed-point controller that stabilizes every plant of a benchmark family."

    def add_arguments(self, parser):
        add_report_arguments(parser)
        conf = settings.SYNTHESIS
        parser.add_argument('--engine', choices=['two', 'one'], default='two')
        parser.add_argument('--seed', type=int, default=conf['SEED'])
        parser.add_argument('--max-iters', dest='max_iters', type=int, default=conf['MAX_ITERATIONS'])
        parser.add_argument('--max-precision', dest='max_precision', default=conf['MAX_PRECISION'],
                            help="largest plant format I,F tried by precision escalation")
        parser.add_argument('--timeout', type=float, default=conf['TIMEOUT'], help="seconds")
        parser.add_argument('--search-budget', dest='search_budget', type=int, default=conf['SEARCH_BUDGET'])
        parser.add_argument('--omit-timing', dest='omit_timing', action='store_true',
                            help="leave wall time out so reports are byte-stable")

    def handle(self, *args, **options):
        spec = load_benchmark(options['file'])
        try:
            max_precision = FixedPointFormat.parse(options['max_precision'])
        except ValueError as exc:
            raise CommandError(f"--max-precision: {exc}", returncode=USAGE_ERROR)
        if options['max_iters'] < 0 or options['timeout'] < 0:
            raise CommandError("--max-iters and --timeout must be non-negative", returncode=USAGE_ERROR)

        limits = Limits(options['max_iters'], max_precision, options['timeout'], options['search_budget'])
        report = run_synthesis(spec, options['engine'], options['seed'], limits,
                               oracle_samples=settings.SYNTHESIS['ORACLE_SAMPLES'],
                               omit_timing=options['omit_timing'])

        if report['outcome'] == 'Success' and options['trace_out']:
            c = report['controller']
            controller = controller_from_values([x['decimal'] for x in c['num']],
                                                [x['decimal'] for x in c['den']],
                                                FixedPointFormat.parse(c['format']))
            run_verify(spec, controller, steps=options['steps'], trace_out=options['trace_out'])

        self.stdout.write(render(report, options['report']), ending='')
        if options['save']:
            SynthesisRun.record('synth', report, spec.name, report['engine'], options['seed'])
        if exit_code(report):
            raise CommandError(f"synthesis failed: {report['reason']}", returncode=exit_code(report))
