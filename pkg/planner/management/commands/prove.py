"""
Management command: run the infeasibility prover on one scenario.

Prints the verdict as JSON on stdout. Exit status:
- 0 → Infeasible (start and goal proven disconnected)
- 2 → FeasibleAtResolution (every cell visited, start and goal connected)
- 4 → StartOrGoalInObstacle
- 1 → bad input or I/O error
"""
import logging
import sys
import time

from django.core.management.base import BaseCommand, CommandError

from planner.engine import Verdict, append_stats_csv, prove_infeasibility
from planner.exceptions import PlannerError, StartOrGoalInObstacle
from planner.management.options import add_prover_arguments, clean_options, dump_json, scenario_for
from planner.models import ProofRun

logger = logging.getLogger(__name__)


class Command(BaseCommand):
    help = 'Prove that no motion plan exists for a scenario at its grid resolution.'

    def add_arguments(self, parser):
        add_prover_arguments(parser)
        parser.add_argument('--export-bitmap', dest='export_bitmap', help='Write the final bitmap dump here.')
        parser.add_argument('--stats-csv', dest='stats_csv', help='Append per-iteration stats to this CSV file.')
        parser.add_argument('--record', action='store_true', help='Store the run in the database.')

    def handle(self, *args, **options):
        form = clean_options(options)
        scenario = scenario_for(options['scenario'], form)
        params = form.prover_params()
        seed = form.cleaned_data['seed']

        began = time.perf_counter()
        try:
            verdict = prove_infeasibility(scenario, params, seed=seed)
        except StartOrGoalInObstacle as exc:
            logger.warning('%s: %s', scenario.name, exc)
            verdict = Verdict.blocked(scenario, exc, seed=seed, params=params,
                                      total_time=time.perf_counter() - began)
        except PlannerError as exc:
            raise CommandError(str(exc)) from exc

        try:
            if options['export_bitmap'] and verdict.bitmap is not None:
                verdict.bitmap.save(options['export_bitmap'])
                logger.info('Wrote bitmap dump to %s', options['export_bitmap'])
            if options['stats_csv']:
                append_stats_csv(options['stats_csv'], scenario.name, seed, verdict.stats)
        except OSError as exc:
            raise CommandError(str(exc)) from exc

        doc = verdict.to_dict()
        if options['record']:
            run = ProofRun.from_verdict(doc, scenario_path=options['scenario'])
            run.save()
            logger.info('Recorded run %s', run.pk)
        self.stdout.write(dump_json(doc))

        if verdict.exit_code:
            sys.exit(verdict.exit_code)
