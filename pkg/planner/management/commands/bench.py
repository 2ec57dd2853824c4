"""
Management command: repeated seeded trials of the prover on one scenario.

Writes one CSV row per trial (trial k uses seed + k) and a summary row with
mean±std (population) of iterations, segmentation time and total time.
--ns-values and --d-values sweep the parameters: every (ns, d) pair runs the
same seeds and gets its own summary row. Exits 3 if any trial hit --timeout.
"""
import csv
import io
import itertools
import logging
import sys
import time
from contextlib import nullcontext
from dataclasses import replace

import numpy as np
from django.conf import settings
from django.core.management.base import BaseCommand, CommandError

from planner.engine import prove_infeasibility
from planner.exceptions import PlannerError, ProofTimeout, StartOrGoalInObstacle
from planner.management.options import add_prover_arguments, clean_options, scenario_for
from planner.models import ProofRun
from planner.sampler import ParallelChecker

logger = logging.getLogger(__name__)

FIELDS = ['trial', 'seed', 'ns', 'd', 'kind', 'iterations', 'segmentation_time', 'total_time']
TIMEOUT_EXIT = 3


def summary_row(rows):
    out = {'trial': 'summary', 'seed': '', 'ns': rows[0]['ns'], 'd': rows[0]['d']}
    finished = [r for r in rows if r['kind'] != 'Timeout']
    kinds = sorted({r['kind'] for r in rows})
    out['kind'] = '/'.join(kinds)
    for column in ('iterations', 'segmentation_time', 'total_time'):
        values = np.asarray([float(r[column]) for r in finished], dtype=float)
        out[column] = f'{values.mean():.2f}±{values.std():.2f}' if values.size else ''
    return out


def sweep(params, ns_values=None, d_values=None):
    """Prover parameters for every (ns, d) pair, ns varying slowest."""
    try:
        return [replace(params, ns=ns, d=d)
                for ns, d in itertools.product(ns_values or [params.ns], d_values or [params.d])]
    except PlannerError as exc:
        raise CommandError(str(exc)) from exc


class Command(BaseCommand):
    help = 'Run seeded prover trials on a scenario and report per-trial and summary statistics as CSV.'

    def add_arguments(self, parser):
        add_prover_arguments(parser)
        parser.add_argument('--trials', type=int, default=30, help='Number of trials (default 30).')
        parser.add_argument('--timeout', type=float, help='Per-trial wall clock limit in seconds.')
        parser.add_argument('--ns-values', dest='ns_values',
                            help='Sweep ns over these comma-separated values (overrides --ns).')
        parser.add_argument('--d-values', dest='d_values',
                            help='Sweep d over these comma-separated values (overrides --d).')
        parser.add_argument('--out', help='Write the CSV here instead of stdout.')
        parser.add_argument('--record', action='store_true', help='Store every trial in the database.')
        parser.add_argument('--batch', default='', help='Batch label for recorded trials.')

    def handle(self, *args, **options):
        if options['trials'] < 1:
            raise CommandError('--trials must be at least 1.')
        if options['record'] and not options['batch']:
            raise CommandError('--record needs a --batch label.')
        form = clean_options(options)
        scenario = scenario_for(options['scenario'], form)
        base = form.prover_params(timeout=form.cleaned_data['timeout'])
        combos = sweep(base, form.cleaned_data['ns_values'], form.cleaned_data['d_values'])
        base_seed = form.cleaned_data['seed'] or 0

        if base.threads > 1:
            pool = ParallelChecker(scenario.active_robot, scenario.obstacles, base.threads,
                                   settings.PLANNER_BATCH_PER_WORKER)
        else:
            pool = nullcontext()

        groups = []
        with pool as checker:
            for params in combos:
                if len(combos) > 1:
                    logger.info('sweep: ns=%d d=%d', params.ns, params.d)
                groups.append([self._trial(scenario, params, base_seed + trial, trial, checker, options)
                               for trial in range(options['trials'])])

        buffer = io.StringIO()
        writer = csv.DictWriter(buffer, fieldnames=FIELDS, lineterminator='\n')
        writer.writeheader()
        for rows in groups:
            for row in rows:
                writer.writerow({k: row[k] for k in FIELDS})
            writer.writerow(summary_row(rows))
        trials = sum(len(rows) for rows in groups)
        if options['out']:
            try:
                with open(options['out'], 'w', newline='') as fh:
                    fh.write(buffer.getvalue())
            except OSError as exc:
                raise CommandError(str(exc)) from exc
            self.stdout.write(self.style.SUCCESS(f"Wrote {trials} trial(s) to {options['out']}"))
        else:
            self.stdout.write(buffer.getvalue(), ending='')

        if any(r['kind'] == 'Timeout' for rows in groups for r in rows):
            sys.exit(TIMEOUT_EXIT)

    def _trial(self, scenario, params, seed, trial, checker, options):
        began = time.perf_counter()
        doc = None
        try:
            verdict = prove_infeasibility(scenario, params, seed=seed, checker=checker)
            doc = verdict.to_dict()
            row = {'kind': doc['kind'], 'iterations': verdict.iterations,
                   'segmentation_time': verdict.segmentation_time, 'total_time': verdict.total_time}
        except ProofTimeout as exc:
            row = {'kind': 'Timeout', 'iterations': exc.iterations,
                   'segmentation_time': sum(s.segmentation_time for s in exc.stats),
                   'total_time': exc.elapsed}
        except StartOrGoalInObstacle as exc:
            row = {'kind': 'StartOrGoalInObstacle', 'iterations': exc.iterations,
                   'segmentation_time': sum(s.segmentation_time for s in exc.stats),
                   'total_time': time.perf_counter() - began}
        except PlannerError as exc:
            raise CommandError(str(exc)) from exc
        row.update(trial=trial, seed=seed, ns=params.ns, d=params.d)
        logger.info('trial %d (seed %d, ns %d, d %d): %s, %d iterations, %.3fs',
                    trial, seed, params.ns, params.d, row['kind'], row['iterations'], row['total_time'])

        if options['record']:
            if doc is None:
                doc = {'kind': row['kind'], 'scenario': scenario.name, 'seed': seed,
                       'iterations': row['iterations'], 'segmentation_time': row['segmentation_time'],
                       'total_time': row['total_time'], 'grid': scenario.grid.to_dict(),
                       'params': params.to_dict()}
            ProofRun.from_verdict(doc, scenario_path=options['scenario'],
                                  batch=options['batch'], trial=trial).save()
        return row
