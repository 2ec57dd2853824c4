"""
Flags and plumbing shared by the prove, bench and render commands.
"""
import json

from django.core.management.base import CommandError

from planner.exceptions import PlannerError
from planner.forms import ProverOptionsForm
from planner.scenario_io import load_scenario


def add_prover_arguments(parser):
    parser.add_argument('scenario', help='Scenario file (JSON).')
    parser.add_argument('--ns', type=int, help='Direct C-obstacle hits per iteration (default: PLANNER_NS).')
    parser.add_argument('--d', type=int, help='Neighbours checked per hit (default: PLANNER_D).')
    parser.add_argument('--resolution', help='Override grid resolution: N, or N1,N2,... per axis.')
    parser.add_argument('--connectivity', help='faces or moore (default: PLANNER_CONNECTIVITY).')
    parser.add_argument('--seed', type=int, help='Random seed.')
    parser.add_argument('--threads', type=int, help='Collision-check worker processes (default: PLANNER_THREADS).')
    parser.add_argument('--segment-every', type=int, dest='segment_every',
                        help='Segment every k iterations (default: PLANNER_SEGMENT_EVERY).')
    parser.add_argument('--truncate-links', type=int, dest='truncate_links',
                        help='Prove on the first k links of a serial chain only.')
    parser.add_argument('--obstacle-scale', type=float, dest='obstacle_scale',
                        help='Scale every obstacle about its centre (area changes by the square).')


def clean_options(options):
    form = ProverOptionsForm.from_options(options)
    if not form.is_valid():
        raise CommandError(f'Invalid options: {form.error_text()}')
    return form


def scenario_for(path, form):
    try:
        scenario = load_scenario(path)
        return scenario.with_options(
            resolution=form.cleaned_data['resolution'],
            truncate_to_links=form.cleaned_data['truncate_links'],
            obstacle_scale=form.cleaned_data['obstacle_scale'],
        )
    except (PlannerError, OSError) as exc:
        raise CommandError(f'{path}: {exc}') from exc


def dump_json(doc):
    return json.dumps(doc, indent=2, sort_keys=False)
