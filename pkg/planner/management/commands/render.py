"""
Management command: export a C-space bitmap and its labelled components as
PGM images (OUT_PREFIX_bitmap.pgm, OUT_PREFIX_labels.pgm).

SOURCE is a scenario file, proved with the usual flags or enumerated cell by
cell with --oracle, or a bitmap dump (.csbm). Grids with more than two axes
need --slice to fix the others, e.g. --slice 2=0,3=17.
"""
import logging

from django.conf import settings
from django.core.management.base import BaseCommand, CommandError

from planner.bitmap import CSpaceBitmap, slice_2d, write_pgm
from planner.engine import prove_infeasibility
from planner.exceptions import PlannerError
from planner.management.options import add_prover_arguments, clean_options, scenario_for
from planner.oracle import brute_force_bitmap
from planner.segmentation import label_image, segment

logger = logging.getLogger(__name__)

START_LEVEL = 255
GOAL_LEVEL = 32


def parse_slice(text):
    """'2=0,3=17' -> {2: 0, 3: 17}"""
    fixed = {}
    if not text:
        return fixed
    for part in text.split(','):
        axis, sep, index = part.partition('=')
        if not sep:
            raise CommandError(f"Bad --slice entry {part!r}; expected AXIS=INDEX.")
        try:
            fixed[int(axis)] = int(index)
        except ValueError:
            raise CommandError(f"Bad --slice entry {part!r}; expected integers.")
    return fixed


def project_mark(cell, fixed):
    """2D position of a cell in the slice, or None when the slice does not contain it."""
    if any(cell[axis] != index for axis, index in fixed.items()):
        return None
    return tuple(m for axis, m in enumerate(cell) if axis not in fixed)


class Command(BaseCommand):
    help = 'Write PGM images of a C-space bitmap and its connected components.'

    def add_arguments(self, parser):
        add_prover_arguments(parser)
        parser.add_argument('out_prefix', help='Output path prefix.')
        parser.add_argument('--slice', dest='slice', default='', help='Fix axes for n > 2: AXIS=INDEX,...')
        parser.add_argument('--oracle', action='store_true',
                            help='Enumerate every cell instead of running the prover.')

    def handle(self, *args, **options):
        form = clean_options(options)
        fixed = parse_slice(options['slice'])
        source = options['scenario']
        cells = []
        try:
            if source.endswith('.csbm'):
                bm = CSpaceBitmap.load(source)
            else:
                scenario = scenario_for(source, form)
                cells = [scenario.start_cell, scenario.goal_cell]
                if options['oracle']:
                    bm = brute_force_bitmap(scenario, max_cells=settings.PLANNER_ORACLE_MAX_CELLS)
                else:
                    verdict = prove_infeasibility(scenario, form.prover_params(), seed=form.cleaned_data['seed'])
                    bm = verdict.bitmap
                    logger.info('%s: %s', scenario.name, verdict.kind.value)
            labels = segment(bm, form.cleaned_data['connectivity'])
            bitmap_2d = slice_2d(bm.grid, fixed).astype('uint8') * 255
            labels_2d = slice_2d(label_image(labels), fixed)
        except (PlannerError, OSError) as exc:
            raise CommandError(str(exc)) from exc
        except IndexError as exc:
            raise CommandError(f'--slice index out of range: {exc}') from exc

        marks = {}
        for cell, level in zip(cells, (START_LEVEL, GOAL_LEVEL)):
            position = project_mark(cell, fixed)
            if position is not None:
                marks[position] = level

        prefix = options['out_prefix']
        try:
            write_pgm(bitmap_2d, f'{prefix}_bitmap.pgm', marks)
            write_pgm(labels_2d, f'{prefix}_labels.pgm', marks)
        except OSError as exc:
            raise CommandError(str(exc)) from exc
        self.stdout.write(self.style.SUCCESS(
            f'Wrote {prefix}_bitmap.pgm and {prefix}_labels.pgm ({labels.component_count} components)'
        ))
