"""
Ground truth for checking the prover: the exhaustively enumerated bitmap, a
plain breadth-first search, and the comparison of a coarse grid against a
much finer one that stands in for the continuous C-space.

Slow on purpose. Nothing in the prover's normal path calls this module.
"""
import itertools
import logging
from collections import deque
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .bitmap import CSpaceBitmap, cell_to_config, config_to_cell, moore_offsets
from .exceptions import IncompatibleGrids, StartOrGoalInObstacle, TooLarge
from .kinematics import collision_check
from .segmentation import LabelField, segment

logger = logging.getLogger(__name__)

MAX_CELLS = 10_000_000


def brute_force_bitmap(scenario, max_cells=MAX_CELLS) -> CSpaceBitmap:
    """Collision-check the centre of every cell."""
    spec = scenario.grid
    if spec.size > max_cells:
        raise TooLarge(f'{spec.size} cells exceed the oracle limit of {max_cells}')
    robot = scenario.active_robot
    bm = CSpaceBitmap(spec)
    for multi in itertools.product(*(range(n) for n in spec.dims)):
        if collision_check(robot, cell_to_config(spec, multi), scenario.obstacles).colliding:
            bm.set_obstacle(multi)
    logger.debug('Enumerated %d cells, %d free', spec.size, bm.free_count)
    return bm


def _offsets(ndim, connectivity):
    if connectivity == 'faces':
        return [tuple(s if k == axis else 0 for k in range(ndim)) for axis in range(ndim) for s in (-1, 1)]
    return list(moore_offsets(ndim))


def _adjacent(spec, cell, offsets):
    for offset in offsets:
        out = []
        for m, o, n, w in zip(cell, offset, spec.dims, spec.wrap):
            v = m + o
            if w:
                v %= n
            elif not 0 <= v < n:
                break
            out.append(v)
        else:
            yield tuple(out)


def _flood(spec, free, seed, offsets, visit):
    queue = deque([seed])
    visit(seed)
    while queue:
        cell = queue.popleft()
        for nxt in _adjacent(spec, cell, offsets):
            if free[nxt] and visit(nxt):
                queue.append(nxt)


def bfs_connected(bm: CSpaceBitmap, start_cell, goal_cell, connectivity='faces'):
    start_cell, goal_cell = tuple(start_cell), tuple(goal_cell)
    if not bm.is_free(start_cell):
        raise StartOrGoalInObstacle('start', start_cell)
    if not bm.is_free(goal_cell):
        raise StartOrGoalInObstacle('goal', goal_cell)
    seen = set()

    def visit(cell):
        if cell in seen:
            return False
        seen.add(cell)
        return True

    _flood(bm.spec, bm.grid, start_cell, _offsets(bm.spec.ndim, connectivity), visit)
    return goal_cell in seen


def flood_fill_labels(bm: CSpaceBitmap, connectivity='faces') -> LabelField:
    """Reference labelling: components numbered in order of their first cell, axis 0 fastest."""
    spec = bm.spec
    grid = np.zeros(spec.dims, dtype=np.int32)
    offsets = _offsets(spec.ndim, connectivity)
    count = 0
    free = bm.grid
    for linear in np.flatnonzero(free.ravel(order='F')):
        seed = np.unravel_index(linear, spec.dims, order='F')
        seed = tuple(int(m) for m in seed)
        if grid[seed]:
            continue
        count += 1

        def visit(cell, label=count):
            if grid[cell]:
                return False
            grid[cell] = label
            return True

        _flood(spec, free, seed, offsets, visit)
    return LabelField(spec.dims, grid.ravel(order='F'), count)


@dataclass(frozen=True)
class EquivalenceReport:
    """Violated conditions, sorted: 1 component count, 2 component mapping, 3 start cell, 4 goal cell."""
    violations: tuple = ()

    @property
    def equivalent(self):
        return not self.violations

    @property
    def condition(self) -> Optional[int]:
        return self.violations[0] if self.violations else None

    def __str__(self):
        if self.equivalent:
            return 'Equivalent'
        return 'Violation(' + ', '.join(str(c) for c in self.violations) + ')'


def _check_compatible(fine, coarse):
    f, c = fine.spec, coarse.spec
    if f.ndim != c.ndim:
        raise IncompatibleGrids(f'{f.ndim}-D fine grid against {c.ndim}-D coarse grid')
    if f.wrap != c.wrap or not (np.allclose(f.lo, c.lo) and np.allclose(f.hi, c.hi)):
        raise IncompatibleGrids('grids cover different bounds or wrap differently')
    ratios = []
    for nf, nc in zip(f.dims, c.dims):
        if nf % nc:
            raise IncompatibleGrids(f'fine resolution {nf} is not a multiple of {nc}')
        ratios.append(nf // nc)
    return ratios


def check_equivalence(fine: CSpaceBitmap, coarse: CSpaceBitmap, start, goal, connectivity='faces'):
    """
    Compare a coarse bitmap with a fine one over the same bounds.

    `start` and `goal` are configurations. A coarse cell covers the block of
    fine cells it geometrically contains.

    The mapping check (2) is relaxed: the fine cells under a coarse component
    must carry exactly one fine label, but fine obstacle cells among them are
    ignored. A coarse free cell that partly covers fine obstacle still passes,
    so only free-to-free correspondence is checked, never that the coarse
    free space lies inside the fine one.
    """
    ratios = _check_compatible(fine, coarse)
    fine_labels = segment(fine, connectivity)
    coarse_labels = segment(coarse, connectivity)
    violations = []

    if fine_labels.component_count != coarse_labels.component_count:
        violations.append(1)

    upsampled = coarse_labels.grid
    for axis, r in enumerate(ratios):
        upsampled = np.repeat(upsampled, r, axis=axis)
    fine_grid = fine_labels.grid
    seen = {}
    mapping_ok = True
    for c in range(1, coarse_labels.component_count + 1):
        under = np.unique(fine_grid[upsampled == c])
        under = under[under > 0]
        if under.size != 1 or int(under[0]) in seen:
            mapping_ok = False
            break
        seen[int(under[0])] = c
    if not mapping_ok:
        violations.append(2)

    if not coarse.is_free(config_to_cell(coarse.spec, start)):
        violations.append(3)
    if not coarse.is_free(config_to_cell(coarse.spec, goal)):
        violations.append(4)
    return EquivalenceReport(tuple(violations))
