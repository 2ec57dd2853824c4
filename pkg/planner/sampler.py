"""
C-obstacle sampling: draw cells without replacement, collision-check them and
amplify every hit.

A hit clears more than one cell. The cause of the collision says which joint
values were irrelevant to it, and every cell that agrees with the hit on the
remaining axes is marked as obstacle without being checked (speedup). Then up
to `d` Moore neighbours of the hit are checked as well.
"""
import logging
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass

import numpy as np

from .bitmap import CSpaceBitmap, PackedGrid, cell_to_config, lin_to_multi, neighbors
from .exceptions import Exhausted, InvalidParameters, PlannerError
from .kinematics import BaseInObstacle, ObstacleHit, SelfHit, SerialChain, collision_check

logger = logging.getLogger(__name__)


class SampleSet:
    """
    The cells not yet visited, with uniform draws without replacement.

    Visited cells are one bit each. While at least 1/POOL_FRACTION of the grid
    is unvisited, a draw picks uniform linear indices until one is unvisited.
    Below that the unvisited indices are collected into `pool[:size]` and a
    draw swap-removes a random slot; cells cleared in bulk by speedup later
    leave stale slots that are skipped when drawn, and the pool is rebuilt
    once stale slots outnumber live ones.
    """

    POOL_FRACTION = 16

    def __init__(self, dims):
        self.dims = (int(dims),) if isinstance(dims, (int, np.integer)) else tuple(dims)
        self.total = math.prod(self.dims)
        self.visited = PackedGrid(self.dims)
        self.remaining = self.total
        self.index_dtype = np.uint32 if self.total <= np.iinfo(np.uint32).max else np.uint64
        self.pool = None
        self.size = 0

    def __len__(self):
        return self.remaining

    def _multi(self, linear):
        return tuple(int(m) for m in np.unravel_index(linear, self.dims, order='F'))

    def is_visited(self, multi):
        return self.visited.get(multi)

    def draw(self, rng):
        if not self.remaining:
            raise Exhausted()
        if self.pool is None and self.remaining * self.POOL_FRACTION >= self.total:
            while True:
                linear = int(rng.integers(self.total))
                if self.discard(linear):
                    return linear
        if self.pool is None or self.size > 2 * self.remaining + 64:
            self._build_pool()
        while True:
            slot = int(rng.integers(self.size))
            linear = int(self.pool[slot])
            self.size -= 1
            self.pool[slot] = self.pool[self.size]
            if self.discard(linear):
                return linear

    def discard(self, linear):
        """Remove one cell; returns False if it was already gone."""
        multi = self._multi(linear)
        if self.visited.get(multi):
            return False
        self.visited.set(multi, True)
        self.remaining -= 1
        return True

    def discard_region(self, region):
        newly = self.visited.fill_region(region, True)
        self.remaining -= newly
        return newly

    def _build_pool(self):
        self.pool = self.visited.linear_indices(False, self.index_dtype)
        self.size = self.pool.size

    @property
    def nbytes(self):
        return self.visited.nbytes + (self.pool.nbytes if self.pool is not None else 0)


def random_sample(ss: SampleSet, rng):
    return ss.draw(rng)


@dataclass(frozen=True)
class SamplerParams:
    ns: int = 100
    d: int = 5

    def __post_init__(self):
        if self.ns < 1:
            raise InvalidParameters(f'ns must be >= 1, got {self.ns}')
        if self.d < 0:
            raise InvalidParameters(f'd must be >= 0, got {self.d}')

    def check_dimension(self, ndim):
        if self.d > 3 ** ndim - 1:
            raise InvalidParameters(f'd must be <= {3 ** ndim - 1} for a {ndim}-D grid, got {self.d}')


@dataclass
class IterationStats:
    iteration: int = 0
    hits: int = 0
    checks: int = 0
    propagated: int = 0
    elapsed: float = 0.0
    segmentation_time: float = 0.0

    def to_dict(self):
        return asdict(self)


def fixed_axes(robot, cause, ndim):
    """The 0-based axes a collision depends on; every other axis is free."""
    if isinstance(cause, ObstacleHit) and isinstance(robot, SerialChain):
        return range(0, cause.link)
    if isinstance(cause, SelfHit):
        return range(cause.i - 1, cause.j)
    if isinstance(cause, BaseInObstacle):
        return (0, 1)
    return range(ndim)


def speedup(bm: CSpaceBitmap, ss: SampleSet, robot, q_multi, report):
    """Mark every cell implied by the collision cause; returns how many turned from free to obstacle."""
    spec = bm.spec
    fixed = set(fixed_axes(robot, report.cause, spec.ndim))
    region = tuple(m if axis in fixed else slice(None) for axis, m in enumerate(q_multi))
    ss.discard_region(region)
    return bm.clear_region(region)


def _pick_neighbors(spec, ss, multi, d, rng):
    if d == 0:
        return []
    candidates = neighbors(spec, multi)
    picks = rng.choice(len(candidates), size=min(d, len(candidates)), replace=False)
    return [candidates[k] for k in picks if not ss.is_visited(candidates[k])]


def _apply_hit(bm, ss, robot, multi, report, stats):
    # the sampled cell is part of the speedup region
    stats.propagated += max(speedup(bm, ss, robot, multi, report) - 1, 0)


def sample_cobstacle(bm, ss, robot, obstacles, params: SamplerParams, rng, checker=None):
    """
    One sampling iteration: returns once `params.ns` direct hits were found.

    Raises Exhausted (carrying the partial stats) when the sample set empties
    first. With a `checker` the collision checks run batched in worker
    processes.
    """
    stats = IterationStats()
    start = time.perf_counter()
    try:
        if checker is None:
            _sample_serial(bm, ss, robot, obstacles, params, rng, stats)
        else:
            _sample_batched(bm, ss, robot, params, rng, stats, checker)
    except Exhausted:
        stats.elapsed = time.perf_counter() - start
        raise Exhausted(stats)
    stats.elapsed = time.perf_counter() - start
    return stats


def _sample_serial(bm, ss, robot, obstacles, params, rng, stats):
    spec = bm.spec
    while stats.hits < params.ns:
        multi = lin_to_multi(spec, random_sample(ss, rng))
        stats.checks += 1
        report = collision_check(robot, cell_to_config(spec, multi), obstacles)
        if not report.colliding:
            continue
        stats.hits += 1
        _apply_hit(bm, ss, robot, multi, report, stats)
        for neighbor in _pick_neighbors(spec, ss, multi, params.d, rng):
            ss.discard(_linear(bm, neighbor))
            stats.checks += 1
            n_report = collision_check(robot, cell_to_config(spec, neighbor), obstacles)
            if n_report.colliding:
                _apply_hit(bm, ss, robot, neighbor, n_report, stats)


def _linear(bm, multi):
    return int(np.ravel_multi_index(multi, bm.spec.dims, order='F'))


def _sample_batched(bm, ss, robot, params, rng, stats, checker):
    spec = bm.spec
    while stats.hits < params.ns:
        cells = []
        exhausted = False
        for _ in range(checker.batch_size):
            try:
                cells.append(lin_to_multi(spec, random_sample(ss, rng)))
            except Exhausted:
                exhausted = True
                break
        reports = checker.check([cell_to_config(spec, m) for m in cells])
        stats.checks += len(cells)
        hit_cells = []
        for multi, report in zip(cells, reports):
            if report.colliding:
                stats.hits += 1
                _apply_hit(bm, ss, robot, multi, report, stats)
                hit_cells.append(multi)

        candidates = {}
        for multi in hit_cells:
            for neighbor in _pick_neighbors(spec, ss, multi, params.d, rng):
                candidates[neighbor] = None
        second = [m for m in candidates if ss.discard(_linear(bm, m))]
        reports = checker.check([cell_to_config(spec, m) for m in second])
        stats.checks += len(second)
        for multi, report in zip(second, reports):
            if report.colliding:
                _apply_hit(bm, ss, robot, multi, report, stats)
        if exhausted and stats.hits < params.ns:
            raise Exhausted()


# --- worker processes ---

_worker_scene = None


def _init_worker(robot, obstacles):
    global _worker_scene
    _worker_scene = (robot, obstacles)


def _check_in_worker(q):
    robot, obstacles = _worker_scene
    return collision_check(robot, q, obstacles)


class ParallelChecker:
    """A process pool that collision-checks batches of configurations for one scene."""

    def __init__(self, robot, obstacles, workers, batch_per_worker=16):
        if workers < 2:
            raise PlannerError(f'a parallel checker needs at least 2 workers, got {workers}')
        self.workers = workers
        self.batch_size = workers * batch_per_worker
        self.executor = ProcessPoolExecutor(
            max_workers=workers, initializer=_init_worker, initargs=(robot, tuple(obstacles)),
        )
        logger.debug('Started %d collision-check workers', workers)

    def check(self, configs):
        if not configs:
            return []
        chunk = max(1, math.ceil(len(configs) / self.workers))
        return list(self.executor.map(_check_in_worker, configs, chunksize=chunk))

    def close(self):
        self.executor.shutdown()

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()
