"""
The prover's outer loop.

Start from an all-free bitmap, alternate sampling iterations with
segmentation, and stop as soon as start and goal fall into different free
components. If every cell gets visited first, the bitmap is the complete
discretized C-space and its segmentation is the final answer at this
resolution.
"""
import csv
import logging
import os
import time
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional

import numpy as np

from .bitmap import CSpaceBitmap, GridSpec, cell_to_config
from .exceptions import Exhausted, InvalidParameters, ProofTimeout, StartOrGoalInObstacle
from .kinematics import collision_check
from .sampler import ParallelChecker, SampleSet, SamplerParams, sample_cobstacle
from .segmentation import CONNECTIVITIES, LabelField, segment, segment_check

logger = logging.getLogger(__name__)


class VerdictKind(str, Enum):
    INFEASIBLE = 'Infeasible'
    FEASIBLE_AT_RESOLUTION = 'FeasibleAtResolution'
    START_OR_GOAL_IN_OBSTACLE = 'StartOrGoalInObstacle'

    @property
    def exit_code(self):
        return {'Infeasible': 0, 'FeasibleAtResolution': 2, 'StartOrGoalInObstacle': 4}[self.value]


@dataclass(frozen=True)
class ProverParams:
    ns: int = 100
    d: int = 5
    connectivity: str = 'faces'
    segment_every: int = 1
    threads: int = 1
    batch_per_worker: int = 16
    # wall clock seconds; only the bench harness sets this
    timeout: Optional[float] = None

    def __post_init__(self):
        if self.connectivity not in CONNECTIVITIES:
            raise InvalidParameters(f'connectivity must be one of {CONNECTIVITIES}, got {self.connectivity!r}')
        if self.segment_every < 1:
            raise InvalidParameters(f'segment_every must be >= 1, got {self.segment_every}')
        if self.threads < 1:
            raise InvalidParameters(f'threads must be >= 1, got {self.threads}')

    @property
    def sampler(self):
        return SamplerParams(ns=self.ns, d=self.d)

    def to_dict(self):
        return {
            'ns': self.ns, 'd': self.d, 'connectivity': self.connectivity,
            'segment_every': self.segment_every, 'threads': self.threads,
        }


@dataclass
class Verdict:
    kind: VerdictKind
    iterations: int
    grid: GridSpec
    start_cell: tuple
    goal_cell: tuple
    stats: list = field(default_factory=list)
    # final segmentation and bitmap; the bitmap digest lets anyone re-verify the result
    labels: Optional[LabelField] = None
    bitmap: Optional[CSpaceBitmap] = None
    digest: str = ''
    total_time: float = 0.0
    scenario: str = ''
    seed: Optional[int] = None
    params: dict = field(default_factory=dict)
    detail: str = ''

    @property
    def component_count(self):
        return self.labels.component_count if self.labels is not None else None

    @property
    def segmentation_time(self):
        return sum(s.segmentation_time for s in self.stats)

    @property
    def exit_code(self):
        return self.kind.exit_code

    def to_dict(self):
        return {
            'kind': self.kind.value,
            'scenario': self.scenario,
            'seed': self.seed,
            'iterations': self.iterations,
            'component_count': self.component_count,
            'start_cell': list(self.start_cell),
            'goal_cell': list(self.goal_cell),
            'grid': self.grid.to_dict(),
            'bitmap_sha256': self.digest,
            'segmentation_time': self.segmentation_time,
            'total_time': self.total_time,
            'params': self.params,
            'detail': self.detail,
            'stats': [s.to_dict() for s in self.stats],
        }

    @classmethod
    def blocked(cls, scenario, exc: StartOrGoalInObstacle, seed=None, params=None, total_time=0.0):
        """The verdict reported when start or goal turned out to be in C-obstacle."""
        return cls(
            kind=VerdictKind.START_OR_GOAL_IN_OBSTACLE,
            iterations=exc.iterations,
            grid=scenario.grid,
            start_cell=scenario.start_cell,
            goal_cell=scenario.goal_cell,
            stats=list(exc.stats),
            total_time=total_time,
            scenario=scenario.name,
            seed=seed,
            params=params.to_dict() if params else {},
            detail=str(exc),
        )


def check_endpoints(robot, obstacles, spec, start_cell, goal_cell):
    for which, cell in (('start', start_cell), ('goal', goal_cell)):
        if collision_check(robot, cell_to_config(spec, cell), obstacles).colliding:
            raise StartOrGoalInObstacle(which, cell)


def prove_infeasibility(scenario, params: ProverParams = None, rng=None, seed=None, checker=None) -> Verdict:
    """
    Run the prover on a scenario.

    Returns an Infeasible or FeasibleAtResolution verdict. Raises
    StartOrGoalInObstacle when an endpoint cell is (or becomes) C-obstacle and
    ProofTimeout when `params.timeout` runs out. `rng` is a numpy Generator
    or a seed; `checker` is a ParallelChecker to reuse across runs.
    """
    params = params or ProverParams()
    rng = np.random.default_rng(seed if rng is None else rng)
    began = time.perf_counter()

    robot = scenario.active_robot
    obstacles = scenario.obstacles
    spec = scenario.grid
    sampler_params = params.sampler
    sampler_params.check_dimension(spec.ndim)
    start_cell, goal_cell = scenario.start_cell, scenario.goal_cell
    check_endpoints(robot, obstacles, spec, start_cell, goal_cell)

    bm = CSpaceBitmap(spec)
    ss = SampleSet(spec.dims)
    stats = []
    iterations = 0
    own_checker = None
    if checker is None and params.threads > 1:
        checker = own_checker = ParallelChecker(robot, obstacles, params.threads, params.batch_per_worker)

    def verdict(kind, labels):
        result = Verdict(
            kind=kind, iterations=iterations, grid=spec,
            start_cell=start_cell, goal_cell=goal_cell, stats=stats,
            labels=labels, bitmap=bm, digest=bm.digest(),
            total_time=time.perf_counter() - began, scenario=scenario.name,
            seed=seed, params=params.to_dict(),
        )
        logger.info('%s: %s after %d iterations (%d components, %.3fs)',
                    scenario.name or 'scenario', kind.value, iterations,
                    labels.component_count, result.total_time)
        return result

    try:
        while True:
            iterations += 1
            exhausted = False
            try:
                it = sample_cobstacle(bm, ss, robot, obstacles, sampler_params, rng, checker=checker)
            except Exhausted as exc:
                it = exc.stats
                exhausted = True
            it.iteration = iterations
            stats.append(it)
            logger.debug('iteration %d: %d hits, %d checks, %d propagated, %d cells left',
                         iterations, it.hits, it.checks, it.propagated, len(ss))

            for which, cell in (('start', start_cell), ('goal', goal_cell)):
                if not bm.is_free(cell):
                    raise StartOrGoalInObstacle(which, cell, iterations, stats)

            if exhausted or iterations % params.segment_every == 0:
                t0 = time.perf_counter()
                labels = segment(bm, params.connectivity)
                disconnected = segment_check(labels, start_cell, goal_cell)
                it.segmentation_time = time.perf_counter() - t0
                if disconnected:
                    return verdict(VerdictKind.INFEASIBLE, labels)
                if exhausted:
                    return verdict(VerdictKind.FEASIBLE_AT_RESOLUTION, labels)

            elapsed = time.perf_counter() - began
            if params.timeout is not None and elapsed > params.timeout:
                logger.warning('%s: no verdict after %.2fs', scenario.name or 'scenario', elapsed)
                raise ProofTimeout(elapsed, iterations, stats)
    finally:
        if own_checker is not None:
            own_checker.close()


STATS_FIELDS = ['scenario', 'seed', 'iteration', 'hits', 'checks', 'propagated', 'elapsed', 'segmentation_time']


def append_stats_csv(path, scenario_name, seed, stats):
    """Append one row per iteration, writing the header when the file is new."""
    new_file = not os.path.exists(path) or os.path.getsize(path) == 0
    with open(path, 'a', newline='') as fh:
        writer = csv.DictWriter(fh, fieldnames=STATS_FIELDS)
        if new_file:
            writer.writeheader()
        for s in stats:
            writer.writerow({'scenario': scenario_name, 'seed': seed, **s.to_dict()})
