import csv
import os
import tempfile

import numpy as np
from django.test import SimpleTestCase

from planner.engine import (
    STATS_FIELDS, ProverParams, Verdict, VerdictKind, append_stats_csv, prove_infeasibility,
)
from planner.exceptions import InvalidParameters, PlannerError, ProofTimeout, StartOrGoalInObstacle
from planner.oracle import bfs_connected, brute_force_bitmap

from .scenes import random_chain_scene, random_rigid_scene, reference_scene


class VerdictKindTests(SimpleTestCase):
    def test_exit_codes(self):
        self.assertEqual(VerdictKind.INFEASIBLE.exit_code, 0)
        self.assertEqual(VerdictKind.FEASIBLE_AT_RESOLUTION.exit_code, 2)
        self.assertEqual(VerdictKind.START_OR_GOAL_IN_OBSTACLE.exit_code, 4)


class ProverParamsTests(SimpleTestCase):
    def test_defaults(self):
        params = ProverParams()
        self.assertEqual((params.ns, params.d, params.connectivity, params.segment_every), (100, 5, 'faces', 1))

    def test_rejects_bad_values(self):
        for kwargs in ({'connectivity': 'diagonal'}, {'segment_every': 0}, {'threads': 0}, {'ns': 0}):
            with self.subTest(**kwargs), self.assertRaises(ValueError):
                ProverParams(**kwargs).sampler

    def test_too_many_neighbours_for_the_grid(self):
        with self.assertRaises(InvalidParameters):
            prove_infeasibility(reference_scene('empty_two_link'), ProverParams(d=9), seed=0)

    def test_parameter_errors_are_planner_errors(self):
        self.assertTrue(issubclass(InvalidParameters, PlannerError))
        with self.assertRaises(PlannerError):
            ProverParams(connectivity='diagonal')


class ProveInfeasibilityTests(SimpleTestCase):
    def test_empty_scene_is_feasible(self):
        verdict = prove_infeasibility(reference_scene('empty_two_link'), seed=0)
        self.assertEqual(verdict.kind, VerdictKind.FEASIBLE_AT_RESOLUTION)
        self.assertEqual(verdict.component_count, 1)
        self.assertEqual(verdict.iterations, 1)
        self.assertEqual(verdict.stats[0].hits, 0)
        self.assertEqual(verdict.bitmap.free_count, 144)

    def test_three_regions(self):
        scenario = reference_scene('three_regions_two_link')
        verdict = prove_infeasibility(scenario, seed=1)
        self.assertEqual(verdict.kind, VerdictKind.INFEASIBLE)
        self.assertEqual(verdict.exit_code, 0)
        self.assertNotEqual(verdict.labels.label_of(verdict.start_cell), verdict.labels.label_of(verdict.goal_cell))
        truth = brute_force_bitmap(scenario)
        self.assertFalse(bfs_connected(truth, scenario.start_cell, scenario.goal_cell))

    def test_goal_cell_in_obstacle(self):
        scenario = reference_scene('three_regions_two_link').with_options(resolution=24)
        with self.assertRaises(StartOrGoalInObstacle) as ctx:
            prove_infeasibility(scenario, seed=0)
        self.assertEqual(ctx.exception.which, 'goal')
        self.assertEqual(ctx.exception.cell, scenario.goal_cell)
        verdict = Verdict.blocked(scenario, ctx.exception, seed=0, params=ProverParams())
        self.assertEqual(verdict.exit_code, 4)
        self.assertEqual(verdict.to_dict()['kind'], 'StartOrGoalInObstacle')

    def test_verdicts_agree_with_enumeration(self):
        rng = np.random.default_rng(51)
        kinds = set()
        for trial in range(200):
            if trial % 4 == 0:
                scenario = random_rigid_scene(rng, 8)
            elif trial % 4 == 1:
                scenario = random_chain_scene(rng, 2, 16)
            else:
                scenario = random_chain_scene(rng, 3, 8)
            truth = brute_force_bitmap(scenario)
            start, goal = scenario.start_cell, scenario.goal_cell
            params = ProverParams(ns=int(rng.integers(1, 20)), d=int(rng.integers(0, 6)))
            with self.subTest(trial=trial):
                try:
                    verdict = prove_infeasibility(scenario, params, seed=trial)
                except StartOrGoalInObstacle:
                    kinds.add(VerdictKind.START_OR_GOAL_IN_OBSTACLE)
                    self.assertFalse(truth.is_free(start) and truth.is_free(goal))
                    continue
                kinds.add(verdict.kind)
                # every cell the prover blocked is blocked for real
                self.assertFalse((truth.cells & ~verdict.bitmap.cells).any())
                connected = bfs_connected(truth, start, goal)
                if verdict.kind == VerdictKind.INFEASIBLE:
                    self.assertFalse(connected)
                else:
                    self.assertTrue(connected)
                    np.testing.assert_array_equal(verdict.bitmap.cells, truth.cells)
        self.assertIn(VerdictKind.INFEASIBLE, kinds)
        self.assertIn(VerdictKind.FEASIBLE_AT_RESOLUTION, kinds)

    def test_same_seed_same_run(self):
        scenario = reference_scene('three_regions_two_link')
        params = ProverParams(ns=3, d=2)
        first = prove_infeasibility(scenario, params, seed=7)
        second = prove_infeasibility(scenario, params, seed=7)
        self.assertEqual(first.digest, second.digest)
        self.assertEqual(first.iterations, second.iterations)
        self.assertEqual([s.checks for s in first.stats], [s.checks for s in second.stats])

    def test_accepts_a_generator(self):
        scenario = reference_scene('empty_two_link')
        verdict = prove_infeasibility(scenario, rng=np.random.default_rng(3))
        self.assertEqual(verdict.kind, VerdictKind.FEASIBLE_AT_RESOLUTION)

    def test_segment_every(self):
        scenario = reference_scene('three_regions_two_link')
        verdict = prove_infeasibility(scenario, ProverParams(ns=1, d=0, segment_every=3), seed=4)
        self.assertEqual(verdict.kind, VerdictKind.INFEASIBLE)
        last = verdict.stats[-1]
        exhausted = last.hits < 1
        self.assertTrue(verdict.iterations % 3 == 0 or exhausted)
        for s in verdict.stats[:-1]:
            if s.iteration % 3:
                self.assertEqual(s.segmentation_time, 0.0)

    def test_timeout(self):
        scenario = reference_scene('rigid_wall_gap')
        with self.assertRaises(ProofTimeout) as ctx:
            prove_infeasibility(scenario, ProverParams(timeout=0.001), seed=0)
        self.assertEqual(ctx.exception.iterations, 1)
        self.assertEqual(len(ctx.exception.stats), 1)

    def test_verdict_document(self):
        verdict = prove_infeasibility(reference_scene('three_regions_two_link'), seed=2)
        doc = verdict.to_dict()
        self.assertEqual(doc['kind'], 'Infeasible')
        self.assertEqual(doc['scenario'], 'three_regions_two_link')
        self.assertEqual(doc['seed'], 2)
        self.assertEqual(doc['component_count'], 3)
        self.assertEqual(doc['grid']['dims'], [36, 36])
        self.assertEqual(doc['bitmap_sha256'], verdict.bitmap.digest())
        self.assertEqual(len(doc['stats']), doc['iterations'])


class StatsCsvTests(SimpleTestCase):
    def test_appends_rows_under_one_header(self):
        verdict = prove_infeasibility(reference_scene('three_regions_two_link'), ProverParams(ns=2), seed=5)
        with tempfile.TemporaryDirectory() as tmp:
            path = os.path.join(tmp, 'stats.csv')
            append_stats_csv(path, 'three_regions_two_link', 5, verdict.stats)
            append_stats_csv(path, 'three_regions_two_link', 5, verdict.stats)
            with open(path, newline='') as fh:
                rows = list(csv.DictReader(fh))
            with open(path) as fh:
                header = fh.readline().strip()
        self.assertEqual(header.split(','), STATS_FIELDS)
        self.assertEqual(len(rows), 2 * verdict.iterations)
        self.assertEqual(rows[0]['iteration'], '1')
