import math
import os
import tempfile

import numpy as np
from django.test import SimpleTestCase

from planner.bitmap import (
    TWO_PI, CSpaceBitmap, GridSpec, PackedGrid, cell_to_config, config_to_cell, lin_to_multi,
    multi_to_lin, neighbors, slice_2d,
)
from planner.exceptions import GridError, OutOfBounds, OutOfRange, UnsupportedDimension


def periodic(*dims):
    n = len(dims)
    return GridSpec(dims, (True,) * n, (0.0,) * n, (TWO_PI,) * n)


class GridSpecTests(SimpleTestCase):
    def test_size(self):
        self.assertEqual(periodic(5, 4, 3).size, 60)

    def test_rejects_tiny_axis(self):
        with self.assertRaises(GridError):
            periodic(1, 4)

    def test_wrap_axis_must_span_full_turn(self):
        with self.assertRaises(GridError):
            GridSpec((4,), (True,), (0.0,), (math.pi,))

    def test_rejects_empty_interval(self):
        with self.assertRaises(GridError):
            GridSpec((4,), (False,), (1.0,), (1.0,))


class IndexingTests(SimpleTestCase):
    def test_axis_zero_fastest(self):
        spec = periodic(5, 4, 3)
        self.assertEqual(lin_to_multi(spec, 0), (0, 0, 0))
        self.assertEqual(lin_to_multi(spec, 1), (1, 0, 0))
        self.assertEqual(lin_to_multi(spec, 5), (0, 1, 0))
        self.assertEqual(lin_to_multi(spec, 20), (0, 0, 1))
        self.assertEqual(lin_to_multi(spec, 59), (4, 3, 2))

    def test_round_trip_every_cell(self):
        spec = periodic(5, 4, 3)
        for linear in range(spec.size):
            self.assertEqual(multi_to_lin(spec, lin_to_multi(spec, linear)), linear)

    def test_matches_numpy_fortran_order(self):
        spec = periodic(5, 4, 3)
        for linear in (0, 7, 33, 59):
            expected = tuple(int(m) for m in np.unravel_index(linear, spec.dims, order='F'))
            self.assertEqual(lin_to_multi(spec, linear), expected)

    def test_out_of_range(self):
        spec = periodic(5, 4, 3)
        with self.assertRaises(OutOfRange):
            lin_to_multi(spec, 60)
        with self.assertRaises(OutOfRange):
            multi_to_lin(spec, (5, 0, 0))
        with self.assertRaises(OutOfRange):
            multi_to_lin(spec, (0, 0))


class ConfigMappingTests(SimpleTestCase):
    def test_cell_centre_maps_back(self):
        spec = GridSpec((6, 10), (True, False), (0.0, -1.0), (TWO_PI, 1.0))
        for i in range(6):
            for j in range(10):
                self.assertEqual(config_to_cell(spec, cell_to_config(spec, (i, j))), (i, j))

    def test_centre_values(self):
        spec = GridSpec((4,), (False,), (0.0,), (4.0,))
        self.assertEqual(cell_to_config(spec, (0,)), (0.5,))
        self.assertEqual(cell_to_config(spec, (3,)), (3.5,))

    def test_upper_bound_clamps_into_last_cell(self):
        spec = GridSpec((4,), (False,), (0.0,), (4.0,))
        self.assertEqual(config_to_cell(spec, (4.0,)), (3,))
        self.assertEqual(config_to_cell(spec, (0.0,)), (0,))

    def test_wrapping_axis_reduces_modulo(self):
        spec = periodic(36)
        self.assertEqual(config_to_cell(spec, (TWO_PI + 0.1,)), config_to_cell(spec, (0.1,)))
        self.assertEqual(config_to_cell(spec, (-0.01,)), (35,))

    def test_outside_bounds(self):
        spec = GridSpec((4,), (False,), (0.0,), (4.0,))
        with self.assertRaises(OutOfBounds):
            config_to_cell(spec, (4.5,))

    def test_non_finite_values(self):
        bounded = GridSpec((4,), (False,), (0.0,), (4.0,))
        for spec in (periodic(36), bounded):
            for value in (math.nan, math.inf, -math.inf):
                with self.subTest(wrap=spec.wrap[0], value=value), self.assertRaises(OutOfBounds):
                    config_to_cell(spec, (value,))


class NeighborTests(SimpleTestCase):
    def test_interior_2d(self):
        spec = GridSpec((10, 10), (False, False), (0.0, 0.0), (1.0, 1.0))
        self.assertEqual(len(neighbors(spec, (5, 5))), 8)

    def test_corner_without_wrap(self):
        spec = GridSpec((10, 10), (False, False), (0.0, 0.0), (1.0, 1.0))
        self.assertEqual(sorted(neighbors(spec, (0, 0))), [(0, 1), (1, 0), (1, 1)])

    def test_corner_with_wrap(self):
        spec = periodic(10, 10)
        found = neighbors(spec, (9, 9))
        self.assertEqual(len(found), 8)
        self.assertIn((0, 0), found)
        self.assertIn((8, 0), found)

    def test_short_wrapping_axis_has_no_duplicates(self):
        # on a 2-cell ring, -1 and +1 land on the same cell
        spec = periodic(2, 2)
        self.assertEqual(sorted(neighbors(spec, (0, 0))), [(0, 1), (1, 0), (1, 1)])


class PackedGridTests(SimpleTestCase):
    def test_regions_match_a_dense_grid(self):
        rng = np.random.default_rng(11)
        dims = (11, 4, 3)
        bits = PackedGrid(dims, fill=True)
        dense = np.ones(dims, dtype=bool)
        for step in range(300):
            region = tuple(
                int(rng.integers(n)) if rng.random() < 0.5 else slice(None) for n in dims
            )
            value = bool(rng.random() < 0.3)
            with self.subTest(step=step, region=region, value=value):
                expected = int(np.count_nonzero(dense[region] != value))
                dense[region] = value
                self.assertEqual(bits.fill_region(region, value), expected)
                np.testing.assert_array_equal(bits.to_dense(), dense)
                self.assertEqual(bits.count(), int(dense.sum()))

    def test_single_bits(self):
        bits = PackedGrid((10, 3))
        bits.set((9, 2), True)
        bits.set((9, 2), True)
        self.assertTrue(bits.get((9, 2)))
        self.assertFalse(bits.get((8, 2)))
        self.assertEqual(bits.count(), 1)
        bits.set((9, 2), False)
        self.assertEqual(bits.count(), 0)

    def test_padding_bits_stay_clear(self):
        bits = PackedGrid((11,), fill=True)
        self.assertEqual(bits.count(), 11)
        self.assertEqual(bits.fill_region((slice(None),), True), 0)
        self.assertEqual(bits.words.shape, (2,))

    def test_axis_zero_is_one_index_or_the_whole_axis(self):
        bits = PackedGrid((10, 3))
        with self.assertRaises(GridError):
            bits.fill_region((slice(0, 3), slice(None)), True)
        with self.assertRaises(OutOfRange):
            bits.fill_region((10, slice(None)), True)

    def test_linear_indices_in_fortran_order(self):
        rng = np.random.default_rng(12)
        dense = rng.random((9, 5, 4)) < 0.4
        bits = PackedGrid.from_dense(dense)
        found = bits.linear_indices(True, np.uint32)
        self.assertEqual(found.dtype, np.uint32)
        np.testing.assert_array_equal(found, np.flatnonzero(dense.ravel(order='F')))
        np.testing.assert_array_equal(bits.linear_indices(False), np.flatnonzero(~dense.ravel(order='F')))


class CSpaceBitmapTests(SimpleTestCase):
    def test_starts_all_free(self):
        bm = CSpaceBitmap.all_free(periodic(5, 4, 3))
        self.assertEqual(bm.free_count, 60)

    def test_one_bit_per_cell(self):
        bm = CSpaceBitmap(periodic(64, 64, 64, 64))
        self.assertEqual(bm.bits.nbytes, 64 ** 4 // 8)
        self.assertEqual(bm.free_count, 64 ** 4)

    def test_byte_aligned_dump_matches_packed_cells(self):
        rng = np.random.default_rng(13)
        spec = periodic(16, 3, 5)
        bm = CSpaceBitmap(spec, rng.random(spec.size) < 0.5)
        packed = np.packbits(bm.cells, bitorder='little').tobytes()
        self.assertEqual(bm.to_bytes()[-len(packed):], packed)

    def test_set_obstacle_is_idempotent(self):
        bm = CSpaceBitmap(periodic(5, 4, 3))
        bm.set_obstacle(7)
        bm.set_obstacle(7)
        bm.set_obstacle((2, 1, 0))
        self.assertEqual(bm.free_count, 59)
        self.assertFalse(bm.is_free(7))
        self.assertFalse(bm.is_free((2, 1, 0)))

    def test_linear_and_multi_agree(self):
        bm = CSpaceBitmap(periodic(5, 4, 3))
        bm.set_obstacle((1, 2, 1))
        self.assertFalse(bm.is_free(1 + 5 * (2 + 4 * 1)))

    def test_clear_region_counts_newly_blocked(self):
        bm = CSpaceBitmap(periodic(5, 4, 3))
        bm.set_obstacle((0, 0, 0))
        self.assertEqual(bm.clear_region((0, slice(None), slice(None))), 11)
        self.assertEqual(bm.free_count, 48)

    def test_dump_round_trip(self):
        rng = np.random.default_rng(3)
        spec = GridSpec((7, 5, 3), (True, False, True), (0.0, -2.0, 0.0), (TWO_PI, 2.0, TWO_PI))
        bm = CSpaceBitmap(spec, rng.random(spec.size) < 0.6)
        with tempfile.TemporaryDirectory() as tmp:
            path = os.path.join(tmp, 'grid.csbm')
            bm.save(path)
            loaded = CSpaceBitmap.load(path)
        self.assertEqual(loaded.spec, spec)
        np.testing.assert_array_equal(loaded.cells, bm.cells)
        self.assertEqual(loaded.digest(), bm.digest())

    def test_digest_tracks_content(self):
        bm = CSpaceBitmap(periodic(4, 4))
        before = bm.digest()
        bm.set_obstacle(3)
        self.assertNotEqual(bm.digest(), before)

    def test_rejects_foreign_bytes(self):
        with self.assertRaises(GridError):
            CSpaceBitmap.from_bytes(b'P5\n')


class SliceTests(SimpleTestCase):
    def test_fixes_axes(self):
        array = np.arange(60).reshape((5, 4, 3), order='F')
        np.testing.assert_array_equal(slice_2d(array, {2: 1}), array[:, :, 1])

    def test_2d_passes_through(self):
        array = np.zeros((3, 4))
        self.assertEqual(slice_2d(array).shape, (3, 4))

    def test_needs_enough_fixed_axes(self):
        with self.assertRaises(UnsupportedDimension):
            slice_2d(np.zeros((3, 3, 3, 3)), {3: 0})

    def test_rejects_unknown_axis(self):
        with self.assertRaises(UnsupportedDimension):
            slice_2d(np.zeros((3, 3, 3)), {5: 0})
