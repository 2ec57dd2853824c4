"""
The C-space bitmap: an n-D grid over the configuration space, 1 = free,
0 = C-obstacle, one bit per cell.

Linear cell indices put axis 0 fastest:
    linear = m0 + N0 * (m1 + N1 * (m2 + ...))
which is numpy's Fortran order. Dense copies (`cells`, the dump) use that
order, so slicing the grid and addressing cells by linear index always agree.
"""
import hashlib
import itertools
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from PIL import Image

from .exceptions import GridError, OutOfBounds, OutOfRange, UnsupportedDimension

TWO_PI = 2.0 * math.pi
PERIOD_TOL = 1e-9
MAGIC = b'CSBM'


@dataclass(frozen=True)
class GridSpec:
    dims: tuple
    wrap: tuple
    lo: tuple
    hi: tuple

    def __post_init__(self):
        for name in ('dims', 'wrap', 'lo', 'hi'):
            object.__setattr__(self, name, tuple(getattr(self, name)))
        object.__setattr__(self, 'dims', tuple(int(n) for n in self.dims))
        object.__setattr__(self, 'wrap', tuple(bool(w) for w in self.wrap))
        object.__setattr__(self, 'lo', tuple(float(v) for v in self.lo))
        object.__setattr__(self, 'hi', tuple(float(v) for v in self.hi))
        n = len(self.dims)
        if n == 0 or not (len(self.wrap) == len(self.lo) == len(self.hi) == n):
            raise GridError('dims, wrap, lo and hi must have the same non-zero length')
        for i in range(n):
            if self.dims[i] < 2:
                raise GridError(f'axis {i}: resolution must be >= 2, got {self.dims[i]}')
            if not self.lo[i] < self.hi[i]:
                raise GridError(f'axis {i}: lo must be < hi')
            if self.wrap[i] and abs((self.hi[i] - self.lo[i]) - TWO_PI) > PERIOD_TOL:
                raise GridError(f'axis {i}: a wrapping axis must span 2*pi')

    @property
    def ndim(self):
        return len(self.dims)

    @property
    def size(self):
        return math.prod(self.dims)

    def step(self, axis):
        return (self.hi[axis] - self.lo[axis]) / self.dims[axis]

    def to_dict(self):
        return {'dims': list(self.dims), 'wrap': list(self.wrap), 'lo': list(self.lo), 'hi': list(self.hi)}


def _check_multi(spec, multi):
    if len(multi) != spec.ndim:
        raise OutOfRange(f'expected {spec.ndim} indices, got {len(multi)}')
    for i, (m, n) in enumerate(zip(multi, spec.dims)):
        if not 0 <= m < n:
            raise OutOfRange(f'axis {i}: index {m} outside 0..{n - 1}')


def lin_to_multi(spec: GridSpec, linear):
    if not 0 <= linear < spec.size:
        raise OutOfRange(f'linear index {linear} outside 0..{spec.size - 1}')
    multi = []
    rest = int(linear)
    for n in spec.dims:
        rest, m = divmod(rest, n)
        multi.append(m)
    return tuple(multi)


def multi_to_lin(spec: GridSpec, multi):
    _check_multi(spec, multi)
    linear = 0
    for m, n in zip(reversed(multi), reversed(spec.dims)):
        linear = linear * n + int(m)
    return linear


def cell_to_config(spec: GridSpec, multi):
    """Configuration at the centre of the cell."""
    _check_multi(spec, multi)
    return tuple(
        lo + (m + 0.5) * (hi - lo) / n
        for m, n, lo, hi in zip(multi, spec.dims, spec.lo, spec.hi)
    )


def config_to_cell(spec: GridSpec, q):
    if len(q) != spec.ndim:
        raise OutOfBounds(f'expected {spec.ndim} values, got {len(q)}')
    multi = []
    for i, value in enumerate(q):
        lo, hi, n = spec.lo[i], spec.hi[i], spec.dims[i]
        if not math.isfinite(value):
            raise OutOfBounds(f'axis {i}: {value} is not a finite coordinate')
        if spec.wrap[i]:
            offset = (value - lo) % (hi - lo)
        else:
            if not lo - PERIOD_TOL <= value <= hi + PERIOD_TOL:
                raise OutOfBounds(f'axis {i}: {value} outside [{lo}, {hi}]')
            offset = value - lo
        m = math.floor(offset / ((hi - lo) / n))
        multi.append(min(max(m, 0), n - 1))
    return tuple(multi)


@lru_cache(maxsize=None)
def moore_offsets(ndim):
    return tuple(o for o in itertools.product((-1, 0, 1), repeat=ndim) if any(o))


def neighbors(spec: GridSpec, multi):
    """Moore neighbourhood, wrapped on wrapping axes, clipped on the others."""
    _check_multi(spec, multi)
    out = {}
    for offset in moore_offsets(spec.ndim):
        cell = []
        for m, o, n, w in zip(multi, offset, spec.dims, spec.wrap):
            v = m + o
            if w:
                v %= n
            elif not 0 <= v < n:
                break
            cell.append(v)
        else:
            cell = tuple(cell)
            if cell != tuple(multi):
                out[cell] = None
    return list(out)


POPCOUNT = np.array([bin(b).count('1') for b in range(256)], dtype=np.uint8)


class PackedGrid:
    """
    An n-D grid of bits packed along axis 0: cell (m0, m1, ...) is bit m0 % 8
    of byte `words[m0 // 8, m1, ...]`, least significant bit first. Padding
    bits past the end of axis 0 stay 0.

    Regions are tuples with one entry per axis, either an index (the axis is
    fixed) or `slice(None)` (the whole axis); axes past 0 also take any
    basic slice.
    """

    def __init__(self, dims, fill=False, words=None):
        self.dims = tuple(int(n) for n in dims)
        if words is None:
            shape = ((self.dims[0] + 7) // 8,) + self.dims[1:]
            words = np.zeros(shape, dtype=np.uint8)
            if fill:
                words[...] = self._row_mask().reshape((-1,) + (1,) * (len(self.dims) - 1))
        self.words = words

    @classmethod
    def from_dense(cls, dense):
        dense = np.asarray(dense, dtype=bool)
        return cls(dense.shape, words=np.packbits(dense, axis=0, bitorder='little'))

    def _row_mask(self):
        mask = np.full((self.dims[0] + 7) // 8, 0xFF, dtype=np.uint8)
        tail = self.dims[0] % 8
        if tail:
            mask[-1] = (1 << tail) - 1
        return mask

    def get(self, multi):
        m0 = int(multi[0])
        return bool((int(self.words[(m0 >> 3,) + tuple(multi[1:])]) >> (m0 & 7)) & 1)

    def set(self, multi, value):
        m0 = int(multi[0])
        index = (m0 >> 3,) + tuple(multi[1:])
        bit = 1 << (m0 & 7)
        word = int(self.words[index])
        self.words[index] = word | bit if value else word & ~bit & 0xFF

    def fill_region(self, region, value):
        """Set every bit of the region to `value`; returns how many bits changed."""
        if len(region) != len(self.dims):
            raise GridError(f'expected a region over {len(self.dims)} axes, got {len(region)}')
        index = []
        for axis, (entry, n) in enumerate(zip(region, self.dims)):
            if isinstance(entry, slice):
                if axis == 0 and entry != slice(None):
                    raise GridError('axis 0 of a region is either one index or the whole axis')
                index.append(entry)
                continue
            m = int(entry)
            if not 0 <= m < n:
                raise OutOfRange(f'axis {axis}: index {m} outside 0..{n - 1}')
            index.append(slice(m >> 3, (m >> 3) + 1) if axis == 0 else slice(m, m + 1))
        if isinstance(region[0], slice):
            mask = self._row_mask()
        else:
            mask = np.array([1 << (int(region[0]) & 7)], dtype=np.uint8)
        view = self.words[tuple(index)]
        mask = mask.reshape((-1,) + (1,) * (view.ndim - 1))
        if value:
            changed = POPCOUNT[~view & mask].sum(dtype=np.int64)
            view |= mask
        else:
            changed = POPCOUNT[view & mask].sum(dtype=np.int64)
            view &= ~mask
        return int(changed)

    def count(self):
        return int(POPCOUNT[self.words].sum(dtype=np.int64))

    def to_dense(self):
        return np.unpackbits(self.words, axis=0, count=self.dims[0], bitorder='little').astype(bool)

    def linear_indices(self, value, dtype=np.int64):
        """Linear indices (axis 0 fastest) of the cells equal to `value`, unpacked one slab of the last axis at a time."""
        if len(self.dims) == 1:
            return np.flatnonzero(self.to_dense() == value).astype(dtype)
        stride = math.prod(self.dims[:-1])
        parts = []
        for k in range(self.dims[-1]):
            slab = np.unpackbits(self.words[..., k], axis=0, count=self.dims[0], bitorder='little')
            hits = np.flatnonzero(slab.ravel(order='F') == value).astype(dtype)
            parts.append(hits + dtype(k * stride))
        return np.concatenate(parts)

    def copy(self):
        return PackedGrid(self.dims, words=self.words.copy())

    @property
    def nbytes(self):
        return self.words.nbytes


class CSpaceBitmap:
    """
    One bit per cell, 1 = free. Starts all free.

    `grid` (n-D) and `cells` (flat, axis 0 fastest) unpack to dense bool
    copies for labelling and export; updates go through `set_obstacle` and
    `clear_region`.
    """

    def __init__(self, spec: GridSpec, cells=None, *, bits=None):
        self.spec = spec
        if bits is None:
            if cells is None:
                bits = PackedGrid(spec.dims, fill=True)
            else:
                cells = np.asarray(cells, dtype=bool)
                if cells.shape != (spec.size,):
                    raise GridError(f'expected {spec.size} cells, got {cells.shape}')
                bits = PackedGrid.from_dense(cells.reshape(spec.dims, order='F'))
        self.bits = bits

    @classmethod
    def all_free(cls, spec):
        return cls(spec)

    @property
    def grid(self):
        return self.bits.to_dense()

    @property
    def cells(self):
        return self.grid.ravel(order='F')

    def _multi(self, idx):
        if isinstance(idx, (int, np.integer)):
            return lin_to_multi(self.spec, idx)
        _check_multi(self.spec, idx)
        return tuple(idx)

    def is_free(self, idx):
        return self.bits.get(self._multi(idx))

    def set_obstacle(self, idx):
        self.bits.set(self._multi(idx), False)

    def clear_region(self, region):
        """Mark a region as obstacle; returns how many cells were free before."""
        return self.bits.fill_region(region, False)

    @property
    def free_count(self):
        return self.bits.count()

    def copy(self):
        return CSpaceBitmap(self.spec, bits=self.bits.copy())

    # --- dump format ---

    def to_bytes(self):
        spec = self.spec
        header = [
            np.array([spec.ndim], dtype='<u8'),
            np.array(spec.dims, dtype='<u8'),
            np.array(spec.wrap, dtype='<u8'),
            np.array(spec.lo, dtype='<f8'),
            np.array(spec.hi, dtype='<f8'),
        ]
        if spec.dims[0] % 8 == 0:
            # no padding bits, so the words already are the dump layout
            packed = self.bits.words.ravel(order='F')
        else:
            packed = np.packbits(self.cells, bitorder='little')
        return MAGIC + b''.join(h.tobytes() for h in header) + packed.tobytes()

    @classmethod
    def from_bytes(cls, data):
        if data[:4] != MAGIC:
            raise GridError('not a C-space bitmap dump')
        pos = 4
        n = int(np.frombuffer(data, dtype='<u8', count=1, offset=pos)[0])
        pos += 8

        def read(dtype):
            nonlocal pos
            values = np.frombuffer(data, dtype=dtype, count=n, offset=pos)
            pos += 8 * n
            return values

        dims, wrap, lo, hi = read('<u8'), read('<u8'), read('<f8'), read('<f8')
        spec = GridSpec(tuple(int(d) for d in dims), tuple(bool(w) for w in wrap), tuple(lo), tuple(hi))
        packed = np.frombuffer(data, dtype=np.uint8, offset=pos)
        cells = np.unpackbits(packed, count=spec.size, bitorder='little').astype(bool)
        return cls(spec, cells)

    def save(self, path):
        with open(path, 'wb') as fh:
            fh.write(self.to_bytes())

    @classmethod
    def load(cls, path):
        with open(path, 'rb') as fh:
            return cls.from_bytes(fh.read())

    def digest(self):
        return hashlib.sha256(self.to_bytes()).hexdigest()


def slice_2d(array, fixed=None):
    """Reduce an n-D array to 2D by fixing every axis named in `fixed` {axis: index}."""
    fixed = dict(fixed or {})
    if any(not 0 <= axis < array.ndim for axis in fixed):
        raise UnsupportedDimension(f'slice names an axis outside 0..{array.ndim - 1}')
    if array.ndim - len(fixed) != 2:
        raise UnsupportedDimension(
            f'{array.ndim}-D grid needs {array.ndim - 2} fixed axes for a 2D export, got {len(fixed)}'
        )
    index = tuple(fixed.get(axis, slice(None)) for axis in range(array.ndim))
    return array[index]


def write_pgm(image2d, path, marks=None):
    """
    Write a uint8 2D array (axis 0 = horizontal, axis 1 = vertical, upward) as
    a binary PGM. `marks` maps (i, j) cells to gray levels drawn on top.
    """
    pixels = np.array(image2d, dtype=np.uint8)
    for (i, j), level in (marks or {}).items():
        pixels[i, j] = level
    Image.fromarray(np.ascontiguousarray(pixels.T[::-1]), mode='L').save(path, format='PPM')
