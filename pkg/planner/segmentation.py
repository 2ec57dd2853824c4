"""
Connected free regions of a C-space bitmap.

`segment` labels the free cells with scipy's raster labeller, then folds the
wrapping axes in: the grid is padded by one cell of wrapped data on every
wrapping axis, so labels that touch across a periodic boundary meet in the
padding, and those pairs are merged as a sparse graph.
"""
import logging
from dataclasses import dataclass

import numpy as np
from scipy import ndimage
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from .bitmap import CSpaceBitmap
from .exceptions import InvalidParameters, StartOrGoalInObstacle

logger = logging.getLogger(__name__)

CONNECTIVITIES = ('faces', 'moore')


@dataclass
class LabelField:
    """labels[c] = 0 for obstacle cells, 1..component_count for free ones. Flat, axis 0 fastest."""
    dims: tuple
    labels: np.ndarray
    component_count: int

    @property
    def grid(self):
        return self.labels.reshape(self.dims, order='F')

    def label_of(self, multi):
        return int(self.grid[tuple(multi)])


def structure_for(ndim, connectivity='faces'):
    if connectivity not in CONNECTIVITIES:
        raise InvalidParameters(f'connectivity must be one of {CONNECTIVITIES}, got {connectivity!r}')
    rank = 1 if connectivity == 'faces' else ndim
    return ndimage.generate_binary_structure(ndim, rank)


def segment(bm: CSpaceBitmap, connectivity='faces') -> LabelField:
    spec = bm.spec
    free = bm.grid
    structure = structure_for(spec.ndim, connectivity)
    raw, count = ndimage.label(free, structure=structure)

    if count and any(spec.wrap):
        raw, count = _merge_across_wrap(free, raw, count, spec.wrap, structure)

    labels = _canonical(raw.ravel(order='F'))
    count = int(labels.max()) if labels.size else 0
    return LabelField(spec.dims, labels, count)


def _merge_across_wrap(free, raw, count, wrap, structure):
    pad = [(1, 1) if w else (0, 0) for w in wrap]
    # labelling the padded grid links cells across each periodic seam
    padded, _ = ndimage.label(np.pad(free, pad, mode='wrap'), structure=structure)
    mapped = np.pad(raw, pad, mode='wrap')
    both = (padded > 0) & (mapped > 0)
    # every padded component collects the original labels it touches
    rows = padded[both]
    cols = mapped[both]
    n_padded = int(padded.max())
    graph = coo_matrix(
        (np.ones(rows.size, dtype=np.int8), (rows, cols + n_padded)),
        shape=(n_padded + count + 1, n_padded + count + 1),
    )
    _, comp = connected_components(graph, directed=False)
    # rebase the components reached by original labels onto 1..k
    lut = np.zeros(count + 1, dtype=np.int64)
    lut[1:] = comp[n_padded + 1:n_padded + count + 1] + 1
    merged = np.where(raw > 0, lut[raw], 0)
    return merged, count


def _canonical(flat):
    """Relabel to 1..k by first occurrence in linear order."""
    labels = np.zeros(flat.shape, dtype=np.int32)
    nonzero = flat > 0
    if not nonzero.any():
        return labels
    values, first = np.unique(flat[nonzero], return_index=True)
    order = np.argsort(first)
    ranks = np.empty(values.size, dtype=np.int32)
    ranks[order] = np.arange(1, values.size + 1, dtype=np.int32)
    labels[nonzero] = ranks[np.searchsorted(values, flat[nonzero])]
    return labels


def segment_check(labels: LabelField, start_cell, goal_cell):
    """True when start and goal lie in different components."""
    start = labels.label_of(start_cell)
    goal = labels.label_of(goal_cell)
    if start == 0:
        raise StartOrGoalInObstacle('start', start_cell)
    if goal == 0:
        raise StartOrGoalInObstacle('goal', goal_cell)
    return start != goal


def label_image(labels: LabelField, low=64, high=224):
    """Spread labels over distinct gray levels; obstacle stays 0."""
    grid = labels.grid
    out = np.zeros(grid.shape, dtype=np.uint8)
    k = labels.component_count
    if k:
        levels = np.rint(np.linspace(low, high, k)).astype(np.uint8) if k > 1 else np.array([high], dtype=np.uint8)
        free = grid > 0
        out[free] = levels[grid[free] - 1]
    return out
