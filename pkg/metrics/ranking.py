# metrics/ranking.py
"""Top-k lists, joint 2D histograms and percentile trajectories of axis activations."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from utils.errors import ConfigError, DataError, MetricError

DEFAULT_GRID = 50


def topk_activated(activations, k: int, ids=None) -> list[tuple[int, float]]:
    """(sample id, activation) of the k largest activations, ties by ascending id."""
    activations = np.asarray(activations, dtype=np.float64).reshape(-1)
    ids = np.arange(activations.size) if ids is None else np.asarray(ids, dtype=np.int64)
    if ids.shape != activations.shape:
        raise DataError(f"{ids.size} ids for {activations.size} activations")
    if not 0 <= k <= activations.size:
        raise ConfigError(f"k must lie in [0, {activations.size}], got {k}")
    order = np.lexsort((ids, -activations))[:k]
    return [(int(ids[i]), float(activations[i])) for i in order]


@dataclass(frozen=True)
class JointHistogram:
    counts: np.ndarray           # g×g, row = bin on axis i, col = bin on axis j
    representatives: np.ndarray  # g×g sample ids, −1 for empty cells
    bounds: tuple[float, float, float, float]

    @property
    def grid(self) -> int:
        return self.counts.shape[0]


def _bins(values: np.ndarray, lo: float, hi: float, grid: int) -> np.ndarray:
    if hi == lo:
        return np.zeros(values.size, dtype=np.int64)
    return np.clip(np.floor((values - lo) / (hi - lo) * grid).astype(np.int64), 0, grid - 1)


def joint_histogram(acts_i, acts_j, grid: int = DEFAULT_GRID, ids=None,
                    rng: np.random.Generator | None = None) -> JointHistogram:
    """Counts over an even g×g split of the activations' bounding box.

    Each nonempty cell gets one representative sample id, drawn with *rng*.
    """
    acts_i = np.asarray(acts_i, dtype=np.float64).reshape(-1)
    acts_j = np.asarray(acts_j, dtype=np.float64).reshape(-1)
    if grid < 2:
        raise ConfigError(f"histogram grid must be >= 2, got {grid}")
    if acts_i.size != acts_j.size or acts_i.size == 0:
        raise DataError(f"need two equal-length nonempty activation vectors, got {acts_i.size} and {acts_j.size}")
    ids = np.arange(acts_i.size) if ids is None else np.asarray(ids, dtype=np.int64)
    rng = rng or np.random.default_rng(0)
    lo_i, hi_i, lo_j, hi_j = acts_i.min(), acts_i.max(), acts_j.min(), acts_j.max()
    if acts_i.size >= 2 and (hi_i == lo_i or hi_j == lo_j):
        raise MetricError("degenerate activation range on a histogram axis")

    rows, cols = _bins(acts_i, lo_i, hi_i, grid), _bins(acts_j, lo_j, hi_j, grid)
    counts = np.zeros((grid, grid), dtype=np.int64)
    np.add.at(counts, (rows, cols), 1)
    representatives = np.full((grid, grid), -1, dtype=np.int64)
    cell = rows * grid + cols
    for flat in np.unique(cell):
        members = ids[cell == flat]
        representatives.flat[flat] = members[rng.integers(members.size)]
    return JointHistogram(counts, representatives, (float(lo_i), float(hi_i), float(lo_j), float(hi_j)))


def percentile_rank(population, value: float) -> float:
    """Fraction of the population strictly below *value*."""
    population = np.asarray(population, dtype=np.float64).reshape(-1)
    if population.size == 0:
        raise DataError("percentile rank needs a nonempty reference population")
    return float(np.count_nonzero(population < value) / population.size)


@dataclass(frozen=True)
class LayerActivations:
    """Activations on axes (i, j) of every reference sample at one layer."""

    layer: int
    ids: np.ndarray
    acts_i: np.ndarray
    acts_j: np.ndarray


def percentile_trajectory(layers: Sequence[LayerActivations], sample_id: int) -> list[tuple[int, float, float]]:
    """(layer, rank_i, rank_j) of one sample through successive layers."""
    trajectory = []
    for record in layers:
        where = np.flatnonzero(np.asarray(record.ids) == sample_id)
        if where.size == 0:
            raise DataError(f"sample {sample_id} missing from layer {record.layer}")
        k = where[0]
        trajectory.append((
            record.layer,
            percentile_rank(record.acts_i, record.acts_i[k]),
            percentile_rank(record.acts_j, record.acts_j[k]),
        ))
    return trajectory
