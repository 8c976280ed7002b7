# training/concept_bank.py
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator

import numpy as np

from utils.errors import ConfigError, DataError, DimensionError


@dataclass(frozen=True)
class Dataset:
    """Inputs ``x`` (n × input_shape) with integer labels ``y``."""

    x: np.ndarray
    y: np.ndarray

    def __post_init__(self) -> None:
        if self.x.shape[0] != self.y.shape[0]:
            raise DimensionError(f"{self.x.shape[0]} inputs but {self.y.shape[0]} labels")
        if self.x.shape[0] == 0:
            raise DataError("dataset is empty")

    def __len__(self) -> int:
        return self.x.shape[0]

    @property
    def input_shape(self) -> tuple[int, ...]:
        return tuple(self.x.shape[1:])

    @property
    def n_classes(self) -> int:
        return int(self.y.max()) + 1

    def batches(self, batch_size: int, rng: np.random.Generator | None = None) -> Iterator[tuple[np.ndarray, np.ndarray]]:
        """Mini-batches in shuffled (or natural) order; a trailing batch of one sample is dropped."""
        order = rng.permutation(len(self)) if rng is not None else np.arange(len(self))
        for start in range(0, len(self), batch_size):
            idx = order[start:start + batch_size]
            if idx.size < 2:
                break
            yield self.x[idx], self.y[idx]


@dataclass(frozen=True)
class ConceptSet:
    """Exemplars X_c of one concept, aligned to column ``axis`` of Q."""

    name: str
    axis: int
    samples: np.ndarray

    def __len__(self) -> int:
        return self.samples.shape[0]


class ConceptBank:
    """The auxiliary concept datasets, one per aligned axis."""

    def __init__(self, concepts: list[ConceptSet]):
        axes = [c.axis for c in concepts]
        if len(set(axes)) != len(axes):
            raise ConfigError(f"concept axes must be distinct, got {axes}")
        names = [c.name for c in concepts]
        if len(set(names)) != len(names):
            raise ConfigError(f"concept names must be distinct, got {names}")
        for concept in concepts:
            if concept.axis < 0:
                raise ConfigError(f"concept '{concept.name}' has negative axis {concept.axis}")
            if len(concept) == 0:
                raise DataError(f"concept '{concept.name}' has no samples")
        self.concepts = sorted(concepts, key=lambda c: c.axis)

    @property
    def k(self) -> int:
        return len(self.concepts)

    def __len__(self) -> int:
        return self.k

    def __iter__(self) -> Iterator[ConceptSet]:
        return iter(self.concepts)

    @property
    def names(self) -> list[str]:
        return [c.name for c in self.concepts]

    def by_axis(self, axis: int) -> ConceptSet:
        for concept in self.concepts:
            if concept.axis == axis:
                return concept
        raise DataError(f"no concept is assigned to axis {axis}")

    def sample(self, rng: np.random.Generator, batch_size: int) -> list[tuple[ConceptSet, np.ndarray]]:
        """One mini-batch per concept.

        A concept with exactly ``batch_size`` exemplars contributes all of them
        in stored order; smaller sets are drawn with replacement.
        """
        drawn = []
        for concept in self.concepts:
            n = len(concept)
            if n == batch_size:
                idx = np.arange(n)
            else:
                idx = rng.choice(n, size=batch_size, replace=n < batch_size)
            drawn.append((concept, concept.samples[idx]))
        return drawn

    def labelled(self) -> tuple[np.ndarray, np.ndarray]:
        """All exemplars stacked, with each sample labelled by its concept's axis."""
        x = np.concatenate([c.samples for c in self.concepts], axis=0)
        y = np.concatenate([np.full(len(c), c.axis, dtype=np.int64) for c in self.concepts])
        return x, y

    def head(self, per_concept: int) -> "ConceptBank":
        """Bank restricted to the first *per_concept* exemplars of every concept."""
        return ConceptBank([ConceptSet(c.name, c.axis, c.samples[:per_concept]) for c in self.concepts])
