# training/synthetic.py
"""
Desk-scale synthetic tasks with planted concepts.

Every class is a code word over the concept factors: bit j of the class
index says whether factor j is on.  Vector data plants factor j along an
orthonormal direction u_j (on = +a·u_j, off = −a·u_j, amplitude a drawn
around ``signal``); image data draws factor j as a shape with OpenCV (red
disc, green stripes, blue bar).  A concept's exemplars carry only that
factor, so concept sets are the "samples exhibiting the factor".
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import cv2
import numpy as np

from utils.errors import ConfigError
from .concept_bank import ConceptBank, ConceptSet, Dataset

VECTOR_CONCEPT_NAMES = ("alpha", "beta", "gamma", "delta", "epsilon", "zeta", "eta", "theta")
IMAGE_CONCEPT_NAMES = ("red_disc", "green_stripes", "blue_bar")


@dataclass(frozen=True)
class SyntheticSpec:
    kind: str = "vector"
    n_classes: int = 4
    n_concepts: int = 2
    dim: int = 32
    image_size: int = 12
    n_train: int = 1024
    n_eval: int = 512
    n_concept: int = 128
    signal: float = 2.0
    noise: float = 0.5
    label_noise: float = 0.0

    def validate(self) -> None:
        if self.kind not in ("vector", "image"):
            raise ConfigError(f"Unknown synthetic kind: {self.kind}")
        if self.n_classes < 2 or self.n_concepts < 1:
            raise ConfigError("synthetic data needs at least 2 classes and 1 concept")
        if self.n_classes > 2 ** self.n_concepts:
            raise ConfigError(f"{self.n_concepts} concepts cannot encode {self.n_classes} classes")
        limit = self.dim if self.kind == "vector" else len(IMAGE_CONCEPT_NAMES)
        if self.n_concepts > limit:
            raise ConfigError(f"infeasible spec: {self.n_concepts} concepts but only {limit} available dimensions")
        if self.kind == "image" and self.image_size < 6:
            raise ConfigError(f"image_size must be >= 6, got {self.image_size}")
        if min(self.n_train, self.n_eval, self.n_concept) < 2:
            raise ConfigError("n_train, n_eval and n_concept must all be >= 2")
        if self.noise < 0 or self.signal <= 0 or not 0.0 <= self.label_noise < 0.5:
            raise ConfigError("need noise >= 0, signal > 0 and label_noise in [0, 0.5)")

    @property
    def concept_names(self) -> tuple[str, ...]:
        names = VECTOR_CONCEPT_NAMES if self.kind == "vector" else IMAGE_CONCEPT_NAMES
        if self.n_concepts <= len(names):
            return names[:self.n_concepts]
        return tuple(f"concept{j}" for j in range(self.n_concepts))


@dataclass(frozen=True)
class SyntheticData:
    main: Dataset
    eval: Dataset
    bank: ConceptBank
    directions: np.ndarray | None = None  # dim × k planted directions (vector data)


def class_codes(n_classes: int, n_concepts: int) -> np.ndarray:
    """n_classes × n_concepts 0/1 matrix, row c = bits of c."""
    return np.array([[(c >> j) & 1 for j in range(n_concepts)] for c in range(n_classes)], dtype=np.int64)


def _flip_labels(y: np.ndarray, n_classes: int, rate: float, rng: np.random.Generator) -> np.ndarray:
    if rate == 0.0:
        return y
    flip = rng.random(y.size) < rate
    shifted = (y + rng.integers(1, n_classes, size=y.size)) % n_classes
    return np.where(flip, shifted, y)


def _amplitudes(rng: np.random.Generator, shape, signal: float) -> np.ndarray:
    return signal * rng.uniform(0.75, 1.25, size=shape)


def _vector_data(spec: SyntheticSpec, rng: np.random.Generator) -> SyntheticData:
    basis, _ = np.linalg.qr(rng.normal(size=(spec.dim, spec.dim)))
    directions = basis[:, :spec.n_concepts]
    codes = class_codes(spec.n_classes, spec.n_concepts)

    def main_split(n: int) -> Dataset:
        y = rng.integers(0, spec.n_classes, size=n)
        signs = 2.0 * codes[y] - 1.0
        factors = signs * _amplitudes(rng, signs.shape, spec.signal)
        x = factors @ directions.T + spec.noise * rng.normal(size=(n, spec.dim))
        return Dataset(x, _flip_labels(y, spec.n_classes, spec.label_noise, rng))

    main, held_out = main_split(spec.n_train), main_split(spec.n_eval)
    concepts = []
    for j, name in enumerate(spec.concept_names):
        amp = _amplitudes(rng, (spec.n_concept, 1), spec.signal)
        samples = amp * directions[:, j] + spec.noise * rng.normal(size=(spec.n_concept, spec.dim))
        concepts.append(ConceptSet(name, j, samples))
    return SyntheticData(main, held_out, ConceptBank(concepts), directions)


def draw_factor(canvas: np.ndarray, factor: int, rng: np.random.Generator) -> None:
    """Draw concept *factor* onto an h×w×3 uint8 BGR canvas in place."""
    size = canvas.shape[0]
    if factor == 0:
        radius = max(2, size // 5)
        cx, cy = (int(v) for v in rng.integers(radius, size - radius, size=2))
        cv2.circle(canvas, (cx, cy), radius, (0, 0, 255), -1)
    elif factor == 1:
        offset = int(rng.integers(0, 3))
        for row in range(offset, size, 3):
            cv2.line(canvas, (0, row), (size - 1, row), (0, 255, 0), 1)
    else:
        width = max(2, size // 6)
        x0 = int(rng.integers(0, size - width))
        cv2.rectangle(canvas, (x0, 0), (x0 + width - 1, size - 1), (255, 0, 0), -1)


def render_image(factors, spec: SyntheticSpec, rng: np.random.Generator) -> np.ndarray:
    """3×h×w float image with the listed factors drawn over Gaussian noise."""
    canvas = np.zeros((spec.image_size, spec.image_size, 3), dtype=np.uint8)
    for factor in factors:
        draw_factor(canvas, int(factor), rng)
    image = canvas.astype(np.float64) / 255.0
    image += spec.noise * 0.2 * rng.normal(size=image.shape)
    return np.ascontiguousarray(image.transpose(2, 0, 1))


def _image_data(spec: SyntheticSpec, rng: np.random.Generator) -> SyntheticData:
    codes = class_codes(spec.n_classes, spec.n_concepts)

    def main_split(n: int) -> Dataset:
        y = rng.integers(0, spec.n_classes, size=n)
        x = np.stack([render_image(np.flatnonzero(codes[label]), spec, rng) for label in y])
        return Dataset(x, _flip_labels(y, spec.n_classes, spec.label_noise, rng))

    main, held_out = main_split(spec.n_train), main_split(spec.n_eval)
    concepts = []
    for j, name in enumerate(spec.concept_names):
        samples = np.stack([render_image([j], spec, rng) for _ in range(spec.n_concept)])
        concepts.append(ConceptSet(name, j, samples))
    return SyntheticData(main, held_out, ConceptBank(concepts))


def make_synthetic(spec: SyntheticSpec, seed: int = 0) -> SyntheticData:
    """Generate main/eval splits and the concept bank; same seed → same arrays."""
    spec.validate()
    rng = np.random.default_rng(seed)
    data = _vector_data(spec, rng) if spec.kind == "vector" else _image_data(spec, rng)
    logging.info(
        f"Generated {spec.kind} task: {spec.n_classes} classes, {spec.n_concepts} concepts, "
        f"{len(data.main)} train / {len(data.eval)} eval samples"
    )
    return data
