# metrics/importance.py
"""
Permutation concept importance.

The latent at the model's CW position is computed once; axis j is then
shuffled across test samples and the downstream loss recomputed.  CI_j is
the mean over repetitions of e_switch / e_orig.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import log_softmax

from utils.errors import ConfigError, MetricError
from .activations import slot_latents

LOSS_KINDS = ("multiclass", "balanced_binary")


@dataclass(frozen=True)
class ImportanceResult:
    axis: int
    loss_kind: str
    ci_mean: float
    ci_std: float
    ratios: tuple[float, ...]
    e_orig: float

    @property
    def repetitions(self) -> int:
        return len(self.ratios)


def multiclass_loss(logits: np.ndarray, labels: np.ndarray) -> float:
    log_p = log_softmax(logits, axis=1)
    return float(-log_p[np.arange(labels.size), labels].mean())


def balanced_binary_loss(logits: np.ndarray, labels: np.ndarray, target: int) -> float:
    """Class-balanced binary cross entropy of ``p(target)`` against ``labels == target``."""
    positive = labels == target
    if positive.all() or not positive.any():
        raise MetricError(f"balanced binary loss needs both target {target} and non-target samples")
    log_p = log_softmax(logits, axis=1)
    log_target = log_p[:, target]
    # log(1 − p) from the remaining classes' probabilities
    others = np.delete(log_p, target, axis=1)
    log_rest = np.logaddexp.reduce(others, axis=1)
    return float(0.5 * -log_target[positive].mean() + 0.5 * -log_rest[~positive].mean())


def _loss_fn(loss_kind: str, target: int | None):
    if loss_kind == "multiclass":
        return multiclass_loss
    if loss_kind == "balanced_binary":
        if target is None:
            raise ConfigError("balanced_binary importance needs a target class")
        return lambda logits, labels: balanced_binary_loss(logits, labels, target)
    raise ConfigError(f"Unknown importance loss kind: {loss_kind}")


class _Downstream:
    """Frozen eval-mode latent at a slot plus the loss of the rest of the network."""

    def __init__(self, model, x: np.ndarray, y: np.ndarray, loss_kind: str, target: int | None):
        if x.shape[0] < 2:
            raise MetricError(f"concept importance needs at least 2 test samples, got {x.shape[0]}")
        self.model = model
        self.index = model.cw_layer
        self.labels = np.asarray(y, dtype=np.int64)
        self.loss = _loss_fn(loss_kind, target)
        self.latents = slot_latents(model, x, self.index)
        self.e_orig = self(self.latents)
        if not self.e_orig > 0:
            raise MetricError("original loss is zero; importance ratio undefined")

    def __call__(self, latents: np.ndarray) -> float:
        logits = self.model.forward_from_slot(latents, self.index, "eval").numpy()
        return self.loss(logits, self.labels)

    def switched(self, axis: int, permutation: np.ndarray) -> float:
        shuffled = self.latents.copy()
        shuffled[:, axis] = self.latents[permutation, axis]
        return self(shuffled)


def concept_importance(model, x: np.ndarray, y: np.ndarray, axis: int, loss_kind: str = "multiclass",
                       target: int | None = None, repetitions: int = 5,
                       rng: np.random.Generator | None = None) -> ImportanceResult:
    downstream = _Downstream(model, x, y, loss_kind, target)
    return _importance(downstream, axis, loss_kind, repetitions, rng or np.random.default_rng(0))


def _importance(downstream: _Downstream, axis: int, loss_kind: str, repetitions: int,
                rng: np.random.Generator) -> ImportanceResult:
    if repetitions < 1:
        raise ConfigError(f"repetitions must be >= 1, got {repetitions}")
    if not 0 <= axis < downstream.latents.shape[1]:
        raise ConfigError(f"axis {axis} outside [0, {downstream.latents.shape[1]})")
    n = downstream.latents.shape[0]
    ratios = tuple(
        downstream.switched(axis, rng.permutation(n)) / downstream.e_orig for _ in range(repetitions)
    )
    return ImportanceResult(axis, loss_kind, float(np.mean(ratios)), float(np.std(ratios)),
                            ratios, downstream.e_orig)


def importance_profile(model, x: np.ndarray, y: np.ndarray, loss_kind: str = "multiclass",
                       target: int | None = None, repetitions: int = 5,
                       rng: np.random.Generator | None = None) -> list[ImportanceResult]:
    """CI for every axis of the slot, sharing one forward pass to the slot."""
    rng = rng or np.random.default_rng(0)
    downstream = _Downstream(model, x, y, loss_kind, target)
    return [
        _importance(downstream, axis, loss_kind, repetitions, rng)
        for axis in range(downstream.latents.shape[1])
    ]


def summarize_profile(profile: list[ImportanceResult]) -> dict[str, float]:
    means = np.array([r.ci_mean for r in profile])
    top = int(means.argmax())
    return {"max_axis": profile[top].axis, "max_ci": float(means[top]), "mean_ci": float(means.mean())}
