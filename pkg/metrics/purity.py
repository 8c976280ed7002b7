# metrics/purity.py
"""
Concept purity: one-vs-all AUC of a concept's exemplars along an axis.

AUC is the probability that a random positive outranks a random negative,
ties counted one half, computed from the Mann-Whitney rank sum.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.stats import rankdata

from utils.errors import MetricError

DEFAULT_FOLDS = 5


def purity_auc(positive, negative) -> float:
    positive = np.asarray(positive, dtype=np.float64).reshape(-1)
    negative = np.asarray(negative, dtype=np.float64).reshape(-1)
    n_pos, n_neg = positive.size, negative.size
    if n_pos == 0 or n_neg == 0:
        raise MetricError(f"AUC needs both classes (got {n_pos} positives, {n_neg} negatives)")
    ranks = rankdata(np.concatenate([positive, negative]))
    u = ranks[:n_pos].sum() - n_pos * (n_pos + 1) / 2.0
    return float(u / (n_pos * n_neg))


def split_scores(scores, labels, concept: int) -> tuple[np.ndarray, np.ndarray]:
    scores = np.asarray(scores, dtype=np.float64)
    labels = np.asarray(labels)
    return scores[labels == concept], scores[labels != concept]


def purity_auc_folds(positive, negative, folds: int = DEFAULT_FOLDS,
                     rng: np.random.Generator | None = None) -> tuple[float, float]:
    """Mean and std of the AUC over stratified random folds."""
    positive = np.asarray(positive, dtype=np.float64).reshape(-1)
    negative = np.asarray(negative, dtype=np.float64).reshape(-1)
    folds = min(folds, positive.size, negative.size)
    if folds < 1:
        raise MetricError("AUC needs both classes")
    rng = rng or np.random.default_rng(0)
    pos_parts = np.array_split(rng.permutation(positive), folds)
    neg_parts = np.array_split(rng.permutation(negative), folds)
    values = np.array([purity_auc(p, n) for p, n in zip(pos_parts, neg_parts)])
    return float(values.mean()), float(values.std())


@dataclass(frozen=True)
class AxisAuc:
    axis: int
    concept: str
    auc: float
    auc_std: float


def concept_aucs(activations: np.ndarray, labels: np.ndarray, concepts: list[tuple[str, int]],
                 folds: int = DEFAULT_FOLDS, rng: np.random.Generator | None = None) -> list[AxisAuc]:
    """AUC of every concept on its own axis; *labels* hold each sample's concept axis."""
    rng = rng or np.random.default_rng(0)
    results = []
    for name, axis in concepts:
        pos, neg = split_scores(activations[:, axis], labels, axis)
        auc = purity_auc(pos, neg)
        _, std = purity_auc_folds(pos, neg, folds, rng)
        results.append(AxisAuc(axis, name, auc, std))
    return results


def best_axis_auc(activations: np.ndarray, labels: np.ndarray, concept: int) -> tuple[int, float]:
    """Best single-axis AUC for *concept* over every latent axis (ties → lowest axis)."""
    best_axis, best = -1, -np.inf
    for axis in range(activations.shape[1]):
        pos, neg = split_scores(activations[:, axis], labels, concept)
        auc = purity_auc(pos, neg)
        if auc > best:
            best_axis, best = axis, auc
    return best_axis, float(best)


def compare_reducers(latents: np.ndarray, labels: np.ndarray, concepts: list[tuple[str, int]],
                     reducers) -> list[tuple[str, int, str, float]]:
    """Purity AUC per concept under each reducer, on the same n×d×h×w CW outputs."""
    if latents.ndim != 4:
        raise MetricError(f"reducer comparison needs feature-map latents, got shape {latents.shape}")
    rows = []
    for reducer in reducers:
        acts = reducer.reduce_many(latents)
        for name, axis in concepts:
            pos, neg = split_scores(acts[:, axis], labels, axis)
            rows.append((reducer.kind, axis, name, purity_auc(pos, neg)))
    return rows
