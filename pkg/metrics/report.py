# metrics/report.py
from __future__ import annotations

from dataclasses import asdict, dataclass, field
from typing import Any

import numpy as np

from utils.errors import DataError


def accuracy(labels, predictions) -> float:
    labels, predictions = np.asarray(labels), np.asarray(predictions)
    if labels.size == 0 or labels.shape != predictions.shape:
        raise DataError(f"need matching nonempty label/prediction arrays, got {labels.shape}, {predictions.shape}")
    return float(np.mean(labels == predictions))


def balanced_accuracy(labels, predictions) -> float:
    """Mean per-class recall over the classes present in *labels*."""
    labels, predictions = np.asarray(labels), np.asarray(predictions)
    if labels.size == 0 or labels.shape != predictions.shape:
        raise DataError(f"need matching nonempty label/prediction arrays, got {labels.shape}, {predictions.shape}")
    recalls = [np.mean(predictions[labels == c] == c) for c in np.unique(labels)]
    return float(np.mean(recalls))



@dataclass
class MetricsReport:
    """Collected measurements for one checkpoint; ``summary()`` is JSON-ready."""

    auc: list[dict[str, Any]] = field(default_factory=list)
    similarity: np.ndarray | None = None
    q_normalized: np.ndarray | None = None
    correlation: np.ndarray | None = None
    correlation_undefined: list[int] = field(default_factory=list)
    importance: list[dict[str, Any]] = field(default_factory=list)
    topk: list[dict[str, Any]] = field(default_factory=list)
    histograms: list[dict[str, Any]] = field(default_factory=list)
    trajectories: list[dict[str, Any]] = field(default_factory=list)

    def summary(self) -> dict[str, Any]:
        out: dict[str, Any] = {}
        for key, value in asdict(self).items():
            if value is None or (isinstance(value, (list, dict)) and not value):
                continue
            if isinstance(value, np.ndarray):
                value = [[None if np.isnan(v) else float(v) for v in row] for row in value]
            out[key] = value
        return out
