# metrics/similarity.py
from __future__ import annotations

import numpy as np

from utils.errors import DataError, MetricError


def similarity_matrices(groups) -> tuple[np.ndarray, np.ndarray]:
    """Mean pairwise cosine similarity within and between concept groups.

    *groups* is a list of n_i×d latent arrays, one per concept.  Intra-concept
    means include the self-pairs.  Returns ``(d, q_hat)`` with
    q_hat_ij = d_ij / sqrt(d_ii·d_jj), symmetric with a unit diagonal.
    """
    if len(groups) < 2:
        raise DataError(f"similarity needs at least 2 concepts, got {len(groups)}")
    centroids = []
    for i, group in enumerate(groups):
        group = np.asarray(group, dtype=np.float64)
        if group.ndim != 2 or group.shape[0] < 2:
            raise DataError(f"concept {i} needs at least 2 latent vectors, got shape {group.shape}")
        norms = np.linalg.norm(group, axis=1)
        if np.any(norms == 0):
            raise DataError(f"concept {i} contains a zero-norm latent")
        centroids.append((group / norms[:, None]).mean(axis=0))
    units = np.stack(centroids)
    d = units @ units.T
    diag = np.diag(d).copy()
    if np.any(diag <= 0):
        raise MetricError("intra-concept similarity is zero; normalized matrix undefined")
    q_hat = d / np.sqrt(np.outer(diag, diag))
    q_hat = 0.5 * (q_hat + q_hat.T)
    np.fill_diagonal(q_hat, 1.0)
    return d, q_hat


def mean_off_diagonal(matrix: np.ndarray) -> float:
    mask = ~np.eye(matrix.shape[0], dtype=bool)
    return float(np.nanmean(matrix[mask]))
