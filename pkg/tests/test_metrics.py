# tests/test_metrics.py
import logging

import numpy as np
import pytest

from metrics import (
    LayerActivations,
    accuracy,
    axis_correlation,
    balanced_accuracy,
    balanced_binary_loss,
    best_axis_auc,
    compare_reducers,
    concept_importance,
    importance_profile,
    joint_histogram,
    mean_abs_correlation,
    occlusion_map,
    percentile_rank,
    percentile_trajectory,
    purity_auc,
    purity_auc_folds,
    similarity_matrices,
    slot_activations,
    topk_activated,
)
from models import ConvNetwork, MlpNetwork
from numerics import Tensor
from reducers import MaxReducer, MeanReducer
from utils.errors import ConfigError, DataError, MetricError


# ── Purity ────────────────────────────────────────────────────────────────────

def _pairwise_auc(pos, neg):
    wins = sum(1.0 if p > n else 0.5 if p == n else 0.0 for p in pos for n in neg)
    return wins / (len(pos) * len(neg))


def test_auc_matches_pairwise_count_with_ties():
    rng = np.random.default_rng(5)
    for _ in range(200):
        scores = rng.integers(0, 6, size=30).astype(float)
        n_pos = int(rng.integers(1, 30))
        pos, neg = scores[:n_pos], scores[n_pos:]
        assert purity_auc(pos, neg) == _pairwise_auc(pos, neg)


def test_auc_edge_cases():
    assert purity_auc([2.0, 3.0], [0.0, 1.0]) == 1.0
    assert purity_auc([1.0, 1.0], [1.0]) == 0.5
    with pytest.raises(MetricError):
        purity_auc([], [1.0])
    assert purity_auc_folds(np.arange(10.0) + 10, np.arange(10.0)) == (1.0, 0.0)


def test_best_axis_finds_the_separating_axis(rng):
    acts = rng.normal(size=(40, 4))
    labels = np.repeat([0, 1], 20)
    acts[:20, 2] += 10.0
    assert best_axis_auc(acts, labels, 0) == (2, 1.0)


def test_compare_reducers_needs_feature_maps(rng):
    labels = np.repeat([0, 1], 5)
    with pytest.raises(MetricError):
        compare_reducers(rng.normal(size=(10, 2)), labels, [("a", 0)], [MeanReducer()])
    rows = compare_reducers(rng.normal(size=(10, 2, 3, 3)), labels, [("a", 0), ("b", 1)], [MeanReducer(), MaxReducer()])
    assert [(kind, axis) for kind, axis, _, _ in rows] == [("mean", 0), ("mean", 1), ("max", 0), ("max", 1)]


# ── Similarity and correlation ────────────────────────────────────────────────

def test_similarity_matches_double_loop(rng):
    groups = [rng.normal(size=(n, 5)) + shift for n, shift in ((4, 0.0), (6, 1.0), (3, -0.5))]

    def cos(a, b):
        return a @ b / (np.linalg.norm(a) * np.linalg.norm(b))

    d, q_hat = similarity_matrices(groups)
    for i, gi in enumerate(groups):
        for j, gj in enumerate(groups):
            expected = np.mean([cos(a, b) for a in gi for b in gj])
            assert d[i, j] == pytest.approx(expected, abs=1e-12)
    np.testing.assert_allclose(np.diag(q_hat), 1.0)
    np.testing.assert_array_equal(q_hat, q_hat.T)
    assert q_hat[0, 1] == pytest.approx(d[0, 1] / np.sqrt(d[0, 0] * d[1, 1]))


def test_similarity_rejects_bad_groups(rng):
    with pytest.raises(DataError):
        similarity_matrices([rng.normal(size=(3, 2))])
    with pytest.raises(DataError):
        similarity_matrices([rng.normal(size=(3, 2)), np.zeros((3, 2))])


def test_correlation_flags_constant_axes(rng, caplog):
    z = rng.normal(size=(3, 50))
    z[1] = 4.0
    with caplog.at_level(logging.WARNING):
        corr, undefined = axis_correlation(z)
    assert undefined.tolist() == [False, True, False]
    assert np.isnan(corr[1]).all() and np.isnan(corr[:, 1]).all()
    assert corr[0, 2] == pytest.approx(abs(np.corrcoef(z[0], z[2])[0, 1]))
    assert mean_abs_correlation(z) == pytest.approx(corr[0, 2])
    assert "zero variance" in caplog.text


def test_whitened_outputs_are_uncorrelated(rng):
    model = MlpNetwork(6, 3, hidden=4, variant="cw", rng=rng, slot_options={"whitening_mode": "exact", "eps": 0.0})
    x = rng.normal(size=(100, 6))
    latents = model.slot_output(x, 0, "train").numpy()
    assert mean_abs_correlation(latents.T) < 1e-8


# ── Importance ────────────────────────────────────────────────────────────────

def test_importance_is_exactly_one_for_an_unused_axis(rng):
    model = MlpNetwork(4, 3, hidden=5, variant="cw", rng=rng)
    w = model.weights["fc2.weight"].numpy().copy()
    w[2] = 0.0
    model.weights["fc2.weight"] = Tensor(w, requires_grad=True)
    x, y = rng.normal(size=(30, 4)), rng.integers(0, 3, size=30)
    result = concept_importance(model, x, y, axis=2, repetitions=5, rng=rng)
    assert result.ci_mean == 1.0 and result.ci_std == 0.0
    assert result.repetitions == 5
    profile = importance_profile(model, x, y, repetitions=3, rng=rng)
    assert [r.axis for r in profile] == list(range(5))


def test_importance_loss_validation(rng):
    model = MlpNetwork(4, 3, hidden=5, variant="cw", rng=rng)
    x, y = rng.normal(size=(10, 4)), rng.integers(0, 3, size=10)
    with pytest.raises(ConfigError):
        concept_importance(model, x, y, 0, loss_kind="balanced_binary")
    with pytest.raises(ConfigError):
        concept_importance(model, x, y, 0, loss_kind="hinge")
    with pytest.raises(ConfigError):
        concept_importance(model, x, y, 9)
    with pytest.raises(MetricError):
        balanced_binary_loss(np.zeros((3, 2)), np.zeros(3, dtype=int), 0)


def test_balanced_binary_loss_weights_classes_equally():
    logits = np.log(np.array([[0.5, 0.25, 0.25], [0.25, 0.5, 0.25], [0.2, 0.4, 0.4]]))
    labels = np.array([0, 1, 2])
    expected = 0.5 * -np.log(0.5) + 0.5 * -np.mean(np.log([0.75, 0.8]))
    assert balanced_binary_loss(logits, labels, 0) == pytest.approx(expected)


# ── Ranking ───────────────────────────────────────────────────────────────────

def test_topk_breaks_ties_by_id():
    assert topk_activated([1.0, 3.0, 3.0, 2.0], 2) == [(1, 3.0), (2, 3.0)]
    assert topk_activated([1.0, 3.0, 3.0, 2.0], 3, ids=[9, 7, 5, 1]) == [(5, 3.0), (7, 3.0), (1, 2.0)]
    assert topk_activated([1.0], 0) == []
    with pytest.raises(ConfigError):
        topk_activated([1.0], 2)


def test_joint_histogram_counts_every_sample(rng):
    a, b = rng.normal(size=200), rng.normal(size=200)
    hist = joint_histogram(a, b, grid=5, rng=rng)
    assert hist.counts.sum() == 200
    assert hist.counts[4, :].sum() >= 1 and hist.counts[:, 4].sum() >= 1
    empty = hist.counts == 0
    assert np.all(hist.representatives[empty] == -1)
    for row, col in zip(*np.nonzero(~empty)):
        rep = hist.representatives[row, col]
        assert int(np.clip(np.floor((a[rep] - a.min()) / np.ptp(a) * 5), 0, 4)) == row


def test_joint_histogram_single_sample_and_degenerate_range():
    hist = joint_histogram([0.3], [0.7], grid=4)
    assert hist.counts[0, 0] == 1 and hist.counts.sum() == 1
    assert hist.representatives[0, 0] == 0
    with pytest.raises(MetricError):
        joint_histogram([1.0, 1.0], [0.0, 2.0])
    with pytest.raises(ConfigError):
        joint_histogram([0.0, 1.0], [0.0, 1.0], grid=1)


def test_percentile_trajectory():
    layers = [
        LayerActivations(0, np.array([0, 1, 2]), np.array([1.0, 2.0, 3.0]), np.array([3.0, 2.0, 1.0])),
        LayerActivations(1, np.array([2, 1, 0]), np.array([0.0, 5.0, 1.0]), np.array([1.0, 1.0, 1.0])),
    ]
    trajectory = percentile_trajectory(layers, 1)
    assert trajectory == [(0, pytest.approx(1 / 3), pytest.approx(1 / 3)), (1, pytest.approx(2 / 3), 0.0)]
    assert percentile_rank([1.0, 2.0], 0.5) == 0.0
    with pytest.raises(DataError):
        percentile_trajectory(layers, 7)


# ── Occlusion ─────────────────────────────────────────────────────────────────

def test_occlusion_without_fill_changes_nothing(rng):
    model = ConvNetwork((3, 8, 8), 2, variant="cw", cw_layer=0, rng=rng)
    image = rng.normal(size=(3, 8, 8))
    result = occlusion_map(model, image, axis=1, fill=None)
    assert result.drops.shape == (7, 7)
    np.testing.assert_allclose(result.drops, 0.0, atol=1e-12)
    assert result.receptive_field.shape == result.drops.shape


def test_occlusion_drop_is_measured_against_the_baseline(rng):
    model = ConvNetwork((3, 8, 8), 2, variant="cw", cw_layer=0, rng=rng)
    image = rng.normal(size=(3, 8, 8))
    result = occlusion_map(model, image, axis=0, patch=4, stride=4)
    assert result.drops.shape == (2, 2)
    occluded = image.copy()
    occluded[:, 4:8, 0:4] = 0.0
    acts = slot_activations(model, np.stack([image, occluded]))[:, 0]
    assert result.drops[1, 0] == pytest.approx(acts[0] - acts[1], abs=1e-12)
    assert result.baseline == pytest.approx(acts[0], abs=1e-12)
    with pytest.raises(ConfigError):
        occlusion_map(model, image, axis=0, patch=9)


# ── Classification ────────────────────────────────────────────────────────────

def test_accuracy_and_balanced_accuracy():
    labels, predictions = [0, 0, 0, 1], [0, 0, 0, 0]
    assert accuracy(labels, predictions) == 0.75
    assert balanced_accuracy(labels, predictions) == 0.5
    with pytest.raises(DataError):
        accuracy([], [])
