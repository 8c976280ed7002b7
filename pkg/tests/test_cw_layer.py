# tests/test_cw_layer.py
import numpy as np
import pytest

from cw_layers import CwLayer, conv_reshape, conv_unreshape
from reducers import MeanReducer
from stiefel import RotationState
from utils.errors import AxisIndexError, DimensionError
from whitening import WhiteningState, covariance


def _layer(d, rng=None, mode="exact", eps=0.0, reducer=None):
    layer = CwLayer(WhiteningState(d, eps=eps, mode=mode), reducer=reducer)
    if rng is not None:
        layer.rotation.Q, _ = np.linalg.qr(rng.normal(size=(d, d)))
    return layer


def test_train_output_is_white_for_any_rotation(rng):
    layer = _layer(4, rng)
    z = rng.normal(size=(64, 4)) @ rng.normal(size=(4, 4))
    out = layer.forward(z, "train").numpy()
    np.testing.assert_allclose(covariance(out.T), np.eye(4), atol=1e-8)
    np.testing.assert_allclose(out.mean(axis=0), np.zeros(4), atol=1e-12)


def test_eval_output_uses_running_statistics(rng):
    layer = _layer(3, rng)
    layer.whitening.running_mean = rng.normal(size=3)
    layer.whitening.running_whitener = np.diag([1.0, 2.0, 0.5])
    z = rng.normal(size=(5, 3))
    expected = (z - layer.whitening.running_mean) @ layer.whitening.running_whitener.T @ layer.rotation.Q
    np.testing.assert_allclose(layer.forward(z, "eval").numpy(), expected, atol=1e-12)
    assert not layer.whitening.has_batch_statistics()


def test_permutation_rotation_permutes_axes(rng):
    z = rng.normal(size=(32, 3))
    plain = _layer(3).forward(z, "train").numpy()
    swapped = _layer(3)
    swapped.rotation = RotationState(3, Q=np.eye(3)[:, [2, 0, 1]])
    np.testing.assert_allclose(swapped.forward(z, "train").numpy(), plain[:, [2, 0, 1]], atol=1e-12)


def test_feature_maps_keep_their_layout(rng):
    layer = _layer(2, rng)
    z = rng.normal(size=(4, 2, 3, 3))
    out = layer.forward(z, "train").numpy()
    assert out.shape == z.shape
    flat = conv_reshape(out).numpy()
    np.testing.assert_allclose(covariance(flat), np.eye(2), atol=1e-8)


def test_conv_reshape_orders_columns_by_sample_then_cell():
    z = np.arange(2 * 2 * 2 * 3, dtype=float).reshape(2, 2, 2, 3)
    m = conv_reshape(z).numpy()
    assert m.shape == (2, 12)
    np.testing.assert_array_equal(m[1, :6], z[0, 1].ravel())
    np.testing.assert_array_equal(conv_unreshape(m, z.shape).numpy(), z)


def test_channel_and_rank_mismatch(rng):
    layer = _layer(3)
    with pytest.raises(DimensionError):
        layer.forward(rng.normal(size=(5, 4)), "train")
    with pytest.raises(DimensionError):
        layer.forward(rng.normal(size=(5, 3, 2)), "train")
    with pytest.raises(DimensionError):
        conv_unreshape(np.zeros((2, 5)), (1, 2, 2, 2))


def test_concept_activation_reads_one_axis(rng):
    layer = _layer(2, rng, reducer=MeanReducer())
    fmap = rng.normal(size=(2, 3, 3))
    expected = layer.forward(fmap[None], "eval").numpy()[0, 1].mean()
    assert layer.concept_activation(fmap, 1) == pytest.approx(expected)
    with pytest.raises(AxisIndexError):
        layer.concept_activation(fmap, 2)


def test_concept_batch_whitens_without_rotating(rng):
    layer = _layer(3, rng)
    latents = rng.normal(size=(10, 3))
    batch = layer.concept_batch(1, latents, "c", stats="batch")
    assert batch.whitened.shape == (3, 10)
    np.testing.assert_allclose(covariance(batch.whitened), np.eye(3), atol=1e-8)
    np.testing.assert_allclose(layer.forward(latents, "train").numpy(), batch.whitened.T @ layer.rotation.Q,
                               atol=1e-10)
