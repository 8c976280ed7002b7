# tests/test_models.py
import numpy as np
import pytest

from models import (
    SGD,
    BatchNormSlot,
    ConvNetwork,
    CwSlot,
    MlpNetwork,
    auxiliary_concept_loss,
    latent_matrix,
    sgd_step,
    swap_bn_for_cw,
)
from numerics import Tensor, ops
from numerics.gradcheck import check_gradients
from utils.config_factory import create_model_from_config
from utils.errors import ConfigError, DimensionError, DivergenceError, LabelError, StructureError


def test_mlp_forward_and_slots(rng):
    model = MlpNetwork(6, 3, hidden=5, variant="cw", cw_layer=1, rng=rng)
    assert [slot.kind for slot in model.slots] == ["bn", "cw"]
    assert isinstance(model.cw_slot, CwSlot)
    assert model.forward(rng.normal(size=(8, 6)), "train").shape == (8, 3)
    assert set(model.parameters()) >= {"fc1.weight", "head.bias", "slot0.scale", "slot0.shift"}


def test_cnn_forward_shapes(rng):
    model = ConvNetwork((3, 9, 9), 4, variant="cw", cw_layer=0, rng=rng)
    x = rng.normal(size=(2, 3, 9, 9))
    assert model.forward_to_slot(x, 0, "eval").shape == (2, 8, 9, 9)
    assert model.forward(x, "eval").shape == (2, 4)


def test_bad_structure_is_rejected(rng):
    with pytest.raises(StructureError):
        MlpNetwork(4, 2, variant="cw", cw_layer=2)
    with pytest.raises(ConfigError):
        MlpNetwork(4, 2, variant="gn")
    with pytest.raises(DimensionError):
        MlpNetwork(4, 2).forward(np.zeros((3, 5)))
    with pytest.raises(ConfigError):
        create_model_from_config({"arch": "mlp", "input_shape": [3, 4, 4], "n_classes": 2})


def test_batch_norm_commits_running_statistics(rng):
    bn = BatchNormSlot(3, momentum=0.5)
    z = rng.normal(size=(20, 3)) * 2.0 + 1.0
    out = bn.forward(z, "train").numpy()
    np.testing.assert_allclose(out.mean(axis=0), np.zeros(3), atol=1e-12)
    np.testing.assert_array_equal(bn.running_mean, np.zeros(3))
    bn.commit_statistics()
    np.testing.assert_allclose(bn.running_mean, 0.5 * z.mean(axis=0))
    np.testing.assert_allclose(bn.running_var, 0.5 + 0.5 * z.var(axis=0))


def test_mlp_gradients_match_finite_differences(rng):
    model = MlpNetwork(3, 2, hidden=4, variant="cw", rng=rng, slot_options={"newton_iters": 5})
    x = rng.normal(size=(6, 3))
    y = np.array([0, 1, 0, 1, 1, 0])

    def loss(w1):
        model.weights["fc1.weight"] = w1
        return ops.softmax_cross_entropy(model.forward(x, "train"), y)

    assert check_gradients(loss, [model.weights["fc1.weight"].numpy()]) < 1e-4


def test_clone_is_independent(rng):
    model = MlpNetwork(4, 2, variant="cw", rng=rng)
    copy = model.clone()
    copy.cw_slot.layer.rotation.Q = -np.eye(model.hidden)
    copy.weights["fc1.weight"] = Tensor(np.zeros((4, model.hidden)))
    np.testing.assert_array_equal(model.cw_slot.layer.rotation.Q, np.eye(model.hidden))
    assert np.any(model.weights["fc1.weight"].numpy() != 0.0)


def test_swap_bn_for_cw_calibrates_and_preserves_weights(rng):
    model = MlpNetwork(5, 3, hidden=4, variant="bn", rng=rng)
    calibration = rng.normal(size=(50, 5))
    swapped = swap_bn_for_cw(model, 0, calibration, {"whitening_mode": "exact"})
    cw = swapped.slots[0].layer
    assert swapped.variant == "cw" and swapped.cw_layer == 0
    np.testing.assert_array_equal(cw.rotation.Q, np.eye(4))
    latents = model.forward_to_slot(calibration, 0, "eval").numpy()
    np.testing.assert_allclose(cw.whitening.running_mean, latents.mean(axis=0))
    assert swapped.weights["fc2.weight"] is model.weights["fc2.weight"]
    assert isinstance(model.slots[0], BatchNormSlot)


def test_swap_requires_a_batch_norm_slot(rng):
    model = MlpNetwork(5, 3, variant="cw", cw_layer=0, rng=rng)
    with pytest.raises(StructureError):
        swap_bn_for_cw(model, 0, rng.normal(size=(10, 5)))
    with pytest.raises(StructureError):
        swap_bn_for_cw(model, 7, rng.normal(size=(10, 5)))


def test_auxiliary_concept_loss(rng):
    latent = rng.normal(size=(6, 10))
    labels = np.array([0, 1] * 5)
    loss = auxiliary_concept_loss(latent, labels, 2).item()
    logits = latent[:2].T
    expected = np.mean(np.log(np.exp(logits).sum(axis=1)) - logits[np.arange(10), labels])
    assert loss == pytest.approx(expected)
    with pytest.raises(LabelError):
        auxiliary_concept_loss(latent, np.full(10, 2), 2)
    with pytest.raises(DimensionError):
        auxiliary_concept_loss(latent, labels, 7)
    assert latent_matrix(rng.normal(size=(4, 3, 2, 2))).shape == (3, 4)


def test_sgd_descends_a_quadratic_bowl_to_its_minimiser():
    curvature = np.array([1.0, 4.0, 0.5])
    centre = np.array([2.0, -1.0, 0.25])
    params = {"w": Tensor(np.zeros(3), requires_grad=True)}
    velocity: dict[str, np.ndarray] = {}
    for _ in range(300):
        grad = curvature * (params["w"].numpy() - centre)
        params = sgd_step(params, {"w": grad}, lr=0.1, momentum=0.5, velocity=velocity)
    np.testing.assert_allclose(params["w"].numpy(), centre, atol=1e-10)


def test_sgd_momentum_and_divergence():
    p = {"w": Tensor(np.ones(2), requires_grad=True)}
    opt = SGD(lr=0.1, momentum=0.5)
    p = opt.step(p, {"w": np.ones(2)})
    p = opt.step(p, {"w": np.ones(2)})
    np.testing.assert_allclose(p["w"].numpy(), 1.0 - 0.1 - 0.15)
    with pytest.raises(DivergenceError):
        sgd_step(p, {"w": np.array([np.nan, 0.0])}, 0.1)
    with pytest.raises(ConfigError):
        SGD(lr=0.0)
