# tests/test_reducers.py
import numpy as np
import pytest

from reducers import MaxPoolMeanReducer, MaxReducer, MeanReducer, PositiveMeanReducer
from utils.config_factory import create_reducer_from_config
from utils.errors import ConfigError, DimensionError

GRID = np.arange(1.0, 10.0).reshape(3, 3)


def test_reducer_values_on_a_known_map():
    assert MeanReducer().reduce(GRID) == pytest.approx(5.0)
    assert MaxReducer().reduce(GRID) == 9.0
    assert PositiveMeanReducer().reduce(GRID - 5.0) == pytest.approx(2.5)
    # ceil-mode 2×2 pooling of a 3×3 map keeps 5, 6, 8, 9
    assert MaxPoolMeanReducer(2).reduce(GRID) == pytest.approx(7.0)


def test_positive_mean_of_non_positive_map_is_zero():
    fmap = -np.ones((2, 2))
    assert PositiveMeanReducer().reduce(fmap) == 0.0
    assert np.all(PositiveMeanReducer().subgradient(fmap) == 0.0)


def test_max_subgradient_picks_first_maximum():
    fmap = np.array([[1.0, 3.0], [3.0, 0.0]])
    np.testing.assert_array_equal(MaxReducer().subgradient(fmap), [[0.0, 1.0], [0.0, 0.0]])


def test_maxpool_mean_subgradient_routes_to_window_maxima():
    grad = MaxPoolMeanReducer(2).subgradient(GRID)
    expected = np.zeros((3, 3))
    expected[1, 1] = expected[1, 2] = expected[2, 1] = expected[2, 2] = 0.25
    np.testing.assert_allclose(grad, expected)


@pytest.mark.parametrize("reducer", [MeanReducer(), MaxReducer(), PositiveMeanReducer(), MaxPoolMeanReducer(2)])
def test_subgradient_matches_finite_differences_at_generic_maps(reducer, rng):
    fmap = rng.normal(size=(4, 5))
    grad = reducer.subgradient(fmap)
    h = 1e-7
    for idx in np.ndindex(fmap.shape):
        bumped = fmap.copy()
        bumped[idx] += h
        assert (reducer.reduce(bumped) - reducer.reduce(fmap)) / h == pytest.approx(grad[idx], abs=1e-5)


def test_batched_reduction_matches_single_maps(rng):
    maps = rng.normal(size=(3, 2, 4, 4))
    reducer = MaxPoolMeanReducer(2)
    batched = reducer.reduce_many(maps)
    assert batched.shape == (3, 2)
    assert batched[2, 1] == pytest.approx(reducer.reduce(maps[2, 1]))


def test_invalid_inputs():
    with pytest.raises(ConfigError):
        MaxPoolMeanReducer(1)
    with pytest.raises(DimensionError):
        MeanReducer().reduce(np.ones(4))
    with pytest.raises(DimensionError):
        MaxReducer().reduce(np.ones((0, 3)))


def test_factory_builds_every_kind_and_rejects_unknown():
    assert isinstance(create_reducer_from_config("maxpool-mean", {"pool_size": 3}), MaxPoolMeanReducer)
    assert create_reducer_from_config("maxpool-mean", {"pool_size": 3}).pool_size == 3
    assert create_reducer_from_config("positive-mean").kind == "positive-mean"
    with pytest.raises(ConfigError, match="Unknown reducer type"):
        create_reducer_from_config("median")
