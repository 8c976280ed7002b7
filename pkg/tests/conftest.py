import json

import numpy as np
import pytest

from training import SyntheticSpec, TrainConfig, make_synthetic


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture
def small_spec():
    """4 classes, 2 planted concepts, 8-dim vectors; small enough for unit tests."""
    return SyntheticSpec(dim=8, n_train=128, n_eval=64, n_concept=32, signal=2.0, noise=0.3)


@pytest.fixture
def small_task(small_spec):
    return make_synthetic(small_spec, seed=7)


@pytest.fixture
def small_config():
    return TrainConfig(hidden=8, batch_size=32, epochs=1, align_frequency=2, newton_iters=10)


@pytest.fixture
def write_config(tmp_path):
    """Write ``key=value`` lines to a .cfg file and return its path."""
    def _write(values: dict, name: str = "run.cfg"):
        path = tmp_path / name
        path.write_text("".join(f"{k}={v}\n" for k, v in values.items()))
        return path
    return _write


@pytest.fixture
def write_manifest(tmp_path):
    """Write a raw manifest dict as JSON next to the data files."""
    def _write(raw: dict, name: str = "manifest.json"):
        path = tmp_path / name
        path.write_text(json.dumps(raw))
        return path
    return _write
