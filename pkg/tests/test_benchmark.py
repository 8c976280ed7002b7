# tests/test_benchmark.py
"""End-to-end runs on the 4-class / 2-concept synthetic benchmark (``pytest -m slow``)."""

import dataclasses
import time
from pathlib import Path

import numpy as np
import pytest

import main
from metrics import (
    best_axis_auc,
    concept_aucs,
    importance_profile,
    mean_abs_correlation,
    mean_off_diagonal,
    similarity_matrices,
    slot_activations,
    slot_latents,
)
from models import swap_bn_for_cw
from training import AlternatingTrainer, SyntheticSpec, evaluate, make_synthetic
from utils.config_factory import create_model_from_train_config
from utils.config_manager import ConfigManager

pytestmark = pytest.mark.slow

CONFIG_DIR = Path(__file__).resolve().parent.parent / "config"


@pytest.fixture(scope="module")
def benchmark():
    return make_synthetic(SyntheticSpec(), seed=0)


@pytest.fixture(scope="module")
def quickstart():
    return ConfigManager(str(CONFIG_DIR)).load_train_config("quickstart")


def _train(task, config):
    model = create_model_from_train_config(config, task.main.input_shape, 4, np.random.default_rng(config.seed))
    start = time.perf_counter()
    AlternatingTrainer(model, config, task.bank).fit(task.main)
    return model, time.perf_counter() - start


@pytest.fixture(scope="module")
def runs(benchmark, quickstart):
    return {slot: _train(benchmark, dataclasses.replace(quickstart, slot=slot)) for slot in ("cw", "bn", "bn_aux")}


def _accuracy(model, task):
    return evaluate(model, task.eval)["accuracy"]


def test_cw_does_not_hurt_accuracy(benchmark, runs):
    (cw, seconds), (bn, _) = runs["cw"], runs["bn"]
    cw_acc, bn_acc = _accuracy(cw, benchmark), _accuracy(bn, benchmark)
    assert cw_acc >= 0.9 and bn_acc >= 0.9
    assert cw_acc >= bn_acc - 0.02
    assert seconds < 120


def test_concept_purity_beats_the_best_batch_norm_axis(benchmark, runs):
    x, labels = benchmark.bank.labelled()
    concepts = [(c.name, c.axis) for c in benchmark.bank]
    cw_acts = slot_activations(runs["cw"][0], x, 0)
    bn_acts = slot_activations(runs["bn"][0], x, 0)
    for result in concept_aucs(cw_acts, labels, concepts):
        assert result.auc >= 0.95
        _, bn_best = best_axis_auc(bn_acts, labels, result.axis)
        assert result.auc > bn_best


def test_concepts_are_more_separable_under_cw(benchmark, runs):
    def off_diagonal(model):
        groups = [slot_activations(model, c.samples, 0) for c in benchmark.bank]
        return mean_off_diagonal(similarity_matrices(groups)[1])

    cw = off_diagonal(runs["cw"][0])
    assert cw < off_diagonal(runs["bn_aux"][0])
    assert cw < off_diagonal(runs["bn"][0])


def test_cw_output_axes_are_decorrelated(benchmark, runs):
    cw = mean_abs_correlation(slot_latents(runs["cw"][0], benchmark.eval.x, 0).T)
    bn = mean_abs_correlation(slot_latents(runs["bn"][0], benchmark.eval.x, 0).T)
    assert cw < 0.05
    assert cw < 0.5 * bn


def test_importance_separates_decisive_and_null_axes(benchmark, runs):
    model = runs["cw"][0]
    profile = importance_profile(model, benchmark.eval.x, benchmark.eval.y, repetitions=5,
                                 rng=np.random.default_rng(0))
    concept_axes = {c.axis for c in benchmark.bank}
    assert max(r.ci_mean for r in profile if r.axis in concept_axes) > 1.1
    null = min((r for r in profile if r.axis not in concept_axes), key=lambda r: r.ci_mean)
    assert 0.9 <= null.ci_mean <= 1.1


def test_warm_start_matches_a_cw_run(benchmark, runs, quickstart):
    bn = runs["bn"][0]
    swapped = swap_bn_for_cw(bn, 0, benchmark.main.x, quickstart.slot_options())
    AlternatingTrainer(swapped, quickstart, benchmark.bank).fit(benchmark.main, epochs=1)
    assert abs(_accuracy(swapped, benchmark) - _accuracy(runs["cw"][0], benchmark)) <= 0.02


def test_full_training_runs_are_byte_identical(tmp_path):
    data = tmp_path / "data"
    assert main.run(["--no-log-file", "gen", "--out", str(data)]) == 0
    for name in ("a", "b"):
        assert main.run(["--no-log-file", "train", "--config", str(CONFIG_DIR / "quickstart.cfg"),
                         "--manifest", str(data / "manifest.json"), "--out", str(tmp_path / name)]) == 0
    files = sorted(p.name for p in (tmp_path / "a").iterdir())
    assert files == sorted(p.name for p in (tmp_path / "b").iterdir())
    for name in files:
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes(), name
