# utils/report_selectors.py
"""
Report selectors for ``main.py report``.

Each selector turns a loaded checkpoint plus the manifest data into one CSV
table and a JSON summary.  ``select_report`` maps the selector name to its
builder the same way the factories map type strings to components.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Any, Callable

import numpy as np

from utils.errors import AxisIndexError, ConfigError, DataError, UnknownSelectorError


@dataclass
class ReportOptions:
    k: int = 10
    grid: int = 50
    axis_i: int = 0
    axis_j: int = 1
    sample_id: int = 0
    repetitions: int = 5
    loss_kind: str = "multiclass"
    target: int | None = None
    occlusion: bool = False
    patch: int | None = None
    stride: int | None = None
    all_axes: bool = False
    all_layers: bool = False


@dataclass
class ReportContext:
    model: Any
    manifest: Any
    options: ReportOptions
    rng: np.random.Generator
    layer_models: list[Any] = field(default_factory=list)

    _bank: Any = field(default=None, init=False, repr=False)
    _eval: Any = field(default=None, init=False, repr=False)

    @property
    def bank(self):
        if self._bank is None:
            self._bank = self.manifest.load_bank()
            dim = self.model.slot_channels[self.model.cw_layer]
            for concept in self._bank:
                if concept.axis >= dim:
                    raise AxisIndexError(f"concept '{concept.name}' axis {concept.axis} outside latent dim {dim}")
        return self._bank

    @property
    def eval(self):
        if self._eval is None:
            self._eval = self.manifest.load_eval()
        return self._eval

    def concepts(self) -> list[tuple[str, int]]:
        return [(c.name, c.axis) for c in self.bank]

    def concept_name(self, axis: int) -> str:
        for name, a in self.concepts():
            if a == axis:
                return name
        return ""

    def check_axis(self, axis: int) -> None:
        dim = self.model.slot_channels[self.model.cw_layer]
        if not 0 <= axis < dim:
            raise AxisIndexError(f"axis {axis} outside [0, {dim})")


@dataclass
class ReportTable:
    header: tuple[str, ...]
    rows: list[tuple]
    summary: dict[str, Any] = field(default_factory=dict)


# ── Selectors ───────────────────────────────────────────────────────────────

def _topk(ctx: ReportContext) -> ReportTable:
    from metrics import occlusion_map, slot_activations, topk_activated

    x = ctx.eval.x
    if ctx.options.occlusion and x.ndim != 4:
        raise ConfigError("--occlusion needs image inputs")
    acts = slot_activations(ctx.model, x)
    header = ("axis", "concept", "rank", "sample_id", "activation")
    if ctx.options.occlusion:
        header += ("occlusion_row", "occlusion_col")
    rows = []
    for name, axis in ctx.concepts():
        for rank, (sample_id, value) in enumerate(topk_activated(acts[:, axis], ctx.options.k), start=1):
            row = (axis, name, rank, sample_id, value)
            if ctx.options.occlusion:
                result = occlusion_map(ctx.model, x[sample_id], axis, ctx.options.patch, ctx.options.stride)
                row += result.argmax_cell()
            rows.append(row)
    return ReportTable(header, rows, {"k": ctx.options.k, "n_samples": int(x.shape[0])})


def _similarity(ctx: ReportContext) -> ReportTable:
    from metrics import mean_off_diagonal, similarity_matrices, slot_activations

    concepts = ctx.concepts()
    groups = [slot_activations(ctx.model, ctx.bank.by_axis(axis).samples) for _, axis in concepts]
    d, q_hat = similarity_matrices(groups)
    rows = [
        (concepts[i][0], concepts[j][0], d[i, j], q_hat[i, j])
        for i in range(len(concepts)) for j in range(len(concepts))
    ]
    return ReportTable(("concept_i", "concept_j", "d", "q_normalized"), rows,
                       {"mean_off_diagonal_q": mean_off_diagonal(q_hat)})


def _correlation(ctx: ReportContext) -> ReportTable:
    from cw_layers import conv_reshape
    from metrics import axis_correlation, layerwise_correlation, mean_off_diagonal, slot_latents

    x = ctx.eval.x
    if ctx.options.all_layers:
        models = ctx.layer_models or [ctx.model]
        rows = layerwise_correlation(models, x)
        return ReportTable(("layer", "mean_abs_corr"), rows, {"layers": len(rows)})
    latents = slot_latents(ctx.model, x)
    matrix = conv_reshape(latents).numpy() if latents.ndim == 4 else latents.T
    corr, undefined = axis_correlation(matrix)
    dim = corr.shape[0]
    rows = [(i, j, corr[i, j]) for i in range(dim) for j in range(i + 1, dim)]
    return ReportTable(("axis_i", "axis_j", "abs_corr"), rows, {
        "mean_abs_corr": mean_off_diagonal(corr),
        "undefined_axes": np.flatnonzero(undefined).tolist(),
    })


def _auc(ctx: ReportContext) -> ReportTable:
    from metrics import best_axis_auc, concept_aucs, slot_activations

    x, labels = ctx.bank.labelled()
    acts = slot_activations(ctx.model, x)
    results = concept_aucs(acts, labels, ctx.concepts(), rng=ctx.rng)
    rows = [(r.axis, r.concept, r.auc, r.auc_std) for r in results]
    best = {}
    for name, axis in ctx.concepts():
        best_axis, value = best_axis_auc(acts, labels, axis)
        best[name] = {"axis": best_axis, "auc": value}
    return ReportTable(("axis", "concept", "auc", "auc_std"), rows, {"best_axis": best})


def _importance(ctx: ReportContext) -> ReportTable:
    from metrics import importance_profile, summarize_profile

    data = ctx.eval
    opts = ctx.options
    profile = importance_profile(ctx.model, data.x, data.y, opts.loss_kind, opts.target, opts.repetitions, ctx.rng)
    concept_axes = {axis for _, axis in ctx.concepts()}
    rows = [
        (r.axis, ctx.concept_name(r.axis), r.loss_kind, r.ci_mean, r.ci_std, r.repetitions)
        for r in profile if opts.all_axes or r.axis in concept_axes
    ]
    return ReportTable(("axis", "concept", "loss_kind", "ci_mean", "ci_std", "repetitions"), rows,
                       {**summarize_profile(profile), "e_orig": profile[0].e_orig})


def _hist2d(ctx: ReportContext) -> ReportTable:
    from metrics import joint_histogram, slot_activations

    opts = ctx.options
    ctx.check_axis(opts.axis_i)
    ctx.check_axis(opts.axis_j)
    acts = slot_activations(ctx.model, ctx.eval.x)
    hist = joint_histogram(acts[:, opts.axis_i], acts[:, opts.axis_j], opts.grid, rng=ctx.rng)
    rows = []
    for r in range(hist.grid):
        for c in range(hist.grid):
            rep = int(hist.representatives[r, c])
            rows.append((r, c, int(hist.counts[r, c]), rep if rep >= 0 else None))
    return ReportTable(("row", "col", "count", "representative"), rows, {
        "axis_i": opts.axis_i, "axis_j": opts.axis_j, "grid": hist.grid, "bounds": list(hist.bounds),
    })


def _trajectory(ctx: ReportContext) -> ReportTable:
    from metrics import LayerActivations, percentile_trajectory, slot_activations

    opts = ctx.options
    x = ctx.eval.x
    if not 0 <= opts.sample_id < x.shape[0]:
        raise DataError(f"sample {opts.sample_id} outside eval split of {x.shape[0]} samples")
    ids = np.arange(x.shape[0])
    layers = []
    for index in range(ctx.model.n_slots):
        acts = slot_activations(ctx.model, x, index)
        if max(opts.axis_i, opts.axis_j) >= acts.shape[1]:
            raise AxisIndexError(f"axes ({opts.axis_i}, {opts.axis_j}) outside slot {index} width {acts.shape[1]}")
        layers.append(LayerActivations(index, ids, acts[:, opts.axis_i], acts[:, opts.axis_j]))
    rows = [(opts.sample_id, layer, ri, rj) for layer, ri, rj in percentile_trajectory(layers, opts.sample_id)]
    return ReportTable(("sample_id", "layer", "rank_i", "rank_j"), rows,
                       {"axis_i": opts.axis_i, "axis_j": opts.axis_j})


def _occlusion(ctx: ReportContext) -> ReportTable:
    from metrics import occlusion_map

    opts = ctx.options
    x = ctx.eval.x
    if x.ndim != 4:
        raise ConfigError("occlusion needs image inputs")
    if not 0 <= opts.sample_id < x.shape[0]:
        raise DataError(f"sample {opts.sample_id} outside eval split of {x.shape[0]} samples")
    ctx.check_axis(opts.axis_i)
    result = occlusion_map(ctx.model, x[opts.sample_id], opts.axis_i, opts.patch, opts.stride)
    rows = [
        (r, c, result.drops[r, c], bool(result.receptive_field[r, c]))
        for r in range(result.drops.shape[0]) for c in range(result.drops.shape[1])
    ]
    return ReportTable(("row", "col", "drop", "in_receptive_field"), rows, {
        "sample_id": opts.sample_id, "axis": opts.axis_i, "baseline": result.baseline,
        "patch": result.patch, "stride": result.stride, "argmax_cell": list(result.argmax_cell()),
    })


def _reducers(ctx: ReportContext) -> ReportTable:
    from metrics import compare_reducers, slot_latents
    from reducers import REDUCER_KINDS
    from utils.config_factory import create_reducer_from_config

    x, labels = ctx.bank.labelled()
    latents = slot_latents(ctx.model, x)
    reducers = [create_reducer_from_config(kind) for kind in REDUCER_KINDS]
    rows = compare_reducers(latents, labels, ctx.concepts(), reducers)
    return ReportTable(("reducer", "axis", "concept", "auc"), rows, {"reducers": list(REDUCER_KINDS)})


def _summary(ctx: ReportContext) -> ReportTable:
    """One row per concept with its purity, importance and top sample; every matrix in the JSON."""
    from cw_layers import conv_reshape
    from metrics import (
        MetricsReport,
        axis_correlation,
        concept_aucs,
        importance_profile,
        similarity_matrices,
        slot_activations,
        slot_latents,
        topk_activated,
    )

    opts = ctx.options
    concepts = ctx.concepts()
    data = ctx.eval
    report = MetricsReport()

    x, labels = ctx.bank.labelled()
    aucs = concept_aucs(slot_activations(ctx.model, x), labels, concepts, rng=ctx.rng)
    report.auc = [{"axis": r.axis, "concept": r.concept, "auc": r.auc, "auc_std": r.auc_std} for r in aucs]

    groups = [slot_activations(ctx.model, ctx.bank.by_axis(axis).samples) for _, axis in concepts]
    if len(groups) >= 2:
        report.similarity, report.q_normalized = similarity_matrices(groups)

    latents = slot_latents(ctx.model, data.x)
    matrix = conv_reshape(latents).numpy() if latents.ndim == 4 else latents.T
    report.correlation, undefined = axis_correlation(matrix)
    report.correlation_undefined = np.flatnonzero(undefined).tolist()

    profile = importance_profile(ctx.model, data.x, data.y, opts.loss_kind, opts.target, opts.repetitions, ctx.rng)
    ci = {r.axis: r for r in profile}
    report.importance = [{"axis": r.axis, "ci_mean": r.ci_mean, "ci_std": r.ci_std} for r in profile]

    acts = slot_activations(ctx.model, data.x)
    rows = []
    for result in aucs:
        top = topk_activated(acts[:, result.axis], min(opts.k, acts.shape[0]))
        report.topk.append({"axis": result.axis, "samples": [sample_id for sample_id, _ in top]})
        rows.append((result.axis, result.concept, result.auc, result.auc_std,
                     ci[result.axis].ci_mean, top[0][0] if top else None))
    return ReportTable(("axis", "concept", "auc", "auc_std", "ci_mean", "top_sample_id"), rows, report.summary())


REPORT_SELECTORS: dict[str, Callable[[ReportContext], ReportTable]] = {
    "topk": _topk,
    "similarity": _similarity,
    "correlation": _correlation,
    "auc": _auc,
    "importance": _importance,
    "hist2d": _hist2d,
    "trajectory": _trajectory,
    "occlusion": _occlusion,
    "reducers": _reducers,
    "summary": _summary,
}


def select_report(selector: str) -> Callable[[ReportContext], ReportTable]:
    if selector not in REPORT_SELECTORS:
        logging.error(f"Unknown report selector: {selector}")
        raise UnknownSelectorError(f"Unknown report selector: {selector} (choose from {', '.join(REPORT_SELECTORS)})")
    return REPORT_SELECTORS[selector]
