# training/alternating_trainer.py
"""
Alternating optimisation of the main objective and the concept alignment.

Every mini-batch t takes one SGD step on the network weights with Q frozen;
when ``t % align_frequency == 0`` an alignment step follows that moves only
Q: one concept mini-batch per concept, gradient G, momentum G′, a
curvilinear search for η and a Cayley update.
"""

from __future__ import annotations

import hashlib
import logging
from dataclasses import dataclass, field

import numpy as np

from metrics.activations import slot_activations
from models import HostNetwork, SGD, auxiliary_concept_loss, latent_matrix
from numerics import GradientTape, backward, ops
from stiefel import (
    alignment_gradient,
    alignment_objective,
    curvilinear_search,
    momentum_update,
)
from utils.errors import ConfigError, CwError, DivergenceError, StructureError
from .concept_bank import ConceptBank, Dataset
from .train_config import TrainConfig

HISTORY_COLUMNS = ("step", "main_loss", "align_objective", "orthogonality_error")
PROBE_COLUMNS = ("epoch", "axis", "concept", "mean_activation")


@dataclass(frozen=True)
class HistoryRecord:
    step: int
    kind: str
    main_loss: float | None
    align_objective: float | None
    orthogonality_error: float | None
    aux_loss: float | None = None
    weights_digest: str = ""
    rotation_digest: str = ""

    def row(self) -> tuple:
        return (self.step, self.main_loss, self.align_objective, self.orthogonality_error)


@dataclass
class TrainingHistory:
    records: list[HistoryRecord] = field(default_factory=list)
    probe: list[tuple[int, int, str, float]] = field(default_factory=list)

    def rows(self) -> list[tuple]:
        return [r.row() for r in self.records]

    @property
    def align_records(self) -> list[HistoryRecord]:
        return [r for r in self.records if r.kind == "align"]

    @property
    def main_records(self) -> list[HistoryRecord]:
        return [r for r in self.records if r.kind == "main"]

    def epoch_means(self, per_epoch: int) -> list[float]:
        losses = [r.main_loss for r in self.main_records]
        return [float(np.mean(losses[i:i + per_epoch])) for i in range(0, len(losses), per_epoch)]


def _digest(arrays) -> str:
    h = hashlib.sha1()
    for arr in arrays:
        h.update(np.ascontiguousarray(arr, dtype=np.float64).tobytes())
    return h.hexdigest()


class AlternatingTrainer:
    def __init__(self, model: HostNetwork, config: TrainConfig, concept_bank: ConceptBank | None = None):
        self.model = model
        self.config = config
        self.concept_bank = concept_bank
        self.optimizer = SGD(config.lr, config.momentum)
        self.search_params = config.search_params()
        self.rng = np.random.default_rng(config.seed)
        self.step = 0
        self.history = TrainingHistory()

    # ── Snapshots ─────────────────────────────────────────────────────────────
    def weights_digest(self) -> str:
        params = self.model.parameters()
        return _digest(params[name].data for name in sorted(params))

    def rotation_digest(self) -> str:
        cw = self.model.cw_slot
        return "" if cw is None else _digest([cw.layer.rotation.Q])

    def orthogonality_error(self) -> float | None:
        cw = self.model.cw_slot
        return None if cw is None else cw.layer.rotation.orthogonality_error()

    # ── Main objective ────────────────────────────────────────────────────────
    def _auxiliary_loss(self):
        bank = self.concept_bank
        if bank is None or bank.k == 0:
            return None
        per_concept = max(2, self.config.batch_size // bank.k)
        drawn = bank.sample(self.rng, per_concept)
        x = np.concatenate([batch for _, batch in drawn], axis=0)
        labels = np.concatenate([np.full(len(batch), concept.axis) for concept, batch in drawn])
        latent = self.model.slot_output(x, self.model.cw_layer, "train")
        return auxiliary_concept_loss(latent_matrix(latent), labels, bank.k)

    def main_step(self, x: np.ndarray, y: np.ndarray) -> tuple[float, float | None]:
        """One SGD step on the network weights; Q is a constant of the forward pass."""
        params = self.model.parameters()
        with GradientTape() as tape:
            aux = self._auxiliary_loss() if self.model.variant == "bn_aux" else None
            loss = ops.softmax_cross_entropy(self.model.forward(x, "train"), y)
            total = loss if aux is None else ops.add(loss, ops.mul(self.config.aux_weight, aux))
        if not np.isfinite(total.item()):
            raise DivergenceError(f"non-finite training loss {total.item()}")
        grads = backward(total, tape, sources=params.values())
        named = {name: grads[tensor] for name, tensor in params.items()}
        self.model.set_parameters(self.optimizer.step(params, named))
        self.model.commit_statistics()
        return loss.item(), None if aux is None else aux.item()

    # ── Alignment ─────────────────────────────────────────────────────────────
    def concept_batches(self, concept_bank: ConceptBank, batch_size: int | None = None):
        """Whitened concept mini-batches at the CW slot, features frozen."""
        cw = self.model.cw_slot
        if cw is None:
            raise StructureError("model has no CW slot to align")
        layer = cw.layer
        drawn = concept_bank.sample(self.rng, batch_size or self.config.batch_size)
        latents = [self.model.forward_to_slot(batch, layer.placement, "eval").numpy() for _, batch in drawn]
        moments = None
        if self.config.align_batch_stats == "batch":
            moments = layer.statistics(np.concatenate(latents, axis=0), "batch")
        return [
            layer.concept_batch(concept.axis, latent, concept.name, moments=moments)
            for (concept, _), latent in zip(drawn, latents)
        ]

    def align_step(self, concept_bank: ConceptBank | None = None) -> float | None:
        """Update Q only; returns the alignment objective after the step (None for k = 0)."""
        bank = concept_bank if concept_bank is not None else self.concept_bank
        if bank is None:
            raise ConfigError("align_step needs a concept bank")
        if bank.k == 0:
            return None
        layer = self.model.cw_slot.layer if self.model.cw_slot is not None else None
        if layer is None:
            raise StructureError("model has no CW slot to align")
        rotation = layer.rotation
        for concept in bank:
            rotation.assign(concept.name, concept.axis)

        batches = self.concept_batches(bank)
        grad = alignment_gradient(batches, layer.dim, layer.reducer, rotation.Q)
        momentum = momentum_update(rotation, grad)
        result = curvilinear_search(
            rotation.Q,
            momentum,
            lambda q: -alignment_objective(q, batches, layer.reducer),
            self.search_params,
        )
        if result.accepted or result.decreased:
            rotation.Q = result.q_next
            rotation.reorthonormalize()
            objective = -result.value
        else:
            objective = -result.initial_value
        logging.debug(f"align step: eta={result.eta:.4g} accepted={result.accepted} objective={objective:.6f}")
        return objective

    # ── Loop ──────────────────────────────────────────────────────────────────
    def _record(self, kind: str, main_loss=None, align_objective=None, aux_loss=None) -> None:
        self.history.records.append(HistoryRecord(
            step=self.step,
            kind=kind,
            main_loss=main_loss,
            align_objective=align_objective,
            orthogonality_error=self.orthogonality_error(),
            aux_loss=aux_loss,
            weights_digest=self.weights_digest(),
            rotation_digest=self.rotation_digest(),
        ))

    def _probe(self, epoch: int, probe: ConceptBank) -> None:
        for concept in probe:
            acts = slot_activations(self.model, concept.samples, self.model.cw_layer)
            self.history.probe.append((epoch, concept.axis, concept.name, float(acts[:, concept.axis].mean())))

    def fit(self, main: Dataset, concept_bank: ConceptBank | None = None, epochs: int | None = None,
            probe: ConceptBank | None = None) -> TrainingHistory:
        """Alternate main steps with an alignment step every ``align_frequency`` batches."""
        if concept_bank is not None:
            self.concept_bank = concept_bank
        aligning = self.model.cw_slot is not None and self.concept_bank is not None
        if self.model.variant == "cw" and self.concept_bank is None:
            logging.warning("CW model trained without a concept bank; Q stays at its current value")
        if probe is None and self.concept_bank is not None:
            probe = self.concept_bank.head(32)
        epochs = epochs or self.config.epochs

        for epoch in range(1, epochs + 1):
            losses = []
            for x, y in main.batches(self.config.batch_size, self.rng):
                self.step += 1
                try:
                    loss, aux = self.main_step(x, y)
                    self._record("main", main_loss=loss, aux_loss=aux)
                    losses.append(loss)
                    logging.debug(f"step {self.step}: main loss {loss:.6f}")
                    if aligning and self.step % self.config.align_frequency == 0:
                        objective = self.align_step()
                        self._record("align", align_objective=objective)
                except CwError as e:
                    raise e.with_step(self.step)
            if probe is not None:
                self._probe(epoch, probe)
            logging.info(f"epoch {epoch}/{epochs}: mean main loss {np.mean(losses):.4f} over {len(losses)} batches")
        return self.history


def evaluate(model: HostNetwork, dataset: Dataset, batch_size: int = 256) -> dict[str, float]:
    """Eval-mode loss, accuracy and balanced accuracy."""
    from metrics.report import accuracy, balanced_accuracy

    logits = np.concatenate([
        model.forward(dataset.x[i:i + batch_size], "eval").numpy()
        for i in range(0, len(dataset), batch_size)
    ])
    loss = ops.softmax_cross_entropy(logits, dataset.y).item()
    predictions = logits.argmax(axis=1)
    return {
        "loss": loss,
        "accuracy": accuracy(dataset.y, predictions),
        "balanced_accuracy": balanced_accuracy(dataset.y, predictions),
    }
