# utils/manifest.py
"""
Dataset manifests.

A manifest is a JSON object naming the main tensor file, its labels CSV, the
concept tensor files with their axes and an optional held-out split::

    {"main": "main.cwt", "labels": "labels.csv",
     "concepts": [{"name": "alpha", "axis": 0, "path": "concept_alpha.cwt"}],
     "eval": {"main": "eval.cwt", "labels": "eval_labels.csv"}}

Paths are relative to the manifest's directory.
"""

from __future__ import annotations

import csv
import json
import logging
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from training.concept_bank import ConceptBank, ConceptSet, Dataset
from utils.errors import DataError
from utils.tensor_file import read_tensor


@dataclass(frozen=True)
class ConceptEntry:
    name: str
    axis: int
    path: Path


@dataclass(frozen=True)
class Manifest:
    source: Path
    main: Path
    labels: Path
    concepts: tuple[ConceptEntry, ...]
    eval_main: Path | None = None
    eval_labels: Path | None = None

    @property
    def has_eval(self) -> bool:
        return self.eval_main is not None

    def load_main(self) -> Dataset:
        return Dataset(read_tensor(self.main), read_labels(self.labels))

    def load_eval(self) -> Dataset:
        """The eval split, falling back to the main split when none is listed."""
        if not self.has_eval:
            logging.warning(f"{self.source} lists no eval split; evaluating on the main split")
            return self.load_main()
        return Dataset(read_tensor(self.eval_main), read_labels(self.eval_labels))

    def load_bank(self) -> ConceptBank:
        return ConceptBank([ConceptSet(e.name, e.axis, read_tensor(e.path)) for e in self.concepts])


# ── Labels CSV ──────────────────────────────────────────────────────────────

def write_labels(path, labels) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as f:
        writer = csv.writer(f)
        writer.writerow(["index", "label"])
        for i, label in enumerate(np.asarray(labels).reshape(-1)):
            writer.writerow([i, int(label)])
    return path


def read_labels(path) -> np.ndarray:
    path = Path(path)
    if not path.exists():
        raise DataError(f"labels file not found: {path}")
    with open(path, newline="") as f:
        rows = list(csv.reader(f))
    if not rows or rows[0] != ["index", "label"]:
        raise DataError(f"{path}: expected header 'index,label'")
    labels = []
    for line, row in enumerate(rows[1:], start=2):
        try:
            index, label = int(row[0]), int(row[1])
        except (IndexError, ValueError):
            raise DataError(f"{path}:{line}: malformed label row {row}")
        if index != len(labels):
            raise DataError(f"{path}:{line}: expected index {len(labels)}, got {index}")
        if label < 0:
            raise DataError(f"{path}:{line}: negative label {label}")
        labels.append(label)
    return np.asarray(labels, dtype=np.int64)


# ── Manifest JSON ───────────────────────────────────────────────────────────

def _existing(base: Path, value, field: str, source: Path) -> Path:
    if not isinstance(value, str) or not value:
        raise DataError(f"{source}: field '{field}' must be a nonempty path string")
    path = base / value
    if not path.exists():
        raise DataError(f"{source}: '{field}' points to missing file {path}")
    return path


def load_manifest(path) -> Manifest:
    path = Path(path)
    if not path.exists():
        raise DataError(f"manifest not found: {path}")
    try:
        raw = json.loads(path.read_text())
    except json.JSONDecodeError as e:
        raise DataError(f"{path}: invalid JSON ({e})")
    if not isinstance(raw, dict):
        raise DataError(f"{path}: manifest must be a JSON object")

    base = path.parent
    main = _existing(base, raw.get("main"), "main", path)
    labels = _existing(base, raw.get("labels"), "labels", path)

    concepts = []
    for i, entry in enumerate(raw.get("concepts", [])):
        if not isinstance(entry, dict) or not isinstance(entry.get("axis"), int):
            raise DataError(f"{path}: concept entry {i} needs a name, an integer axis and a path")
        concepts.append(ConceptEntry(str(entry.get("name", f"concept{i}")), entry["axis"],
                                     _existing(base, entry.get("path"), f"concepts[{i}].path", path)))
    axes = sorted(e.axis for e in concepts)
    if axes != list(range(len(concepts))):
        raise DataError(f"{path}: concept axes must be distinct and dense from 0, got {axes}")

    eval_main = eval_labels = None
    if raw.get("eval") is not None:
        split = raw["eval"]
        if not isinstance(split, dict):
            raise DataError(f"{path}: 'eval' must be an object with 'main' and 'labels'")
        eval_main = _existing(base, split.get("main"), "eval.main", path)
        eval_labels = _existing(base, split.get("labels"), "eval.labels", path)

    logging.debug(f"Loaded manifest {path} with {len(concepts)} concepts")
    return Manifest(path, main, labels, tuple(concepts), eval_main, eval_labels)


def write_manifest(path, main: str, labels: str, concepts: list[dict], eval_split: dict | None = None) -> Path:
    """Write a manifest whose paths are given relative to its directory."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    raw = {"main": main, "labels": labels, "concepts": concepts}
    if eval_split is not None:
        raw["eval"] = eval_split
    path.write_text(json.dumps(raw, indent=2, sort_keys=True) + "\n")
    return path
