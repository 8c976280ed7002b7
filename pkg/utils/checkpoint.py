# utils/checkpoint.py
"""
Model checkpoints.

A checkpoint is a directory with ``checkpoint.json`` (format version,
architecture descriptor, slot options, step counter, config echo and an
index of tensor files) plus one float64 CWT1 file per parameter and per
slot state array.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import numpy as np

from numerics import Tensor
from utils.errors import DataError, StructureError
from utils.tensor_file import read_tensor, write_tensor

FORMAT_VERSION = 1
INDEX_FILE = "checkpoint.json"


@dataclass
class Checkpoint:
    model: Any
    step: int = 0
    config: dict[str, Any] = field(default_factory=dict)
    slot_options: dict[str, Any] = field(default_factory=dict)


def _tensor_file(name: str) -> str:
    return f"{name}.cwt"


def save_checkpoint(directory, model, step: int = 0, config: dict[str, Any] | None = None,
                    slot_options: dict[str, Any] | None = None) -> Path:
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)

    index: dict[str, str] = {}
    for name, tensor in sorted(model.parameters().items()):
        index[name] = _tensor_file(name)
        write_tensor(directory / index[name], tensor.numpy())
    for i, slot in enumerate(model.slots):
        for key, array in sorted(slot.state_arrays().items()):
            name = f"slot{i}.state.{key}"
            index[name] = _tensor_file(name)
            write_tensor(directory / index[name], array)

    cw = model.cw_slot
    meta = {
        "format_version": FORMAT_VERSION,
        "descriptor": model.descriptor(),
        "variant": model.variant,
        "step": int(step),
        "config": dict(config or {}),
        "slot_options": dict(slot_options or {}),
        "axis_assignment": dict(cw.layer.rotation.axis_assignment) if cw is not None else {},
        "tensors": index,
    }
    (directory / INDEX_FILE).write_text(json.dumps(meta, indent=2, sort_keys=True) + "\n")
    logging.info(f"Saved checkpoint to {directory} ({len(index)} tensors, step {step})")
    return directory


def load_checkpoint(directory) -> Checkpoint:
    from utils.config_factory import create_model_from_config

    directory = Path(directory)
    index_path = directory / INDEX_FILE
    if not index_path.exists():
        raise DataError(f"checkpoint not found: {index_path}")
    try:
        meta = json.loads(index_path.read_text())
    except json.JSONDecodeError as e:
        raise DataError(f"{index_path}: invalid JSON ({e})")
    if meta.get("format_version") != FORMAT_VERSION:
        raise DataError(f"{index_path}: unsupported checkpoint format {meta.get('format_version')}")

    descriptor = meta["descriptor"]
    slot_options = meta.get("slot_options", {})
    model = create_model_from_config(descriptor, slot_options)
    kinds = [slot.kind for slot in model.slots]
    if kinds != descriptor.get("slots", kinds):
        raise StructureError(f"checkpoint slots {descriptor['slots']} do not match rebuilt model {kinds}")

    tensors = {name: read_tensor(directory / path) for name, path in meta["tensors"].items()}
    params = {}
    for name, current in model.parameters().items():
        if name not in tensors:
            raise DataError(f"{index_path}: missing parameter tensor '{name}'")
        array = tensors[name]
        if array.shape != current.shape:
            raise DataError(f"parameter '{name}' has shape {array.shape}, model expects {current.shape}")
        params[name] = Tensor(array, requires_grad=True)
    model.set_parameters(params)

    for i, slot in enumerate(model.slots):
        prefix = f"slot{i}.state."
        arrays = {name[len(prefix):]: array for name, array in tensors.items() if name.startswith(prefix)}
        expected = set(slot.state_arrays())
        if set(arrays) != expected:
            raise DataError(f"slot {i} state has {sorted(arrays)}, expected {sorted(expected)}")
        slot.load_state_arrays(arrays)

    cw = model.cw_slot
    if cw is not None:
        for name, axis in sorted(meta.get("axis_assignment", {}).items(), key=lambda kv: kv[1]):
            cw.layer.rotation.assign(name, int(axis))

    logging.info(f"Loaded {descriptor['arch']}/{model.variant} checkpoint from {directory} (step {meta['step']})")
    return Checkpoint(model, int(meta["step"]), meta.get("config", {}), slot_options)


def tensors_equal(a, b) -> bool:
    """Bitwise comparison of two models' parameters and slot states."""
    pa, pb = a.parameters(), b.parameters()
    if pa.keys() != pb.keys():
        return False
    if not all(np.array_equal(pa[k].numpy(), pb[k].numpy()) for k in pa):
        return False
    for sa, sb in zip(a.slots, b.slots):
        xa, xb = sa.state_arrays(), sb.state_arrays()
        if xa.keys() != xb.keys() or not all(np.array_equal(xa[k], xb[k]) for k in xa):
            return False
    return len(a.slots) == len(b.slots)
