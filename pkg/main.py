# main.py
"""
Command-line entry point.

    python main.py gen --out data/quickstart
    python main.py train --config config/default.cfg --manifest data/quickstart/manifest.json --out runs/cw
    python main.py swap-bn --checkpoint runs/bn --layer 0 --manifest data/quickstart/manifest.json --out runs/swapped
    python main.py report auc --checkpoint runs/cw --manifest data/quickstart/manifest.json

Every command is deterministic given ``--seed``.  Failures exit with the
status carried by the raised :class:`utils.errors.CwError`.
"""

import argparse
import logging
import sys
from dataclasses import fields
from pathlib import Path

import numpy as np

from utils.errors import ConfigError, CwError
from utils.logging_utils import setup_logger


# ── gen ─────────────────────────────────────────────────────────────────────

def cmd_gen(args) -> int:
    from training.synthetic import SyntheticSpec, make_synthetic
    from utils.manifest import write_labels, write_manifest
    from utils.tensor_file import write_tensor

    spec = SyntheticSpec(**{f.name: getattr(args, f.name) for f in fields(SyntheticSpec)})
    data = make_synthetic(spec, args.seed)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)

    write_tensor(out / "main.cwt", data.main.x, args.dtype)
    write_labels(out / "labels.csv", data.main.y)
    write_tensor(out / "eval.cwt", data.eval.x, args.dtype)
    write_labels(out / "eval_labels.csv", data.eval.y)
    concepts = []
    for concept in data.bank:
        path = f"concept_{concept.name}.cwt"
        write_tensor(out / path, concept.samples, args.dtype)
        concepts.append({"name": concept.name, "axis": concept.axis, "path": path})
    if data.directions is not None:
        write_tensor(out / "directions.cwt", data.directions)
    manifest = write_manifest(out / "manifest.json", "main.cwt", "labels.csv", concepts,
                              {"main": "eval.cwt", "labels": "eval_labels.csv"})
    logging.info(f"Wrote synthetic dataset and manifest to {manifest}")
    return 0


# ── train ───────────────────────────────────────────────────────────────────

def _train_config(args):
    from training.train_config import TrainConfig
    from utils.config_manager import ConfigManager, parse_config_text

    values = ConfigManager().load_config(args.config) if args.config else {}
    for assignment in args.set or []:
        for key, value in parse_config_text(assignment, "--set").items():
            values[key] = TrainConfig.coerce(key, value)
    if args.seed is not None:
        values["seed"] = args.seed
    return TrainConfig.from_mapping(values)


def cmd_train(args) -> int:
    from training import AlternatingTrainer, evaluate
    from training.alternating_trainer import HISTORY_COLUMNS, PROBE_COLUMNS
    from utils.checkpoint import load_checkpoint, save_checkpoint
    from utils.config_factory import create_model_from_train_config
    from utils.manifest import load_manifest
    from utils.report_writer import write_csv, write_json

    config = _train_config(args)
    manifest = load_manifest(args.manifest)
    main_split = manifest.load_main()
    eval_split = manifest.load_eval()
    bank = manifest.load_bank()
    n_classes = int(max(main_split.y.max(), eval_split.y.max())) + 1

    start_step, slot_options = 0, config.slot_options()
    if args.init:
        initial = load_checkpoint(args.init)
        model, start_step, slot_options = initial.model, initial.step, initial.slot_options
        if model.input_shape != main_split.input_shape:
            raise ConfigError(f"--init model expects inputs {model.input_shape}, data has {main_split.input_shape}")
        logging.info(f"Warm-starting from {args.init}")
    else:
        model = create_model_from_train_config(config, main_split.input_shape, n_classes,
                                               np.random.default_rng(config.seed))
    if model.cw_slot is not None:
        for concept in bank:
            model.cw_slot.layer.rotation.assign(concept.name, concept.axis)

    trainer = AlternatingTrainer(model, config, bank if bank.k else None)
    trainer.step = start_step
    history = trainer.fit(main_split, epochs=config.epochs)
    scores = evaluate(model, eval_split)
    logging.info(f"eval accuracy {scores['accuracy']:.4f}, balanced accuracy {scores['balanced_accuracy']:.4f}")

    out = Path(args.out)
    save_checkpoint(out, model, trainer.step, config.to_dict(), slot_options)
    write_csv(out / "history.csv", HISTORY_COLUMNS, history.rows())
    write_csv(out / "probe.csv", PROBE_COLUMNS, history.probe)
    write_json(out / "summary.json", {
        **scores,
        "steps": trainer.step,
        "variant": model.variant,
        "final_orthogonality_error": trainer.orthogonality_error(),
    })
    return 0


# ── swap-bn ─────────────────────────────────────────────────────────────────

def cmd_swap_bn(args) -> int:
    from models import swap_bn_for_cw
    from utils.checkpoint import load_checkpoint, save_checkpoint
    from utils.manifest import load_manifest

    source = load_checkpoint(args.checkpoint)
    manifest = load_manifest(args.manifest)
    calibration = manifest.load_main().x
    if args.calibration_size:
        calibration = calibration[:args.calibration_size]
    swapped = swap_bn_for_cw(source.model, args.layer, calibration, source.slot_options)
    for concept in manifest.load_bank():
        swapped.cw_slot.layer.rotation.assign(concept.name, concept.axis)
    save_checkpoint(args.out, swapped, source.step, source.config, source.slot_options)
    return 0


# ── report ──────────────────────────────────────────────────────────────────

def cmd_report(args) -> int:
    from utils.checkpoint import load_checkpoint
    from utils.manifest import load_manifest
    from utils.report_selectors import ReportContext, ReportOptions, select_report
    from utils.report_writer import render_csv, render_json

    build = select_report(args.selector)
    checkpoints = [load_checkpoint(path).model for path in args.checkpoint]
    options = ReportOptions(
        k=args.k, grid=args.grid, axis_i=args.axis_i, axis_j=args.axis_j, sample_id=args.sample_id,
        repetitions=args.repetitions, loss_kind=args.loss_kind, target=args.target,
        occlusion=args.occlusion, patch=args.patch, stride=args.stride,
        all_axes=args.all_axes, all_layers=args.all_layers,
    )
    seed = 0 if args.seed is None else args.seed
    context = ReportContext(checkpoints[0], load_manifest(args.manifest), options,
                            np.random.default_rng(seed), layer_models=checkpoints)
    table = build(context)

    text = render_json(table.summary) if args.format == "json" else render_csv(table.header, table.rows)
    if args.out:
        out = Path(args.out)
        out.parent.mkdir(parents=True, exist_ok=True)
        with open(out, "w", newline="") as f:
            f.write(text)
        logging.info(f"Wrote {args.selector} report ({len(table.rows)} rows) to {out}")
    else:
        sys.stdout.write(text)
    return 0


# ── Parser ──────────────────────────────────────────────────────────────────

def build_parser() -> argparse.ArgumentParser:
    from training.synthetic import SyntheticSpec

    parser = argparse.ArgumentParser(prog="cw", description="Concept whitening lab")
    parser.add_argument("--seed", type=int, default=None, help="seed for every random choice")
    parser.add_argument("--log-file", default=None, help="log file (default: logs/cw_<timestamp>.log)")
    parser.add_argument("--no-log-file", action="store_true", help="log to stderr only")
    commands = parser.add_subparsers(dest="command", required=True)

    gen = commands.add_parser("gen", help="generate a synthetic dataset with planted concepts")
    gen.add_argument("--out", required=True)
    gen.add_argument("--dtype", choices=("float64", "float32"), default="float64")
    for f in fields(SyntheticSpec):
        gen.add_argument(f"--{f.name.replace('_', '-')}", dest=f.name, type=type(f.default), default=f.default)
    gen.set_defaults(handler=cmd_gen)

    train = commands.add_parser("train", help="train a host network with alternating CW alignment")
    train.add_argument("--config", default=None, help="config name in config/ or a path to a .cfg file")
    train.add_argument("--manifest", required=True)
    train.add_argument("--out", required=True, help="checkpoint directory")
    train.add_argument("--set", action="append", metavar="KEY=VALUE", help="override one config key")
    train.add_argument("--init", default=None, help="warm-start from this checkpoint")
    train.set_defaults(handler=cmd_train)

    swap = commands.add_parser("swap-bn", help="replace a batch-norm slot with a calibrated CW layer")
    swap.add_argument("--checkpoint", required=True)
    swap.add_argument("--layer", type=int, required=True)
    swap.add_argument("--manifest", required=True, help="manifest whose main split calibrates whitening")
    swap.add_argument("--calibration-size", type=int, default=None)
    swap.add_argument("--out", required=True)
    swap.set_defaults(handler=cmd_swap_bn)

    report = commands.add_parser("report", help="measure a trained checkpoint")
    report.add_argument("selector", help="topk | similarity | correlation | auc | importance | hist2d | "
                                         "trajectory | occlusion | reducers | summary")
    report.add_argument("--checkpoint", action="append", required=True,
                        help="checkpoint directory; repeat for correlation --all-layers")
    report.add_argument("--manifest", required=True)
    report.add_argument("--out", default=None, help="write here instead of stdout")
    report.add_argument("--format", choices=("csv", "json"), default="csv")
    report.add_argument("--k", type=int, default=10)
    report.add_argument("--grid", type=int, default=50)
    report.add_argument("--axis-i", type=int, default=0)
    report.add_argument("--axis-j", type=int, default=1)
    report.add_argument("--sample-id", type=int, default=0)
    report.add_argument("--repetitions", type=int, default=5)
    report.add_argument("--loss-kind", choices=("multiclass", "balanced_binary"), default="multiclass")
    report.add_argument("--target", type=int, default=None)
    report.add_argument("--occlusion", action="store_true", help="attach argmax occlusion cells to topk")
    report.add_argument("--patch", type=int, default=None)
    report.add_argument("--stride", type=int, default=None)
    report.add_argument("--all-axes", action="store_true", help="importance for every axis")
    report.add_argument("--all-layers", action="store_true", help="correlation per supplied checkpoint")
    report.set_defaults(handler=cmd_report)
    return parser


def run(argv=None) -> int:
    args = build_parser().parse_args(argv)
    setup_logger(args.log_file, to_file=not args.no_log_file)
    if args.command == "gen" and args.seed is None:
        args.seed = 0
    try:
        return args.handler(args)
    except CwError as e:
        logging.error(f"{args.command} failed: {e}")
        return e.exit_code
    except Exception:
        logging.exception(f"{args.command} failed with an unexpected error")
        return 1


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
