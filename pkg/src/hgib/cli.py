"""Command-line front end: synth / train / eval / attack / sweep.

Flags override values from an optional JSON config file; all randomness
derives from one root seed via named substreams.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
import time
from dataclasses import fields
from pathlib import Path

from . import autodiff as ad
from . import metrics as metrics_mod
from . import model, perturb, trainer
from .data import (
    Dataset,
    SynthConfig,
    fuse_and_build,
    generate_synthetic,
    load_csv,
    normalize,
)
from .errors import HgibError
from .losses import LossConfig
from .trainer import TrainConfig


def _write_json(path: Path, obj) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w") as fh:
        json.dump(obj, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _load_config_file(path: str | None) -> dict:
    if path is None:
        return {}
    with open(path) as fh:
        return json.load(fh)


def _merge(file_cfg: dict, args: argparse.Namespace, mapping: dict) -> dict:
    """File values first, explicit flags win."""
    merged = dict(file_cfg)
    for flag, key in mapping.items():
        value = getattr(args, flag, None)
        if value is not None:
            merged[key] = value
    return merged


_TRAIN_FLAGS = {
    "seed": "seed",
    "epochs": "epochs",
    "lr": "lr_initial",
    "k": "k_neighbors",
    "label_fraction": "label_fraction",
    "train_fraction": "train_fraction",
}
_LOSS_FLAGS = {"mu": "mu", "xi": "xi", "beta": "beta", "alpha": "alpha", "gamma": "gamma"}


def _train_config(args: argparse.Namespace) -> TrainConfig:
    file_cfg = _load_config_file(args.config)
    loss_cfg = _merge(file_cfg.pop("loss", {}), args, _LOSS_FLAGS)
    merged = _merge(file_cfg, args, _TRAIN_FLAGS)
    known = {f.name for f in fields(TrainConfig)} - {"loss"}
    unknown = set(merged) - known
    if unknown:
        raise HgibError(f"unknown config keys: {sorted(unknown)}")
    if "hidden_dims" in merged:
        merged["hidden_dims"] = tuple(merged["hidden_dims"])
    return TrainConfig(loss=LossConfig(**loss_cfg), **merged)


def _load_dataset(args: argparse.Namespace, seed: int) -> Dataset:
    if args.features:
        if not args.labels:
            raise HgibError("--labels is required with --features")
        return load_csv(args.features, args.labels)
    if args.synth is None:
        raise HgibError("provide --synth or --features/--labels")
    if args.synth == "default":
        synth_cfg = SynthConfig(seed=seed)
    else:
        with open(args.synth) as fh:
            synth_cfg = SynthConfig(**json.load(fh))
    return generate_synthetic(synth_cfg)


def _add_dataset_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--synth", help="'default' or path to a synth config JSON")
    p.add_argument("--features", nargs="+", help="one CSV per modality")
    p.add_argument("--labels", help="labels CSV (id,label)")


def _add_train_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="JSON config file with TrainConfig fields")
    p.add_argument("--seed", type=int)
    p.add_argument("--epochs", type=int)
    p.add_argument("--lr", type=float)
    p.add_argument("--k", type=int)
    p.add_argument("--label-fraction", type=float, dest="label_fraction")
    p.add_argument("--train-fraction", type=float, dest="train_fraction")
    p.add_argument("--mu", type=float)
    p.add_argument("--xi", type=float)
    p.add_argument("--beta", type=float)
    p.add_argument("--alpha", type=float)
    p.add_argument("--gamma", type=float)


def _metrics_payload(report, cfg: TrainConfig, attack: dict | None = None) -> dict:
    payload = {"seed": cfg.seed, "config": cfg.to_dict(), "metrics": report.to_dict()}
    if attack is not None:
        payload["attack"] = attack
    return payload


# ------------------------------------------------------------ subcommands

def cmd_synth(args: argparse.Namespace) -> int:
    if args.synth_config:
        with open(args.synth_config) as fh:
            cfg_dict = json.load(fh)
    else:
        cfg_dict = {}
    if args.seed is not None:
        cfg_dict["seed"] = args.seed
    if "dims" in cfg_dict:
        cfg_dict["dims"] = tuple(cfg_dict["dims"])
    cfg = SynthConfig(**cfg_dict)
    dataset = generate_synthetic(cfg)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    ids = [f"v{i}" for i in range(dataset.n)]
    for i, X in enumerate(dataset.modalities):
        with open(out / f"modality_{i}.csv", "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["id"] + [f"f{j}" for j in range(X.shape[1])])
            for vid, row in zip(ids, X):
                w.writerow([vid] + [repr(float(v)) for v in row])
    with open(out / "labels.csv", "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["id", "label"])
        for vid, lab in zip(ids, dataset.labels):
            w.writerow([vid, dataset.class_names[lab]])
    cfg_out = {**cfg.__dict__, "dims": list(cfg.dims)}
    _write_json(out / "synth.json", cfg_out)
    print(f"wrote {dataset.n}-vertex dataset to {out}")
    return 0


def cmd_train(args: argparse.Namespace) -> int:
    cfg = _train_config(args)
    dataset = _load_dataset(args, cfg.seed)
    record = trainer.train(dataset, cfg)
    out = Path(args.out)
    run_doc = {
        "config": record.config,
        "loss_trace": record.loss_trace,
        "metrics": record.metrics.to_dict(),
        "timing": {
            "timestamp": time.strftime("%Y-%m-%dT%H:%M:%S"),
            "duration_seconds": record.duration_seconds,
        },
    }
    _write_json(out / "run.json", run_doc)
    _write_json(out / "metrics.json", _metrics_payload(record.metrics, cfg))
    out.mkdir(parents=True, exist_ok=True)
    model.save_checkpoint(record.model_state, out / "checkpoint.json")
    print(f"macro AUC {record.metrics.auc_average:.4f} -> {out}")
    return 0


def cmd_eval(args: argparse.Namespace) -> int:
    cfg = _train_config(args)
    dataset = _load_dataset(args, cfg.seed)
    dataset = normalize(dataset)
    state = model.load_checkpoint(args.checkpoint)
    fused, graph = fuse_and_build(dataset, cfg.k_neighbors)
    _, _, test_mask = trainer.split_and_mask(
        dataset, cfg.train_fraction, cfg.label_fraction, cfg.seed
    )
    logits, _ = model.forward(fused, graph, state)
    report = metrics_mod.evaluate(ad.row_softmax(logits), dataset.labels, test_mask)
    _write_json(Path(args.out) / "metrics.json", _metrics_payload(report, cfg))
    print(f"macro AUC {report.auc_average:.4f}")
    return 0


def _attack_config(args: argparse.Namespace, seed: int) -> perturb.AttackConfig:
    return perturb.AttackConfig(
        kind=args.attack,
        drop_fraction=args.drop_fraction,
        rho=args.rho,
        seed=seed,
        per_vertex_max=args.per_vertex_max,
    )


def cmd_attack(args: argparse.Namespace) -> int:
    cfg = _train_config(args)
    dataset = _load_dataset(args, cfg.seed)
    if args.checkpoint:
        state = model.load_checkpoint(args.checkpoint)
        _, _, test_mask = trainer.split_and_mask(
            normalize(dataset), cfg.train_fraction, cfg.label_fraction, cfg.seed
        )
    else:
        record = trainer.train(dataset, cfg)
        state, test_mask = record.model_state, record.test_mask
    attack_cfg = _attack_config(args, cfg.seed)
    report = perturb.attack_evaluate(
        dataset, state, attack_cfg, cfg.k_neighbors, test_mask
    )
    payload = _metrics_payload(report, cfg, attack=attack_cfg.__dict__)
    _write_json(Path(args.out) / "metrics.json", payload)
    print(f"{attack_cfg.kind}: macro AUC {report.auc_average:.4f}")
    return 0


def cmd_sweep(args: argparse.Namespace) -> int:
    cfg = _train_config(args)
    seeds = args.seeds
    if not seeds:
        raise HgibError("sweep needs at least one --seeds value")
    rows = []
    if args.grid == "labels":
        settings = args.fractions
        if not settings:
            raise HgibError("empty label-fraction grid")
    else:
        settings = args.attacks
        if not settings:
            raise HgibError("empty attack grid")

    for setting in settings:
        reports = []
        error = None
        for seed in seeds:
            try:
                run_cfg = TrainConfig(
                    **{
                        **cfg.to_dict(),
                        "seed": seed,
                        "loss": cfg.loss,
                        **(
                            {"label_fraction": float(setting)}
                            if args.grid == "labels"
                            else {}
                        ),
                    }
                )
                dataset = _load_dataset(args, run_cfg.seed)
                record = trainer.train(dataset, run_cfg)
                if args.grid == "attacks":
                    attack_cfg = perturb.AttackConfig(
                        kind=str(setting),
                        drop_fraction=args.drop_fraction,
                        rho=args.rho,
                        seed=seed,
                    )
                    reports.append(
                        perturb.attack_evaluate(
                            dataset,
                            record.model_state,
                            attack_cfg,
                            run_cfg.k_neighbors,
                            record.test_mask,
                        )
                    )
                else:
                    reports.append(record.metrics)
            except (HgibError, OSError, ValueError) as exc:
                error = f"seed {seed}: {exc}"
                break
        if error is None:
            rows.append(
                {
                    "setting": setting,
                    "status": "ok",
                    "metrics": trainer.aggregate_metrics(reports),
                }
            )
        else:
            rows.append({"setting": setting, "status": "error", "error": error})

    table = {"grid": args.grid, "seeds": list(seeds), "rows": rows}
    _write_json(Path(args.out) / "table.json", table)
    print(f"{len(rows)}-row table -> {args.out}")
    return 0


# ------------------------------------------------------------------ main

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hgib",
        description="Hypergraph information-bottleneck experiments",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="generate a synthetic dataset as CSV files")
    p.add_argument("--out", required=True)
    p.add_argument("--seed", type=int)
    p.add_argument("--synth-config", help="JSON file with generator settings")
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("train", help="train one seeded run")
    _add_dataset_flags(p)
    _add_train_flags(p)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("eval", help="evaluate a checkpoint on the test split")
    _add_dataset_flags(p)
    _add_train_flags(p)
    p.add_argument("--checkpoint", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("attack", help="evaluate a trained model under perturbation")
    _add_dataset_flags(p)
    _add_train_flags(p)
    p.add_argument("--attack", choices=["none", "drop", "noise"], default="none")
    p.add_argument("--drop-fraction", type=float, default=0.2, dest="drop_fraction")
    p.add_argument("--rho", type=float, default=0.01)
    p.add_argument("--per-vertex-max", action="store_true", dest="per_vertex_max")
    p.add_argument("--checkpoint", help="skip training, use this checkpoint")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_attack)

    p = sub.add_parser("sweep", help="label-fraction or attack grid over seeds")
    _add_dataset_flags(p)
    _add_train_flags(p)
    p.add_argument("--grid", choices=["labels", "attacks"], required=True)
    p.add_argument("--seeds", type=int, nargs="+", required=True)
    p.add_argument(
        "--fractions", type=float, nargs="+", default=[0.8, 0.6, 0.4]
    )
    p.add_argument(
        "--attacks", nargs="+", default=["none", "drop", "noise"],
        choices=["none", "drop", "noise"],
    )
    p.add_argument("--drop-fraction", type=float, default=0.2, dest="drop_fraction")
    p.add_argument("--rho", type=float, default=0.01)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_sweep)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except FileNotFoundError as exc:
        print(f"error: file not found: {exc.filename}", file=sys.stderr)
        return 2
    except (HgibError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
