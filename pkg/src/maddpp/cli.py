"""Command-line surface: simulate, madd, fip, sweep and the full pipeline.

Every command writes its outputs plus a run manifest; all failures exit
nonzero with a one-line `ErrorName: message` diagnostic on stderr, each
error class mapped to its own exit code.
"""

from __future__ import annotations

import argparse
import csv
import datetime
import json
import os
import sys
from pathlib import Path

import numpy as np

from . import __version__, errors
from .densities import (
    G0,
    ScoredRecord,
    build_density_vector,
    kde_plot_curve,
    madd,
    pool_density_vectors,
)
from .io import format_proba, read_records, write_records
from .model import encode, load_dataset, split, train
from .objective import (
    ObjectiveConfig,
    accuracy_loss,
    apply_threshold,
    default_lambda_grid,
    fairness_loss,
    sweep,
)
from .simulate import SimulationSpec, sample
from .transport import fip

OUT_DIR_ENV = "MADDPP_OUT_DIR"

EXIT_CODES = {
    errors.EmptyPopulation: 10,
    errors.InvalidProbability: 11,
    errors.InvalidBinCount: 12,
    errors.BinCountMismatch: 13,
    errors.InvalidBandwidth: 14,
    errors.InvalidQuantile: 15,
    errors.EmptyGroup: 16,
    errors.InvalidLambda: 17,
    errors.LengthMismatch: 18,
    errors.MissingLabels: 19,
    errors.InvalidRatios: 20,
    errors.EncodingError: 21,
    errors.TrainingDiverged: 22,
    errors.NotTrained: 23,
}


def _out_dir(args) -> Path:
    base = args.out_dir or os.environ.get(OUT_DIR_ENV) or "."
    path = Path(base)
    path.mkdir(parents=True, exist_ok=True)
    return path


def _timestamp() -> str:
    return datetime.datetime.now(datetime.timezone.utc).isoformat()


def _write_manifest(path: Path, command: str, config: dict, inputs: list,
                    outputs: list, group_counts: dict | None = None) -> None:
    manifest = {
        "command": command,
        "config": config,
        "inputs": [str(p) for p in inputs],
        "outputs": [str(p) for p in outputs],
        "group_counts": group_counts,
        "timestamp": _timestamp(),
        "version": __version__,
    }
    with open(path, "w") as fh:
        json.dump(manifest, fh, indent=2)


def _group_counts(records) -> dict:
    n0 = sum(1 for r in records if r.group == G0)
    return {"g0": n0, "g1": len(records) - n0}


def cmd_simulate(args) -> int:
    spec = SimulationSpec(n_g0=args.n_g0, n_g1=args.n_g1, seed=args.seed)
    if spec.n_g0 <= 0 or spec.n_g1 <= 0:
        raise errors.EmptyPopulation("both group sizes must be positive")
    records = sample(spec)
    out_dir = _out_dir(args)
    out = Path(args.out) if args.out else out_dir / "records.csv"
    write_records(records, out)
    _write_manifest(out.with_suffix(".manifest.json"), "simulate",
                    {"n_g0": spec.n_g0, "n_g1": spec.n_g1, "seed": spec.seed,
                     "c0": spec.c0, "c1": spec.c1},
                    inputs=[], outputs=[out], group_counts=_group_counts(records))
    print(f"wrote {out} ({len(records)} records)")
    return 0


def cmd_madd(args) -> int:
    records = read_records(args.records)
    p0 = [r.proba for r in records if r.group == G0]
    p1 = [r.proba for r in records if r.group != G0]
    if not p0 or not p1:
        raise errors.EmptyGroup("both groups must be present in the records file")
    d0 = build_density_vector(p0, args.m)
    d1 = build_density_vector(p1, args.m)
    value = madd(d0, d1)
    result = {
        "madd": value,
        "fairness_loss": 0.5 * value,
        "m": args.m,
        "bins_g0": d0.bins.tolist(),
        "bins_g1": d1.bins.tolist(),
        "bins_pooled": pool_density_vectors(d0, d1).bins.tolist(),
    }
    if args.kde_bandwidth is not None:
        result["kde_g0"] = kde_plot_curve(d0, args.kde_bandwidth)
        result["kde_g1"] = kde_plot_curve(d1, args.kde_bandwidth)
    out_dir = _out_dir(args)
    out = Path(args.out) if args.out else out_dir / "madd.json"
    with open(out, "w") as fh:
        json.dump(result, fh, indent=2)
    _write_manifest(out.with_suffix(".manifest.json"), "madd", {"m": args.m},
                    inputs=[args.records], outputs=[out],
                    group_counts=_group_counts(records))
    print(json.dumps({"madd": value, "fairness_loss": 0.5 * value}))
    return 0


def cmd_fip(args) -> int:
    records = read_records(args.records)
    new_probas = fip(records, args.lam, args.m)
    out_dir = _out_dir(args)
    out = Path(args.out) if args.out else out_dir / "fip.csv"
    with open(out, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["proba", "new_proba", "group"])
        for r, p in zip(records, new_probas):
            w.writerow([format_proba(r.proba), format_proba(p), r.group])
    _write_manifest(out.with_suffix(".manifest.json"), "fip",
                    {"lambda": args.lam, "m": args.m},
                    inputs=[args.records], outputs=[out],
                    group_counts=_group_counts(records))
    print(f"wrote {out}")
    return 0


def _sweep_config(args) -> ObjectiveConfig:
    return ObjectiveConfig(theta=args.theta, threshold=args.t, m=args.m,
                           lambda_grid=default_lambda_grid(args.grid))


def cmd_sweep(args) -> int:
    records = read_records(args.records, require_labels=True)
    config = _sweep_config(args)
    result = sweep(records, config)
    out_dir = _out_dir(args)
    prefix = args.out or str(out_dir / "sweep")
    csv_path = Path(f"{prefix}.csv")
    json_path = Path(f"{prefix}.json")
    result.write_csv(csv_path)
    result.write_json(json_path)
    _write_manifest(Path(f"{prefix}.manifest.json"), "sweep",
                    {"theta": args.theta, "t": args.t, "m": args.m, "grid": args.grid},
                    inputs=[args.records], outputs=[csv_path, json_path],
                    group_counts=_group_counts(records))
    print(json.dumps({"lambda_star": result.lambda_star,
                      "min_total_loss": result.min_total_loss}))
    return 0


def cmd_pipeline(args) -> int:
    dataset = load_dataset(args.dataset, sensitive=args.sensitive,
                           label_column=args.label_column)
    X, y, rules = encode(dataset)
    groups = dataset.sensitive_groups()
    idx_train, idx_val, idx_test = split(len(y), seed=args.seed)
    numeric = np.array([rules[name] == "numeric" for name in dataset.feature_names])
    model = train(X[idx_train], y[idx_train], feature_names=dataset.feature_names,
                  numeric_columns=numeric)

    def as_records(idx):
        probas = model.predict_proba(X[idx])
        return [ScoredRecord(proba=float(p), group=int(g), label=int(lbl))
                for p, g, lbl in zip(probas, groups[idx], y[idx])]

    config = _sweep_config(args)
    val_records = as_records(idx_val)
    result = sweep(val_records, config)

    test_records = as_records(idx_test)
    test_before = [r.proba for r in test_records]
    test_after = fip(test_records, result.lambda_star, config.m)
    labels = [r.label for r in test_records]

    def metrics(probas):
        recs = [ScoredRecord(proba=float(p), group=r.group, label=r.label)
                for p, r in zip(probas, test_records)]
        return {
            "accuracy_loss": accuracy_loss(apply_threshold(probas, config.threshold), labels),
            "fairness_loss": fairness_loss(recs, config.m),
        }

    out_dir = _out_dir(args)
    model_path = out_dir / "model.json"
    sweep_csv = out_dir / "validation_sweep.csv"
    sweep_json = out_dir / "validation_sweep.json"
    metrics_path = out_dir / "test_metrics.json"
    model.save(model_path)
    result.write_csv(sweep_csv)
    result.write_json(sweep_json)
    test_metrics = {
        "lambda_star": result.lambda_star,
        "before": metrics(test_before),
        "after": metrics(test_after),
    }
    with open(metrics_path, "w") as fh:
        json.dump(test_metrics, fh, indent=2)
    _write_manifest(out_dir / "pipeline.manifest.json", "pipeline",
                    {"sensitive": args.sensitive, "theta": args.theta, "t": args.t,
                     "m": args.m, "grid": args.grid, "seed": args.seed,
                     "encodings": rules, "dropped_rows": dataset.dropped_rows},
                    inputs=[args.dataset],
                    outputs=[model_path, sweep_csv, sweep_json, metrics_path],
                    group_counts={"g0": int((groups == 0).sum()),
                                  "g1": int((groups == 1).sum())})
    print(json.dumps(test_metrics))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="maddpp",
        description="MADD fairness metric and probability post-processing")
    parser.add_argument("--out-dir", default=None,
                        help=f"output directory (default: ${OUT_DIR_ENV} or .)")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="generate a synthetic records CSV")
    p.add_argument("--n-g0", type=int, default=10_000)
    p.add_argument("--n-g1", type=int, default=10_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("madd", help="compute the MADD of a records CSV")
    p.add_argument("records")
    p.add_argument("--m", type=int, default=100)
    p.add_argument("--kde-bandwidth", type=float, default=None,
                   help="also emit smoothed plot curves per group")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_madd)

    p = sub.add_parser("fip", help="remap probabilities for one lambda")
    p.add_argument("records")
    p.add_argument("--lambda", dest="lam", type=float, required=True)
    p.add_argument("--m", type=int, default=100)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_fip)

    p = sub.add_parser("sweep", help="sweep the lambda grid and select lambda*")
    p.add_argument("records")
    p.add_argument("--theta", type=float, default=0.5)
    p.add_argument("--t", type=float, default=0.5)
    p.add_argument("--m", type=int, default=100)
    p.add_argument("--grid", type=int, default=1000)
    p.add_argument("--out", default=None, help="output path prefix")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("pipeline", help="train, sweep on validation, evaluate on test")
    p.add_argument("dataset")
    p.add_argument("--sensitive", required=True)
    p.add_argument("--label-column", default="label")
    p.add_argument("--theta", type=float, default=0.5)
    p.add_argument("--t", type=float, default=0.5)
    p.add_argument("--m", type=int, default=100)
    p.add_argument("--grid", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_pipeline)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except errors.MaddError as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_CODES.get(type(exc), 1)


if __name__ == "__main__":
    sys.exit(main())
