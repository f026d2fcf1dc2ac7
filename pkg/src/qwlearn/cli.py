"""Command-line interface.

Subcommands: walk (simulate and dump a distribution), dataset (generate a
sweep file), train / evaluate / predict (estimator lifecycle), and
reproduce (end-to-end experiment pipelines writing self-contained
artifacts).  Exit codes: 0 success, 1 runtime/numerical failure, 2 usage.
"""

from __future__ import annotations

import argparse
import json
import math
import re
import sys
import time
from pathlib import Path

import numpy as np

from . import dataset as ds_mod
from . import estimators, model_io, neural
from .errors import QwlearnError
from .walk import (
    INIT_SYMMETRIC_I,
    INIT_SYMMETRIC_PLAIN,
    SPLIT_STEP,
    STANDARD,
    CoinSpec,
    Distribution,
    WalkSpec,
    evolve,
    format_f64,
    measure,
    origin_state,
)

DEG = 180.0 / math.pi


class UsageError(QwlearnError):
    """Bad flag combination; maps to exit code 2."""


def _parse_initial(text: str):
    if text == "symmetric-i":
        return INIT_SYMMETRIC_I
    if text == "symmetric-plain":
        return INIT_SYMMETRIC_PLAIN
    if text.startswith("custom:"):
        parts = text[len("custom:") :].split(",")
        if len(parts) != 2:
            raise UsageError("custom initial state must be 'custom:ALPHA,BETA'")
        try:
            return complex(parts[0]), complex(parts[1])
        except ValueError:
            raise UsageError(f"cannot parse complex amplitudes in {text!r}") from None
    raise UsageError(
        f"unknown initial state {text!r}; use symmetric-i, symmetric-plain, or custom:ALPHA,BETA"
    )


def _angle(value: float, degrees: bool) -> float:
    return math.radians(value) if degrees else value


# ---------------------------------------------------------------- walk


def cmd_walk(args) -> int:
    if args.split_step:
        if args.theta is not None:
            raise UsageError("--theta conflicts with --split-step; use --theta1/--theta2")
        if args.theta1 is None or args.theta2 is None:
            raise UsageError("--split-step requires --theta1 and --theta2")
        coin1 = CoinSpec(_angle(args.theta1, args.degrees))
        coin2 = CoinSpec(_angle(args.theta2, args.degrees))
        spec = WalkSpec(SPLIT_STEP, coin1, coin2, steps=args.steps)
    else:
        if args.theta is None:
            raise UsageError("--theta is required unless --split-step is given")
        if args.theta1 is not None or args.theta2 is not None:
            raise UsageError("--theta1/--theta2 apply only to --split-step")
        coin1 = CoinSpec(
            _angle(args.theta, args.degrees),
            _angle(args.xi, args.degrees),
            _angle(args.zeta, args.degrees),
        )
        spec = WalkSpec(STANDARD, coin1, steps=args.steps)
    alpha, beta = _parse_initial(args.initial)
    state = origin_state(alpha, beta, args.steps)
    dist = measure(evolve(state, spec))
    dist.write(args.out)
    order = np.argsort(dist.probs, kind="stable")
    peaks = [int(dist.positions[i]) for i in order[::-1][:2]]
    print(f"wrote {args.out} ({dist.probs.size} sites)")
    print(f"total probability: {format_f64(dist.total())}")
    print(
        "top peaks: "
        + ", ".join(f"x={p} (P={format_f64(dist.prob_at(p))})" for p in peaks)
    )
    return 0


# ---------------------------------------------------------------- dataset


_MODE_TO_KIND = {
    "single-theta": ds_mod.SINGLE_THETA,
    "theta-steps": ds_mod.THETA_STEPS,
    "ssqw": ds_mod.SSQW_THETA1,
}


def _grid_from_args(args) -> ds_mod.GridSpec:
    kind = _MODE_TO_KIND[args.mode]
    base = ds_mod.default_grid(kind)
    deg = args.degrees
    theta_start = _angle(args.theta_start, deg) if args.theta_start is not None else base.theta_start
    theta_stop = _angle(args.theta_stop, deg) if args.theta_stop is not None else base.theta_stop
    theta_step = _angle(args.theta_step, deg) if args.theta_step is not None else base.theta_step
    initial = _parse_initial(args.initial) if args.initial else base.initial_state
    if kind == ds_mod.THETA_STEPS:
        lo = args.steps_min if args.steps_min is not None else base.steps_range[0]
        hi = args.steps_max if args.steps_max is not None else base.steps_range[1]
        return ds_mod.GridSpec(
            kind, theta_start, theta_stop, theta_step,
            steps_range=(lo, hi), initial_state=initial,
        )
    steps = args.steps if args.steps is not None else base.steps_fixed
    theta2 = None
    if kind == ds_mod.SSQW_THETA1:
        theta2 = _angle(args.theta2, deg) if args.theta2 is not None else base.theta2_fixed
    return ds_mod.GridSpec(
        kind, theta_start, theta_stop, theta_step,
        steps_fixed=steps, theta2_fixed=theta2, initial_state=initial,
    )


def cmd_dataset(args) -> int:
    grid = _grid_from_args(args)
    ds = ds_mod.generate(grid)
    ds_mod.save_dataset(ds, args.out)
    print(f"{ds.n_rows} rows, feature_len {ds.feature_len}")
    print(f"wrote {args.out}")
    return 0


# ---------------------------------------------------------------- train


def _dataset_provenance(ds: ds_mod.Dataset, seed: int, ratio: float) -> dict:
    return {
        "dataset_kind": ds.kind,
        "dataset_rows": ds.n_rows,
        "feature_len": ds.feature_len,
        "position_offset": ds.position_offset,
        "target_names": list(ds.target_names),
        "split_seed": seed,
        "split_ratio": ratio,
    }


def train_model_file(
    data_path,
    model_name: str,
    out_path,
    seed: int,
    ratio: float,
    alpha: float = 0.01,
    k: int = 5,
    epochs: int = 100,
    batch_size: int = 64,
    learning_rate: float = 0.002,
) -> dict:
    """Split, fit, and persist one model; returns its provenance block."""
    ds = ds_mod.load_dataset(data_path)
    train, _ = ds_mod.split(ds, ds_mod.SplitSpec(ratio=ratio, seed=seed))
    if model_name == "linear":
        model = estimators.fit_linear(train)
    elif model_name == "ridge":
        model = estimators.fit_ridge(train, alpha)
    elif model_name == "knn":
        model = estimators.fit_knn(train, k)
    elif model_name == "baseline":
        model = estimators.fit_baseline(train)
    elif model_name == "mlp":
        config = neural.TrainConfig(
            epochs=epochs, batch_size=batch_size, seed=seed, learning_rate=learning_rate
        )
        model, _history = neural.train_mlp(train, config)
    else:
        raise UsageError(f"unknown model {model_name!r}")
    provenance = _dataset_provenance(ds, seed, ratio)
    model_io.save_model(model, out_path, provenance)
    return provenance


def cmd_train(args) -> int:
    provenance = train_model_file(
        args.data,
        args.model,
        args.out,
        seed=args.seed,
        ratio=args.split_ratio,
        alpha=args.alpha,
        k=args.k,
        epochs=args.epochs,
        batch_size=args.batch_size,
        learning_rate=args.lr,
    )
    print(
        f"trained {args.model} on {provenance['dataset_kind']} "
        f"({provenance['dataset_rows']} rows, split seed {args.seed})"
    )
    print(f"wrote {args.out}")
    return 0


# ---------------------------------------------------------------- evaluate


def _model_predictions(model, doc, features: np.ndarray) -> np.ndarray:
    if isinstance(model, neural.MlpModel):
        return neural.predict_batch(model, features)
    return estimators.predict_batch(model, features)


def _display_units(target_names: list[str]) -> bool:
    """Two-target (theta, steps) models report degrees + raw steps."""
    return len(target_names) == 2


def _to_display(values: np.ndarray, target_names: list[str]) -> np.ndarray:
    out = values.copy()
    for j, name in enumerate(target_names):
        if name.startswith("theta"):
            out[:, j] *= DEG
    return out


def evaluate_model_file(model_path, data_path) -> dict:
    """Reconstruct the recorded test split and compute the test MSE."""
    model, doc = model_io.load_model(model_path)
    prov = doc.get("provenance", {})
    ds = ds_mod.load_dataset(data_path)
    expected_len = prov.get("feature_len", ds.feature_len)
    if ds.feature_len != expected_len:
        raise QwlearnError(
            f"dataset feature_len {ds.feature_len} does not match model ({expected_len})"
        )
    seed = prov.get("split_seed")
    ratio = prov.get("split_ratio")
    if seed is None or ratio is None:
        raise QwlearnError("model provenance lacks split seed/ratio; cannot rebuild test set")
    _, test = ds_mod.split(ds, ds_mod.SplitSpec(ratio=ratio, seed=seed))
    preds = _model_predictions(model, doc, test.features)
    truth = np.asarray(test.targets)
    metrics = {
        "test_rows": test.n_rows,
        "model_type": doc["model_type"],
        "split_seed": seed,
        "split_ratio": ratio,
    }
    if _display_units(ds.target_names):
        mse_val = estimators.mse(
            _to_display(preds, ds.target_names), _to_display(truth, ds.target_names)
        )
        metrics["test_mse_display"] = mse_val
        metrics["display_units"] = "theta in degrees, steps raw"
    else:
        mse_val = estimators.mse(preds, truth)
        metrics["test_mse"] = mse_val
        metrics["units"] = "radians^2"
    return metrics


def cmd_evaluate(args) -> int:
    metrics = evaluate_model_file(args.model_file, args.data)
    key = "test_mse_display" if "test_mse_display" in metrics else "test_mse"
    print(f"MSE {format_f64(metrics[key])}")
    report = {
        "experiment": "evaluate",
        "seed": metrics.get("split_seed"),
        "metrics": metrics,
    }
    report_path = args.report or (str(args.model_file) + ".eval.json")
    with open(report_path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(report, fh, sort_keys=True)
        fh.write("\n")
    print(f"wrote {report_path}")
    return 0


# ---------------------------------------------------------------- predict


def _features_from_distribution(dist: Distribution, prov: dict) -> np.ndarray:
    feature_len = prov.get("feature_len")
    offset = prov.get("position_offset")
    if feature_len is None or offset is None:
        # no layout metadata: accept only an exact-length vector
        return np.asarray(dist.probs, dtype=np.float64)
    vec = np.zeros(int(feature_len))
    for x, p in zip(dist.positions, dist.probs):
        i = int(x) + int(offset)
        if 0 <= i < vec.size:
            vec[i] = p
        elif p != 0.0:
            raise QwlearnError(
                f"distribution has probability at position {x}, outside the model's lattice"
            )
    return vec


def cmd_predict(args) -> int:
    model, doc = model_io.load_model(args.model_file)
    prov = doc.get("provenance", {})
    if re.fullmatch(r"\d+", args.input) and args.data:
        ds = ds_mod.load_dataset(args.data)
        index = int(args.input)
        if index >= ds.n_rows:
            raise QwlearnError(f"row index {index} out of range ({ds.n_rows} rows)")
        features = ds.features[index]
    else:
        features = _features_from_distribution(Distribution.read(args.input), prov)
    if isinstance(model, neural.MlpModel):
        pred = neural.predict_batch(model, np.asarray(features).reshape(1, -1))[0]
    else:
        pred = estimators.predict(model, features)
    theta = float(pred[0])
    print(f"theta_radians {format_f64(theta)}")
    print(f"theta_degrees {format_f64(theta * DEG)}")
    if pred.size > 1:
        print(f"steps {format_f64(float(pred[1]))}")
    return 0


# ---------------------------------------------------------------- reproduce


def _write_report(out_dir: Path, name: str, report: dict, table_lines: list[str]) -> None:
    json_path = out_dir / f"{name}_report.json"
    with open(json_path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(report, fh, sort_keys=True, indent=1)
        fh.write("\n")
    text_path = out_dir / f"{name}_report.txt"
    with open(text_path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(table_lines) + "\n")
    print(f"wrote {json_path}")
    print(f"wrote {text_path}")


def _sweep_pipeline(out_dir: Path, name: str, kind: str, models: list[tuple[str, dict]], seed: int):
    """Generate dataset, train each model, evaluate from the on-disk artifacts."""
    grid = ds_mod.default_grid(kind)
    ds = ds_mod.generate(grid)
    data_path = out_dir / f"{name}_dataset.txt"
    ds_mod.save_dataset(ds, data_path)
    counts = {
        "kind": ds.kind,
        "rows": ds.n_rows,
        "feature_len": ds.feature_len,
        "train_rows": math.floor(0.75 * ds.n_rows),
        "test_rows": ds.n_rows - math.floor(0.75 * ds.n_rows),
    }
    del ds
    metrics = {}
    model_paths = {}
    for model_name, hyper in models:
        model_path = out_dir / f"{name}_model_{model_name}.json"
        train_model_file(
            data_path, model_name, model_path, seed=seed, ratio=0.75, **hyper
        )
        metrics[model_name] = evaluate_model_file(model_path, data_path)
        model_paths[model_name] = model_path
    return data_path, model_paths, metrics, counts


def _model_label(name: str, hyper: dict) -> str:
    if name == "ridge":
        return f"ridge (alpha={hyper.get('alpha', 0.01)})"
    if name == "knn":
        return f"knn (k={hyper.get('k', 5)})"
    return name


def _mse_table(metrics: dict, models: list[tuple[str, dict]], unit: str) -> list[str]:
    lines = [f"{'model':<24} test MSE ({unit})"]
    for model_name, hyper in models:
        m = metrics[model_name]
        value = m.get("test_mse", m.get("test_mse_display"))
        lines.append(f"{_model_label(model_name, hyper):<24} {value:.6e}")
    return lines


def _reproduce_theta_sweep(name: str, out_dir: Path, seed: int, with_probe: bool) -> dict:
    models = [("linear", {}), ("knn", {"k": 5}), ("ridge", {"alpha": 0.01})]
    data_path, model_paths, metrics, counts = _sweep_pipeline(
        out_dir, name, ds_mod.SINGLE_THETA, models, seed
    )
    report = {"experiment": name, "seed": seed, "dataset": counts, "metrics": metrics}
    lines = [
        f"experiment {name} (seed {seed})",
        f"dataset {counts['kind']}: {counts['rows']} rows "
        f"(train {counts['train_rows']} / test {counts['test_rows']}), "
        f"feature_len {counts['feature_len']}",
        "",
    ]
    lines += _mse_table(metrics, models, "radians^2")
    if with_probe:
        grid = ds_mod.default_grid(ds_mod.SINGLE_THETA)
        probe_theta = math.pi / 2
        state = origin_state(*grid.initial_state, grid.steps_fixed)
        spec = WalkSpec(STANDARD, CoinSpec(probe_theta), steps=grid.steps_fixed)
        probe = measure(evolve(state, spec))
        probe_path = out_dir / f"{name}_probe.txt"
        probe.write(probe_path)
        probe_block = {"theta_degrees": 90.0, "predictions": {}}
        lines += ["", "probe at theta=90 degrees (outside the training grid):"]
        for model_name, _hyper in models:
            model, _doc = model_io.load_model(model_paths[model_name])
            pred = float(estimators.predict(model, probe.probs)[0])
            pred_deg = pred * DEG
            pct = abs(pred_deg - 90.0) / 90.0 * 100.0
            probe_block["predictions"][model_name] = {
                "theta_radians": pred,
                "theta_degrees": pred_deg,
                "percent_error": pct,
            }
            lines.append(f"{model_name:<24} {pred_deg:.3f} deg ({pct:.3f}% error)")
        report["probe"] = probe_block
    _write_report(out_dir, name, report, lines)
    return report


def _reproduce_ssqw(out_dir: Path, seed: int) -> dict:
    name = "table33"
    models = [("linear", {}), ("knn", {"k": 5})]
    _data, _paths, metrics, counts = _sweep_pipeline(
        out_dir, name, ds_mod.SSQW_THETA1, models, seed
    )
    report = {"experiment": name, "seed": seed, "dataset": counts, "metrics": metrics}
    lines = [
        f"experiment {name} (seed {seed})",
        f"dataset {counts['kind']}: {counts['rows']} rows "
        f"(train {counts['train_rows']} / test {counts['test_rows']}), "
        f"feature_len {counts['feature_len']}",
        "",
    ]
    lines += _mse_table(metrics, models, "radians^2")
    _write_report(out_dir, name, report, lines)
    return report


def _reproduce_mlp(out_dir: Path, seed: int) -> dict:
    name = "mlp"
    models = [("baseline", {}), ("mlp", {})]
    _data, _paths, metrics, counts = _sweep_pipeline(
        out_dir, name, ds_mod.THETA_STEPS, models, seed
    )
    base = metrics["baseline"]["test_mse_display"]
    net = metrics["mlp"]["test_mse_display"]
    reduction = (1.0 - net / base) * 100.0
    report = {
        "experiment": name,
        "seed": seed,
        "dataset": counts,
        "metrics": metrics,
        "reduction_percent": reduction,
    }
    lines = [
        f"experiment {name} (seed {seed})",
        f"dataset {counts['kind']}: {counts['rows']} rows "
        f"(train {counts['train_rows']} / test {counts['test_rows']}), "
        f"feature_len {counts['feature_len']}",
        "",
        f"{'model':<24} test MSE (theta in degrees, steps raw)",
        f"{'baseline':<24} {base:.4f}",
        f"{'mlp':<24} {net:.4f}",
        "",
        f"error reduction vs baseline: {reduction:.3f}%",
    ]
    _write_report(out_dir, name, report, lines)
    return report


def cmd_reproduce(args) -> int:
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    started = time.monotonic()
    if args.experiment == "table31":
        _reproduce_theta_sweep("table31", out_dir, args.seed, with_probe=False)
    elif args.experiment == "table32":
        _reproduce_theta_sweep("table32", out_dir, args.seed, with_probe=True)
    elif args.experiment == "table33":
        _reproduce_ssqw(out_dir, args.seed)
    else:
        _reproduce_mlp(out_dir, args.seed)
    # timing goes to stdout only; files stay byte-identical across runs
    print(f"wall clock: {time.monotonic() - started:.1f}s")
    return 0


# ---------------------------------------------------------------- parser


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qwlearn",
        description="1D quantum walk simulation and walk-parameter estimation",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("walk", help="simulate a walk and write its distribution")
    p.add_argument("--theta", type=float, help="coin angle (standard walk)")
    p.add_argument("--xi", type=float, default=0.0)
    p.add_argument("--zeta", type=float, default=-math.pi / 2)
    p.add_argument("--steps", type=int, required=True)
    # symmetric-plain is the coin eigenvector and gives the mirror-symmetric
    # distributions; symmetric-i is available but biases the walk
    p.add_argument(
        "--initial",
        default="symmetric-plain",
        help="symmetric-plain | symmetric-i | custom:ALPHA,BETA",
    )
    p.add_argument("--split-step", action="store_true")
    p.add_argument("--theta1", type=float)
    p.add_argument("--theta2", type=float)
    p.add_argument("--degrees", action="store_true", help="angles given in degrees")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_walk)

    p = sub.add_parser("dataset", help="generate a sweep dataset file")
    p.add_argument("--mode", choices=sorted(_MODE_TO_KIND), required=True)
    p.add_argument("--theta-start", type=float)
    p.add_argument("--theta-stop", type=float)
    p.add_argument("--theta-step", type=float)
    p.add_argument("--steps", type=int)
    p.add_argument("--steps-min", type=int)
    p.add_argument("--steps-max", type=int)
    p.add_argument("--theta2", type=float)
    p.add_argument("--initial")
    p.add_argument("--degrees", action="store_true")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_dataset)

    p = sub.add_parser("train", help="split a dataset and fit a model")
    p.add_argument(
        "--model", choices=["linear", "ridge", "knn", "baseline", "mlp"], required=True
    )
    p.add_argument("--data", required=True)
    p.add_argument("--split-ratio", type=float, default=0.75)
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--alpha", type=float, default=0.01)
    p.add_argument("--k", type=int, default=5)
    p.add_argument("--epochs", type=int, default=100)
    p.add_argument("--batch-size", type=int, default=64)
    p.add_argument("--lr", type=float, default=0.002)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("evaluate", help="test MSE of a trained model")
    p.add_argument("--model-file", required=True)
    p.add_argument("--data", required=True)
    p.add_argument("--report", help="JSON report path (default: MODEL.eval.json)")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("predict", help="predict parameters for one distribution")
    p.add_argument("--model-file", required=True)
    p.add_argument("--input", required=True, help="distribution file, or row index with --data")
    p.add_argument("--data", help="dataset file when --input is a row index")
    p.set_defaults(func=cmd_predict)

    p = sub.add_parser("reproduce", help="run an experiment pipeline end to end")
    p.add_argument(
        "--experiment", choices=["table31", "table32", "table33", "mlp"], required=True
    )
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--out-dir", required=True)
    p.set_defaults(func=cmd_reproduce)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 2
    except QwlearnError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
