"""Command-line front end: train, predict, eval and bench.

Model files are plain text: one header line

    alm-svm v1 task=<svc|svr> n=<int> bias=<0|1> c=<real> eps=<real> labels=<a:b|none>

followed by n weight lines, each the shortest round-trippable decimal of
one coordinate. Bench rows are CSV with the header
``dataset,k,it_sn,it_cg,time_s,metric``; identical flags and seed give
byte-identical output except for the time column.
"""

from __future__ import annotations

import argparse
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from .alm import (
    DivergedError,
    SolverConfig,
    alm_solve,
    build_svc,
    build_svr,
)
from .data_io import (
    Dataset,
    ParseError,
    augment_bias,
    load_libsvm,
    normalize_labels,
    split,
)
from .metrics import Model, accuracy, mse, predict, predict_label
from .newton import CgBreakdownError, LineSearchError

__all__ = ["main", "write_model", "read_model"]

_FMT = repr  # shortest round-trippable decimal for floats


def write_model(model: Model, path) -> None:
    lo_hi = (
        "none"
        if model.label_map is None
        else f"{_FMT(model.label_map[0])}:{_FMT(model.label_map[1])}"
    )
    lines = [
        f"alm-svm v1 task={model.task} n={model.w.size} "
        f"bias={1 if model.bias_augmented else 0} c={_FMT(model.c_used)} "
        f"eps={_FMT(model.eps_used)} labels={lo_hi}"
    ]
    lines.extend(_FMT(float(v)) for v in model.w)
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        f.write("\n".join(lines) + "\n")


def read_model(path) -> Model:
    with open(path, "r", encoding="utf-8") as f:
        lines = f.read().splitlines()
    if not lines:
        raise ValueError(f"{path}: empty model file")
    head = lines[0].split()
    if len(head) != 8 or head[0] != "alm-svm" or head[1] != "v1":
        raise ValueError(f"{path}: not an alm-svm v1 model file")
    fields = dict(part.split("=", 1) for part in head[2:])
    n = int(fields["n"])
    weights = lines[1:]
    if len(weights) != n:
        raise ValueError(f"{path}: expected {n} weights, found {len(weights)}")
    label_map = None
    if fields["labels"] != "none":
        lo, hi = fields["labels"].split(":")
        label_map = (float(lo), float(hi))
    return Model(
        w=np.array([float(v) for v in weights]),
        task=fields["task"],
        bias_augmented=fields["bias"] == "1",
        label_map=label_map,
        c_used=float(fields["c"]),
        eps_used=float(fields["eps"]),
    )


def _add_solver_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--c", type=float, default=None,
                   help="penalty weight C (overrides the scale rules)")
    p.add_argument("--c-scale", type=float, default=550.0,
                   help="classification default C = c_scale / m_train")
    p.add_argument("--c-scale-svr", type=float, default=5.0,
                   help="regression default C = c_scale_svr / n_features")
    p.add_argument("--epsilon", type=float, default=0.1,
                   help="regression tube half-width")
    p.add_argument("--bias", action="store_true",
                   help="append a constant feature before training")
    p.add_argument("--n-features", type=int, default=None,
                   help="widen the feature count beyond the file's max index")
    p.add_argument("--sigma0", type=float, default=0.15)
    p.add_argument("--sigma-max", type=float, default=2.0)
    p.add_argument("--theta", type=float, default=0.8)
    p.add_argument("--max-outer", type=int, default=10)
    p.add_argument("--tol", type=float, default=1e-6)
    p.add_argument("--seed", type=int, default=42)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="alm-svm",
        description="Train and evaluate sparse linear SVMs with an "
        "augmented Lagrangian / semismooth Newton-CG solver.",
    )
    parser.add_argument("--self-check", action="store_true",
                        help=argparse.SUPPRESS)
    sub = parser.add_subparsers(dest="command", required=True)

    t = sub.add_parser("train", help="train a model and write a model file")
    t.add_argument("--task", choices=("svc", "svr"), required=True)
    t.add_argument("--data", required=True)
    t.add_argument("--model", required=True)
    _add_solver_flags(t)
    t.set_defaults(func=cmd_train)

    pr = sub.add_parser("predict", help="write one prediction per sample")
    pr.add_argument("--model", required=True)
    pr.add_argument("--data", required=True)
    pr.add_argument("--output", default="-",
                    help="output path, '-' for stdout (default)")
    pr.set_defaults(func=cmd_predict)

    ev = sub.add_parser("eval", help="predict and report accuracy or mse")
    ev.add_argument("--model", required=True)
    ev.add_argument("--data", required=True)
    ev.set_defaults(func=cmd_eval)

    b = sub.add_parser("bench", help="split, train and evaluate; CSV output")
    b.add_argument("--data", required=True, nargs="+")
    b.add_argument("--task", choices=("svc", "svr"), required=True)
    b.add_argument("--split", type=float, default=0.8)
    b.add_argument("--jobs", type=int, default=1)
    b.add_argument("--pretty", action="store_true",
                   help="aligned table instead of CSV")
    b.add_argument("--emit-active-set", default=None, metavar="PATH",
                   help="dump |I(z)| per Newton iteration (single dataset)")
    b.add_argument("--emit-residuals", default=None, metavar="PATH",
                   help="dump |grad phi| per Newton iteration (single dataset)")
    _add_solver_flags(b)
    b.set_defaults(func=cmd_bench)
    return parser


def _validate_common(parser, args) -> None:
    c = getattr(args, "c", None)
    if c is not None and c <= 0:
        parser.error("C must be positive")
    if getattr(args, "c_scale", 1.0) <= 0 or getattr(args, "c_scale_svr", 1.0) <= 0:
        parser.error("C scale must be positive")
    if getattr(args, "epsilon", 0.0) < 0:
        parser.error("epsilon must be nonnegative")
    if getattr(args, "split", None) is not None and not 0.0 < args.split < 1.0:
        parser.error("--split must be in (0, 1)")
    if getattr(args, "jobs", 1) < 1:
        parser.error("--jobs must be >= 1")


def _config(args) -> SolverConfig:
    return SolverConfig(
        sigma0=args.sigma0,
        sigma_max=args.sigma_max,
        theta=args.theta,
        tol=args.tol,
        max_outer=args.max_outer,
        seed=args.seed,
    )


def _resolve_c(args, task: str, train: Dataset) -> float:
    if args.c is not None:
        return args.c
    if task == "svc":
        return args.c_scale / train.m
    return args.c_scale_svr / train.n_features


def _prepare(args, task: str, data: Dataset):
    """Normalize labels (classification), optionally add a bias feature."""
    label_map = None
    if task == "svc":
        data, label_map = normalize_labels(data)
    if args.bias:
        data = augment_bias(data)
    return data, label_map


def _train_on(args, task: str, train: Dataset):
    train, label_map = _prepare(args, task, train)
    c_value = _resolve_c(args, task, train)
    if task == "svc":
        problem = build_svc(train, c_value)
    else:
        problem = build_svr(train, c_value, args.epsilon)
    w, report = alm_solve(problem, _config(args))
    model = Model(
        w=w,
        task=task,
        bias_augmented=args.bias,
        label_map=label_map,
        c_used=c_value,
        eps_used=args.epsilon if task == "svr" else 0.0,
    )
    return model, report


def cmd_train(args) -> int:
    data = load_libsvm(args.data, n_features=args.n_features)
    model, report = _train_on(args, args.task, data)
    write_model(model, args.model)
    for warning in report.warnings:
        print(f"warning: {warning}", file=sys.stderr)
    print(
        f"k={report.k} it_sn={report.it_sn} it_cg={report.it_cg} "
        f"time_s={report.time_seconds:.3f} kkt={report.kkt_residual:.3e} "
        f"gap={report.duality_gap_rel:.3e} obj={report.objective:.6e}"
    )
    return 0


def cmd_predict(args) -> int:
    model = read_model(args.model)
    data = load_libsvm(args.data)
    if model.task == "svc":
        values = (predict_label(model, s) for s in data.samples)
    else:
        values = (predict(model, s) for s in data.samples)
    text = "".join(_FMT(float(v)) + "\n" for v in values)
    if args.output == "-":
        sys.stdout.write(text)
    else:
        with open(args.output, "w", encoding="utf-8", newline="\n") as f:
            f.write(text)
    return 0


def cmd_eval(args) -> int:
    model = read_model(args.model)
    data = load_libsvm(args.data)
    if model.task == "svc":
        print(f"accuracy={accuracy(model, data):.3f}")
    else:
        print(f"mse={mse(model, data):.6g}")
    return 0


def _bench_one(args, path: str):
    data = load_libsvm(path, n_features=args.n_features)
    train, test = split(data, args.split, args.seed)
    model, report = _train_on(args, args.task, train)
    if args.task == "svc":
        metric = accuracy(model, test)
    else:
        metric = mse(model, test)
    return Path(path).stem, report, metric


def _write_history(path, header: str, per_outer) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        f.write(f"outer,newton_iter,{header}\n")
        for outer, values in enumerate(per_outer):
            for j, v in enumerate(values):
                f.write(f"{outer},{j},{v}\n")


def cmd_bench(args) -> int:
    if (args.emit_active_set or args.emit_residuals) and len(args.data) > 1:
        raise ValueError("history dumps need a single --data file")
    if args.jobs == 1 or len(args.data) == 1:
        results = [_bench_one(args, p) for p in args.data]
    else:
        with ThreadPoolExecutor(max_workers=args.jobs) as pool:
            results = list(pool.map(lambda p: _bench_one(args, p), args.data))
    rows = [
        (name, str(r.k), str(r.it_sn), str(r.it_cg),
         f"{r.time_seconds:.3f}", f"{metric:.6f}")
        for name, r, metric in results
    ]
    header = ("dataset", "k", "it_sn", "it_cg", "time_s", "metric")
    if args.pretty:
        widths = [
            max(len(h), *(len(row[i]) for row in rows))
            for i, h in enumerate(header)
        ]
        print("  ".join(h.ljust(w) for h, w in zip(header, widths)))
        for row in rows:
            print("  ".join(v.ljust(w) for v, w in zip(row, widths)))
    else:
        print(",".join(header))
        for row in rows:
            print(",".join(row))
    if args.emit_active_set or args.emit_residuals:
        report = results[0][1]
        if args.emit_active_set:
            sizes, start = [], 0
            for count in report.newton_iters_per_outer:
                sizes.append(report.active_set_history[start:start + count])
                start += count
            _write_history(args.emit_active_set, "active_rows", sizes)
        if args.emit_residuals:
            _write_history(
                args.emit_residuals, "grad_norm",
                [[_FMT(g) for g in outer] for outer in report.grad_norm_history],
            )
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    _validate_common(parser, args)
    if args.self_check:
        from .baseline import self_check

        self_check()
        print("self-check ok", file=sys.stderr)
    try:
        return args.func(args)
    except (ParseError, OSError, ValueError, DivergedError,
            LineSearchError, CgBreakdownError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
