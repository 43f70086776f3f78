"""Command-line entry point: ``costboost {train,eval,sweep,predictor-map}``.

Exit codes: 0 success, 2 bad arguments, 3 data or model-file problems,
4 training failures.
"""

from __future__ import annotations

import argparse
import concurrent.futures
import csv
import hashlib
import io
import json
import logging
import os
import sys
import tempfile
import time
from pathlib import Path
from typing import Optional, Sequence

from . import boosters, datagen, metrics, predictors
from .core import CostBoostError, CostSpec, Ensemble, InputError, Member, RoundTrace, Stump

EXIT_OK, EXIT_ARGS, EXIT_DATA, EXIT_TRAIN = 0, 2, 3, 4
MODEL_VERSION = "1"

SWEEP_ALGORITHMS = ("asymboost", "adacost", "csb0", "csb1", "csb2", "adac1", "adac2",
                    "adac3", "cs_adaboost", "adaboost_db", "cost_generalized")
SWEEP_FIELDS = ("algorithm", "c_pos", "c_neg", "global_error", "pos_error", "neg_error",
                "raw_error", "runtime", "status")

log = logging.getLogger("costboost")


class UsageError(Exception):
    """Arguments parse but do not make sense together."""


class DataError(Exception):
    """Input data or model file cannot be used."""


def g17(x: float) -> str:
    return format(float(x), ".17g")


# model files ---------------------------------------------------------------

def ensemble_to_dict(ensemble: Ensemble, algorithm: str) -> dict:
    spec = ensemble.cost_spec
    return {
        "version": MODEL_VERSION,
        "algorithm": algorithm,
        "cost_spec": {"c_pos": spec.c_pos, "c_neg": spec.c_neg},
        "threshold": ensemble.threshold,
        "voting": ensemble.voting,
        "n_features": ensemble.n_features,
        "members": [{"alpha": m.alpha, "stump": m.stump.to_dict()} for m in ensemble.members],
    }


def ensemble_from_dict(d: dict) -> Ensemble:
    try:
        if str(d["version"]) != MODEL_VERSION:
            raise DataError(f"unsupported model version {d['version']!r}")
        spec = CostSpec(float(d["cost_spec"]["c_pos"]), float(d["cost_spec"]["c_neg"]))
        members = [Member(float(m["alpha"]), Stump.from_dict(m["stump"])) for m in d["members"]]
        return Ensemble(members, float(d["threshold"]), d["voting"], spec)
    except (KeyError, TypeError, ValueError, InputError) as exc:
        raise DataError(f"malformed model file: {exc}") from exc


def dumps_json(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def write_atomic(files: dict) -> None:
    """Write every ``path -> text`` pair to a temporary file, then rename all of them."""
    staged = []
    try:
        for path, text in files.items():
            path = Path(path)
            path.parent.mkdir(parents=True, exist_ok=True)
            fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.")
            with os.fdopen(fd, "w", newline="") as fh:
                fh.write(text)
            staged.append((tmp, path))
    except BaseException:
        for tmp, _ in staged:
            os.unlink(tmp)
        raise
    for tmp, path in staged:
        os.replace(tmp, path)


# data arguments ------------------------------------------------------------

def add_data_args(p: argparse.ArgumentParser) -> None:
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--data", help="CSV file f1,...,fd,label[,cost]")
    src.add_argument("--synth", choices=datagen.KINDS, help="generate a synthetic set")
    p.add_argument("--n-pos", type=int, default=None)
    p.add_argument("--n-neg", type=int, default=None)
    p.add_argument("--seed", type=int, default=0)


def load_data(args) -> tuple:
    try:
        if args.data:
            return datagen.read_csv(args.data)
        defaults = {"vj_counterexample": (30, 70), "vj_inverted": (30, 70),
                    "gaussian_blobs": (100, 100), "uniform_random": (100, 100)}[args.synth]
        spec = datagen.SynthSpec(args.synth,
                                 args.n_pos if args.n_pos is not None else defaults[0],
                                 args.n_neg if args.n_neg is not None else defaults[1],
                                 args.seed)
        return datagen.generate(spec), None
    except (datagen.DataFormatError, InputError) as exc:
        raise DataError(str(exc)) from exc


def fingerprint(dataset, costs=None) -> str:
    return hashlib.sha256(datagen.dataset_csv_text(dataset, costs).encode()).hexdigest()


def parse_cost_pairs(text: str) -> list:
    pairs = []
    for item in text.split(","):
        try:
            a, b = item.split(":")
            pair = (float(a), float(b))
        except ValueError:
            raise UsageError(f"bad cost ratio {item!r}; expected like 2:1") from None
        if not (pair[0] > 0 and pair[1] > 0):
            raise UsageError(f"costs must be positive in {item!r}")
        pairs.append(pair)
    return pairs


# commands ------------------------------------------------------------------

def trace_csv(trace) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(RoundTrace.CSV_FIELDS)
    for r in trace:
        w.writerow(r.csv_row())
    return buf.getvalue()


def cmd_train(args) -> int:
    dataset, costs = load_data(args)
    spec = CostSpec(args.cp, args.cn, None if costs is None else tuple(costs))
    if args.algo in ("adaboost",) and not spec.symmetric:
        print("warning: adaboost ignores misclassification costs", file=sys.stderr)
    try:
        config = boosters.TrainConfig(args.algo, args.rounds, spec, epsilon_clamp=args.clamp,
                                      seed=args.seed,
                                      validation_fraction=args.validation_fraction)
    except InputError as exc:
        raise UsageError(str(exc)) from exc
    start = time.perf_counter()
    try:
        model = boosters.train(config, dataset)
    except (CostBoostError, FloatingPointError) as exc:
        print(f"error: training failed: {exc}", file=sys.stderr)
        return EXIT_TRAIN
    duration = time.perf_counter() - start
    out = Path(args.out)
    paths = {"model": out / "model.json", "trace": out / "trace.csv",
             "manifest": out / "manifest.json"}
    manifest = {
        "config": config.snapshot(),
        "data": args.data if args.data else {"synth": args.synth, "seed": args.seed,
                                             "n": dataset.n, "m": dataset.m},
        "dataset_sha256": fingerprint(dataset, costs),
        "outputs": {k: str(v) for k, v in paths.items()},
        "rounds_completed": len(model.trace),
        "stop_reason": model.stop_reason,
        "duration_seconds": duration,
    }
    write_atomic({
        paths["model"]: dumps_json(ensemble_to_dict(model.ensemble, model.algorithm)),
        paths["trace"]: trace_csv(model.trace),
        paths["manifest"]: dumps_json(manifest),
    })
    if model.stop_reason:
        print(f"note: stopped after {len(model.trace)} rounds: {model.stop_reason}",
              file=sys.stderr)
    return EXIT_OK


def cmd_eval(args) -> int:
    try:
        raw = json.loads(Path(args.model).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise DataError(f"cannot read model: {exc}") from exc
    ensemble = ensemble_from_dict(raw)
    dataset, _ = load_data(args)
    if ensemble.n_features > dataset.d:
        raise DataError(f"model uses {ensemble.n_features} features, data has {dataset.d}")
    spec = ensemble.cost_spec
    if args.cp is not None or args.cn is not None:
        spec = CostSpec(args.cp if args.cp is not None else spec.c_pos,
                        args.cn if args.cn is not None else spec.c_neg)
    report = metrics.cost_error(ensemble, dataset, spec)
    sys.stdout.write(dumps_json(report.as_dict()))
    return EXIT_OK


def sweep_cell(job) -> dict:
    algorithm, (cp, cn), rounds, dataset, seed = job
    row = {"algorithm": algorithm, "c_pos": cp, "c_neg": cn}
    start = time.perf_counter()
    try:
        spec = CostSpec(cp, cn)
        model = boosters.train(boosters.TrainConfig(algorithm, rounds, spec, seed=seed), dataset)
        rep = metrics.cost_error(model.ensemble, dataset, spec)
        row.update(global_error=rep.global_error, pos_error=rep.err_pos,
                   neg_error=rep.err_neg, raw_error=rep.raw, status="ok")
    except (CostBoostError, FloatingPointError, ValueError) as exc:
        row.update(global_error=float("nan"), pos_error=float("nan"), neg_error=float("nan"),
                   raw_error=float("nan"), status=f"error: {exc}")
    row["runtime"] = time.perf_counter() - start
    return row


def sweep_workers(requested: Optional[int]) -> int:
    if requested is None:
        try:
            requested = int(os.environ.get("COSTBOOST_THREADS", "0"))
        except ValueError:
            raise UsageError("COSTBOOST_THREADS must be an integer") from None
    if requested < 0:
        raise UsageError("thread count must be non-negative")
    return requested or (os.cpu_count() or 1)


def run_sweep(algorithms: Sequence[str], cost_pairs: Sequence, rounds: int, dataset,
              seed: int = 0, workers: int = 1) -> list:
    """Train every (algorithm, cost) cell; rows come back in input order."""
    jobs = [(a, c, rounds, dataset, seed) for a in algorithms for c in cost_pairs]
    if workers <= 1 or len(jobs) <= 1:
        return [sweep_cell(j) for j in jobs]
    with concurrent.futures.ProcessPoolExecutor(max_workers=min(workers, len(jobs))) as pool:
        return list(pool.map(sweep_cell, jobs))


def sweep_csv(rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(SWEEP_FIELDS)
    for r in rows:
        w.writerow([r[k] if isinstance(r[k], str) else g17(r[k]) for k in SWEEP_FIELDS])
    return buf.getvalue()


def cmd_sweep(args) -> int:
    algorithms = [a.strip() for a in args.algos.split(",") if a.strip()]
    bad = [a for a in algorithms if a not in boosters.ALGORITHMS]
    if bad or not algorithms:
        raise UsageError(f"unknown algorithms: {', '.join(bad) or '(none)'}")
    pairs = parse_cost_pairs(args.costs)
    if args.rounds < 1:
        raise UsageError("rounds must be positive")
    dataset, _ = load_data(args)
    rows = run_sweep(algorithms, pairs, args.rounds, dataset, args.seed,
                     sweep_workers(args.threads))
    text = sweep_csv(rows)
    if args.out:
        write_atomic({Path(args.out): text})
    else:
        sys.stdout.write(text)
    failed = [r for r in rows if r["status"] != "ok"]
    for r in failed:
        print(f"warning: {r['algorithm']} {r['c_pos']}:{r['c_neg']}: {r['status']}",
              file=sys.stderr)
    return EXIT_TRAIN if len(failed) == len(rows) else EXIT_OK


def parse_floats(text: str) -> list:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise UsageError(f"bad number list {text!r}") from None


def cmd_predictor_map(args) -> int:
    if args.p_steps < 1:
        raise UsageError("--p-steps must be positive")
    ps = [k / (args.p_steps + 1) for k in range(1, args.p_steps + 1)]
    gammas = parse_floats(args.gammas)
    if not gammas or not all(0 < g < 1 for g in gammas):
        raise UsageError("gammas must lie strictly inside (0, 1)")
    try:
        grid = predictors.isoline_grid(args.variant, gammas, ps)
    except InputError as exc:
        raise UsageError(str(exc)) from exc
    if args.variant == "csa":
        w = predictors.find_nonmonotone_witness(grid)
        if w is None:
            print("no non-monotone gamma row on this grid", file=sys.stderr)
        else:
            print(f"non-monotone witness: p={w.p:.6g} gamma {w.gamma_low:.6g} -> "
                  f"{w.gamma_high:.6g}: f {w.f_low:.6g} -> {w.f_high:.6g}", file=sys.stderr)
    text = predictors.grid_csv(grid)
    if args.out:
        write_atomic({Path(args.out): text})
    else:
        sys.stdout.write(text)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="costboost",
                                     description="Cost-sensitive boosting toolkit")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("train", help="train one model and export it with its trace")
    p.add_argument("--algo", required=True, choices=boosters.ALGORITHMS)
    add_data_args(p)
    p.add_argument("--cp", type=float, default=1.0, help="cost of a missed positive")
    p.add_argument("--cn", type=float, default=1.0, help="cost of a false positive")
    p.add_argument("--rounds", type=int, required=True)
    p.add_argument("--out", default=".", help="output directory")
    p.add_argument("--clamp", type=float, default=1e-12, help="weighted-error clamp")
    p.add_argument("--validation-fraction", type=float, default=0.3,
                   help="holdout share for threshold_tuned")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("eval", help="cost-sensitive error report of a saved model")
    p.add_argument("--model", required=True)
    add_data_args(p)
    p.add_argument("--cp", type=float, default=None)
    p.add_argument("--cn", type=float, default=None)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("sweep", help="grid of algorithms x cost ratios")
    p.add_argument("--algos", default=",".join(SWEEP_ALGORITHMS))
    p.add_argument("--costs", default="1:1,2:1,4:1", help="comma list of C_P:C_N")
    add_data_args(p)
    p.add_argument("--rounds", type=int, default=50)
    p.add_argument("--threads", type=int, default=None,
                   help="worker processes (default COSTBOOST_THREADS, 0 = all cores)")
    p.add_argument("--out", default=None, help="summary CSV (default stdout)")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("predictor-map", help="optimal-predictor isoline grid as CSV")
    p.add_argument("--variant", choices=("ab", "cga", "csa"), required=True)
    p.add_argument("--p-steps", type=int, default=99)
    p.add_argument("--gammas", default="0.5,0.55,0.6,0.65,0.7,0.75,0.8,0.85,0.9")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_predictor_map)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ARGS
    except (DataError, datagen.DataFormatError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
