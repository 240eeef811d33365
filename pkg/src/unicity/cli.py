"""Command-line pipeline: generate or ingest data, measure, fit, export.

Results go to standard output (JSON objects or headed CSV), diagnostics
to standard error. Exit codes: 0 success, 2 input error, 3 infeasible
parameters, 4 non-convergence. All commands accept --seed and --workers
(environment overrides UNICITY_SEED and UNICITY_WORKERS) and are
byte-deterministic for a fixed seed, whatever the worker count.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys

from . import __version__
from .dataset import Dataset, InvertedIndex, load_dataset
from .errors import (
    BoundUndefinedError,
    EmptyDatasetError,
    EnumerationBudgetError,
    FitError,
    InsufficientDataError,
    InsufficientTraceError,
    InvalidSizeError,
    InvalidSpecError,
    NoEligibleRecordError,
    NotConvergedError,
    NotInDatasetError,
    RejectionBudgetError,
    UndefinedResultError,
    UnknownItemError,
)
from .estimator import estimate_rad, estimate_unicity, unicity_vs_size
from .model import ExponentialDecayModel, mean_abs_error, normalize_curve, split_train_test
from .sampler import run_until_converged
from .synthgen import GenSpec, PAPER_SHAPED, generate
from .validation import derive_seed

_INPUT_ERRORS = (
    EmptyDatasetError,
    UnknownItemError,
    InvalidSpecError,
    InsufficientDataError,
    InsufficientTraceError,
    NotInDatasetError,
    OSError,
    ValueError,
)
_INFEASIBLE_ERRORS = (
    NoEligibleRecordError,
    InvalidSizeError,
    EnumerationBudgetError,
    RejectionBudgetError,
    BoundUndefinedError,
    UndefinedResultError,
)


def _fmt(value) -> str:
    if isinstance(value, float):
        return repr(float(value))
    return str(value)


def _emit_json(payload: dict) -> None:
    sys.stdout.write(json.dumps(payload, sort_keys=True) + "\n")


def _emit_csv(header: list[str], rows) -> None:
    sys.stdout.write(",".join(header) + "\n")
    for row in rows:
        sys.stdout.write(",".join(_fmt(v) for v in row) + "\n")


def _resolve_seed(args) -> int | None:
    if args.seed is not None:
        return args.seed
    env = os.environ.get("UNICITY_SEED")
    return int(env) if env else None


def _load(args) -> Dataset:
    dataset = load_dataset(args.input)
    if getattr(args, "blacklist", None):
        with open(args.blacklist, "r", encoding="utf-8") as fh:
            tokens = [tok for line in fh for tok in line.split()]
        dataset = dataset.filter_items(tokens)
    return dataset


def cmd_stats(args) -> int:
    dataset = _load(args)
    _emit_json(dataset.stats().to_dict())
    return 0


def _parse_sweep(text: str) -> list[int]:
    lo, _, hi = text.partition("..")
    if not hi:
        raise InvalidSpecError(f"sweep range must look like 1..10, got {text!r}")
    lo, hi = int(lo), int(hi)
    if lo < 1 or hi < lo:
        raise InvalidSpecError(f"bad sweep range {text!r}")
    return list(range(lo, hi + 1))


def cmd_unicity(args) -> int:
    dataset = _load(args)
    seed = _resolve_seed(args)
    common = dict(
        epsilon=args.epsilon,
        sigma=args.sigma,
        mode=args.mode,
        burn_in=args.burn_in,
        workers=args.workers,
    )
    if args.sweep_k:
        rows = []
        for k in _parse_sweep(args.sweep_k):
            est = estimate_unicity(dataset, k, seed=derive_seed(seed, k), **common)
            rows.append((k, est.h1_hat, est.n, est.mode))
        _emit_csv(["K", "h1Hat", "n", "mode"], rows)
        return 0
    est = estimate_unicity(dataset, args.k, seed=seed, **common)
    _emit_json(
        {
            "K": est.k,
            "epsilon": args.epsilon,
            "h1Hat": est.h1_hat,
            "mode": est.mode,
            "n": est.n,
            "seed": seed,
            "sigma": args.sigma,
        }
    )
    return 0


def cmd_rad(args) -> int:
    dataset = _load(args)
    hist = estimate_rad(
        dataset,
        args.k,
        depth=args.depth,
        epsilon=args.epsilon,
        sigma=args.sigma,
        burn_in=args.burn_in,
        seed=_resolve_seed(args),
        workers=args.workers,
    )
    rows = [(i + 1, f) for i, f in enumerate(hist.frequencies)]
    rows.append(("tail", hist.tail))
    _emit_csv(["support", "frequency"], rows)
    return 0


def cmd_curve(args) -> int:
    dataset = _load(args)
    sizes = [int(s) for s in args.sizes.split(",") if s]
    curve = unicity_vs_size(
        dataset,
        args.k,
        sizes,
        epsilon=args.epsilon,
        sigma=args.sigma,
        trials=args.trials,
        burn_in=args.burn_in,
        seed=_resolve_seed(args),
        workers=args.workers,
    )
    rows = [
        (args.k, pt.size, pt.mean_h1, pt.stdev_h1 / (pt.trials**0.5))
        for pt in curve
    ]
    _emit_csv(["K", "x", "y", "stderr"], rows)
    return 0


def _read_curve_csv(path) -> list[tuple[float, float]]:
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None:
            raise InsufficientDataError(f"{path} is empty")
        cols = [h.strip() for h in header]
        if "x" in cols and "y" in cols:
            xi, yi = cols.index("x"), cols.index("y")
        elif len(cols) >= 2:
            xi, yi = 0, 1
        else:
            raise InvalidSpecError(f"{path} has no x,y columns")
        points = [(float(row[xi]), float(row[yi])) for row in reader if row]
    if not points:
        raise InsufficientDataError(f"{path} has a header but no rows")
    return points


def cmd_fit(args) -> int:
    raw = _read_curve_csv(args.curve)
    points = normalize_curve(raw, args.x_max)
    train, test = split_train_test(points, args.split)
    model = ExponentialDecayModel().fit_points(train)
    delta = mean_abs_error(model, test)
    _emit_json(
        {
            "a": model.a_,
            "b": model.b_,
            "c": model.c_,
            "converged": model.converged_,
            "delta": delta,
            "iterations": model.iterations_,
            "residualNorm": model.residual_norm_,
        }
    )
    if args.predictions:
        with open(args.predictions, "w", encoding="utf-8") as fh:
            fh.write("x,y,prediction,subset\n")
            for name, part in (("train", train), ("test", test)):
                for x, y in part:
                    pred = float(model.predict([x])[0])
                    fh.write(f"{x!r},{y!r},{pred!r},{name}\n")
    return 0


def cmd_gen(args) -> int:
    if args.preset == "paper-shaped":
        spec = PAPER_SHAPED
    elif args.users is None or args.items is None:
        raise InvalidSpecError("--users and --items are required without --preset")
    else:
        spec = GenSpec(num_users=args.users, num_items=args.items)
    overrides = {}
    if args.users is not None:
        overrides["num_users"] = args.users
    if args.items is not None:
        overrides["num_items"] = args.items
    if args.exponent is not None:
        overrides["popularity_exponent"] = args.exponent
    if args.size_mu is not None:
        overrides["size_mu"] = args.size_mu
    if args.size_sigma is not None:
        overrides["size_sigma"] = args.size_sigma
    seed = _resolve_seed(args)
    if seed is not None:
        overrides["seed"] = seed
    if overrides:
        from dataclasses import replace

        spec = replace(spec, **overrides)
    dataset = generate(spec)
    if args.output == "-":
        for line in dataset.to_lines():
            sys.stdout.write(line + "\n")
    else:
        dataset.write(args.output)
        _emit_json(dataset.stats().to_dict())
    return 0


def cmd_converge(args) -> int:
    dataset = _load(args)
    index = InvertedIndex(dataset)
    seed = _resolve_seed(args)
    rows = []
    failures = 0
    for chain in range(args.chains):
        try:
            _, _, history = run_until_converged(
                dataset,
                args.k,
                seed=derive_seed(seed, chain),
                check_every=args.check_every,
                max_steps=args.max_steps,
                index=index,
            )
        except NotConvergedError as exc:
            history = exc.z_history
            failures += 1
            print(
                f"chain {chain}: no convergence in {args.max_steps} steps",
                file=sys.stderr,
            )
        rows.extend((chain, step, z) for step, z in history)
    _emit_csv(["chain", "step", "z"], rows)
    return 4 if failures else 0


def _add_common(sub, *, seed=True, workers=True) -> None:
    if seed:
        sub.add_argument("--seed", type=int, default=None, help="64-bit RNG seed")
    if workers:
        sub.add_argument(
            "--workers", type=int, default=None, help="parallel worker processes"
        )


def _add_sampling(sub) -> None:
    sub.add_argument("--epsilon", type=float, default=0.01, help="sampling error bound")
    sub.add_argument("--sigma", type=float, default=0.99, help="confidence level")
    sub.add_argument("--burn-in", type=int, default=3000, help="chain steps per sample")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="unicity",
        description="Measure how re-identifiable users of a set-valued dataset "
        "are from K known items, and extrapolate to larger populations.",
    )
    parser.add_argument("--version", action="version", version=__version__)
    subs = parser.add_subparsers(dest="command", required=True)

    p = subs.add_parser("stats", help="dataset statistics as JSON")
    p.add_argument("input")
    p.add_argument("--blacklist", help="file of items to drop before computing")
    _add_common(p)
    p.set_defaults(func=cmd_stats)

    p = subs.add_parser("unicity", help="estimate the unicity of K-item subsets")
    p.add_argument("input")
    p.add_argument("--k", type=int, default=2, help="subset size K")
    p.add_argument("--mode", choices=["uniform", "biased"], default="uniform")
    p.add_argument("--sweep-k", help="range A..B: one CSV row per K")
    p.add_argument("--blacklist")
    _add_sampling(p)
    _add_common(p)
    p.set_defaults(func=cmd_unicity)

    p = subs.add_parser("rad", help="relative abundance histogram as CSV")
    p.add_argument("input")
    p.add_argument("--k", type=int, default=2, help="subset size K")
    p.add_argument("--depth", type=int, default=20, help="histogram buckets")
    p.add_argument("--blacklist")
    _add_sampling(p)
    _add_common(p)
    p.set_defaults(func=cmd_rad)

    p = subs.add_parser("curve", help="unicity over random subsets of users")
    p.add_argument("input")
    p.add_argument("--k", type=int, default=2)
    p.add_argument("--sizes", required=True, help="comma-separated user counts")
    p.add_argument("--trials", type=int, default=1, help="subsamples per size")
    p.add_argument("--blacklist")
    _add_sampling(p)
    _add_common(p)
    p.set_defaults(func=cmd_curve)

    p = subs.add_parser("fit", help="fit the decay model to a curve CSV")
    p.add_argument("curve", help="CSV with x,y (or K,x,y,stderr) columns")
    p.add_argument("--x-max", type=float, required=True, help="normalization size")
    p.add_argument("--split", type=float, default=0.7, help="training fraction")
    p.add_argument("--predictions", help="write per-point predictions CSV here")
    _add_common(p, workers=True)
    p.set_defaults(func=cmd_fit)

    p = subs.add_parser("gen", help="generate a synthetic dataset file")
    p.add_argument("output", help="path, or - for standard output")
    p.add_argument("--preset", choices=["paper-shaped"], help="calibrated shape")
    p.add_argument("--users", type=int)
    p.add_argument("--items", type=int)
    p.add_argument("--exponent", type=float, help="popularity skew (0 = uniform)")
    p.add_argument("--size-mu", type=float, help="lognormal location of sizes")
    p.add_argument("--size-sigma", type=float, help="lognormal scale of sizes")
    _add_common(p)
    p.set_defaults(func=cmd_gen)

    p = subs.add_parser("converge", help="z-score traces of independent chains")
    p.add_argument("input")
    p.add_argument("--k", type=int, default=2)
    p.add_argument("--chains", type=int, default=20)
    p.add_argument("--check-every", type=int, default=100)
    p.add_argument("--max-steps", type=int, default=20000)
    p.add_argument("--blacklist")
    _add_common(p)
    p.set_defaults(func=cmd_converge)

    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return args.func(args)
    except _INFEASIBLE_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except (NotConvergedError, FitError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 4
    except _INPUT_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
