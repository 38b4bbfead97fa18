"""Command-line surface: run streams, simulate experiments, generate data, inspect files.

Exit codes: 0 success, 1 usage error (bad flags or values), 2 data error
(unreadable, malformed, or inconsistent inputs).
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
import warnings
from pathlib import Path

from .errors import BoostError, DimError
from .pipeline import CACHE_MODES, MODES, RunConfig, run_stream
from .stream_io import read_class_bank, read_stream, write_class_bank, write_report, write_stream
from .theory import ClusterSpec, ShiftStreamSpec, bound_experiment, make_shift_stream, prop1_agreement

USAGE_EXIT = 1
DATA_EXIT = 2

# single source for generator defaults so flags cannot drift from the library
_DEF_STREAM = ShiftStreamSpec()


class _Parser(argparse.ArgumentParser):
    """ArgumentParser whose usage failures exit with code 1 instead of 2."""

    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"{self.prog}: error: {message}\n")
        raise SystemExit(USAGE_EXIT)


def _fraction(s: str) -> float:
    x = float(s)
    if not 0 < x <= 1:
        raise argparse.ArgumentTypeError(f"{s} is not in (0, 1]")
    return x


def _positive_float(s: str) -> float:
    x = float(s)
    if x <= 0:
        raise argparse.ArgumentTypeError(f"{s} is not positive")
    return x


def _nonneg_float(s: str) -> float:
    x = float(s)
    if x < 0:
        raise argparse.ArgumentTypeError(f"{s} is negative")
    return x


def _positive_int(s: str) -> int:
    x = int(s)
    if x < 1:
        raise argparse.ArgumentTypeError(f"{s} is not >= 1")
    return x


def _nonneg_int(s: str) -> int:
    x = int(s)
    if x < 0:
        raise argparse.ArgumentTypeError(f"{s} is negative")
    return x


def _grid(s: str) -> tuple[int, ...]:
    try:
        values = tuple(int(part) for part in s.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"grid {s!r} is not a comma-separated integer list")
    if not values or any(v < 1 for v in values):
        raise argparse.ArgumentTypeError(f"grid {s!r} must contain positive stream lengths")
    return values


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="boostcache",
                     description="Training-free test-time adaptation over embedding streams.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    run = sub.add_parser("run", help="evaluate a stream file against a class bank")
    run.add_argument("--stream", required=True, help="EMBS stream file")
    run.add_argument("--bank", required=True, help="class-bank manifest JSON")
    run.add_argument("--out", required=True, help="report JSON destination")
    run.add_argument("--alpha", type=_positive_float, default=2.0, help="affinity weight (default 2.0)")
    run.add_argument("--beta", type=_nonneg_float, default=5.0, help="affinity smoothness (default 5.0)")
    run.add_argument("--temp", type=_positive_float, default=0.01,
                     help="softmax temperature for entropies (default 0.01)")
    run.add_argument("--clip-scale", type=float, default=100.0,
                     help="zero-shot blend weight (default 100)")
    run.add_argument("--percentile", type=_fraction, default=0.1,
                     help="fraction of views kept by the entropy filter (default 0.1)")
    run.add_argument("--shots", type=_positive_int, default=3,
                     help="per-class cache capacity (default 3)")
    run.add_argument("--mode", choices=MODES, default="boostadapter")
    run.add_argument("--cache-mode", choices=CACHE_MODES, default="joint")
    run.add_argument("--consistency", action="store_true",
                     help="drop views whose cache and zero-shot labels disagree")
    run.add_argument("--entropy-gate", type=_fraction, default=1.0,
                     help="historical inserts require entropy <= gate * ln N (default 1.0)")
    run.add_argument("--per-sample", action="store_true", help="include per-sample rows in the report")
    run.add_argument("--insert-after", action="store_true",
                     help="insert the historical entry after the sample's own prediction")
    run.set_defaults(func=cmd_run)

    sim = sub.add_parser("simulate", help="run a built-in synthetic experiment")
    sim.add_argument("experiment", choices=("prop1", "bounds"))
    sim.add_argument("--out", required=True, help="JSON (prop1) or CSV (bounds) destination")
    sim.add_argument("--classes", type=_positive_int, default=None)
    sim.add_argument("--dims", type=_positive_int, default=None)
    sim.add_argument("--seed", type=int, default=None)
    sim.add_argument("--sigma", type=_nonneg_float, default=0.05,
                     help="cluster noise for prop1 (default 0.05)")
    sim.add_argument("--train-per-class", type=_positive_int, default=100)
    sim.add_argument("--test-points", type=_positive_int, default=1000)
    sim.add_argument("--steps", type=_positive_int, default=500)
    sim.add_argument("--lr", type=_positive_float, default=0.5)
    sim.add_argument("--bank-shift", type=_nonneg_float, default=_DEF_STREAM.base.sigma,
                     help=f"bank drift scale for bounds (default {_DEF_STREAM.base.sigma})")
    sim.add_argument("--eta-noise", type=float, default=_DEF_STREAM.eta_noise)
    sim.add_argument("--r-t", type=_positive_float, default=_DEF_STREAM.r_t)
    sim.add_argument("--r-b", type=_nonneg_float, default=_DEF_STREAM.r_b)
    sim.add_argument("--views", type=_nonneg_int, default=_DEF_STREAM.views)
    sim.add_argument("--grid", type=_grid, default=(50, 200, 800),
                     help="comma-separated stream lengths (default 50,200,800)")
    sim.add_argument("--shots", type=_positive_int, default=3)
    sim.add_argument("--seeds", type=_positive_int, default=20)
    sim.add_argument("--percentile", type=_fraction, default=0.25,
                     help="view filter percentile for bounds (default 0.25)")
    sim.add_argument("--historical-only", action="store_true",
                     help="bounds: skip the boosting mode")
    sim.set_defaults(func=cmd_simulate)

    gen = sub.add_parser("gen", help="generate a synthetic shifted stream as an EMBS file")
    gen.add_argument("--out", required=True, help="EMBS stream destination")
    gen.add_argument("--bank-out", default=None,
                     help="class-bank manifest destination (default: the stream "
                          "path with its extension replaced by .bank.json)")
    gen.add_argument("--classes", type=_positive_int, default=_DEF_STREAM.base.n_classes)
    gen.add_argument("--dims", type=_positive_int, default=_DEF_STREAM.base.c_dim)
    gen.add_argument("--bank-shift", type=_nonneg_float, default=_DEF_STREAM.base.sigma)
    gen.add_argument("--eta-noise", type=float, default=_DEF_STREAM.eta_noise)
    gen.add_argument("--r-t", type=_positive_float, default=_DEF_STREAM.r_t)
    gen.add_argument("--r-b", type=_nonneg_float, default=_DEF_STREAM.r_b)
    gen.add_argument("--views", type=_nonneg_int, default=_DEF_STREAM.views)
    gen.add_argument("--records", type=_positive_int, default=_DEF_STREAM.n)
    gen.add_argument("--seed", type=int, default=_DEF_STREAM.seed)
    gen.set_defaults(func=cmd_gen)

    ins = sub.add_parser("inspect", help="print a stream file's header and sanity summary")
    ins.add_argument("--stream", required=True)
    ins.set_defaults(func=cmd_inspect)
    return parser


def cmd_run(args) -> int:
    bank = read_class_bank(args.bank)
    header, records = read_stream(args.stream)
    if header.c_dim != bank.c_dim:
        raise DimError(f"stream C={header.c_dim} but bank C={bank.c_dim}")
    if header.n_classes != bank.n_classes:
        raise DimError(f"stream N={header.n_classes} but bank N={bank.n_classes}")
    cfg = RunConfig(
        alpha=args.alpha,
        beta=args.beta,
        temperature=args.temp,
        percentile_p=args.percentile,
        capacity_k=args.shots,
        clip_scale=args.clip_scale,
        mode=args.mode,
        cache_mode=args.cache_mode,
        consistency_filter=args.consistency,
        entropy_gate_rho=args.entropy_gate,
        insert_after=args.insert_after,
        per_sample=args.per_sample,
    )
    report = run_stream(records, bank, cfg)
    write_report(args.out, report)
    print(f"top1 {report.top1:.4f}" if report.top1 is not None else "top1 n/a")
    return 0


def cmd_simulate(args) -> int:
    if args.experiment == "prop1":
        spec = ClusterSpec(
            n_classes=args.classes if args.classes is not None else 3,
            c_dim=args.dims if args.dims is not None else 16,
            sigma=args.sigma,
            seed=args.seed if args.seed is not None else 1,
        )
        agreement = prop1_agreement(spec, n_train_per_class=args.train_per_class,
                                    n_test=args.test_points, steps=args.steps, lr=args.lr)
        payload = {
            "experiment": "prop1",
            "agreement": agreement,
            "spec": {
                "classes": spec.n_classes,
                "dims": spec.c_dim,
                "sigma": spec.sigma,
                "seed": spec.seed,
                "train_per_class": args.train_per_class,
                "test_points": args.test_points,
                "steps": args.steps,
                "lr": args.lr,
            },
        }
        Path(args.out).write_text(json.dumps(payload, indent=2) + "\n")
        print(f"agreement {agreement:.4f}")
        return 0

    spec = ShiftStreamSpec(
        base=ClusterSpec(
            n_classes=args.classes if args.classes is not None else _DEF_STREAM.base.n_classes,
            c_dim=args.dims if args.dims is not None else _DEF_STREAM.base.c_dim,
            sigma=args.bank_shift,
            seed=0,
        ),
        eta_noise=args.eta_noise,
        r_t=args.r_t,
        r_b=args.r_b,
        views=args.views,
        n=_DEF_STREAM.n,
        seed=args.seed if args.seed is not None else _DEF_STREAM.seed,
    )
    modes = ("historical-only",) if args.historical_only else ("historical-only", "boostadapter")
    rows = bound_experiment(spec, n_grid=args.grid, k=args.shots, modes=modes,
                            n_seeds=args.seeds, percentile_p=args.percentile)
    with open(args.out, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["n_t", "k", "mode", "seed", "excess_error", "top1"])
        for row in rows:
            writer.writerow([row["n_t"], row["k"], row["mode"], row["seed"],
                             repr(row["excess_error"]), repr(row["top1"])])
    print(f"wrote {len(rows)} rows")
    return 0


def cmd_gen(args) -> int:
    spec = ShiftStreamSpec(
        base=ClusterSpec(n_classes=args.classes, c_dim=args.dims,
                         sigma=args.bank_shift, seed=0),
        eta_noise=args.eta_noise,
        r_t=args.r_t,
        r_b=args.r_b,
        views=args.views,
        n=args.records,
        seed=args.seed,
    )
    stream = make_shift_stream(spec)
    n_bytes = write_stream(args.out, args.dims, args.classes, stream.records)
    bank_out = args.bank_out or str(Path(args.out).with_suffix(".bank.json"))
    write_class_bank(bank_out, stream.bank)
    print(f"wrote {args.records} records ({n_bytes} bytes) to {args.out}; bank to {bank_out}")
    return 0


def cmd_inspect(args) -> int:
    header, records = read_stream(args.stream)
    count = 0
    labeled = 0
    total_views = 0
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        for rec in records:
            count += 1
            if rec.truth is not None:
                labeled += 1
            total_views += rec.views.shape[0]
    print(f"stream: {args.stream}")
    print(f"version: 1  C (dims): {header.c_dim}  N (classes): {header.n_classes}")
    print(f"flags: truths={'yes' if header.has_truths else 'no'}")
    avg_views = total_views / count if count else 0.0
    print(f"{count} records, {labeled} labeled, {avg_views:.1f} views/record")
    print(f"norm violations: {len(caught)}")
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exit_request:
        code = exit_request.code
        return code if isinstance(code, int) else 0
    try:
        return args.func(args)
    except BoostError as err:
        print(f"error: {type(err).__name__}: {err}", file=sys.stderr)
        return DATA_EXIT
    except OSError as err:
        print(f"error: {err}", file=sys.stderr)
        return DATA_EXIT
