"""Command-line entry point: ``monogamy <subcommand> [flags]``.

Exit codes: 0 all checks passed, 1 a monogamy check failed, 2 bad input or usage.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from datetime import datetime, timezone

import numpy as np

from . import experiments as ex
from .linalg import ValidationError
from .roof import RoofConfig
from .statefile import read_state

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2
CSV_HEADER = ("experiment", "sample_index", "quantity", "value", "seed")


def _u64(text: str) -> int:
    v = int(text)
    if not 0 <= v < 2**64:
        raise argparse.ArgumentTypeError("seed must be a 64-bit unsigned integer")
    return v


def _positive(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return v


def _common(p: argparse.ArgumentParser, samples: int | None, tol: float | None, seed=True, inp=True):
    if samples is not None:
        p.add_argument("--samples", type=_positive, default=samples, help=f"number of samples (default {samples})")
    if seed:
        p.add_argument("--seed", type=_u64, default=0, help="64-bit stream seed (default 0)")
    if tol is not None:
        p.add_argument("--tol", type=float, default=tol, help=f"pass/fail tolerance (default {tol:g})")
    p.add_argument("--format", choices=("csv", "json-like"), default="json-like")
    p.add_argument("--out", help="write the report here instead of stdout")
    if inp:
        p.add_argument("--input", help="state file to check instead of sampling")


def _roof_flags(p: argparse.ArgumentParser):
    d = RoofConfig()
    g = p.add_argument_group("convex-roof optimizer")
    g.add_argument("--ensemble-size", type=_positive, default=None, help="default min(rank^2, rank+2)")
    g.add_argument("--restarts", type=_positive, default=d.restarts)
    g.add_argument("--max-iterations", type=_positive, default=d.max_iterations)
    g.add_argument("--step-init", type=float, default=d.step_init)
    g.add_argument("--step-decay", type=float, default=d.step_decay)
    g.add_argument("--roof-tol", type=float, default=d.tolerance)


def _roof_config(args, seed: int) -> RoofConfig:
    return RoofConfig(
        ensemble_size=args.ensemble_size,
        restarts=args.restarts,
        max_iterations=args.max_iterations,
        step_init=args.step_init,
        step_decay=args.step_decay,
        tolerance=args.roof_tol,
        seed=seed,
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="monogamy", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("canonical", help="GHZ, W, Bell(x)Bell and product-state reference values")
    _common(p, None, ex.CANONICAL_TOL, seed=False, inp=False)

    p = sub.add_parser("verify-mmc", help="pure three-qubit multipartite monogamy equality")
    _common(p, 10_000, 1e-10)

    p = sub.add_parser("verify-ckw", help="pivot independence of the residual tangle")
    _common(p, 10_000, 1e-9)

    p = sub.add_parser("hunt4", help="search Haar four-qubit states for violations")
    _common(p, 100_000, ex.VIOLATION_TOL)
    p.add_argument("--shards", type=_positive, default=1)
    p.add_argument("--workers", type=_positive, default=1, help="worker processes for shards")

    p = sub.add_parser("mixed-bound", help="roof upper estimate vs pairwise bound on mixed three-qubit states")
    _common(p, 100, ex.MIXED_BOUND_TOL)
    p.add_argument("--rank", type=_positive, default=2)
    _roof_flags(p)

    p = sub.add_parser("roof", help="convex roof of a state file")
    _common(p, None, None, seed=True, inp=False)
    p.add_argument("--input", required=True, help="state file")
    p.add_argument("--measure", choices=sorted(ex.MEASURES), default="gen-concurrence2")
    p.add_argument("--show-ensemble", action="store_true")
    _roof_flags(p)
    return parser


def render(report: ex.Report, fmt: str, timestamp: str) -> str:
    buf = io.StringIO()
    buf.write(f"# generated: {timestamp}\n")
    if fmt == "csv":
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(CSV_HEADER)
        for r in report.records():
            w.writerow((r.experiment, r.sample_index, r.quantity, repr(float(r.value)), r.seed))
    else:
        buf.write(json.dumps(report.summary, indent=2, default=_json_default))
        buf.write("\n")
    return buf.getvalue()


def _json_default(o):
    if isinstance(o, np.generic):
        return o.item()
    if isinstance(o, np.ndarray):
        return o.tolist()
    raise TypeError(type(o).__name__)


def _load_inputs(path: str | None, n_qubits: int, want: str):
    if path is None:
        return None
    sf = read_state(path)
    if sf.n_qubits != n_qubits:
        raise ValidationError(f"{path}: expected a {n_qubits}-qubit state, got {sf.n_qubits}")
    if want == "pure":
        if not sf.is_pure:
            raise ValidationError(f"{path}: this check needs a pure state")
        return [sf.data]
    return [sf.density_matrix()]


def run(args) -> ex.Report:
    c = args.command
    if c == "canonical":
        return ex.canonical_report(args.tol)
    if c == "verify-mmc":
        return ex.verify_mmc(args.samples, args.seed, args.tol, _load_inputs(args.input, 3, "pure"))
    if c == "verify-ckw":
        return ex.verify_ckw(args.samples, args.seed, args.tol, _load_inputs(args.input, 3, "pure"))
    if c == "hunt4":
        return ex.hunt_4q(
            args.samples,
            args.seed,
            args.shards,
            args.tol,
            workers=args.workers,
            inputs=_load_inputs(args.input, 4, "pure"),
            keep_records=args.format == "csv",
        )
    if c == "mixed-bound":
        return ex.mixed_bound(
            args.samples, args.rank, args.seed, _roof_config(args, 0), args.tol, _load_inputs(args.input, 3, "mixed")
        )
    if c == "roof":
        sf = read_state(args.input)
        return ex.roof_report(sf.density_matrix(), args.measure, _roof_config(args, args.seed), args.show_ensemble)
    raise AssertionError(c)


def _one_line(report: ex.Report) -> str:
    s = report.summary
    keys = [k for k in s if isinstance(s[k], (int, float, str, bool)) and k not in ("experiment",)]
    body = " ".join(f"{k}={s[k]}" for k in keys)
    return f"{report.experiment}: {'PASS' if report.passed else 'FAIL'} {body}"


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        report = run(args)
    except (ValidationError, ValueError, IndexError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    text = render(report, args.format, datetime.now(timezone.utc).isoformat(timespec="seconds"))
    # violation records go out before the exit code is decided
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    print(_one_line(report), file=sys.stderr)
    return EXIT_OK if report.passed else EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
