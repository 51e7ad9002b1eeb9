"""Timed four-qubit counterexample hunt over a million Haar states.

    python3 scripts/hunt_million.py [--samples 1000000] [--workers 1] [--seed 1]
"""
import argparse
import json
import sys
import time

from monogamy.experiments import hunt_4q


def main() -> int:
    ap = argparse.ArgumentParser()
    ap.add_argument("--samples", type=int, default=1_000_000)
    ap.add_argument("--seed", type=int, default=1)
    ap.add_argument("--shards", type=int, default=16)
    ap.add_argument("--workers", type=int, default=1)
    args = ap.parse_args()
    t0 = time.perf_counter()
    r = hunt_4q(args.samples, args.seed, shards=args.shards, workers=args.workers)
    dt = time.perf_counter() - t0
    s = r.summary
    keep = ("samples", "violations", "min_gap4", "argmin_gap4_sample", "ckw_violations_per_pivot", "ckw_min_gap_per_pivot")
    print(json.dumps({k: s[k] for k in keep} | {"seconds": round(dt, 1), "passed": r.passed}, indent=2))
    return 0 if r.passed else 1


if __name__ == "__main__":
    sys.exit(main())
