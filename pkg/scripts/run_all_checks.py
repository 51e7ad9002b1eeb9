"""Run every experiment through the CLI and write reports to a results directory.

    python3 scripts/run_all_checks.py [--out results] [--seed 20121107] [--hunt-samples 100000]

Exits non-zero if any experiment fails.
"""
import argparse
import sys
from pathlib import Path

from monogamy import cli


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", type=Path, default=Path("results"))
    ap.add_argument("--seed", type=int, default=20121107)
    ap.add_argument("--hunt-samples", type=int, default=100_000)
    ap.add_argument("--mixed-samples", type=int, default=100)
    args = ap.parse_args()
    args.out.mkdir(parents=True, exist_ok=True)
    seed = ["--seed", str(args.seed)]
    jobs = {
        "canonical": ["canonical"],
        "verify_mmc": ["verify-mmc", "--samples", "10000", *seed],
        "verify_ckw": ["verify-ckw", "--samples", "10000", *seed],
        "hunt4": ["hunt4", "--samples", str(args.hunt_samples), "--shards", "8", *seed],
        "mixed_bound": ["mixed-bound", "--samples", str(args.mixed_samples), "--rank", "2", *seed],
    }
    failed = []
    for name, argv in jobs.items():
        code = cli.main(argv + ["--out", str(args.out / f"{name}.json")])
        if code != 0:
            failed.append(name)
    print(f"{len(jobs) - len(failed)}/{len(jobs)} experiments passed" + (f"; failed: {failed}" if failed else ""))
    return 1 if failed else 0


if __name__ == "__main__":
    sys.exit(main())
