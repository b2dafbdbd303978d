#!/usr/bin/env python3
"""Run the four randomized property suites at full scale and print a report.

This is the long-form companion to `tdlek rand-test`: one line per suite
with its counterexample count and metrics, non-zero exit on any failure.

    python scripts/run_suites.py [--seed N] [--scale X]
"""

import argparse
import sys
import time

from tdlek.suites import SUITES

DEFAULT_COUNTS = {
    "frame": 1000,
    "axioms-lek": 1000,
    "property1": 1000,
    "reduction-oracle": 500,
}


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--scale", type=float, default=1.0, help="multiply every suite count")
    args = parser.parse_args()

    failed = False
    for name in ("frame", "axioms-lek", "property1", "reduction-oracle"):
        count = max(1, int(DEFAULT_COUNTS[name] * args.scale))
        started = time.perf_counter()
        report = SUITES[name](count=count, seed=args.seed)
        elapsed = time.perf_counter() - started
        print(f"{report.summary()}  [{elapsed:.1f}s]")
        if report.failures:
            failed = True
            print(f"  first counterexample:\n{report.failures[0]}", file=sys.stderr)
    return 1 if failed else 0


if __name__ == "__main__":
    sys.exit(main())
