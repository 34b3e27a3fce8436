#!/usr/bin/env python3
"""Run every built-in scenario across a sweep of primes and report timings."""

import argparse
import sys
import time

from thhlab.scenarios import emit_report, list_scenarios, run_scenario


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--primes", type=int, nargs="+", default=[3, 5])
    parser.add_argument("--cap", type=int, default=None,
                        help="degree cap (default 2p^2 + 4p per prime)")
    parser.add_argument("--format", choices=("text", "json"), default="text")
    args = parser.parse_args(argv)

    failed = 0
    for p in args.primes:
        cap = args.cap if args.cap is not None else 2 * p * p + 4 * p
        for name, _ in list_scenarios():
            t0 = time.perf_counter()
            report = run_scenario(name, p, cap)
            elapsed = time.perf_counter() - t0
            sys.stdout.buffer.write(emit_report(report, args.format))
            if args.format == "text":
                print(f"  elapsed {elapsed:.2f}s\n")
            if not report.ok:
                failed += 1
    return 1 if failed else 0


if __name__ == "__main__":
    raise SystemExit(main())
