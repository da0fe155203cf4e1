#!/usr/bin/env python3
"""Run the 50-pair smoothing benchmark and print per-instance results.

Usage: python scripts/run_smoothing_benchmark.py [--n 50] [--seed 90210] [--blend-len 15]
"""

import argparse
import statistics
import sys
import time
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from motionloom.benchmark import SUITE_SEED, run_suite
from motionloom.smoothing import BlendConfig


def main() -> int:
    parser = argparse.ArgumentParser()
    parser.add_argument("--n", type=int, default=50)
    parser.add_argument("--seed", type=int, default=SUITE_SEED)
    parser.add_argument("--blend-len", type=int, default=15)
    args = parser.parse_args()

    t0 = time.monotonic()
    results = run_suite(n=args.n, seed=args.seed, cfg=BlendConfig(args.blend_len))
    elapsed = time.monotonic() - t0

    print(f"{'jump (m)':>9}  {'naive (m)':>10}  {'smoothed (m)':>13}  {'ratio':>7}")
    for r in results:
        print(f"{r.jump_m:9.3f}  {r.naive_m:10.4f}  {r.smoothed_m:13.4f}  {r.ratio:7.2f}")

    improved = sum(r.smoothed_m < r.naive_m for r in results)
    ratios = [r.ratio for r in results]
    print()
    print(f"instances improved: {improved}/{len(results)}")
    print(f"ratio median {statistics.median(ratios):.2f}  min {min(ratios):.2f}  max {max(ratios):.2f}")
    print(f"elapsed {elapsed:.2f}s")
    return 0 if improved == len(results) else 1


if __name__ == "__main__":
    raise SystemExit(main())
