#!/usr/bin/env python3
"""Time the partition function and its gradient across dimensions.

Prints one CSV row per dimension (best-of-N wall time) plus the growth
ratio between consecutive rows, which should track n^2 log n: going
512 -> 2048 the theoretical factor is about 17.8, far below the cubic 64.
"""

from __future__ import annotations

import argparse
import sys
import time

import numpy as np

from simplexmetric import PartitionEngine


def odd_int_list(text: str) -> list[int]:
    values = [int(piece) for piece in text.split(",") if piece.strip()]
    for value in values:
        if value < 1 or value % 2 == 0:
            raise argparse.ArgumentTypeError(f"dimensions must be odd and positive, got {value}")
    return values


def best_of(fn, trials: int) -> float:
    best = float("inf")
    for _ in range(trials):
        start = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - start)
    return best


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--n", type=odd_int_list, default=[127, 511, 2047])
    parser.add_argument("--trials", type=int, default=3)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()

    print("n,partition_ms,gradient_ms,partition_ratio")
    previous = None
    for n in args.n:
        m = n + 1
        rng = np.random.default_rng(args.seed)
        weights = rng.dirichlet(np.ones(m))
        engine = PartitionEngine(m)
        engine.log_partition(weights)  # warm: tilt bracket, fft plans
        engine.gradient(weights)
        partition_s = best_of(lambda: engine.log_partition(weights), args.trials)
        gradient_s = best_of(lambda: engine.gradient(weights), args.trials)
        ratio = "" if previous is None else f"{partition_s / previous:.2f}"
        print(f"{n},{partition_s * 1e3:.3f},{gradient_s * 1e3:.3f},{ratio}")
        previous = partition_s
    return 0


if __name__ == "__main__":
    sys.exit(main())
