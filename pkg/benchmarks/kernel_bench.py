#!/usr/bin/env python3
"""Benchmark the compiled event-loop kernel against the pure-Python fallback.

Runs the same seeded workload through both kernels, checks the results are
bit-identical, and reports events/second and the speedup.

Usage: python benchmarks/kernel_bench.py [--events N] [--items N]
"""

import argparse
import time

import numpy as np

from renewalcache import Erlang, OptimalCausal, Pareto, SimConfig
from renewalcache.engine import HAVE_COMPILED, get_kernel
from renewalcache.sim import run


def bench(config, kernel):
    start = time.perf_counter()
    report = run(config, kernel=kernel)
    elapsed = time.perf_counter() - start
    return report, elapsed


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--events", type=int, default=100_000)
    parser.add_argument("--items", type=int, default=1000)
    args = parser.parse_args()

    if not HAVE_COMPILED:
        print("compiled kernel not available; nothing to compare")
        return

    capacity = args.items // 10
    for model in (Pareto(2.0), Erlang(4)):
        config = SimConfig(
            model=model, beta=0.5, n_items=args.items, c=0.1,
            policy=OptimalCausal(capacity), horizon_events=args.events,
            warmup_events=args.events // 10, master_seed=123,
        )
        r_c, t_c = bench(config, get_kernel(True))
        r_p, t_p = bench(config, get_kernel(False))
        assert np.array_equal(r_c.misses, r_p.misses), "kernels disagree"
        name = type(model).__name__
        print(f"{name:12s} optimal policy, N={args.items}, {args.events} events")
        print(f"  compiled : {t_c:8.2f} s  ({args.events / t_c:10.0f} events/s)")
        print(f"  python   : {t_p:8.2f} s  ({args.events / t_p:10.0f} events/s)")
        print(f"  speedup  : {t_p / t_c:8.1f}x  (identical results: yes)")


if __name__ == "__main__":
    main()
