#!/usr/bin/env python3
"""Benchmark the compiled kernels against the pure-Python fallback.

Times the full hull-extraction + greedy-solve pipeline on a synthetic
population under each backend and reports the speedup.  Run:

    python benchmarks/bench_core.py --n 200000 --budget 1500 --seed 0
"""

import argparse
import time

import incentives._core as core
from incentives import GeneratorConfig, concavize_all, solve, synthesize_population
from incentives._core import pure


def run_pipeline(instance, budget):
    t0 = time.perf_counter()
    profiles = concavize_all(instance)
    t1 = time.perf_counter()
    result = solve(profiles, budget)
    t2 = time.perf_counter()
    return t1 - t0, t2 - t1, result


def scaling_table(budget, seed, repeat):
    """Empirical runtime versus total hull-step count; near O(C log C)
    shows as a roughly flat last column."""
    import math

    print(f"{'N':>8} {'steps C':>9} {'best s':>8} {'s per C*logC':>13}")
    for n in (25_000, 50_000, 100_000, 200_000):
        instance = synthesize_population(GeneratorConfig(n_individuals=n), seed)
        best = float("inf")
        for _ in range(repeat):
            t_hull, t_solve, result = run_pipeline(instance, budget * n / 200_000)
            best = min(best, t_hull + t_solve)
        c = len(result.queue)
        print(f"{n:>8} {c:>9} {best:>8.3f} {best / (c * math.log(c)):>13.3e}")


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--n", type=int, default=200_000)
    parser.add_argument("--budget", type=float, default=1500.0)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--repeat", type=int, default=3)
    parser.add_argument("--scaling", action="store_true",
                        help="print runtime against hull-step count")
    args = parser.parse_args()

    if args.scaling:
        scaling_table(args.budget, args.seed, args.repeat)
        return

    print(f"generating {args.n} individuals (seed {args.seed}) ...")
    t0 = time.perf_counter()
    instance = synthesize_population(GeneratorConfig(n_individuals=args.n),
                                     args.seed)
    print(f"  generate: {time.perf_counter() - t0:.2f} s, "
          f"{instance.n_alternatives} alternatives")

    backends = []
    if core._compiled is not None:
        backends.append(("compiled", core._compiled))
    backends.append(("pure", pure))

    timings = {}
    reference = None
    saved = core._impl
    try:
        for name, impl in backends:
            core._impl = impl
            best = (float("inf"), float("inf"))
            for _ in range(args.repeat):
                t_hull, t_solve, result = run_pipeline(instance, args.budget)
                best = min(best, (t_hull + t_solve, t_hull))
                if reference is None:
                    reference = result
                else:
                    assert result.welfare == reference.welfare
                    assert result.budget_used == reference.budget_used
            total, t_hull = best
            timings[name] = best
            print(f"  {name:>8}: hull {t_hull:.3f} s, "
                  f"solve {total - t_hull:.3f} s, total {total:.3f} s")
    finally:
        core._impl = saved

    if len(timings) == 2:
        speedup = timings["pure"][0] / timings["compiled"][0]
        print(f"speedup (pure/compiled): {speedup:.1f}x "
              f"(identical results on both)")
    print(f"welfare {reference.welfare:.1f} kg, "
          f"budget used {reference.budget_used:.2f} of {args.budget}")


if __name__ == "__main__":
    main()
