"""Compare the compiled and pure-Python Elo chain kernels.

    python3 benchmarks/bench_chain.py [--steps N] [--players M] [--repeat K]
"""

import argparse
import time

import numpy as np

from elotope.chain import ChainConfig, run_chain
from elotope.game import PayoffMatrix, uniform_selection
from elotope._backend import compiled_run_updates


def best_time(config, steps, backend, repeat):
    best = float("inf")
    for _ in range(repeat):
        start = time.perf_counter()
        traj = run_chain(config, steps, record_stride=max(1, steps // 1000), backend=backend)
        best = min(best, time.perf_counter() - start)
    return best, traj


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--steps", type=int, default=200_000)
    parser.add_argument("--players", type=int, default=8)
    parser.add_argument("--repeat", type=int, default=3)
    args = parser.parse_args()

    rng = np.random.default_rng(0)
    m = args.players
    v = rng.normal(size=m)
    probs = 1.0 / (1.0 + np.exp(-(v[:, None] - v[None, :])))
    config = ChainConfig(PayoffMatrix(probs), uniform_selection(m), gain=0.05, seed=1)

    pure_t, pure = best_time(config, args.steps, "pure", args.repeat)
    print(f"pure      {pure_t:8.3f} s  {args.steps / pure_t:12,.0f} steps/s")
    if compiled_run_updates is None:
        print("compiled  unavailable (extension not built)")
        return
    comp_t, comp = best_time(config, args.steps, "compiled", args.repeat)
    print(f"compiled  {comp_t:8.3f} s  {args.steps / comp_t:12,.0f} steps/s")
    print(f"speedup   {pure_t / comp_t:8.1f}x")
    print(f"identical trajectories: {np.array_equal(pure.ratings, comp.ratings)}")


if __name__ == "__main__":
    main()
