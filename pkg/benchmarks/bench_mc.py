"""Compare the numba and numpy Monte Carlo kernels.

Runs the same simulation on both backends, checks that the estimates are
bit-identical and reports wall time per backend. The numba kernel is
compiled (or loaded from cache) in a warm-up call that is not timed.

    python3 benchmarks/bench_mc.py --states 8 --n 200000 --repeat 3
"""
import argparse
import time

import numpy as np

from nrnet.generators import random_chain
from nrnet.mc import SimConfig, simulate_absorption, simulate_commute_cost, simulate_edge_counts


def _cases(chain, n, seed):
    last = chain.n_states - 1
    return {
        "absorption": lambda b: simulate_absorption(chain, 1, [0], [last], SimConfig(n, seed, backend=b)),
        "commute": lambda b: simulate_commute_cost(chain, 0, last, None, SimConfig(n, seed, backend=b)),
        "edges": lambda b: simulate_edge_counts(chain, 0, [last], SimConfig(n, seed, backend=b)).net_mean.tobytes(),
    }


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--states", type=int, default=8)
    parser.add_argument("--n", type=int, default=200_000)
    parser.add_argument("--repeat", type=int, default=3)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args(argv)

    chain = random_chain(args.states, np.random.default_rng(args.seed), edge_prob=0.3)
    print(f"{args.states}-state chain, {args.n} trajectories, best of {args.repeat}")
    print(f"{'case':<12}{'numba [s]':>12}{'numpy [s]':>12}{'speedup':>10}  identical")
    for name, run in _cases(chain, args.n, args.seed).items():
        run("numba")  # compile / load cache
        results, best = {}, {}
        for backend in ("numba", "numpy"):
            times = []
            for _ in range(args.repeat):
                t0 = time.perf_counter()
                results[backend] = run(backend)
                times.append(time.perf_counter() - t0)
            best[backend] = min(times)
        same = results["numba"] == results["numpy"]
        print(f"{name:<12}{best['numba']:>12.4f}{best['numpy']:>12.4f}"
              f"{best['numpy'] / best['numba']:>10.2f}  {same}")


if __name__ == "__main__":
    main()
