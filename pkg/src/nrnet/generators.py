"""Random test instances: chains, Markovian networks, generic networks."""
from __future__ import annotations

import numpy as np

from .markov import MarkovChain
from .network import Network, Unit


def random_chain(
    n: int,
    rng: np.random.Generator,
    edge_prob: float = 0.6,
    loop_prob: float = 0.3,
    min_weight: float = 0.05,
) -> MarkovChain:
    """Irreducible chain on a random connected graph with symmetric support.

    A random spanning tree guarantees connectivity; extra edges appear with
    probability ``edge_prob``. Directed weights are drawn independently, so
    the chain is non-reversible whenever the graph has a cycle.
    """
    support = np.zeros((n, n), dtype=bool)
    order = rng.permutation(n)
    for k in range(1, n):
        x, y = order[k], order[rng.integers(k)]
        support[x, y] = support[y, x] = True
    extra = np.triu(rng.random((n, n)) < edge_prob, 1)
    support |= extra | extra.T
    support[np.diag_indices(n)] = rng.random(n) < loop_prob
    W = np.where(support, rng.uniform(min_weight, 1.0, (n, n)), 0.0)
    return MarkovChain(W / W.sum(axis=1, keepdims=True))


def random_network(
    n: int,
    rng: np.random.Generator,
    edge_prob: float = 0.5,
    gain_spread: float = 2.0,
) -> Network:
    """Connected network with log-uniform gains in ``[1/spread, spread]``."""
    units = []
    order = rng.permutation(n)
    for k in range(1, n):
        units.append((order[k], order[rng.integers(k)]))
    for x in range(n):
        for y in range(x + 1, n):
            if rng.random() < edge_prob:
                units.append((x, y))
    log_s = np.log(gain_spread)
    return Network(
        n,
        [
            Unit(int(t), int(h), float(rng.uniform(0.2, 5.0)), float(np.exp(rng.uniform(-log_s, log_s))))
            for t, h in units
        ],
    )


def random_disjoint_sets(n: int, rng: np.random.Generator) -> tuple[list[int], list[int]]:
    perm = rng.permutation(n)
    na = int(rng.integers(1, n))
    nb = int(rng.integers(1, n - na + 1))
    return sorted(perm[:na].tolist()), sorted(perm[na:na + nb].tolist())


def random_costs(chain: MarkovChain, rng: np.random.Generator) -> np.ndarray:
    k = rng.uniform(0.0, 3.0, chain.transition.shape)
    return np.where(chain.transition > 0, k, 0.0)
