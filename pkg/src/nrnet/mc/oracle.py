"""Monte Carlo estimators for hitting-time quantities.

These simulate the chain directly and never touch the electrical machinery,
so they serve as an independent oracle for :mod:`nrnet.quantities`.

Stopping-time conventions: ``tau^0_A = inf{t >= 0 : X_t in A}`` (zero when
starting in A) and ``tau_A = inf{t > 0 : X_t in A}``.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .._accel import resolve_backend
from ..errors import SameVertex, SourceInTarget, TruncationExceeded
from ..markov import MarkovChain, validate_sets
from .rng import trajectory_keys, uniforms

MAX_TRUNCATED_FRACTION = 1e-3
CHUNK = 1 << 16


@dataclass(frozen=True)
class SimConfig:
    n_trajectories: int = 100_000
    seed: int = 0
    max_steps: int = 1_000_000
    backend: str | None = None

    def __post_init__(self):
        if self.n_trajectories < 1:
            raise ValueError("n_trajectories must be >= 1")
        if self.max_steps < 1:
            raise ValueError("max_steps must be >= 1")


class Estimate(NamedTuple):
    estimate: float
    stderr: float
    n: int
    n_truncated: int


@dataclass(frozen=True)
class EdgeCountEstimate:
    mean_jumps: np.ndarray   # [x, y]: mean number of x -> y jumps
    net_mean: np.ndarray     # mean of jumps(x -> y) - jumps(y -> x)
    net_stderr: np.ndarray
    n: int
    n_truncated: int


def _kernel(backend):
    if resolve_backend(backend) == "numba":
        from .kernels_numba import walk
    else:
        from .kernels_numpy import walk
    return walk


class _Walker:
    """Precomputed sampling tables for one chain."""

    def __init__(self, chain: MarkovChain, cfg: SimConfig, cost=None):
        P = chain.transition
        n = chain.n_states
        self.n = n
        self.cum = np.cumsum(P, axis=1)
        self.last = np.array([np.flatnonzero(P[x] > 0)[-1] for x in range(n)], dtype=np.int64)
        self.cost = np.zeros((n, n)) if cost is None else np.ascontiguousarray(cost, dtype=float)
        self.cfg = cfg
        self.kernel = _kernel(cfg.backend)

    def run(self, starts, counters, stop_set, strict, keys, count_jumps=False):
        stop = np.zeros(self.n, dtype=np.bool_)
        stop[list(stop_set)] = True
        return self.kernel(
            self.cum,
            self.last,
            np.ascontiguousarray(starts, dtype=np.int64),
            np.ascontiguousarray(counters, dtype=np.int64),
            stop,
            bool(strict),
            self.cost,
            keys,
            int(self.cfg.max_steps),
            bool(count_jumps),
        )

    def chunks(self, chunk=CHUNK):
        n = self.cfg.n_trajectories
        for start in range(0, n, chunk):
            count = min(chunk, n - start)
            yield trajectory_keys(self.cfg.seed, start, count)


def _check_truncation(n_trunc: int, n: int) -> None:
    if n_trunc > MAX_TRUNCATED_FRACTION * n:
        raise TruncationExceeded(
            f"{n_trunc} of {n} trajectories hit max_steps; raise SimConfig.max_steps",
            n_trunc,
        )


def _binomial(successes: int, n_ok: int, n: int, n_trunc: int) -> Estimate:
    p = successes / n_ok
    return Estimate(p, float(np.sqrt(p * (1.0 - p) / n_ok)), n, n_trunc)


def simulate_absorption(chain: MarkovChain, x: int, A, B, cfg: SimConfig = SimConfig()) -> Estimate:
    """Estimate ``P_x(tau^0_A < tau^0_B)``."""
    A, B = validate_sets(A, B, chain.n_states)
    walker = _Walker(chain, cfg)
    in_a = np.zeros(chain.n_states, dtype=bool)
    in_a[A] = True
    hits = trunc = 0
    for keys in walker.chunks():
        m = keys.size
        end, *_ = walker.run(np.full(m, x), np.zeros(m), A + B, False, keys)
        ok = end >= 0
        trunc += int((~ok).sum())
        hits += int(in_a[end[ok]].sum())
    n = cfg.n_trajectories
    _check_truncation(trunc, n)
    return _binomial(hits, n - trunc, n, trunc)


def _escape_starts(chain, A, keys):
    w = chain.stationary[A]
    cw = np.cumsum(w / w.sum())
    u = uniforms(keys, np.zeros(keys.size, dtype=np.int64))
    pick = np.minimum((cw[None, :] <= u[:, None]).sum(axis=1), len(A) - 1)
    return np.asarray(A)[pick]


def simulate_escape(chain: MarkovChain, A, B, cfg: SimConfig = SimConfig()) -> Estimate:
    """Estimate ``P(tau_B < tau_A)`` started from ``mu`` conditioned on A.

    Draw 0 of each stream picks the starting state; the walk uses draws 1, 2, ...
    """
    A, B = validate_sets(A, B, chain.n_states)
    walker = _Walker(chain, cfg)
    in_b = np.zeros(chain.n_states, dtype=bool)
    in_b[B] = True
    hits = trunc = 0
    for keys in walker.chunks():
        starts = _escape_starts(chain, A, keys)
        end, *_ = walker.run(starts, np.ones(keys.size), A + B, True, keys)
        ok = end >= 0
        trunc += int((~ok).sum())
        hits += int(in_b[end[ok]].sum())
    n = cfg.n_trajectories
    _check_truncation(trunc, n)
    return _binomial(hits, n - trunc, n, trunc)


def commute_costs(chain: MarkovChain, a: int, b: int, k, cfg: SimConfig, start: int = 0, count=None):
    """Per-trajectory round-trip costs (NaN where truncated)."""
    walker = _Walker(chain, cfg, cost=k)
    count = cfg.n_trajectories if count is None else count
    keys = trajectory_keys(cfg.seed, start, count)
    m = keys.size
    end1, _, c1, ctr, _ = walker.run(np.full(m, a), np.zeros(m), [b], False, keys)
    end2, _, c2, _, _ = walker.run(np.full(m, b), ctr, [a], False, keys)
    out = c1 + c2
    out[(end1 < 0) | (end2 < 0)] = np.nan
    return out


def simulate_commute_cost(chain: MarkovChain, a: int, b: int, k=None, cfg: SimConfig = SimConfig()) -> Estimate:
    """Estimate the expected cost of the round trip a -> b -> a.

    ``k`` is an ``n x n`` array of directed jump costs; ``None`` counts jumps.
    The return leg continues the same random stream.
    """
    if a == b:
        raise SameVertex("commute cost needs two distinct states")
    n_states = chain.n_states
    k = np.ones((n_states, n_states)) if k is None else np.asarray(k, dtype=float)
    n = cfg.n_trajectories
    parts = []
    for start in range(0, n, CHUNK):
        costs = commute_costs(chain, a, b, k, cfg, start, min(CHUNK, n - start))
        parts.append(costs)
    costs = np.concatenate(parts)
    ok = ~np.isnan(costs)
    trunc = int((~ok).sum())
    _check_truncation(trunc, n)
    good = costs[ok]
    total = float(good.mean())
    se = float(good.std(ddof=1) / np.sqrt(good.size)) if good.size > 1 else 0.0
    return Estimate(total, se, n, trunc)


def simulate_edge_counts(chain: MarkovChain, a: int, B, cfg: SimConfig = SimConfig(),
                         per_trajectory: bool = False):
    """Jump tallies of the chain started at ``a`` until it enters B.

    With ``per_trajectory=True`` also returns the ``(n_traj, n, n)`` count
    array (use small ``n_trajectories``).
    """
    B_list = sorted({int(v) for v in B})
    if int(a) in B_list:
        raise SourceInTarget(f"source {a} lies in the target set")
    _, B_list = validate_sets([a], B_list, chain.n_states)
    walker = _Walker(chain, cfg)
    n_states = chain.n_states
    chunk = max(1, min(CHUNK, 4_000_000 // (n_states * n_states)))
    s1 = np.zeros((n_states, n_states))
    net1 = np.zeros((n_states, n_states))
    net2 = np.zeros((n_states, n_states))
    trunc = 0
    kept = []
    for keys in walker.chunks(chunk):
        m = keys.size
        end, _, _, _, counts = walker.run(np.full(m, a), np.zeros(m), B_list, False, keys, True)
        ok = end >= 0
        trunc += int((~ok).sum())
        c = counts[ok].astype(float)
        net = c - c.transpose(0, 2, 1)
        s1 += c.sum(axis=0)
        net1 += net.sum(axis=0)
        net2 += (net * net).sum(axis=0)
        if per_trajectory:
            kept.append(counts)
    n = cfg.n_trajectories
    _check_truncation(trunc, n)
    n_ok = n - trunc
    mean = net1 / n_ok
    var = np.clip(net2 - n_ok * mean * mean, 0.0, None) / max(n_ok - 1, 1)
    result = EdgeCountEstimate(s1 / n_ok, mean, np.sqrt(var / n_ok), n, trunc)
    if per_trajectory:
        return result, np.concatenate(kept)
    return result


def z_score(estimate: float, stderr: float, exact: float) -> float:
    """Standardised deviation; zero-variance estimates must match exactly."""
    diff = estimate - exact
    if stderr == 0.0:
        return 0.0 if abs(diff) <= 1e-12 * max(1.0, abs(exact)) else float("inf")
    return diff / stderr
