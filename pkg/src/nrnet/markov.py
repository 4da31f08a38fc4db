"""Finite Markov chains and their Markovian networks.

A chain with transition matrix ``P`` and stationary law ``mu`` maps to the
network with, on every edge ``{x, y}``::

    D_xy     = sqrt(mu_x P_xy mu_y P_yx)
    gamma_xy = sqrt(mu_x P_xy / (mu_y P_yx))

so the unit oriented ``x -> y`` has gain ``mu_y P_yx / (mu_x P_xy)`` and
conductance ``(mu_x P_xy + mu_y P_yx) / 2``. Under this map the potentials
with ``A`` held at 1 and ``B`` at 0 are the absorption probabilities
``P_x(tau_A < tau_B)``.
"""
from __future__ import annotations

from functools import cached_property
from typing import Iterable, NamedTuple

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

from .errors import (
    AsymmetricEdge,
    EmptySet,
    NotIrreducible,
    NotMarkovian,
    NotStochastic,
    ParallelUnitsPresent,
    SetsOverlap,
)
from .network import (
    MARKOV_RTOL,
    Network,
    Unit,
    markovian_residuals,
    reverse_network,
    cycle_basis,
    solve,
)

ROW_SUM_TOL = 1e-9
REVERSIBLE_TOL = 1e-10


def stationary_distribution(P: np.ndarray) -> np.ndarray:
    """Unique invariant law of an irreducible stochastic matrix.

    Solves ``mu (P - I) = 0`` with one balance equation replaced by
    ``sum(mu) = 1``, followed by one step of iterative refinement.
    """
    P = np.asarray(P, dtype=float)
    n = P.shape[0]
    if n == 1:
        return np.ones(1)
    if connected_components(csr_matrix(P > 0), directed=True, connection="strong")[0] != 1:
        raise NotIrreducible("transition graph is not strongly connected")
    A = P.T - np.eye(n)
    A[-1, :] = 1.0
    b = np.zeros(n)
    b[-1] = 1.0
    mu = np.linalg.solve(A, b)
    mu += np.linalg.solve(A, b - A @ mu)
    mu = np.clip(mu, 0.0, None)
    return mu / mu.sum()


class MarkovChain:
    """Irreducible finite chain with a symmetric transition support.

    Rows must sum to one within ``1e-9``; they are stored as given so that
    serialisation round trips are exact. The stationary distribution is computed on construction.
    """

    def __init__(self, transition):
        P = np.array(transition, dtype=float)
        if P.ndim != 2 or P.shape[0] != P.shape[1] or P.shape[0] == 0:
            raise NotStochastic(f"transition matrix must be square, got {P.shape}")
        if np.any(P < 0) or not np.all(np.isfinite(P)):
            raise NotStochastic("transition probabilities must be finite and >= 0")
        rows = P.sum(axis=1)
        bad = np.abs(rows - 1.0) > ROW_SUM_TOL
        if np.any(bad):
            raise NotStochastic(f"rows {np.flatnonzero(bad).tolist()} do not sum to 1")
        support = P > 0
        asym = np.argwhere(support != support.T)
        if asym.size:
            x, y = asym[0]
            raise AsymmetricEdge(
                f"P[{x},{y}]={P[x, y]:g} but P[{y},{x}]={P[y, x]:g}; "
                "totally asymmetric steps are not supported"
            )
        self.transition = P
        self.transition.setflags(write=False)
        self.stationary = stationary_distribution(P)
        self.stationary.setflags(write=False)

    @property
    def n_states(self) -> int:
        return self.transition.shape[0]

    def __repr__(self):
        return f"MarkovChain(n_states={self.n_states})"

    @cached_property
    def network(self) -> Network:
        return chain_to_network(self)

    def balance_residual(self) -> float:
        mu = self.stationary
        return float(np.abs(mu @ self.transition - mu).max())


def chain_to_network(chain: MarkovChain) -> Network:
    P, mu = chain.transition, chain.stationary
    n = chain.n_states
    units = []
    for x in range(n):
        if P[x, x] > 0:
            units.append(Unit(x, x, 1.0 / (mu[x] * P[x, x]), 1.0))
        for y in range(x + 1, n):
            if P[x, y] > 0:
                fxy = mu[x] * P[x, y]
                fyx = mu[y] * P[y, x]
                units.append(Unit(x, y, 2.0 / (fxy + fyx), fyx / fxy))
    return Network(n, units)


def network_weights(network: Network) -> tuple[np.ndarray, np.ndarray]:
    """Return ``(W, w)`` with ``W[x, y] = sum of D_xy gamma_xy`` and ``w = W.sum(0)``.

    For a Markovian network ``w[x] = sum_z D_xz gamma_zx`` is the unnormalised
    stationary weight and ``W[x] / w[x]`` the transition row.
    """
    n = network.n_vertices
    W = np.zeros((n, n))
    sg = np.sqrt(network.gains)
    d = network.d
    t, h = network.tails, network.heads
    loops = network.loops
    # gamma_{tail,head} = 1/sqrt(gain)
    np.add.at(W, (t[~loops], h[~loops]), d[~loops] / sg[~loops])
    np.add.at(W, (h[~loops], t[~loops]), d[~loops] * sg[~loops])
    np.add.at(W, (t[loops], t[loops]), d[loops])
    return W, W.sum(axis=0)


def network_to_chain(network: Network, tol: float = MARKOV_RTOL) -> MarkovChain:
    if network.has_parallel_units():
        raise ParallelUnitsPresent("reduce parallel units before conversion")
    res = markovian_residuals(network)
    if np.any(np.abs(res) > tol):
        raise NotMarkovian(
            f"network is not Markovian (max relative residual {np.abs(res).max():.3e})",
            residuals=res,
        )
    W, w = network_weights(network)
    return MarkovChain(W / w[:, None])


def reverse_chain(chain: MarkovChain) -> MarkovChain:
    """``P_hat[x, y] = P[y, x] mu_y / mu_x``.

    The pair is linked so that reversing twice hands back the original
    object, which makes the involution exact rather than accurate to rounding.
    """
    twin = chain.__dict__.get("_reversed")
    if twin is not None:
        return twin
    mu = chain.stationary
    rev = MarkovChain(chain.transition.T * mu[None, :] / mu[:, None])
    rev._reversed = chain
    chain._reversed = rev
    return rev


def reverse(obj):
    """Time-reverse a chain or invert every amplifier of a network."""
    if isinstance(obj, MarkovChain):
        return reverse_chain(obj)
    if isinstance(obj, Network):
        return reverse_network(obj)
    raise TypeError(f"cannot reverse {type(obj).__name__}")


def symmetrize(chain: MarkovChain) -> MarkovChain:
    """``(P + P_hat) / 2``: reversible, same stationary law and conductances."""
    return MarkovChain(0.5 * (chain.transition + reverse_chain(chain).transition))


class ReversibilityReport(NamedTuple):
    reversible: bool
    cycle: list[int] | None
    product: float


def is_reversible(obj, tol: float = REVERSIBLE_TOL) -> ReversibilityReport:
    """Kolmogorov cycle test on the fundamental cycles of a BFS tree.

    ``product`` is the product of gains traversed along the reported cycle
    (1.0 when reversible).
    """
    network = obj.network if isinstance(obj, MarkovChain) else obj
    rows, cycles = cycle_basis(network)
    logg = np.log(network.gains)
    for row, cyc in zip(rows, cycles):
        lp = float(row @ logg)
        prod = float(np.exp(lp))
        if abs(prod - 1.0) > tol:
            return ReversibilityReport(False, cyc, prod)
    return ReversibilityReport(True, None, 1.0)


def _as_set(states: Iterable[int], n: int, name: str) -> list[int]:
    out = sorted({int(s) for s in states})
    if not out:
        raise EmptySet(f"set {name} is empty")
    for s in out:
        if not 0 <= s < n:
            raise EmptySet(f"state {s} in {name} is out of range")
    return out


def validate_sets(A, B, n: int) -> tuple[list[int], list[int]]:
    A = _as_set(A, n, "A")
    B = _as_set(B, n, "B")
    common = set(A) & set(B)
    if common:
        raise SetsOverlap(f"A and B share states {sorted(common)}")
    return A, B


def absorption_probabilities(chain: MarkovChain, A, B) -> np.ndarray:
    """``h_x = P_x(tau_A^0 < tau_B^0)`` from the chain's network potentials."""
    A, B = validate_sets(A, B, chain.n_states)
    boundary = {a: 1.0 for a in A}
    boundary.update({b: 0.0 for b in B})
    return solve(chain.network, boundary).potentials
