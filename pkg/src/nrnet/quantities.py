"""Probabilistic quantities read off Markovian networks.

Effective resistance, capacity (probabilistic, electrical and ohmic-loss
forms), escape probabilities, expected net edge flows, hitting and commute
costs, and the variational (Dirichlet / Thomson) characterisations of the
capacity. Routines that have two independent computation routes evaluate
both and raise :class:`~nrnet.errors.ConsistencyError` if they disagree.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import ConsistencyError, NotMarkovian, SameVertex, SourceInTarget
from .markov import MarkovChain, absorption_probabilities, validate_sets
from .network import (
    MARKOV_RTOL,
    Network,
    cycle_basis,
    divergence,
    edge_currents,
    markovian_residuals,
    ohmic_currents,
    reverse_network,
    solve,
)

AGREE_TOL = 1e-10
COMMUTE_RTOL = 1e-9
VARIATIONAL_TOL = 1e-9


def _require_markovian(network: Network, tol: float = MARKOV_RTOL) -> None:
    res = markovian_residuals(network)
    if np.any(np.abs(res) > tol):
        raise NotMarkovian(
            f"network is not Markovian (max relative residual {np.abs(res).max():.3e})",
            residuals=res,
        )


def _network_of(obj) -> Network:
    return obj.network if isinstance(obj, MarkovChain) else obj


def _agree(a: float, b: float, tol: float, what: str) -> None:
    if abs(a - b) > tol * max(1.0, abs(a), abs(b)):
        raise ConsistencyError(f"{what}: {a!r} vs {b!r}")


def two_set_solution(network: Network, A, B, u_a: float = 1.0, u_b: float = 0.0):
    A, B = validate_sets(A, B, network.n_vertices)
    boundary = {a: u_a for a in A}
    boundary.update({b: u_b for b in B})
    return solve(network, boundary)


def effective_resistance(network, A, B) -> float:
    """Resistance of the single resistor equivalent between vertex sets A and B."""
    network = _network_of(network)
    _require_markovian(network)
    sol = two_set_solution(network, A, B)
    return 1.0 / sol.set_current(A)


class Capacity(NamedTuple):
    probabilistic: float
    electrical: float


def capacity(chain: MarkovChain, A, B) -> Capacity:
    """``cap(A, B) = sum_{x in A} mu_x P_x(tau_B < tau_A)`` two ways.

    The probabilistic route is a first-step sum over absorption
    probabilities; the electrical route is ``1 / R_eff``.
    """
    A, B = validate_sets(A, B, chain.n_states)
    h = absorption_probabilities(chain, A, B)
    P, mu = chain.transition, chain.stationary
    prob = float(sum(mu[x] * (P[x] @ (1.0 - h)) for x in A))
    elec = 1.0 / effective_resistance(chain.network, A, B)
    _agree(prob, elec, AGREE_TOL, "capacity routes disagree")
    return Capacity(prob, elec)


def capacity_symmetrized_form(chain_or_network, A, B) -> float:
    """Ohmic loss ``sum C_xy (u_x - u_y)^2`` of the true potentials on bare resistors.

    Equals the capacity, but is not a physical power: with the amplifiers
    present the losses differ, and without them the potentials would change.
    """
    network = _network_of(chain_or_network)
    _require_markovian(network)
    u = two_set_solution(network, A, B).potentials
    return float(np.sum(network.conductances * (u[network.tails] - u[network.heads]) ** 2))


def energy(network, f) -> tuple[float, np.ndarray]:
    """Power needed to hold potentials ``f`` and the currents pumped at each vertex."""
    network = _network_of(network)
    _require_markovian(network)
    f = np.asarray(f, dtype=float)
    pumped = network.current_operator @ f
    return float(f @ pumped), pumped


class Escape(NamedTuple):
    probability: float
    via_conductances: float


def escape_probability(chain: MarkovChain, A, B) -> Escape:
    """Chance of reaching B before returning to A, started from ``mu`` on A."""
    A, B = validate_sets(A, B, chain.n_states)
    cap = capacity(chain, A, B)
    p1 = cap.probabilistic / float(chain.stationary[A].sum())
    network = chain.network
    in_a = np.zeros(network.n_vertices, dtype=bool)
    in_a[A] = True
    c = network.conductances
    # sum_{z in A} sum_{y ~ z} C_zy, loops counted once
    total = c[in_a[network.tails]].sum() + c[in_a[network.heads] & ~network.loops].sum()
    p2 = cap.electrical / total
    _agree(p1, p2, AGREE_TOL, "escape probability routes disagree")
    return Escape(p1, p2)


@dataclass(frozen=True)
class FlowProfile:
    """Expected visits and net jump counts before absorption in B.

    ``net_flows[x, y]`` is the expected number of jumps x -> y minus jumps
    y -> x; ``unit_flows`` holds the same numbers per unit of the chain's
    network (tail -> head).
    """
    visits: np.ndarray
    net_flows: np.ndarray
    unit_flows: np.ndarray
    source_potential: float


def edge_flows(chain: MarkovChain, a: int, B) -> FlowProfile:
    """Expected net edge flows of the chain started at ``a`` and stopped on B.

    Computed on the reversed network: ``v_x / mu_x`` is harmonic for the
    reversed chain, so with B grounded and ``a`` pumped with unit current the
    reversed-network potentials give the visit counts and its unit currents
    give the net flows.
    """
    a = int(a)
    if a in {int(b) for b in B}:
        raise SourceInTarget(f"source {a} lies in the target set")
    _, B = validate_sets([a], B, chain.n_states)
    network = chain.network
    rev = reverse_network(network)
    # the response at a is affine in u_a and vanishes at u_a = 0
    boundary = {b: 0.0 for b in B}
    boundary[a] = 1.0
    sol = solve(rev, boundary)
    u_hat = sol.potentials / sol.external_current(a)
    mu = chain.stationary
    visits = mu * u_hat
    visits[B] = 0.0
    flux = visits[:, None] * chain.transition
    net = flux - flux.T
    unit_flows = edge_currents(network, u_hat, reversed_amplifiers=True)
    return FlowProfile(visits, net, unit_flows, float(u_hat[a]))


def hitting_cost(chain: MarkovChain, b: int, k=None) -> np.ndarray:
    """Expected accumulated cost ``H_xb`` until the first visit to ``b``.

    ``k`` is an ``n x n`` array of directed edge costs (``None`` means 1 on
    every edge, i.e. expected hitting times).
    """
    P = chain.transition
    n = chain.n_states
    k = np.ones((n, n)) if k is None else np.asarray(k, dtype=float)
    others = np.array([x for x in range(n) if x != b], dtype=np.intp)
    H = np.zeros(n)
    if others.size:
        rhs = (P * k).sum(axis=1)[others]
        A = np.eye(others.size) - P[np.ix_(others, others)]
        H[others] = np.linalg.solve(A, rhs)
    return H


def cost_weight(network: Network, k) -> float:
    """``sum over ordered neighbour pairs of D_xy gamma_xy k_xy``."""
    k = np.asarray(k, dtype=float)
    t, h = network.tails, network.heads
    sg = np.sqrt(network.gains)
    d = network.d
    loops = network.loops
    total = np.sum((d / sg * k[t, h])[~loops]) + np.sum((d * sg * k[h, t])[~loops])
    total += np.sum((d * k[t, t])[loops])
    return float(total)


class Commute(NamedTuple):
    cost: float
    via_resistance: float


def commute_cost(chain: MarkovChain, a: int, b: int, k=None) -> Commute:
    """Expected cost of the round trip a -> b -> a, two ways.

    ``cost`` sums the two hitting costs; ``via_resistance`` is
    ``R_eff(a, b) * sum D_xy gamma_xy k_xy``.
    """
    if a == b:
        raise SameVertex("commute cost needs two distinct states")
    n = chain.n_states
    k = np.ones((n, n)) if k is None else np.asarray(k, dtype=float)
    direct = float(hitting_cost(chain, b, k)[a] + hitting_cost(chain, a, k)[b])
    network = chain.network
    via = effective_resistance(network, [a], [b]) * cost_weight(network, k)
    _agree(direct, via, COMMUTE_RTOL, "commute cost routes disagree")
    return Commute(direct, via)


# -- variational principles -------------------------------------------------

def dissipation(network: Network, currents) -> float:
    """Ohmic losses ``sum R i^2`` of unit currents on the bare resistors."""
    i = np.asarray(currents, dtype=float)
    return float(np.sum(network.resistances * i * i))


@dataclass(frozen=True)
class VariationalReport:
    capacity: float
    value: float                # capacity estimate at the constructed optimiser
    potential: np.ndarray       # optimal potential u*
    flow: np.ndarray            # optimal unit currents i*
    boundary_residual: float    # violation of the potential's boundary values
    divergence_residual: float  # violation of the flow constraints
    best_sampled: float         # best capacity estimate among random feasible points
    n_samples: int

    @property
    def attained(self) -> bool:
        return abs(self.value - self.capacity) <= VARIATIONAL_TOL * max(1.0, self.capacity)


def _perturbations(network: Network, fixed, rng, n, scale_u, scale_i):
    free = np.setdiff1d(np.arange(network.n_vertices), np.asarray(fixed))
    cycles, _ = cycle_basis(network)
    for _ in range(n):
        du = np.zeros(network.n_vertices)
        du[free] = rng.normal(scale=scale_u, size=free.size)
        di = np.zeros(len(network.units))
        if cycles.shape[0]:
            di = rng.normal(scale=scale_i, size=cycles.shape[0]) @ cycles
        yield du, di


def _flow_scale(i):
    return 0.1 * max(float(np.abs(i).max()), 1e-3)


def dirichlet_check(network, A, B, n_samples: int = 50, seed: int = 0) -> VariationalReport:
    """Minimise ``D(i_hat^u - i)`` over potentials with u|A = 1, u|B = 0 and
    divergence-free flows with zero net inflow to A.

    The optimiser is ``u* = (u + u_hat) / 2`` and ``i* = i_hat^{u*} - i^s``
    with ``u``, ``u_hat`` the physical potentials of the network and of the
    reversed network and ``i^s`` the bare-resistor currents of ``u``.
    """
    network = _network_of(network)
    _require_markovian(network)
    A, B = validate_sets(A, B, network.n_vertices)
    rev = reverse_network(network)
    u = two_set_solution(network, A, B).potentials
    u_hat = two_set_solution(rev, A, B).potentials
    cap = 1.0 / effective_resistance(network, A, B)

    u_star = 0.5 * (u + u_hat)
    i_s = ohmic_currents(network, u)
    i_star = edge_currents(network, u_star, reversed_amplifiers=True) - i_s

    def objective(pot, flow):
        return dissipation(network, edge_currents(network, pot, reversed_amplifiers=True) - flow)

    bres = max(np.abs(u_star[A] - 1.0).max(), np.abs(u_star[B]).max())
    div = divergence(network, i_star)
    mask = np.ones(network.n_vertices, dtype=bool)
    mask[A] = mask[B] = False
    dres = max(np.abs(div[mask]).max(initial=0.0), abs(div[A].sum()))

    rng = np.random.default_rng(seed)
    best = np.inf
    for du, di in _perturbations(network, A + B, rng, n_samples, 0.1, _flow_scale(i_star)):
        best = min(best, objective(u_star + du, i_star + di))
    return VariationalReport(
        capacity=cap,
        value=objective(u_star, i_star),
        potential=u_star,
        flow=i_star,
        boundary_residual=float(bres),
        divergence_residual=float(dres),
        best_sampled=float(best),
        n_samples=n_samples,
    )


def thomson_check(network, A, B, n_samples: int = 50, seed: int = 0) -> VariationalReport:
    """Maximise ``1 / D(i - i_hat^u)`` over unit flows from A to B and
    potentials vanishing on A and B.

    The optimiser is ``u* = (u_hat - u) / (2 cap)`` and
    ``i* = i^s / cap + i_hat^{u*}``: the bare-resistor current of the physical
    potentials scaled by the capacity, corrected by the reversed-network
    current of ``u*`` so that it is divergence-free off A and B.
    """
    network = _network_of(network)
    _require_markovian(network)
    A, B = validate_sets(A, B, network.n_vertices)
    rev = reverse_network(network)
    u = two_set_solution(network, A, B).potentials
    u_hat = two_set_solution(rev, A, B).potentials
    cap = 1.0 / effective_resistance(network, A, B)

    u_star = (u_hat - u) / (2.0 * cap)
    i_s0 = ohmic_currents(network, u) / cap
    i_star = i_s0 + edge_currents(network, u_star, reversed_amplifiers=True)

    def objective(pot, flow):
        return 1.0 / dissipation(
            network, flow - edge_currents(network, pot, reversed_amplifiers=True)
        )

    bres = max(np.abs(u_star[A]).max(), np.abs(u_star[B]).max())
    div = divergence(network, i_star)
    mask = np.ones(network.n_vertices, dtype=bool)
    mask[A] = mask[B] = False
    dres = max(
        np.abs(div[mask]).max(initial=0.0),
        abs(div[A].sum() - 1.0),
        abs(div[B].sum() + 1.0),
    )

    rng = np.random.default_rng(seed)
    best = -np.inf
    scale_u = 0.1 * max(float(np.abs(u_star).max()), 1e-3)
    for du, di in _perturbations(network, A + B, rng, n_samples, scale_u, _flow_scale(i_star)):
        best = max(best, objective(u_star + du, i_star + di))
    return VariationalReport(
        capacity=cap,
        value=objective(u_star, i_star),
        potential=u_star,
        flow=i_star,
        boundary_residual=float(bres),
        divergence_residual=float(dres),
        best_sampled=float(best),
        n_samples=n_samples,
    )
