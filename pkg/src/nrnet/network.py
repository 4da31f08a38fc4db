"""Resistor-amplifier networks and their boundary-value solver.

A :class:`Unit` joins two vertices with a resistance ``R`` split evenly around
a voltage amplifier. Its ``gain`` is the factor applied to the tail-side
potential when traversing tail -> head; traversing head -> tail uses
``1/gain``. With ``C = 1/R`` the current from tail to head is::

    i = 2C / (1 + gain) * (gain * u_tail - u_head)
      = D * (sqrt(gain) * u_tail - u_head / sqrt(gain))

where ``D = 2 sqrt(gain) C / (1 + gain)`` is symmetric in the endpoints.
"""
from __future__ import annotations

from dataclasses import dataclass, replace
from functools import cached_property
from typing import Iterable, Mapping, NamedTuple, Sequence

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from .errors import (
    Disconnected,
    EmptyBoundary,
    InvalidUnit,
    NetworkError,
    NonPositiveScale,
    SingularSystem,
)

GAIN_MIN = 1e-12
GAIN_MAX = 1e12
MARKOV_RTOL = 1e-9


@dataclass(frozen=True)
class Unit:
    tail: int
    head: int
    resistance: float
    gain: float = 1.0

    def __post_init__(self):
        if self.tail < 0 or self.head < 0:
            raise InvalidUnit(f"negative vertex id in {self}")
        if not (self.resistance > 0 and np.isfinite(self.resistance)):
            raise InvalidUnit(f"resistance must be positive, got {self.resistance}")
        if not (GAIN_MIN <= self.gain <= GAIN_MAX):
            raise InvalidUnit(
                f"gain {self.gain} outside [{GAIN_MIN:g}, {GAIN_MAX:g}]"
            )
        if self.tail == self.head and self.gain != 1.0:
            raise InvalidUnit("a loop must have gain exactly 1")

    @property
    def is_loop(self) -> bool:
        return self.tail == self.head

    @property
    def conductance(self) -> float:
        return 1.0 / self.resistance

    @property
    def d(self) -> float:
        """Symmetric coefficient ``D = 2 sqrt(gain) C / (1 + gain)``."""
        g = self.gain
        return 2.0 * np.sqrt(g) / (1.0 + g) / self.resistance

    def flipped(self) -> "Unit":
        """Same physical device described from the head's side."""
        return Unit(self.head, self.tail, self.resistance, 1.0 / self.gain)

    def oriented(self, tail: int) -> "Unit":
        """Return this unit with ``tail`` as its tail (flipping if needed)."""
        if tail == self.tail:
            return self
        if tail == self.head:
            return self.flipped()
        raise NetworkError(f"vertex {tail} is not an endpoint of {self}")

    def reversed_amplifier(self) -> "Unit":
        """Unit with its amplifier turned around (gain inverted).

        Implemented by swapping endpoints, which is an exact involution.
        """
        return Unit(self.head, self.tail, self.resistance, self.gain)


def unit_current(unit: Unit, u_tail: float, u_head: float) -> float:
    """Current through ``unit`` from tail to head."""
    g = unit.gain
    return 2.0 * unit.conductance / (1.0 + g) * (g * u_tail - u_head)


def unit_current_drop_form(unit: Unit, u_tail: float, u_head: float) -> float:
    """Same current, solved from the half-resistor / amplifier / half-resistor chain.

    ``u_head = (u_tail - i R/2) * gain - i R/2`` rearranged for ``i``.
    """
    half = unit.resistance / 2.0
    return (u_tail * unit.gain - u_head) / (half * unit.gain + half)


class AlternativeForm(NamedTuple):
    resistance: float
    gain: float


def alternative_forms(unit: Unit) -> tuple[AlternativeForm, AlternativeForm]:
    """Primer and secunder equivalents of ``unit`` in its tail -> head orientation.

    Primer: a single resistor on the tail side followed by the amplifier.
    Secunder: the amplifier followed by a single resistor on the head side.
    Both resistances depend on orientation.
    """
    g = unit.gain
    r = unit.resistance
    primer = AlternativeForm(r * (g + 1.0) / (2.0 * g), g)
    secunder = AlternativeForm(r * (g + 1.0) / 2.0, g)
    return primer, secunder


def primer_current(form: AlternativeForm, u_tail: float, u_head: float) -> float:
    # u_head = (u_tail - i R_pr) * gain
    return (u_tail - u_head / form.gain) / form.resistance


def secunder_current(form: AlternativeForm, u_tail: float, u_head: float) -> float:
    # u_head = u_tail * gain - i R_se
    return (u_tail * form.gain - u_head) / form.resistance


def from_secunder(tail: int, head: int, r_se: float, gain: float) -> Unit:
    """Build a unit from secunder parameters (``R_se = R (gain + 1) / 2``)."""
    return Unit(tail, head, 2.0 * r_se / (gain + 1.0), gain)


class Network:
    """Finite connected multigraph of units. Immutable.

    Parameters
    ----------
    n_vertices : int
    units : iterable of Unit
        Parallel units and loops are allowed.
    """

    def __init__(self, n_vertices: int, units: Iterable[Unit]):
        self.n_vertices = int(n_vertices)
        self.units: tuple[Unit, ...] = tuple(units)
        if self.n_vertices < 1:
            raise NetworkError("a network needs at least one vertex")
        for u in self.units:
            if max(u.tail, u.head) >= self.n_vertices:
                raise InvalidUnit(f"{u} references a vertex >= {self.n_vertices}")
        if self.n_vertices > 1:
            n_comp, _ = connected_components(self.adjacency(), directed=False)
            if n_comp != 1:
                raise Disconnected(f"network has {n_comp} connected components")

    @classmethod
    def from_edges(cls, n_vertices: int, edges: Iterable[Sequence[float]]) -> "Network":
        """``edges`` holds ``(tail, head, resistance[, gain])`` tuples."""
        units = []
        for e in edges:
            t, h, r, *g = e
            units.append(Unit(int(t), int(h), float(r), float(g[0]) if g else 1.0))
        return cls(n_vertices, units)

    def __repr__(self):
        return f"Network(n_vertices={self.n_vertices}, n_units={len(self.units)})"

    def __eq__(self, other):
        if not isinstance(other, Network):
            return NotImplemented
        return self.n_vertices == other.n_vertices and self.units == other.units

    def __hash__(self):
        return hash((self.n_vertices, self.units))

    def __len__(self):
        return len(self.units)

    # array views
    @cached_property
    def tails(self) -> np.ndarray:
        return np.array([u.tail for u in self.units], dtype=np.intp)

    @cached_property
    def heads(self) -> np.ndarray:
        return np.array([u.head for u in self.units], dtype=np.intp)

    @cached_property
    def resistances(self) -> np.ndarray:
        return np.array([u.resistance for u in self.units], dtype=float)

    @cached_property
    def gains(self) -> np.ndarray:
        return np.array([u.gain for u in self.units], dtype=float)

    @property
    def conductances(self) -> np.ndarray:
        return 1.0 / self.resistances

    @cached_property
    def d(self) -> np.ndarray:
        g = self.gains
        return 2.0 * np.sqrt(g) / (1.0 + g) / self.resistances

    @cached_property
    def loops(self) -> np.ndarray:
        return self.tails == self.heads

    def adjacency(self):
        n = self.n_vertices
        m = len(self.units)
        data = np.ones(m)
        return coo_matrix((data, (self.tails, self.heads)), shape=(n, n)).tocsr()

    def degree(self, vertex: int, count_loops: bool = True) -> int:
        deg = 0
        for u in self.units:
            if u.is_loop:
                deg += 2 if (count_loops and u.tail == vertex) else 0
            elif vertex in (u.tail, u.head):
                deg += 1
        return deg

    def incident(self, vertex: int) -> list[int]:
        return [k for k, u in enumerate(self.units) if vertex in (u.tail, u.head)]

    def has_parallel_units(self) -> bool:
        seen = set()
        for u in self.units:
            key = (min(u.tail, u.head), max(u.tail, u.head))
            if key in seen:
                return True
            seen.add(key)
        return False

    def edge_table(self) -> dict[tuple[int, int], tuple[float, float]]:
        """``{(x, y): (R, gain x->y)}`` with ``x <= y``. Requires no parallel units."""
        out = {}
        for u in self.units:
            v = u.oriented(min(u.tail, u.head))
            out[(v.tail, v.head)] = (v.resistance, v.gain)
        return out

    def with_units(self, units: Iterable[Unit], n_vertices: int | None = None) -> "Network":
        return Network(self.n_vertices if n_vertices is None else n_vertices, units)

    @cached_property
    def current_operator(self) -> np.ndarray:
        """Matrix ``M`` with external currents ``i = M @ u`` for potentials ``u``."""
        n = self.n_vertices
        M = np.zeros((n, n))
        keep = ~self.loops
        t, h = self.tails[keep], self.heads[keep]
        sg = np.sqrt(self.gains[keep])
        d = self.d[keep]
        np.add.at(M, (t, t), d * sg)
        np.add.at(M, (t, h), -d / sg)
        np.add.at(M, (h, t), -d * sg)
        np.add.at(M, (h, h), d / sg)
        M.setflags(write=False)
        return M


def edge_currents(network: Network, potentials, reversed_amplifiers: bool = False) -> np.ndarray:
    """Per-unit currents (tail -> head) for arbitrary vertex potentials.

    With ``reversed_amplifiers`` the gains are inverted, i.e. the currents of
    the reversed network expressed in the original orientation.
    """
    u = np.asarray(potentials, dtype=float)
    sg = np.sqrt(network.gains)
    if reversed_amplifiers:
        sg = 1.0 / sg
    ut, uh = u[network.tails], u[network.heads]
    cur = network.d * (sg * ut - uh / sg)
    cur[network.loops] = 0.0
    return cur


def ohmic_currents(network: Network, potentials) -> np.ndarray:
    """Currents ``C (u_tail - u_head)`` of the amplifier-free network."""
    u = np.asarray(potentials, dtype=float)
    return network.conductances * (u[network.tails] - u[network.heads])


def divergence(network: Network, currents) -> np.ndarray:
    """External current each vertex must supply for the given unit currents."""
    i = np.asarray(currents, dtype=float)
    out = np.zeros(network.n_vertices)
    np.add.at(out, network.tails, i)
    np.add.at(out, network.heads, -i)
    return out


@dataclass(frozen=True)
class BoundarySolution:
    potentials: np.ndarray
    edge_currents: np.ndarray
    external_currents: np.ndarray
    boundary: Mapping[int, float]

    def external_current(self, vertex: int) -> float:
        return float(self.external_currents[vertex])

    def set_current(self, vertices: Iterable[int]) -> float:
        """Total current pumped into a vertex set."""
        idx = np.fromiter(vertices, dtype=np.intp)
        return float(self.external_currents[idx].sum())


def _check_boundary(network: Network, boundary: Mapping[int, float]) -> dict[int, float]:
    if not boundary:
        raise EmptyBoundary("boundary set must be non-empty")
    out = {}
    for v, val in boundary.items():
        v = int(v)
        if not 0 <= v < network.n_vertices:
            raise NetworkError(f"boundary vertex {v} not in network")
        out[v] = float(val)
    return out


def solve(network: Network, boundary: Mapping[int, float]) -> BoundarySolution:
    """Solve the network with the given vertices held at fixed potentials.

    The free potentials satisfy Kirchhoff's current law; the reduced system
    is dense and solved by LU factorisation with partial pivoting.
    """
    bnd = _check_boundary(network, boundary)
    n = network.n_vertices
    fixed = np.array(sorted(bnd), dtype=np.intp)
    free = np.setdiff1d(np.arange(n), fixed)
    u = np.zeros(n)
    u[fixed] = [bnd[v] for v in fixed]
    M = network.current_operator
    if free.size:
        A = M[np.ix_(free, free)]
        rhs = -M[np.ix_(free, fixed)] @ u[fixed]
        try:
            u[free] = np.linalg.solve(A, rhs)
        except np.linalg.LinAlgError as exc:
            raise SingularSystem(str(exc)) from exc
        if not np.all(np.isfinite(u)):
            raise SingularSystem("non-finite potentials")
    ext = M @ u
    return BoundarySolution(
        potentials=u,
        edge_currents=edge_currents(network, u),
        external_currents=ext,
        boundary=bnd,
    )


def solve_iterative(
    network: Network,
    boundary: Mapping[int, float],
    tol: float = 1e-13,
    max_sweeps: int = 200_000,
) -> np.ndarray:
    """Gauss-Seidel on the per-vertex voltage-divider equations.

    Each free vertex is updated to the conductance-weighted mean of its
    neighbours' potentials as seen through the amplifiers (secunder form).
    Used as an oracle for :func:`solve`; returns potentials only.
    """
    bnd = _check_boundary(network, boundary)
    n = network.n_vertices
    # (neighbour, amplified factor, secunder conductance) per vertex
    terms: list[list[tuple[int, float, float]]] = [[] for _ in range(n)]
    for unit in network.units:
        if unit.is_loop:
            continue
        for x in (unit.tail, unit.head):
            # view from the neighbour y towards x: tail=y, head=x
            v = unit.oriented(unit.head if x == unit.tail else unit.tail)
            _, se = alternative_forms(v)
            terms[x].append((v.tail, se.gain, 1.0 / se.resistance))
    u = np.zeros(n)
    for v, val in bnd.items():
        u[v] = val
    free = [x for x in range(n) if x not in bnd]
    weights = {x: sum(c for _, _, c in terms[x]) for x in free}
    for _ in range(max_sweeps):
        delta = 0.0
        for x in free:
            new = sum(g * c * u[y] for y, g, c in terms[x]) / weights[x]
            delta = max(delta, abs(new - u[x]))
            u[x] = new
        if delta <= tol * max(1.0, np.abs(u).max()):
            return u
    raise SingularSystem("Gauss-Seidel did not converge")


class MarkovianCheck(NamedTuple):
    markovian: bool
    residuals: np.ndarray
    circulation: np.ndarray


def markovian_residuals(network: Network) -> np.ndarray:
    """``sum_z D_xz gamma_xz - sum_z D_xz gamma_zx`` per vertex (relative)."""
    M = network.current_operator
    scale = np.zeros(network.n_vertices)
    np.add.at(scale, network.tails, network.d)
    np.add.at(scale, network.heads, network.d)
    loops = network.loops
    np.add.at(scale, network.tails[loops], -network.d[loops])
    return -(M.sum(axis=1)) / scale


def check_markovian(
    network: Network,
    tol: float = MARKOV_RTOL,
    pin_vertex: int = 0,
    pin_potential: float = 1.0,
) -> MarkovianCheck:
    """Test whether constant potentials solve the free network.

    Also returns the unit currents obtained by pinning one vertex; for a
    Markovian network these form a divergence-free circulation.
    """
    res = markovian_residuals(network)
    sol = solve(network, {pin_vertex: pin_potential})
    return MarkovianCheck(bool(np.all(np.abs(res) <= tol)), res, sol.edge_currents)


def is_markovian(network: Network, tol: float = MARKOV_RTOL) -> bool:
    return bool(np.all(np.abs(markovian_residuals(network)) <= tol))


def scale_resistances(network: Network, factor: float) -> Network:
    if not factor > 0:
        raise NonPositiveScale(f"scale factor must be positive, got {factor}")
    return network.with_units(
        replace(u, resistance=u.resistance * factor) for u in network.units
    )


def reverse_network(network: Network) -> Network:
    """Invert every amplifier; resistances are unchanged."""
    return network.with_units(u.reversed_amplifier() for u in network.units)


def add_loop(network: Network, vertex: int, resistance: float = 1.0) -> Network:
    return network.with_units(network.units + (Unit(vertex, vertex, resistance),))


def spanning_tree(network: Network, root: int = 0) -> tuple[np.ndarray, np.ndarray]:
    """BFS spanning tree.

    Returns ``(parent_unit, order)`` where ``parent_unit[v]`` is the index of
    the unit linking ``v`` to its BFS parent (-1 for the root).
    """
    n = network.n_vertices
    adj: list[list[tuple[int, int]]] = [[] for _ in range(n)]
    for k, u in enumerate(network.units):
        if u.is_loop:
            continue
        adj[u.tail].append((u.head, k))
        adj[u.head].append((u.tail, k))
    parent_unit = np.full(n, -1, dtype=np.intp)
    seen = np.zeros(n, dtype=bool)
    seen[root] = True
    order = [root]
    head = 0
    while head < len(order):
        x = order[head]
        head += 1
        for y, k in adj[x]:
            if not seen[y]:
                seen[y] = True
                parent_unit[y] = k
                order.append(y)
    return parent_unit, np.array(order, dtype=np.intp)


def _tree_path(network: Network, parent_unit, depth, x, y):
    """Vertex path x -> ... -> y through the tree."""
    left, right = [x], [y]
    while left[-1] != right[-1]:
        a, b = left[-1], right[-1]
        if depth[a] >= depth[b]:
            u = network.units[parent_unit[a]]
            left.append(u.head if u.tail == a else u.tail)
        else:
            u = network.units[parent_unit[b]]
            right.append(u.head if u.tail == b else u.tail)
    return left + right[-2::-1]


def cycle_basis(network: Network) -> tuple[np.ndarray, list[list[int]]]:
    """Fundamental cycles of a BFS spanning tree, loops excluded.

    Returns a signed unit-incidence matrix (one row per cycle; a row is a
    divergence-free unit flow) and the vertex sequence of each cycle.
    """
    parent_unit, order = spanning_tree(network)
    depth = np.zeros(network.n_vertices, dtype=np.intp)
    for v in order[1:]:
        u = network.units[parent_unit[v]]
        p = u.head if u.tail == v else u.tail
        depth[v] = depth[p] + 1
    tree = set(int(k) for k in parent_unit if k >= 0)
    rows, cycles = [], []
    for k, unit in enumerate(network.units):
        if unit.is_loop or k in tree:
            continue
        # cycle: tail -> head along unit k, then head -> tail through the tree
        path = _tree_path(network, parent_unit, depth, unit.head, unit.tail)
        row = np.zeros(len(network.units))
        row[k] = 1.0
        for a, b in zip(path[:-1], path[1:]):
            j = next(
                j for j in (parent_unit[a], parent_unit[b])
                if j >= 0 and {network.units[j].tail, network.units[j].head} == {a, b}
            )
            row[j] += 1.0 if network.units[j].tail == a else -1.0
        rows.append(row)
        cycles.append([unit.tail] + path)
    return np.array(rows).reshape(len(rows), len(network.units)), cycles
