"""Local network reductions: series, parallel, star -> delta, delta -> star.

Stars and deltas are parameterised by their secunder forms (amplifier first,
then one resistor), which keeps the coefficient formulas short. Conversion
to and from ordinary units happens only at this module's edges.

Star with centre ``c`` and terminals ``x, y, z``::

    x --[mu ]--[Q]-- c      arm x: amplifier mu, secunder resistance Q
    y --[lam]--[R]-- c      arm y: amplifier lam, secunder resistance R
    z --[nu ]--[S]-- c      arm z: amplifier nu, secunder resistance S

Delta on ``x, y, z``::

    x -> y : amplifier nu',  secunder resistance S'
    y -> z : amplifier mu',  secunder resistance Q'
    z -> x : amplifier lam', secunder resistance R'
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    CenterNotIsolated,
    EndpointMismatch,
    InfeasibleDelta,
    MidVertexNotFree,
    MissingTerminal,
    NetworkError,
)
from .network import Network, Unit, alternative_forms, from_secunder, solve

DELTA_FEASIBILITY_TOL = 1e-9
EQUIVALENCE_RTOL = 1e-9


def _check_gains(*units: Unit) -> None:
    for u in units:
        g, back = u.gain, u.flipped().gain
        if abs(g * back - 1.0) > 1e-12:
            raise ArithmeticError(f"gain antisymmetry broken on {u}")


def series_reduce(u1: Unit, u2: Unit, mid: int) -> Unit:
    """Replace two units meeting at ``mid`` by one.

    With ``u1 = (R, lam)`` oriented ``x -> mid`` and ``u2 = (Q, mu)`` oriented
    ``mid -> y`` the substitute is
    ``(R (lam + 1) mu / (lam mu + 1) + Q (mu + 1) / (lam mu + 1), lam mu)``
    oriented ``x -> y``. The caller is responsible for ``mid`` having no
    other connections.
    """
    if mid not in (u1.tail, u1.head) or mid not in (u2.tail, u2.head):
        raise MidVertexNotFree(f"vertex {mid} is not shared by both units")
    if u1.is_loop or u2.is_loop:
        raise MidVertexNotFree("loops cannot take part in a series reduction")
    a = u1.oriented(u1.head if u1.tail == mid else u1.tail)  # x -> mid
    b = u2.oriented(mid)  # mid -> y
    lam, mu = a.gain, b.gain
    denom = lam * mu + 1.0
    r = a.resistance * (lam + 1.0) * mu / denom + b.resistance * (mu + 1.0) / denom
    out = Unit(a.tail, b.head, r, lam * mu) if a.tail != b.head else Unit(a.tail, a.tail, r, 1.0)
    _check_gains(out)
    return out


def parallel_reduce(u1: Unit, u2: Unit) -> Unit:
    """Replace two units on the same vertex pair by one (orientation of ``u1``).

    Resistances combine classically; the gain is the weighted mean
    ``[Q (mu + 1) lam + R (lam + 1) mu] / [Q (mu + 1) + R (lam + 1)]``.
    """
    if {u1.tail, u1.head} != {u2.tail, u2.head}:
        raise EndpointMismatch(f"{u1} and {u2} do not join the same vertices")
    u2 = u2.oriented(u1.tail)
    r, lam = u1.resistance, u1.gain
    q, mu = u2.resistance, u2.gain
    wq = q * (mu + 1.0)
    wr = r * (lam + 1.0)
    gain = (wq * lam + wr * mu) / (wq + wr)
    if u1.is_loop:
        gain = 1.0
    out = Unit(u1.tail, u1.head, r * q / (r + q), gain)
    _check_gains(out)
    return out


@dataclass(frozen=True)
class StarConfig:
    """Star in secunder parameters. ``terminals = (x, y, z)``."""
    center: int
    terminals: tuple[int, int, int]
    q: float    # arm x resistance
    r: float    # arm y resistance
    s: float    # arm z resistance
    mu: float   # arm x amplifier, x -> centre
    lam: float  # arm y amplifier, y -> centre
    nu: float   # arm z amplifier, z -> centre

    def units(self) -> list[Unit]:
        x, y, z = self.terminals
        c = self.center
        return [
            from_secunder(x, c, self.q, self.mu),
            from_secunder(y, c, self.r, self.lam),
            from_secunder(z, c, self.s, self.nu),
        ]

    @classmethod
    def from_network(cls, network: Network, center: int) -> "StarConfig":
        """Read the star around ``center``; it must have exactly three arms."""
        arms = [network.units[k] for k in network.incident(center)]
        if len(arms) != 3 or any(u.is_loop for u in arms):
            raise CenterNotIsolated(
                f"centre {center} must have exactly three non-loop units, has {len(arms)}"
            )
        params = []
        for u in arms:
            v = u.oriented(u.head if u.tail == center else u.tail)  # terminal -> centre
            _, se = alternative_forms(v)
            params.append((v.tail, se.resistance, se.gain))
        if len({p[0] for p in params}) != 3:
            raise CenterNotIsolated("star arms must reach three distinct terminals")
        (x, q, mu), (y, r, lam), (z, s, nu) = params
        return cls(center, (x, y, z), q, r, s, mu, lam, nu)


@dataclass(frozen=True)
class DeltaConfig:
    """Delta in secunder parameters. ``terminals = (x, y, z)``."""
    terminals: tuple[int, int, int]
    s: float    # x -> y resistance
    q: float    # y -> z resistance
    r: float    # z -> x resistance
    nu: float   # x -> y amplifier
    mu: float   # y -> z amplifier
    lam: float  # z -> x amplifier

    def __post_init__(self):
        if min(self.s, self.q, self.r, self.nu, self.mu, self.lam) <= 0:
            raise NetworkError("delta parameters must be positive")

    @property
    def gain_product(self) -> float:
        return self.lam * self.nu * self.mu

    def units(self) -> list[Unit]:
        x, y, z = self.terminals
        return [
            from_secunder(x, y, self.s, self.nu),
            from_secunder(y, z, self.q, self.mu),
            from_secunder(z, x, self.r, self.lam),
        ]


def star_to_delta(star: StarConfig) -> DeltaConfig:
    """Every star has an equivalent delta; its gains multiply to one."""
    q, r, s = star.q, star.r, star.s
    total = r * s + q * s + q * r
    delta = DeltaConfig(
        terminals=star.terminals,
        s=total / (star.lam * s),
        q=total / (star.nu * q),
        r=total / (star.mu * r),
        lam=star.nu / star.mu,
        nu=star.mu / star.lam,
        mu=star.lam / star.nu,
    )
    assert abs(delta.gain_product - 1.0) <= 1e-12, delta.gain_product
    return delta


def delta_to_star(delta: DeltaConfig, alpha: float = 1.0, center: int | None = None) -> StarConfig:
    """Invert :func:`star_to_delta`.

    Possible only when the delta's gains multiply to one. The star is then
    determined up to a common factor ``alpha`` on its three amplifiers;
    every choice is equivalent at the terminals.
    """
    residual = delta.gain_product - 1.0
    if abs(residual) > DELTA_FEASIBILITY_TOL:
        raise InfeasibleDelta(
            f"delta gains multiply to {delta.gain_product!r}, need 1", residual
        )
    if not alpha > 0:
        raise NetworkError("alpha must be positive")
    lp, np_, mp = delta.lam, delta.nu, delta.mu
    lam = lp ** (1 / 3) * mp ** (2 / 3) * alpha
    nu = lp ** (2 / 3) * np_ ** (1 / 3) * alpha
    mu = np_ ** (2 / 3) * mp ** (1 / 3) * alpha
    # from 1/S' = lam S / T etc.: S/T, Q/T, R/T are known and sum-of-products gives 1/T
    s_t = 1.0 / (lam * delta.s)
    q_t = 1.0 / (nu * delta.q)
    r_t = 1.0 / (mu * delta.r)
    inv_total = r_t * s_t + q_t * s_t + q_t * r_t
    if center is None:
        center = max(delta.terminals) + 1
    return StarConfig(
        center=center,
        terminals=delta.terminals,
        q=q_t / inv_total,
        r=r_t / inv_total,
        s=s_t / inv_total,
        mu=mu,
        lam=lam,
        nu=nu,
    )


def delta_to_star_closed_form(delta: DeltaConfig, alpha: float = 1.0) -> tuple[float, float, float]:
    """Closed-form ``(S, Q, R)`` star resistances; an independent route for tests."""
    lp, np_, mp = delta.lam, delta.nu, delta.mu
    Sp, Qp, Rp = delta.s, delta.q, delta.r
    denom = (
        lp ** (2 / 3) * np_ ** (1 / 3) * Qp
        + np_ ** (2 / 3) * mp ** (1 / 3) * Rp
        + lp ** (1 / 3) * mp ** (2 / 3) * Sp
    )
    s = lp ** (1 / 3) * np_ ** (2 / 3) * alpha * Rp * Qp / denom
    q = np_ ** (1 / 3) * mp ** (2 / 3) * alpha * Rp * Sp / denom
    r = lp ** (2 / 3) * mp ** (1 / 3) * alpha * Qp * Sp / denom
    return s, q, r


def terminal_response(network: Network, terminals, potentials) -> np.ndarray:
    sol = solve(network, dict(zip(terminals, potentials)))
    return sol.external_currents[list(terminals)]


def equivalence_check(
    net1: Network,
    net2: Network,
    terminals,
    n_samples: int | None = None,
    seed: int = 0,
    rtol: float = EQUIVALENCE_RTOL,
) -> bool:
    """Do two networks draw the same terminal currents for random terminal potentials?

    By linearity ``len(terminals) + 1`` independent assignments already pin
    down the response; the default adds two spare samples.
    """
    terminals = [int(t) for t in terminals]
    for net in (net1, net2):
        missing = [t for t in terminals if t >= net.n_vertices]
        if missing:
            raise MissingTerminal(f"terminals {missing} not in {net!r}")
    if n_samples is None:
        n_samples = len(terminals) + 3
    rng = np.random.default_rng(seed)
    for _ in range(n_samples):
        pots = rng.uniform(-1.0, 1.0, len(terminals))
        i1 = terminal_response(net1, terminals, pots)
        i2 = terminal_response(net2, terminals, pots)
        scale = max(np.abs(i1).max(), np.abs(i2).max(), 1e-300)
        if np.abs(i1 - i2).max() > rtol * scale:
            return False
    return True


def _compact(n_vertices: int, units: list[Unit], removed: set[int]) -> tuple[Network, dict]:
    remaining = [v for v in range(n_vertices) if v not in removed]
    index = {v: k for k, v in enumerate(remaining)}
    new_units = [Unit(index[u.tail], index[u.head], u.resistance, u.gain) for u in units]
    return Network(len(remaining), new_units), index


def reduce_series_parallel(network: Network, keep) -> tuple[Network, dict[int, int]]:
    """Greedily apply parallel and series reductions, never eliminating ``keep``.

    Loops and dangling units are dropped (they carry no current). Returns the reduced
    network and the map from surviving old vertex ids to new ids.
    """
    keep = {int(v) for v in keep}
    units = [u for u in network.units if not u.is_loop]
    removed: set[int] = set()
    changed = True
    while changed:
        changed = False
        # parallel
        groups: dict[tuple[int, int], list[int]] = {}
        for k, u in enumerate(units):
            groups.setdefault((min(u.tail, u.head), max(u.tail, u.head)), []).append(k)
        for ks in groups.values():
            if len(ks) > 1:
                merged = units[ks[0]]
                for k in ks[1:]:
                    merged = parallel_reduce(merged, units[k])
                units = [u for j, u in enumerate(units) if j not in ks[1:] and j != ks[0]]
                units.append(merged)
                changed = True
                break
        if changed:
            continue
        # series
        for v in range(network.n_vertices):
            if v in keep or v in removed:
                continue
            inc = [k for k, u in enumerate(units) if v in (u.tail, u.head)]
            if len(inc) == 1:
                # dangling unit: carries no current once v is free
                units.pop(inc[0])
                removed.add(v)
                changed = True
                break
            if len(inc) != 2:
                continue
            u1, u2 = units[inc[0]], units[inc[1]]
            new = series_reduce(u1, u2, v)
            units = [u for j, u in enumerate(units) if j not in inc]
            if not new.is_loop:
                units.append(new)
            removed.add(v)
            changed = True
            break
    return _compact(network.n_vertices, units, removed)
