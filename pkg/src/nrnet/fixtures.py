"""The four-vertex network whose effective resistance decreases in one resistor.

Vertices ``a, x, y, b`` (ids 0..3). Four units form the cycle a-x-b-y-a and a
plain resistor of variable value joins x and y. The amplifiers keep a 4 A
circulation a -> y -> b -> x -> a alive at any constant potential of 9 V, so
the network is Markovian for every value of the variable resistor. With
``u_a = 5`` and ``u_b = 0`` the voltage dividers at x and y read::

    u_x = (1 * 5/9 + 0 * 5/18 + u_y / R) / (5/9 + 5/18 + 1/R)
    u_y = (25 * 1/9 + 0 * 13/18 + u_x / R) / (1/9 + 13/18 + 1/R)

and the effective resistance is ``(675 R + 1620) / (350 R + 648)``.
"""
from __future__ import annotations

from fractions import Fraction

import numpy as np

from .network import Network, Unit, alternative_forms

A, X, Y, B = 0, 1, 2, 3
NAMES = ("a", "x", "y", "b")

# (tail, head, resistance, gain tail->head)
CYCLE_UNITS = (
    (A, X, 3.0, 1.0 / 5.0),
    (A, Y, 3.0, 5.0),
    (X, B, 2.0, 5.0 / 13.0),
    (Y, B, 2.0, 13.0 / 5.0),
)


def nonmonotone_network(r: float) -> Network:
    units = [Unit(t, h, res, g) for t, h, res, g in CYCLE_UNITS]
    units.append(Unit(X, Y, float(r), 1.0))
    return Network(4, units)


def u_x_exact(r):
    return (10 * r + 72) / (15 * r + 36)


def u_y_exact(r):
    return (50 * r + 72) / (15 * r + 36)


def r_eff_exact(r):
    return (675 * r + 1620) / (350 * r + 648)


def r_eff_partial_fractions(r):
    return 27 / 14 + 1296 / (1225 * r + 2268)


R_EFF_ASYMPTOTE = 27 / 14


def divider_coefficients(vertex: int, u_a: Fraction = Fraction(5)) -> dict:
    """Exact voltage-divider data at a free vertex with ``u_a`` given, ``u_b = 0``.

    Returns ``{neighbour: (secunder conductance, source potential)}`` for the
    fixed-resistance neighbours a and b, computed in rational arithmetic from
    the unit parameters. Used to confirm the fixture reproduces the divider
    equations in the module docstring.
    """
    out = {}
    for t, h, res, g in CYCLE_UNITS:
        if vertex not in (t, h):
            continue
        other = h if t == vertex else t
        unit = Unit(t, h, res, g).oriented(other)  # neighbour -> vertex
        gain = Fraction(unit.gain).limit_denominator(1000)
        _, se = alternative_forms(unit)
        cond = 1 / Fraction(se.resistance).limit_denominator(1000)
        pot = u_a if other == A else Fraction(0)
        out[NAMES[other]] = (cond, gain * pot)
    return out


def free_solution(potential: float = 9.0, r: float = 1.0) -> np.ndarray:
    """Unit currents with a single vertex pinned at ``potential``."""
    from .network import solve

    return solve(nonmonotone_network(r), {A: potential}).edge_currents
