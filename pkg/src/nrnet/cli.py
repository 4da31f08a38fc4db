"""Command-line entry points.

Exit codes: 0 success, 1 input error, 2 violated precondition (for example a
non-Markovian network), 3 statistical disagreement between the Monte Carlo
estimate and the analytic value. Output is buffered so that a failing
command prints nothing to stdout.
"""
from __future__ import annotations

import argparse
import sys

import numpy as np

from . import fixtures
from .errors import NetworkError, PreconditionError, SingularSystem, TruncationExceeded
from .io import Labels, ParseError, fmt, format_network, load_chain, load_network, parse_costs, read_text
from .markov import absorption_probabilities, is_reversible
from .mc import (
    SimConfig,
    simulate_absorption,
    simulate_commute_cost,
    simulate_edge_counts,
    simulate_escape,
    z_score,
)
from .network import solve
from .quantities import (
    capacity,
    capacity_symmetrized_form,
    commute_cost,
    edge_flows,
    effective_resistance,
    escape_probability,
)

EXIT_OK, EXIT_INPUT, EXIT_PRECONDITION, EXIT_DISAGREE = 0, 1, 2, 3
Z_LIMIT = 4.0


class UsageError(NetworkError):
    pass


def _num(x: float) -> str:
    return repr(float(x))


def _vertex_set(text: str, labels: Labels, what: str) -> list[int]:
    items = [s for s in text.replace(" ", "").split(",") if s]
    if not items:
        raise UsageError(f"--{what} is empty")
    return sorted({labels.index(s) for s in items})


def _boundary(text: str, labels: Labels) -> dict[int, float]:
    out = {}
    for item in text.split(","):
        item = item.strip()
        if not item:
            continue
        name, sep, value = item.partition("=")
        if not sep:
            raise UsageError(f"boundary entry {item!r} is not of the form vertex=volts")
        v = labels.index(name.strip())
        if v in out:
            raise UsageError(f"vertex {name!r} appears twice in the boundary")
        try:
            out[v] = float(value)
        except ValueError:
            raise UsageError(f"bad potential {value!r} for vertex {name!r}") from None
    if not out:
        raise UsageError("boundary is empty")
    return out


# -- commands -----------------------------------------------------------------

def cmd_solve(args, out: list[str]) -> int:
    network, labels = load_network(args.network)
    sol = solve(network, _boundary(args.boundary, labels))
    names = labels.names
    if args.csv:
        out.append("kind,name,potential,current")
        for v in range(network.n_vertices):
            out.append(f"vertex,{names[v]},{fmt(sol.potentials[v])},{fmt(sol.external_currents[v])}")
        for j, u in enumerate(network.units):
            out.append(f"unit,{names[u.tail]}->{names[u.head]},,{fmt(sol.edge_currents[j])}")
        return EXIT_OK
    out.append("vertex  potential  external_current")
    for v in range(network.n_vertices):
        mark = "*" if v in sol.boundary else " "
        out.append(f"{names[v]}{mark} {_num(sol.potentials[v])} {_num(sol.external_currents[v])}")
    out.append("unit  current (tail -> head)")
    for j, u in enumerate(network.units):
        out.append(f"{names[u.tail]}->{names[u.head]} {_num(sol.edge_currents[j])}")
    return EXIT_OK


def cmd_quantities(args, out: list[str]) -> int:
    chain, labels = load_chain(args.chain)
    A = _vertex_set(args.A, labels, "A")
    B = _vertex_set(args.B, labels, "B")
    k = parse_costs(read_text(args.k), labels) if args.k else None
    cap = capacity(chain, A, B)
    sym = capacity_symmetrized_form(chain, A, B)
    esc = escape_probability(chain, A, B)
    out.append(f"capacity (probabilistic)   {_num(cap.probabilistic)}")
    out.append(f"capacity (1 / R_eff)       {_num(cap.electrical)}")
    out.append(f"capacity (ohmic loss)      {_num(sym)}")
    out.append(f"R_eff                      {_num(effective_resistance(chain, A, B))}")
    out.append(f"escape probability         {_num(esc.probability)}")
    rev = is_reversible(chain)
    if rev.reversible:
        out.append("chain is reversible: all gains 1")
    else:
        cyc = "->".join(labels.names[v] for v in rev.cycle)
        out.append(f"chain is not reversible: gain product {_num(rev.product)} around {cyc}")
    if args.commute:
        a, b = (labels.index(s) for s in args.commute)
        com = commute_cost(chain, a, b, k)
        out.append(f"commute cost (hitting costs)     {_num(com.cost)}")
        out.append(f"commute cost (R_eff * D^k)       {_num(com.via_resistance)}")
    return EXIT_OK


def cmd_nonmonotone(args, out: list[str]) -> int:
    if not (0 < args.rmin < args.rmax) or args.steps < 2:
        raise UsageError("need 0 < rmin < rmax and steps >= 2")
    if args.linear:
        grid = np.linspace(args.rmin, args.rmax, args.steps)
    else:
        # snap to 15 digits so that 0.5 .. 16 in 6 steps lands on powers of two
        grid = [float(f"{r:.15g}") for r in np.geomspace(args.rmin, args.rmax, args.steps)]
    out.append("R,u_x,u_y,R_eff")
    worst = 0.0
    for r in grid:
        network = fixtures.nonmonotone_network(r)
        u = solve(network, {fixtures.A: 5.0, fixtures.B: 0.0}).potentials
        reff = effective_resistance(network, [fixtures.A], [fixtures.B])
        worst = max(worst, abs(reff - fixtures.r_eff_partial_fractions(r)))
        out.append(f"{fmt(r)},{fmt(u[fixtures.X])},{fmt(u[fixtures.Y])},{fmt(reff)}")
    out.append(
        f"# fit R_eff = 27/14 + 1296/(1225R + 2268): max deviation {worst:.3e}; "
        f"asymptote {fmt(fixtures.R_EFF_ASYMPTOTE)}"
    )
    return EXIT_OK


def cmd_fixture(args, out: list[str]) -> int:
    if not args.r > 0:
        raise UsageError("--r must be positive")
    text = format_network(fixtures.nonmonotone_network(args.r), Labels(list(fixtures.NAMES)))
    out.append(text.rstrip("\n"))
    return EXIT_OK


def _z_line(label: str, est, exact: float) -> tuple[str, float]:
    z = z_score(est.estimate, est.stderr, exact)
    return (
        f"{label}: estimate {_num(est.estimate)} se {_num(est.stderr)} "
        f"analytic {_num(exact)} z {z:+.3f}",
        z,
    )


def cmd_mc(args, out: list[str]) -> int:
    chain, labels = load_chain(args.chain)
    cfg = SimConfig(n_trajectories=args.n, seed=args.seed, max_steps=args.max_steps,
                    backend=args.backend)
    zs = []
    if args.kind == "absorption":
        A = _vertex_set(args.A, labels, "A")
        B = _vertex_set(args.B, labels, "B")
        start = labels.index(args.start)
        exact = float(absorption_probabilities(chain, A, B)[start])
        line, z = _z_line(f"P_{labels.names[start]}(hit A before B)",
                          simulate_absorption(chain, start, A, B, cfg), exact)
        out.append(line)
        zs.append(z)
    elif args.kind == "escape":
        A = _vertex_set(args.A, labels, "A")
        B = _vertex_set(args.B, labels, "B")
        exact = escape_probability(chain, A, B).probability
        line, z = _z_line("escape probability", simulate_escape(chain, A, B, cfg), exact)
        out.append(line)
        zs.append(z)
    elif args.kind == "commute":
        a, b = labels.index(args.a), labels.index(args.b)
        k = parse_costs(read_text(args.k), labels) if args.k else None
        exact = commute_cost(chain, a, b, k).via_resistance
        line, z = _z_line(f"commute cost {labels.names[a]}<->{labels.names[b]}",
                          simulate_commute_cost(chain, a, b, k, cfg), exact)
        out.append(line)
        zs.append(z)
    else:
        a = labels.index(args.a)
        B = _vertex_set(args.B, labels, "B")
        flows = edge_flows(chain, a, B).net_flows
        est = simulate_edge_counts(chain, a, B, cfg)
        out.append("edge,estimate,se,analytic,z")
        P = chain.transition
        for x in range(chain.n_states):
            for y in range(x + 1, chain.n_states):
                if P[x, y] == 0:
                    continue
                z = z_score(est.net_mean[x, y], est.net_stderr[x, y], flows[x, y])
                zs.append(z)
                out.append(
                    f"{labels.names[x]}->{labels.names[y]},{fmt(est.net_mean[x, y])},"
                    f"{fmt(est.net_stderr[x, y])},{fmt(flows[x, y])},{z:+.3f}"
                )
    worst = max(abs(z) for z in zs)
    if worst > Z_LIMIT:
        out.append(f"DISAGREEMENT: |z| = {worst:.3f} exceeds {Z_LIMIT:g}")
        return EXIT_DISAGREE
    return EXIT_OK


# -- parser -------------------------------------------------------------------

class _Parser(argparse.ArgumentParser):
    # usage errors are input errors (exit 1), not argparse's default 2
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="nrnet",
        description="Electric networks with voltage amplifiers for non-reversible Markov chains.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="solve a boundary-value problem on a network file")
    p.add_argument("--network", required=True)
    p.add_argument("--boundary", required=True, help='e.g. "a=1,b=0"')
    p.add_argument("--csv", action="store_true")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("quantities", help="capacity, R_eff, escape and commute costs of a chain")
    p.add_argument("--chain", required=True)
    p.add_argument("--A", required=True, help="comma-separated states")
    p.add_argument("--B", required=True, help="comma-separated states")
    p.add_argument("--k", help="cost file for the commute cost")
    p.add_argument("--commute", nargs=2, metavar=("a", "b"))
    p.set_defaults(func=cmd_quantities)

    p = sub.add_parser("nonmonotone", help="R_eff of the four-vertex network as a resistor grows")
    p.add_argument("--rmin", type=float, default=0.5)
    p.add_argument("--rmax", type=float, default=16.0)
    p.add_argument("--steps", type=int, default=6)
    p.add_argument("--linear", action="store_true", help="evenly spaced instead of geometric grid")
    p.add_argument("--csv", action="store_true", help="accepted for symmetry; output is always CSV")
    p.set_defaults(func=cmd_nonmonotone)

    p = sub.add_parser("fixture", help="print the four-vertex network as a network file")
    p.add_argument("--r", type=float, default=1.0)
    p.set_defaults(func=cmd_fixture)

    p = sub.add_parser("mc", help="Monte Carlo estimate compared with the analytic value")
    p.add_argument("kind", choices=("absorption", "commute", "escape", "edges"))
    p.add_argument("--chain", required=True)
    p.add_argument("--A")
    p.add_argument("--B")
    p.add_argument("--start", help="starting state (absorption)")
    p.add_argument("--a", help="source state (commute, edges)")
    p.add_argument("--b", help="target state (commute)")
    p.add_argument("--k", help="cost file (commute)")
    p.add_argument("--n", type=int, default=100_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--max-steps", type=int, default=1_000_000)
    p.add_argument("--backend", choices=("numba", "numpy"))
    p.set_defaults(func=cmd_mc)
    return parser


_REQUIRED = {
    "absorption": ("A", "B", "start"),
    "escape": ("A", "B"),
    "commute": ("a", "b"),
    "edges": ("a", "B"),
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "mc":
        missing = [f"--{f}" for f in _REQUIRED[args.kind] if getattr(args, f) is None]
        if missing:
            parser.error(f"mc {args.kind} requires {', '.join(missing)}")
    out: list[str] = []
    try:
        code = args.func(args, out)
    except PreconditionError as exc:
        print(f"nrnet: precondition failed: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION
    except (TruncationExceeded, SingularSystem) as exc:
        print(f"nrnet: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION
    except (ParseError, NetworkError, ValueError) as exc:
        print(f"nrnet: {exc}", file=sys.stderr)
        return EXIT_INPUT
    sys.stdout.write("\n".join(out) + "\n")
    return code


if __name__ == "__main__":
    sys.exit(main())
