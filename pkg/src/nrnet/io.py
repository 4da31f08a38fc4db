"""Line-oriented text formats for networks, chains and edge costs.

Network files::

    vertices 4 a x y b        # count, then optional names
    unit a x R=3 gain=0.2     # gain multiplies the potential traversing tail -> head

Chain files::

    states 3
    p 0 1 0.7                 # unlisted entries are zero

Cost files (directed jump costs)::

    default 1
    k 0 1 2.5

Vertices may be referred to by index or by name. ``#`` starts a comment.
Numbers are written with 17 significant digits so that write-then-parse is
the identity.
"""
from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import NetworkError
from .markov import MarkovChain
from .network import Network, Unit


class ParseError(NetworkError):
    """Malformed input file."""

    def __init__(self, message: str, line: int | None = None):
        super().__init__(message if line is None else f"line {line}: {message}")
        self.line = line


def fmt(x: float) -> str:
    return format(float(x), ".17g")


def _lines(text: str):
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if line:
            yield lineno, line.split()


def _float(tok: str, lineno: int, what: str) -> float:
    try:
        value = float(tok)
    except ValueError:
        raise ParseError(f"{what}: cannot parse {tok!r} as a number", lineno) from None
    if not np.isfinite(value):
        raise ParseError(f"{what} must be finite, got {tok!r}", lineno)
    return value


def _count(tokens, lineno: int, keyword: str) -> int:
    if len(tokens) < 2:
        raise ParseError(f"'{keyword}' needs a count", lineno)
    try:
        n = int(tokens[1])
    except ValueError:
        raise ParseError(f"bad count {tokens[1]!r}", lineno) from None
    if n < 1:
        raise ParseError(f"count must be >= 1, got {n}", lineno)
    return n


@dataclass
class Labels:
    """Vertex names, defaulting to the decimal index."""

    names: list[str]

    @classmethod
    def parse(cls, tokens, n: int, lineno: int) -> "Labels":
        given = tokens[2:]
        if given and len(given) != n:
            raise ParseError(f"expected {n} names, got {len(given)}", lineno)
        names = list(given) if given else [str(i) for i in range(n)]
        if len(set(names)) != n:
            raise ParseError("vertex names must be unique", lineno)
        return cls(names)

    @property
    def custom(self) -> bool:
        return self.names != [str(i) for i in range(len(self.names))]

    def index(self, token: str, lineno: int | None = None) -> int:
        if token in self.names:
            return self.names.index(token)
        try:
            i = int(token)
        except ValueError:
            raise ParseError(f"unknown vertex {token!r}", lineno) from None
        if not 0 <= i < len(self.names):
            raise ParseError(f"vertex {i} out of range 0..{len(self.names) - 1}", lineno)
        return i

    def header(self, keyword: str) -> str:
        n = len(self.names)
        return f"{keyword} {n} " + " ".join(self.names) if self.custom else f"{keyword} {n}"


def _header(text: str, keyword: str):
    it = _lines(text)
    for lineno, tokens in it:
        if tokens[0] != keyword:
            raise ParseError(f"expected '{keyword} <n>' before {tokens[0]!r}", lineno)
        n = _count(tokens, lineno, keyword)
        return Labels.parse(tokens, n, lineno), it
    raise ParseError(f"missing '{keyword}' line")


def parse_network(text: str) -> tuple[Network, Labels]:
    labels, rest = _header(text, "vertices")
    units = []
    for lineno, tokens in rest:
        if tokens[0] != "unit":
            raise ParseError(f"unknown directive {tokens[0]!r}", lineno)
        if len(tokens) < 4:
            raise ParseError("expected 'unit <tail> <head> R=<r> [gain=<g>]'", lineno)
        tail = labels.index(tokens[1], lineno)
        head = labels.index(tokens[2], lineno)
        fields = {}
        for tok in tokens[3:]:
            key, sep, val = tok.partition("=")
            if not sep or key not in ("R", "gain") or key in fields:
                raise ParseError(f"bad unit field {tok!r}", lineno)
            fields[key] = _float(val, lineno, key)
        if "R" not in fields:
            raise ParseError("unit is missing R=", lineno)
        try:
            units.append(Unit(tail, head, fields["R"], fields.get("gain", 1.0)))
        except NetworkError as exc:
            raise ParseError(str(exc), lineno) from None
    if not units:
        raise ParseError("network has no units")
    return Network(len(labels.names), units), labels


def format_network(network: Network, labels: Labels | None = None) -> str:
    labels = labels or Labels([str(i) for i in range(network.n_vertices)])
    out = [labels.header("vertices")]
    for u in network.units:
        out.append(
            f"unit {labels.names[u.tail]} {labels.names[u.head]} "
            f"R={fmt(u.resistance)} gain={fmt(u.gain)}"
        )
    return "\n".join(out) + "\n"


def parse_chain(text: str) -> tuple[MarkovChain, Labels]:
    labels, rest = _header(text, "states")
    n = len(labels.names)
    P = np.zeros((n, n))
    seen = set()
    for lineno, tokens in rest:
        if tokens[0] != "p":
            raise ParseError(f"unknown directive {tokens[0]!r}", lineno)
        if len(tokens) != 4:
            raise ParseError("expected 'p <from> <to> <prob>'", lineno)
        x = labels.index(tokens[1], lineno)
        y = labels.index(tokens[2], lineno)
        if (x, y) in seen:
            raise ParseError(f"duplicate entry for ({tokens[1]}, {tokens[2]})", lineno)
        seen.add((x, y))
        P[x, y] = _float(tokens[3], lineno, "probability")
    return MarkovChain(P), labels


def format_chain(chain: MarkovChain, labels: Labels | None = None) -> str:
    P = chain.transition
    labels = labels or Labels([str(i) for i in range(chain.n_states)])
    out = [labels.header("states")]
    for x, y in zip(*np.nonzero(P)):
        out.append(f"p {labels.names[x]} {labels.names[y]} {fmt(P[x, y])}")
    return "\n".join(out) + "\n"


def parse_costs(text: str, labels: Labels) -> np.ndarray:
    n = len(labels.names)
    k = np.ones((n, n))
    explicit = np.zeros((n, n), dtype=bool)
    for lineno, tokens in _lines(text):
        if tokens[0] == "default":
            if len(tokens) != 2:
                raise ParseError("expected 'default <value>'", lineno)
            k[~explicit] = _float(tokens[1], lineno, "default")
        elif tokens[0] == "k":
            if len(tokens) != 4:
                raise ParseError("expected 'k <from> <to> <value>'", lineno)
            x = labels.index(tokens[1], lineno)
            y = labels.index(tokens[2], lineno)
            k[x, y] = _float(tokens[3], lineno, "cost")
            explicit[x, y] = True
        else:
            raise ParseError(f"unknown directive {tokens[0]!r}", lineno)
    return k


def read_text(path) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except (OSError, UnicodeDecodeError) as exc:
        raise ParseError(f"cannot read {path}: {exc}") from None


def _load(parser, path):
    text = read_text(path)
    try:
        return parser(text)
    except ParseError as exc:
        raise ParseError(f"{path}: {exc}") from None


def load_network(path) -> tuple[Network, Labels]:
    return _load(parse_network, path)


def load_chain(path) -> tuple[MarkovChain, Labels]:
    return _load(parse_chain, path)
