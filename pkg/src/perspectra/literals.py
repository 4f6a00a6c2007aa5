"""Text literals for groups, elements, subgroups, modules, types and rings.

Groups are written in the user's factor order ("Z2+Z4") but stored
canonically (``Z4+Z2``); :class:`GroupLiteral` keeps the coordinate map so
that elements and subgroups are read and printed in the user's order.
Factors that are not prime powers are split by the Chinese remainder
theorem, one user coordinate feeding several canonical ones.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction

from .abelian import FiniteAbelianGroup, Subgroup
from .arith import factorize


class LiteralError(ValueError):
    """Malformed literal; ``position`` is the offending character offset."""

    exit_code = 1

    def __init__(self, text: str, position: int, reason: str):
        super().__init__(f"{reason} at position {position} in {text!r}")
        self.text = text
        self.position = position
        self.reason = reason


@dataclass(frozen=True)
class GroupLiteral:
    user_orders: tuple[int, ...]
    group: FiniteAbelianGroup
    # for each user coordinate: list of (canonical index, modulus)
    parts: tuple[tuple[tuple[int, int], ...], ...]

    def to_canonical(self, coords) -> tuple[int, ...]:
        if len(coords) != len(self.user_orders):
            raise ValueError(f"expected {len(self.user_orders)} coordinates, got {len(coords)}")
        out = [0] * self.group.rank
        for x, parts in zip(coords, self.parts):
            for idx, mod in parts:
                out[idx] = x % mod
        return tuple(out)

    def from_canonical(self, coords) -> tuple[int, ...]:
        out = []
        for n, parts in zip(self.user_orders, self.parts):
            x, m = 0, 1
            for idx, mod in parts:
                # combine x mod m with coords[idx] mod mod
                t = (coords[idx] - x) * pow(m, -1, mod) % mod if mod > 1 else 0
                x, m = x + m * t, m * mod
            out.append(x % n)
        return tuple(out)

    def literal(self) -> str:
        return "+".join(f"Z{n}" for n in self.user_orders) if self.user_orders else "0"

    def element_literal(self, coords) -> str:
        return "(" + ",".join(map(str, self.from_canonical(coords))) + ")"

    def subgroup_literal(self, S: Subgroup) -> str:
        gens = [self.from_canonical(g.coords) for g in S.generators()]
        return "gens[" + ";".join("(" + ",".join(map(str, g)) + ")" for g in gens) + "]"


_GROUP_RE = re.compile(r"Z(\d+)")


def parse_group(text: str) -> GroupLiteral:
    s = text.strip()
    if s in ("0", ""):
        if s == "":
            raise LiteralError(text, 0, "empty group literal")
        return GroupLiteral((), FiniteAbelianGroup(()), ())
    orders = []
    pos = 0
    for i, chunk in enumerate(s.split("+")):
        m = _GROUP_RE.fullmatch(chunk.strip())
        if not m:
            raise LiteralError(text, pos, f"expected Z<n>, got {chunk!r}")
        n = int(m.group(1))
        if n < 2:
            raise LiteralError(text, pos, "cyclic orders must be >= 2")
        orders.append(n)
        pos += len(chunk) + 1
    pieces = []          # (prime, exponent, order, user index)
    for u, n in enumerate(orders):
        for p, e in factorize(n):
            pieces.append((p, -e, p**e, u))
    pieces.sort(key=lambda t: (t[0], t[1], t[3]))
    G = FiniteAbelianGroup([q for _, _, q, _ in pieces])
    parts = [[] for _ in orders]
    for idx, (_, _, q, u) in enumerate(pieces):
        parts[u].append((idx, q))
    assert tuple(q for _, _, q, _ in pieces) == G.factors
    return GroupLiteral(tuple(orders), G, tuple(tuple(p) for p in parts))


_INT = r"-?\d+"
_TUPLE_RE = re.compile(r"\(\s*(" + _INT + r"(?:\s*,\s*" + _INT + r")*)?\s*\)")


def _parse_tuples(text: str, body: str, offset: int, number=int):
    """Tuples separated by ``;`` (or ``,``) inside ``body``."""
    out = []
    pos = 0
    body_stripped = body.strip()
    if not body_stripped:
        return out
    pattern = re.compile(r"\s*\(([^()]*)\)\s*([;,]|$)")
    while pos < len(body):
        m = pattern.match(body, pos)
        if not m:
            raise LiteralError(text, offset + pos, "expected a parenthesised tuple")
        inner = m.group(1).strip()
        try:
            vals = tuple(number(x.strip()) for x in inner.split(",")) if inner else ()
        except (ValueError, ZeroDivisionError):
            raise LiteralError(text, offset + pos, f"bad number in ({inner})") from None
        out.append(vals)
        pos = m.end()
        if m.group(2) == "" and pos < len(body):
            raise LiteralError(text, offset + pos, "trailing characters")
    return out


def parse_element(G: GroupLiteral, text: str) -> tuple[int, ...]:
    s = text.strip()
    tuples = _parse_tuples(text, s, 0)
    if len(tuples) != 1:
        raise LiteralError(text, 0, "expected one tuple")
    if len(tuples[0]) != len(G.user_orders):
        raise LiteralError(text, 0, f"expected {len(G.user_orders)} coordinates")
    return G.to_canonical(tuples[0])


def parse_subgroup(G: GroupLiteral, text: str) -> Subgroup:
    s = text.strip()
    m = re.fullmatch(r"gens\[(.*)\]", s, flags=re.S)
    if not m:
        raise LiteralError(text, 0, "expected gens[...]")
    tuples = _parse_tuples(text, m.group(1), 5)
    for i, t in enumerate(tuples):
        if len(t) != len(G.user_orders):
            raise LiteralError(text, 5, f"generator {i} has {len(t)} coordinates, "
                                        f"expected {len(G.user_orders)}")
    return G.group.subgroup([G.to_canonical(t) for t in tuples])


# -- modules ------------------------------------------------------------------------

@dataclass(frozen=True)
class ModuleLiteral:
    kind: str            # "Q", "Qp" or "Zp"
    rank: int
    p: int | None = None
    N: int | None = None

    def literal(self) -> str:
        if self.kind == "Q":
            return f"Q^{self.rank}"
        if self.kind == "Qp":
            return f"Qp({self.p})^{self.rank}"
        return f"Zp({self.p},N={self.N})^{self.rank}"


def parse_module(text: str) -> ModuleLiteral:
    s = text.strip().replace(" ", "")
    for pattern, kind in ((r"Q\^(\d+)", "Q"), (r"Qp\((\d+)\)\^(\d+)", "Qp"),
                          (r"Zp\((\d+),N=(\d+)\)\^(\d+)", "Zp")):
        m = re.fullmatch(pattern, s)
        if m:
            g = [int(x) for x in m.groups()]
            if kind == "Q":
                return ModuleLiteral("Q", g[0])
            if kind == "Qp":
                return ModuleLiteral("Qp", g[1], p=g[0])
            return ModuleLiteral("Zp", g[2], p=g[0], N=g[1])
    raise LiteralError(text, 0, "expected Q^n, Qp(p)^n or Zp(p,N=k)^n")


def parse_rows(text: str, m: int | None = None, rational: bool = True):
    """Row list ``[(1,0);(0,1/3)]`` (``,`` also separates rows)."""
    s = text.strip()
    mm = re.fullmatch(r"\[(.*)\]", s, flags=re.S)
    if not mm:
        raise LiteralError(text, 0, "expected [ ... ]")
    rows = _parse_tuples(text, mm.group(1), 1, Fraction if rational else int)
    if m is not None:
        for i, r in enumerate(rows):
            if len(r) != m:
                raise LiteralError(text, 1, f"row {i} has length {len(r)}, expected {m}")
    return [list(r) for r in rows]


def rows_literal(rows, prefix: str = "span") -> str:
    return prefix + "{" + ";".join("(" + ",".join(str(x) for x in r) + ")" for r in rows) + "}"


def parse_span(text: str):
    """Inverse of :func:`rows_literal`."""
    s = text.strip()
    m = re.fullmatch(r"span\{(.*)\}", s, flags=re.S)
    if not m:
        raise LiteralError(text, 0, "expected span{...}")
    return [list(r) for r in _parse_tuples(text, m.group(1), 5, Fraction)]


# -- rings ---------------------------------------------------------------------------

@dataclass(frozen=True)
class RingLiteral:
    kind: str                 # "Zn", "Mat", "prod", "End"
    args: tuple

    def literal(self) -> str:
        if self.kind == "Zn":
            return f"Zn({self.args[0]})"
        if self.kind == "Mat":
            return f"Mat({self.args[0]},Zn({self.args[1]}))"
        if self.kind == "End":
            return f"End({self.args[0]})"
        return "prod[" + ";".join(a.literal() for a in self.args) + "]"

    def build(self):
        from . import rings
        if self.kind == "Zn":
            return rings.zn(self.args[0])
        if self.kind == "Mat":
            return rings.mat_ring(self.args[0], self.args[1])
        if self.kind == "End":
            return rings.end_ring(parse_group(self.args[0]).group)
        return rings.product_ring([a.build() for a in self.args])


def parse_ring(text: str) -> RingLiteral:
    lit, pos = _ring_at(text, text.replace(" ", ""), 0)
    if pos != len(text.replace(" ", "")):
        raise LiteralError(text, pos, "trailing characters")
    return lit


def _ring_at(orig, s, pos):
    m = re.compile(r"Zn\((\d+)\)").match(s, pos)
    if m:
        n = int(m.group(1))
        if n < 1:
            raise LiteralError(orig, pos, "n must be >= 1")
        return RingLiteral("Zn", (n,)), m.end()
    m = re.compile(r"Mat\((\d+),Zn\((\d+)\)\)").match(s, pos)
    if m:
        return RingLiteral("Mat", (int(m.group(1)), int(m.group(2)))), m.end()
    m = re.compile(r"End\(([^()]*)\)").match(s, pos)
    if m:
        parse_group(m.group(1))
        return RingLiteral("End", (m.group(1),)), m.end()
    if s.startswith("prod[", pos):
        pos += 5
        items = []
        if s.startswith("]", pos):
            return RingLiteral("prod", ()), pos + 1
        while True:
            item, pos = _ring_at(orig, s, pos)
            items.append(item)
            if s.startswith(";", pos):
                pos += 1
                continue
            if s.startswith("]", pos):
                return RingLiteral("prod", tuple(items)), pos + 1
            raise LiteralError(orig, pos, "expected ';' or ']'")
    raise LiteralError(orig, pos, "expected Zn(n), Mat(k,Zn(n)), prod[...] or End(group)")
