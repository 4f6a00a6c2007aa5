"""Rank-1 torsion-free groups ``G`` and perspectivity of ``G (+) G``.

A rank-1 group enters the criterion only through which integers ``x``
satisfy ``xG = G``: exactly those whose prime support lies in the set of
primes at which ``G`` is divisible.  A type is therefore that set, finite
(``div{...}``) or cofinite (``codiv{...}``).

With ``F = Ra (+) Rb``, ``A = R(ma+nb)``, ``C = R(ka+tb)`` and
``U = R(sa+lb)`` for coprime ``s, l``, ``U`` complements both iff
``(ml-sn)G = G`` and ``(kl-st)G = G``.
"""

from __future__ import annotations

import json
import math
import re
from dataclasses import dataclass, field
from itertools import product

from .arith import factorize, is_prime
from .errors import PreconditionError

DEFAULT_BOUNDS = {"param_bound": 50, "witness_bound": 5000, "exponent_bound": 12}


@dataclass(frozen=True)
class RationalGroupType:
    """Primes of infinite height: ``primes`` itself, or its complement when ``cofinite``."""

    primes: frozenset
    cofinite: bool = False

    def __post_init__(self):
        for p in self.primes:
            if not is_prime(p):
                raise PreconditionError(f"{p} is not prime")

    @classmethod
    def div(cls, *primes) -> "RationalGroupType":
        return cls(frozenset(primes), False)

    @classmethod
    def codiv(cls, *primes) -> "RationalGroupType":
        return cls(frozenset(primes), True)

    @classmethod
    def all(cls) -> "RationalGroupType":
        return cls(frozenset(), True)

    def divisible_by(self, p: int) -> bool:
        return (p in self.primes) != self.cofinite

    @property
    def excluded(self) -> frozenset:
        """Primes of finite height, when there are finitely many."""
        if not self.cofinite:
            raise PreconditionError("a finite divisibility set excludes infinitely many primes")
        return self.primes

    def literal(self) -> str:
        if self.cofinite and not self.primes:
            return "all"
        inner = ",".join(str(p) for p in sorted(self.primes))
        return f"{'codiv' if self.cofinite else 'div'}{{{inner}}}"

    @classmethod
    def parse(cls, text: str) -> "RationalGroupType":
        text = text.strip().replace(" ", "")
        if text == "all":
            return cls.all()
        m = re.fullmatch(r"(div|codiv)\{([0-9,]*)\}", text)
        if not m:
            raise ValueError(f"bad type literal {text!r}")
        primes = [int(x) for x in m.group(2).split(",") if x]
        for p in primes:
            if not is_prime(p):
                raise ValueError(f"{p} is not prime")
        return cls(frozenset(primes), m.group(1) == "codiv")

    def __str__(self):
        return self.literal()


def x_divides(G: RationalGroupType, x: int) -> bool:
    """``xG = G``: every prime factor of ``|x|`` has infinite height."""
    if x == 0:
        raise PreconditionError("x must be nonzero")
    return all(G.divisible_by(p) for p, _ in factorize(abs(x)))


def _divides_or_false(G, x):
    return x != 0 and x_divides(G, x)


def verify_summand_pair(G: RationalGroupType, m, n, k, t, s, l) -> bool:
    """``U = R(sa+lb)`` complements ``R(ma+nb)`` and ``R(ka+tb)``."""
    if (m, n) == (0, 0) or (k, t) == (0, 0):
        raise PreconditionError("summand generators must be nonzero")
    if (s, l) == (0, 0):
        raise PreconditionError("s and l must not both vanish")
    if math.gcd(s, l) != 1:
        raise PreconditionError(f"gcd({s}, {l}) != 1")
    return _divides_or_false(G, m * l - s * n) and _divides_or_false(G, k * l - s * t)


def necessary_condition(G: RationalGroupType) -> bool:
    """False when ``G`` is divisible by no prime (then ``G (+) G`` is not perspective)."""
    return G.cofinite or bool(G.primes)


def valid_quadruple(m, n, k, t) -> bool:
    """Shape of the summand pairs the criterion quantifies over."""
    if m < 1 or n < 1 or math.gcd(m, n) != 1 or k < 0 or t < 0:
        return False
    if k == 0 and t == 0:
        return False
    if k == 0 or t == 0:
        return k + t == 1
    return math.gcd(k, t) == 1


def criterion_case(G: RationalGroupType, m, n, k, t) -> int | None:
    """Which of the four families the quadruple belongs to (``None``: none)."""
    md, nd = x_divides(G, m), x_divides(G, n)
    if not md and (k, t) == (1, 0):
        return 1
    if not nd and (k, t) == (0, 1):
        return 2
    if not md and t != 0 and not x_divides(G, t):
        return 3
    if not md and not nd:
        return 4
    return None


@dataclass
class GPlusGVerdict:
    status: str                     # "Perspective", "NotPerspective" or "Unknown"
    type: str
    certificate: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {"status": self.status, "type": self.type, "certificate": self.certificate}

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True)


# -- witnesses for cofinite types -------------------------------------------------------

_TABLE = {
    # column: divisibility of (m, n, k, t); True means xG = G
    1: (1, 1, 1, 1), 2: (1, 1, 1, 0), 3: (1, 1, 0, 1), 4: (1, 1, 0, 0),
    5: (1, 0, 1, 1), 6: (0, 1, 1, 1), 7: (0, 0, 0, 0), 8: (0, 0, 0, 1),
    9: (0, 0, 1, 1), 10: (1, 0, 1, 0), 11: (0, 1, 1, 0), 12: (0, 1, 0, 1),
}
_COLUMN = {v: k for k, v in _TABLE.items()}


def table_column(G: RationalGroupType, m, n, k, t) -> int | None:
    pattern = tuple(int(x_divides(G, x)) for x in (m, n, k, t))
    return _COLUMN.get(pattern)


def _table_candidates(col, p, q, m, n, k, t):
    """Witnesses prescribed by the case table, as ``(subcase, (s, l))``.

    Columns 3, 5, 6, 9 and 12 come from checked columns by the symmetries
    ``a <-> b`` (swap ``m, n``, ``k, t`` and ``s, l``) and ``A <-> C``
    (swap ``(m, n)`` with ``(k, t)``); the primes ``p, q`` enter
    symmetrically, so both orientations are offered.
    """
    d = lambda x, y: y % x == 0
    out = []
    if col in (1, 2, 5, 10):
        out.append((f"{col}", (0, 1)))
    if col in (3, 6, 12):
        out.append((f"{col}", (1, 0)))
    for P, Q in ((p, q), (q, p)):
        if col == 4:
            if d(P, k) and d(Q, t) and not d(Q, k) and not d(P, t):
                out.append(("4", (Q, P)))
        if col == 9:
            if d(P, m) and d(Q, n) and not d(Q, m) and not d(P, n):
                out.append(("9", (Q, P)))
        if col == 7:
            if d(P, m) and d(P, t) and d(Q, n) and d(Q, k):
                out.append(("7a", (1, 1)))
            if d(P, m) and d(P, k) and d(Q, n) and d(Q, t):
                out.append(("7b", (Q, P)))
        if col == 8 and d(P, m) and d(P, k) and d(Q, n):
            out.append(("8a", (Q, 1)) if not d(Q, k) else ("8b", (1, 1)))
        if col == 11:
            if d(Q, m) and d(Q, t) and not d(P, m) and not d(P, t):
                out.append(("11a", (P, 1)))
            if d(P, m) and d(Q, m) and d(P, t) and d(Q, t):
                out.append(("11b", (1, 1)))
            if not d(P, m) and d(Q, m) and not d(Q, t) and d(P, t):
                out.append(("11c", (P, Q)))
    return out


def crt_witness(G: RationalGroupType, m, n, k, t, limit: int = 10**6):
    """Coprime ``(s, l)`` with ``ml-sn`` and ``kl-st`` free of the excluded primes.

    Modulo each excluded prime the two conditions remove two lines through
    the origin of ``F_p^2``, leaving at least one point off both lines; the
    points are glued by the Chinese remainder theorem and ``l`` is moved
    along its residue class until ``gcd(s, l) = 1``.
    """
    E = sorted(G.excluded)
    P = math.prod(E)
    s0 = l0 = 0
    mod = 1
    for p in E:
        point = next(((s, l) for s, l in product(range(p), repeat=2)
                      if (m * l - s * n) % p and (k * l - s * t) % p), None)
        if point is None:
            raise PreconditionError(f"no admissible residue modulo {p}")
        s0 = _crt(s0, mod, point[0], p)
        l0 = _crt(l0, mod, point[1], p)
        mod *= p
    s = s0 if s0 else P
    for j in range(limit):
        for l in (l0 + j * P, l0 - j * P):
            if math.gcd(s, l) == 1 and m * l - s * n and k * l - s * t:
                return s, l
    raise AssertionError("coprime lift not found")


def _crt(a, m, b, p):
    x = (b - a) * pow(m, -1, p) % p
    return a + m * x


def witness_U(G: RationalGroupType, m, n, k, t) -> dict:
    """``(s, l)`` such that ``R(sa+lb)`` is a common complement, with provenance."""
    if not G.cofinite:
        raise PreconditionError("witnesses are only constructed for cofinite types")
    if len(G.excluded) > 2:
        raise PreconditionError("at most two primes of finite height are supported")
    if not valid_quadruple(m, n, k, t):
        raise PreconditionError(f"({m},{n},{k},{t}) violates the quadruple conditions")
    E = sorted(G.excluded)
    if len(E) == 2 and 0 not in (m, n, k, t):
        p, q = E
        col = table_column(G, m, n, k, t)
        if col is not None:
            for sub, (s, l) in _table_candidates(col, p, q, m, n, k, t):
                if math.gcd(s, l) == 1 and verify_summand_pair(G, m, n, k, t, s, l):
                    return {"s": s, "l": l, "column": col, "subcase": sub, "source": "table"}
    s, l = crt_witness(G, m, n, k, t)
    assert verify_summand_pair(G, m, n, k, t, s, l)
    col = table_column(G, m, n, k, t) if len(E) == 2 and 0 not in (m, n, k, t) else None
    return {"s": s, "l": l, "column": col,
            "subcase": None, "source": "crt"}


# -- refutations for finite types ---------------------------------------------------------

def _strip(x: int, primes) -> int:
    for p in primes:
        while x % p == 0:
            x //= p
    return x


def _unit_subgroup(mod: int, primes) -> set[int]:
    """The subgroup of ``(Z/mod)^*`` generated by ``-1`` and the given primes."""
    gens = [(-1) % mod] + [p % mod for p in primes]
    H = {1 % mod}
    frontier = list(H)
    while frontier:
        x = frontier.pop()
        for g in gens:
            y = x * g % mod
            if y not in H:
                H.add(y)
                frontier.append(y)
    return H


def residue_refutation(G: RationalGroupType, m, n, k, t) -> dict | None:
    """Certificate that no coprime ``(s, l)`` works, for families 1 and 2.

    Family 1 (``k, t = 1, 0``): ``l`` and ``ml - sn`` are signed products of
    divisibility primes, so reducing modulo the part ``n'`` of ``n`` prime to
    those primes puts ``m`` in ``H = <-1, primes>`` of ``(Z/n')^*``.  Family 2
    is the same with the roles of ``m`` and ``n`` exchanged.
    """
    if G.cofinite:
        return None
    S = sorted(G.primes)
    if (k, t) == (1, 0) and not x_divides(G, m):
        x, mod = m, _strip(n, S)
    elif (k, t) == (0, 1) and not x_divides(G, n):
        x, mod = n, _strip(m, S)
    else:
        return None
    if mod <= 1:
        return None
    H = _unit_subgroup(mod, S)
    if x % mod in H:
        return None
    return {"quadruple": [m, n, k, t], "modulus": mod, "residue": x % mod,
            "subgroup": sorted(H)}


def replay_residue_certificate(G: RationalGroupType, cert: dict) -> bool:
    m, n, k, t = cert["quadruple"]
    again = residue_refutation(G, m, n, k, t)
    return again is not None and again["modulus"] == cert["modulus"] and \
        again["residue"] not in set(again["subgroup"])


def sweep_refutes(G: RationalGroupType, m, n, k, t, bound: int) -> bool:
    """No coprime ``(s, l)`` with ``|s|, |l| <= bound`` satisfies both conditions."""
    for s in range(-bound, bound + 1):
        for l in range(-bound, bound + 1):
            if (s or l) and math.gcd(s, l) == 1 and \
                    _divides_or_false(G, m * l - s * n) and _divides_or_false(G, k * l - s * t):
                return False
    return True


def gplusg_decide(G: RationalGroupType, bounds: dict | None = None) -> GPlusGVerdict:
    b = dict(DEFAULT_BOUNDS)
    b.update(bounds or {})
    for key, v in b.items():
        if v < 0 or (key != "exponent_bound" and v == 0):
            raise PreconditionError(f"bound {key} must be positive")
    lit = G.literal()
    if G.cofinite:
        E = sorted(G.primes)
        strategy = "every xG=G" if not E else (
            "case table with verified witnesses, residue lift otherwise" if len(E) <= 2
            else "residue lift: per excluded prime avoid two lines mod p, glue by CRT")
        return GPlusGVerdict("Perspective", lit, {"strategy": strategy, "excluded": E})
    if not G.primes:
        cert = residue_refutation(G, 2, 5, 1, 0)
        return GPlusGVerdict("NotPerspective", lit, {"kind": "residue", **cert})
    P = b["param_bound"]
    for m in range(1, P + 1):
        for n in range(1, P + 1):
            if math.gcd(m, n) != 1:
                continue
            for k, t in ((1, 0), (0, 1)):
                cert = residue_refutation(G, m, n, k, t)
                if cert is not None:
                    return GPlusGVerdict("NotPerspective", lit, {"kind": "residue", **cert})
    return GPlusGVerdict("Unknown", lit, {"exhausted": b})


def example_11_refute(G: RationalGroupType, exponent_bound: int = DEFAULT_BOUNDS["exponent_bound"]) -> GPlusGVerdict:
    """The last-digit argument for ``G`` divisible exactly by 11.

    With ``(m, n, k, t) = (5, 2, 0, 1)`` the conditions read ``s = +-11^b`` and
    ``5l - 2s = +-11^a``.  Coprimality of ``s, l`` forces ``a = 0`` or ``b = 0``,
    and both branches fail modulo 10.
    """
    if G.cofinite or G.primes != frozenset({11}):
        if G.divisible_by(2) or G.divisible_by(5):
            raise PreconditionError("requires 2G != G and 5G != G")
        raise PreconditionError("requires a type divisible exactly by 11")
    powers = _power_residues(11, 10)
    five_l = {5 * l % 10 for l in range(10)}
    # b = 0: s = +-1, so 5l -+ 2 = +-11^a
    lhs_b0 = {(x + e) % 10 for x in five_l for e in (2, -2)}
    rhs_b0 = {(sg * r) % 10 for r in powers for sg in (1, -1)}
    # a = 0: 5l -+ 1 = +-2 * 11^b
    lhs_a0 = {(x + e) % 10 for x in five_l for e in (1, -1)}
    rhs_a0 = {(sg * 2 * r) % 10 for r in powers for sg in (1, -1)}
    if lhs_b0 & rhs_b0 or lhs_a0 & rhs_a0:
        raise AssertionError("residue argument does not close")
    sweep_ok = _sweep_11(exponent_bound)
    cert = {
        "kind": "residue mod 10",
        "quadruple": [5, 2, 0, 1],
        "equations": {"s": "±11^b", "ml-sn": "5l-2s=±11^a"},
        "both_positive": "11 divides s and l, contradicting gcd(s,l)=1",
        "branch_b0": {"lhs": sorted(lhs_b0), "rhs": sorted(rhs_b0)},
        "branch_a0": {"lhs": sorted(lhs_a0), "rhs": sorted(rhs_a0)},
        "exponent_sweep": {"bound": exponent_bound, "solutions": 0 if sweep_ok else None},
    }
    return GPlusGVerdict("NotPerspective", G.literal(), cert)


def _power_residues(base, mod):
    seen, x = [], 1 % mod
    while x not in seen:
        seen.append(x)
        x = x * base % mod
    return seen


def _sweep_11(bound: int) -> bool:
    """No exponents ``a, b <= bound`` and signs give an integer ``l`` coprime to ``s``."""
    for a in range(bound + 1):
        for b in range(bound + 1):
            for e1, e2 in product((1, -1), repeat=2):
                s = e2 * 11**b
                num = e1 * 11**a + 2 * s
                if num % 5 == 0 and math.gcd(s, num // 5) == 1:
                    return False
    return True


def z2_lattice_sweep(bound: int = 1000) -> int:
    """Number of ``(s, l)`` with ``|s|, |l| <= bound`` complementing ``(2,5)`` and ``(1,0)`` in Z^2.

    ``Z(s,l)`` complements ``Z(x,y)`` iff ``det [[x, y], [s, l]] = +-1``.
    """
    import numpy as np
    s = np.arange(-bound, bound + 1, dtype=np.int64)[:, None]
    l = np.arange(-bound, bound + 1, dtype=np.int64)[None, :]
    ok = (np.abs(2 * l - 5 * s) == 1) & (np.abs(l) == 1)
    return int(ok.sum())
