"""Direct summands: detection, enumeration, diagonals and the brute-force oracle.

Everything in this module is exhaustive and meant as ground truth for the
constructive algorithms in :mod:`perspectra.pgroups`.  Searches run over the
canonically ordered subgroup list of the ambient group, so witnesses are
deterministic.
"""

from __future__ import annotations

import time
from collections import defaultdict
from dataclasses import dataclass, field
from functools import lru_cache

from . import caps
from .abelian import (FiniteAbelianGroup, GroupError, Homomorphism, Subgroup,
                      is_direct_sum, is_pure)
from .errors import PreconditionError
from .normal_forms import hnf_reduce


@dataclass(frozen=True)
class SummandWitness:
    subgroup: Subgroup
    complement: Subgroup


@dataclass
class PerspectivityReport:
    group: str
    status: str                      # "perspective" or "counterexample"
    pairs_checked: int = 0
    counterexample: tuple[Subgroup, Subgroup] | None = None
    witness_counts: dict = field(default_factory=dict)
    elapsed_ms: float = 0.0

    def to_json(self) -> dict:
        out = {"group": self.group, "status": self.status,
               "pairs_checked": self.pairs_checked,
               "elapsed_ms": round(self.elapsed_ms, 3)}
        if self.counterexample is not None:
            out["counterexample"] = [S.literal() for S in self.counterexample]
        if self.witness_counts:
            out["witness_counts"] = {str(k): v for k, v in sorted(self.witness_counts.items())}
        return out


# -- subgroup enumeration ------------------------------------------------------

def _divisors_of_prime_power(d: int) -> list[int]:
    out = [1]
    p = next(q for q in range(2, d + 1) if d % q == 0)
    while out[-1] < d:
        out.append(out[-1] * p)
    return out


def _hnf_bases(G: FiniteAbelianGroup):
    """All Hermite bases of lattices between ``diag(d) Z^r`` and ``Z^r``.

    Rows are chosen from the bottom up.  Row ``i`` has pivot ``h | d_i`` and
    entries below the later pivots; it is admissible when ``(d_i/h) * row``
    reduces to zero against the rows already chosen, i.e. ``d_i e_i`` lies in
    the lattice.
    """
    r = G.rank
    d = G.factors
    rows: list[tuple[int, ...] | None] = [None] * r

    def tail_basis(i):
        return [rows[j] for j in range(i + 1, r)]

    def reduces(vec, i):
        v = list(vec)
        for j in range(i + 1, r):
            h = rows[j][j]
            if v[j] % h:
                return False
            q = v[j] // h
            if q:
                for k in range(j, r):
                    v[k] -= q * rows[j][k]
        return not any(v)

    def rec(i):
        if i < 0:
            yield tuple(rows)
            return
        for h in _divisors_of_prime_power(d[i]):
            c = d[i] // h
            ranges = [range(rows[j][j]) for j in range(i + 1, r)]
            for tail in _product(ranges):
                vec = [0] * r
                for j, x in zip(range(i + 1, r), tail):
                    vec[j] = c * x
                if not reduces(vec, i):
                    continue
                rows[i] = tuple([0] * i + [h] + list(tail))
                yield from rec(i - 1)
        rows[i] = None

    if r == 0:
        yield ()
        return
    yield from rec(r - 1)


def _product(ranges):
    if not ranges:
        yield ()
        return
    first, rest = ranges[0], ranges[1:]
    for x in first:
        for t in _product(rest):
            yield (x,) + t


@lru_cache(maxsize=64)
def enumerate_subgroups(G: FiniteAbelianGroup) -> tuple[Subgroup, ...]:
    """Every subgroup of ``G``, in canonical order (order, then Hermite basis)."""
    caps.require("subgroups", G.order, "subgroup enumeration")
    subs = [Subgroup(G, basis) for basis in _hnf_bases(G)]
    subs.sort()
    return tuple(subs)


class ElementIndex:
    """Mixed-radix numbering of group elements, for bitset subgroup tests."""

    def __init__(self, G: FiniteAbelianGroup):
        caps.require("enumerate", G.order, "element enumeration")
        self.group = G
        strides = []
        s = 1
        for d in reversed(G.factors):
            strides.append(s)
            s *= d
        self.strides = tuple(reversed(strides))

    def index(self, coords) -> int:
        return sum(c * s for c, s in zip(coords, self.strides))

    def mask(self, S: Subgroup) -> int:
        m = 0
        for x in S.elements():
            m |= 1 << self.index(x.coords)
        return m


@lru_cache(maxsize=64)
def _lattice(G: FiniteAbelianGroup):
    idx = ElementIndex(G)
    subs = enumerate_subgroups(G)
    by_order = defaultdict(list)
    for S in subs:
        by_order[S.order].append((S, idx.mask(S)))
    return idx, by_order


def _direct_by_mask(mask_a: int, order_a: int, mask_u: int, order_u: int, n: int) -> bool:
    return order_a * order_u == n and (mask_a & mask_u) == 1


# -- summands --------------------------------------------------------------------

def is_summand(G: FiniteAbelianGroup, S: Subgroup) -> Subgroup | None:
    """Some complement ``T`` with ``G = S (+) T``, or ``None``.

    Pure subgroups get a constructive complement (the socle-layer algorithm
    with ``A = C = S``), verified before it is returned; otherwise the
    subgroups of order ``|G|/|S|`` are searched exhaustively.
    """
    if S.group != G:
        raise GroupError("subgroup outside the ambient group")
    if S.order == G.order:
        return G.trivial()
    if S.order == 1:
        return G.whole()
    if is_pure(S):
        from .pgroups import finite_common_complement
        T = finite_common_complement(G, S, S, check=False, fallback=False)
        if is_direct_sum(G, [S, T]):
            return T
    idx, by_order = _lattice(G)
    ms = idx.mask(S)
    for T, mt in by_order.get(G.order // S.order, ()):
        if _direct_by_mask(ms, S.order, mt, T.order, G.order):
            return T
    return None


def enumerate_summands(G: FiniteAbelianGroup, with_complements: bool = True) -> list[SummandWitness]:
    """Every direct summand once, with one complement each (canonical order)."""
    out = []
    for S in enumerate_subgroups(G):
        if not is_pure(S):
            continue
        T = is_summand(G, S) if with_complements else None
        if with_complements and T is None:
            continue
        out.append(SummandWitness(S, T))
    return out


def summand_classes(G: FiniteAbelianGroup) -> dict[tuple, list[Subgroup]]:
    """Summands grouped by isomorphism type."""
    classes = defaultdict(list)
    for S in enumerate_subgroups(G):
        if is_pure(S):
            classes[S.iso_invariants()].append(S)
    return dict(classes)


# -- diagonals ---------------------------------------------------------------------

def diagonal(G: FiniteAbelianGroup, H: Subgroup, K: Subgroup, delta: Homomorphism) -> Subgroup:
    """``D = {x + delta(x) : x in H}`` for ``delta`` an isomorphism ``H -> K``."""
    if not is_direct_sum(G, [H, K]):
        raise PreconditionError("G is not the direct sum of H and K")
    if delta.source != G or delta.target != G:
        raise PreconditionError("delta must be an endomorphism of G")
    if not delta.restricted_is_injective(H):
        raise PreconditionError("delta is not injective on H (kernel nonzero)")
    if delta.image(H) != K:
        raise PreconditionError("delta does not map H onto K (image proper)")
    D = G.subgroup([x + delta(x) for x in H.generators()])
    assert is_direct_sum(G, [H, D]) and is_direct_sum(G, [K, D])
    return D


def is_diagonal(G: FiniteAbelianGroup, H: Subgroup, K: Subgroup, D: Subgroup) -> bool:
    return ((D + H).order == G.order == (D + K).order
            and (D & H).is_trivial() and (D & K).is_trivial())


def diagonal_inverse(G: FiniteAbelianGroup, H: Subgroup, K: Subgroup, D: Subgroup) -> Homomorphism:
    """The isomorphism ``delta: H -> K`` with ``D = D(delta)``, extended by 0 on ``K``.

    For ``h`` in ``H`` write ``h = d + k`` along ``G = D (+) K``; then
    ``d = h - k`` so ``delta(h) = -k``.
    """
    if not is_direct_sum(G, [H, K]):
        raise PreconditionError("G is not the direct sum of H and K")
    if not is_diagonal(G, H, K, D):
        raise PreconditionError("D is not a diagonal with respect to H and K")
    columns = []
    for e in G.gens():
        h, _ = H.decompose(e, K)
        _, k = D.decompose(h, K)
        columns.append((-k).coords)
    matrix = [[col[i] for col in columns] for i in range(G.rank)]
    return Homomorphism(G, G, matrix)


# -- brute-force common complements ------------------------------------------------

def common_complement_bruteforce(G: FiniteAbelianGroup, A: Subgroup, C: Subgroup) -> Subgroup | None:
    """First ``U`` in canonical order with ``G = A (+) U = C (+) U``.

    ``None`` is a proof that no common complement exists.
    """
    if A.iso_invariants() != C.iso_invariants():
        raise PreconditionError("A and C are not isomorphic; no common complement can exist")
    idx, by_order = _lattice(G)
    ma, mc = idx.mask(A), idx.mask(C)
    for U, mu in by_order.get(G.order // A.order, ()):
        if (ma & mu) == 1 and (mc & mu) == 1:
            return U
    return None


def count_common_complements(G: FiniteAbelianGroup, A: Subgroup, C: Subgroup) -> int:
    idx, by_order = _lattice(G)
    ma, mc = idx.mask(A), idx.mask(C)
    return sum(1 for _, mu in by_order.get(G.order // A.order, ())
               if (ma & mu) == 1 and (mc & mu) == 1)


def restrict_complement(G: FiniteAbelianGroup, H: Subgroup, S: Subgroup, L: Subgroup,
                        M: Subgroup) -> Subgroup:
    """``M & H``, a common complement of ``S`` and ``L`` inside ``H``."""
    if is_summand(G, H) is None:
        raise PreconditionError("H is not a summand of G")
    if not (S <= H and L <= H):
        raise PreconditionError("S and L must lie in H")
    if not is_direct_sum(G, [S, M]):
        raise PreconditionError("G = S (+) M fails")
    if not is_direct_sum(G, [L, M]):
        raise PreconditionError("G = L (+) M fails")
    N = M & H
    assert is_direct_sum_in(H, [S, N]) and is_direct_sum_in(H, [L, N])
    return N


def is_direct_sum_in(H: Subgroup, parts) -> bool:
    """``H = P_1 (+) ... (+) P_k`` for subgroups of a common ambient group."""
    total = H.group.trivial()
    size = 1
    for P in parts:
        total = total + P
        size *= P.order
    return size == H.order and total == H


def is_perspective_bruteforce(G: FiniteAbelianGroup, stats: bool = False) -> PerspectivityReport:
    """Check every unordered pair of distinct isomorphic summands exhaustively."""
    caps.require("sweep", G.order, "perspectivity sweep")
    start = time.perf_counter()
    report = PerspectivityReport(group=G.literal(), status="perspective")
    idx, by_order = _lattice(G)
    masks = {S: m for subs in by_order.values() for S, m in subs}
    for iso, members in sorted(summand_classes(G).items()):
        if len(members) < 2:
            continue
        candidates = by_order[G.order // members[0].order]
        for i, A in enumerate(members):
            ma = masks[A]
            for C in members[i + 1:]:
                mc = masks[C]
                report.pairs_checked += 1
                if stats:
                    n = sum(1 for _, mu in candidates if (ma & mu) == 1 and (mc & mu) == 1)
                    report.witness_counts[n] = report.witness_counts.get(n, 0) + 1
                    found = n > 0
                else:
                    found = any((ma & mu) == 1 and (mc & mu) == 1 for _, mu in candidates)
                if not found:
                    report.status = "counterexample"
                    report.counterexample = (A, C)
                    report.elapsed_ms = (time.perf_counter() - start) * 1e3
                    return report
    report.elapsed_ms = (time.perf_counter() - start) * 1e3
    return report
