"""Constructive common complements in finite abelian groups.

The work happens in socles.  For a finite p-group ``G`` of exponent ``p^n``
put ``S_e = (p^(e-1) G)[p]``.  If ``A`` is a summand then ``A[p] & S_e`` is
``(p^(e-1) A)[p]``, and a subgroup ``U = (+) <u_j>`` with ``u_j`` of order
``p^(e_j)`` satisfies ``G = A (+) U`` as soon as the socle vectors
``p^(e_j - 1) u_j`` complement ``A[p]`` and the orders multiply to ``|G|``.
So it suffices to pick socle vectors layer by layer, top exponent first,
that complement both ``A[p] & S_e`` and ``C[p] & S_e`` - an F_p problem per
layer - and lift each one to an element of the matching order.

Mixed groups are split into primary components first; each is fully
invariant, so summands split along them.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field

import numpy as np

from . import fp
from .abelian import FiniteAbelianGroup, Subgroup, is_direct_sum, is_pure
from .arith import is_prime
from .errors import PreconditionError

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class FpSubspace:
    """Subspace of ``F_p^m`` held as a reduced echelon basis."""

    p: int
    m: int
    basis: tuple[tuple[int, ...], ...]

    @classmethod
    def span(cls, p: int, m: int, rows) -> "FpSubspace":
        if not is_prime(p):
            raise PreconditionError(f"{p} is not prime")
        R = fp.rref(fp.as_matrix([[int(x) % p for x in r] for r in rows], m), p)
        return cls(p, m, tuple(tuple(int(x) for x in r) for r in R))

    @property
    def dim(self) -> int:
        return len(self.basis)

    def matrix(self) -> np.ndarray:
        return fp.as_matrix(self.basis, self.m)

    def __add__(self, other: "FpSubspace") -> "FpSubspace":
        return FpSubspace.span(self.p, self.m, self.basis + other.basis)

    def __and__(self, other: "FpSubspace") -> "FpSubspace":
        return FpSubspace.span(self.p, self.m,
                               fp.intersect(self.matrix(), other.matrix(), self.p).tolist())


def fp_common_complement(p: int, m: int, A: FpSubspace, C: FpSubspace) -> FpSubspace:
    """``W`` with ``F_p^m = A (+) W = C (+) W``."""
    if A.dim != C.dim:
        raise PreconditionError(f"dimension mismatch: {A.dim} != {C.dim}")
    V = np.eye(m, dtype=np.int64)
    W, _ = fp.common_complement(V, A.matrix(), C.matrix(), p)
    return FpSubspace.span(p, m, W.tolist())


@dataclass
class ComplementTrace:
    """Which construction fired, layer by layer, with the data to replay it."""

    steps: list[dict] = field(default_factory=list)
    fallback_used: bool = False

    def add(self, case: str, **detail):
        self.steps.append({"case": case, **detail})

    def to_json(self) -> str:
        return json.dumps({"steps": self.steps, "fallback_used": self.fallback_used})

    def replay(self, G: FiniteAbelianGroup) -> Subgroup:
        """Rebuild ``U`` from the recorded lifted generators."""
        gens = []
        for step in self.steps:
            gens.extend(step.get("lifted", ()))
        if self.fallback_used:
            gens = [g for s in self.steps if s["case"] == "fallback" for g in s["generators"]]
        return G.subgroup(gens)


def _p_indices(G: FiniteAbelianGroup, p: int) -> list[int]:
    return G.component_indices(p)


def socle_matrix(S: Subgroup, p: int, idx: list[int]) -> np.ndarray:
    """Rows spanning ``S[p]`` in socle coordinates ``c_i`` of ``c_i p^(d_i - 1) e_i``."""
    G = S.group
    rows = []
    for g in S.socle(p).generators():
        row = []
        for i in idx:
            step = G.factors[i] // p
            row.append((g.coords[i] // step) % p)
        rows.append(row)
    return fp.as_matrix(rows, len(idx))


def _lift(G: FiniteAbelianGroup, p: int, idx: list[int], W, levels) -> list[tuple[int, ...]]:
    """Element ``u`` with ``p^(e-1) u = w`` for each socle vector ``w`` of level ``e``."""
    out = []
    for w, e in zip(W, levels):
        coords = [0] * G.rank
        for c, i in zip(w, idx):
            if c:
                coords[i] = int(c) * p ** (G.exponents[i] - int(e))
        out.append(tuple(coords))
    return out


def _check_pair(G: FiniteAbelianGroup, A: Subgroup, C: Subgroup):
    if A.group != G or C.group != G:
        raise PreconditionError("subgroups outside the ambient group")
    if A.iso_invariants() != C.iso_invariants():
        raise PreconditionError("A and C are not isomorphic")
    for name, S in (("A", A), ("C", C)):
        if not is_pure(S):
            raise PreconditionError(f"{name} is not a summand: no complement exists")


def homocyclic_common_complement(G: FiniteAbelianGroup, A: Subgroup, C: Subgroup,
                                 check: bool = True) -> Subgroup:
    """Common complement in ``Z(p^n)^m`` via the reduction ``G -> G/pG``.

    A square matrix over ``Z/p^n`` is invertible iff it is invertible mod p,
    so a common complement of the reductions lifts with the same integer
    entries.
    """
    if not G.is_homocyclic():
        raise PreconditionError(f"{G.literal()} is not homocyclic")
    if check:
        _check_pair(G, A, C)
    if G.rank == 0:
        return G.trivial()
    p, m = G.primes[0], G.rank
    Abar = FpSubspace.span(p, m, [g.coords for g in A.generators()])
    Cbar = FpSubspace.span(p, m, [g.coords for g in C.generators()])
    W = fp_common_complement(p, m, Abar, Cbar)
    U = G.subgroup(W.basis)
    if check and not (is_direct_sum(G, [A, U]) and is_direct_sum(G, [C, U])):
        raise AssertionError("homocyclic lift failed verification")
    return U


def _primary_complement(G: FiniteAbelianGroup, A: Subgroup, C: Subgroup, p: int,
                        trace: ComplementTrace | None) -> list[tuple[int, ...]]:
    idx = _p_indices(G, p)
    Ap, Cp = socle_matrix(A, p, idx), socle_matrix(C, p, idx)
    levels = np.array([G.exponents[i] for i in idx], dtype=np.int64)
    W, wlev, cases = fp.filtered_common_complement(Ap, Cp, levels, p)
    if (cases == fp.CASE_MISMATCH).any():
        raise AssertionError(f"socle layer dimensions of A and C differ at p={p}")
    lifted = _lift(G, p, idx, W.tolist(), wlev.tolist())
    if trace is not None:
        _record_layers(trace, G, p, idx, levels, W, wlev, cases, lifted)
    return lifted


def _record_layers(trace, G, p, idx, levels, W, wlev, cases, lifted):
    top = int(levels.max()) if len(levels) else 0
    # order of G_p / p^(e-1) G_p = p^(sum over factors of min(e-1, d_i))
    remaining_prev = None
    layer_cases: list[list[str]] = []
    for c in cases.tolist():
        if c == fp.CASE_LAYER:
            layer_cases.append([])
        elif layer_cases:
            layer_cases[-1].append(fp.CASE_NAMES[c])
    present = sorted({int(x) for x in levels}, reverse=True)
    for e, sub in zip(present, layer_cases):
        remaining = p ** sum(min(e - 1, int(d)) for d in levels)
        if remaining_prev is not None:
            assert remaining < remaining_prev, "layer recursion must shrink the group"
        remaining_prev = remaining
        rows = [i for i, lev in enumerate(wlev.tolist()) if lev == e]
        trace.add("homocyclic lift" if e == top else "socle split",
                  prime=p, exponent=e, subcases=sub,
                  socle_vectors=[W[i].tolist() for i in rows],
                  lifted=[list(lifted[i]) for i in rows],
                  remaining_order=remaining)


def pgroup_common_complement(G: FiniteAbelianGroup, A: Subgroup, C: Subgroup,
                             B: Subgroup | None = None, K: Subgroup | None = None,
                             fallback: bool = True, check: bool = True):
    """Common complement in a finite p-group; returns ``(U, trace)``.

    ``B`` and ``K`` are optional known complements of ``A`` and ``C``; when
    given they are checked, otherwise summand-ness is checked by purity.
    """
    if not G.is_p_group():
        raise PreconditionError(f"{G.literal()} is not a p-group")
    if check:
        _check_pair(G, A, C)
        for S, T in ((A, B), (C, K)):
            if T is not None and not is_direct_sum(G, [S, T]):
                raise PreconditionError("given complement does not complement its summand")
    trace = ComplementTrace()
    if G.rank == 0:
        return G.trivial(), trace
    p = G.primes[0]
    U = G.subgroup(_primary_complement(G, A, C, p, trace))
    return _verified(G, A, C, U, trace, fallback)


def _verified(G, A, C, U, trace, fallback):
    if is_direct_sum(G, [A, U]) and is_direct_sum(G, [C, U]):
        return U, trace
    log.warning("constructive complement failed verification for %s", G.literal())
    if not fallback:
        raise AssertionError("constructive complement failed verification")
    from .summands import common_complement_bruteforce
    V = common_complement_bruteforce(G, A, C)
    trace.fallback_used = True
    trace.add("fallback", generators=[list(g.coords) for g in V.generators()] if V else [])
    return V, trace


def finite_common_complement(G: FiniteAbelianGroup, A: Subgroup, C: Subgroup,
                             check: bool = True, fallback: bool = True,
                             with_trace: bool = False):
    """Common complement in any finite abelian group, one prime at a time."""
    if check:
        _check_pair(G, A, C)
    trace = ComplementTrace()
    gens = []
    for p in G.prime_divisors():
        trace.add("primary dispatch", prime=p)
        gens.extend(_primary_complement(G, A.p_component(p), C.p_component(p), p, trace))
    U = G.subgroup(gens)
    if check:
        U, trace = _verified(G, A, C, U, trace, fallback)
    return (U, trace) if with_trace else U


def ulm_kaplansky(G, p: int, n: int) -> int:
    """``f_n = dim (p^n G)[p] / (p^(n+1) G)[p]``: the number of ``Z(p^(n+1))`` factors."""
    if not is_prime(p):
        raise PreconditionError(f"{p} is not prime")
    if n < 0:
        raise PreconditionError("n must be >= 0")
    W = G.whole() if isinstance(G, FiniteAbelianGroup) else G
    upper = W.multiply(p**n).socle(p).order
    lower = W.multiply(p ** (n + 1)).socle(p).order
    ratio = upper // lower
    f = 0
    while ratio > 1:
        ratio //= p
        f += 1
    return f
