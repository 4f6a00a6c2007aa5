"""Common complements in finite-rank torsion-free settings.

* ``Q^n``: subspaces as reduced echelon bases over the rationals.
* Free modules over ``Z_(p)`` (rationals with denominator prime to ``p``):
  a submodule is stored by a basis of rational rows with p-free
  denominators.  Pure submodules are exactly the summands, and a square
  matrix over ``Z_(p)`` is invertible iff its determinant has valuation 0.
* Truncated p-adic modules ``(Z/p^N)^n``, which are homocyclic groups.
"""

from __future__ import annotations

import random
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction

from .abelian import FiniteAbelianGroup
from .arith import is_prime
from .errors import PreconditionError
from .normal_forms import hnf_mod


# -- exact rational linear algebra ---------------------------------------------------

def _frac_rows(rows, m=None):
    out = [[Fraction(x) for x in r] for r in rows]
    if m is not None and any(len(r) != m for r in out):
        raise PreconditionError(f"rows must have length {m}")
    return out


def rref_q(rows):
    """Reduced row echelon form over Q (nonzero rows only) and pivot columns."""
    R = [list(r) for r in rows]
    if not R:
        return [], []
    m = len(R[0])
    pivots = []
    row = 0
    for col in range(m):
        piv = next((i for i in range(row, len(R)) if R[i][col] != 0), None)
        if piv is None:
            continue
        R[row], R[piv] = R[piv], R[row]
        inv = 1 / R[row][col]
        R[row] = [x * inv for x in R[row]]
        for i in range(len(R)):
            if i != row and R[i][col] != 0:
                f = R[i][col]
                R[i] = [x - f * y for x, y in zip(R[i], R[row])]
        pivots.append(col)
        row += 1
        if row == len(R):
            break
    return R[:row], pivots


def rank_q(rows) -> int:
    return len(rref_q(_frac_rows(rows))[0])


def intersect_q(A, C, m):
    """Basis of ``span(A) & span(C)`` (Zassenhaus block ``[[A, A], [C, 0]]``)."""
    block = [list(a) + list(a) for a in A] + [list(c) + [Fraction(0)] * m for c in C]
    R, _ = rref_q(block)
    meet = [r[m:] for r in R if not any(r[:m])]
    return rref_q(meet)[0]


def complement_in_q(S, V):
    """Rows of ``V`` extending a basis of ``S`` (inside ``V``) to all of ``V``."""
    cur = rref_q(S)[0]
    keep = []
    for v in V:
        nxt = rref_q(cur + [list(v)])[0]
        if len(nxt) > len(cur):
            keep.append(list(v))
            cur = nxt
    return keep


@dataclass(frozen=True)
class RationalSubspace:
    dim_ambient: int
    basis: tuple[tuple[Fraction, ...], ...]

    @classmethod
    def span(cls, m: int, rows) -> "RationalSubspace":
        R, _ = rref_q(_frac_rows(rows, m))
        return cls(m, tuple(tuple(r) for r in R))

    @property
    def dim(self) -> int:
        return len(self.basis)

    def rows(self):
        return [list(r) for r in self.basis]


def q_common_complement(dim: int, A: RationalSubspace, C: RationalSubspace) -> RationalSubspace:
    """``H`` with ``Q^dim = A (+) H = C (+) H``.

    Split off a complement of ``A + C`` when the sum is proper, split off
    ``A & C`` when it is nonzero (continuing in a complement ``L`` with
    ``A & L`` and ``C & L``), and finish with ``H = span(a_i + c_i)`` once
    ``V = A (+) C``.
    """
    if A.dim != C.dim:
        raise PreconditionError(f"dimension mismatch: {A.dim} != {C.dim}")
    if A.dim_ambient != dim or C.dim_ambient != dim:
        raise PreconditionError("subspaces live in a different ambient space")
    V = [[Fraction(int(i == j)) for j in range(dim)] for i in range(dim)]
    a, c = A.rows(), C.rows()
    out = []
    while True:
        S = rref_q(a + c)[0]
        if len(S) < len(rref_q(V)[0]):
            out.extend(complement_in_q(S, V))
            V = S
        if not a:
            break
        K = intersect_q(a, c, dim)
        if K:
            L = complement_in_q(K, V)
            a, c, V = intersect_q(a, L, dim), intersect_q(c, L, dim), L
            continue
        out.extend([x + y for x, y in zip(ra, rc)] for ra, rc in zip(a, c))
        break
    return RationalSubspace.span(dim, out)


def q_is_direct(dim: int, *parts: RationalSubspace) -> bool:
    rows = [r for P in parts for r in P.rows()]
    return len(rows) == dim and rank_q(rows) == dim


# -- the local ring Z_(p) ---------------------------------------------------------------

def vp(x: Fraction, p: int) -> float:
    """p-adic valuation of a rational (``inf`` at 0)."""
    x = Fraction(x)
    if x == 0:
        return float("inf")
    v = 0
    n, d = x.numerator, x.denominator
    while n % p == 0:
        n //= p
        v += 1
    while d % p == 0:
        d //= p
        v -= 1
    return v


def det_q(rows) -> Fraction:
    M = [list(r) for r in rows]
    n = len(M)
    det = Fraction(1)
    for col in range(n):
        piv = next((i for i in range(col, n) if M[i][col] != 0), None)
        if piv is None:
            return Fraction(0)
        if piv != col:
            M[col], M[piv] = M[piv], M[col]
            det = -det
        det *= M[col][col]
        inv = 1 / M[col][col]
        for i in range(col + 1, n):
            f = M[i][col] * inv
            if f:
                M[i] = [x - f * y for x, y in zip(M[i], M[col])]
    return det


def _reduce_mod_p(rows, p):
    out = []
    for r in rows:
        row = []
        for x in r:
            x = Fraction(x)
            row.append(x.numerator * pow(x.denominator, -1, p) % p)
        out.append(row)
    return out


def _rank_mod_p(rows, p) -> tuple[int, list[int]]:
    from . import fp
    if not rows:
        return 0, []
    R = fp.rref(fp.as_matrix(_reduce_mod_p(rows, p), len(rows[0])), p)
    return R.shape[0], [int(c) for c in fp.pivot_columns(R)]


@dataclass(frozen=True)
class LocalizedModule:
    """The free module ``Z_(p)^rank``."""

    p: int
    rank: int

    def __post_init__(self):
        if not is_prime(self.p):
            raise PreconditionError(f"{self.p} is not prime")

    def check(self, rows):
        rows = _frac_rows(rows, self.rank)
        for r in rows:
            for x in r:
                if x.denominator % self.p == 0:
                    raise PreconditionError(f"{x} is not in Z_({self.p})")
        return rows

    def literal(self) -> str:
        return f"Qp({self.p})^{self.rank}"


def is_pure_localized(M: LocalizedModule, rows) -> bool:
    """Rows span a pure (equivalently, summand) submodule iff they stay independent mod p."""
    rows = M.check(rows)
    return _rank_mod_p(rows, M.p)[0] == len(rows)


def canonical_pure(M: LocalizedModule, rows):
    """Canonical basis of a pure submodule: identity on the mod-p pivot columns."""
    rows = M.check(rows)
    if not rows:
        return []
    k, piv = _rank_mod_p(rows, M.p)
    if k != len(rows):
        raise PreconditionError("rows do not span a pure submodule")
    sub = [[r[j] for j in piv] for r in rows]
    inv = _inverse_q(sub)
    return [[sum(inv[i][t] * rows[t][j] for t in range(k)) for j in range(M.rank)]
            for i in range(k)]


def _inverse_q(M):
    n = len(M)
    aug = [list(r) + [Fraction(int(i == j)) for j in range(n)] for i, r in enumerate(M)]
    R, piv = rref_q(aug)
    if piv[:n] != list(range(n)):
        raise PreconditionError("matrix is singular")
    return [r[n:] for r in R]


def pure_hull(M: LocalizedModule, gens):
    """Smallest pure submodule containing ``gens``: ``Q span(gens) & Z_(p)^rank``.

    With a rational echelon basis ``r_i`` write ``r_i = N_i / p^s``; the hull
    is ``{sum c_i r_i : c in Z_(p)^k, sum c_i N_i = 0 mod p^s}``, a kernel
    computed by a Hermite form modulo ``p^s``.
    """
    p = M.p
    gens = _frac_rows(gens, M.rank)
    R, _ = rref_q(gens)
    if not R:
        return []
    s = max(0, -min(min(vp(x, p) for x in r if x != 0) for r in R))
    ps = p**s
    k = len(R)
    if s == 0:
        return canonical_pure(M, R)
    # integer representatives of p^s * r_i modulo p^s (p-free denominators inverted)
    N = _reduce_mod_pk([[x * ps for x in r] for r in R], p, s)
    moduli = [ps] * M.rank + [ps] * k
    rows = [N[i] + [int(i == j) for j in range(k)] for i in range(k)]
    basis = hnf_mod(rows, moduli)
    kernel = [row[M.rank:] for row in basis[M.rank:]]
    kernel = [c for c in kernel if any(c)]
    # the kernel lattice contains p^s Z^k, so its Hermite rows give a Z_(p)-basis of rank k
    kernel = [list(c) for c in hnf_mod(kernel, [ps * ps] * k)]
    hull = [[sum(Fraction(c[i]) * R[i][j] for i in range(k)) for j in range(M.rank)]
            for c in kernel]
    hull = [r for r in hull if any(r)]
    return canonical_pure(M, _dvr_basis(hull, p))


def _reduce_mod_pk(rows, p, s):
    mod = p**s
    out = []
    for r in rows:
        row = []
        for x in r:
            x = Fraction(x)
            row.append(x.numerator * pow(x.denominator, -1, mod) % mod)
        out.append(row)
    return out


def _dvr_basis(rows, p):
    """A Z_(p)-basis of the span of ``rows``, by valuation-pivoted elimination."""
    rows = [list(r) for r in rows if any(r)]
    out = []
    m = len(rows[0]) if rows else 0
    col = 0
    while rows and col < m:
        nz = [i for i, r in enumerate(rows) if r[col] != 0]
        if not nz:
            col += 1
            continue
        best = min(nz, key=lambda i: vp(rows[i][col], p))
        pivot = rows.pop(best)
        rest = []
        for r in rows:
            if r[col] != 0:
                f = r[col] / pivot[col]
                r = [x - f * y for x, y in zip(r, pivot)]
            if any(r):
                rest.append(r)
        out.append(pivot)
        rows = rest
        col += 1
    return out


def localized_contains(M: LocalizedModule, basis, x) -> bool:
    """``x`` lies in the Z_(p)-span of the independent rows ``basis``."""
    if not basis:
        return not any(x)
    aug = [list(b) for b in basis]
    R, piv = rref_q([list(r) + [Fraction(0)] for r in aug] + [list(x) + [Fraction(1)]])
    # solve x = sum c_i b_i over Q then check denominators
    coeffs = _solve_q(basis, x)
    return coeffs is not None and all(vp(c, M.p) >= 0 for c in coeffs)


def _solve_q(basis, x):
    k = len(basis)
    m = len(x)
    aug = [[basis[i][j] for i in range(k)] + [Fraction(x[j])] for j in range(m)]
    R, piv = rref_q(aug)
    if k in piv:
        return None
    coeffs = [Fraction(0)] * k
    for r, c in zip(R, piv):
        coeffs[c] = r[k]
    return coeffs


def localized_is_direct(M: LocalizedModule, ambient, *parts) -> bool:
    """``ambient = P_1 (+) ... (+) P_k`` for pure submodules, by a unit determinant.

    ``ambient`` is a canonical pure basis (identity on its pivot columns), so
    coordinates inside it are the entries on those columns.
    """
    rows = [list(r) for P in parts for r in P]
    if len(rows) != len(ambient):
        return False
    if not rows:
        return True
    piv = [next(j for j, x in enumerate(r) if x != 0) for r in ambient]
    for r in rows:
        coords = [r[j] for j in piv]
        recon = [sum(c * a[j] for c, a in zip(coords, ambient)) for j in range(M.rank)]
        if recon != list(r):
            return False
    d = det_q([[r[j] for j in piv] for r in rows])
    return d != 0 and vp(d, M.p) == 0


@dataclass
class LadderReport:
    cases: Counter

    def __init__(self):
        self.cases = Counter()


def localized_common_complement(M: LocalizedModule, A, C, report: LadderReport | None = None):
    """``U`` with ``Z_(p)^rank = A (+) U = C (+) U`` for pure ``A, C`` of equal rank."""
    p = M.p
    A, C = M.check(A), M.check(C)
    if not is_pure_localized(M, A) or not is_pure_localized(M, C):
        raise PreconditionError("A and C must be pure submodules")
    if len(A) != len(C):
        raise PreconditionError(f"rank mismatch: {len(A)} != {len(C)}")
    V = [[Fraction(int(i == j)) for j in range(M.rank)] for i in range(M.rank)]
    report = report if report is not None else LadderReport()
    U = _ladder(M, V, canonical_pure(M, A), canonical_pure(M, C), report)
    if not (localized_is_direct(M, V, A, U) and localized_is_direct(M, V, C, U)):
        raise AssertionError("localized complement failed verification")
    return canonical_pure(M, U) if U else []


def _meet(M, X, Y):
    if not X or not Y:
        return []
    Q = intersect_q(X, Y, M.rank)
    return pure_hull(M, Q) if Q else []


def _complement(M, S, V):
    """Rows of ``V``'s basis completing the pure ``S`` inside ``V`` (unit pivots)."""
    p = M.p
    cur = list(S)
    keep = []
    k0 = _rank_mod_p(cur, p)[0] if cur else 0
    for v in V:
        k1 = _rank_mod_p(cur + [v], p)[0]
        if k1 > k0:
            cur.append(v)
            keep.append(list(v))
            k0 = k1
    return keep


def _project(M, x, first, second):
    """Component of ``x`` in ``first`` along ``second`` (rows of a direct sum)."""
    coeffs = _solve_q(list(first) + list(second), x)
    k = len(first)
    return [sum(coeffs[i] * first[i][j] for i in range(k)) for j in range(M.rank)]


def _ladder(M, V, A, C, report):
    """Case ladder inside the pure submodule with basis ``V``."""
    if not A:
        report.cases["trivial"] += 1
        return [list(v) for v in V]
    if len(A) == len(V):
        report.cases["whole"] += 1
        return []
    B = _complement(M, A, V)
    K = _complement(M, C, V)
    # 1) A & C != 0: split it off and continue inside A2 (+) B
    A1 = _meet(M, A, C)
    if A1:
        report.cases["A∩C≠0"] += 1
        A2 = _complement(M, A1, A)
        W = pure_hull(M, A2 + B)
        C2 = _meet(M, C, W)
        return _ladder(M, W, A2, C2, report)
    # 2) B & K != 0: enlarge A and C by F = B & K
    F = _meet(M, B, K)
    if F:
        report.cases["B∩K≠0"] += 1
        U = _ladder(M, V, A + F, C + F, report)
        return F + U
    # 3) A & K != 0 (or symmetrically C & B != 0)
    for X, Y, Z in ((A, C, K), (C, A, B)):
        XK = _meet(M, X, Z)
        if not XK:
            continue
        report.cases["A∩K≠0"] += 1
        K2 = _complement(M, XK, Z)
        X2 = _meet(M, X, pure_hull(M, Y + K2))
        proj = [_project(M, x, Y, K2) for x in X2]
        Y2 = pure_hull(M, proj)
        Y1 = _complement(M, Y2, Y)
        W = pure_hull(M, Y2 + K2)
        U = _ladder(M, W, Y2, X2, report)
        H = [[a + b for a, b in zip(ra, rb)] for ra, rb in _diagonal_pairs(M, XK, Y1)]
        return H + U
    # 4) all four intersections vanish: aligned bases c_i = r_i a_i + s_i b_i
    report.cases["aligned"] += 1
    return _aligned(M, A, B, C, report)


def _diagonal_pairs(M, X, Y):
    """Pair up bases of two summands of equal rank (any bijection is an isomorphism)."""
    if len(X) != len(Y):
        raise AssertionError("diagonal needs equal ranks")
    return list(zip(X, Y))


def _aligned(M, A, B, C, report):
    """Case 4: ``C`` is the saturated graph of a map ``psi: QA -> QB``.

    A Smith form of ``psi`` over ``Z_(p)`` gives bases with ``psi(a_i) =
    delta_i b_i``, hence ``c_i = r_i a_i + s_i b_i`` with one of ``r_i, s_i`` a
    unit.  Per index: ``a_i + b_i`` when exactly one of ``r_i, s_i`` is a
    non-unit, ``a_i + c_i`` when both are units.
    """
    p = M.p
    k = len(A)
    # coordinates of C's rows in the basis A + B
    coords = [_solve_q(A + B, c) for c in C]
    Rm = [[row[i] for i in range(k)] for row in coords]
    Bm = [[row[k + i] for i in range(k)] for row in coords]
    psi = _mat_mul(_inverse_q(Rm), Bm)
    P, Qinv, delta = _dvr_smith(psi, p)
    a = _mat_mul(P, A)
    b = _mat_mul(Qinv, B)
    U = []
    for i in range(k):
        d = delta[i]
        if vp(d, p) >= 0:
            r, s = Fraction(1), d
        else:
            r, s = 1 / d, Fraction(1)
        c = [r * x + s * y for x, y in zip(a[i], b[i])]
        if vp(s, p) > 0:
            report.cases["aligned:s∈pR"] += 1
            U.append([x + y for x, y in zip(a[i], b[i])])
        elif vp(r, p) > 0:
            report.cases["aligned:r∈pR"] += 1
            U.append([x + y for x, y in zip(a[i], b[i])])
        else:
            report.cases["aligned:units"] += 1
            U.append([x + y for x, y in zip(a[i], c)])
    return U


def _mat_mul(X, Y):
    return [[sum(X[i][t] * Y[t][j] for t in range(len(Y))) for j in range(len(Y[0]))]
            for i in range(len(X))]


def _dvr_smith(X, p):
    """``P X Q = diag(delta)`` with ``P, Q`` invertible over ``Z_(p)``; returns ``P, Q^-1, delta``."""
    n = len(X)
    A = [list(r) for r in X]
    P = [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]
    Qi = [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]
    for t in range(n):
        best = min(((i, j) for i in range(t, n) for j in range(t, n) if A[i][j] != 0),
                   key=lambda ij: vp(A[ij[0]][ij[1]], p))
        i, j = best
        A[t], A[i] = A[i], A[t]
        P[t], P[i] = P[i], P[t]
        for row in A:
            row[t], row[j] = row[j], row[t]
        Qi[t], Qi[j] = Qi[j], Qi[t]
        piv = A[t][t]
        for i in range(t + 1, n):
            f = A[i][t] / piv
            if f:
                A[i] = [x - f * y for x, y in zip(A[i], A[t])]
                P[i] = [x - f * y for x, y in zip(P[i], P[t])]
        for j in range(t + 1, n):
            f = A[t][j] / piv
            if f:
                for row in A:
                    row[j] -= f * row[t]
                Qi[t] = [x + f * y for x, y in zip(Qi[t], Qi[j])]
    return P, Qi, [A[i][i] for i in range(n)]


def random_pure(M: LocalizedModule, k: int, rng: random.Random, spread: int = 6):
    """Random pure rank-``k`` submodule (rows independent mod p), with p-divisible noise."""
    p = M.p
    while True:
        rows = [[rng.randint(-spread, spread) + p * rng.randint(-spread, spread)
                 for _ in range(M.rank)] for _ in range(k)]
        if _rank_mod_p(rows, p)[0] == k:
            return canonical_pure(M, rows)


def rank2_reduction_check(M: LocalizedModule, pairs: int = 100, seed: int = 0) -> dict:
    """Run the case ladder on random rank-1 summand pairs and count the cases that fire."""
    rng = random.Random(seed)
    report = LadderReport()
    ok = 0
    for _ in range(pairs):
        A = random_pure(M, 1, rng)
        C = random_pure(M, 1, rng)
        localized_common_complement(M, A, C, report)
        ok += 1
    return {"pairs": pairs, "successes": ok, "cases": dict(report.cases)}


# -- truncated p-adic modules ------------------------------------------------------------

@dataclass(frozen=True)
class PadicApprox:
    """Free module ``(Z/p^N)^rank`` standing in for ``Z_p^rank`` at precision ``N``."""

    p: int
    N: int
    rank: int

    def __post_init__(self):
        if not is_prime(self.p):
            raise PreconditionError(f"{self.p} is not prime")
        if self.N < 1:
            raise PreconditionError("precision N must be >= 1 to detect units")

    def group(self) -> FiniteAbelianGroup:
        return FiniteAbelianGroup([self.p**self.N] * self.rank)

    def literal(self) -> str:
        return f"Zp({self.p},N={self.N})^{self.rank}"


def padic_common_complement(p: int, N: int, rank: int, A, C):
    """Common complement at precision ``N``; returns the generated subgroup."""
    from .pgroups import homocyclic_common_complement
    P = PadicApprox(p, N, rank)
    G = P.group()
    SA, SC = G.subgroup(A), G.subgroup(C)
    return homocyclic_common_complement(G, SA, SC)


def truncate(U, N: int):
    """Image of a subgroup of ``(Z/p^M)^r`` in ``(Z/p^N)^r`` for ``N <= M``."""
    G = U.group
    p = G.primes[0]
    H = FiniteAbelianGroup([p**N] * G.rank)
    return H.subgroup([g.coords for g in U.generators()])


def product_dispatch(components):
    """Solve a finite product componentwise.

    ``components`` is a list of ``(module, A, C)`` where ``module`` is a
    :class:`LocalizedModule` or :class:`PadicApprox`.  Returns the list of
    per-component complements.
    """
    out = []
    for i, (module, A, C) in enumerate(components):
        try:
            if isinstance(module, LocalizedModule):
                out.append(localized_common_complement(module, A, C))
            elif isinstance(module, PadicApprox):
                out.append(padic_common_complement(module.p, module.N, module.rank, A, C))
            else:
                raise PreconditionError(f"unsupported component {module!r}")
        except (PreconditionError, AssertionError) as exc:
            raise PreconditionError(f"component {i} failed: {exc}") from exc
    return out
