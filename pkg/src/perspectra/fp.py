"""Linear algebra over the prime field F_p, compiled with numba.

Subspaces of ``F_p^m`` are ``int64`` arrays of shape ``(k, m)`` whose rows
form a basis.  Every routine here is a pure function of its inputs.

The two constructive kernels are

* :func:`common_complement` - a common complement of two equal-dimension
  subspaces, by splitting off ``A + C`` when it is proper, splitting off
  ``A & C`` when it is nonzero, and taking the diagonal ``{a_i + c_i}`` once
  ``V = A (+) C``;
* :func:`filtered_common_complement` - the same problem inside a socle
  ``G[p]`` with the height filtration ``S_e = (p^(e-1) G)[p]``, solved layer
  by layer from the top exponent down.  Lifting the result gives a common
  complement in a finite p-group.
"""

from __future__ import annotations

import numpy as np
from numba import njit

# trace codes reported by the kernels
CASE_SUM_PROPER = 1      # A + C != V: complement of A + C split off
CASE_MEET_SPLIT = 2      # A & C != 0: recurse in a complement of the meet
CASE_DIAGONAL = 3        # A & C == 0 and A + C == V: diagonal
CASE_LAYER = 4           # one socle layer of the filtration solved
CASE_MISMATCH = -1       # layer dimensions of A and C differ

CASE_NAMES = {
    CASE_SUM_PROPER: "A+C≠D",
    CASE_MEET_SPLIT: "socle split",
    CASE_DIAGONAL: "A∩C=0 diagonal",
    CASE_LAYER: "homocyclic lift",
    CASE_MISMATCH: "layer mismatch",
}


@njit(cache=True)
def inverse_mod(a, p):
    a %= p
    result = 1
    e = p - 2
    while e > 0:
        if e & 1:
            result = result * a % p
        a = a * a % p
        e >>= 1
    return result


@njit(cache=True)
def rref(M, p):
    """Reduced row echelon form; returns the nonzero rows only."""
    R = M.copy() % p
    k, m = R.shape
    row = 0
    for col in range(m):
        if row == k:
            break
        piv = -1
        for i in range(row, k):
            if R[i, col] != 0:
                piv = i
                break
        if piv < 0:
            continue
        if piv != row:
            for j in range(m):
                t = R[row, j]
                R[row, j] = R[piv, j]
                R[piv, j] = t
        inv = inverse_mod(R[row, col], p)
        for j in range(m):
            R[row, j] = R[row, j] * inv % p
        for i in range(k):
            if i != row and R[i, col] != 0:
                f = R[i, col]
                for j in range(m):
                    R[i, j] = (R[i, j] - f * R[row, j]) % p
        row += 1
    return R[:row].copy()


@njit(cache=True)
def rank(M, p):
    return rref(M, p).shape[0]


@njit(cache=True)
def pivot_columns(R):
    k, m = R.shape
    out = np.empty(k, dtype=np.int64)
    for i in range(k):
        for j in range(m):
            if R[i, j] != 0:
                out[i] = j
                break
    return out


@njit(cache=True)
def reduce_rows(M, R, p):
    """Reduce each row of ``M`` modulo the row space of the rref ``R``."""
    out = M.copy() % p
    piv = pivot_columns(R)
    for r in range(out.shape[0]):
        for i in range(R.shape[0]):
            c = piv[i]
            f = out[r, c]
            if f != 0:
                for j in range(out.shape[1]):
                    out[r, j] = (out[r, j] - f * R[i, j]) % p
    return out


@njit(cache=True)
def stack(A, B):
    out = np.empty((A.shape[0] + B.shape[0], A.shape[1]), dtype=np.int64)
    out[:A.shape[0]] = A
    out[A.shape[0]:] = B
    return out


@njit(cache=True)
def intersect(A, C, p):
    """Basis of ``span(A) & span(C)`` from the block matrix ``[[A, A], [C, 0]]``."""
    m = A.shape[1]
    Z = np.zeros((A.shape[0] + C.shape[0], 2 * m), dtype=np.int64)
    for i in range(A.shape[0]):
        for j in range(m):
            Z[i, j] = A[i, j]
            Z[i, m + j] = A[i, j]
    for i in range(C.shape[0]):
        for j in range(m):
            Z[A.shape[0] + i, j] = C[i, j]
    R = rref(Z, p)
    count = 0
    for i in range(R.shape[0]):
        left_zero = True
        for j in range(m):
            if R[i, j] != 0:
                left_zero = False
                break
        if left_zero:
            count += 1
    out = np.empty((count, m), dtype=np.int64)
    t = 0
    for i in range(R.shape[0]):
        left_zero = True
        for j in range(m):
            if R[i, j] != 0:
                left_zero = False
                break
        if left_zero:
            out[t] = R[i, m:]
            t += 1
    return rref(out, p)


@njit(cache=True)
def complement_in(S, V, p):
    """Rows of ``V`` extending a basis of ``S`` (assumed inside ``V``) to ``V``."""
    cur = rref(S, p)
    keep = np.empty((V.shape[0], V.shape[1]), dtype=np.int64)
    n = 0
    for i in range(V.shape[0]):
        trial = stack(cur, V[i:i + 1])
        nxt = rref(trial, p)
        if nxt.shape[0] > cur.shape[0]:
            keep[n] = V[i]
            n += 1
            cur = nxt
    return keep[:n].copy()


@njit(cache=True)
def common_complement(V, A, C, p):
    """Common complement of ``A`` and ``C`` inside ``V``; also returns case codes.

    ``A`` and ``C`` must lie in ``V`` and have equal dimension.
    """
    m = V.shape[1]
    out = np.zeros((0, m), dtype=np.int64)
    cases = np.zeros(4 * m + 4, dtype=np.int64)
    nc = 0
    V = rref(V, p)
    A = rref(A, p)
    C = rref(C, p)
    if A.shape[0] != C.shape[0]:
        cases[0] = CASE_MISMATCH
        return out, cases[:1].copy()
    while True:
        S = rref(stack(A, C), p)
        if S.shape[0] < V.shape[0]:
            out = stack(out, complement_in(S, V, p))
            cases[nc] = CASE_SUM_PROPER
            nc += 1
            V = S
        if A.shape[0] == 0:
            break
        K = intersect(A, C, p)
        if K.shape[0] > 0:
            L = complement_in(K, V, p)
            A = intersect(A, L, p)
            C = intersect(C, L, p)
            V = rref(L, p)
            cases[nc] = CASE_MEET_SPLIT
            nc += 1
            continue
        H = (A + C) % p
        out = stack(out, H)
        cases[nc] = CASE_DIAGONAL
        nc += 1
        break
    return out, cases[:nc].copy()


@njit(cache=True)
def meet_coordinate_block(A, levels, e, p):
    """``span(A) & S_e`` where ``S_e`` is spanned by coordinates of level >= e.

    Pivots are taken on the low-level coordinates first, so the rows whose
    pivot falls in ``S_e`` vanish on every other coordinate.
    """
    m = A.shape[1]
    order = np.argsort(levels, kind="mergesort")
    P = np.empty_like(A)
    for j in range(m):
        P[:, j] = A[:, order[j]]
    R = rref(P, p)
    count = 0
    for i in range(R.shape[0]):
        for j in range(m):
            if R[i, j] != 0:
                if levels[order[j]] >= e:
                    count += 1
                break
    out = np.zeros((count, m), dtype=np.int64)
    t = 0
    for i in range(R.shape[0]):
        for j in range(m):
            if R[i, j] != 0:
                if levels[order[j]] >= e:
                    for jj in range(m):
                        out[t, order[jj]] = R[i, jj]
                    t += 1
                break
    return out


@njit(cache=True)
def filtered_common_complement(A, C, levels, p):
    """Common complement in the socle respecting the height filtration.

    ``A`` and ``C`` span the socles ``A[p]`` and ``C[p]`` of two isomorphic
    summands; ``levels[i]`` is the exponent of the cyclic factor behind socle
    coordinate ``i``.  Returns ``(W, wlevels, cases)``: rows of ``W`` with
    level ``e`` lie in ``S_e`` and, for every ``e``,
    ``S_e = (A & S_e) (+) W_{>=e} = (C & S_e) (+) W_{>=e}``.
    """
    m = A.shape[1]
    top = 0
    for i in range(m):
        if levels[i] > top:
            top = levels[i]
    W = np.zeros((0, m), dtype=np.int64)
    wlev = np.zeros(0, dtype=np.int64)
    Wr = np.zeros((0, m), dtype=np.int64)
    cases = np.zeros(8 * m + 8, dtype=np.int64)
    nc = 0
    for e in range(top, 0, -1):
        present = False
        for i in range(m):
            if levels[i] == e:
                present = True
                break
        if not present:
            continue
        Ae = meet_coordinate_block(A, levels, e, p)
        Ce = meet_coordinate_block(C, levels, e, p)
        if Ae.shape[0] != Ce.shape[0]:
            cases[nc] = CASE_MISMATCH
            nc += 1
            return W, wlev, cases[:nc].copy()
        Abar = rref(reduce_rows(Ae, Wr, p), p)
        Cbar = rref(reduce_rows(Ce, Wr, p), p)
        piv = pivot_columns(Wr)
        nv = 0
        for i in range(m):
            if levels[i] >= e:
                nv += 1
        nv -= Wr.shape[0]
        V = np.zeros((nv, m), dtype=np.int64)
        t = 0
        for i in range(m):
            if levels[i] < e:
                continue
            used = False
            for k in range(piv.shape[0]):
                if piv[k] == i:
                    used = True
                    break
            if not used:
                V[t, i] = 1
                t += 1
        X, sub = common_complement(V, Abar, Cbar, p)
        cases[nc] = CASE_LAYER
        nc += 1
        for k in range(sub.shape[0]):
            cases[nc] = sub[k]
            nc += 1
        if X.shape[0] > 0:
            W = stack(W, X)
            nl = np.empty(wlev.shape[0] + X.shape[0], dtype=np.int64)
            nl[:wlev.shape[0]] = wlev
            nl[wlev.shape[0]:] = e
            wlev = nl
            Wr = rref(W, p)
    return W, wlev, cases[:nc].copy()


def as_matrix(rows, m: int) -> np.ndarray:
    """Rows (any iterable of int sequences) as an ``int64`` array with ``m`` columns."""
    rows = [list(r) for r in rows]
    if not rows:
        return np.zeros((0, m), dtype=np.int64)
    return np.asarray(rows, dtype=np.int64).reshape(len(rows), m)
