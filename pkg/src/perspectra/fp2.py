"""Bit-packed F_2 versions of the socle kernels in :mod:`perspectra.fp`.

A vector of ``F_2^m`` is an ``int64`` whose bit ``m - 1 - j`` is coordinate
``j``.  Every routine makes the same pivot and row choices as its ``fp``
counterpart, so results agree row for row; only the representation differs.
Requires ``2 m <= 62``.
"""

from __future__ import annotations

import numpy as np
from numba import njit
from numba.cpython.unsafe.numbers import leading_zeros

from .fp import CASE_DIAGONAL, CASE_LAYER, CASE_MEET_SPLIT, CASE_MISMATCH, CASE_SUM_PROPER


@njit(cache=True)
def rref(M, m):
    R = M.copy()
    k = R.shape[0]
    row = 0
    for col in range(m):
        if row == k:
            break
        bit = np.int64(1) << (m - 1 - col)
        piv = -1
        for i in range(row, k):
            if R[i] & bit:
                piv = i
                break
        if piv < 0:
            continue
        t = R[row]
        R[row] = R[piv]
        R[piv] = t
        for i in range(k):
            if i != row and R[i] & bit:
                R[i] ^= R[row]
        row += 1
    return R[:row].copy()


@njit(cache=True)
def pivot_bits(R):
    out = np.empty(R.shape[0], dtype=np.int64)
    for i in range(R.shape[0]):
        out[i] = _top_bit(R[i])
    return out


@njit(cache=True, inline="always")
def _top_bit(x):
    """Highest set bit of ``x > 0`` (0 for 0)."""
    if x <= 0:
        return np.int64(0)
    return np.int64(1) << (63 - leading_zeros(x))


@njit(cache=True)
def reduce_rows(M, R):
    out = M.copy()
    piv = pivot_bits(R)
    for r in range(out.shape[0]):
        for i in range(R.shape[0]):
            if out[r] & piv[i]:
                out[r] ^= R[i]
    return out


@njit(cache=True)
def stack(A, B):
    out = np.empty(A.shape[0] + B.shape[0], dtype=np.int64)
    out[:A.shape[0]] = A
    out[A.shape[0]:] = B
    return out


@njit(cache=True)
def intersect(A, C, m):
    Z = np.empty(A.shape[0] + C.shape[0], dtype=np.int64)
    for i in range(A.shape[0]):
        Z[i] = (A[i] << m) | A[i]
    for i in range(C.shape[0]):
        Z[A.shape[0] + i] = C[i] << m
    R = rref(Z, 2 * m)
    low = (np.int64(1) << m) - 1
    count = 0
    for i in range(R.shape[0]):
        if (R[i] >> m) == 0:
            count += 1
    out = np.empty(count, dtype=np.int64)
    t = 0
    for i in range(R.shape[0]):
        if (R[i] >> m) == 0:
            out[t] = R[i] & low
            t += 1
    return rref(out, m)


@njit(cache=True)
def complement_in(S, V, m):
    cur = rref(S, m)
    keep = np.empty(V.shape[0], dtype=np.int64)
    n = 0
    for i in range(V.shape[0]):
        x = reduce_rows(V[i:i + 1], cur)[0]
        if x != 0:
            keep[n] = V[i]
            n += 1
            cur = rref(stack(cur, V[i:i + 1]), m)
    return keep[:n].copy()


@njit(cache=True)
def common_complement(V, A, C, m):
    out = np.zeros(0, dtype=np.int64)
    cases = np.zeros(4 * m + 4, dtype=np.int64)
    nc = 0
    V = rref(V, m)
    A = rref(A, m)
    C = rref(C, m)
    if A.shape[0] != C.shape[0]:
        cases[0] = CASE_MISMATCH
        return out, cases[:1].copy()
    while True:
        S = rref(stack(A, C), m)
        if S.shape[0] < V.shape[0]:
            out = stack(out, complement_in(S, V, m))
            cases[nc] = CASE_SUM_PROPER
            nc += 1
            V = S
        if A.shape[0] == 0:
            break
        K = intersect(A, C, m)
        if K.shape[0] > 0:
            L = complement_in(K, V, m)
            A = intersect(A, L, m)
            C = intersect(C, L, m)
            V = rref(L, m)
            cases[nc] = CASE_MEET_SPLIT
            nc += 1
            continue
        out = stack(out, A ^ C)
        cases[nc] = CASE_DIAGONAL
        nc += 1
        break
    return out, cases[:nc].copy()


@njit(cache=True)
def _permute(x, src, m):
    """Bit for new column ``j`` taken from old column ``src[j]``."""
    y = np.int64(0)
    for j in range(m):
        if (x >> (m - 1 - src[j])) & 1:
            y |= np.int64(1) << (m - 1 - j)
    return y


@njit(cache=True)
def meet_coordinate_block(A, levels, e, m):
    order = np.argsort(levels, kind="mergesort")
    P = np.empty_like(A)
    for i in range(A.shape[0]):
        P[i] = _permute(A[i], order, m)
    R = rref(P, m)
    inv = np.empty(m, dtype=np.int64)
    for j in range(m):
        inv[order[j]] = j
    count = 0
    for i in range(R.shape[0]):
        col = m - 1 - _bit_index(R[i])
        if levels[order[col]] >= e:
            count += 1
    out = np.empty(count, dtype=np.int64)
    t = 0
    for i in range(R.shape[0]):
        col = m - 1 - _bit_index(R[i])
        if levels[order[col]] >= e:
            out[t] = _permute(R[i], inv, m)
            t += 1
    return out


@njit(cache=True, inline="always")
def _bit_index(x):
    if x <= 0:
        return -1
    return 63 - leading_zeros(x)


@njit(cache=True)
def filtered_common_complement(A, C, levels, m):
    top = 0
    for i in range(m):
        if levels[i] > top:
            top = levels[i]
    W = np.zeros(0, dtype=np.int64)
    wlev = np.zeros(0, dtype=np.int64)
    Wr = np.zeros(0, dtype=np.int64)
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
        Ae = meet_coordinate_block(A, levels, e, m)
        Ce = meet_coordinate_block(C, levels, e, m)
        if Ae.shape[0] != Ce.shape[0]:
            cases[nc] = CASE_MISMATCH
            nc += 1
            return W, wlev, cases[:nc].copy()
        Abar = rref(reduce_rows(Ae, Wr), m)
        Cbar = rref(reduce_rows(Ce, Wr), m)
        used = np.int64(0)
        for k in range(Wr.shape[0]):
            used |= _top_bit(Wr[k])
        nv = 0
        for i in range(m):
            if levels[i] >= e and not (used >> (m - 1 - i)) & 1:
                nv += 1
        V = np.empty(nv, dtype=np.int64)
        t = 0
        for i in range(m):
            if levels[i] >= e and not (used >> (m - 1 - i)) & 1:
                V[t] = np.int64(1) << (m - 1 - i)
                t += 1
        X, sub = common_complement(V, Abar, Cbar, m)
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
            Wr = rref(W, m)
    return W, wlev, cases[:nc].copy()


def pack(M: np.ndarray) -> np.ndarray:
    """Rows of a 0/1 matrix as bit-packed integers."""
    k, m = M.shape
    weights = np.int64(1) << np.arange(m - 1, -1, -1, dtype=np.int64)
    return (np.asarray(M, dtype=np.int64) % 2 @ weights).astype(np.int64) if k else np.zeros(0, np.int64)


def unpack(v: np.ndarray, m: int) -> np.ndarray:
    v = np.asarray(v, dtype=np.int64)
    return ((v[:, None] >> np.arange(m - 1, -1, -1, dtype=np.int64)) & 1).astype(np.int64)


# -- allocation-free variant for the batch sweep -----------------------------------
#
# Same algorithm as :func:`common_complement` with ``V = F_2^m``; every
# subspace lives in a row of a preallocated workspace and is kept in reduced
# echelon form, which is canonical, so the output matches row for row.

@njit(cache=True)
def insert_rows(R, r, k):
    """Extend the fully reduced basis ``R[:r]`` by the rows ``R[r:k]``.

    Returns the new rank; the basis stays fully reduced (each pivot bit occurs
    in one row only) but is left unsorted.
    """
    n = r
    for i in range(r, k):
        x = R[i]
        for a in range(n):
            if x & _top_bit(R[a]):
                x ^= R[a]
        if x == 0:
            continue
        t = _top_bit(x)
        for a in range(n):
            if R[a] & t:
                R[a] ^= x
        R[n] = x
        n += 1
    return n


@njit(cache=True)
def rref_ip(R, k, m):
    """Reduce ``R[:k]`` in place; returns the rank (rows ``R[:rank]``).

    Sorting a fully reduced basis by value gives the unique reduced echelon
    form (``m`` is unused here, kept for symmetry with :func:`rref`).
    """
    r = insert_rows(R, 0, k)
    for a in range(1, r):
        x = R[a]
        b = a - 1
        while b >= 0 and R[b] < x:
            R[b + 1] = R[b]
            b -= 1
        R[b + 1] = x
    return r


@njit(cache=True, inline="always")
def _reduce_vec(x, R, r):
    for i in range(r):
        if x & _top_bit(R[i]):
            x ^= R[i]
    return x


@njit(cache=True)
def _intersect_ip(A, na, C, nc, m, Z, out):
    for i in range(na):
        Z[i] = (A[i] << m) | A[i]
    for i in range(nc):
        Z[na + i] = C[i] << m
    r = rref_ip(Z, na + nc, 2 * m)
    low = (np.int64(1) << m) - 1
    n = 0
    for i in range(r):
        if (Z[i] >> m) == 0:
            out[n] = Z[i] & low
            n += 1
    return rref_ip(out, n, m)


@njit(cache=True)
def _complement_in_ip(S, ns, V, nv, m, cur, out):
    for i in range(ns):
        cur[i] = S[i]
    r = rref_ip(cur, ns, m)
    n = 0
    for i in range(nv):
        x = _reduce_vec(V[i], cur, r)
        if x != 0:
            out[n] = V[i]
            n += 1
            # keep cur fully reduced (pivot bits cleared elsewhere), unordered
            t = _top_bit(x)
            for a in range(r):
                if cur[a] & t:
                    cur[a] ^= x
            cur[r] = x
            r += 1
    return n


@njit(cache=True)
def common_complement_ws(V0, nv, A, na, C, nc, m, ws, out, case_counts):
    """Common complement of rref subspaces ``A[:na]``, ``C[:nc]`` inside ``V0[:nv]``.

    ``ws`` is scratch with at least 8 rows of length ``2 m``; rows are
    written to ``out`` and their number returned (``-1`` on a dimension
    mismatch).  Sub-case codes are tallied into ``case_counts``.
    """
    if na != nc:
        return -1
    V, Aw, Cw, S, K, L, Z, cur = ws[0], ws[1], ws[2], ws[3], ws[4], ws[5], ws[6], ws[7]
    for i in range(nv):
        V[i] = V0[i]
    nv = rref_ip(V, nv, m)
    for i in range(na):
        Aw[i] = A[i]
        Cw[i] = C[i]
    nout = 0
    while True:
        # Aw is already reduced: only the rows of Cw need inserting
        for i in range(na):
            S[i] = Aw[i]
            S[na + i] = Cw[i]
        ns = insert_rows(S, na, 2 * na)
        ns = rref_ip(S, ns, m)
        if ns < nv:
            k = _complement_in_ip(S, ns, V, nv, m, cur, out[nout:])
            nout += k
            case_counts[CASE_SUM_PROPER] += 1
            for i in range(ns):
                V[i] = S[i]
            nv = ns
        if na == 0:
            break
        if ns == 2 * na:
            nk = 0
        else:
            nk = _intersect_ip(Aw, na, Cw, na, m, Z, K)
        if nk > 0:
            nl = _complement_in_ip(K, nk, V, nv, m, cur, L)
            na2 = _intersect_ip(Aw, na, L, nl, m, Z, S)
            for i in range(na2):
                Aw[i] = S[i]
            nc2 = _intersect_ip(Cw, na, L, nl, m, Z, S)
            if nc2 != na2:
                return -1
            for i in range(nc2):
                Cw[i] = S[i]
            na = na2
            for i in range(nl):
                V[i] = L[i]
            nv = rref_ip(V, nl, m)
            case_counts[CASE_MEET_SPLIT] += 1
            continue
        for i in range(na):
            out[nout + i] = Aw[i] ^ Cw[i]
        nout += na
        case_counts[CASE_DIAGONAL] += 1
        break
    return nout


@njit(cache=True)
def _meet_block_ip(A, na, levels, e, m, order, inv, buf, out):
    """:func:`meet_coordinate_block` into ``out``; returns the row count."""
    for i in range(na):
        buf[i] = _permute(A[i], order, m)
    r = rref_ip(buf, na, m)
    n = 0
    for i in range(r):
        col = m - 1 - _bit_index(buf[i])
        if levels[order[col]] >= e:
            out[n] = _permute(buf[i], inv, m)
            n += 1
    return n


@njit(cache=True)
def filtered_common_complement_ws(A, na, C, nc, levels, m, order, inv, ws, W, wlev, case_counts):
    """:func:`filtered_common_complement` on a workspace of at least 14 rows.

    ``order`` is the stable ascending argsort of ``levels`` and ``inv`` its
    inverse.  Returns the number of rows written to ``W`` (levels in
    ``wlev``), or ``-1`` on a layer mismatch.
    """
    Ae, Ce, Ab, Cb, V, Wr = ws[8], ws[9], ws[10], ws[11], ws[12], ws[13]
    top = 0
    for i in range(m):
        if levels[i] > top:
            top = levels[i]
    nw = 0
    nwr = 0
    for e in range(top, 0, -1):
        present = False
        for i in range(m):
            if levels[i] == e:
                present = True
                break
        if not present:
            continue
        nae = _meet_block_ip(A, na, levels, e, m, order, inv, ws[6], Ae)
        nce = _meet_block_ip(C, nc, levels, e, m, order, inv, ws[6], Ce)
        if nae != nce:
            return -1
        for i in range(nae):
            Ab[i] = _reduce_vec(Ae[i], Wr, nwr)
            Cb[i] = _reduce_vec(Ce[i], Wr, nwr)
        nab = rref_ip(Ab, nae, m)
        ncb = rref_ip(Cb, nce, m)
        used = np.int64(0)
        for k in range(nwr):
            used |= _top_bit(Wr[k])
        nv = 0
        for i in range(m):
            if levels[i] >= e and not (used >> (m - 1 - i)) & 1:
                V[nv] = np.int64(1) << (m - 1 - i)
                nv += 1
        case_counts[CASE_LAYER] += 1
        k = common_complement_ws(V, nv, Ab, nab, Cb, ncb, m, ws, W[nw:], case_counts)
        if k < 0:
            return -1
        for i in range(k):
            wlev[nw + i] = e
        nw += k
        if k > 0:
            for i in range(nw):
                Wr[i] = W[i]
            nwr = rref_ip(Wr, nw, m)
    return nw
