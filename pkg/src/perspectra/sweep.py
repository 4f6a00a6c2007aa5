"""Batch verification over all abelian groups up to a given order.

For each group every unordered pair of distinct isomorphic summands is fed
to the constructive pipeline (socle layers per prime, lifted) and the result
is checked exactly: ``|A + U| = |G|`` and ``|A| |U| = |G|`` for both ``A``
and ``C``.  The pairs of one isomorphism class run inside a single compiled
loop that calls the same socle kernel as :func:`pgroups.finite_common_complement`;
orders are computed independently by elimination over ``Z/p^n``.

A pair whose constructive answer fails verification is an anomaly: it is
logged, solved by brute force when the fallback is allowed, and reported.
"""

from __future__ import annotations

import logging
import time
from dataclasses import dataclass, field

import numpy as np
from numba import njit

from . import caps, fp, fp2
from .abelian import FiniteAbelianGroup, groups_up_to
from .pgroups import socle_matrix

log = logging.getLogger(__name__)

MAX_ANOMALIES = 16


@njit(cache=True)
def _inv_unit(u, mod):
    a, b, x0, x1 = u % mod, mod, 1, 0
    while b:
        q = a // b
        a, b = b, a - q * b
        x0, x1 = x1, x0 - q * x1
    return x0 % mod


@njit(cache=True)
def order_log(M, lev, p, n):
    """``log_p`` of the order of the subgroup spanned by the rows of ``M``.

    Rows are elements of ``(+) Z(p^lev[c])``, embedded into ``(Z/p^n)^m`` by
    scaling coordinate ``c`` with ``p^(n - lev[c])``; a row pivot of minimal
    valuation ``v`` splits off a cyclic summand of order ``p^(n - v)``.
    """
    k, m = M.shape
    X = np.empty((k, m), dtype=np.int64)
    for a in range(k):
        for c in range(m):
            X[a, c] = M[a, c]
    return _order_log_ip(X, k, lev, p, n)


@njit(cache=True)
def _order_log_ip(X, k, lev, p, n):
    """:func:`order_log` on ``X[:k]``, overwriting it."""
    m = lev.shape[0]
    pn = p**n
    for a in range(k):
        for c in range(m):
            X[a, c] = X[a, c] * p ** (n - lev[c]) % pn
    total = 0
    for step in range(min(k, m)):
        best, ba, bc = n, -1, -1
        for a in range(step, k):
            for c in range(step, m):
                x = X[a, c]
                if x != 0:
                    v = 0
                    while x % p == 0:
                        x //= p
                        v += 1
                    if v < best:
                        best, ba, bc = v, a, c
        if ba < 0:
            break
        for c in range(m):
            t = X[step, c]
            X[step, c] = X[ba, c]
            X[ba, c] = t
        for a in range(k):
            t = X[a, step]
            X[a, step] = X[a, bc]
            X[a, bc] = t
        total += n - best
        pv = p**best
        uinv = _inv_unit(X[step, step] // pv, pn)
        for a in range(step + 1, k):
            if X[a, step] != 0:
                f = (X[a, step] // pv) * uinv % pn
                for c in range(step, m):
                    X[a, c] = (X[a, c] - f * X[step, c]) % pn
    return total


@njit(cache=True)
def _stack(A, B):
    out = np.empty((A.shape[0] + B.shape[0], A.shape[1]), dtype=np.int64)
    out[:A.shape[0]] = A
    out[A.shape[0]:] = B
    return out


@njit(cache=True)
def _solve_prime(Ai, Ci, gi, gj, lev, p, n, glog, alog, case_counts):
    """Constructive complement of ``A_p, C_p`` in ``G_p``, then the exact checks."""
    W, wlev, cases = fp.filtered_common_complement(Ai, Ci, lev, p)
    for c in cases:
        if c < 0:
            return False
        case_counts[c] += 1
    m = lev.shape[0]
    U = np.zeros((W.shape[0], m), dtype=np.int64)
    for a in range(W.shape[0]):
        for c in range(m):
            if W[a, c] != 0:
                U[a, c] = W[a, c] * p ** (lev[c] - wlev[a])
    ulog = order_log(U, lev, p, n)
    if ulog + alog != glog:
        return False
    if order_log(_stack(gi, U), lev, p, n) != glog:
        return False
    if order_log(_stack(gj, U), lev, p, n) != glog:
        return False
    return True


@njit(cache=True)
def _sweep_class(members, soc, nsoc, gens, ngen, alog, levels, mq, pq, nq, glog,
                 case_counts, max_anom):
    """All pairs ``i < j`` of one isomorphism class; returns failures."""
    Q = pq.shape[0]
    fails = np.full((max_anom, 2), -1, dtype=np.int64)
    nfail = 0
    npairs = 0
    for x in range(members.shape[0]):
        i = members[x]
        for y in range(x + 1, members.shape[0]):
            j = members[y]
            npairs += 1
            ok = True
            for q in range(Q):
                m = mq[q]
                lev = levels[q, :m]
                ok = _solve_prime(soc[i, q, :nsoc[i, q], :m], soc[j, q, :nsoc[j, q], :m],
                                  gens[i, q, :ngen[i, q], :m], gens[j, q, :ngen[j, q], :m],
                                  lev, pq[q], nq[q], glog[q], alog[i, q], case_counts)
                if not ok:
                    break
            if not ok:
                if nfail < max_anom:
                    fails[nfail, 0] = i
                    fails[nfail, 1] = j
                nfail += 1
    return npairs, nfail, fails


@njit(cache=True)
def _bit_rank(rows, m):
    return fp2.rref(rows, m).shape[0]


@njit(cache=True)
def _rank_union(A, na, W, nw, m, buf):
    """Rank of ``A[:na]`` (fully reduced) together with ``W[:nw]``."""
    for i in range(na):
        buf[i] = A[i]
    for i in range(nw):
        buf[na + i] = W[i]
    return fp2.insert_rows(buf, na, na + nw)


@njit(cache=True)
def _sweep_elementary2(members, socb, nsoc, m, case_counts, max_anom):
    """Pairs of one class in ``F_2^m``: the socle problem is the whole problem."""
    ws = np.zeros((8, 2 * m), dtype=np.int64)
    W = np.zeros(2 * m, dtype=np.int64)
    buf = np.zeros(3 * m, dtype=np.int64)
    V = np.empty(m, dtype=np.int64)
    for c in range(m):
        V[c] = np.int64(1) << (m - 1 - c)
    fails = np.full((max_anom, 2), -1, dtype=np.int64)
    nfail = 0
    npairs = 0
    for x in range(members.shape[0]):
        i = members[x]
        na = nsoc[i]
        Ai = socb[i]
        for y in range(x + 1, members.shape[0]):
            j = members[y]
            npairs += 1
            Cj = socb[j]
            # one socle layer, V = F_2^m
            case_counts[fp.CASE_LAYER] += 1
            nw = fp2.common_complement_ws(V, m, Ai, na, Cj, nsoc[j], m, ws, W, case_counts)
            # nw + na = m rows of full rank: both sums are direct and fill F_2^m
            ok = (nw >= 0 and nw + na == m
                  and _rank_union(Ai, na, W, nw, m, buf) == m
                  and _rank_union(Cj, nsoc[j], W, nw, m, buf) == m)
            if not ok:
                if nfail < max_anom:
                    fails[nfail, 0] = i
                    fails[nfail, 1] = j
                nfail += 1
    return npairs, nfail, fails


@njit(cache=True)
def _lift2(W, nw, wlev, lev, m, U):
    """Element of order ``2^wlev[a]`` over each socle vector ``W[a]``."""
    for a in range(nw):
        for c in range(m):
            if (W[a] >> (m - 1 - c)) & 1:
                U[a, c] = np.int64(1) << (lev[c] - wlev[a])
            else:
                U[a, c] = 0


@njit(cache=True)
def _copy_rows(src, k, offset, dst, m):
    for a in range(k):
        for c in range(m):
            dst[offset + a, c] = src[a, c]


@njit(cache=True)
def _sweep_class2(members, socb, nsoc, gens, ngen, alog, lev, m, n, glog,
                  case_counts, max_anom):
    """:func:`_sweep_class` for a 2-group, on bit-packed socle vectors."""
    U = np.zeros((2 * m, m), dtype=np.int64)
    X = np.zeros((3 * m, m), dtype=np.int64)
    ws = np.zeros((14, 2 * m), dtype=np.int64)
    W = np.zeros(2 * m, dtype=np.int64)
    wlev = np.zeros(2 * m, dtype=np.int64)
    order = np.argsort(lev, kind="mergesort")
    inv = np.empty(m, dtype=np.int64)
    for c in range(m):
        inv[order[c]] = c
    fails = np.full((max_anom, 2), -1, dtype=np.int64)
    nfail = 0
    npairs = 0
    for x in range(members.shape[0]):
        i = members[x]
        Ai = socb[i]
        for y in range(x + 1, members.shape[0]):
            j = members[y]
            npairs += 1
            Cj = socb[j]
            nw = fp2.filtered_common_complement_ws(Ai, nsoc[i], Cj, nsoc[j], lev, m, order,
                                                   inv, ws, W, wlev, case_counts)
            ok = nw >= 0
            if ok:
                _lift2(W, nw, wlev, lev, m, U)
                # |U| first, then |A + U| and |C + U|
                _copy_rows(U, nw, 0, X, m)
                ok = _order_log_ip(X, nw, lev, 2, n) + alog[i] == glog
                if ok:
                    _copy_rows(gens[i], ngen[i], 0, X, m)
                    _copy_rows(U, nw, ngen[i], X, m)
                    ok = _order_log_ip(X, ngen[i] + nw, lev, 2, n) == glog
                if ok:
                    _copy_rows(gens[j], ngen[j], 0, X, m)
                    _copy_rows(U, nw, ngen[j], X, m)
                    ok = _order_log_ip(X, ngen[j] + nw, lev, 2, n) == glog
            if not ok:
                if nfail < max_anom:
                    fails[nfail, 0] = i
                    fails[nfail, 1] = j
                nfail += 1
    return npairs, nfail, fails


@dataclass
class GroupSweep:
    group: str
    order: int
    classes: int = 0
    summands: int = 0
    pairs: int = 0
    failures: int = 0
    fallbacks: int = 0
    anomalies: list = field(default_factory=list)
    cases: dict = field(default_factory=dict)
    bruteforce: str = "skipped"
    elapsed_ms: float = 0.0

    @property
    def ok(self) -> bool:
        return self.failures == 0 and self.bruteforce in ("perspective", "skipped")

    def to_json(self) -> dict:
        return {"group": self.group, "order": self.order, "classes": self.classes,
                "summands": self.summands, "pairs": self.pairs,
                "failures": self.failures, "fallbacks": self.fallbacks,
                "anomalies": self.anomalies, "cases": self.cases,
                "bruteforce": self.bruteforce}


def _prepare(G: FiniteAbelianGroup, summands):
    primes = list(G.prime_divisors())
    idx = [G.component_indices(p) for p in primes]
    Q = len(primes)
    M = max((len(ix) for ix in idx), default=0)
    S = len(summands)
    levels = np.zeros((Q, M), dtype=np.int64)
    for q, ix in enumerate(idx):
        levels[q, :len(ix)] = [G.exponents[i] for i in ix]
    mq = np.array([len(ix) for ix in idx], dtype=np.int64)
    pq = np.array(primes, dtype=np.int64)
    nq = np.array([max(G.exponents[i] for i in ix) for ix in idx], dtype=np.int64)
    glog = np.array([sum(G.exponents[i] for i in ix) for ix in idx], dtype=np.int64)
    soc = np.zeros((S, Q, M, M), dtype=np.int64)
    nsoc = np.zeros((S, Q), dtype=np.int64)
    gens = np.zeros((S, Q, max(G.rank, 1), M), dtype=np.int64)
    ngen = np.zeros((S, Q), dtype=np.int64)
    alog = np.zeros((S, Q), dtype=np.int64)
    for s, A in enumerate(summands):
        for q, (p, ix) in enumerate(zip(primes, idx)):
            sm = socle_matrix(A, p, ix)
            nsoc[s, q] = sm.shape[0]
            soc[s, q, :sm.shape[0], :sm.shape[1]] = sm
            rows = [[g.coords[i] for i in ix] for g in A.generators()]
            rows = [r for r in rows if any(r)]
            ngen[s, q] = len(rows)
            if rows:
                gens[s, q, :len(rows), :len(ix)] = rows
            alog[s, q] = sum(e for pp, e in A.iso_invariants() if pp == p)
    return soc, nsoc, gens, ngen, alog, levels, mq, pq, nq, glog


def sweep_group(G: FiniteAbelianGroup, fallback: bool = True,
                bruteforce_pairs: int = 50_000) -> GroupSweep:
    """Constructive check of every isomorphic summand pair of ``G``.

    The exhaustive perspectivity oracle also runs when the pair count is at
    most ``bruteforce_pairs``.
    """
    from .summands import common_complement_bruteforce, is_perspective_bruteforce, summand_classes
    caps.require("sweep", G.order, "verification sweep")
    start = time.perf_counter()
    out = GroupSweep(G.literal(), G.order)
    classes = summand_classes(G)
    summands = [S for key in sorted(classes) for S in classes[key]]
    out.classes = len(classes)
    out.summands = len(summands)
    counts = np.zeros(len(fp.CASE_NAMES) + 1, dtype=np.int64)
    if G.rank:
        data = _prepare(G, summands)
        two_group = G.is_p_group() and G.primes[0] == 2 and G.rank <= 31
        if two_group:
            soc, nsoc = data[0], data[1]
            socb = np.zeros((len(summands), G.rank), dtype=np.int64)
            for s_, S in enumerate(summands):
                k = int(nsoc[s_, 0])
                # reduced echelon rows: the kernels reduce them first anyway
                row = fp2.rref(fp2.pack(soc[s_, 0, :k, :G.rank]), G.rank)
                socb[s_, :len(row)] = row
                nsoc[s_, 0] = len(row)
        pos = 0
        for key in sorted(classes):
            k = len(classes[key])
            members = np.arange(pos, pos + k, dtype=np.int64)
            pos += k
            if k < 2:
                continue
            if two_group:
                soc, nsoc, gens, ngen, alog, levels, mq, pq, nq, glog = data
                m = int(mq[0])
                if int(nq[0]) == 1:
                    npairs, nfail, fails = _sweep_elementary2(
                        members, socb, nsoc[:, 0], m, counts, MAX_ANOMALIES)
                else:
                    npairs, nfail, fails = _sweep_class2(
                        members, socb, nsoc[:, 0], gens[:, 0], ngen[:, 0], alog[:, 0],
                        levels[0, :m], m, int(nq[0]), int(glog[0]), counts, MAX_ANOMALIES)
            else:
                npairs, nfail, fails = _sweep_class(members, *data, counts, MAX_ANOMALIES)
            out.pairs += int(npairs)
            out.failures += int(nfail)
            for i, j in fails[:min(nfail, MAX_ANOMALIES)].tolist():
                A, C = summands[i], summands[j]
                log.warning("constructive complement failed for %s: %s, %s",
                            G.literal(), A.literal(), C.literal())
                entry = {"A": A.literal(), "C": C.literal()}
                if fallback:
                    U = common_complement_bruteforce(G, A, C)
                    out.fallbacks += 1
                    entry["fallback"] = U.literal() if U is not None else None
                out.anomalies.append(entry)
    out.cases = {fp.CASE_NAMES[c]: int(counts[c]) for c in sorted(fp.CASE_NAMES)
                 if c > 0 and counts[c]}
    if out.pairs <= bruteforce_pairs:
        out.bruteforce = is_perspective_bruteforce(G).status
    out.elapsed_ms = (time.perf_counter() - start) * 1e3
    return out


def _sweep_one(args):
    G, fallback, bruteforce_pairs = args
    return sweep_group(G, fallback, bruteforce_pairs)


def sweep(max_order: int, fallback: bool = True, bruteforce_pairs: int = 50_000,
          workers: int = 1):
    """Yield a :class:`GroupSweep` per group of order ``<= max_order``, in canonical order.

    With ``workers > 1`` groups are fanned out to processes; results are
    still yielded in canonical order so a single writer can persist them.
    """
    caps.require("sweep", max_order, "verification sweep")
    groups = groups_up_to(max_order)
    jobs = [(G, fallback, bruteforce_pairs) for G in groups]
    if workers <= 1:
        for job in jobs:
            yield _sweep_one(job)
        return
    from concurrent.futures import ProcessPoolExecutor
    with ProcessPoolExecutor(max_workers=workers) as pool:
        yield from pool.map(_sweep_one, jobs)
