"""The corner-unit condition on ``End(G)`` without multiplication tables.

Endomorphisms of ``G = (+) Z(d_i)`` are integer matrices whose entry
``(i, j)`` is a multiple of ``d_i / gcd(d_i, d_j)`` taken mod ``d_i``.  Subsets
of the ring such as ``eR`` and ``Re`` are numbered by mixed radix over their
free entries, and products are computed on the fly.

Two reductions keep the search exhaustive but small:

* idempotents are taken up to conjugation by units; idempotents with
  isomorphic images and kernels are conjugate, so the coordinate projections
  onto sub-multisets of the cyclic factors represent every class;
* for a fixed ``e`` the condition on ``x = er`` is unchanged under
  ``x -> v x w`` with ``v`` a unit of ``eRe`` and ``w`` a unit commuting with
  ``e`` (move a good ``y`` to ``w^-1 y v^-1``), so one ``x`` per orbit of the
  group generated by a few such units is enough;
* ``e = 1`` needs no search: in a finite ring ``xy = 1`` forces ``y`` to be a unit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations

import numpy as np
from numba import njit

from . import caps
from .abelian import FiniteAbelianGroup


def _layout(d, rows, cols):
    """Free positions of ``{x : x supported on rows x cols}`` with radices and steps."""
    pos_i, pos_j, radix, step = [], [], [], []
    for i in rows:
        for j in cols:
            g = math.gcd(d[i], d[j])
            if g > 1:
                pos_i.append(i)
                pos_j.append(j)
                radix.append(g)
                step.append(d[i] // g)
    arr = lambda v: np.array(v, dtype=np.int64)
    return arr(pos_i), arr(pos_j), arr(radix), arr(step)


@njit(cache=True)
def _decode(code, pi, pj, radix, step, r, out):
    for a in range(r):
        for b in range(r):
            out[a, b] = 0
    for k in range(pi.shape[0] - 1, -1, -1):
        v = code % radix[k]
        code //= radix[k]
        out[pi[k], pj[k]] = v * step[k]


@njit(cache=True)
def _encode(M, pi, pj, radix, step):
    code = 0
    for k in range(pi.shape[0]):
        code = code * radix[k] + M[pi[k], pj[k]] // step[k]
    return code


# generator ops: (kind, i, j, c); kinds below, acting on rows (left) or columns (right)
OP_SCALE, OP_TRANSVECT, OP_SWAP, OP_CYCLE = 0, 1, 2, 3


@njit(cache=True)
def _apply(op, X, d, r, left, out):
    """``v X`` (left) or ``X w`` (right) for an elementary unit ``v`` or ``w``.

    scale: coordinate ``i`` times ``c``; transvect: ``I + c E_ij``; swap:
    coordinates ``i, j``; cycle: coordinates ``i..j`` shifted by one.
    """
    for a in range(r):
        for b in range(r):
            out[a, b] = X[a, b]
    kind, i, j, c = op[0], op[1], op[2], op[3]
    if left:
        if kind == OP_SCALE:
            for b in range(r):
                out[i, b] = X[i, b] * c % d[i]
        elif kind == OP_TRANSVECT:
            for b in range(r):
                out[i, b] = (X[i, b] + c * X[j, b]) % d[i]
        elif kind == OP_SWAP:
            for b in range(r):
                out[i, b] = X[j, b]
                out[j, b] = X[i, b]
        else:
            for t in range(i, j):
                for b in range(r):
                    out[t + 1, b] = X[t, b]
            for b in range(r):
                out[i, b] = X[j, b]
    else:
        if kind == OP_SCALE:
            for a in range(r):
                out[a, i] = X[a, i] * c % d[a]
        elif kind == OP_TRANSVECT:
            for a in range(r):
                out[a, j] = (X[a, j] + c * X[a, i]) % d[a]
        elif kind == OP_SWAP:
            for a in range(r):
                out[a, i] = X[a, j]
                out[a, j] = X[a, i]
        else:
            for t in range(i, j):
                for a in range(r):
                    out[a, t + 1] = X[a, t]
            for a in range(r):
                out[a, i] = X[a, j]


@njit(cache=True)
def _orbit_reps(size, pi, pj, radix, step, d, r, left, right):
    """Smallest code of each orbit of ``x -> v x w`` over elementary generators."""
    seen = np.zeros(size, dtype=np.uint8)
    reps = []
    stack = np.empty(size, dtype=np.int64)
    X = np.zeros((r, r), dtype=np.int64)
    T = np.zeros((r, r), dtype=np.int64)
    for start in range(size):
        if seen[start]:
            continue
        reps.append(start)
        seen[start] = 1
        top = 0
        stack[top] = start
        top += 1
        while top > 0:
            top -= 1
            c = stack[top]
            _decode(c, pi, pj, radix, step, r, X)
            for side in range(2):
                ops = left if side == 0 else right
                for g in range(ops.shape[0]):
                    _apply(ops[g], X, d, r, side == 0, T)
                    n = _encode(T, pi, pj, radix, step)
                    if not seen[n]:
                        seen[n] = 1
                        stack[top] = n
                        top += 1
    return np.array(reps, dtype=np.int64)


@njit(cache=True)
def _is_aut_on_block(Y, J, d, elems):
    """Is the ``J x J`` block of ``Y`` injective on ``(+)_{j in J} Z(d_j)``?"""
    n = elems.shape[0]
    k = J.shape[0]
    for t in range(1, n):
        zero = True
        for a in range(k):
            s = 0
            for b in range(k):
                s += Y[J[a], J[b]] * elems[t, b]
            if s % d[J[a]] != 0:
                zero = False
                break
        if zero:
            return False
    return True


@njit(cache=True)
def _check_reps(reps, xl, yl, d, r, e, J, block_elems):
    """For each ``x`` rep: status 0 no ``y`` with ``xy=e``; 1 good ``y`` found; 2 only bad ``y``."""
    xi, xj, xr, xs = xl
    yi, yj, yr, ys = yl
    ysize = 1
    for k in range(yr.shape[0]):
        ysize *= yr[k]
    X = np.zeros((r, r), dtype=np.int64)
    Y = np.zeros((r, r), dtype=np.int64)
    status = np.zeros(reps.shape[0], dtype=np.int64)
    witness = np.full(reps.shape[0], -1, dtype=np.int64)
    digits = np.zeros(yr.shape[0], dtype=np.int64)
    nd = yr.shape[0]
    for q in range(reps.shape[0]):
        _decode(reps[q], xi, xj, xr, xs, r, X)
        for a in range(r):
            for b in range(r):
                Y[a, b] = 0
        for k in range(nd):
            digits[k] = 0
        for c in range(ysize):
            if c > 0:
                # odometer step: the last position is the fastest digit
                k = nd - 1
                while True:
                    digits[k] += 1
                    if digits[k] < yr[k]:
                        Y[yi[k], yj[k]] = digits[k] * ys[k]
                        break
                    digits[k] = 0
                    Y[yi[k], yj[k]] = 0
                    k -= 1
            hit = True
            for a in range(r):
                for b in range(r):
                    acc = 0
                    for t in range(r):
                        acc += X[a, t] * Y[t, b]
                    if acc % d[a] != e[a, b]:
                        hit = False
                        break
                if not hit:
                    break
            if not hit:
                continue
            if witness[q] < 0:
                witness[q] = c
            status[q] = 2
            # e y is the J x J block of y (rows outside J dropped)
            if _is_aut_on_block(Y, J, d, block_elems):
                status[q] = 1
                witness[q] = c
                break
    return status, witness


def _unit_ops(d, block):
    """Elementary units supported on ``block``: for each run of equal cyclic factors a
    swap, a cycle, a transvection and unit scalings of its first coordinate, plus
    transvections between the first coordinates of different runs."""
    runs = []
    for i in block:
        if runs and d[runs[-1][-1]] == d[i] and runs[-1][-1] == i - 1:
            runs[-1].append(i)
        else:
            runs.append([i])
    ops = []
    for run in runs:
        a = run[0]
        for u in _unit_group_generators(d[a]):
            ops.append((OP_SCALE, a, a, u))
        if len(run) >= 2:
            ops.append((OP_SWAP, run[0], run[1], 0))
            ops.append((OP_TRANSVECT, run[0], run[1], 1))
        if len(run) >= 3:
            ops.append((OP_CYCLE, run[0], run[-1], 0))
    for x in runs:
        for y in runs:
            a, b = x[0], y[0]
            if a != b:
                c = d[a] // math.gcd(d[a], d[b]) % d[a]
                if c:
                    ops.append((OP_TRANSVECT, a, b, c))
    return ops


def _unit_group_generators(n):
    """Generators of ``(Z/n)^*`` (small n): every unit, trimmed to those not yet generated."""
    units = [u for u in range(1, n) if math.gcd(u, n) == 1]
    gens, reach = [], {1 % n}
    for u in units:
        if u in reach:
            continue
        gens.append(u)
        frontier = list(reach)
        while frontier:
            x = frontier.pop()
            for g in gens:
                y = x * g % n
                if y not in reach:
                    reach.add(y)
                    frontier.append(y)
    return gens


def idempotent_representatives(G: FiniteAbelianGroup) -> list[tuple[int, ...]]:
    """Index sets ``J`` (coordinate projections) up to permuting equal cyclic factors."""
    seen = set()
    out = []
    r = G.rank
    for k in range(r + 1):
        for J in combinations(range(r), k):
            key = tuple(sorted(G.factors[i] for i in J))
            if key not in seen:
                seen.add(key)
                out.append(J)
    return out


@dataclass
class EndCheckResult:
    holds: bool
    idempotents_checked: int
    orbit_reps: int
    counterexample: tuple | None = None

    def to_json(self) -> dict:
        out = {"holds": self.holds, "idempotents_checked": self.idempotents_checked,
               "orbit_reps": self.orbit_reps}
        if self.counterexample is not None:
            out["counterexample"] = [str(c) for c in self.counterexample]
        return out


def check_condition4_end(G: FiniteAbelianGroup) -> EndCheckResult:
    """Exhaustive corner-unit check on ``End(G)`` (with the orbit reductions above)."""
    from .rings import end_ring_cardinality
    caps.require("end_ring", end_ring_cardinality(G), f"End({G.literal()})")
    d = np.array(G.factors, dtype=np.int64)
    r = G.rank
    if r == 0:
        return EndCheckResult(True, 0, 0)
    allidx = list(range(r))
    result = EndCheckResult(True, 0, 0)
    for J in idempotent_representatives(G):
        result.idempotents_checked += 1
        if len(J) == r:
            continue
        Jc = [i for i in allidx if i not in J]
        e = np.zeros((r, r), dtype=np.int64)
        for i in J:
            e[i, i] = 1
        xl = _layout(G.factors, J, allidx)
        yl = _layout(G.factors, allidx, J)
        xsize = int(np.prod(xl[2])) if xl[2].size else 1
        left = _unit_ops(G.factors, J)
        right = left + _unit_ops(G.factors, Jc)
        left_arr = np.array(left, dtype=np.int64).reshape(len(left), 4)
        right_arr = np.array(right, dtype=np.int64).reshape(len(right), 4)
        reps = _orbit_reps(xsize, *xl, d, r, left_arr, right_arr)
        result.orbit_reps += len(reps)
        block_elems = _block_elements([G.factors[i] for i in J])
        status, witness = _check_reps(reps, xl, yl, d, r, e,
                                      np.array(J, dtype=np.int64), block_elems)
        bad = np.flatnonzero(status == 2)
        if bad.size:
            q = int(bad[0])
            X = np.zeros((r, r), np.int64)
            Y = np.zeros((r, r), np.int64)
            _decode(int(reps[q]), *xl, r, X)
            _decode(int(witness[q]), *yl, r, Y)
            result.holds = False
            result.counterexample = (e.tolist(), X.tolist(), Y.tolist())
            return result
    return result


def _block_elements(orders):
    if not orders:
        return np.zeros((1, 0), dtype=np.int64)
    grids = np.meshgrid(*[np.arange(n) for n in orders], indexing="ij")
    return np.stack([g.ravel() for g in grids], axis=1).astype(np.int64)
