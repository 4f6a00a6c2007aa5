"""Integer normal forms for lattices that contain a diagonal relation lattice.

A subgroup of ``Z(d_1) + ... + Z(d_r)`` corresponds to a lattice ``L`` with
``diag(d) Z^r <= L <= Z^r``.  Such lattices are stored by their row-style
Hermite normal form: an upper triangular ``r x r`` matrix with positive
diagonal and entries above each pivot reduced modulo that pivot.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd


def xgcd(a: int, b: int) -> tuple[int, int, int]:
    """Return ``(g, x, y)`` with ``g = gcd(a, b) = x*a + y*b`` and ``g >= 0``."""
    x0, y0, x1, y1 = 1, 0, 0, 1
    while b:
        q, r = divmod(a, b)
        a, b = b, r
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    if a < 0:
        return -a, -x0, -y0
    return a, x0, y0


def hnf_mod(rows, moduli) -> tuple[tuple[int, ...], ...]:
    """Hermite normal form of ``span(rows) + diag(moduli) Z^r``.

    Coordinates may be reduced modulo their modulus at any time because the
    relation rows belong to the lattice.  After a pivot is found in column
    ``j`` the saturation vector ``(d_j / h_jj) * pivot - d_j e_j`` is pushed to
    the later columns; without it the form would not be unique.
    """
    r = len(moduli)
    work = []
    for v in rows:
        w = [int(x) % d for x, d in zip(v, moduli)]
        if any(w):
            work.append(w)
    basis: list[list[int]] = []
    for j in range(r):
        dj = moduli[j]
        piv = [0] * r
        piv[j] = dj
        rest = []
        for v in work:
            b = v[j]
            if b == 0:
                rest.append(v)
                continue
            a = piv[j]
            g, x, y = xgcd(a, b)
            ag, bg = a // g, b // g
            new_piv = piv[:]
            other = v[:]
            for k in range(j, r):
                pk, vk = piv[k], v[k]
                if k == j:
                    new_piv[k] = g
                    other[k] = 0
                else:
                    dk = moduli[k]
                    new_piv[k] = (x * pk + y * vk) % dk
                    other[k] = (bg * pk - ag * vk) % dk
            piv = new_piv
            if any(other):
                rest.append(other)
        c = dj // piv[j]
        if c > 1:
            sat = [0] * r
            for k in range(j + 1, r):
                sat[k] = (c * piv[k]) % moduli[k]
            if any(sat):
                rest.append(sat)
        basis.append(piv)
        work = rest
    for j in range(r):
        h = basis[j][j]
        for i in range(j):
            q = basis[i][j] // h
            if q:
                bi, bj = basis[i], basis[j]
                for k in range(j, r):
                    bi[k] -= q * bj[k]
    return tuple(tuple(row) for row in basis)


def hnf_reduce(vector, basis) -> list[int]:
    """Reduce ``vector`` against an upper triangular basis, column by column.

    The result is zero exactly when the vector lies in the lattice, provided
    every coordinate is divisible by its pivot along the way; a nonzero
    remainder in the first non-divisible column is returned as is.
    """
    v = list(vector)
    for j, row in enumerate(basis):
        h = row[j]
        if v[j] % h:
            return v
        q = v[j] // h
        if q:
            for k in range(j, len(v)):
                v[k] -= q * row[k]
    return v


def in_lattice(vector, basis) -> bool:
    return not any(hnf_reduce(vector, basis))


def smith_form(matrix):
    """Smith normal form ``U M V = diag(delta)`` of an integer matrix.

    Returns ``(delta, v_inverse)`` where ``delta`` lists the diagonal entries
    (zeros included, length ``min(m, n)``) and ``v_inverse`` is the inverse of
    the accumulated column transform.  Row spaces satisfy
    ``rows(M) = rows(diag(delta) @ v_inverse)``, which is what a change of
    basis for a quotient ``Z^n / rows(M)`` needs.
    """
    a = [list(map(int, row)) for row in matrix]
    m = len(a)
    n = len(a[0]) if m else 0
    vinv = [[int(i == j) for j in range(n)] for i in range(n)]

    def swap_cols(j, k):
        for row in a:
            row[j], row[k] = row[k], row[j]
        vinv[j], vinv[k] = vinv[k], vinv[j]

    def sub_col(j, t, q):
        # col_j -= q * col_t
        for row in a:
            row[j] -= q * row[t]
        vinv[t] = [x + q * y for x, y in zip(vinv[t], vinv[j])]

    delta = []
    for t in range(min(m, n)):
        best = None
        for i in range(t, m):
            for j in range(t, n):
                if a[i][j] and (best is None or abs(a[i][j]) < abs(a[best[0]][best[1]])):
                    best = (i, j)
        if best is None:
            delta.extend([0] * (min(m, n) - t))
            break
        i, j = best
        a[t], a[i] = a[i], a[t]
        if j != t:
            swap_cols(t, j)
        while True:
            p = a[t][t]
            moved = False
            for i in range(t + 1, m):
                q = a[i][t] // p
                if q:
                    a[i] = [x - q * y for x, y in zip(a[i], a[t])]
                if a[i][t]:
                    a[t], a[i] = a[i], a[t]
                    moved = True
                    break
            if moved:
                continue
            for j in range(t + 1, n):
                q = a[t][j] // p
                if q:
                    sub_col(j, t, q)
                if a[t][j]:
                    swap_cols(t, j)
                    moved = True
                    break
            if moved:
                continue
            bad = next((i for i in range(t + 1, m)
                        if any(a[i][k] % p for k in range(t + 1, n))), None)
            if bad is None:
                break
            a[t] = [x + y for x, y in zip(a[t], a[bad])]
        if a[t][t] < 0:
            a[t] = [-x for x in a[t]]
        delta.append(a[t][t])
    return delta, vinv


def smith_invariants(matrix) -> list[int]:
    """Nonzero Smith invariants, each dividing the next."""
    if not matrix or not matrix[0]:
        return []
    return [d for d in smith_form(matrix)[0] if d]


def solve_upper(basis, target) -> list[int]:
    """Integer coefficients ``c`` with ``c @ basis == target``.

    ``basis`` is upper triangular and invertible over Q; raises ``ValueError``
    when the solution is not integral.
    """
    r = len(basis)
    rest = [Fraction(x) for x in target]
    coeffs = [0] * r
    for j in range(r):
        c = rest[j] / basis[j][j]
        if c.denominator != 1:
            raise ValueError("vector is not in the lattice")
        coeffs[j] = int(c)
        if c:
            for k in range(j, r):
                rest[k] -= c * basis[j][k]
    return coeffs


def lcm(a: int, b: int) -> int:
    return a // gcd(a, b) * b if a and b else 0
