"""The bit-packed GF(2) kernels must agree exactly with the generic F_p routines."""

import numpy as np
import pytest
from hypothesis import given, strategies as st

from perspectra import fp, fp2


def random_bits(rng, k, m):
    return rng.integers(0, 2, size=(k, m)).astype(np.int64)


@given(st.integers(1, 12), st.integers(0, 14), st.integers(0, 2**32))
def test_pack_unpack_round_trip(m, k, seed):
    M = random_bits(np.random.default_rng(seed), k, m)
    assert np.array_equal(fp2.unpack(fp2.pack(M), m).reshape(k, m), M)


@given(st.integers(1, 12), st.integers(0, 14), st.integers(0, 2**32))
def test_rref_matches_generic(m, k, seed):
    M = random_bits(np.random.default_rng(seed), k, m)
    R = fp.rref(M, 2)
    R2 = fp2.rref(fp2.pack(M), m)
    assert np.array_equal(fp2.unpack(R2, m).reshape(R.shape), R)


@given(st.integers(1, 10), st.integers(0, 2**32))
def test_intersect_matches_generic(m, seed):
    rng = np.random.default_rng(seed)
    A = random_bits(rng, int(rng.integers(0, m + 1)), m)
    C = random_bits(rng, int(rng.integers(0, m + 1)), m)
    K = fp.rref(fp.intersect(A, C, 2), 2)
    K2 = fp2.rref(fp2.intersect(fp2.pack(A), fp2.pack(C), m), m)
    assert np.array_equal(fp2.unpack(K2, m).reshape(K.shape), K)


def test_filtered_common_complement_matches_generic():
    rng = np.random.default_rng(1)
    for _ in range(1500):
        m = int(rng.integers(1, 8))
        levels = np.sort(rng.integers(1, 4, size=m))[::-1].copy()
        k = int(rng.integers(0, m + 1))
        A, C = random_bits(rng, k, m), random_bits(rng, k, m)
        W, wl, cs = fp.filtered_common_complement(A, C, levels, 2)
        W2, wl2, cs2 = fp2.filtered_common_complement(fp2.pack(A), fp2.pack(C), levels, m)
        assert np.array_equal(W, fp2.unpack(W2, m).reshape(W.shape))
        assert np.array_equal(wl, wl2) and np.array_equal(cs, cs2)


def test_workspace_kernel_matches_array_kernel():
    rng = np.random.default_rng(3)
    for _ in range(1500):
        m = int(rng.integers(1, 8))
        levels = np.sort(rng.integers(1, 4, size=m))[::-1].copy()
        k = int(rng.integers(0, m + 1))
        A = fp2.rref(rng.integers(0, 2**m, size=k).astype(np.int64), m)
        C = fp2.rref(rng.integers(0, 2**m, size=k).astype(np.int64), m)
        W, wl, cs = fp2.filtered_common_complement(A, C, levels, m)
        order = np.argsort(levels, kind="mergesort")
        inv = np.empty(m, np.int64)
        inv[order] = np.arange(m)
        ws = np.zeros((14, 2 * m), np.int64)
        Wo, wlo = np.zeros(2 * m, np.int64), np.zeros(2 * m, np.int64)
        counts = np.zeros(6, np.int64)
        Ap, Cp = np.zeros(m, np.int64), np.zeros(m, np.int64)
        Ap[:len(A)], Cp[:len(C)] = A, C
        n = fp2.filtered_common_complement_ws(Ap, len(A), Cp, len(C), levels, m, order, inv,
                                              ws, Wo, wlo, counts)
        if (cs < 0).any():
            assert n == -1
            continue
        expected = np.zeros(6, np.int64)
        for c in cs:
            if c > 0:
                expected[c] += 1
        assert n == len(W)
        assert np.array_equal(Wo[:n], W) and np.array_equal(wlo[:n], wl)
        assert np.array_equal(counts, expected)


@pytest.mark.parametrize("m", [1, 3, 6])
def test_common_complement_ws_on_identity(m):
    rng = np.random.default_rng(m)
    for _ in range(200):
        k = int(rng.integers(0, m + 1))
        A = fp2.rref(rng.integers(0, 2**m, size=k).astype(np.int64), m)
        C = fp2.rref(rng.integers(0, 2**m, size=k).astype(np.int64), m)
        V0 = np.array([1 << (m - 1 - i) for i in range(m)], np.int64)
        ws = np.zeros((8, 2 * m), np.int64)
        out = np.zeros(2 * m, np.int64)
        counts = np.zeros(6, np.int64)
        n = fp2.common_complement_ws(V0, m, A.copy(), len(A), C.copy(), len(C), m, ws, out, counts)
        if len(A) != len(C):
            assert n == -1
            continue
        W = out[:n]
        for X in (A, C):
            assert len(fp2.rref(np.concatenate([X, W]), m)) == m
        assert n == m - len(A)
