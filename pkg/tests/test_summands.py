import itertools

import pytest
from hypothesis import given, strategies as st

from perspectra.abelian import FiniteAbelianGroup, Homomorphism, is_direct_sum
from perspectra.errors import CapExceeded, PreconditionError
from perspectra.summands import (common_complement_bruteforce, count_common_complements,
                                 diagonal, diagonal_inverse, enumerate_subgroups,
                                 enumerate_summands, is_diagonal, is_perspective_bruteforce,
                                 is_summand, restrict_complement, summand_classes)

from conftest import Lit
from strategies import group_with_subgroups, groups


# -- oracles -----------------------------------------------------------------------

def element_set(S):
    return frozenset(x.coords for x in S.elements())


def subgroups_by_closure(G):
    """All subgroups as element sets, from every generating set of size <= rank."""
    elems = [x.coords for x in G.elements()]
    found = set()
    for k in range(G.rank + 1):
        for gens in itertools.combinations(elems, k):
            found.add(element_set(G.subgroup(list(gens))))
    return found


def splits(G, S, T):
    return len(element_set(S) & element_set(T)) == 1 and S.order * T.order == G.order


def summands_by_exhaustion(G):
    subs = enumerate_subgroups(G)
    return {element_set(S) for S in subs if any(splits(G, S, T) for T in subs)}


SMALL = [[2], [4], [2, 2], [4, 2], [3, 3], [8, 2], [4, 4], [2, 2, 2], [9, 3], [4, 2, 3], [8, 4]]


# -- enumeration ----------------------------------------------------------------------

@pytest.mark.parametrize("factors", SMALL)
def test_enumerate_subgroups_matches_closure_oracle(factors):
    G = FiniteAbelianGroup(factors)
    subs = enumerate_subgroups(G)
    assert len({element_set(S) for S in subs}) == len(subs)
    assert {element_set(S) for S in subs} == subgroups_by_closure(G)


@pytest.mark.parametrize("factors", SMALL)
def test_enumerate_summands_matches_exhaustion(factors):
    G = FiniteAbelianGroup(factors)
    ws = enumerate_summands(G)
    assert {element_set(w.subgroup) for w in ws} == summands_by_exhaustion(G)
    assert len(ws) == len({w.subgroup for w in ws})
    for w in ws:
        assert is_direct_sum(G, [w.subgroup, w.complement])


def test_enumerate_summands_examples():
    assert len(enumerate_summands(Lit("Z2+Z2").G)) == 5
    assert len(enumerate_summands(Lit("Z4").G)) == 2
    assert len(enumerate_summands(FiniteAbelianGroup([]))) == 1


def test_enumeration_cap_refuses(monkeypatch):
    monkeypatch.setenv("PERSPECTRA_CAPS", "subgroups=64")
    with pytest.raises(CapExceeded) as info:
        enumerate_summands(FiniteAbelianGroup([2, 2, 2, 2, 2, 2, 2]))
    assert "64" in str(info.value)


# -- is_summand ------------------------------------------------------------------------

def test_is_summand_examples():
    L = Lit("Z2+Z4")
    assert is_summand(L.G, L.sub((0, 2))) is None
    assert is_summand(L.G, L.sub((1, 2))) == L.sub((0, 1))
    assert is_summand(L.G, L.G.whole()) == L.G.trivial()


@given(group_with_subgroups(1, max_order=64))
def test_is_summand_agrees_with_exhaustion(args):
    G, S = args
    T = is_summand(G, S)
    subs = enumerate_subgroups(G)
    expected = any(splits(G, S, U) for U in subs)
    assert (T is not None) == expected
    if T is not None:
        assert splits(G, S, T)


# -- diagonals -------------------------------------------------------------------------

def _axis_map(G, images):
    """Endomorphism sending generator ``j`` to ``images[j]`` (canonical coords)."""
    return Homomorphism(G, G, [[img[i] for img in images] for i in range(G.rank)])


def test_diagonal_examples():
    L = Lit("Z3+Z3")
    H, K = L.sub((1, 0)), L.sub((0, 1))
    D = diagonal(L.G, H, K, _axis_map(L.G, [(0, 1), (0, 0)]))
    assert D == L.sub((1, 1))
    D2 = diagonal(L.G, H, K, _axis_map(L.G, [(0, 2), (0, 0)]))
    assert D2 == L.sub((1, 2))
    with pytest.raises(PreconditionError):
        diagonal(L.G, H, K, _axis_map(L.G, [(0, 0), (0, 0)]))


def test_diagonal_inverse_examples():
    L = Lit("Z3+Z3")
    H, K = L.sub((1, 0)), L.sub((0, 1))
    d = diagonal_inverse(L.G, H, K, L.sub((1, 1)))
    assert d(L.el(1, 0)) == L.el(0, 1)
    d2 = diagonal_inverse(L.G, H, K, L.sub((1, 2)))
    assert d2(L.el(1, 0)) == L.el(0, 2)
    with pytest.raises(PreconditionError):
        diagonal_inverse(L.G, H, K, H)


@pytest.mark.parametrize("text", ["Z2+Z2", "Z4+Z4", "Z3+Z3", "Z4+Z2+Z4+Z2", "Z2+Z2+Z2+Z2"])
def test_diagonal_round_trip_is_a_bijection(text):
    L = Lit(text)
    G = L.G
    half = G.rank // 2
    H = G.subgroup([g.coords for g in G.gens()[:half]])
    K = G.subgroup([g.coords for g in G.gens()[half:]])
    diagonals = [D for D in enumerate_subgroups(G)
                 if D.order == H.order and is_diagonal(G, H, K, D)]
    deltas = set()
    for D in diagonals:
        delta = diagonal_inverse(G, H, K, D)
        assert diagonal(G, H, K, delta) == D
        deltas.add(tuple(delta(h).coords for h in H.elements()))
    # distinct diagonals come from distinct isomorphisms
    assert len(deltas) == len(diagonals)


# -- common complements ------------------------------------------------------------------

def test_common_complement_bruteforce_examples():
    L = Lit("Z2+Z4")
    assert common_complement_bruteforce(L.G, L.sub((1, 0)), L.sub((1, 2))) == L.sub((0, 1))
    A = L.sub((1, 0))
    U = common_complement_bruteforce(L.G, A, A)
    assert U is not None and is_direct_sum(L.G, [A, U])
    with pytest.raises(PreconditionError):
        common_complement_bruteforce(L.G, L.sub((1, 0)), L.sub((0, 1)))


@given(group_with_subgroups(3, max_order=64))
def test_common_complement_forces_isomorphism(args):
    G, A, C, U = args
    if is_direct_sum(G, [A, U]) and is_direct_sum(G, [C, U]):
        assert A.iso_invariants() == C.iso_invariants()


@pytest.mark.parametrize("factors", [[4, 2], [2, 2, 2], [8, 2, 2], [4, 4]])
def test_complement_count_matches_exhaustion(factors):
    G = FiniteAbelianGroup(factors)
    subs = enumerate_subgroups(G)
    for members in summand_classes(G).values():
        for A, C in itertools.combinations(members, 2):
            n = sum(1 for U in subs if splits(G, A, U) and splits(G, C, U))
            assert count_common_complements(G, A, C) == n
            U = common_complement_bruteforce(G, A, C)
            assert (U is None) == (n == 0)


# -- restriction ------------------------------------------------------------------------

def test_restrict_complement_examples():
    L = Lit("Z2+Z2+Z2")
    H = L.sub((1, 0, 0), (0, 1, 0))
    S, Lsub, M = L.sub((1, 0, 0)), L.sub((1, 1, 0)), L.sub((0, 1, 0), (0, 0, 1))
    assert restrict_complement(L.G, H, S, Lsub, M) == L.sub((0, 1, 0))
    assert restrict_complement(L.G, L.G.whole(), S, Lsub, M) == M
    assert restrict_complement(L.G, H, S, S, M) == L.sub((0, 1, 0))
    with pytest.raises(PreconditionError):
        restrict_complement(L.G, H, S, Lsub, L.sub((1, 0, 0)))


@pytest.mark.parametrize("factors", [[2, 2, 2], [4, 2, 2], [4, 2], [2, 2, 2, 2], [3, 3, 3]])
def test_restriction_law_exhaustive(factors):
    G = FiniteAbelianGroup(factors)
    subs = enumerate_subgroups(G)
    summands = [w.subgroup for w in enumerate_summands(G)]
    checked = 0
    for H in summands:
        inside = [S for S in subs if S <= H]
        for S, Lsub in itertools.combinations_with_replacement(inside, 2):
            for M in subs:
                if M.order * S.order != G.order:
                    continue
                if is_direct_sum(G, [S, M]) and is_direct_sum(G, [Lsub, M]):
                    N = restrict_complement(G, H, S, Lsub, M)
                    assert element_set(N) == element_set(M) & element_set(H)
                    checked += 1
    assert checked > 0


# -- oracle sweep -----------------------------------------------------------------------

@pytest.mark.parametrize("text", ["Z2+Z2", "Z8+Z2", "Z16", "Z27", "Z4+Z2+Z2", "Z3+Z3+Z3"])
def test_is_perspective_bruteforce_examples(text):
    report = is_perspective_bruteforce(Lit(text).G, stats=True)
    assert report.status == "perspective" and report.counterexample is None
    assert report.to_json()["status"] == "perspective"


@given(groups(max_order=64, max_rank=3))
def test_bruteforce_oracle_is_total_on_small_groups(G):
    report = is_perspective_bruteforce(G)
    assert report.status == "perspective"
    assert (report.counterexample is None) == (report.status == "perspective")


def test_sweep_cap_refuses(monkeypatch):
    monkeypatch.setenv("PERSPECTRA_CAPS", "sweep=16")
    with pytest.raises(CapExceeded):
        is_perspective_bruteforce(FiniteAbelianGroup([2, 2, 2, 2, 2]))
