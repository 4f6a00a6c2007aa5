import itertools
import math
import random

import pytest
from hypothesis import given, strategies as st

from perspectra.abelian import (FiniteAbelianGroup, GroupError, Homomorphism, element_order,
                                groups_of_order, groups_up_to, is_direct_sum, make_group,
                                p_height)
from perspectra.summands import enumerate_subgroups

from conftest import Lit
from strategies import elements, group_with_subgroups, groups, subgroups


# -- oracles -----------------------------------------------------------------------

def span_by_enumeration(G, gens):
    """Closure of ``gens`` under addition, by breadth-first search."""
    seen = {G.zero().coords}
    frontier = [G.zero().coords]
    gens = [tuple(g) for g in gens]
    while frontier:
        x = frontier.pop()
        for g in gens:
            y = tuple((a + b) % d for a, b, d in zip(x, g, G.factors))
            if y not in seen:
                seen.add(y)
                frontier.append(y)
    return seen


def elements_of(S):
    return {x.coords for x in S.elements()}


def order_by_multiples(x):
    n, y = 1, x
    while any(y.coords):
        y = y + x
        n += 1
    return n


# -- construction --------------------------------------------------------------------

def test_make_group_splits_by_crt():
    assert make_group([12]).factors == (4, 3)


def test_make_group_empty_is_trivial():
    G = make_group([])
    assert G.factors == () and G.order == 1


def test_make_group_canonical_order():
    G = make_group([2, 4, 9])
    assert G.factors == (4, 2, 9) and G.order == 72


@pytest.mark.parametrize("bad", [[1], [0], [-3]])
def test_make_group_rejects_small_orders(bad):
    with pytest.raises(GroupError):
        make_group(bad)


def test_factor_must_be_prime_power():
    with pytest.raises(GroupError):
        FiniteAbelianGroup([6])


def test_group_order_cap():
    with pytest.raises(GroupError):
        FiniteAbelianGroup([2] * 32)


def test_groups_of_order_counts_match_partition_oracle():
    def p(n):
        return sum(1 for _ in _partitions(n))

    for n in range(1, 129):
        expected = math.prod(p(e) for _, e in _factor(n))
        assert len(groups_of_order(n)) == expected
    assert len(groups_up_to(16)) == 25
    assert len(groups_up_to(1)) == 1


def _partitions(n, largest=None):
    largest = n if largest is None else largest
    if n == 0:
        yield ()
        return
    for k in range(min(n, largest), 0, -1):
        for rest in _partitions(n - k, k):
            yield (k,) + rest


def _factor(n):
    out, p = [], 2
    while n > 1:
        e = 0
        while n % p == 0:
            n //= p
            e += 1
        if e:
            out.append((p, e))
        p += 1
    return out


# -- elements -------------------------------------------------------------------------

def test_element_order_examples():
    L = Lit("Z4+Z2")
    assert element_order(L.el(1, 1)) == 4
    assert element_order(L.el(0, 0)) == 1
    assert element_order(L.el(2, 1)) == 2


@given(st.data())
def test_element_order_matches_repeated_addition(data):
    G = data.draw(groups(max_order=128))
    x = data.draw(elements(G))
    assert element_order(x) == order_by_multiples(x)


def test_p_height_examples():
    L = Lit("Z2+Z4")
    assert p_height(L.el(0, 2), 2) == 1
    assert p_height(L.el(1, 2), 2) == 0
    assert p_height(L.G.zero(), 2) == math.inf


@given(st.data())
def test_p_height_by_enumeration(data):
    G = data.draw(groups(max_order=64))
    x = data.draw(elements(G))
    p = data.draw(st.sampled_from([2, 3, 5, 7]))
    h = p_height(x, p)
    if not any(x.coords):
        assert h == math.inf
        return
    multiples = [elements_of(G.whole().multiply(p**k)) for k in range(9)]
    expected = max(k for k in range(9) if x.coords in multiples[k])
    if expected == 8:
        # divisible beyond every exponent in a group of order <= 64
        expected = math.inf
    assert h == expected


# -- homomorphisms ---------------------------------------------------------------------

def test_hom_validate_examples():
    Z2, Z4 = make_group([2]), make_group([4])
    assert Homomorphism(Z2, Z4, [[2]]).validate() == (True, None)
    assert Homomorphism(Z2, Z4, [[1]], check=False).validate() == (False, (0, 0))
    with pytest.raises(GroupError):
        Homomorphism(Z2, Z4, [[1]])
    G = make_group([4, 2, 3])
    assert G.identity().validate()[0]


def test_hom_dimension_mismatch_is_structural():
    with pytest.raises(GroupError):
        Homomorphism(make_group([2]), make_group([4]), [[1, 0]])


def test_hom_apply_and_idempotent_examples():
    G = make_group([2, 2])
    h = Homomorphism(G, G, [[1, 0], [0, 0]])
    assert h(G.element((1, 1))).coords == (1, 0)
    assert h.compose(h) == h and h.is_idempotent()
    H = make_group([4, 4])
    assert not Homomorphism(H, H, [[2, 0], [0, 0]]).is_idempotent()


def test_unvalidated_hom_rejected():
    Z2, Z4 = make_group([2]), make_group([4])
    bad = Homomorphism(Z2, Z4, [[1]], check=False)
    with pytest.raises(GroupError):
        bad(Z2.element((1,)))


@st.composite
def endomorphisms(draw, G):
    rows = []
    for i, di in enumerate(G.factors):
        row = []
        for dj in G.factors:
            step = di // math.gcd(di, dj)
            row.append(step * draw(st.integers(0, di // step - 1)))
        rows.append(row)
    return Homomorphism(G, G, rows, check=False)


@given(st.data())
def test_hom_apply_is_additive(data):
    G = data.draw(groups(max_order=128))
    h = data.draw(endomorphisms(G))
    x, y = data.draw(elements(G)), data.draw(elements(G))
    assert h.validate()[0]
    assert h(x + y) == h(x) + h(y)


@given(st.data())
def test_composition_stays_well_defined(data):
    G = data.draw(groups(max_order=128))
    f, g = data.draw(endomorphisms(G)), data.draw(endomorphisms(G))
    assert f.validate()[0] and g.validate()[0]
    fg = f.compose(g)
    assert fg.validate()[0]
    x = data.draw(elements(G))
    assert fg(x) == f(g(x))


# -- subgroups ---------------------------------------------------------------------------

def test_subgroup_from_generators_examples():
    L = Lit("Z4+Z2")
    S = L.sub((2, 0), (0, 1))
    assert S.order == 4 and S.iso_invariants() == ((2, 1), (2, 1))
    assert L.G.subgroup([]).order == 1
    assert L.G.subgroup([g.coords for g in L.G.gens()]) == L.G.whole()


@given(st.data())
def test_subgroup_matches_enumerated_span(data):
    G = data.draw(groups(max_order=128))
    gens = [data.draw(elements(G)).coords for _ in range(data.draw(st.integers(0, 3)))]
    S = G.subgroup(gens)
    assert elements_of(S) == span_by_enumeration(G, gens)
    assert G.order % S.order == 0
    for g in gens:
        assert S.contains(G.element(g))


@given(st.data())
def test_canonical_form_ignores_generator_order_and_duplicates(data):
    G = data.draw(groups(max_order=256))
    gens = [data.draw(elements(G)).coords for _ in range(data.draw(st.integers(1, 4)))]
    seed = data.draw(st.integers(0, 10**6))
    rng = random.Random(seed)
    shuffled = gens + [rng.choice(gens)]
    rng.shuffle(shuffled)
    S, T = G.subgroup(gens), G.subgroup(shuffled)
    assert S.basis == T.basis and S == T
    # normalising the canonical generators is idempotent
    assert G.subgroup([g.coords for g in S.generators()]).basis == S.basis


def test_sum_intersection_examples():
    L = Lit("Z2+Z2")
    assert L.sub((1, 0)) + L.sub((0, 1)) == L.G.whole()
    assert (L.sub((1, 0)) & L.sub((1, 1))).order == 1


@given(group_with_subgroups(2, max_order=128))
def test_sum_and_meet_against_element_sets(args):
    G, S, T = args
    assert elements_of(S + T) == {tuple((a + b) % d for a, b, d in zip(x, y, G.factors))
                                  for x in elements_of(S) for y in elements_of(T)}
    assert elements_of(S & T) == elements_of(S) & elements_of(T)
    assert (S & S) == S


@pytest.mark.parametrize("factors", [[2, 2, 2], [4, 2], [8, 2, 2], [4, 4, 2], [9, 3], [4, 2, 3],
                                     [2, 2, 2, 2], [8, 8]])
def test_modular_order_identity_exhaustive(factors):
    G = FiniteAbelianGroup(factors)
    subs = enumerate_subgroups(G)
    for S, T in itertools.combinations_with_replacement(subs, 2):
        assert (S & T).order * (S + T).order == S.order * T.order


def test_iso_invariants_examples():
    L = Lit("Z4+Z2")
    assert L.G.whole().iso_invariants() == ((2, 1), (2, 2))
    assert L.sub((1, 1)).iso_invariants() == ((2, 2),)
    assert L.sub((2, 1)).iso_invariants() == ((2, 1),)


@given(groups())
def test_iso_invariants_of_whole_group(G):
    assert G.whole().iso_invariants() == G.iso_invariants()


@given(group_with_subgroups(1, max_order=256))
def test_iso_invariants_multiply_to_order(args):
    G, S = args
    assert math.prod(p**e for p, e in S.iso_invariants()) == S.order


@given(group_with_subgroups(1, max_order=64))
def test_iso_invariants_match_element_order_counts(args):
    G, S = args
    counts = {}
    for x in S.elements():
        n = element_order(x)
        counts[n] = counts.get(n, 0) + 1
    # the number of elements of each order determines a finite abelian group
    other = FiniteAbelianGroup([p**e for p, e in S.iso_invariants()])
    counts2 = {}
    for x in other.elements():
        n = element_order(x)
        counts2[n] = counts2.get(n, 0) + 1
    assert counts == counts2


def test_socle_and_multiply_examples():
    L = Lit("Z4+Z2")
    soc = L.G.whole().socle(2)
    assert soc == L.sub((2, 0), (0, 1)) and soc.order == 4
    dbl = L.G.whole().multiply(2)
    assert dbl == L.sub((2, 0)) and dbl.order == 2
    assert L.G.trivial().socle(2).order == 1


@pytest.mark.parametrize("factors", [[4, 2], [8, 4, 2], [2, 2, 2, 2], [9, 3, 3], [4, 2, 3, 3], [16, 4]])
def test_socle_exhaustive(factors):
    G = FiniteAbelianGroup(factors)
    for S in enumerate_subgroups(G):
        for p in G.prime_divisors():
            soc = S.socle(p)
            assert soc <= S
            assert all(not any((p * c) % d for c, d in zip(x.coords, G.factors))
                       for x in soc.elements())
            assert elements_of(soc) == {x.coords for x in S.elements()
                                        if not any((p * c) % d for c, d in zip(x.coords, G.factors))}


def test_is_direct_sum_examples():
    L = Lit("Z2+Z2")
    assert is_direct_sum(L.G, [L.sub((1, 0)), L.sub((0, 1))])
    assert not is_direct_sum(L.G, [L.sub((1, 0)), L.sub((1, 0))])
    M = Lit("Z2+Z4")
    assert is_direct_sum(M.G, [M.sub((1, 2)), M.sub((0, 1))])


@given(group_with_subgroups(2, max_order=64))
def test_is_direct_sum_against_element_sets(args):
    G, S, T = args
    expected = (len(elements_of(S) & elements_of(T)) == 1
                and S.order * T.order == G.order)
    assert is_direct_sum(G, [S, T]) == expected
