import json
import math

import pytest
from hypothesis import assume, given, strategies as st

from perspectra.errors import PreconditionError
from perspectra.rank1 import (RationalGroupType, crt_witness, example_11_refute, gplusg_decide,
                              necessary_condition, replay_residue_certificate,
                              residue_refutation, valid_quadruple, verify_summand_pair,
                              witness_U, x_divides, z2_lattice_sweep)

SMALL_PRIMES = [2, 3, 5, 7, 11, 13]


# -- oracles -----------------------------------------------------------------------

def prime_support(x):
    x, out, p = abs(x), set(), 2
    while x > 1:
        while x % p == 0:
            out.add(p)
            x //= p
        p += 1
    return out


def divides_oracle(T, x):
    return x != 0 and all(T.divisible_by(p) for p in prime_support(x))


def witness_exists(T, m, n, k, t, bound):
    """Brute-force search for a coprime ``(s, l)`` in a box."""
    for s in range(-bound, bound + 1):
        for l in range(-bound, bound + 1):
            if math.gcd(s, l) == 1 and divides_oracle(T, m * l - s * n) \
                    and divides_oracle(T, k * l - s * t):
                return (s, l)
    return None


types = st.builds(lambda primes, cof: RationalGroupType(frozenset(primes), cof),
                  st.sets(st.sampled_from(SMALL_PRIMES), max_size=4), st.booleans())


# -- x_divides -------------------------------------------------------------------------

def test_x_divides_examples():
    T = RationalGroupType.div(11)
    assert x_divides(T, 121)
    assert not x_divides(T, 22)
    Q = RationalGroupType.all()
    assert all(x_divides(Q, x) for x in (1, -7, 30, 2**40))
    with pytest.raises(PreconditionError):
        x_divides(T, 0)


@given(types, st.integers(-10**6, 10**6).filter(bool))
def test_x_divides_matches_prime_support(T, x):
    assert x_divides(T, x) == divides_oracle(T, x)


def test_type_literals_round_trip():
    for text in ["div{11}", "codiv{2,5}", "div{}", "all", "codiv{3}"]:
        assert RationalGroupType.parse(text).literal() == text
    assert RationalGroupType.parse("codiv{}") == RationalGroupType.all()
    with pytest.raises(ValueError):
        RationalGroupType.parse("div{4}")
    with pytest.raises(ValueError):
        RationalGroupType.parse("divisible{2}")


# -- verify_summand_pair ----------------------------------------------------------------

def test_verify_summand_pair_examples():
    assert verify_summand_pair(RationalGroupType.div(3), 2, 1, 1, 0, 1, 1)
    assert not verify_summand_pair(RationalGroupType.div(), 2, 5, 1, 0, 1, 1)
    with pytest.raises(PreconditionError):
        verify_summand_pair(RationalGroupType.div(3), 2, 1, 1, 0, 0, 0)
    with pytest.raises(PreconditionError):
        verify_summand_pair(RationalGroupType.div(3), 0, 0, 1, 0, 1, 1)


@given(types, st.integers(1, 30), st.integers(1, 30), st.integers(0, 30), st.integers(0, 30),
       st.integers(-30, 30), st.integers(-30, 30))
def test_verify_summand_pair_against_z2_model(T, m, n, k, t, s, l):
    """In the free model Z^2 (type div{}), a pair of rank-1 summands ``(x,y)``, ``(s,l)``
    splits iff the 2x2 determinant is a unit; for a general type it must be xG = G."""
    assume(math.gcd(s, l) == 1 and (k, t) != (0, 0))
    expected = divides_oracle(T, m * l - s * n) and divides_oracle(T, k * l - s * t)
    assert verify_summand_pair(T, m, n, k, t, s, l) == expected


# -- necessary condition ------------------------------------------------------------------

def test_necessary_condition_examples():
    assert not necessary_condition(RationalGroupType.div())
    assert necessary_condition(RationalGroupType.div(7))
    assert necessary_condition(RationalGroupType.all())


# -- decisions ------------------------------------------------------------------------------

def test_decide_all_primes():
    v = gplusg_decide(RationalGroupType.all())
    assert v.status == "Perspective"


def test_decide_codiv_two_primes():
    v = gplusg_decide(RationalGroupType.codiv(2, 5))
    assert v.status == "Perspective"
    assert "case table" in v.certificate["strategy"]


def test_decide_integers_gives_2_5_1_0():
    v = gplusg_decide(RationalGroupType.div())
    assert v.status == "NotPerspective"
    assert v.certificate["quadruple"] == [2, 5, 1, 0]
    assert replay_residue_certificate(RationalGroupType.div(), v.certificate)
    json.loads(v.dumps())


def test_decide_rejects_bad_bounds():
    with pytest.raises(PreconditionError):
        gplusg_decide(RationalGroupType.div(3), {"param_bound": 0})


@pytest.mark.parametrize("primes", [(3,), (7,), (11,), (3, 7), (13,)])
def test_not_perspective_certificates_survive_sweep(primes):
    T = RationalGroupType.div(*primes)
    v = gplusg_decide(T)
    assert v.status == "NotPerspective"
    m, n, k, t = v.certificate["quadruple"]
    assert replay_residue_certificate(T, v.certificate)
    assert witness_exists(T, m, n, k, t, bound=60) is None


@pytest.mark.parametrize("primes", [(2, 3), (2, 3, 5, 7)])
def test_unrefuted_types_are_unknown(primes):
    v = gplusg_decide(RationalGroupType.div(*primes), {"param_bound": 20})
    assert v.status == "Unknown"
    assert v.certificate["exhausted"]["param_bound"] == 20


@given(st.sets(st.sampled_from(SMALL_PRIMES), max_size=3), st.integers(1, 40), st.integers(1, 40),
       st.sampled_from([(1, 0), (0, 1)]))
def test_residue_refutations_are_sound(primes, m, n, kt):
    assume(math.gcd(m, n) == 1)
    T = RationalGroupType.div(*primes)
    cert = residue_refutation(T, m, n, *kt)
    if cert is not None:
        assert witness_exists(T, m, n, *kt, bound=40) is None


@given(types, st.sampled_from(SMALL_PRIMES))
def test_monotone_in_divisible_primes(T, extra):
    bounds = {"param_bound": 12}
    before = gplusg_decide(T, bounds).status
    bigger = (RationalGroupType(T.primes - {extra}, True) if T.cofinite
              else RationalGroupType(T.primes | {extra}, False))
    after = gplusg_decide(bigger, bounds).status
    if before == "Perspective":
        assert after != "NotPerspective"


# -- the example divisible only by 11 ----------------------------------------------------------

def test_example_11_certificate():
    T = RationalGroupType.div(11)
    v = example_11_refute(T)
    assert v.status == "NotPerspective"
    assert v.certificate["kind"] == "residue mod 10"
    assert v.certificate["quadruple"] == [5, 2, 0, 1]
    b0, a0 = v.certificate["branch_b0"], v.certificate["branch_a0"]
    assert not set(b0["lhs"]) & set(b0["rhs"]) and not set(a0["lhs"]) & set(a0["rhs"])
    assert v.certificate["exponent_sweep"]["solutions"] == 0


def test_example_11_is_bound_independent():
    assert example_11_refute(RationalGroupType.div(11), exponent_bound=0).status == "NotPerspective"


def test_example_11_rejects_other_types():
    with pytest.raises(PreconditionError):
        example_11_refute(RationalGroupType.div(2, 11))
    with pytest.raises(PreconditionError):
        example_11_refute(RationalGroupType.div(13))


def test_example_11_quadruple_has_no_small_witness():
    assert witness_exists(RationalGroupType.div(11), 5, 2, 0, 1, bound=150) is None


# -- witnesses for cofinite types ---------------------------------------------------------------

def test_witness_column_4():
    T = RationalGroupType.codiv(2, 5)
    w = witness_U(T, 3, 7, 2, 5)
    assert (w["s"], w["l"]) == (5, 2) and w["column"] == 4 and w["source"] == "table"


def test_witness_columns_1_2():
    T = RationalGroupType.codiv(2, 5)
    for t in (1, 2, 3):
        w = witness_U(T, 3, 7, 1, t)
        assert (w["s"], w["l"]) == (0, 1)


def test_witness_case_7a():
    T = RationalGroupType.codiv(2, 5)
    w = witness_U(T, 2, 5, 5, 2)
    assert (w["s"], w["l"]) == (1, 1) and w["subcase"] == "7a"


def test_witness_rejects_outside_hypotheses():
    with pytest.raises(PreconditionError):
        witness_U(RationalGroupType.codiv(2, 3, 5), 1, 1, 1, 0)
    with pytest.raises(PreconditionError):
        witness_U(RationalGroupType.div(2), 1, 1, 1, 0)
    with pytest.raises(PreconditionError):
        witness_U(RationalGroupType.codiv(2, 5), 2, 4, 1, 0)


@st.composite
def cofinite_instances(draw):
    E = draw(st.sampled_from([(2, 3), (2, 5), (3, 7), (2,), (5,), ()]))
    m = draw(st.integers(1, 200))
    n = draw(st.integers(1, 200))
    k = draw(st.integers(0, 200))
    t = draw(st.integers(0, 200))
    assume(valid_quadruple(m, n, k, t))
    return RationalGroupType.codiv(*E), (m, n, k, t)


@given(cofinite_instances())
def test_witness_is_sound(inst):
    T, q = inst
    w = witness_U(T, *q)
    assert math.gcd(w["s"], w["l"]) == 1
    assert divides_oracle(T, q[0] * w["l"] - w["s"] * q[1])
    assert divides_oracle(T, q[2] * w["l"] - w["s"] * q[3])


@given(st.sampled_from([(2, 3, 5), (2, 3, 5, 7), (3, 5, 7)]), st.integers(1, 100),
       st.integers(1, 100), st.integers(0, 100), st.integers(0, 100))
def test_crt_witness_more_primes(E, m, n, k, t):
    assume(valid_quadruple(m, n, k, t))
    T = RationalGroupType.codiv(*E)
    try:
        s, l = crt_witness(T, m, n, k, t)
    except PreconditionError:
        # some prime p leaves no admissible residue; then no witness exists at all
        assert witness_exists(T, m, n, k, t, bound=12) is None
        return
    assert verify_summand_pair(T, m, n, k, t, s, l)


# -- the free model Z^2 -----------------------------------------------------------------------

def test_z2_lattice_has_no_common_complement():
    assert z2_lattice_sweep(1000) == 0
    # independent count over a smaller box: det conditions |2l-5s| = 1 and |l| = 1
    hits = sum(1 for s in range(-200, 201) for l in (-1, 1) if abs(2 * l - 5 * s) == 1)
    assert hits == 0
