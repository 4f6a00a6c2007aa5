from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from perspectra.literals import (LiteralError, parse_element, parse_group, parse_module,
                                 parse_ring, parse_rows, parse_span, parse_subgroup,
                                 rows_literal)
from perspectra.rank1 import RationalGroupType


user_groups = st.lists(st.integers(2, 40), min_size=0, max_size=4).filter(
    lambda xs: __import__("math").prod(xs) <= 4096)


def group_text(orders):
    return "+".join(f"Z{n}" for n in orders) if orders else "0"


@given(user_groups)
def test_group_literal_round_trip(orders):
    gl = parse_group(group_text(orders))
    assert gl.literal() == group_text(orders)
    assert parse_group(gl.literal()).group == gl.group


@given(user_groups, st.data())
def test_coordinates_round_trip(orders, data):
    gl = parse_group(group_text(orders))
    coords = tuple(data.draw(st.integers(0, n - 1)) for n in orders)
    assert gl.from_canonical(gl.to_canonical(coords)) == coords
    assert parse_element(gl, gl.element_literal(gl.to_canonical(coords))) == gl.to_canonical(coords)


@given(user_groups, st.data())
def test_subgroup_literal_round_trip(orders, data):
    gl = parse_group(group_text(orders))
    gens = [tuple(data.draw(st.integers(0, n - 1)) for n in orders)
            for _ in range(data.draw(st.integers(0, 3)))]
    text = "gens[" + ";".join("(" + ",".join(map(str, g)) + ")" for g in gens) + "]"
    S = parse_subgroup(gl, text)
    assert parse_subgroup(gl, gl.subgroup_literal(S)) == S


def test_crt_split_keeps_user_order():
    gl = parse_group("Z6+Z4")
    assert gl.group.factors == (4, 2, 3)
    assert gl.to_canonical((1, 0)) == (0, 1, 1)
    assert gl.from_canonical((1, 0, 2)) == (2, 1)


@pytest.mark.parametrize("text,pos", [("Z2+X4", 3), ("Z2+Z1", 3), ("", 0), ("Z2++Z4", 3)])
def test_malformed_group_reports_position(text, pos):
    with pytest.raises(LiteralError) as info:
        parse_group(text)
    assert info.value.position == pos
    assert info.value.exit_code == 1


@pytest.mark.parametrize("text", ["gens[(1,0", "(1,0)", "gens[(1,0,0)]", "gens[(a,0)]",
                                  "gens[(1,0)x]"])
def test_malformed_subgroup(text):
    with pytest.raises(LiteralError):
        parse_subgroup(parse_group("Z2+Z4"), text)


@pytest.mark.parametrize("text", ["Q^4", "Qp(5)^3", "Zp(3,N=4)^2"])
def test_module_literals_round_trip(text):
    assert parse_module(text).literal() == text


def test_module_literal_fields():
    m = parse_module("Zp(3,N=4)^2")
    assert (m.kind, m.p, m.N, m.rank) == ("Zp", 3, 4, 2)
    with pytest.raises(LiteralError):
        parse_module("R^3")


def test_rows_and_spans():
    rows = parse_rows("[(1,0);(0,1/3)]", 2)
    assert rows == [[1, 0], [0, Fraction(1, 3)]]
    assert parse_span(rows_literal(rows)) == rows
    with pytest.raises(LiteralError):
        parse_rows("[(1,0,0)]", 2)
    with pytest.raises(LiteralError):
        parse_rows("[(1,0)")


@pytest.mark.parametrize("text", ["Zn(6)", "Mat(2,Zn(2))", "prod[Zn(2);Mat(2,Zn(2))]",
                                  "End(Z4+Z2)", "prod[]", "prod[Zn(2);prod[Zn(3);Zn(4)]]"])
def test_ring_literals_round_trip(text):
    assert parse_ring(text).literal() == text


@pytest.mark.parametrize("text", ["Zn(6", "Mat(2,Q)", "prod[Zn(2)", "End(X4)", "Zn(6)x"])
def test_malformed_ring(text):
    with pytest.raises(LiteralError):
        parse_ring(text)


@pytest.mark.parametrize("text", ["div{11}", "codiv{2,5}", "div{}", "all"])
def test_type_literals(text):
    assert RationalGroupType.parse(text).literal() == text
