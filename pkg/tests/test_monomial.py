import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from monospectrum.errors import CapExceeded, DomainError, ParseError
from monospectrum.monomial import (
    Monomial,
    Poly,
    anf_from_table,
    evaluate,
    lcm,
    make_monomial,
    mul,
    parse_monomial,
    parse_poly,
    weight,
    weight_by_points,
)


@st.composite
def polys(draw, max_m=8, max_terms=8):
    m = draw(st.integers(0, max_m))
    terms = draw(st.lists(st.integers(0, (1 << m) - 1), max_size=max_terms))
    return Poly.from_masks(terms, m)


def test_make_monomial_examples():
    one = make_monomial([], 4)
    assert one.mask == 0 and one.degree == 0 and str(one) == "1"
    f = make_monomial([2, 0], 4)
    assert f.indices == (0, 2) and f.degree == 2
    assert make_monomial(range(5), 5).degree == 5


@pytest.mark.parametrize("indices", [[4], [-1], [1, 1]])
def test_make_monomial_rejects(indices):
    with pytest.raises(DomainError):
        make_monomial(indices, 4)


def test_evaluate_point_order():
    assert evaluate(parse_poly("x0", 2)).to_list() == [0, 1, 0, 1]
    assert evaluate(parse_poly("x0*x1", 2)).to_list() == [0, 0, 0, 1]
    assert evaluate(parse_poly("x0 + x1", 2)).to_list() == [0, 1, 1, 0]


def test_weight_examples():
    assert weight(make_monomial([0, 1, 2], 5)) == 4
    assert weight(Poly.zero(5)) == 0
    assert weight(parse_poly("x0*x1 + x2*x3", 4)) == 6
    # monomials need no truth table
    assert weight(make_monomial([0, 1], 200)) == 1 << 198


def test_evaluation_cap():
    with pytest.raises(CapExceeded):
        evaluate(parse_poly("x0 + x1", 12), cap=10)


def test_lcm_examples():
    m = 6
    f, g = make_monomial([1, 2, 3], m), make_monomial([2, 4, 5], m)
    assert lcm([f, g]) == make_monomial([1, 2, 3, 4, 5], m)
    assert lcm([f]) == f
    assert lcm([Monomial(0, m), f]) == f
    with pytest.raises(DomainError):
        lcm([])


def test_mul_examples():
    p = parse_poly("x1 + x2", 3)
    assert mul(Monomial(0, 3), p) == p
    assert mul(make_monomial([0], 3), p) == parse_poly("x0*x1 + x0*x2", 3)
    h, q = make_monomial([0], 3), parse_poly("x0 + 1", 3)
    out = mul(h, q)
    assert out.is_zero()
    assert evaluate(out).bits == evaluate(h.to_poly()).bits & evaluate(q).bits


@settings(max_examples=200, deadline=None)
@given(polys(max_m=10))
def test_weight_two_paths(p):
    assert weight(p) == evaluate(p).weight() == weight_by_points(p)


@settings(max_examples=200, deadline=None)
@given(st.integers(1, 10).flatmap(lambda m: st.tuples(
    st.just(m),
    st.lists(st.integers(0, (1 << m) - 1), max_size=6),
    st.lists(st.integers(0, (1 << m) - 1), max_size=6),
    st.integers(0, (1 << m) - 1))))
def test_linearity_and_products(data):
    m, a, b, h = data
    p, q = Poly.from_masks(a, m), Poly.from_masks(b, m)
    assert evaluate(p + q) == evaluate(p) ^ evaluate(q)
    hm = Monomial(h, m)
    assert evaluate(mul(hm, p)) == evaluate(hm.to_poly()) & evaluate(p)
    assert evaluate(p * q) == evaluate(p) & evaluate(q)


@settings(max_examples=100, deadline=None)
@given(polys())
def test_anf_round_trip(p):
    assert anf_from_table(evaluate(p).bits, p.m) == p


@settings(max_examples=100, deadline=None)
@given(polys())
def test_text_round_trip(p):
    assert parse_poly(str(p), p.m) == p


def test_parse_forms():
    assert parse_poly("x0*x1 + x2 + 1").m == 3
    assert parse_poly("0", 4).is_zero()
    assert parse_poly("x1 + x1", 2).is_zero()
    assert parse_monomial("x3*x1", 5).indices == (1, 3)
    for bad in ["", "y0", "x0**x1", "x0 + + x1"]:
        with pytest.raises(ParseError):
            parse_poly(bad)
    with pytest.raises(DomainError):
        parse_poly("x9", 9)


def test_poly_helpers():
    p = parse_poly("x0*x1*x2 + x0*x3", 5)
    assert p.degree == 3 and Poly.zero(3).degree == -1
    assert p.common_factor() == make_monomial([0], 5)
    assert p.support_mask == 0b1111
    assert [str(f) for f in p.monomials()] == ["x0*x3", "x0*x1*x2"]
    with pytest.raises(DomainError):
        p + parse_poly("x0", 4)


def test_eval_vector_string():
    v = evaluate(parse_poly("x1", 2))
    assert v.to_string() == "0011" and v[3] == 1 and v.length == 4
    with pytest.raises(IndexError):
        v[4]
