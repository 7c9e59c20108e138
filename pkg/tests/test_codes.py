import itertools
import json

import pytest

from monospectrum.codes import (
    DecreasingSet,
    NotDecreasingError,
    contains_poly,
    decreasing_closure,
    gf2_rank,
    generator_matrix,
    is_decreasing,
    leq_decreasing,
    load_code_spec,
    reed_muller,
    rm_dimension,
)
from monospectrum.errors import ParseError
from monospectrum.monomial import Monomial, make_monomial, parse_monomial, parse_poly


def brute_leq(f, g):
    # same-degree rule extended through divisors of g
    fi, gi = f.indices, g.indices
    if len(fi) > len(gi):
        return False
    return any(all(a <= b for a, b in zip(fi, sub)) for sub in itertools.combinations(gi, len(fi)))


def test_leq_matches_definition_m5():
    m = 5
    for a in range(1 << m):
        for b in range(1 << m):
            f, g = Monomial(a, m), Monomial(b, m)
            assert leq_decreasing(f, g) == brute_leq(f, g)


def test_leq_examples():
    m = 4
    assert leq_decreasing(parse_monomial("x0*x1", m), parse_monomial("x1*x3", m))
    assert not leq_decreasing(parse_monomial("x2*x3", m), parse_monomial("x0*x1", m))
    assert leq_decreasing(Monomial(0, m), parse_monomial("x3", m))
    assert leq_decreasing(parse_monomial("x2", m), parse_monomial("x0*x3", m))


def test_reed_muller_properties():
    for m in range(1, 7):
        for r in range(m + 1):
            code = reed_muller(r, m)
            assert code.dimension == rm_dimension(r, m)
            assert code.d_min == 1 << (m - r)
            assert is_decreasing(code.monomials, m)
    rm13 = reed_muller(1, 3)
    assert rm13.dimension == 4 and rm13.d_min == 4
    assert generator_matrix(rm13).rank() == 4
    assert generator_matrix(reed_muller(2, 5)).rank() == 16


def test_generator_matrix_shape():
    g = generator_matrix(reed_muller(1, 2))
    assert g.to_strings() == ["1111", "0101", "0011"]
    assert g.to_hex() == ["f", "a", "c"]


def test_closure_examples():
    closed = decreasing_closure([parse_monomial("x1*x2", 3)], 3)
    expected = {"1", "x0", "x1", "x2", "x0*x1", "x0*x2", "x1*x2"}
    assert {str(f) for f in closed.sorted_monomials()} == expected
    assert decreasing_closure([parse_monomial("x1", 3)], 3).dimension == 3


def test_closure_is_smallest_m6():
    # the closure of a single monomial is exactly its down-set under the order
    m = 6
    for mask in range(0, 1 << m, 5):
        g = Monomial(mask, m)
        closed = decreasing_closure([g], m)
        brute = {t for t in range(1 << m) if leq_decreasing(Monomial(t, m), g)}
        assert set(closed.monomials) == brute


def test_rejects_non_decreasing():
    with pytest.raises(NotDecreasingError) as info:
        DecreasingSet.from_monomials([Monomial(0, 3), parse_monomial("x2", 3)], 3)
    missing = {str(f) for f in info.value.missing}
    assert missing == {"x0", "x1"}


def test_gf2_rank():
    assert gf2_rank([0b11, 0b01, 0b10]) == 2
    assert gf2_rank([]) == 0
    assert gf2_rank([0, 0]) == 0


def test_contains_poly():
    code = reed_muller(2, 4)
    assert contains_poly(code, parse_poly("x0*x1 + x2*x3 + 1", 4))
    assert not contains_poly(code, parse_poly("x0*x1*x2", 4))


def test_load_code_spec(tmp_path):
    assert load_code_spec({"rm": [2, 4]}).dimension == 11
    text = json.dumps({"m": 3, "monomials": ["1", "x0", "x1", "x0*x1"]})
    assert load_code_spec(text).dimension == 4
    path = tmp_path / "code.json"
    path.write_text(json.dumps({"m": 4, "monomials": ["x1*x2"]}))
    with pytest.raises(NotDecreasingError):
        load_code_spec(path)
    assert load_code_spec(str(path), close=True).dimension == 7
    for bad in ["not json", "[1, 2]", '{"m": 3}', '{"rm": "x"}']:
        with pytest.raises(ParseError):
            load_code_spec(bad)


def test_to_json_lists_monomials_in_order():
    out = reed_muller(1, 2).to_json()
    assert out == {"m": 2, "monomials": ["1", "x0", "x1"]}
    assert make_monomial([0, 1], 2) not in reed_muller(1, 2)
