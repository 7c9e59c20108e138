import json
import random

import pytest

from monospectrum.dyadic import Dyadic
from monospectrum.errors import DomainError, InvariantViolation, ParseError
from monospectrum.monomial import Monomial, evaluate, make_monomial, mul, parse_monomial, parse_poly
from monospectrum.templates import (
    TemplateInstance,
    TemplateKind,
    classify_sigma_k,
    complementary_flip,
    disjoint_k_sum,
    disjoint_k_sum_weight,
    factor_head_kernel,
    family_weight,
    kernel_sigma,
    nest,
    nested_sigma,
    rank_ell_degree_drop,
    rank_ell_sigma,
    shared_3term,
    sigma_k,
    template_from_spec,
)


def mono(text, m):
    return parse_monomial(text, m)


def test_sigma_k_values():
    assert sigma_k(3, 3) == Dyadic(37, 4)
    assert sigma_k(1, 5) == Dyadic(1)
    assert sigma_k(2, 4) == Dyadic(2) - Dyadic(1, 3)
    for r in range(1, 7):
        assert sigma_k(r, 1) == Dyadic(1)


def test_disjoint_sum_example():
    m = 9
    fs = [make_monomial(range(3 * i, 3 * i + 3), m) for i in range(3)]
    inst = disjoint_k_sum(fs, m)
    assert inst.predicted_weight == 148 == inst.evaluated_weight()
    assert inst.kind is TemplateKind.DISJOINT_K_SUM and inst.d == 64
    assert disjoint_k_sum_weight(9, 3, 3) == 148


def test_disjoint_sum_random():
    rng = random.Random(3)
    for _ in range(60):
        r, k = rng.randint(1, 4), rng.randint(1, 4)
        m = rng.randint(r * k, min(r * k + 3, 16))
        order = rng.sample(range(m), r * k)
        fs = [make_monomial(order[i * r:(i + 1) * r], m) for i in range(k)]
        assert disjoint_k_sum(fs, m).check()


def test_disjoint_sum_rejects():
    with pytest.raises(DomainError):
        disjoint_k_sum([mono("x0*x1", 4), mono("x1*x2", 4)], 4)
    with pytest.raises(DomainError):
        disjoint_k_sum([mono("x0*x1", 4), mono("x2", 4)], 4)
    with pytest.raises(DomainError):
        disjoint_k_sum([], 4)


def test_sigma_classification():
    report = classify_sigma_k(8, 8)
    assert report.two_to_two_and_half == [(3, 3)]
    assert set(report.below_two) == {(r, k) for r in range(1, 9) for k in range(1, 9) if k <= 2 or r <= 2}
    with pytest.raises(DomainError):
        classify_sigma_k(17, 3)


def test_rank_ell_example():
    inst = rank_ell_degree_drop([mono("x0*x1*x2", 5)], mono("x3*x4", 5), 5)
    assert inst.predicted_weight == 10 and inst.predicted_sigma == Dyadic(5, 1)
    assert inst.check()


def test_rank_ell_special_cases_give_2d():
    # l = 0 or r = 2 always lands at 2d
    for r in range(2, 7):
        assert rank_ell_sigma(r, 0) == Dyadic(2)
    for ell in range(5):
        assert rank_ell_sigma(2, ell) == Dyadic(2)


def test_rank_ell_random():
    rng = random.Random(4)
    for _ in range(60):
        r, ell = rng.randint(2, 4), rng.randint(0, 3)
        need = ell * r + r - 1
        m = rng.randint(max(need, r), need + 2)
        order = rng.sample(range(m), need)
        fs = [make_monomial(order[i * r:(i + 1) * r], m) for i in range(ell)]
        g = make_monomial(order[ell * r:], m)
        assert rank_ell_degree_drop(fs, g, m).check()


def test_rank_ell_rejects():
    with pytest.raises(DomainError):
        rank_ell_degree_drop([], Monomial(0, 3), 3)
    with pytest.raises(DomainError):
        rank_ell_degree_drop([mono("x0*x1", 4)], mono("x1", 4), 4)
    with pytest.raises(DomainError):
        rank_ell_degree_drop([mono("x0", 4)], mono("x1", 4), 4)


def test_flip_examples():
    inst = complementary_flip(mono("x0*x1*x2", 6), 2, mono("x3", 6), 6)
    assert inst.predicted_sigma == Dyadic(3) and inst.predicted_weight == 24 == inst.evaluated_weight()
    with pytest.raises(DomainError):
        complementary_flip(mono("x0*x1", 5), 4, mono("x2", 5), 5)


def test_flip_outside_f_finding():
    # j outside ind(f): the prediction no longer holds
    f, g, m = mono("x0*x1", 5), mono("x2", 5), 5
    inst = complementary_flip(f, 4, g, m, require_j_in_f=False)
    assert inst.predicted_weight == 16
    assert inst.evaluated_weight() == 12 == inst.predicted_weight - (1 << (m - 2 - 1))


def test_flip_random():
    rng = random.Random(6)
    for _ in range(60):
        r, s = rng.randint(1, 4), rng.randint(0, 3)
        m = rng.randint(r + s, r + s + 3)
        order = rng.sample(range(m), r + s)
        f, g = make_monomial(order[:r], m), make_monomial(order[r:], m)
        j = rng.choice(f.indices)
        assert complementary_flip(f, j, g, m).check()


def test_shared_3term():
    b = shared_3term(Monomial(0, 6), "B", 6)
    c = shared_3term(Monomial(0, 7), "c", 7)
    assert (b.evaluated_weight(), c.evaluated_weight()) == (16, 32)
    assert b.kind is TemplateKind.SHARED_3TERM_B and c.kind is TemplateKind.SHARED_3TERM_C
    assert shared_3term(mono("x0", 8), "C", 8).check()
    assert shared_3term(mono("x2*x5", 10), "B", 10, labels=[9, 8, 7, 6, 4, 3]).check()
    with pytest.raises(DomainError):
        shared_3term(Monomial(0, 6), "C", 6)
    with pytest.raises(DomainError):
        shared_3term(Monomial(0, 6), "D", 6)
    with pytest.raises(DomainError):
        shared_3term(mono("x0", 7), "B", 7, labels=[0, 1, 2, 3, 4, 5])


def test_nest_examples():
    inner = disjoint_k_sum([mono("x1*x2", 6), mono("x3*x4", 6)], 6)
    outer = nest(mono("x0", 6), inner, 6)
    assert outer.r == 3 and outer.predicted_sigma == Dyadic(3, 1)
    assert outer.predicted_weight == 12 == outer.evaluated_weight()
    assert outer.params["kernel_kind"] == "disjoint_k_sum"
    assert nested_sigma(Dyadic(3), 1, 2, 5) == Dyadic(12)
    with pytest.raises(DomainError):
        nested_sigma(Dyadic(3), 1, 2, 2)
    with pytest.raises(DomainError):
        nest(mono("x1", 6), inner, 6)


def test_nest_preserves_normalized_weight():
    rng = random.Random(8)
    for _ in range(40):
        m = rng.randint(5, 10)
        s = rng.randint(0, 2)
        order = rng.sample(range(m), m)
        h = make_monomial(order[:s], m)
        rest = order[s:]
        terms = [make_monomial(rng.sample(rest, rng.randint(1, 3)), m) for _ in range(3)]
        Q = parse_poly(" + ".join(str(t) for t in terms), m)
        if Q.is_zero():
            continue
        inst = nest(h, Q, m)
        assert inst.check()
        assert inst.predicted_sigma == kernel_sigma(Q)


def test_factor_head_kernel():
    h, Q = factor_head_kernel(parse_poly("x0*x1*x2 + x0*x1*x3", 5))
    assert h == mono("x0*x1", 5) and Q == parse_poly("x2 + x3", 5)
    h, Q = factor_head_kernel(parse_poly("x0 + x1", 3))
    assert h.mask == 0
    rng = random.Random(1)
    for _ in range(100):
        m = rng.randint(1, 8)
        P = parse_poly(" + ".join(str(Monomial(rng.getrandbits(m), m)) for _ in range(3)), m)
        if P.is_zero():
            continue
        h, Q = factor_head_kernel(P)
        assert mul(h, Q) == P
        assert family_weight(P) == evaluate(P).weight()


def test_template_instance_invariant():
    with pytest.raises(InvariantViolation):
        TemplateInstance(TemplateKind.NESTED, parse_poly("x0", 2), 2, 1, Dyadic(1), 3)


def test_template_from_spec(tmp_path):
    inst = template_from_spec({"kind": "disjoint_k_sum", "m": 4, "params": {"monomials": ["x0*x1", "x2*x3"]}})
    assert inst.predicted_weight == 6
    spec = {"kind": "shared_3term_b", "m": 7, "params": {"head": "x6"}}
    path = tmp_path / "t.json"
    path.write_text(json.dumps(spec))
    assert template_from_spec(path).check()
    assert template_from_spec(json.dumps({"kind": "nested", "m": 5, "params": {"head": "x0", "kernel": "x1 + x2*x3"}})).check()
    assert template_from_spec({"kind": "complementary_flip", "m": 5,
                               "params": {"f": "x0*x1", "j": 0, "g": "x2"}}).check()
    assert template_from_spec({"kind": "rank_ell_degree_drop", "m": 5,
                               "params": {"tails": ["x0*x1*x2"], "g": "x3*x4"}}).predicted_weight == 10
    out = inst.to_json()
    assert out["kind"] == "disjoint_k_sum" and out["params"]["monomials"] == ["x0*x1", "x2*x3"]
    for bad in ["{", {"m": 3}, {"kind": "mystery", "m": 3}, {"kind": "nested", "m": 3, "params": {}}]:
        with pytest.raises(ParseError):
            template_from_spec(bad)
