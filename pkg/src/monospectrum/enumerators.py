"""Codeword multiplicities from LTA(m,2) orbit sizes.

Every count is a sum of 2^exponent over seeds, with the exponents kept as
integers so totals stay exact at any m. Explicit orbits (m <= orbit cap) are
used only to verify those exponents.
"""
from __future__ import annotations

import enum
import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .caps import HARD_LIMITS, default_caps
from .codes import DecreasingSet, contains_poly
from .errors import CapExceeded, DomainError
from .lta import (
    constrained_partition_weight,
    kernel_freedom_dimension,
    log2_exact,
    minkowski_collision,
    orbit_size_formula,
    orbit_tables,
    partition_weight,
)
from .monomial import Monomial, Poly, anf_from_table
from .templates import disjoint_k_sum_weight


class SeedKind(str, enum.Enum):
    DISJOINT_TUPLE = "disjoint_tuple"
    NESTED_DEGREE_DROP = "nested_degree_drop"


@dataclass(frozen=True)
class SeedDescriptor:
    kind: SeedKind
    h: Monomial
    S: tuple
    j: int | None
    exponent: int | None
    terms: dict = field(default_factory=dict, compare=False)

    def poly(self) -> Poly:
        monos = list(self.S)
        if self.j is not None:
            monos.append(Monomial(self.h.mask | 1 << self.j, self.h.m))
        return Poly.from_monomials(monos, self.h.m)

    def to_json(self) -> dict:
        return {
            "kind": self.kind.value,
            "h": str(self.h),
            "S": [str(f) for f in self.S],
            "j": self.j,
            "exponent": self.exponent,
            "poly": str(self.poly()),
            "terms": dict(self.terms),
        }


@dataclass
class EnumerationReport:
    weight: int
    seeds: list
    incomplete: bool = False
    verified: dict | None = None
    notes: dict = field(default_factory=dict)

    @property
    def total_count(self) -> int:
        return sum(1 << s.exponent for s in self.seeds if s.exponent is not None)

    def to_json(self) -> dict:
        out = {
            "weight": str(self.weight),
            "count": str(self.total_count),
            "incomplete": self.incomplete,
            "seeds": [s.to_json() for s in self.seeds],
            "notes": self.notes,
        }
        if self.verified is not None:
            out["verified"] = self.verified
        return out


def _degree_r(I: DecreasingSet, r: int) -> list[Monomial]:
    return I.of_degree(r)


def enumerate_disjoint_tuples(I: DecreasingSet, r: int, k: int, ordered: bool = False) -> list[tuple]:
    """k-element selections of pairwise-disjoint degree-r monomials of I."""
    if k < 1:
        raise DomainError("k must be at least 1")
    pool = _degree_r(I, r)
    out: list[tuple] = []

    def extend(start: int, used: int, chosen: list):
        if len(chosen) == k:
            out.append(tuple(chosen))
            return
        for pos in range(start, len(pool)):
            f = pool[pos]
            if f.mask & used:
                continue
            chosen.append(f)
            extend(pos + 1, used | f.mask, chosen)
            chosen.pop()

    if k * r <= I.m:
        extend(0, 0, [])
    if ordered:
        out = [perm for tup in out for perm in itertools.permutations(tup)]
    return out


def _orbit_m_ok(m: int, cap: int | None) -> bool:
    cap = default_caps().orbit_m if cap is None else cap
    return m <= min(cap, HARD_LIMITS["orbit_m"])


def count_disjoint_k_sum(I: DecreasingSet, r: int, k: int, ordered: bool = False,
                         cap: int | None = None) -> EnumerationReport:
    """Sum of 2^{kr + sum |lambda_{f_i}|} over disjoint k-tuples.

    For k >= 2 and m within the orbit cap, the report notes also carry a
    collision-corrected count: each exponent reduced by the pairwise collision
    exponents of the tails' full LTA orbits.
    """
    if r < 1:
        raise DomainError("r must be at least 1")
    m = I.m
    weight = disjoint_k_sum_weight(m, r, k) if k * r <= m else 0
    seeds = []
    for tup in enumerate_disjoint_tuples(I, r, k, ordered):
        lam = [partition_weight(f) for f in tup]
        seeds.append(SeedDescriptor(
            SeedKind.DISJOINT_TUPLE, Monomial(0, m), tup, None, k * r + sum(lam),
            {"kr": k * r, "partition_weights": lam},
        ))
    report = EnumerationReport(weight, seeds, notes={"ordered": ordered, "r": r, "k": k})
    if k >= 2 and seeds and _orbit_m_ok(m, cap):
        corrected = 0
        quotients = []
        for s in ({frozenset(x.S): x for x in seeds}).values():
            alpha = 0
            for a, b in itertools.combinations(s.S, 2):
                c = minkowski_collision(a, b, None, m, cap)
                quotients.append(str(c.quotient))
                if c.alpha is None:
                    alpha = None
                    break
                alpha += c.alpha
            if alpha is None:
                corrected = None
                break
            corrected += 1 << (s.exponent - alpha)
        report.notes["collision_corrected_count"] = None if corrected is None else str(corrected)
        if corrected is None:
            report.notes["collision_quotients"] = quotients
    return report


def minimum_weight_count(I: DecreasingSet) -> EnumerationReport:
    """k = 1, r = r_plus: orbits of the maximal-degree monomials."""
    if I.r_plus is None:
        raise DomainError("empty code")
    return count_disjoint_k_sum(I, I.r_plus, 1)


def nested_seeds(I: DecreasingSet, r: int | None = None) -> list[tuple[Monomial, tuple, int]]:
    """(h, S, j) triples: h in I of degree r-2, S of degree-r multiples of h whose
    quotients are pairwise disjoint, x_j outside h and every quotient, h*x_j in I.

    For S empty only j > max ind(h) is kept, since h*x_j is otherwise produced
    again from a different head.
    """
    r = I.r_plus if r is None else r
    if r is None or r < 2:
        raise DomainError("nested degree-drop seeds need r >= 2")
    m = I.m
    top = _degree_r(I, r)
    out = []
    for h in I.of_degree(r - 2):
        multiples = [f for f in top if h.divides(f)]
        for ell in range(len(multiples) + 1):
            for S in itertools.combinations(multiples, ell):
                used = h.mask
                ok = True
                for f in S:
                    q = f.mask ^ h.mask
                    if q & used:
                        ok = False
                        break
                    used |= q
                if not ok:
                    continue
                low = h.mask.bit_length() if ell == 0 else 0
                for j in range(low, m):
                    if used >> j & 1 or (h.mask | 1 << j) not in I:
                        continue
                    out.append((h, S, j))
    return out


def nested_seed_exponent(h: Monomial, S: tuple, j: int, cap: int | None = None) -> tuple[int | None, dict]:
    """E = (r-2) + |lambda_h| + 2l + sum |lambda_{f_i}(q_i)| - sum alpha + 1 + |lambda_{lcm S}(x_j)|.

    Returns (None, terms) when a collision exponent is needed beyond the cap or
    a Minkowski quotient is not a power of two.
    """
    m = h.m
    ell = len(S)
    quotients = [Monomial(f.mask ^ h.mask, m) for f in S]
    tail = sum(constrained_partition_weight(f, q) for f, q in zip(S, quotients))
    prod = h
    for f in S:
        prod = Monomial(prod.mask | f.mask, m)
    linear = 1 + constrained_partition_weight(prod, Monomial(1 << j, m))
    head = h.degree + partition_weight(h)
    terms = {"head": head, "tail": 2 * ell + tail, "linear": linear, "alpha": 0}
    if ell >= 2:
        if not _orbit_m_ok(m, cap):
            terms["alpha"] = None
            return None, terms
        alpha = 0
        for a, b in itertools.combinations(quotients, 2):
            c = minkowski_collision(a, b, h, m, cap)
            if c.alpha is None:
                terms["alpha"] = None
                terms["quotient"] = str(c.quotient)
                return None, terms
            alpha += c.alpha
        terms["alpha"] = alpha
    return head + terms["tail"] - terms["alpha"] + linear, terms


def count_nested_degree_drop(I: DecreasingSet, r: int | None = None, cap: int | None = None) -> EnumerationReport:
    r = I.r_plus if r is None else r
    if r != I.r_plus:
        raise DomainError(f"r must equal r_plus = {I.r_plus}")
    seeds = []
    incomplete = False
    for h, S, j in nested_seeds(I, r):
        e, terms = nested_seed_exponent(h, S, j, cap)
        incomplete |= e is None
        seeds.append(SeedDescriptor(SeedKind.NESTED_DEGREE_DROP, h, S, j, e, terms))
    notes = {"r": r, "empty_S_rule": "j > max ind(h); linear term |lambda_h(x_j)|"}
    return EnumerationReport(2 << (I.m - r), seeds, incomplete, notes=notes)


# explicit checks --------------------------------------------------------------

def seed_orbits(report: EnumerationReport, cap: int | None = None) -> list[np.ndarray]:
    return [orbit_tables(s.poly(), None, cap) for s in report.seeds]


def verify_report(report: EnumerationReport, I: DecreasingSet, cap: int | None = None,
                  dim_cap: int | None = None, check_closure: bool = True) -> dict:
    """Compare each seed exponent with its explicit orbit, test pairwise
    disjointness and code closure, and compare with the exhaustive count."""
    if not _orbit_m_ok(I.m, cap):
        raise CapExceeded("m", I.m, cap if cap is not None else default_caps().orbit_m,
                          "explicit orbits are needed for verification")
    orbits = seed_orbits(report, cap)
    sizes = [len(o) for o in orbits]
    mismatched = [i for i, (s, n) in enumerate(zip(report.seeds, sizes))
                  if s.exponent is None or 1 << s.exponent != n]
    union = np.unique(np.concatenate(orbits)) if orbits else np.empty(0, dtype=np.uint64)
    disjoint = len(union) == sum(sizes)
    out = {
        "seed_sizes_match": not mismatched,
        "mismatched_seeds": mismatched,
        "orbits_disjoint": disjoint,
        "union_size": str(len(union)),
    }
    if check_closure:
        out["closed_in_code"] = all(contains_poly(I, anf_from_table(int(t), I.m)) for t in union)
    from .oracle import full_weight_distribution
    try:
        exhaustive = full_weight_distribution(I, dim_cap)[report.weight]
    except CapExceeded as exc:
        out["exhaustive_count"] = None
        out["exhaustive_skipped"] = str(exc)
    else:
        out["exhaustive_count"] = str(exhaustive)
        out["coverage"] = str(Fraction(len(union), exhaustive)) if exhaustive else None
        out["count_matches_exhaustive"] = report.total_count == exhaustive
    out["ok"] = not mismatched and disjoint and out.get("closed_in_code", True)
    return out


# general orbit-size formula ----------------------------------------------------

@dataclass
class MasterOrbitReport:
    h: Monomial
    Q: Poly
    head_term: int
    beta: int
    beta_mix: int
    alpha: int | None
    quotients: list
    findings: list
    head_stabilizer_exponent: float
    full_orbit_exponent: float

    @property
    def exponent(self) -> int | None:
        if self.alpha is None:
            return None
        return self.head_term + self.beta - self.alpha

    @property
    def matches_head_stabilizer(self) -> bool:
        return self.exponent is not None and self.exponent == self.head_stabilizer_exponent

    @property
    def matches_full_orbit(self) -> bool:
        return self.exponent is not None and self.exponent == self.full_orbit_exponent

    def to_json(self) -> dict:
        return {
            "h": str(self.h), "Q": str(self.Q), "exponent": self.exponent,
            "head_term": self.head_term, "beta": self.beta, "beta_mix": self.beta_mix,
            "alpha": self.alpha, "quotients": self.quotients, "findings": self.findings,
            "head_stabilizer_exponent": self.head_stabilizer_exponent,
            "full_orbit_exponent": self.full_orbit_exponent,
            "matches_head_stabilizer": self.matches_head_stabilizer,
            "matches_full_orbit": self.matches_full_orbit,
        }


def _exp(n: int) -> float:
    e = log2_exact(n)
    return e if e is not None else math.log2(n)


def master_orbit_size(h: Monomial, Q: Poly, m: int | None = None, cap: int | None = None) -> MasterOrbitReport:
    """deg(h) + |lambda_h| + beta - alpha next to the explicit orbit exponents of h*Q.

    alpha sums the pairwise collision exponents of the kernel terms' orbits
    under the head stabilizer; a quotient that is not a power of two is listed
    under ``findings`` and leaves the exponent undefined.
    """
    m = Q.m if m is None else m
    if h.m != m or Q.m != m:
        raise DomainError("h, Q and m disagree")
    if not _orbit_m_ok(m, cap):
        raise CapExceeded("m", m, cap if cap is not None else default_caps().orbit_m,
                          "alpha and beta need explicit orbits")
    freedom = kernel_freedom_dimension(Q, h, m, cap)
    tails = Q.monomials()
    alpha = 0
    quotients, findings = [], []
    for a, b in itertools.combinations(tails, 2):
        c = minkowski_collision(a, b, h, m, cap)
        quotients.append(str(c.quotient))
        if c.alpha is None:
            findings.append({"u_i": str(a), "u_j": str(b), "sizes": [c.size_i, c.size_j],
                             "sum_size": c.sum_size, "quotient": str(c.quotient)})
            alpha = None
        elif alpha is not None:
            alpha += c.alpha
    P = Poly.from_masks((h.mask | u.mask for u in tails), m)
    head_fix = h if h.mask else None
    return MasterOrbitReport(
        h, Q, orbit_size_formula(h), freedom.beta, freedom.beta_mix, alpha, quotients, findings,
        _exp(len(orbit_tables(P, head_fix, cap))), _exp(len(orbit_tables(P, None, cap))),
    )
