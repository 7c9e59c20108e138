"""Structural weight templates with closed-form weights.

Every constructor returns a TemplateInstance carrying the polynomial, the
normalization degree r (so d = 2^(m-r)), the predicted normalized weight and
the predicted weight. ``TemplateInstance.check()`` compares the prediction with
truth-table evaluation.
"""
from __future__ import annotations

import enum
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

from .dyadic import Dyadic
from .errors import DomainError, InvariantViolation, ParseError
from .monomial import Monomial, Poly, evaluate, make_monomial, mul, parse_monomial, parse_poly
from .weights import ResidualFamily, general_weight, sigma


class TemplateKind(str, enum.Enum):
    DISJOINT_K_SUM = "disjoint_k_sum"
    RANK_ELL_DEGREE_DROP = "rank_ell_degree_drop"
    COMPLEMENTARY_FLIP = "complementary_flip"
    SHARED_3TERM_B = "shared_3term_b"
    SHARED_3TERM_C = "shared_3term_c"
    NESTED = "nested"


@dataclass(frozen=True)
class TemplateInstance:
    kind: TemplateKind
    poly: Poly
    m: int
    r: int
    predicted_sigma: Dyadic
    predicted_weight: int
    params: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        if self.predicted_sigma.scale2(self.m - self.r) != self.predicted_weight:
            raise InvariantViolation(
                f"{self.kind.value}: d*Sigma = {self.predicted_sigma.scale2(self.m - self.r)} "
                f"!= predicted weight {self.predicted_weight}"
            )

    @property
    def d(self) -> int:
        return 1 << (self.m - self.r)

    def evaluated_weight(self, cap: int | None = None) -> int:
        return evaluate(self.poly, cap).weight()

    def check(self, cap: int | None = None) -> bool:
        return self.evaluated_weight(cap) == self.predicted_weight

    def to_json(self) -> dict:
        out = {
            "kind": self.kind.value,
            "m": self.m,
            "r": self.r,
            "poly": str(self.poly),
            "predicted_sigma": str(self.predicted_sigma),
            "predicted_weight": str(self.predicted_weight),
        }
        out["params"] = {k: _jsonable(v) for k, v in self.params.items()}
        return out


def _jsonable(v):
    if isinstance(v, (Monomial, Poly, Dyadic)):
        return str(v)
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    return v


def _pairwise_disjoint(ms: Sequence[Monomial]) -> bool:
    seen = 0
    for f in ms:
        if f.mask & seen:
            return False
        seen |= f.mask
    return True


def _check_m(ms, m):
    for f in ms:
        if f.m != m:
            raise DomainError(f"monomial {f} has m={f.m}, expected {m}")


# disjoint k-sums ------------------------------------------------------------

def sigma_k(r: int, k: int) -> Dyadic:
    """2^{r-1} (1 - (1 - 2^{1-r})^k)."""
    if r < 1 or k < 0:
        raise DomainError("need r >= 1 and k >= 0")
    base = Dyadic(1) - Dyadic.pow2(1 - r)
    return (Dyadic(1) - base**k).scale2(r - 1)


def disjoint_k_sum_weight(m: int, r: int, k: int) -> int:
    """2^{m-kr-1} (2^{kr} - (2^r - 2)^k)."""
    if k * r > m:
        raise DomainError(f"kr={k * r} exceeds m={m}")
    return int(Dyadic((1 << (k * r)) - ((1 << r) - 2) ** k).scale2(m - k * r - 1))


def disjoint_k_sum(fs: Sequence[Monomial], m: int) -> TemplateInstance:
    if not fs:
        raise DomainError("need at least one monomial")
    _check_m(fs, m)
    degrees = {f.degree for f in fs}
    if len(degrees) != 1:
        raise DomainError(f"all monomials must share one degree, got {sorted(degrees)}")
    (r,) = degrees
    k = len(fs)
    if r < 1:
        raise DomainError("degree must be at least 1")
    if not _pairwise_disjoint(fs):
        raise DomainError("supports overlap")
    if k * r > m:
        raise DomainError(f"kr={k * r} exceeds m={m}")
    poly = Poly.from_monomials(fs, m)
    return TemplateInstance(
        TemplateKind.DISJOINT_K_SUM, poly, m, r, sigma_k(r, k), disjoint_k_sum_weight(m, r, k),
        {"k": k, "monomials": list(fs)},
    )


@dataclass(frozen=True)
class SigmaKReport:
    table: dict  # (r, k) -> Dyadic
    below_two: list
    two_to_two_and_half: list


def classify_sigma_k(r_max: int, k_max: int, r_min: int = 1) -> SigmaKReport:
    """Scan Sigma_k(r) for r_min <= r <= r_max, 1 <= k <= k_max."""
    if not (1 <= r_min <= r_max <= 16 and 1 <= k_max <= 16):
        raise DomainError("bounds must lie in [1, 16]")
    table = {(r, k): sigma_k(r, k) for r in range(r_min, r_max + 1) for k in range(1, k_max + 1)}
    two, two_half = Dyadic(2), Dyadic(5, 1)
    below = [rk for rk, s in table.items() if s < two]
    band = [rk for rk, s in table.items() if two <= s < two_half]
    return SigmaKReport(table, below, band)


# rank-l plus a degree drop ----------------------------------------------------

def rank_ell_sigma(r: int, ell: int) -> Dyadic:
    """2^{r-1} (1 - (1 - 2^{1-r})^l (1 - 2^{2-r}))."""
    a = Dyadic(1) - Dyadic.pow2(1 - r)
    b = Dyadic(1) - Dyadic.pow2(2 - r)
    return (Dyadic(1) - a**ell * b).scale2(r - 1)


def rank_ell_weight(m: int, r: int, ell: int) -> int:
    value = rank_ell_sigma(r, ell).scale2(m - r)
    if not value.is_integer():
        raise InvariantViolation(f"rank-l weight {value} is not an integer")
    return int(value)


def rank_ell_degree_drop(fs: Sequence[Monomial], g: Monomial, m: int) -> TemplateInstance:
    _check_m(list(fs) + [g], m)
    r = g.degree + 1
    if r < 2:
        raise DomainError("need r >= 2 (deg g >= 1)")
    if r > m:
        raise DomainError(f"r={r} exceeds m={m}")
    if any(f.degree != r for f in fs):
        raise DomainError(f"every f_j must have degree deg(g)+1 = {r}")
    if not _pairwise_disjoint(list(fs) + [g]):
        raise DomainError("supports overlap")
    ell = len(fs)
    poly = Poly.from_monomials(list(fs) + [g], m)
    sig = rank_ell_sigma(r, ell)
    wt = rank_ell_weight(m, r, ell)
    if (ell == 0 or r == 2) and wt != 2 << (m - r):
        raise InvariantViolation(f"special case l={ell}, r={r} does not give 2d")
    return TemplateInstance(
        TemplateKind.RANK_ELL_DEGREE_DROP, poly, m, r, sig, wt,
        {"ell": ell, "tails": list(fs), "g": g},
    )


# complementary flip -----------------------------------------------------------

def complementary_flip(f: Monomial, j: int, g: Monomial, m: int, require_j_in_f: bool = True) -> TemplateInstance:
    """P = f + (x_j + 1) g with predicted weight d (1 + 2^{r-s-1}), d = 2^{m - deg f}.

    The support-disjointness behind the prediction needs x_j = 1 on supp(f),
    i.e. j in ind(f); ``require_j_in_f=False`` builds the other case anyway so
    the oracle can probe it.
    """
    _check_m([f, g], m)
    if not 0 <= j < m:
        raise DomainError(f"j={j} outside [0, {m - 1}]")
    if g.mask & (f.mask | 1 << j):
        raise DomainError("ind(g) must avoid ind(f) and j")
    if require_j_in_f and not f.mask >> j & 1:
        raise DomainError(f"j={j} is not in ind(f)")
    r, s = f.degree, g.degree
    xj = Monomial(1 << j, m)
    poly = f.to_poly() + mul(xj, g.to_poly()) + g.to_poly()
    sig = Dyadic(1) + Dyadic.pow2(r - s - 1)
    return TemplateInstance(
        TemplateKind.COMPLEMENTARY_FLIP, poly, m, r, sig, int(sig.scale2(m - r)),
        {"f": f, "j": j, "g": g, "s": s},
    )


# shared 3-term kernels ----------------------------------------------------------

# kernel supports on labels X_1..X_7 (0-based positions into the label list)
SHARED_3TERM_SUPPORTS = {
    "B": ((0, 1, 2), (1, 3, 4), (2, 3, 5)),
    "C": ((0, 1, 2), (2, 3, 4), (3, 5, 6)),
}


def shared_3term_kernel(variant: str, labels: Sequence[int], m: int) -> list[Monomial]:
    variant = variant.upper()
    if variant not in SHARED_3TERM_SUPPORTS:
        raise DomainError(f"variant must be B or C, got {variant!r}")
    return [make_monomial([labels[i] for i in sup], m) for sup in SHARED_3TERM_SUPPORTS[variant]]


def shared_3term(h: Monomial, variant: str, m: int, labels: Sequence[int] | None = None) -> TemplateInstance:
    variant = variant.upper()
    need = 6 if variant == "B" else 7
    if labels is None:
        labels = [i for i in range(m) if not h.mask >> i & 1][:need]
        if len(labels) < need:
            raise DomainError(f"variant {variant} needs {need} variables outside the head; m={m} is too small")
    labels = list(labels)
    if len(labels) < need or len(set(labels[:need])) < need:
        raise DomainError(f"need {need} distinct labels")
    if any(not 0 <= x < m or h.mask >> x & 1 for x in labels[:need]):
        raise DomainError("labels must be in range and avoid the head")
    tails = shared_3term_kernel(variant, labels, m)
    poly = mul(h, Poly.from_monomials(tails, m))
    r = h.degree + 3
    kind = TemplateKind.SHARED_3TERM_B if variant == "B" else TemplateKind.SHARED_3TERM_C
    return TemplateInstance(
        kind, poly, m, r, Dyadic(2), 2 << (m - r),
        {"head": h, "variant": variant, "labels": labels[:need], "tails": tails},
    )


# nesting ----------------------------------------------------------------------

def kernel_sigma(Q: Poly) -> Dyadic:
    """Sigma(Q) = wt(Q) / 2^{m - deg Q}, from the general weight formula."""
    if Q.is_zero():
        raise DomainError("zero kernel")
    return sigma(ResidualFamily.from_poly(Q))


def nested_sigma(sigma_q: Dyadic, s: int, t: int, r: int) -> Dyadic:
    """Normalized weight of h*Q at ambient degree r >= s + t: 2^{r-(s+t)} Sigma(Q)."""
    if r < s + t:
        raise DomainError("ambient degree must be at least s + t")
    return Dyadic.from_value(sigma_q).scale2(r - s - t)


def nest(h: Monomial, Q: Poly | TemplateInstance, m: int) -> TemplateInstance:
    inner = None
    if isinstance(Q, TemplateInstance):
        inner, Q = Q, Q.poly
    _check_m([h], m)
    if Q.m != m:
        raise DomainError("kernel has a different m")
    if Q.is_zero():
        raise DomainError("zero kernel")
    if h.mask & Q.support_mask:
        raise DomainError("head and kernel share variables")
    s, t = h.degree, Q.degree
    if inner is not None and inner.r == t:
        sig_q = inner.predicted_sigma
    else:
        sig_q = kernel_sigma(Q)
    r = s + t
    sig = nested_sigma(sig_q, s, t, r)
    return TemplateInstance(
        TemplateKind.NESTED, mul(h, Q), m, r, sig, int(sig.scale2(m - r)),
        {"head": h, "kernel": Q, "s": s, "t": t,
         "kernel_kind": inner.kind.value if inner is not None else None},
    )


# head / kernel factorization ----------------------------------------------------

def factor_head_kernel(P: Poly) -> tuple[Monomial, Poly]:
    """h = gcd of all terms (1 if none shared), Q = P / h, so mul(h, Q) == P."""
    if P.is_zero():
        raise DomainError("the zero polynomial has no head")
    h = P.common_factor()
    Q = Poly(frozenset(t ^ h.mask for t in P.terms), P.m)
    return h, Q


def family_weight(P: Poly) -> int:
    """Weight of any nonzero polynomial through its head/kernel family."""
    return general_weight(ResidualFamily.from_poly(P))


# JSON ingestion ---------------------------------------------------------------

def _mono(text, m):
    return parse_monomial(str(text), m)


def template_from_spec(spec) -> TemplateInstance:
    """Build from {"kind": ..., "m": int, "params": {...}} (dict, JSON text or path)."""
    if isinstance(spec, (str, Path)):
        text = str(spec)
        if not text.lstrip().startswith("{") and Path(text).exists():
            text = Path(text).read_text()
        try:
            spec = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ParseError(f"template spec is not valid JSON: {exc}") from None
    try:
        kind = str(spec["kind"]).lower()
        m = int(spec["m"])
    except (KeyError, TypeError, ValueError):
        raise ParseError('template spec needs "kind" and integer "m"') from None
    params = spec.get("params", {}) or {}
    try:
        if kind == TemplateKind.DISJOINT_K_SUM.value:
            return disjoint_k_sum([_mono(t, m) for t in params["monomials"]], m)
        if kind == TemplateKind.RANK_ELL_DEGREE_DROP.value:
            return rank_ell_degree_drop([_mono(t, m) for t in params.get("tails", [])], _mono(params["g"], m), m)
        if kind == TemplateKind.COMPLEMENTARY_FLIP.value:
            return complementary_flip(_mono(params["f"], m), int(params["j"]), _mono(params["g"], m), m,
                                      require_j_in_f=bool(params.get("require_j_in_f", True)))
        if kind in ("shared_3term", TemplateKind.SHARED_3TERM_B.value, TemplateKind.SHARED_3TERM_C.value):
            variant = params.get("variant") or kind[-1]
            return shared_3term(_mono(params.get("head", "1"), m), variant, m, params.get("labels"))
        if kind == TemplateKind.NESTED.value:
            return nest(_mono(params["head"], m), parse_poly(str(params["kernel"]), m), m)
    except KeyError as exc:
        raise ParseError(f"template {kind!r} is missing parameter {exc}") from None
    raise ParseError(f"unknown template kind {kind!r}")
