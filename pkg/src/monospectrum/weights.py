"""Codeword weights from monomial support combinatorics.

``pie_weight`` is the parity inclusion-exclusion identity for a sum of rows.
``sigma`` / ``general_weight`` specialize it to P = h * (f_1 + ... + f_q),
where every intersection of supports is again a monomial support, so only
the union degrees u_S = deg(lcm{f_i : i in S}) matter.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .dyadic import Dyadic
from .errors import DomainError, InvariantViolation
from .monomial import EvalVector, Monomial, Poly

log = logging.getLogger(__name__)

MAX_SUBSET_BITS = 20


def _row(row) -> tuple[int, int]:
    """Normalize a row to (bits, length)."""
    if isinstance(row, EvalVector):
        return row.bits, row.length
    if isinstance(row, str):
        bits = 0
        for pos, ch in enumerate(row):
            if ch not in "01":
                raise DomainError(f"bad bit {ch!r} in row {row!r}")
            bits |= (ch == "1") << pos
        return bits, len(row)
    row = list(row)
    return sum(int(b) << pos for pos, b in enumerate(row)), len(row)


def _subset_unions(masks: Sequence[int]) -> list[int]:
    """OR over every subset, indexed by subset bitmask (index 0 is the empty set)."""
    out = [0] * (1 << len(masks))
    for s in range(1, len(out)):
        low = s & -s
        out[s] = out[s ^ low] | masks[low.bit_length() - 1]
    return out


def pie_weight(rows, J: Iterable[int]) -> int:
    """wt(sum_{j in J} g_j) as sum over nonempty S of (-2)^{|S|-1} |intersection of supports|.

    Rows may be EvalVectors, '0110' strings (position 0 first) or bit
    sequences. ``J`` holds 0-based row indices.
    """
    J = sorted(set(J))
    if not J:
        raise DomainError("J must be nonempty")
    if len(J) > MAX_SUBSET_BITS:
        raise DomainError(f"|J|={len(J)} exceeds subset cap {MAX_SUBSET_BITS}")
    norm = [_row(r) for r in rows]
    lengths = {n for _, n in norm}
    if len(lengths) > 1:
        raise DomainError(f"rows have mismatched lengths {sorted(lengths)}")
    try:
        sel = [norm[j][0] for j in J]
    except IndexError:
        raise DomainError(f"J references rows outside [0, {len(norm) - 1}]") from None
    full = (1 << next(iter(lengths))) - 1
    inter = [full] * (1 << len(sel))
    total = 0
    for s in range(1, len(inter)):
        low = s & -s
        inter[s] = inter[s ^ low] & sel[low.bit_length() - 1]
        size = s.bit_count()
        total += (-2) ** (size - 1) * inter[s].bit_count()
    return total


@dataclass(frozen=True)
class ResidualFamily:
    """P = head * (tails[0] + ... + tails[q-1])."""

    head: Monomial
    tails: tuple
    _unions: list = field(init=False, repr=False, compare=False, default=None)

    def __post_init__(self):
        object.__setattr__(self, "tails", tuple(self.tails))
        for f in self.tails:
            if f.m != self.head.m:
                raise DomainError("head and tails must share the ambient m")

    @classmethod
    def from_poly(cls, p: Poly) -> "ResidualFamily":
        """Split off the largest common monomial factor as the head."""
        if p.is_zero():
            raise DomainError("the zero polynomial has no residual family")
        h = p.common_factor()
        return cls(h, tuple(Monomial(t ^ h.mask, p.m) for t in p.sorted_masks()))

    @property
    def m(self) -> int:
        return self.head.m

    @property
    def q(self) -> int:
        return len(self.tails)

    @property
    def a_max(self) -> int:
        return max(f.degree for f in self.tails)

    @property
    def r(self) -> int:
        return self.head.degree + self.a_max

    def poly(self) -> Poly:
        return Poly.from_masks((self.head.mask | f.mask for f in self.tails), self.m)

    def head_is_disjoint(self) -> bool:
        return all(self.head.disjoint(f) for f in self.tails)

    def unions(self) -> list[int]:
        """lcm mask for every subset of tails, indexed by subset bitmask."""
        if self._unions is None:
            if self.q > MAX_SUBSET_BITS:
                raise DomainError(f"q={self.q} exceeds subset cap {MAX_SUBSET_BITS}")
            object.__setattr__(self, "_unions", _subset_unions([f.mask for f in self.tails]))
        return self._unions

    @property
    def U(self) -> int:
        return max(u.bit_count() for u in self.unions()[1:])


def union_degree(family: ResidualFamily, S: Iterable[int]) -> int:
    """deg lcm{f_i : i in S}; S holds 0-based tail indices."""
    S = set(S)
    if not S:
        raise DomainError("S must be nonempty")
    if not S <= set(range(family.q)):
        raise DomainError(f"S={sorted(S)} outside [0, {family.q - 1}]")
    mask = 0
    for i in S:
        mask |= family.tails[i].mask
    return mask.bit_count()


def sigma(family: ResidualFamily) -> Dyadic:
    """Normalized weight: sum over nonempty S of (-2)^{|S|-1} 2^{a_max - u_S}."""
    if family.q == 0:
        raise DomainError("empty tail set (zero polynomial)")
    a_max = family.a_max
    unions = family.unions()
    total = Dyadic(0)
    for s in range(1, len(unions)):
        size = s.bit_count()
        total += Dyadic((-2) ** (size - 1), unions[s].bit_count() - a_max)
    return total


def general_weight(family: ResidualFamily, m: int | None = None) -> int:
    """wt(h * sum f_i) = 2^{m-r} * Sigma(F)."""
    m = family.m if m is None else m
    if family.r > m:
        raise DomainError(f"ambient degree r={family.r} exceeds m={m}")
    if not family.head_is_disjoint():
        raise DomainError("head shares variables with a tail")
    value = sigma(family).scale2(m - family.r)
    if not value.is_integer():
        raise InvariantViolation(f"d*Sigma = {value} is not an integer")
    return int(value)


@dataclass(frozen=True)
class DyadicWeight:
    """Sigma = N / 2^k, with N = sum_j b_j 2^j."""

    N: int
    k: int
    digits: tuple  # ((j, b_j), ...) from j_min to j_max

    def value(self) -> Dyadic:
        return Dyadic(self.N, self.k)

    def reconstruct(self) -> Dyadic:
        total = Dyadic(0)
        for j, b in self.digits:
            if b:
                total += Dyadic.pow2(j - self.k)
        return total

    def terms(self) -> list[Dyadic]:
        """Nonzero 2^{j-k} terms, largest first."""
        return [Dyadic.pow2(j - self.k) for j, b in reversed(self.digits) if b]

    def terms_text(self) -> str:
        if not self.digits:
            return "0"
        return " + ".join(str(t) for t in self.terms())

    def to_json(self) -> dict:
        return {"N": str(self.N), "k": self.k, "digits": [[j, b] for j, b in self.digits]}


def binary_digits(N: int) -> tuple:
    if N < 0:
        raise InvariantViolation(f"negative numerator {N}")
    if N == 0:
        return ()
    j_min = (N & -N).bit_length() - 1
    return tuple((j, N >> j & 1) for j in range(j_min, N.bit_length()))


def dyadic_decompose(sig: Dyadic, family: ResidualFamily) -> DyadicWeight:
    k = family.U - family.a_max
    scaled = Dyadic.from_value(sig).scale2(k)
    if not scaled.is_integer():
        raise InvariantViolation(f"2^{k} * {sig} is not an integer")
    N = int(scaled)
    return DyadicWeight(N, k, binary_digits(N))


def dyadic_numerator(family: ResidualFamily) -> int:
    """N as the integer sum of (-1)^{|S|-1} 2^{U - u_S + |S| - 1}; every exponent is >= 0."""
    unions = family.unions()
    U = family.U
    N = 0
    for s in range(1, len(unions)):
        size = s.bit_count()
        e = U - unions[s].bit_count() + size - 1
        if e < 0:
            raise InvariantViolation(f"negative exponent {e}")
        N += (-1) ** (size - 1) << e
    return N


def dyadic_coefficients(family: ResidualFamily) -> dict[int, int]:
    """Group the Sigma expansion by power of two: Sigma = sum_l c_l / 2^l.

    c_l collects (-1)^{|S|-1} over subsets with u_S - a_max - |S| + 1 = l.
    Zero coefficients are dropped.
    """
    a_max = family.a_max
    unions = family.unions()
    coeffs: dict[int, int] = {}
    for s in range(1, len(unions)):
        size = s.bit_count()
        level = unions[s].bit_count() - a_max - size + 1
        coeffs[level] = coeffs.get(level, 0) + (-1) ** (size - 1)
    return {l: c for l, c in sorted(coeffs.items()) if c}


def even_coefficient_levels(family: ResidualFamily) -> list[int]:
    """Levels whose grouped coefficient is even. Logged, never raised."""
    bad = [l for l, c in dyadic_coefficients(family).items() if c % 2 == 0]
    if bad:
        log.info("even dyadic coefficients at levels %s for %s", bad, family.poly())
    return bad
