"""Boolean monomials and polynomials in R_m = F2[x_0..x_{m-1}] / (x_i^2 - x_i).

A monomial is stored as the bitmask of its variable indices, a polynomial as
the frozenset of its monomial masks (algebraic normal form). Truth tables are
Python ints used as bitsets: bit ``t`` holds the value at the point whose
coordinates are the bits of ``t``, with x_0 the least significant bit.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from functools import reduce
from typing import Iterable, Iterator, Sequence

from .caps import default_caps
from .errors import CapExceeded, DomainError, ParseError


def bit_indices(mask: int) -> Iterator[int]:
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def mask_of(indices: Iterable[int]) -> int:
    out = 0
    for i in indices:
        out |= 1 << i
    return out


@dataclass(frozen=True, order=True)
class Monomial:
    """Squarefree product of variables; mask 0 is the constant 1."""

    mask: int
    m: int

    def __post_init__(self):
        if self.m < 0:
            raise DomainError(f"negative variable count m={self.m}")
        if self.mask < 0 or self.mask >> self.m:
            raise DomainError(f"monomial mask {self.mask:#x} has indices outside [0, {self.m - 1}]")

    @property
    def indices(self) -> tuple[int, ...]:
        return tuple(bit_indices(self.mask))

    @property
    def degree(self) -> int:
        return self.mask.bit_count()

    def divides(self, other: "Monomial") -> bool:
        return self.mask & other.mask == self.mask

    def disjoint(self, other: "Monomial") -> bool:
        return not self.mask & other.mask

    def to_poly(self) -> "Poly":
        return Poly(frozenset([self.mask]), self.m)

    def __mul__(self, other):
        if isinstance(other, Monomial):
            _same_m(self, other)
            return Monomial(self.mask | other.mask, self.m)
        if isinstance(other, Poly):
            return mul(self, other)
        return NotImplemented

    def __add__(self, other):
        return self.to_poly() + other

    def __str__(self):
        return format_monomial(self.mask)


@dataclass(frozen=True)
class Poly:
    """Element of R_m in algebraic normal form."""

    terms: frozenset
    m: int

    def __post_init__(self):
        if not isinstance(self.terms, frozenset):
            object.__setattr__(self, "terms", frozenset(self.terms))
        limit = 1 << self.m
        for t in self.terms:
            if not 0 <= t < limit:
                raise DomainError(f"term mask {t:#x} outside ambient m={self.m}")

    @classmethod
    def zero(cls, m: int) -> "Poly":
        return cls(frozenset(), m)

    @classmethod
    def one(cls, m: int) -> "Poly":
        return cls(frozenset([0]), m)

    @classmethod
    def from_masks(cls, masks: Iterable[int], m: int) -> "Poly":
        """XOR-collect masks: a repeated monomial cancels."""
        acc: set[int] = set()
        for t in masks:
            acc ^= {t}
        return cls(frozenset(acc), m)

    @classmethod
    def from_monomials(cls, monos: Iterable[Monomial], m: int) -> "Poly":
        masks = []
        for f in monos:
            if f.m != m:
                raise DomainError(f"monomial {f} has m={f.m}, expected {m}")
            masks.append(f.mask)
        return cls.from_masks(masks, m)

    def is_zero(self) -> bool:
        return not self.terms

    @property
    def degree(self) -> int:
        """Max term degree; -1 for the zero polynomial."""
        return max((t.bit_count() for t in self.terms), default=-1)

    @property
    def support_mask(self) -> int:
        """Mask of all variables that occur in some term."""
        return reduce(lambda a, b: a | b, self.terms, 0)

    def sorted_masks(self) -> list[int]:
        return sorted(self.terms, key=lambda t: (t.bit_count(), t))

    def monomials(self) -> list[Monomial]:
        return [Monomial(t, self.m) for t in self.sorted_masks()]

    def key(self) -> tuple[int, ...]:
        """Canonical hashable form: sorted tuple of monomial masks."""
        return tuple(sorted(self.terms))

    def common_factor(self) -> Monomial:
        """Largest monomial dividing every term (1 for the zero polynomial)."""
        if not self.terms:
            return Monomial(0, self.m)
        return Monomial(reduce(lambda a, b: a & b, self.terms), self.m)

    def __add__(self, other):
        if isinstance(other, Monomial):
            other = other.to_poly()
        if not isinstance(other, Poly):
            return NotImplemented
        _same_m(self, other)
        return Poly(self.terms ^ other.terms, self.m)

    __radd__ = __add__

    def __mul__(self, other):
        if isinstance(other, Monomial):
            return mul(other, self)
        if not isinstance(other, Poly):
            return NotImplemented
        _same_m(self, other)
        acc: set[int] = set()
        for a in self.terms:
            for b in other.terms:
                acc ^= {a | b}
        return Poly(frozenset(acc), self.m)

    def __str__(self):
        return format_poly(self)


def _same_m(a, b):
    if a.m != b.m:
        raise DomainError(f"ambient mismatch: m={a.m} vs m={b.m}")


# construction and algebra ----------------------------------------------------

def make_monomial(indices: Sequence[int], m: int) -> Monomial:
    seen = set()
    for i in indices:
        if not 0 <= i < m:
            raise DomainError(f"index {i} outside [0, {m - 1}]")
        if i in seen:
            raise DomainError(f"duplicate index {i}")
        seen.add(i)
    return Monomial(mask_of(seen), m)


def lcm(ms: Sequence[Monomial]) -> Monomial:
    if not ms:
        raise DomainError("lcm of an empty list")
    m = ms[0].m
    mask = 0
    for f in ms:
        if f.m != m:
            raise DomainError("lcm over monomials with different m")
        mask |= f.mask
    return Monomial(mask, m)


def mul(h: Monomial, p: Poly) -> Poly:
    _same_m(h, p)
    return Poly.from_masks((h.mask | t for t in p.terms), p.m)


# evaluation ------------------------------------------------------------------

@dataclass(frozen=True)
class EvalVector:
    bits: int
    m: int

    @property
    def length(self) -> int:
        return 1 << self.m

    def weight(self) -> int:
        return self.bits.bit_count()

    def __xor__(self, other: "EvalVector") -> "EvalVector":
        _same_m(self, other)
        return EvalVector(self.bits ^ other.bits, self.m)

    def __and__(self, other: "EvalVector") -> "EvalVector":
        _same_m(self, other)
        return EvalVector(self.bits & other.bits, self.m)

    def __getitem__(self, t: int) -> int:
        if not 0 <= t < self.length:
            raise IndexError(t)
        return self.bits >> t & 1

    def to_list(self) -> list[int]:
        return [self.bits >> t & 1 for t in range(self.length)]

    def to_string(self) -> str:
        """'0101'-style string, point 0 first."""
        return "".join(str(b) for b in self.to_list())


def _check_eval_m(m: int, cap: int | None):
    cap = default_caps().eval_m if cap is None else cap
    if m > cap:
        raise CapExceeded("m", m, cap, "evaluation-backed operations need 2^m-bit vectors")


def monomial_table(mask: int, m: int) -> int:
    """Truth table of one monomial, built by doubling over the variables."""
    v = 1
    length = 1
    for i in range(m):
        if mask >> i & 1:
            v <<= length
        else:
            v |= v << length
        length <<= 1
    return v


def evaluate(p: Poly, cap: int | None = None) -> EvalVector:
    _check_eval_m(p.m, cap)
    bits = 0
    for t in p.terms:
        bits ^= monomial_table(t, p.m)
    return EvalVector(bits, p.m)


def weight(p: Poly | Monomial, cap: int | None = None) -> int:
    """Hamming weight of ev(p); monomials use 2^(m - deg) at any m."""
    if isinstance(p, Monomial):
        return 1 << (p.m - p.degree)
    if len(p.terms) == 1:
        (t,) = p.terms
        return 1 << (p.m - t.bit_count())
    return evaluate(p, cap).weight()


def weight_by_points(p: Poly) -> int:
    """Count points with p(x) = 1 one point at a time. Slow; used as an oracle."""
    count = 0
    for x in range(1 << p.m):
        count += sum(1 for t in p.terms if x & t == t) & 1
    return count


def anf_from_table(bits: int, m: int) -> Poly:
    """Inverse of evaluate: binary Moebius transform of a truth table."""
    n = 1 << m
    a = bits
    for i in range(m):
        step = 1 << i
        low = monomial_table(0, m) & ~monomial_table(1 << i, m)  # positions with bit i clear
        a ^= (a & low) << step
    a &= (1 << n) - 1
    return Poly(frozenset(bit_indices(a)), m)


# text format -----------------------------------------------------------------

_VAR = re.compile(r"x(\d+)$")


def format_monomial(mask: int) -> str:
    if mask == 0:
        return "1"
    return "*".join(f"x{i}" for i in bit_indices(mask))


def format_poly(p: Poly) -> str:
    if not p.terms:
        return "0"
    return " + ".join(format_monomial(t) for t in p.sorted_masks())


def _parse_term(text: str) -> list[int]:
    text = text.strip()
    if text == "1":
        return []
    idx = []
    for factor in text.split("*"):
        factor = factor.strip()
        match = _VAR.match(factor)
        if not match:
            raise ParseError(f"bad factor {factor!r} in term {text!r}")
        idx.append(int(match.group(1)))
    return idx


def parse_monomial(text: str, m: int | None = None) -> Monomial:
    idx = _parse_term(text)
    if m is None:
        m = max(idx, default=-1) + 1
    return make_monomial(idx, m)


def parse_poly(text: str, m: int | None = None) -> Poly:
    """Parse ``x0*x1 + x2 + 1``; ``0`` is the zero polynomial.

    ``m`` defaults to one more than the largest index that occurs.
    """
    text = text.strip()
    if not text:
        raise ParseError("empty polynomial text")
    if text == "0":
        return Poly.zero(m or 0)
    terms = [_parse_term(t) for t in text.split("+")]
    if m is None:
        m = max((max(t, default=-1) for t in terms), default=-1) + 1
    masks = [make_monomial(t, m).mask for t in terms]
    return Poly.from_masks(masks, m)
