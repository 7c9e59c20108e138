"""Decreasing monomial codes: the order on monomials, closures, Reed-Muller codes,
generator matrices and membership.

f <= g (same degree) when the sorted index lists satisfy i_t <= j_t for all t;
in general f <= g when some divisor of g of degree deg(f) dominates f that way.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from math import comb
from pathlib import Path
from typing import Iterable

from .errors import DomainError, ParseError
from .monomial import Monomial, Poly, evaluate, parse_monomial


class NotDecreasingError(DomainError):
    def __init__(self, missing: list[Monomial]):
        self.missing = missing
        shown = ", ".join(str(f) for f in missing[:5])
        super().__init__(f"set is not decreasing; missing {len(missing)} monomial(s) such as {shown}")


def leq_decreasing(f: Monomial, g: Monomial) -> bool:
    if f.m != g.m:
        raise DomainError("monomials with different m")
    fi, gi = f.indices, g.indices
    if len(fi) > len(gi):
        return False
    # greedy: match each index of f to the smallest unused index of g above it
    pos = 0
    for i in fi:
        while pos < len(gi) and gi[pos] < i:
            pos += 1
        if pos == len(gi):
            return False
        pos += 1
    return True


def _lower_covers(mask: int, m: int) -> Iterable[int]:
    """Immediate predecessors: drop one variable, or lower one index into a free slot."""
    for i in range(m):
        if mask >> i & 1:
            yield mask ^ (1 << i)
            if i and not mask >> (i - 1) & 1:
                yield mask ^ (1 << i) ^ (1 << (i - 1))


def _down_closure(masks: Iterable[int], m: int) -> set[int]:
    seen = set(masks)
    stack = list(seen)
    while stack:
        cur = stack.pop()
        for low in _lower_covers(cur, m):
            if low not in seen:
                seen.add(low)
                stack.append(low)
    return seen


def _order_key(mask: int):
    return (mask.bit_count(), mask)


@dataclass(frozen=True)
class DecreasingSet:
    m: int
    monomials: frozenset  # of int masks

    def __post_init__(self):
        object.__setattr__(self, "monomials", frozenset(self.monomials))
        for t in self.monomials:
            if not 0 <= t < 1 << self.m:
                raise DomainError(f"monomial mask {t:#x} outside m={self.m}")
        missing = sorted(_down_closure(self.monomials, self.m) - self.monomials, key=_order_key)
        if missing:
            raise NotDecreasingError([Monomial(t, self.m) for t in missing])

    @classmethod
    def from_monomials(cls, monos: Iterable[Monomial | int], m: int, close: bool = False) -> "DecreasingSet":
        masks = {f.mask if isinstance(f, Monomial) else int(f) for f in monos}
        if close:
            masks = _down_closure(masks, m)
        return cls(m, frozenset(masks))

    @property
    def dimension(self) -> int:
        return len(self.monomials)

    @property
    def r_plus(self) -> int | None:
        return max((t.bit_count() for t in self.monomials), default=None)

    @property
    def d_min(self) -> int | None:
        r = self.r_plus
        return None if r is None else 1 << (self.m - r)

    def sorted_masks(self) -> list[int]:
        return sorted(self.monomials, key=_order_key)

    def sorted_monomials(self) -> list[Monomial]:
        return [Monomial(t, self.m) for t in self.sorted_masks()]

    def of_degree(self, r: int) -> list[Monomial]:
        return [f for f in self.sorted_monomials() if f.degree == r]

    def __contains__(self, f) -> bool:
        mask = f.mask if isinstance(f, Monomial) else f
        return mask in self.monomials

    def to_json(self) -> dict:
        return {"m": self.m, "monomials": [str(f) for f in self.sorted_monomials()]}


def is_decreasing(monos: Iterable[Monomial | int], m: int) -> bool:
    masks = {f.mask if isinstance(f, Monomial) else int(f) for f in monos}
    return _down_closure(masks, m) == masks


def decreasing_closure(gens: Iterable[Monomial | int], m: int) -> DecreasingSet:
    return DecreasingSet.from_monomials(gens, m, close=True)


def reed_muller(r: int, m: int) -> DecreasingSet:
    if not 0 <= r <= m:
        raise DomainError(f"RM({r},{m}) needs 0 <= r <= m")
    return DecreasingSet(m, frozenset(t for t in range(1 << m) if t.bit_count() <= r))


def rm_dimension(r: int, m: int) -> int:
    return sum(comb(m, i) for i in range(r + 1))


@dataclass(frozen=True)
class BitMatrix:
    """Rows as int bitsets; bit t of a row is column t."""

    rows: tuple
    ncols: int

    def rank(self) -> int:
        return gf2_rank(self.rows)

    def to_hex(self) -> list[str]:
        width = max(1, (self.ncols + 3) // 4)
        return [format(r, f"0{width}x") for r in self.rows]

    def to_strings(self) -> list[str]:
        return ["".join(str(r >> t & 1) for t in range(self.ncols)) for r in self.rows]


def gf2_rank(rows: Iterable[int]) -> int:
    """Rank over GF(2) by elimination on int bitsets, keyed by leading bit."""
    pivots: dict[int, int] = {}
    for row in rows:
        while row:
            lead = row.bit_length() - 1
            if lead not in pivots:
                pivots[lead] = row
                break
            row ^= pivots[lead]
    return len(pivots)


def generator_matrix(I: DecreasingSet, cap: int | None = None) -> BitMatrix:
    """One row ev(f) per monomial, ordered by degree then mask."""
    rows = tuple(evaluate(f.to_poly(), cap).bits for f in I.sorted_monomials())
    return BitMatrix(rows, 1 << I.m)


def contains_poly(I: DecreasingSet, P: Poly) -> bool:
    if P.m != I.m:
        raise DomainError(f"polynomial m={P.m} vs code m={I.m}")
    return P.terms <= I.monomials


def load_code_spec(spec, close: bool = False) -> DecreasingSet:
    """Accept {"rm": [r, m]} or {"m": int, "monomials": ["x0*x1", ...]}.

    ``spec`` may be a dict, a JSON string or a path to a JSON file. Non-decreasing
    monomial lists are rejected unless ``close`` is set.
    """
    if isinstance(spec, (str, Path)):
        text = str(spec)
        path = Path(text)
        if not text.lstrip().startswith("{") and path.exists():
            text = path.read_text()
        try:
            spec = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ParseError(f"code spec is not valid JSON: {exc}") from None
    if not isinstance(spec, dict):
        raise ParseError("code spec must be a JSON object")
    if "rm" in spec:
        try:
            r, m = (int(v) for v in spec["rm"])
        except (TypeError, ValueError):
            raise ParseError('"rm" must be [r, m]') from None
        return reed_muller(r, m)
    if "m" not in spec or "monomials" not in spec:
        raise ParseError('code spec needs "rm" or both "m" and "monomials"')
    m = int(spec["m"])
    monos = [parse_monomial(t, m) for t in spec["monomials"]]
    return DecreasingSet.from_monomials(monos, m, close=close)
