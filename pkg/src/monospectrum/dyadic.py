"""Exact dyadic rationals n / 2**e.

Normalized forms: ``exp >= 0`` and the numerator is odd whenever ``exp > 0``,
so equal values have equal representations.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from numbers import Integral


@dataclass(frozen=True, init=False)
class Dyadic:
    num: int
    exp: int

    def __init__(self, num: int, exp: int = 0):
        num = int(num)
        exp = int(exp)
        if exp < 0:
            num <<= -exp
            exp = 0
        if num == 0:
            exp = 0
        else:
            tz = (num & -num).bit_length() - 1
            shift = min(tz, exp)
            num >>= shift
            exp -= shift
        object.__setattr__(self, "num", num)
        object.__setattr__(self, "exp", exp)

    @classmethod
    def pow2(cls, e: int) -> "Dyadic":
        """2**e for any integer e."""
        return cls(1, -e)

    @classmethod
    def from_value(cls, x) -> "Dyadic":
        if isinstance(x, Dyadic):
            return x
        if isinstance(x, Integral):
            return cls(int(x))
        fr = Fraction(x)
        den = fr.denominator
        if den & (den - 1):
            raise ValueError(f"{fr} is not a dyadic rational")
        return cls(fr.numerator, den.bit_length() - 1)

    # arithmetic -----------------------------------------------------------
    def _align(self, other):
        other = Dyadic.from_value(other)
        e = max(self.exp, other.exp)
        return self.num << (e - self.exp), other.num << (e - other.exp), e

    def __add__(self, other):
        a, b, e = self._align(other)
        return Dyadic(a + b, e)

    __radd__ = __add__

    def __sub__(self, other):
        a, b, e = self._align(other)
        return Dyadic(a - b, e)

    def __rsub__(self, other):
        return Dyadic.from_value(other) - self

    def __neg__(self):
        return Dyadic(-self.num, self.exp)

    def __mul__(self, other):
        other = Dyadic.from_value(other)
        return Dyadic(self.num * other.num, self.exp + other.exp)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if k < 0:
            raise ValueError("negative powers leave the dyadic ring unless num is a power of two")
        return Dyadic(self.num**k, self.exp * k)

    def scale2(self, e: int) -> "Dyadic":
        """Multiply by 2**e."""
        return Dyadic(self.num, self.exp - e)

    # comparison / conversion ------------------------------------------------
    def __eq__(self, other):
        try:
            other = Dyadic.from_value(other)
        except (TypeError, ValueError):
            return NotImplemented
        return self.num == other.num and self.exp == other.exp

    def __hash__(self):
        return hash((self.num, self.exp))

    def __lt__(self, other):
        a, b, _ = self._align(other)
        return a < b

    def __le__(self, other):
        a, b, _ = self._align(other)
        return a <= b

    def __gt__(self, other):
        a, b, _ = self._align(other)
        return a > b

    def __ge__(self, other):
        a, b, _ = self._align(other)
        return a >= b

    def is_integer(self) -> bool:
        return self.exp == 0

    def __int__(self):
        if self.exp:
            raise ValueError(f"{self} is not an integer")
        return self.num

    def to_fraction(self) -> Fraction:
        return Fraction(self.num, 1 << self.exp)

    def __float__(self):
        return float(self.to_fraction())

    def __str__(self):
        return str(self.num) if self.exp == 0 else f"{self.num}/{1 << self.exp}"

    def __repr__(self):
        return f"Dyadic({self})"
