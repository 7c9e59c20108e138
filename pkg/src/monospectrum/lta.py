"""The lower-triangular affine group LTA(m, 2) and its action on R_m.

An element (B, eps) substitutes x_i -> x_i + sum_{j<i} b_ij x_j + eps_i.
Explicit orbits are computed on truth tables: (g . p)(x) = p(Bx + eps), so the
whole group acts as a table of point permutations and an orbit is the set of
distinct permuted tables. For m <= 6 a truth table fits in one uint64.
"""
from __future__ import annotations

import math
import random
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterator, Sequence

import numpy as np

from .caps import HARD_LIMITS, default_caps
from .errors import CapExceeded, CollisionQuotientError, DomainError, InvariantViolation
from .monomial import Monomial, Poly, anf_from_table, bit_indices, evaluate

_CHUNK = 1 << 16


@dataclass(frozen=True)
class LtaElement:
    """rows[i] is the mask of j < i with b_ij = 1; the diagonal is implicit."""

    rows: tuple
    eps: int

    def __post_init__(self):
        object.__setattr__(self, "rows", tuple(self.rows))
        for i, row in enumerate(self.rows):
            if row < 0 or row >> i:
                raise DomainError(f"row {i} mask {row:#x} is not strictly lower triangular")
        if self.eps < 0 or self.eps >> self.m:
            raise DomainError(f"translation {self.eps:#x} wider than m={self.m}")

    @property
    def m(self) -> int:
        return len(self.rows)

    @classmethod
    def identity(cls, m: int) -> "LtaElement":
        return cls((0,) * m, 0)

    @classmethod
    def random(cls, m: int, rng: random.Random) -> "LtaElement":
        return cls(tuple(rng.getrandbits(i) if i else 0 for i in range(m)), rng.getrandbits(m) if m else 0)

    def matrix(self) -> list[list[int]]:
        return [[1 if j == i else (self.rows[i] >> j & 1) for j in range(self.m)] for i in range(self.m)]

    def _full_rows(self) -> list[int]:
        return [row | 1 << i for i, row in enumerate(self.rows)]

    def map_point(self, x: int) -> int:
        y = 0
        for i, row in enumerate(self._full_rows()):
            y |= (((row & x).bit_count() + (self.eps >> i)) & 1) << i
        return y

    def __mul__(self, other: "LtaElement") -> "LtaElement":
        """Product with (self * other) . p == self . (other . p)."""
        if self.m != other.m:
            raise DomainError("composition across different m")
        # self . (other . p) = p(B_o (B_s x + e_s) + e_o)
        bo, bs = other._full_rows(), self._full_rows()
        rows = []
        for i in range(self.m):
            acc = 0
            for j in bit_indices(bo[i]):
                acc ^= bs[j]
            rows.append(acc ^ (1 << i))
        eps = other.map_point(self.eps)
        return LtaElement(tuple(rows), eps)

    def inverse(self) -> "LtaElement":
        # solve y = Bx + e for x row by row (B unit lower triangular)
        m = self.m
        inv_rows = [0] * m
        for i in range(m):
            acc = 1 << i
            for j in bit_indices(self.rows[i]):
                acc ^= inv_rows[j] | (1 << j)
            inv_rows[i] = acc & ~(1 << i)
        inv_full = [r | 1 << i for i, r in enumerate(inv_rows)]
        eps = 0
        for i in range(m):
            eps |= ((inv_full[i] & self.eps).bit_count() & 1) << i
        return LtaElement(tuple(inv_rows), eps)


def group_order_exponent(m: int) -> int:
    return m * (m - 1) // 2 + m


def group_order(m: int) -> int:
    return 1 << group_order_exponent(m)


def _lower_entries(m: int) -> list[tuple[int, int]]:
    return [(i, j) for i in range(m) for j in range(i)]


def element_from_index(index: int, m: int) -> LtaElement:
    """Parameter layout: one bit per lower entry (row-major), then eps."""
    lower = _lower_entries(m)
    rows = [0] * m
    for k, (i, j) in enumerate(lower):
        if index >> k & 1:
            rows[i] |= 1 << j
    return LtaElement(tuple(rows), index >> len(lower))


def element_index(g: LtaElement) -> int:
    index = 0
    for k, (i, j) in enumerate(_lower_entries(g.m)):
        index |= (g.rows[i] >> j & 1) << k
    return index | g.eps << len(_lower_entries(g.m))


def iter_elements(m: int) -> Iterator[LtaElement]:
    for index in range(group_order(m)):
        yield element_from_index(index, m)


# symbolic action --------------------------------------------------------------

def _affine_image(g: LtaElement, i: int) -> Poly:
    masks = [1 << i] + [1 << j for j in bit_indices(g.rows[i])]
    if g.eps >> i & 1:
        masks.append(0)
    return Poly(frozenset(masks), g.m)


def apply(g: LtaElement, p: Poly) -> Poly:
    """Substitute every variable by its affine image and expand in R_m."""
    if g.m != p.m:
        raise DomainError(f"element has m={g.m}, polynomial has m={p.m}")
    images = {}
    acc: set[int] = set()
    for t in p.terms:
        prod = Poly.one(p.m)
        for i in bit_indices(t):
            if i not in images:
                images[i] = _affine_image(g, i)
            prod = prod * images[i]
        acc ^= prod.terms
    return Poly(frozenset(acc), p.m)


# partition weights ----------------------------------------------------------

def partition_weight(f: Monomial) -> int:
    return sum(i - t for t, i in enumerate(f.indices))


def constrained_partition_weight(f: Monomial, g: Monomial) -> int:
    """Sum over j in ind(g), ascending, of j minus the number of indices below j
    occupied by ind(f) or by earlier indices of g.

    Supports must be disjoint or nested (g divides f); nested covers the
    reduction |lambda_f(f)| = |lambda_f|.
    """
    if f.m != g.m:
        raise DomainError("monomials with different m")
    common = f.mask & g.mask
    if common and common != g.mask:
        raise DomainError(f"{g} partially overlaps {f}")
    occupied = f.mask
    total = 0
    for j in g.indices:
        total += j - (occupied & ((1 << j) - 1)).bit_count()
        occupied |= 1 << j
    return total


def orbit_size_formula(f: Monomial) -> int:
    """Exponent e with |LTA(m,2) . f| = 2^e."""
    return f.degree + partition_weight(f)


# explicit enumeration -------------------------------------------------------

def _orbit_cap(m: int, cap: int | None):
    cap = default_caps().orbit_m if cap is None else cap
    cap = min(cap, HARD_LIMITS["orbit_m"])
    if m > cap:
        raise CapExceeded(
            "m", m, cap,
            "explicit LTA enumeration refused; use orbit_size_formula / exponent-based counting",
        )


def _images_for(indices: np.ndarray, m: int) -> np.ndarray:
    """Point images y(x) for a batch of element indices: shape (len, 2^m), uint8."""
    n = 1 << m
    pts = np.arange(n, dtype=np.uint8)
    xb = [((pts >> i) & 1).astype(np.uint8) for i in range(m)]
    lower = _lower_entries(m)
    nl = len(lower)
    idx = indices.astype(np.int64)
    y = np.zeros((len(idx), n), dtype=np.uint8)
    for i in range(m):
        yi = np.broadcast_to(xb[i], (len(idx), n)).copy()
        yi ^= ((idx >> (nl + i)) & 1).astype(np.uint8)[:, None]
        for k, (ii, j) in enumerate(lower):
            if ii == i:
                yi ^= ((idx >> k) & 1).astype(np.uint8)[:, None] & xb[j][None, :]
        y |= yi << i
    return y


@lru_cache(maxsize=None)
def _all_images(m: int) -> np.ndarray:
    images = _images_for(np.arange(group_order(m)), m)
    images.setflags(write=False)
    return images


def _image_chunks(m: int) -> Iterator[tuple[int, np.ndarray]]:
    if m <= 5:
        yield 0, _all_images(m)
        return
    total = group_order(m)
    for start in range(0, total, _CHUNK):
        stop = min(total, start + _CHUNK)
        yield start, _images_for(np.arange(start, stop), m)


def table_array(p: Poly) -> np.ndarray:
    bits = evaluate(p).bits
    return np.array([bits >> t & 1 for t in range(1 << p.m)], dtype=np.uint8)


def _pack(values: np.ndarray) -> np.ndarray:
    """(rows, n) 0/1 uint8 -> uint64 with bit t = column t."""
    packed = np.packbits(values, axis=1, bitorder="little")
    pad = 8 - packed.shape[1]
    if pad:
        packed = np.concatenate([packed, np.zeros((packed.shape[0], pad), dtype=np.uint8)], axis=1)
    return packed.view("<u8").ravel()


def _table_int(p: Poly) -> int:
    return evaluate(p).bits


def image_tables(p: Poly, subgroup: np.ndarray | None = None) -> np.ndarray:
    """Packed truth table of g . p for every group element (or the masked subgroup)."""
    tab = table_array(p)
    parts = []
    for start, images in _image_chunks(p.m):
        packed = _pack(tab[images])
        if subgroup is not None:
            packed = packed[subgroup[start:start + len(packed)]]
        parts.append(packed)
    return np.concatenate(parts)


def stabilizer_mask(h: Monomial | Poly, cap: int | None = None) -> np.ndarray:
    """Boolean mask over element indices of {g : g . h == h}."""
    p = h.to_poly() if isinstance(h, Monomial) else h
    _orbit_cap(p.m, cap)
    return image_tables(p) == np.uint64(_table_int(p))


@dataclass(frozen=True)
class Stabilizer:
    head: Monomial
    mask: np.ndarray
    size: int
    index_exponent: int


def head_stabilizer(h: Monomial, cap: int | None = None) -> Stabilizer:
    """G_h by filtering the group; checks [LTA : G_h] = 2^{deg h + |lambda_h|}."""
    mask = _stabilizer_cached(h.mask, h.m, _effective_cap(cap))
    size = int(mask.sum())
    index = group_order(h.m) // size
    e = index.bit_length() - 1
    if 1 << e != index or e != orbit_size_formula(h):
        raise InvariantViolation(
            f"[LTA:G_h] = {index} for h={h}, expected 2^{orbit_size_formula(h)}"
        )
    return Stabilizer(h, mask, size, e)


def _effective_cap(cap):
    return default_caps().orbit_m if cap is None else cap


@lru_cache(maxsize=256)
def _stabilizer_cached(mask: int, m: int, cap: int) -> np.ndarray:
    out = stabilizer_mask(Monomial(mask, m), cap)
    out.setflags(write=False)
    return out


def orbit_tables(p: Poly, head_fix: Monomial | None = None, cap: int | None = None) -> np.ndarray:
    """Sorted distinct truth tables of the orbit of p (under G_h if head_fix)."""
    _orbit_cap(p.m, cap)
    sub = None
    if head_fix is not None:
        if head_fix.m != p.m:
            raise DomainError("head and polynomial have different m")
        sub = head_stabilizer(head_fix, cap).mask
    return np.unique(image_tables(p, sub))


@dataclass(frozen=True)
class OrbitSummary:
    seed: Poly
    size: int
    elements: frozenset | None = None
    head_fix: Monomial | None = None

    @property
    def exponent(self) -> int | None:
        e = self.size.bit_length() - 1
        return e if 1 << e == self.size else None


def orbit(f: Poly | Monomial, m: int | None = None, head_fix: Monomial | None = None,
          cap: int | None = None, with_elements: bool = True) -> OrbitSummary:
    """Explicit orbit of f under LTA(m,2), or under the stabilizer of head_fix."""
    p = f.to_poly() if isinstance(f, Monomial) else f
    if m is not None and m != p.m:
        raise DomainError(f"m={m} does not match the polynomial's m={p.m}")
    tables = orbit_tables(p, head_fix, cap)
    elements = None
    if with_elements:
        elements = frozenset(anf_from_table(int(t), p.m) for t in tables)
        if len(elements) != len(tables):
            raise InvariantViolation("ANF conversion merged distinct truth tables")
    return OrbitSummary(p, len(tables), elements, head_fix)


def log2_exact(n: int) -> int | None:
    e = int(n).bit_length() - 1
    return e if n > 0 and 1 << e == n else None


def minkowski_sum(a: np.ndarray, b: np.ndarray, chunk: int = 1 << 22) -> np.ndarray:
    """Distinct XORs a_i ^ b_j of two packed-table sets."""
    a = np.unique(a)
    b = np.unique(b)
    if len(a) * len(b) <= chunk:
        return np.unique(np.bitwise_xor.outer(a, b).ravel())
    step = max(1, chunk // len(b))
    acc = np.empty(0, dtype=np.uint64)
    for s in range(0, len(a), step):
        part = np.unique(np.bitwise_xor.outer(a[s:s + step], b).ravel())
        acc = np.union1d(acc, part)
    return acc


@dataclass(frozen=True)
class Collision:
    size_i: int
    size_j: int
    sum_size: int

    @property
    def quotient(self):
        from fractions import Fraction
        return Fraction(self.size_i * self.size_j, self.sum_size)

    @property
    def alpha(self) -> int | None:
        q = self.quotient
        return log2_exact(q.numerator) if q.denominator == 1 else None


def minkowski_collision(u_i: Poly | Monomial, u_j: Poly | Monomial, h: Monomial | None,
                        m: int | None = None, cap: int | None = None) -> Collision:
    pi = u_i.to_poly() if isinstance(u_i, Monomial) else u_i
    pj = u_j.to_poly() if isinstance(u_j, Monomial) else u_j
    if pi.m != pj.m or (m is not None and m != pi.m):
        raise DomainError("tails must share the ambient m")
    if h is None or h.mask == 0:
        h = None
    elif pi.support_mask & h.mask or pj.support_mask & h.mask:
        raise DomainError("tails must be disjoint from the head")
    oi = orbit_tables(pi, h, cap)
    oj = orbit_tables(pj, h, cap)
    return Collision(len(oi), len(oj), len(minkowski_sum(oi, oj)))


def collision_exponent(u_i, u_j, h: Monomial | None, m: int | None = None,
                       cap: int | None = None) -> int:
    """alpha with |O_i + O_j| = |O_i| |O_j| / 2^alpha, O = head-stabilizer orbits.

    Raises CollisionQuotientError if the quotient is not a power of two.
    """
    c = minkowski_collision(u_i, u_j, h, m, cap)
    if c.alpha is None:
        raise CollisionQuotientError(c.size_i, c.size_j, c.sum_size)
    return c.alpha


@dataclass(frozen=True)
class Freedom:
    beta: int
    beta_mix: int
    single_tail_sum: int
    stabilizer_size: int


def kernel_freedom_dimension(Q: Poly, h: Monomial | None = None, m: int | None = None,
                             cap: int | None = None) -> Freedom:
    """beta_Q: log2 of the number of distinct images of the template tuple
    (h*u_1, ..., h*u_nu) under G_h, where u_j are the terms of Q.

    beta_mix = beta - sum_j (deg u_j + |lambda_{u_j}|); reported, not clamped.
    """
    if Q.is_zero():
        raise DomainError("empty kernel")
    if m is not None and m != Q.m:
        raise DomainError("m mismatch")
    h = h if h is not None else Monomial(0, Q.m)
    if Q.support_mask & h.mask:
        raise DomainError("kernel shares variables with the head")
    _orbit_cap(Q.m, cap)
    stab = head_stabilizer(h, cap)
    cols = [image_tables(Poly(frozenset([h.mask | u]), Q.m), stab.mask)
            for u in Q.sorted_masks()]
    distinct = len(np.unique(np.stack(cols, axis=1), axis=0))
    beta = log2_exact(distinct)
    if beta is None:
        raise InvariantViolation(f"tuple orbit size {distinct} is not a power of two")
    single = sum(orbit_size_formula(u) for u in Q.monomials())
    return Freedom(beta, beta - single, single, stab.size)


def explicit_orbit_exponent(p: Poly, head_fix: Monomial | None = None, cap: int | None = None) -> float:
    n = len(orbit_tables(p, head_fix, cap))
    e = log2_exact(n)
    return e if e is not None else math.log2(n)
