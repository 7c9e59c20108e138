"""Brute-force ground truth for small codes: full weight distributions,
weight-class listings and template coverage of a weight class.
"""
from __future__ import annotations

import csv
import io
import itertools
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .caps import HARD_LIMITS, default_caps
from .codes import DecreasingSet
from .errors import CapExceeded
from .lta import orbit_tables
from .monomial import Poly, anf_from_table, monomial_table
from .templates import SHARED_3TERM_SUPPORTS, factor_head_kernel

_LOW_BITS = 12


@dataclass(frozen=True)
class WeightDistribution:
    entries: dict  # weight -> count
    dimension: int
    m: int

    def total(self) -> int:
        return sum(self.entries.values())

    def __getitem__(self, w: int) -> int:
        return self.entries.get(w, 0)

    def to_json(self) -> dict:
        return {
            "m": self.m,
            "dimension": self.dimension,
            "distribution": {str(w): str(c) for w, c in sorted(self.entries.items())},
        }

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["weight", "count"])
        for w, c in sorted(self.entries.items()):
            writer.writerow([w, c])
        return buf.getvalue()


def _dim_cap(I: DecreasingSet, cap: int | None):
    cap = default_caps().dim if cap is None else cap
    cap = min(cap, HARD_LIMITS["dim"])
    if I.dimension > cap:
        raise CapExceeded("dimension", I.dimension, cap, "exhaustive enumeration visits 2^dimension codewords")
    if I.m > default_caps().eval_m:
        raise CapExceeded("m", I.m, default_caps().eval_m, "codewords are 2^m-bit vectors")


def _words(bits: int, n_words: int) -> np.ndarray:
    return np.frombuffer(bits.to_bytes(n_words * 8, "little"), dtype=np.uint64).copy()


def _rows(I: DecreasingSet) -> tuple[list, np.ndarray]:
    masks = I.sorted_masks()
    n_words = max(1, (1 << I.m) // 64)
    rows = np.stack([_words(monomial_table(t, I.m), n_words) for t in masks]) if masks \
        else np.zeros((0, n_words), dtype=np.uint64)
    return masks, rows


def _span_table(rows: np.ndarray) -> np.ndarray:
    """All 2^b XOR combinations of b rows; entry c combines rows whose bit is set in c."""
    table = np.zeros((1 << len(rows), rows.shape[1]), dtype=np.uint64)
    for i, row in enumerate(rows):
        half = 1 << i
        table[half:2 * half] = table[:half] ^ row
    return table


def _gray_walk(I: DecreasingSet):
    """Yield (high_message, weights) for every Gray-code step over the high
    generators, where weights[c] is the weight of high_message ^ c for every
    low message c. Message bit i selects generator i."""
    masks, rows = _rows(I)
    b = min(_LOW_BITS, len(masks))
    low = _span_table(rows[:b])
    high = rows[b:]
    acc = np.zeros(rows.shape[1], dtype=np.uint64)
    msg = 0
    for step in range(1 << len(high)):
        if step:
            i = (step & -step).bit_length() - 1
            acc ^= high[i]
            msg ^= 1 << (b + i)
        block = low ^ acc
        yield msg, np.bitwise_count(block).sum(axis=1, dtype=np.int64)


def full_weight_distribution(I: DecreasingSet, cap: int | None = None) -> WeightDistribution:
    """Exact A_w for every w. Gray-code walk over the high generators, each step
    XORing one row into a running vector and popcounting it against a table of
    all low-generator combinations."""
    _dim_cap(I, cap)
    n = 1 << I.m
    tally = np.zeros(n + 1, dtype=np.int64)
    for _, weights in _gray_walk(I):
        tally += np.bincount(weights, minlength=n + 1)
    entries = {w: int(c) for w, c in enumerate(tally) if c}
    return WeightDistribution(entries, I.dimension, I.m)


def message_poly(I: DecreasingSet, msg: int) -> Poly:
    masks = I.sorted_masks()
    return Poly(frozenset(masks[i] for i in range(len(masks)) if msg >> i & 1), I.m)


def naive_codeword(I: DecreasingSet, msg: int) -> int:
    """Codeword bits for one message by direct row XOR."""
    out = 0
    for i, t in enumerate(I.sorted_masks()):
        if msg >> i & 1:
            out ^= monomial_table(t, I.m)
    return out


def codewords_of_weight(I: DecreasingSet, w: int, cap: int | None = None) -> list[Poly]:
    """ANF of every weight-w codeword, sorted by canonical key."""
    _dim_cap(I, cap)
    out = []
    for msg, weights in _gray_walk(I):
        for low in np.flatnonzero(weights == w):
            out.append(message_poly(I, msg | int(low)))
    return sorted(out, key=lambda p: (len(p.terms), p.key()))


# template patterns ----------------------------------------------------------

def _disjoint(masks) -> bool:
    seen = 0
    for t in masks:
        if t & seen:
            return False
        seen |= t
    return True


def _is_disjoint_sum(terms: list[int]) -> bool:
    degrees = {t.bit_count() for t in terms}
    return len(degrees) == 1 and min(degrees) >= 1 and _disjoint(terms)


def _is_degree_drop(terms: list[int]) -> bool:
    if not terms or not _disjoint(terms):
        return False
    degrees = sorted(t.bit_count() for t in terms)
    r = degrees[-1]
    return r >= 2 and degrees[0] == r - 1 and degrees.count(r - 1) == 1 and \
        all(d == r for d in degrees[1:])


def _is_flip(terms: list[int]) -> bool:
    """f + x_j g + g with j in ind(f) and ind(g) avoiding ind(f) and j."""
    if len(terms) != 3:
        return False
    for g in terms:
        for xg in terms:
            diff = xg ^ g
            if xg == g or xg & g != g or diff.bit_count() != 1:
                continue
            (f,) = [t for t in terms if t not in (g, xg)]
            if f & diff and not g & (f | diff):
                return True
    return False


def _shared_3term_variant(terms: list[int]) -> str | None:
    if len(terms) != 3 or any(t.bit_count() != 3 for t in terms):
        return None
    for variant, supports in SHARED_3TERM_SUPPORTS.items():
        n = 1 + max(max(s) for s in supports)
        union = terms[0] | terms[1] | terms[2]
        if union.bit_count() != n:
            continue
        labels = [i for i in range(union.bit_length()) if union >> i & 1]
        for perm in itertools.permutations(labels):
            built = {sum(1 << perm[i] for i in s) for s in supports}
            if built == set(terms):
                return variant
    return None


def match_templates(P: Poly) -> list[str]:
    """Template kinds whose literal form P takes (no group action applied)."""
    if P.is_zero():
        return []
    h, Q = factor_head_kernel(P)
    terms = list(Q.terms)
    kinds = []
    if len(terms) == 1:
        kinds.append("monomial")
    elif _is_disjoint_sum(terms):
        kinds.append("disjoint_k_sum")
    if _is_degree_drop(terms):
        kinds.append("rank_ell_degree_drop")
    if _is_flip(terms):
        kinds.append("complementary_flip")
    variant = _shared_3term_variant(terms)
    if variant:
        kinds.append(f"shared_3term_{variant.lower()}")
    if h.mask and len(terms) > 1 and kinds:
        kinds.append("nested")
    return kinds


@dataclass
class ClassificationReport:
    weight: int
    total: int
    orbits: list = field(default_factory=list)  # dicts: representative, size, kinds
    by_orbit: bool = True

    def covered(self, kind: str) -> int:
        return sum(o["size"] for o in self.orbits if kind in o["kinds"])

    def coverage(self) -> dict:
        kinds = sorted({k for o in self.orbits for k in o["kinds"]})
        return {k: Fraction(self.covered(k), self.total) for k in kinds}

    def residual(self) -> list:
        return [o for o in self.orbits if not o["kinds"]]

    def to_json(self) -> dict:
        return {
            "weight": str(self.weight),
            "total": str(self.total),
            "by_orbit": self.by_orbit,
            "coverage": {k: str(v) for k, v in self.coverage().items()},
            "residual_count": str(sum(o["size"] for o in self.residual())),
            "orbits": [{"representative": str(o["representative"]), "size": str(o["size"]),
                        "kinds": o["kinds"]} for o in self.orbits],
        }


def classify_weight_class(I: DecreasingSet, w: int, cap: int | None = None,
                          orbit_cap: int | None = None) -> ClassificationReport:
    """Split the weight-w class into LTA(m,2) orbits and tag an orbit with every
    template kind that some member matches literally. Beyond the orbit cap each
    codeword is matched on its own."""
    words = codewords_of_weight(I, w, cap)
    report = ClassificationReport(w, len(words))
    o_cap = default_caps().orbit_m if orbit_cap is None else orbit_cap
    if I.m > min(o_cap, HARD_LIMITS["orbit_m"]):
        report.by_orbit = False
        for P in words:
            report.orbits.append({"representative": P, "size": 1, "kinds": match_templates(P)})
        return report
    seen: set[int] = set()
    for P in words:
        if _table(P) in seen:
            continue
        tables = orbit_tables(P)
        members = [int(t) for t in tables]
        seen.update(members)
        kinds = set()
        for t in members:
            kinds.update(match_templates(anf_from_table(t, I.m)))
        report.orbits.append({"representative": P, "size": len(members), "kinds": sorted(kinds)})
    return report


def _table(P: Poly) -> int:
    bits = 0
    for t in P.terms:
        bits ^= monomial_table(t, P.m)
    return bits
