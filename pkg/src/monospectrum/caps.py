"""Computational caps, overridable through MONO_SPECTRUM_CAPS.

The variable holds comma separated ``key=value`` pairs, e.g.
``MONO_SPECTRUM_CAPS="orbit_m=6,dim=20"``.
"""
from __future__ import annotations

import os
from dataclasses import dataclass, replace

from .errors import DomainError

ENV_VAR = "MONO_SPECTRUM_CAPS"

# hard limits: 2^30-bit truth tables, 64-point truth tables packed in uint64,
# 2^28 codewords
HARD_LIMITS = {"eval_m": 30, "orbit_m": 6, "dim": 28}


@dataclass(frozen=True)
class Caps:
    eval_m: int = 30
    orbit_m: int = 5
    dim: int = 24

    def __post_init__(self):
        for key, hard in HARD_LIMITS.items():
            value = getattr(self, key)
            if not 0 <= value <= hard:
                raise DomainError(f"cap {key}={value} outside [0, {hard}]")

    def with_overrides(self, **kw) -> "Caps":
        kw = {k: v for k, v in kw.items() if v is not None}
        return replace(self, **kw)


def parse_caps(text: str, base: Caps | None = None) -> Caps:
    base = base or Caps()
    values = {}
    for item in filter(None, (s.strip() for s in text.split(","))):
        key, sep, value = item.partition("=")
        key = key.strip()
        if not sep or key not in HARD_LIMITS:
            raise DomainError(f"bad caps entry {item!r}; expected one of {sorted(HARD_LIMITS)}")
        try:
            values[key] = int(value)
        except ValueError:
            raise DomainError(f"bad caps value in {item!r}") from None
    return base.with_overrides(**values)


def default_caps() -> Caps:
    text = os.environ.get(ENV_VAR, "")
    return parse_caps(text) if text else Caps()
