"""Weights, dyadic decompositions and LTA-orbit enumerators for decreasing monomial codes."""

from .dyadic import Dyadic
from .errors import CapExceeded, DomainError, InvariantViolation, ParseError
from .monomial import (
    EvalVector,
    Monomial,
    Poly,
    evaluate,
    lcm,
    make_monomial,
    mul,
    parse_monomial,
    parse_poly,
    weight,
)
from .weights import (
    DyadicWeight,
    ResidualFamily,
    dyadic_decompose,
    general_weight,
    pie_weight,
    sigma,
    union_degree,
)

__version__ = "0.1.0"
