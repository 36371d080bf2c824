"""Spectral containment sets from submultiplicative norm data.

Given finite prefixes of power norms (one variable) or product norms
(several commuting variables), compute the optimal annuli and circled hulls
that every realization's spectrum must meet, and build the weighted-shift
systems that attain them.
"""

__version__ = "0.1.0"

from .numerics import INF, BasePower, DomainError, ext_mul, ext_root
from .sequences import (
    Annulus,
    Bound,
    NormSequence,
    ValidationError,
    ZeroTermError,
    annulus,
    circle_possible,
    gen_inner_radius,
    gen_unbounded_ratio,
    inverse_norm_lower_bound,
    ratio_sup,
    scale,
    validate,
)

__all__ = [
    "INF",
    "BasePower",
    "DomainError",
    "ext_mul",
    "ext_root",
    "Annulus",
    "Bound",
    "NormSequence",
    "ValidationError",
    "ZeroTermError",
    "annulus",
    "circle_possible",
    "gen_inner_radius",
    "gen_unbounded_ratio",
    "inverse_norm_lower_bound",
    "ratio_sup",
    "scale",
    "validate",
    "__version__",
]
