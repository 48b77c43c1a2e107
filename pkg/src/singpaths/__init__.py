"""Singular paths of rank-2 (2,3,5) distributions: exact geometry, constraint
chains, prolongation and cone systems, and numerical singular extremals."""

from .exactcore import Polynomial, Rational, parse_expr
from .geometry import Chart, Distribution, PolyMap, VectorField, derived_flag, generic_growth, lie_bracket
from .hamilton import CotangentChart, ab_field, build_chain, h_lift, hamilton_field, poisson
from .prolong import cone_system, contact_hull, frame235, prolong

__version__ = "0.1.0"

__all__ = [
    "Chart",
    "CotangentChart",
    "Distribution",
    "PolyMap",
    "Polynomial",
    "Rational",
    "VectorField",
    "ab_field",
    "build_chain",
    "cone_system",
    "contact_hull",
    "derived_flag",
    "frame235",
    "generic_growth",
    "h_lift",
    "hamilton_field",
    "lie_bracket",
    "parse_expr",
    "poisson",
    "prolong",
]
