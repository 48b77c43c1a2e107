"""Exact arithmetic substrate: rationals, sparse polynomials, linear algebra, parsing."""

from fractions import Fraction

from .linalg import RationalMatrix, mat_nullspace, mat_rank, solve_in_span
from .numeric import lambdify, lambdify_scalar
from .parser import ParseError, parse_expr, parse_rational, parse_rational_list
from .polynomial import Polynomial, VariableMismatchError, as_fraction, merge_variables

Rational = Fraction


def poly_arith(a: Polynomial, b: Polynomial, op: str) -> Polynomial:
    if a.variables != b.variables:
        raise VariableMismatchError(f"variable lists differ: {a.variables} vs {b.variables}")
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    raise ValueError(f"unknown operation {op!r}")


def poly_partial(p: Polynomial, var: str) -> Polynomial:
    return p.partial(var)


def poly_eval(p: Polynomial, point) -> Fraction:
    return p.eval(point)


__all__ = [
    "Fraction",
    "ParseError",
    "Polynomial",
    "Rational",
    "RationalMatrix",
    "VariableMismatchError",
    "as_fraction",
    "lambdify",
    "lambdify_scalar",
    "mat_nullspace",
    "mat_rank",
    "merge_variables",
    "parse_expr",
    "parse_rational",
    "parse_rational_list",
    "poly_arith",
    "poly_eval",
    "poly_partial",
    "solve_in_span",
]
