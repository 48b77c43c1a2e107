"""Compile exact polynomials into fast float evaluators."""

from __future__ import annotations

from typing import Callable, Sequence

import numpy as np

from .polynomial import Polynomial


def _term_source(exp, coeff) -> str:
    factors = [repr(float(coeff))]
    for i, k in enumerate(exp):
        if k == 1:
            factors.append(f"x{i}")
        elif k > 1:
            factors.append(f"x{i}**{k}")
    return "*".join(factors)


def lambdify(polys: Sequence[Polynomial], variables: Sequence[str]) -> Callable[[np.ndarray], np.ndarray]:
    """Return ``f(x) -> ndarray`` evaluating every polynomial at the float vector ``x``.

    Polynomials are aligned to ``variables`` first; coefficients are rounded
    to float once, at compile time.
    """
    variables = tuple(variables)
    aligned = [p.align(variables) for p in polys]
    lines = ["def _f(x):"]
    if variables:
        lines.append("    " + ", ".join(f"x{i}" for i in range(len(variables))) + (", = x" if len(variables) == 1 else " = x"))
    exprs = []
    for p in aligned:
        if p.is_zero():
            exprs.append("0.0")
        else:
            exprs.append(" + ".join(_term_source(e, c) for e, c in p.sorted_terms()))
    lines.append("    return _array([" + ", ".join(exprs) + "], dtype=float)")
    namespace = {"_array": np.array}
    exec("\n".join(lines), namespace)
    return namespace["_f"]


def lambdify_scalar(poly: Polynomial, variables: Sequence[str]) -> Callable[[np.ndarray], float]:
    f = lambdify([poly], variables)
    return lambda x: float(f(x)[0])
