"""Sparse multivariate polynomials with exact rational coefficients."""

from __future__ import annotations

from fractions import Fraction
from math import gcd, lcm
from types import MappingProxyType
from typing import Iterable, Mapping, Sequence, Union

Exponent = tuple[int, ...]
Scalar = Union[int, Fraction]


class VariableMismatchError(ValueError):
    """Raised when two polynomials over different variable lists are combined."""


def as_fraction(value) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int) and not isinstance(value, bool):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value)
    raise TypeError(f"expected an exact rational, got {type(value).__name__}")


def grlex_key(exponent: Exponent):
    return (sum(exponent), exponent)


class Polynomial:
    """Polynomial over Q in an ordered list of named variables.

    Terms map exponent vectors to nonzero :class:`~fractions.Fraction`
    coefficients. Instances are immutable; every operation returns a new one.
    """

    __slots__ = ("variables", "_terms", "_hash")

    def __init__(self, variables: Iterable[str], terms: Mapping[Exponent, Scalar] | None = None):
        variables = tuple(variables)
        if len(set(variables)) != len(variables):
            raise ValueError(f"duplicate variable names in {variables}")
        clean: dict[Exponent, Fraction] = {}
        n = len(variables)
        for exp, coeff in (terms or {}).items():
            exp = tuple(int(e) for e in exp)
            if len(exp) != n:
                raise ValueError(f"exponent {exp} does not match {n} variables")
            if any(e < 0 for e in exp):
                raise ValueError(f"negative exponent in {exp}")
            c = as_fraction(coeff)
            if c:
                clean[exp] = clean.get(exp, Fraction(0)) + c
                if not clean[exp]:
                    del clean[exp]
        self.variables = variables
        self._terms = clean
        self._hash = None

    @classmethod
    def _raw(cls, variables: tuple[str, ...], terms: dict[Exponent, Fraction]) -> "Polynomial":
        # trusted constructor: terms already clean
        obj = cls.__new__(cls)
        obj.variables = variables
        obj._terms = terms
        obj._hash = None
        return obj

    # -- constructors -----------------------------------------------------

    @classmethod
    def zero(cls, variables: Sequence[str]) -> "Polynomial":
        return cls(variables)

    @classmethod
    def constant(cls, value: Scalar, variables: Sequence[str]) -> "Polynomial":
        variables = tuple(variables)
        return cls(variables, {(0,) * len(variables): value})

    @classmethod
    def var(cls, name: str, variables: Sequence[str]) -> "Polynomial":
        variables = tuple(variables)
        if name not in variables:
            raise KeyError(f"unknown variable {name!r}")
        exp = tuple(1 if v == name else 0 for v in variables)
        return cls(variables, {exp: 1})

    @classmethod
    def gens(cls, variables: Sequence[str]) -> tuple["Polynomial", ...]:
        return tuple(cls.var(v, variables) for v in variables)

    # -- inspection -------------------------------------------------------

    @property
    def terms(self) -> Mapping[Exponent, Fraction]:
        return MappingProxyType(self._terms)

    @property
    def nvars(self) -> int:
        return len(self.variables)

    def is_zero(self) -> bool:
        return not self._terms

    def __bool__(self) -> bool:
        return bool(self._terms)

    def is_constant(self) -> bool:
        return all(not any(e) for e in self._terms)

    def constant_term(self) -> Fraction:
        return self._terms.get((0,) * self.nvars, Fraction(0))

    def total_degree(self) -> int:
        return max((sum(e) for e in self._terms), default=-1)

    def degree_in(self, var: str) -> int:
        i = self._index(var)
        return max((e[i] for e in self._terms), default=-1)

    def used_variables(self) -> tuple[str, ...]:
        used = [False] * self.nvars
        for exp in self._terms:
            for i, e in enumerate(exp):
                if e:
                    used[i] = True
        return tuple(v for v, u in zip(self.variables, used) if u)

    def free_of(self, var: str) -> bool:
        return self.degree_in(var) <= 0

    def sorted_terms(self) -> list[tuple[Exponent, Fraction]]:
        """Terms in graded lexicographic order, leading term first."""
        return sorted(self._terms.items(), key=lambda kv: grlex_key(kv[0]), reverse=True)

    def leading_coefficient(self) -> Fraction:
        if not self._terms:
            return Fraction(0)
        return self.sorted_terms()[0][1]

    def _index(self, var: str) -> int:
        try:
            return self.variables.index(var)
        except ValueError:
            raise KeyError(f"unknown variable {var!r} (have {self.variables})") from None

    # -- arithmetic -------------------------------------------------------

    def _coerce(self, other) -> "Polynomial":
        if isinstance(other, Polynomial):
            if other.variables != self.variables:
                raise VariableMismatchError(
                    f"variable lists differ: {self.variables} vs {other.variables}"
                )
            return other
        return Polynomial.constant(as_fraction(other), self.variables)

    def __add__(self, other) -> "Polynomial":
        try:
            other = self._coerce(other)
        except TypeError:
            return NotImplemented
        out = dict(self._terms)
        for exp, c in other._terms.items():
            s = out.get(exp, 0) + c
            if s:
                out[exp] = s
            else:
                out.pop(exp, None)
        return Polynomial._raw(self.variables, out)

    __radd__ = __add__

    def __neg__(self) -> "Polynomial":
        return Polynomial._raw(self.variables, {e: -c for e, c in self._terms.items()})

    def __sub__(self, other) -> "Polynomial":
        try:
            other = self._coerce(other)
        except TypeError:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other) -> "Polynomial":
        return (-self) + other

    def __mul__(self, other) -> "Polynomial":
        if not isinstance(other, Polynomial):
            try:
                c = as_fraction(other)
            except TypeError:
                return NotImplemented
            if not c:
                return Polynomial._raw(self.variables, {})
            return Polynomial._raw(self.variables, {e: v * c for e, v in self._terms.items()})
        other = self._coerce(other)
        out: dict[Exponent, Fraction] = {}
        for e1, c1 in self._terms.items():
            for e2, c2 in other._terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                s = out.get(e, 0) + c1 * c2
                if s:
                    out[e] = s
                else:
                    out.pop(e, None)
        return Polynomial._raw(self.variables, out)

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "Polynomial":
        if not isinstance(n, int) or n < 0:
            raise ValueError("exponent must be a non-negative integer")
        result = Polynomial.constant(1, self.variables)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def __truediv__(self, other) -> "Polynomial":
        c = as_fraction(other)
        if not c:
            raise ZeroDivisionError("division of a polynomial by zero")
        return self * (1 / c)

    def __eq__(self, other) -> bool:
        if isinstance(other, Polynomial):
            return self.variables == other.variables and self._terms == other._terms
        try:
            c = as_fraction(other)
        except TypeError:
            return NotImplemented
        return self.is_constant() and self.constant_term() == c

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.variables, frozenset(self._terms.items())))
        return self._hash

    # -- calculus and evaluation -----------------------------------------

    def partial(self, var: str) -> "Polynomial":
        i = self._index(var)
        out = {}
        for exp, c in self._terms.items():
            k = exp[i]
            if k:
                out[exp[:i] + (k - 1,) + exp[i + 1:]] = c * k
        return Polynomial._raw(self.variables, out)

    def eval(self, point) -> Fraction:
        """Evaluate at ``point`` (mapping name -> value, or a sequence in variable order)."""
        values = self._point_values(point)
        total = Fraction(0)
        for exp, c in self._terms.items():
            term = c
            for v, e in zip(values, exp):
                if e:
                    term *= v**e
            total += term
        return total

    def __call__(self, point) -> Fraction:
        return self.eval(point)

    def _point_values(self, point) -> list:
        if isinstance(point, Mapping):
            missing = [v for v in self.variables if v not in point]
            if missing:
                raise KeyError(f"no value bound for {missing}")
            return [as_fraction(point[v]) for v in self.variables]
        values = list(point)
        if len(values) != self.nvars:
            raise ValueError(f"expected {self.nvars} values, got {len(values)}")
        return [as_fraction(v) for v in values]

    def partial_eval(self, bindings: Mapping[str, Scalar]) -> "Polynomial":
        """Substitute constants for some variables; the variable list is unchanged."""
        idx = {self._index(k): as_fraction(v) for k, v in bindings.items()}
        out: dict[Exponent, Fraction] = {}
        for exp, c in self._terms.items():
            e = list(exp)
            for i, val in idx.items():
                if e[i]:
                    c = c * val ** e[i]
                    e[i] = 0
            key = tuple(e)
            s = out.get(key, 0) + c
            if s:
                out[key] = s
            else:
                out.pop(key, None)
        return Polynomial._raw(self.variables, out)

    # -- variable management ---------------------------------------------

    def align(self, variables: Sequence[str]) -> "Polynomial":
        """Re-express over ``variables``, which must contain every variable in use."""
        variables = tuple(variables)
        if variables == self.variables:
            return self
        pos = {v: i for i, v in enumerate(variables)}
        used = self.used_variables()
        missing = [v for v in used if v not in pos]
        if missing:
            raise VariableMismatchError(f"cannot align: {missing} not in {variables}")
        out = {}
        n = len(variables)
        for exp, c in self._terms.items():
            e = [0] * n
            for v, k in zip(self.variables, exp):
                if k:
                    e[pos[v]] = k
            out[tuple(e)] = c
        return Polynomial._raw(variables, out)

    def rename(self, mapping: Mapping[str, str]) -> "Polynomial":
        variables = tuple(mapping.get(v, v) for v in self.variables)
        return Polynomial(variables, self._terms)

    def substitute(self, images: Mapping[str, "Polynomial"], variables: Sequence[str]) -> "Polynomial":
        """Compose: replace each variable by a polynomial over ``variables``.

        Variables absent from ``images`` must themselves appear in ``variables``.
        """
        variables = tuple(variables)
        gens = []
        for v in self.variables:
            if v in images:
                gens.append(images[v].align(variables))
            elif v in variables:
                gens.append(Polynomial.var(v, variables))
            else:
                gens.append(None)
        result = Polynomial.zero(variables)
        powers: dict[tuple[int, int], Polynomial] = {}
        for exp, c in self._terms.items():
            term = Polynomial.constant(c, variables)
            for i, k in enumerate(exp):
                if not k:
                    continue
                if gens[i] is None:
                    raise VariableMismatchError(f"no image for variable {self.variables[i]!r}")
                if (i, k) not in powers:
                    powers[(i, k)] = gens[i] ** k
                term = term * powers[(i, k)]
            result = result + term
        return result

    def collect(self, var: str) -> dict[int, "Polynomial"]:
        """Coefficients of powers of ``var`` (each free of ``var``, same variable list)."""
        i = self._index(var)
        out: dict[int, dict[Exponent, Fraction]] = {}
        for exp, c in self._terms.items():
            k = exp[i]
            out.setdefault(k, {})[exp[:i] + (0,) + exp[i + 1:]] = c
        return {k: Polynomial._raw(self.variables, t) for k, t in sorted(out.items())}

    def divide_by_variable(self, var: str, power: int = 1) -> "Polynomial | None":
        """Exact quotient by ``var**power``, or None if some term is not divisible."""
        i = self._index(var)
        out = {}
        for exp, c in self._terms.items():
            if exp[i] < power:
                return None
            out[exp[:i] + (exp[i] - power,) + exp[i + 1:]] = c
        return Polynomial._raw(self.variables, out)

    def content_primitive(self) -> tuple[Fraction, "Polynomial"]:
        """Split as ``content * primitive`` with coprime integer coefficients and
        a positive leading (graded-lex) coefficient."""
        if not self._terms:
            return Fraction(0), self
        den = lcm(*(c.denominator for c in self._terms.values()))
        num = 0
        for c in self._terms.values():
            num = gcd(num, c.numerator * (den // c.denominator))
        content = Fraction(num, den)
        if self.leading_coefficient() < 0:
            content = -content
        return content, self * (1 / content)

    def primitive(self) -> "Polynomial":
        return self.content_primitive()[1]

    # -- printing ---------------------------------------------------------

    def __str__(self) -> str:
        if not self._terms:
            return "0"
        parts = []
        for idx, (exp, c) in enumerate(self.sorted_terms()):
            mono = "*".join(
                v if k == 1 else f"{v}^{k}" for v, k in zip(self.variables, exp) if k
            )
            mag = abs(c)
            if not mono:
                body = str(mag)
            elif mag == 1:
                body = mono
            else:
                body = f"{mag}*{mono}"
            if idx == 0:
                parts.append(("-" if c < 0 else "") + body)
            else:
                parts.append(("- " if c < 0 else "+ ") + body)
        return " ".join(parts)

    def __repr__(self) -> str:
        return f"Polynomial({str(self)!r}, variables={self.variables})"


def align_all(polys: Iterable[Polynomial], variables: Sequence[str]) -> list[Polynomial]:
    return [p.align(variables) for p in polys]


def merge_variables(*lists: Sequence[str]) -> tuple[str, ...]:
    """Ordered union of variable lists (first occurrence wins)."""
    seen: dict[str, None] = {}
    for vs in lists:
        for v in vs:
            seen.setdefault(v, None)
    return tuple(seen)
