"""Exact linear algebra over Q via Gaussian elimination."""

from __future__ import annotations

from fractions import Fraction
from typing import Sequence

from .polynomial import as_fraction


class RationalMatrix:
    __slots__ = ("rows", "cols", "entries")

    def __init__(self, entries: Sequence[Sequence], cols: int | None = None):
        rows = [tuple(as_fraction(x) for x in row) for row in entries]
        if cols is None:
            if not rows:
                raise ValueError("cols must be given for a matrix with no rows")
            cols = len(rows[0])
        if any(len(r) != cols for r in rows):
            raise ValueError("ragged matrix")
        self.rows = len(rows)
        self.cols = cols
        self.entries = tuple(rows)

    @classmethod
    def identity(cls, n: int) -> "RationalMatrix":
        return cls([[int(i == j) for j in range(n)] for i in range(n)], n)

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "RationalMatrix":
        return cls([[0] * cols for _ in range(rows)], cols)

    def __getitem__(self, ij):
        i, j = ij
        return self.entries[i][j]

    def __eq__(self, other) -> bool:
        return isinstance(other, RationalMatrix) and (self.cols, self.entries) == (other.cols, other.entries)

    def __repr__(self) -> str:
        return f"RationalMatrix({self.rows}x{self.cols})"

    def stack(self, other: "RationalMatrix") -> "RationalMatrix":
        if other.cols != self.cols:
            raise ValueError("column count mismatch")
        return RationalMatrix(self.entries + other.entries, self.cols)

    def rref(self) -> tuple[list[list[Fraction]], list[int]]:
        """Reduced row echelon form and pivot columns."""
        a = [list(r) for r in self.entries]
        pivots: list[int] = []
        r = 0
        for c in range(self.cols):
            if r == len(a):
                break
            pivot = next((i for i in range(r, len(a)) if a[i][c]), None)
            if pivot is None:
                continue
            a[r], a[pivot] = a[pivot], a[r]
            inv = 1 / a[r][c]
            a[r] = [x * inv for x in a[r]]
            for i in range(len(a)):
                if i != r and a[i][c]:
                    f = a[i][c]
                    a[i] = [x - f * y for x, y in zip(a[i], a[r])]
            pivots.append(c)
            r += 1
        return a, pivots

    def rank(self) -> int:
        return len(self.rref()[1])

    def nullspace(self) -> list[tuple[Fraction, ...]]:
        a, pivots = self.rref()
        free = [c for c in range(self.cols) if c not in pivots]
        basis = []
        for f in free:
            v = [Fraction(0)] * self.cols
            v[f] = Fraction(1)
            for row, pc in zip(a, pivots):
                v[pc] = -row[f]
            basis.append(tuple(v))
        return basis


def _as_matrix(m) -> RationalMatrix:
    return m if isinstance(m, RationalMatrix) else RationalMatrix(m)


def mat_rank(m) -> int:
    m = _as_matrix(m)
    if m.rows == 0:
        return 0
    return m.rank()


def mat_nullspace(m, cols: int | None = None) -> list[tuple[Fraction, ...]]:
    """Basis of the right null space; empty when the kernel is trivial."""
    if not isinstance(m, RationalMatrix):
        m = RationalMatrix(m, cols)
    if m.rows == 0:
        return [tuple(Fraction(int(i == j)) for j in range(m.cols)) for i in range(m.cols)]
    return m.nullspace()


def solve_in_span(vectors: Sequence[Sequence], target: Sequence) -> tuple[Fraction, ...] | None:
    """Coefficients ``c`` with ``sum c_i vectors[i] == target``, or None."""
    n = len(target)
    k = len(vectors)
    aug = [[as_fraction(vectors[j][i]) for j in range(k)] + [as_fraction(target[i])] for i in range(n)]
    a, pivots = RationalMatrix(aug, k + 1).rref()
    if k in pivots:
        return None
    coeffs = [Fraction(0)] * k
    for row, pc in zip(a, pivots):
        coeffs[pc] = row[k]
    return tuple(coeffs)
