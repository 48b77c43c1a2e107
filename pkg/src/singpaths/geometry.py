"""Charts, polynomial vector fields, brackets, derived flags and annihilators."""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from .exactcore import Polynomial, RationalMatrix, as_fraction, mat_nullspace, mat_rank, solve_in_span

DEFAULT_MAX_DEPTH = 8
DEFAULT_SAMPLES = 20


class ChartMismatchError(ValueError):
    pass


@dataclass(frozen=True)
class Chart:
    name: str
    variables: tuple[str, ...]

    def __post_init__(self):
        object.__setattr__(self, "variables", tuple(self.variables))
        if len(set(self.variables)) != len(self.variables):
            raise ValueError(f"chart {self.name!r} has repeated variable names")

    @property
    def dim(self) -> int:
        return len(self.variables)

    def origin(self) -> tuple[Fraction, ...]:
        return (Fraction(0),) * self.dim

    def coordinate(self, name: str) -> Polynomial:
        return Polynomial.var(name, self.variables)

    def coordinates(self) -> tuple[Polynomial, ...]:
        return Polynomial.gens(self.variables)

    def point(self, values) -> tuple[Fraction, ...]:
        values = tuple(as_fraction(v) for v in values)
        if len(values) != self.dim:
            raise ValueError(f"chart {self.name!r} needs {self.dim} coordinates, got {len(values)}")
        return values


class VectorField:
    """Vector field on a chart; one polynomial coefficient per chart variable."""

    __slots__ = ("chart", "coefficients")

    def __init__(self, chart: Chart, coefficients: Iterable):
        coeffs = []
        for c in coefficients:
            if isinstance(c, Polynomial):
                coeffs.append(c.align(chart.variables))
            else:
                coeffs.append(Polynomial.constant(as_fraction(c), chart.variables))
        if len(coeffs) != chart.dim:
            raise ValueError(f"expected {chart.dim} coefficients on chart {chart.name!r}, got {len(coeffs)}")
        self.chart = chart
        self.coefficients = tuple(coeffs)

    @classmethod
    def coordinate_field(cls, chart: Chart, var: str) -> "VectorField":
        return cls(chart, [int(v == var) for v in chart.variables])

    @classmethod
    def zero(cls, chart: Chart) -> "VectorField":
        return cls(chart, [0] * chart.dim)

    def _check(self, other: "VectorField"):
        if other.chart != self.chart:
            raise ChartMismatchError(f"fields live on charts {self.chart.name!r} and {other.chart.name!r}")

    def __add__(self, other: "VectorField") -> "VectorField":
        self._check(other)
        return VectorField(self.chart, [a + b for a, b in zip(self.coefficients, other.coefficients)])

    def __sub__(self, other: "VectorField") -> "VectorField":
        self._check(other)
        return VectorField(self.chart, [a - b for a, b in zip(self.coefficients, other.coefficients)])

    def __neg__(self) -> "VectorField":
        return VectorField(self.chart, [-a for a in self.coefficients])

    def __mul__(self, f) -> "VectorField":
        """Multiply by a scalar or a function (polynomial on the same chart)."""
        if isinstance(f, Polynomial):
            f = f.align(self.chart.variables)
        return VectorField(self.chart, [f * a for a in self.coefficients])

    __rmul__ = __mul__

    def __eq__(self, other) -> bool:
        return isinstance(other, VectorField) and self.chart == other.chart and self.coefficients == other.coefficients

    def __hash__(self):
        return hash((self.chart, self.coefficients))

    def is_zero(self) -> bool:
        return all(c.is_zero() for c in self.coefficients)

    def apply(self, f: Polynomial) -> Polynomial:
        """Directional derivative v(f)."""
        f = f.align(self.chart.variables)
        out = Polynomial.zero(self.chart.variables)
        for var, c in zip(self.chart.variables, self.coefficients):
            if c:
                out = out + c * f.partial(var)
        return out

    def at(self, point) -> tuple[Fraction, ...]:
        point = self.chart.point(point)
        return tuple(c.eval(point) for c in self.coefficients)

    def __repr__(self) -> str:
        body = ", ".join(str(c) for c in self.coefficients)
        return f"VectorField({self.chart.name}: [{body}])"


def lie_bracket(a: VectorField, b: VectorField) -> VectorField:
    """[a, b]_j = a(b_j) - b(a_j)."""
    a._check(b)
    return VectorField(a.chart, [a.apply(bj) - b.apply(aj) for aj, bj in zip(a.coefficients, b.coefficients)])


@dataclass(frozen=True)
class PolyMap:
    source: Chart
    target: Chart
    components: tuple[Polynomial, ...]

    def __post_init__(self):
        comps = tuple(c.align(self.source.variables) for c in self.components)
        if len(comps) != self.target.dim:
            raise ValueError(f"map needs {self.target.dim} components, got {len(comps)}")
        object.__setattr__(self, "components", comps)

    def __call__(self, point) -> tuple[Fraction, ...]:
        point = self.source.point(point)
        return tuple(c.eval(point) for c in self.components)

    def coordinate_projection(self) -> dict[str, str] | None:
        """source-variable -> target-variable renaming when each component is a
        distinct bare source coordinate; None otherwise."""
        mapping = {}
        for tv, comp in zip(self.target.variables, self.components):
            used = comp.used_variables()
            if len(used) != 1 or comp != Polynomial.var(used[0], self.source.variables):
                return None
            if used[0] in mapping:
                return None
            mapping[used[0]] = tv
        return mapping

    def fiber_variables(self) -> tuple[str, ...] | None:
        proj = self.coordinate_projection()
        if proj is None:
            return None
        return tuple(v for v in self.source.variables if v not in proj)


@dataclass(frozen=True)
class FieldAlongMap:
    """Tangent vectors of the target chart attached to points of the source chart.

    Components are polynomials in the source variables. ``projectable`` is
    True/False when decidable (zero result, or the map is a coordinate
    projection), else None.
    """

    map: PolyMap
    components: tuple[Polynomial, ...]
    projectable: bool | None

    def at(self, point) -> tuple[Fraction, ...]:
        point = self.map.source.point(point)
        return tuple(c.eval(point) for c in self.components)

    def is_zero(self) -> bool:
        return all(c.is_zero() for c in self.components)

    def in_target_variables(self) -> tuple[tuple[str, ...], tuple[Polynomial, ...]]:
        """Rewrite components over (target variables + fiber variables).

        Only available for coordinate projections; fiber variables become
        parameters appended after the target variables.
        """
        proj = self.map.coordinate_projection()
        if proj is None:
            raise ValueError("map is not a coordinate projection")
        fibers = tuple(v for v in self.map.source.variables if v not in proj)
        names = self.map.target.variables + fibers
        return names, tuple(c.rename(proj).align(names) for c in self.components)


def pushforward(f: PolyMap, v: VectorField) -> FieldAlongMap:
    """Components <df_j, v> of f_* v as polynomials in the source variables."""
    if v.chart != f.source:
        raise ChartMismatchError(f"field on {v.chart.name!r}, map from {f.source.name!r}")
    comps = tuple(v.apply(c) for c in f.components)
    if all(c.is_zero() for c in comps):
        projectable = True
    else:
        fibers = f.fiber_variables()
        if fibers is None:
            projectable = None
        else:
            projectable = all(c.free_of(w) for c in comps for w in fibers)
    return FieldAlongMap(f, comps, projectable)


def frame_matrix(frame: Sequence[VectorField], point) -> RationalMatrix:
    if not frame:
        raise ValueError("empty frame")
    chart = frame[0].chart
    return RationalMatrix([v.at(point) for v in frame], chart.dim)


def frame_rank(frame: Sequence[VectorField], point) -> int:
    if not frame:
        return 0
    return mat_rank(frame_matrix(frame, point))


@dataclass(frozen=True)
class Distribution:
    """Span of a frame of vector fields, independent at ``base_point``."""

    chart: Chart
    frame: tuple[VectorField, ...]
    base_point: tuple[Fraction, ...] | None = None
    name: str = ""

    def __post_init__(self):
        frame = tuple(self.frame)
        object.__setattr__(self, "frame", frame)
        for v in frame:
            if v.chart != self.chart:
                raise ChartMismatchError(f"frame field on {v.chart.name!r}, distribution on {self.chart.name!r}")
        base = self.chart.origin() if self.base_point is None else self.chart.point(self.base_point)
        object.__setattr__(self, "base_point", base)
        if frame_rank(frame, base) != len(frame):
            raise ValueError(f"frame of {self.name or 'distribution'} is dependent at the base point {base}")

    @property
    def rank(self) -> int:
        return len(self.frame)


@dataclass(frozen=True)
class Flag:
    kind: str
    levels: tuple[tuple[int, tuple[VectorField, ...]], ...]
    base_point: tuple[Fraction, ...]

    @property
    def frames(self) -> list[tuple[VectorField, ...]]:
        return [fr for _, fr in self.levels]

    def frame(self, depth: int) -> tuple[VectorField, ...]:
        for d, fr in self.levels:
            if d == depth:
                return fr
        # the flag stopped growing; higher levels equal the last one
        if depth > self.levels[-1][0]:
            return self.levels[-1][1]
        raise KeyError(depth)


@dataclass(frozen=True)
class GrowthVector:
    point: tuple[Fraction, ...]
    ranks: tuple[int, ...]


def _extend(current: list[VectorField], candidates: Iterable[VectorField], point, dim: int) -> list[VectorField]:
    out = list(current)
    r = frame_rank(out, point)
    for c in candidates:
        if r == dim:
            break
        if c.is_zero():
            continue
        trial = out + [c]
        rt = frame_rank(trial, point)
        if rt > r:
            out, r = trial, rt
    return out


def derived_flag(d: Distribution, kind: str = "small", max_depth: int = DEFAULT_MAX_DEPTH) -> Flag:
    """Small (D^(i+1) = D^(i) + [D, D^(i)]) or big (D^{i+1} = D^i + [D^i, D^i]) derived flag.

    Generators are pruned by exact rank at the distribution's base point. The
    flag stops once the rank reaches the chart dimension or stops increasing.
    """
    if kind not in ("small", "big"):
        raise ValueError(f"kind must be 'small' or 'big', not {kind!r}")
    if max_depth < 1:
        raise ValueError("max_depth must be >= 1")
    dim = d.chart.dim
    point = d.base_point
    levels = [(1, tuple(d.frame))]
    current = list(d.frame)
    for depth in range(2, max_depth + 1):
        if len(current) >= dim:
            break
        if kind == "small":
            cands = (lie_bracket(g, h) for g in d.frame for h in current)
        else:
            cands = (lie_bracket(current[i], current[j]) for i in range(len(current)) for j in range(i + 1, len(current)))
        nxt = _extend(current, cands, point, dim)
        if len(nxt) == len(current):
            levels.append((depth, tuple(nxt)))
            break
        current = nxt
        levels.append((depth, tuple(current)))
    return Flag(kind, tuple(levels), point)


def growth_at(flag: Flag, point) -> GrowthVector:
    point = flag.levels[0][1][0].chart.point(point)
    return GrowthVector(point, tuple(frame_rank(fr, point) for fr in flag.frames))


def random_rational_points(chart_dim: int, n: int = DEFAULT_SAMPLES, seed: int = 0,
                           num_range: int = 9, max_den: int = 9) -> list[tuple[Fraction, ...]]:
    """Seeded 'generic' points: numerators in [-num_range, num_range], denominators in [1, max_den]."""
    rng = random.Random(seed)
    return [
        tuple(Fraction(rng.randint(-num_range, num_range), rng.randint(1, max_den)) for _ in range(chart_dim))
        for _ in range(n)
    ]


@dataclass(frozen=True)
class GrowthReport:
    kind: str
    generic: tuple[int, ...]
    per_point: tuple[GrowthVector, ...]
    singular_candidates: tuple[tuple[Fraction, ...], ...]

    @property
    def constant_rank(self) -> bool:
        return not self.singular_candidates


def generic_growth(flag: Flag, n: int = DEFAULT_SAMPLES, seed: int = 0, points=None) -> GrowthReport:
    """Entrywise maximum of growth vectors over seeded sample points; points
    realizing a smaller vector are reported as singular-locus candidates."""
    dim = flag.levels[0][1][0].chart.dim
    if points is None:
        points = random_rational_points(dim, n, seed)
    per = [growth_at(flag, p) for p in points]
    best = tuple(max(g.ranks[i] for g in per) for i in range(len(flag.levels)))
    singular = tuple(g.point for g in per if g.ranks != best)
    return GrowthReport(flag.kind, best, tuple(per), singular)


def annihilator_at(frame: Sequence[VectorField], point) -> list[tuple[Fraction, ...]]:
    """Exact basis of the covectors vanishing on span{frame(point)}."""
    if not frame:
        raise ValueError("empty frame")
    return mat_nullspace(frame_matrix(frame, point))


def ad_injective(l_frame: Sequence[VectorField], k_frame: Sequence[VectorField],
                 e_frame: Sequence[VectorField], point, v: Sequence) -> bool:
    """Injectivity of ad(v): K -> TM/E at ``point`` for ``v`` in the L fiber.

    ``v`` is extended to a local section of L with constant coefficients in
    the L frame; brackets with the K frame must be independent modulo E.
    """
    point = l_frame[0].chart.point(point)
    v = tuple(as_fraction(x) for x in v)
    if not any(v):
        raise ValueError("ad(v) needs a nonzero vector v")
    coeffs = solve_in_span([f.at(point) for f in l_frame], v)
    if coeffs is None:
        raise ValueError("v does not lie in the L fiber at this point")
    ext = VectorField.zero(l_frame[0].chart)
    for c, f in zip(coeffs, l_frame):
        if c:
            ext = ext + f * c
    e_vals = [f.at(point) for f in e_frame]
    e_rank = mat_rank(RationalMatrix(e_vals, len(point)))
    brackets = [lie_bracket(ext, kappa).at(point) for kappa in k_frame]
    total = mat_rank(RationalMatrix(e_vals + brackets, len(point)))
    return total == e_rank + len(k_frame)


def same_span(a: Sequence[Sequence], b: Sequence[Sequence], dim: int) -> bool:
    ra = mat_rank(RationalMatrix(list(a), dim)) if a else 0
    rb = mat_rank(RationalMatrix(list(b), dim)) if b else 0
    rab = mat_rank(RationalMatrix(list(a) + list(b), dim)) if (a or b) else 0
    return ra == rb == rab
