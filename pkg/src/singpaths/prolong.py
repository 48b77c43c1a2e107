"""Prolongation of rank-2 distributions, (2,3,5) frames, cone systems, contact hull."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import factorial
from typing import Sequence

from .exactcore import Polynomial, RationalMatrix, as_fraction, mat_rank
from .geometry import (
    Chart,
    Distribution,
    FieldAlongMap,
    PolyMap,
    VectorField,
    derived_flag,
    frame_rank,
    generic_growth,
    lie_bracket,
    pushforward,
    random_rational_points,
    same_span,
    ad_injective,
    DEFAULT_SAMPLES,
)
from .hamilton import ControlHamiltonian, CotangentChart, control_hamiltonian

SMALL_235 = (2, 3, 5)
PROLONGED_SMALL = (2, 3, 4, 5, 6)
PROLONGED_BIG = (2, 3, 4, 6)


class GrowthError(ValueError):
    pass


class SplittingError(ValueError):
    pass


def _growth_mismatch(got: Sequence[int], want: Sequence[int]) -> str:
    for i, (g, w) in enumerate(zip(got, want), 1):
        if g != w:
            return f"level {i}: rank {g}, expected {w}"
    return f"length {len(got)}, expected {len(want)}"


def require_growth(d: Distribution, kind: str, expected: Sequence[int], samples: int = DEFAULT_SAMPLES,
                   seed: int = 0) -> None:
    flag = derived_flag(d, kind)
    report = generic_growth(flag, samples, seed)
    if report.generic != tuple(expected):
        raise GrowthError(f"{kind} growth {report.generic} of {d.name or 'distribution'}: "
                          f"{_growth_mismatch(report.generic, expected)}")


@dataclass(frozen=True)
class Frame235:
    fields: tuple[VectorField, ...]
    base_point: tuple[Fraction, ...]

    @property
    def eta(self) -> tuple[VectorField, ...]:
        return self.fields

    def __iter__(self):
        return iter(self.fields)

    def certificate(self) -> dict[str, bool]:
        e1, e2, e3, e4, e5 = self.fields
        return {
            "eta3 = [eta1, eta2]": lie_bracket(e1, e2) == e3,
            "eta4 = [eta1, eta3]": lie_bracket(e1, e3) == e4,
            "eta5 = [eta2, eta3]": lie_bracket(e2, e3) == e5,
            "rank 5 at base point": frame_rank(list(self.fields), self.base_point) == 5,
        }


def frame235(d: Distribution) -> Frame235:
    if d.rank != 2 or d.chart.dim != 5:
        raise GrowthError("a (2,3,5) frame needs a rank-2 distribution in dimension 5")
    e1, e2 = d.frame
    e3 = lie_bracket(e1, e2)
    e4 = lie_bracket(e1, e3)
    e5 = lie_bracket(e2, e3)
    fields = (e1, e2, e3, e4, e5)
    if frame_rank(list(fields), d.base_point) != 5:
        raise GrowthError(f"eta1..eta5 do not have rank 5 at the base point {d.base_point}")
    return Frame235(fields, d.base_point)


@dataclass(frozen=True)
class Prolongation:
    """(Z, E) over (Y, D) with the splitting data E = L + K when known.

    ``l_frame`` spans Ker(pi_Y*); ``k_frame`` spans Ker(pi_X*) and may be None
    for user models, in which case only E-level analyses are available.
    """

    y_chart: Chart
    z_chart: Chart
    e: Distribution
    l_frame: tuple[VectorField, ...]
    k_frame: tuple[VectorField, ...] | None
    pi_y: PolyMap
    pi_x: PolyMap | None = None
    fiber_var: str | None = None

    def check_splitting(self, points) -> bool:
        """L and K together have rank rank(E) and span E at every point."""
        if self.k_frame is None:
            raise SplittingError("no K frame available for this prolongation")
        lk = list(self.l_frame) + list(self.k_frame)
        for pt in points:
            lk_vals = [f.at(pt) for f in lk]
            e_vals = [f.at(pt) for f in self.e.frame]
            if mat_rank(RationalMatrix(lk_vals, self.z_chart.dim)) != self.e.rank:
                return False
            if not same_span(lk_vals, e_vals, self.z_chart.dim):
                return False
        return True


def _fresh_name(name: str, taken: Sequence[str]) -> str:
    while name in taken:
        name += "_"
    return name


def prolong(d: Distribution, fiber_var: str = "z", samples: int = DEFAULT_SAMPLES, seed: int = 0) -> Prolongation:
    """Prolongation in the affine fiber chart z = u2/u1: E = <d/dz, eta1 + z*eta2>.

    The chart boundary u1 = 0 is not covered. Returns d/dz as the L generator;
    the K generator is left unset.
    """
    if d.rank != 2:
        raise GrowthError(f"prolongation needs a rank-2 distribution, got rank {d.rank}")
    require_growth(d, "small", SMALL_235, samples, seed)
    fiber_var = _fresh_name(fiber_var, d.chart.variables)
    zc = Chart(f"P{d.name or d.chart.name}", d.chart.variables + (fiber_var,))
    lift = lambda v: VectorField(zc, [c.align(zc.variables) for c in v.coefficients] + [0])
    eta1, eta2 = (lift(v) for v in d.frame)
    zeta = VectorField.coordinate_field(zc, fiber_var)
    w = zc.coordinate(fiber_var)
    e = Distribution(zc, (zeta, eta1 + eta2 * w), d.base_point + (Fraction(0),), name="E")
    require_growth(e, "small", PROLONGED_SMALL, samples, seed)
    require_growth(e, "big", PROLONGED_BIG, samples, seed)
    pi_y = PolyMap(zc, d.chart, tuple(zc.coordinate(v) for v in d.chart.variables))
    return Prolongation(d.chart, zc, e, (zeta,), None, pi_y, None, fiber_var)


@dataclass(frozen=True)
class ConeSystem:
    prolongation: Prolongation
    x_chart: Chart
    pi_x: PolyMap
    generator: VectorField
    F: FieldAlongMap
    multiplier: str
    cchart: CotangentChart
    hamiltonian: ControlHamiltonian

    @property
    def fiber_vars(self) -> tuple[str, ...]:
        return self.hamiltonian.determined

    def z_point(self, x_point, fiber_values) -> tuple[Fraction, ...]:
        """The Z point over ``x_point`` with the given fiber coordinates."""
        proj = self.pi_x.coordinate_projection()
        x_point = self.x_chart.point(x_point)
        fiber_values = tuple(fiber_values) if isinstance(fiber_values, (tuple, list)) else (fiber_values,)
        xs = dict(zip(self.x_chart.variables, x_point))
        fs = dict(zip(self.fiber_vars, fiber_values))
        vals = []
        for v in self.pi_x.source.variables:
            if v in fs:
                vals.append(fs[v])
            else:
                vals.append(xs[proj[v]])
        return tuple(as_fraction(x) for x in vals)

    def velocity(self, z_point, scale=1) -> tuple[Fraction, ...]:
        return tuple(as_fraction(scale) * c for c in self.F.at(z_point))


def cone_system(p: Prolongation, pi_x: PolyMap | None = None, *, multiplier: str = "mu",
                momenta: Sequence[str] | None = None, samples: int = DEFAULT_SAMPLES, seed: int = 0) -> ConeSystem:
    """Control system F = pi_X*|L on X, one multiplier along the L generator."""
    pi_x = pi_x or p.pi_x
    if pi_x is None:
        raise SplittingError("cone system needs the projection pi_X (splitting data)")
    if pi_x.coordinate_projection() is None:
        raise SplittingError("pi_X must be a coordinate projection of the Z chart")
    if len(p.l_frame) != 1:
        raise SplittingError("cone system needs a rank-1 L frame")
    gen = p.l_frame[0]
    F = pushforward(pi_x, gen)
    for pt in random_rational_points(p.z_chart.dim, samples, seed):
        if not any(F.at(pt)):
            raise SplittingError(f"pushforward of the L generator vanishes at {pt}")
    cchart = CotangentChart(pi_x.target, tuple(momenta)) if momenta else CotangentChart.default(pi_x.target)
    h = control_hamiltonian([F], [multiplier], cchart)
    return ConeSystem(p, pi_x.target, pi_x, gen, F, multiplier, cchart, h)


def immersion_by_ad(c: ConeSystem, z_point, scale=1) -> bool:
    """pi_X*|L immersive at (z, v) via injectivity of ad(v): K -> TZ/E."""
    p = c.prolongation
    if p.k_frame is None:
        raise SplittingError("ad-injectivity needs the K frame")
    v = tuple(as_fraction(scale) * x for x in c.generator.at(z_point))
    return ad_injective(p.l_frame, p.k_frame, p.e.frame, z_point, v)


def immersion_by_jacobian(c: ConeSystem, z_point, scale=1) -> bool:
    """Rank of the Jacobian of (z, s) -> (pi_X(z), s*F(z)) equals dim Z + 1."""
    zvars = c.pi_x.source.variables
    s = as_fraction(scale)
    point = dict(zip(zvars, c.pi_x.source.point(z_point)))
    rows = []
    for comp in c.pi_x.components:
        rows.append([comp.partial(v).eval(point) for v in zvars] + [Fraction(0)])
    for comp in c.F.components:
        rows.append([s * comp.partial(v).eval(point) for v in zvars] + [comp.eval(point)])
    return mat_rank(RationalMatrix(rows, len(zvars) + 1)) == len(zvars) + 1


def _det(m: list[list[Polynomial]]) -> Polynomial:
    n = len(m)
    if n == 1:
        return m[0][0]
    total = None
    for j in range(n):
        if m[0][j].is_zero():
            continue
        minor = [row[:j] + row[j + 1:] for row in m[1:]]
        term = m[0][j] * _det(minor)
        term = term if j % 2 == 0 else -term
        total = term if total is None else total + term
    return total if total is not None else m[0][0] * 0


def _pfaffian(a: list[list[Fraction]]) -> Fraction:
    n = len(a)
    if n == 0:
        return Fraction(1)
    if n % 2:
        return Fraction(0)
    total = Fraction(0)
    for j in range(1, n):
        if not a[0][j]:
            continue
        keep = [k for k in range(1, n) if k != j]
        sub = [[a[r][c] for c in keep] for r in keep]
        sign = 1 if j % 2 == 1 else -1
        total += sign * a[0][j] * _pfaffian(sub)
    return total


def hull_contact_verdict(fields: Sequence[VectorField], point) -> tuple[tuple[Fraction, ...], Fraction]:
    """For a corank-1 frame on an odd-dimensional chart, return the annihilating
    form alpha at ``point`` and the coefficient of alpha ^ (d alpha)^k there.

    alpha is the generalized cross product of the frame, so it is polynomial
    and vanishes on every frame field identically.
    """
    chart = fields[0].chart
    n = chart.dim
    if len(fields) != n - 1 or n % 2 == 0:
        raise ValueError("need n-1 fields on an odd-dimensional chart")
    mat = [list(f.coefficients) for f in fields]
    alpha = []
    for i in range(n):
        minor = [row[:i] + row[i + 1:] for row in mat]
        a = _det(minor)
        alpha.append(a if i % 2 == 0 else -a)
    pt = dict(zip(chart.variables, chart.point(point)))
    a0 = tuple(a.eval(pt) for a in alpha)
    grad = [[alpha[j].partial(chart.variables[i]).eval(pt) for j in range(n)] for i in range(n)]
    omega = [[grad[i][j] - grad[j][i] for j in range(n)] for i in range(n)]
    k = (n - 1) // 2
    value = Fraction(0)
    for i in range(n):
        if not a0[i]:
            continue
        rest = [r for r in range(n) if r != i]
        sub = [[omega[r][c] for c in rest] for r in rest]
        sign = 1 if i % 2 == 0 else -1
        value += sign * a0[i] * factorial(k) * _pfaffian(sub)
    return a0, value


@dataclass(frozen=True)
class ContactHull:
    frame: tuple[tuple[Fraction, ...], ...]
    fiber_independent: bool
    alpha: tuple[Fraction, ...]
    top_coefficient: Fraction

    @property
    def is_contact(self) -> bool:
        return self.top_coefficient != 0


def contact_hull(c: ConeSystem, x_point, fiber_samples: Sequence) -> ContactHull:
    """D'_x = pi_X*(E^(4)_z), checked for independence of the fiber point z,
    and the contact test alpha ^ d alpha ^ d alpha != 0 at x."""
    if len(fiber_samples) < 4:
        raise ValueError("need at least 4 fiber samples")
    if len(c.fiber_vars) != 1:
        raise ValueError("contact hull is implemented for one-dimensional pi_X fibers")
    e4 = derived_flag(c.prolongation.e, "small").frame(4)
    pushed = [pushforward(c.pi_x, f) for f in e4]
    spans = []
    for w in fiber_samples:
        zp = c.z_point(x_point, (w,))
        vecs = [f.at(zp) for f in pushed]
        basis_rows = RationalMatrix(vecs, c.x_chart.dim)
        if mat_rank(basis_rows) != c.x_chart.dim - 1:
            raise ValueError(f"pi_X*(E^(4)) has rank {mat_rank(basis_rows)} at fiber value {w}, expected 4")
        spans.append(vecs)
    independent = all(same_span(spans[0], s, c.x_chart.dim) for s in spans[1:])
    # fields on X: fix the fiber coordinate at the first sample
    w0 = as_fraction(fiber_samples[0])
    xfields = []
    for f in pushed:
        _, comps = f.in_target_variables()
        comps = [q.partial_eval({c.fiber_vars[0]: w0}).align(c.x_chart.variables) for q in comps]
        xfields.append(VectorField(c.x_chart, comps))
    chosen: list[VectorField] = []
    for f in xfields:
        if frame_rank(chosen + [f], x_point) > len(chosen):
            chosen.append(f)
    alpha, top = hull_contact_verdict(chosen, x_point)
    frame = tuple(tuple(f.at(x_point)) for f in chosen)
    return ContactHull(frame, independent, alpha, top)

