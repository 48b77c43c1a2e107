"""Cotangent lifts, Hamilton fields, Poisson brackets and constraint chains.

Sign conventions: the Hamilton field of ``h`` has components
``(dh/dp, -dh/dx)``, and ``poisson(f, g) = X_f(g)`` so that
``poisson(H_eta, H_xi) == H_[eta, xi]``.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .exactcore import Polynomial, RationalMatrix, mat_rank
from .geometry import Chart, ChartMismatchError, FieldAlongMap, VectorField, frame_rank, lie_bracket


class ControlAffinityError(ValueError):
    pass


class BracketRelationError(ValueError):
    pass


@dataclass(frozen=True)
class CotangentChart:
    base: Chart
    momenta: tuple[str, ...]

    def __post_init__(self):
        object.__setattr__(self, "momenta", tuple(self.momenta))
        if len(self.momenta) != self.base.dim:
            raise ValueError("need one momentum name per base variable")
        clash = set(self.momenta) & set(self.base.variables)
        if clash or len(set(self.momenta)) != len(self.momenta):
            raise ValueError(f"momentum names must be distinct from base names: {sorted(clash)}")

    @classmethod
    def default(cls, base: Chart) -> "CotangentChart":
        return cls(base, tuple(f"p_{v}" for v in base.variables))

    @property
    def variables(self) -> tuple[str, ...]:
        return self.base.variables + self.momenta

    @property
    def phase_chart(self) -> Chart:
        return Chart(f"T*{self.base.name}", self.variables)

    def momentum(self, base_var: str) -> str:
        return self.momenta[self.base.variables.index(base_var)]


@dataclass(frozen=True)
class CotangentFunction:
    chart: CotangentChart
    poly: Polynomial

    def __post_init__(self):
        object.__setattr__(self, "poly", self.poly.align(self.chart.variables))

    def __add__(self, other: "CotangentFunction") -> "CotangentFunction":
        _same(self.chart, other.chart)
        return CotangentFunction(self.chart, self.poly + other.poly)

    def __sub__(self, other: "CotangentFunction") -> "CotangentFunction":
        _same(self.chart, other.chart)
        return CotangentFunction(self.chart, self.poly - other.poly)

    def __neg__(self) -> "CotangentFunction":
        return CotangentFunction(self.chart, -self.poly)

    def __mul__(self, other) -> "CotangentFunction":
        if isinstance(other, CotangentFunction):
            _same(self.chart, other.chart)
            other = other.poly
        return CotangentFunction(self.chart, self.poly * other)

    __rmul__ = __mul__

    def __eq__(self, other) -> bool:
        return isinstance(other, CotangentFunction) and self.chart == other.chart and self.poly == other.poly

    def __hash__(self):
        return hash((self.chart, self.poly))

    def eval(self, base_point, covector) -> Fraction:
        return self.poly.eval(tuple(base_point) + tuple(covector))

    def __str__(self) -> str:
        return str(self.poly)


def _same(a: CotangentChart, b: CotangentChart):
    if a != b:
        raise ChartMismatchError("cotangent functions live on different charts")


def h_lift(v: VectorField, cchart: CotangentChart) -> CotangentFunction:
    """H_v(x, p) = <p, v(x)>."""
    if v.chart != cchart.base:
        raise ChartMismatchError(f"field on {v.chart.name!r}, cotangent chart over {cchart.base.name!r}")
    names = cchart.variables
    total = Polynomial.zero(names)
    for mom, c in zip(cchart.momenta, v.coefficients):
        if c:
            total = total + Polynomial.var(mom, names) * c.align(names)
    return CotangentFunction(cchart, total)


def hamilton_field(h: CotangentFunction) -> VectorField:
    """Hamilton vector field on the phase chart: x' = dh/dp, p' = -dh/dx."""
    c = h.chart
    comps = [h.poly.partial(m) for m in c.momenta] + [-h.poly.partial(x) for x in c.base.variables]
    return VectorField(c.phase_chart, comps)


def poisson_poly(f: Polynomial, g: Polynomial, cchart: CotangentChart) -> Polynomial:
    """{f, g} = sum_j df/dp_j dg/dx_j - df/dx_j dg/dp_j, over any superset of the phase variables."""
    out = Polynomial.zero(f.variables)
    for x, p in zip(cchart.base.variables, cchart.momenta):
        fp, gx = f.partial(p), g.partial(x)
        if fp and gx:
            out = out + fp * gx
        fx, gp = f.partial(x), g.partial(p)
        if fx and gp:
            out = out - fx * gp
    return out


def poisson(f: CotangentFunction, g: CotangentFunction) -> CotangentFunction:
    _same(f.chart, g.chart)
    return CotangentFunction(f.chart, poisson_poly(f.poly, g.poly, f.chart))


def _frame_fields(frame) -> tuple[VectorField, ...]:
    return tuple(getattr(frame, "fields", frame))


def check_frame235(fields: Sequence[VectorField], point=None) -> None:
    """Validate eta3=[eta1,eta2], eta4=[eta1,eta3], eta5=[eta2,eta3] and rank 5."""
    if len(fields) != 5:
        raise BracketRelationError(f"need five fields, got {len(fields)}")
    e1, e2, e3, e4, e5 = fields
    for lhs, (a, b, label) in ((e3, (e1, e2, "eta3 = [eta1, eta2]")),
                              (e4, (e1, e3, "eta4 = [eta1, eta3]")),
                              (e5, (e2, e3, "eta5 = [eta2, eta3]"))):
        if lie_bracket(a, b) != lhs:
            raise BracketRelationError(f"bracket relation fails: {label}")
    point = e1.chart.origin() if point is None else point
    if frame_rank(list(fields), point) != 5:
        raise BracketRelationError("frame does not have rank 5 at the base point")


def ab_field(frame235, cchart: CotangentChart, base_point=None) -> VectorField:
    """H_eta5 * X_{H_eta1} - H_eta4 * X_{H_eta2} on the cotangent phase chart."""
    fields = _frame_fields(frame235)
    check_frame235(fields, base_point if base_point is not None else getattr(frame235, "base_point", None))
    h = [h_lift(f, cchart) for f in fields]
    x1 = hamilton_field(h[0])
    x2 = hamilton_field(h[1])
    return x1 * h[4].poly - x2 * h[3].poly


@dataclass(frozen=True)
class ControlHamiltonian:
    """Hamiltonian affine in the control multipliers.

    ``determined`` names fiber parameters that enter polynomially (the cone
    system's fiber coordinate); their criticality equations are constraints.
    """

    chart: CotangentChart
    controls: tuple[str, ...]
    poly: Polynomial
    determined: tuple[str, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "controls", tuple(self.controls))
        object.__setattr__(self, "determined", tuple(self.determined))
        object.__setattr__(self, "poly", self.poly.align(self.variables))
        for term in self.poly.terms:
            deg = sum(term[self.variables.index(u)] for u in self.controls)
            if deg > 1:
                raise ControlAffinityError("Hamiltonian is not affine in the control multipliers")

    @property
    def variables(self) -> tuple[str, ...]:
        return self.chart.variables + self.determined + self.controls

    def generator(self, control: str) -> Polynomial:
        """Coefficient of one control multiplier."""
        return self.poly.partial(control)

    def critical_constraints(self) -> dict[str, Polynomial]:
        """dH/du for multipliers and determined parameters; their common zero set is Sigma(H)."""
        return {name: self.poly.partial(name) for name in self.controls + self.determined}

    def specialize(self, values: dict) -> Polynomial:
        return self.poly.partial_eval(values)

    def __str__(self) -> str:
        return str(self.poly)


def control_hamiltonian(generators, controls: Sequence[str], cchart: CotangentChart,
                        determined: Sequence[str] = ()) -> ControlHamiltonian:
    """H = sum_i u_i <p, g_i>; generators are vector fields on the base chart or
    fields along a coordinate projection onto it (fiber variables become
    determined parameters)."""
    if len(generators) != len(controls):
        raise ValueError("one control name per generator")
    determined = list(determined)
    lifted = []
    for g in generators:
        if isinstance(g, VectorField):
            lifted.append((cchart.variables, h_lift(g, cchart).poly))
        elif isinstance(g, FieldAlongMap):
            if g.map.target != cchart.base:
                raise ChartMismatchError("field along map does not target the cotangent base")
            names, comps = g.in_target_variables()
            fibers = names[cchart.base.dim:]
            for w in fibers:
                if w not in determined:
                    determined.append(w)
            allv = cchart.variables + tuple(fibers)
            total = Polynomial.zero(allv)
            for mom, c in zip(cchart.momenta, comps):
                if c:
                    total = total + Polynomial.var(mom, allv) * c.align(allv)
            lifted.append((allv, total))
        else:
            raise TypeError(f"unsupported generator {type(g).__name__}")
    names = cchart.variables + tuple(determined) + tuple(controls)
    h = Polynomial.zero(names)
    for (_, poly), u in zip(lifted, controls):
        h = h + Polynomial.var(u, names) * poly.align(names)
    return ControlHamiltonian(cchart, tuple(controls), h, tuple(determined))


def control_hessian(h: ControlHamiltonian) -> list[list[Polynomial]]:
    return [[h.poly.partial(a).partial(b) for b in h.controls] for a in h.controls]


def rate_name(var: str) -> str:
    return f"{var}_dot"


def chain_variables(h: ControlHamiltonian) -> tuple[str, ...]:
    return h.variables + tuple(rate_name(d) for d in h.determined)


def chain_derive(h: ControlHamiltonian, g) -> Polynomial:
    """Time derivative of a constraint along the constrained dynamics.

    Controls stay formal symbols; each determined parameter ``w`` contributes
    ``w_dot * dg/dw``. The result lives over :func:`chain_variables`.
    """
    names = chain_variables(h)
    poly = g.poly if isinstance(g, CotangentFunction) else g
    used = set(poly.used_variables())
    bad = used & (set(h.controls) | {rate_name(d) for d in h.determined})
    if bad:
        raise ValueError(f"constraint depends on control variables {sorted(bad)}")
    poly = poly.align(names)
    hp = h.poly.align(names)
    out = poisson_poly(hp, poly, h.chart)
    for w in h.determined:
        dg = poly.partial(w)
        if dg:
            out = out + Polynomial.var(rate_name(w), names) * dg
    return out


@dataclass(frozen=True)
class ChainLink:
    """One elimination step.

    ``kind`` is "criticality" (the constraint is some dH/du itself) or
    "derivative" (``derivative`` is the time derivative of ``constraint``).
    """

    kind: str
    constraint: Polynomial
    derivative: Polynomial | None
    factor: Polynomial | None
    successor: Polynomial | None
    case: str

    def factored_form(self) -> str:
        expr = self.constraint if self.kind == "criticality" else self.derivative
        if self.factor is None or self.successor is None:
            return str(expr)
        return f"({self.factor}) * ({self.successor})"


@dataclass(frozen=True)
class ConstraintChain:
    system: ControlHamiltonian
    start: tuple[Polynomial, ...]
    links: tuple[ChainLink, ...]
    conclusion: str
    nonzero: tuple[str, ...] = ()
    label: str = ""

    def successors(self) -> list[Polynomial]:
        return [link.successor for link in self.links if link.successor is not None]

    def terminal(self) -> Polynomial:
        return self.links[-1].constraint


def _single_symbol_split(d: Polynomial, symbols: Sequence[str]):
    """Write d = s * P for one symbol s in ``symbols`` with P free of all symbols."""
    for s in symbols:
        q = d.divide_by_variable(s)
        if q is not None and all(q.free_of(t) for t in symbols):
            return s, q
    return None


def _forces_zero_covector(constraints: Sequence[Polynomial], h: ControlHamiltonian,
                          samples: int = 8, seed: int = 0) -> bool:
    """True if the constraints, linear in the momenta, have only the zero
    covector as common solution at every sampled base point/parameter value."""
    names = constraints[0].variables
    moms = h.chart.momenta
    others = [v for v in names if v not in moms]
    rng = random.Random(seed)
    rows = []
    for c in constraints:
        row = [c.partial(m) for m in moms]
        if any(not coef.free_of(mm) for coef in row for mm in moms):
            return False
        linear = sum((Polynomial.var(m, names) * r for m, r in zip(moms, row)), Polynomial.zero(names))
        if c != linear:
            return False
        rows.append(row)
    if not rows:
        return False
    for _ in range(samples):
        pt = {v: Fraction(rng.randint(-9, 9), rng.randint(1, 9)) for v in others}
        pt.update({m: 0 for m in moms})
        mat = RationalMatrix([[r.eval(pt) for r in row] for row in rows], len(moms))
        if mat_rank(mat) < len(moms):
            return False
    return True


def build_chain(h: ControlHamiltonian, start: Sequence[Polynomial] | None = None, *,
                nonzero: Sequence[str] = (), max_links: int = 12, label: str = "") -> ConstraintChain:
    """Eliminate controls from the constrained system by repeated differentiation.

    ``start`` defaults to the criticality constraints dH/du (multipliers
    first, then determined parameters). A start constraint of the form
    ``s * P`` is reduced to ``P`` right away. Afterwards the last constraint
    is differentiated until it is conserved, couples several controls, or the
    accumulated constraints kill the covector.

    Each single-symbol expression ``s * P`` records the discarded factor
    ``c*s`` (``c`` the rational content of ``P``) and continues with the
    primitive part of ``P``. Symbols in ``nonzero`` are nonzero by
    hypothesis; any other discarded symbol is a case assumption, and a
    covector contradiction refutes the most recent one.
    """
    names = chain_variables(h)
    symbols = tuple(h.controls) + tuple(rate_name(d) for d in h.determined)
    nonzero = tuple(nonzero)
    if start is None:
        start = list(h.critical_constraints().values())
    start = [s.align(names) for s in start]
    links: list[ChainLink] = []
    assumptions: list[str] = []

    def discard(kind, constraint, deriv, expr):
        split = _single_symbol_split(expr, symbols)
        sym, rest = split
        content, prim = rest.content_primitive()
        if sym in nonzero:
            case = f"{sym} != 0 (hypothesis)"
        else:
            case = f"assume {sym} != 0"
            assumptions.append(sym)
        links.append(ChainLink(kind, constraint, deriv, Polynomial.var(sym, names) * content, prim, case))
        return prim

    known = []
    for s in start:
        if any(not s.free_of(t) for t in symbols):
            if _single_symbol_split(s, symbols) is None:
                raise ValueError(f"start constraint {s} is not a single control multiple")
            known.append(discard("criticality", s, None, s))
        else:
            known.append(s)

    g = known[-1]
    conclusion = "max links reached"
    for _ in range(max_links):
        d = chain_derive(h, g)
        if d.is_zero():
            links.append(ChainLink("derivative", g, d, None, None, "conserved"))
            conclusion = "terminal: constraint is conserved"
            break
        if _single_symbol_split(d, symbols) is None:
            links.append(ChainLink("derivative", g, d, None, None, "control-dependent"))
            conclusion = "terminal: derivative couples several controls and determines them"
            break
        prim = discard("derivative", g, d, d)
        known.append(prim)
        if _forces_zero_covector(known, h):
            refuted = assumptions[-1] if assumptions else None
            links.append(ChainLink("derivative", prim, chain_derive(h, prim), None, None, "covector forced to zero"))
            if refuted:
                conclusion = f"contradiction: covector vanishes, hence {refuted} = 0"
            else:
                conclusion = "contradiction: covector vanishes under the hypotheses"
            break
        g = prim
    return ConstraintChain(h, tuple(start), tuple(links), conclusion, nonzero, label)


def format_chain(chain: ConstraintChain) -> str:
    lines = []
    if chain.label:
        lines.append(f"# {chain.label}")
    lines.append(f"system: H = {chain.system.poly}")
    if chain.nonzero:
        lines.append(f"nonzero by hypothesis: {', '.join(chain.nonzero)}")
    for s in chain.start:
        lines.append(f"start constraint: {s}")
    for i, link in enumerate(chain.links, 1):
        lines.append(f"link {i} ({link.kind}):")
        lines.append(f"  constraint: {link.constraint}")
        if link.derivative is not None:
            lines.append(f"  derivative: {link.derivative}")
        lines.append(f"  split:      {link.factored_form()}")
        lines.append(f"  case:       {link.case}")
        if link.successor is not None:
            lines.append(f"  successor:  {link.successor}")
    lines.append(f"conclusion: {chain.conclusion}")
    return "\n".join(lines) + "\n"
