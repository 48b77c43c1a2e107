"""Float integration of singular extremals, lifting, classification and path comparison.

Exact geometry meets float dynamics in two places only: initial covectors are
computed exactly and rounded once, and classification rounds sampled base
points to rationals before building exact annihilators.
"""

from __future__ import annotations

import csv
import io
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Mapping, Sequence

import numpy as np
from scipy.interpolate import CubicSpline

from .exactcore import Polynomial, RationalMatrix, as_fraction, lambdify, mat_nullspace
from .geometry import Distribution, VectorField, annihilator_at, derived_flag
from .hamilton import (
    ControlHamiltonian,
    CotangentChart,
    CotangentFunction,
    ab_field,
    chain_derive,
    h_lift,
    hamilton_field,
    rate_name,
)
from .prolong import ConeSystem, Frame235, Prolongation, frame235

COVECTOR_FLOOR = 1e-12
MEMBERSHIP_TOL = 1e-7
LIFT_TOL = 1e-10


class ExtremalError(ValueError):
    pass


class DegenerateError(ExtremalError):
    pass


class NotAConeTrajectoryError(ExtremalError):
    pass


class NonMonotoneError(ValueError):
    pass


@dataclass(frozen=True)
class ExtremalState:
    time: float
    base: np.ndarray
    covector: np.ndarray
    controls: np.ndarray


@dataclass
class ExtremalTrace:
    """Uniformly sampled bi-extremal (base point, covector, controls) with residuals."""

    base_vars: tuple[str, ...]
    momentum_vars: tuple[str, ...]
    control_names: tuple[str, ...]
    times: np.ndarray
    base: np.ndarray
    covector: np.ndarray
    controls: np.ndarray
    step: float
    residuals: dict[str, np.ndarray] = field(default_factory=dict)
    chart: str = ""

    def __post_init__(self):
        n = len(self.times)
        if self.base.shape[0] != n or self.covector.shape[0] != n or self.controls.shape[0] != n:
            raise ValueError("trace arrays have inconsistent lengths")
        if self.covector.size and np.min(np.linalg.norm(self.covector, axis=1)) <= COVECTOR_FLOOR:
            raise DegenerateError("covector vanishes along the trace")
        for name, r in self.residuals.items():
            if not np.all(np.isfinite(r)):
                raise ExtremalError(f"non-finite residual {name!r}")

    def __len__(self) -> int:
        return len(self.times)

    def __getitem__(self, index) -> "ExtremalTrace":
        if not isinstance(index, slice):
            raise TypeError("index a trace with a slice; use .states for single states")
        return ExtremalTrace(self.base_vars, self.momentum_vars, self.control_names, self.times[index],
                             self.base[index], self.covector[index], self.controls[index], self.step,
                             {k: v[index] for k, v in self.residuals.items()}, self.chart)

    @property
    def states(self) -> list[ExtremalState]:
        return [ExtremalState(float(t), b, c, u)
                for t, b, c, u in zip(self.times, self.base, self.covector, self.controls)]

    def max_residuals(self) -> dict[str, float]:
        return {k: float(np.max(np.abs(v))) if len(v) else 0.0 for k, v in self.residuals.items()}

    def max_residual(self) -> float:
        return max(self.max_residuals().values(), default=0.0)

    def column(self, name: str) -> np.ndarray:
        return self.base[:, self.base_vars.index(name)]

    def csv_header(self) -> list[str]:
        return (["t"] + list(self.base_vars) + list(self.momentum_vars) + list(self.control_names)
                + [f"res_{k}" for k in self.residuals])

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(self.csv_header())
        res = list(self.residuals.values())
        for i in range(len(self)):
            row = [self.times[i], *self.base[i], *self.covector[i], *self.controls[i], *(r[i] for r in res)]
            w.writerow([repr(float(x)) for x in row])
        return buf.getvalue()


def rk4(f: Callable[[np.ndarray], np.ndarray], y0: np.ndarray, h: float, n_steps: int,
        post: Callable[[np.ndarray], np.ndarray] | None = None) -> np.ndarray:
    """Classical fixed-step RK4; ``post`` is applied after every step."""
    out = np.empty((n_steps + 1, len(y0)))
    y = np.asarray(y0, dtype=float)
    if post is not None:
        y = post(y)
    out[0] = y
    for i in range(n_steps):
        k1 = f(y)
        k2 = f(y + 0.5 * h * k1)
        k3 = f(y + 0.5 * h * k2)
        k4 = f(y + h * k3)
        y = y + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
        if post is not None:
            y = post(y)
        if not np.all(np.isfinite(y)):
            raise ExtremalError(f"non-finite state after step {i + 1}")
        out[i + 1] = y
    return out


def _grid(T: float, h: float) -> tuple[int, float]:
    if h <= 0:
        raise ValueError("step must be positive")
    if T < 0:
        raise ValueError("horizon must be non-negative")
    n = int(round(T / h))
    return n, (T / n if n else h)


def _normalizer(n: int):
    def post(y):
        norm = np.linalg.norm(y[n:])
        if norm <= COVECTOR_FLOOR:
            raise DegenerateError("covector collapsed below 1e-12")
        y = y.copy()
        y[n:] /= norm
        return y
    return post


def _evaluate_all(polys: Mapping[str, Polynomial], variables, states: np.ndarray) -> dict[str, np.ndarray]:
    if not polys:
        return {}
    f = lambdify(list(polys.values()), variables)
    vals = np.array([f(s) for s in states])
    return {k: vals[:, i] for i, k in enumerate(polys)}


def integrate_ab(ab: VectorField, start, T: float, h: float, *,
                 constraints: Mapping[str, Polynomial] | None = None,
                 controls: Mapping[str, Polynomial] | None = None) -> ExtremalTrace:
    """RK4 on a homogeneous cotangent field, renormalizing the covector to unit
    length before the first and after every step (a reparametrization)."""
    names = ab.chart.variables
    n = len(names) // 2
    y0, q0 = start
    z0 = np.concatenate([np.asarray([float(x) for x in y0]), np.asarray([float(x) for x in q0])])
    if np.linalg.norm(z0[n:]) <= COVECTOR_FLOOR:
        raise DegenerateError("initial covector is zero")
    steps, h_eff = _grid(T, h)
    f = lambdify(ab.coefficients, names)
    states = rk4(f, z0, h_eff, steps, _normalizer(n))
    res = _evaluate_all(constraints or {}, names, states)
    ctl = _evaluate_all(controls or {}, names, states)
    ctl_arr = np.column_stack(list(ctl.values())) if ctl else np.zeros((len(states), 0))
    return ExtremalTrace(names[:n], names[n:], tuple(ctl), np.arange(steps + 1) * h_eff,
                         states[:, :n], states[:, n:], ctl_arr, h_eff, res, ab.chart.name)


def initial_covector(frame: Frame235, point, direction) -> tuple[Fraction, ...]:
    """The covector line in (D^2)^perp with u1*H_eta4 + u2*H_eta5 = 0, oriented so
    that the Ab field moves along +direction."""
    u1, u2 = (as_fraction(u) for u in direction)
    if not (u1 or u2):
        raise ValueError("direction must be nonzero")
    e1, e2, e3, e4, e5 = frame.fields
    point = e1.chart.point(point)
    rows = [e1.at(point), e2.at(point), e3.at(point),
            tuple(u1 * a + u2 * b for a, b in zip(e4.at(point), e5.at(point)))]
    basis = mat_nullspace(RationalMatrix(rows, 5))
    if len(basis) != 1:
        raise DegenerateError(f"covector solution space has dimension {len(basis)}, expected 1")
    q = basis[0]
    h4 = sum(a * b for a, b in zip(q, e4.at(point)))
    h5 = sum(a * b for a, b in zip(q, e5.at(point)))
    # base velocity of Ab is H5*eta1 - H4*eta2
    s = u1 * h5 - u2 * h4
    if s == 0:
        raise DegenerateError("H_eta4 and H_eta5 both vanish on the covector line")
    if s < 0:
        q = tuple(-x for x in q)
    return q


@dataclass(frozen=True)
class AbSystem:
    frame: Frame235
    cchart: CotangentChart
    field: VectorField
    constraints: dict
    controls: dict


def ab_system(frame: Frame235, cchart: CotangentChart | None = None) -> AbSystem:
    cchart = cchart or CotangentChart.default(frame.fields[0].chart)
    ab = ab_field(frame, cchart)
    hs = [h_lift(f, cchart).poly for f in frame.fields]
    constraints = {"H_eta1": hs[0], "H_eta2": hs[1], "H_eta3": hs[2]}
    controls = {"u1": hs[4], "u2": -hs[3]}
    return AbSystem(frame, cchart, ab, constraints, controls)


def singular_d_path(d: Distribution, y0, direction, T: float, h: float, *,
                    cchart: CotangentChart | None = None, system: AbSystem | None = None) -> ExtremalTrace:
    """Singular D-path through y0 tangent to direction = (u1, u2) in the frame of D."""
    system = system or ab_system(frame235(d), cchart)
    q0 = initial_covector(system.frame, y0, direction)
    return integrate_ab(system.field, (y0, q0), T, h, constraints=system.constraints, controls=system.controls)


def admissible_cone_covector(c: ConeSystem, x0, lam0, seed: int = 0, regular: bool = True) -> tuple[Fraction, ...]:
    """Random rational covector with H = dH/dlam = 0 at (x0, lam0); with
    ``regular`` it also has d2H/dlam2 != 0."""
    if len(c.fiber_vars) != 1:
        raise ValueError("cone system with one fiber parameter expected")
    lam = c.fiber_vars[0]
    base = c.hamiltonian.generator(c.multiplier)
    pt = dict(zip(c.x_chart.variables, c.x_chart.point(x0)))
    pt[lam] = as_fraction(lam0)
    moms = c.cchart.momenta
    full = {v: Fraction(0) for v in c.hamiltonian.variables}
    full.update(pt)
    rows = [[g.partial(m).eval(full) for m in moms] for g in (base, base.partial(lam))]
    basis = mat_nullspace(RationalMatrix(rows, len(moms)))
    second = base.partial(lam).partial(lam)
    rng = random.Random(seed)
    for _ in range(100):
        coeffs = [Fraction(rng.randint(-9, 9), rng.randint(1, 9)) for _ in basis]
        q = tuple(sum(cf * b[i] for cf, b in zip(coeffs, basis)) for i in range(len(moms)))
        if not any(q):
            continue
        if regular and second.eval({**full, **dict(zip(moms, q))}) == 0:
            continue
        return q
    raise DegenerateError("no admissible covector found")


def integrate_cone_extremal(c: ConeSystem, x0, lam0, q0, T: float, h: float, mu: float = 1.0) -> ExtremalTrace:
    """RK4 for the cone system with the fiber parameter held at lam0 and mu fixed.

    Monitors H, dH/dlam and the chain derivative of dH/dlam (with lam_dot = 0).
    """
    lam = c.fiber_vars[0]
    hpoly = c.hamiltonian.poly
    lam0 = as_fraction(lam0)
    mu_q = Fraction(mu).limit_denominator(10**12) if not isinstance(mu, Fraction) else mu
    spec = {lam: lam0, c.multiplier: mu_q}
    names = c.cchart.variables
    hx = CotangentFunction(c.cchart, hpoly.partial_eval(spec).align(names))
    field_ = hamilton_field(hx)
    g = c.hamiltonian.generator(c.multiplier)
    dg = g.partial(lam)
    chain = chain_derive(c.hamiltonian, dg)
    chain = chain.partial_eval({rate_name(lam): 0, lam: lam0, c.multiplier: mu_q})
    constraints = {
        "H": g.partial_eval({lam: lam0}).align(names),
        "dH_dlam": dg.partial_eval({lam: lam0}).align(names),
        "chain": chain.align(names),
    }
    y0 = np.array([float(x) for x in x0] + [float(x) for x in q0])
    n = c.x_chart.dim
    qn = np.linalg.norm(y0[n:])
    if qn <= COVECTOR_FLOOR:
        raise DegenerateError("initial covector is zero")
    fc = lambdify(list(constraints.values())[:2], names)
    viol = np.max(np.abs(fc(y0))) / qn
    if viol > 1e-12:
        raise ExtremalError(f"initial covector violates the constraints by {viol:.3e}")
    steps, h_eff = _grid(T, h)
    f = lambdify(field_.coefficients, names)
    states = rk4(f, y0, h_eff, steps)
    res = _evaluate_all(constraints, names, states)
    ctl = np.column_stack([np.full(len(states), float(lam0)), np.full(len(states), float(mu))])
    return ExtremalTrace(c.x_chart.variables, c.cchart.momenta, (lam, c.multiplier),
                         np.arange(steps + 1) * h_eff, states[:, :n], states[:, n:], ctl, h_eff, res,
                         c.x_chart.name)


def integrate_fixed_controls(h: ControlHamiltonian, control_values: Mapping[str, float], start, T: float,
                             step: float) -> ExtremalTrace:
    """RK4 for a control-affine system with constant controls; residuals are
    the criticality constraints dH/du."""
    names = h.chart.variables
    spec = {k: Fraction(v).limit_denominator(10**12) if not isinstance(v, Fraction) else v
            for k, v in control_values.items()}
    hh = CotangentFunction(h.chart, h.poly.partial_eval(spec).align(names))
    f = lambdify(hamilton_field(hh).coefficients, names)
    constraints = {f"dH_d{k}": v.align(names) for k, v in h.critical_constraints().items()}
    y0, q0 = start
    z0 = np.array([float(x) for x in y0] + [float(x) for x in q0])
    steps, h_eff = _grid(T, step)
    states = rk4(f, z0, h_eff, steps)
    n = h.chart.base.dim
    res = _evaluate_all(constraints, names, states)
    ctl = np.tile([float(control_values[k]) for k in h.controls], (len(states), 1))
    return ExtremalTrace(names[:n], names[n:], h.controls, np.arange(steps + 1) * h_eff,
                         states[:, :n], states[:, n:], ctl, h_eff, res, h.chart.base.name)


def fiber_covector(frame: Frame235, y0, seed: int = 0) -> tuple[Fraction, ...]:
    """q0 != 0 with H_eta1 = H_eta2 = 0 and H_eta3 != 0 at y0."""
    e1, e2, e3 = frame.fields[:3]
    y0 = e1.chart.point(y0)
    basis = mat_nullspace(RationalMatrix([e1.at(y0), e2.at(y0)], 5))
    rng = random.Random(seed)
    v3 = e3.at(y0)
    for _ in range(100):
        coeffs = [Fraction(rng.randint(-9, 9), rng.randint(1, 9)) for _ in basis]
        q = tuple(sum(cf * b[i] for cf, b in zip(coeffs, basis)) for i in range(5))
        if sum(a * b for a, b in zip(q, v3)) != 0:
            return q
    raise DegenerateError("no covector with H_eta3 != 0")


def pi_y_fiber_extremal(p: Prolongation, h: ControlHamiltonian, y0, z0, q0, T: float, step: float) -> ExtremalTrace:
    """Bi-extremal (y0, z0 + t; q0, 0) of the prolongation: fiber control 1, the other 0."""
    fiber_ctl, other = h.controls
    start = (tuple(y0) + (as_fraction(z0),), tuple(q0) + (Fraction(0),))
    return integrate_fixed_controls(h, {fiber_ctl: 1.0, other: 0.0}, start, T, step)


def lift_d_path(p: Prolongation, trace: ExtremalTrace) -> ExtremalTrace:
    """Lift of a singular D-path to the affine prolongation chart: z = u2/u1,
    covector (q, 0)."""
    u1 = trace.controls[:, trace.control_names.index("u1")]
    u2 = trace.controls[:, trace.control_names.index("u2")]
    if np.min(np.abs(u1)) < 1e-12:
        raise ExtremalError("direction leaves the affine fiber chart (u1 = 0)")
    z = u2 / u1
    base = np.column_stack([trace.base, z])
    cov = np.column_stack([trace.covector, np.zeros(len(trace))])
    zdot = np.gradient(z, trace.times, edge_order=2) if len(trace) > 2 else np.zeros(len(trace))
    ctl = np.column_stack([zdot, u1])
    return ExtremalTrace(p.z_chart.variables, trace.momentum_vars + (f"p_{p.fiber_var}",),
                         (rate_name(p.fiber_var), "mu"), trace.times, base, cov, ctl, trace.step,
                         {}, p.z_chart.name)


@dataclass(frozen=True)
class _ConeFiberPolys:
    fiber: str
    coeff_fn: Callable
    degrees: int
    ncomp: int


def _cone_fiber_polys(c: ConeSystem) -> _ConeFiberPolys:
    names, comps = c.F.in_target_variables()
    lam = c.fiber_vars[0]
    deg = max(q.degree_in(lam) for q in comps)
    polys = []
    for q in comps:
        coll = q.collect(lam)
        for d in range(deg + 1):
            polys.append(coll.get(d, Polynomial.zero(names)).align(names))
    # evaluate coefficients with the fiber variable set to 0 (they are free of it)
    fn = lambdify(polys, names)
    return _ConeFiberPolys(lam, fn, deg, len(comps))


def _fiber_roots(coeffs: np.ndarray, v: np.ndarray, tol: float) -> list[tuple[float, float]]:
    """Fiber values w with F(w) parallel to v; returns (w, sin angle)."""
    ncomp, deg1 = coeffs.shape
    j = int(np.argmax(np.abs(v)))
    scale = np.max(np.abs(coeffs)) or 1.0
    cands = []
    for k in range(ncomp):
        if k == j:
            continue
        g = coeffs[k] * v[j] - coeffs[j] * v[k]
        g_hi = g[::-1]
        nz = np.flatnonzero(np.abs(g_hi) > 1e-14 * scale * np.max(np.abs(v)))
        if len(nz) == 0:
            continue
        g_hi = g_hi[nz[0]:]
        if len(g_hi) == 1:
            continue
        for r in np.roots(g_hi):
            if abs(r.imag) <= 1e-6 * max(1.0, abs(r.real)):
                cands.append(r.real)

    degs = np.arange(deg1)
    dcoeffs = coeffs[:, 1:] * degs[1:]

    def vec(w):
        return coeffs @ (w ** degs)

    def dvec(w):
        return dcoeffs @ (w ** degs[:-1])

    vhat = v / np.linalg.norm(v)
    out = []
    seen: list[float] = []
    for w in sorted(cands):
        if seen and abs(w - seen[-1]) <= 1e-9 * max(1.0, abs(w)):
            continue
        seen.append(w)
        # Gauss-Newton on the component of F(w) orthogonal to v
        for _ in range(8):
            F = vec(w)
            dF = dvec(w)
            r = F - (F @ vhat) * vhat
            J = dF - (dF @ vhat) * vhat
            jj = J @ J
            if jj == 0:
                break
            dw = (r @ J) / jj
            w -= dw
            if abs(dw) <= 1e-16 * max(1.0, abs(w)):
                break
        F = vec(w)
        nf = np.linalg.norm(F)
        if nf == 0:
            continue
        sin = np.linalg.norm(F - (F @ vhat) * vhat) / nf
        if sin <= tol:
            out.append((float(w), float(sin)))
    return out


def lift_extremal(c: ConeSystem, trace: ExtremalTrace, tol: float = LIFT_TOL) -> ExtremalTrace:
    """Lift a cone trajectory on X to Z by recovering the fiber coordinate whose
    cone line contains the velocity; the covector lifts as (p, 0)."""
    if len(trace) < 3:
        raise ExtremalError("lifting needs at least three samples")
    vel = np.gradient(trace.base, trace.times, axis=0, edge_order=2)
    speeds = np.linalg.norm(vel, axis=1)
    if np.min(speeds) <= 1e-9:
        raise ExtremalError("trajectory is not immersive")
    polys = _cone_fiber_polys(c)
    nvars = c.x_chart.dim + 1
    fiber = np.empty(len(trace))
    mu = np.empty(len(trace))
    prev = None
    for i in range(len(trace)):
        point = np.concatenate([trace.base[i], [0.0]])
        coeffs = polys.coeff_fn(point).reshape(polys.ncomp, polys.degrees + 1)
        roots = _fiber_roots(coeffs, vel[i], tol)
        if not roots:
            raise NotAConeTrajectoryError(f"no fiber value matches the velocity at sample {i}")
        if prev is None:
            w = min(roots, key=lambda r: (r[1], abs(r[0])))[0]
        else:
            w = min(roots, key=lambda r: abs(r[0] - prev))[0]
        prev = w
        F = np.array([np.polyval(coeffs[k][::-1], w) for k in range(polys.ncomp)])
        fiber[i] = w
        mu[i] = (vel[i] @ F) / (F @ F)
    proj = c.pi_x.coordinate_projection()
    zvars = c.pi_x.source.variables
    cols, covs = [], []
    for v in zvars:
        if v in proj:
            k = c.x_chart.variables.index(proj[v])
            cols.append(trace.base[:, k])
            covs.append(trace.covector[:, k])
        else:
            cols.append(fiber)
            covs.append(np.zeros(len(trace)))
    zmoms = tuple(c.cchart.momentum(proj[v]) if v in proj else f"p_{v}" for v in zvars)
    fdot = np.gradient(fiber, trace.times, edge_order=2)
    ctl = np.column_stack([fdot, mu])
    return ExtremalTrace(zvars, zmoms, (rate_name(polys.fiber), c.multiplier), trace.times,
                         np.column_stack(cols), np.column_stack(covs), ctl, trace.step, {},
                         c.pi_x.source.name)


@dataclass(frozen=True)
class ExtremalClass:
    verdict: str  # "Regular", "TotallyIrregular" or "Mixed/Unknown"
    evidence: tuple[dict, ...]
    e4_member: bool

    def __str__(self) -> str:
        return self.verdict


def _rational_point(x: np.ndarray) -> tuple[Fraction, ...]:
    return tuple(Fraction(float(v)) for v in x)


def _distance_to_span(vec: np.ndarray, basis: list) -> float:
    if not basis:
        return float(np.linalg.norm(vec))
    B = np.array([[float(x) for x in b] for b in basis]).T
    Q, _ = np.linalg.qr(B)
    return float(np.linalg.norm(vec - Q @ (Q.T @ vec)))


def classify(trace: ExtremalTrace, e: Distribution, *, max_samples: int = 25,
             tol: float = MEMBERSHIP_TOL) -> ExtremalClass:
    """Regular if the covector stays in E^2-perp minus E^(3)-perp, totally
    irregular if it stays in E^(3)-perp; membership tested at rounded rational
    base points with tolerance ``tol`` relative to the covector norm."""
    if len(trace.base_vars) != e.chart.dim or trace.base_vars != e.chart.variables:
        raise ValueError("trace and distribution live on different charts")
    flag = derived_flag(e, "small")
    levels = {k: flag.frame(k) for k in (2, 3, 4)}
    idx = np.unique(np.linspace(0, len(trace) - 1, min(max_samples, len(trace))).round().astype(int))
    evidence = []
    for i in idx:
        q = trace.covector[i]
        nq = np.linalg.norm(q)
        if nq <= COVECTOR_FLOOR:
            raise DegenerateError("zero covector in trace")
        qn = q / nq
        pt = _rational_point(trace.base[i])
        row = {"index": int(i)}
        for k, frame in levels.items():
            basis = annihilator_at(frame, pt)
            dist = _distance_to_span(qn, basis)
            row[k] = {"member": dist <= tol, "annihilator_dim": len(basis), "distance": dist}
        evidence.append(row)
    in2 = all(r[2]["member"] for r in evidence)
    in3 = [r[3]["member"] for r in evidence]
    in4 = all(r[4]["member"] for r in evidence)
    if in2 and not any(in3):
        verdict = "Regular"
    elif all(in3):
        verdict = "TotallyIrregular"
    else:
        verdict = "Mixed/Unknown"
    return ExtremalClass(verdict, tuple(evidence), in4)


def _arclength(points: np.ndarray, params: np.ndarray) -> np.ndarray:
    spline = CubicSpline(params, points, axis=0)
    d = spline.derivative()
    nodes, weights = np.polynomial.legendre.leggauss(4)
    a, b = params[:-1], params[1:]
    mid, half = (a + b) / 2, (b - a) / 2
    seg = np.zeros(len(a))
    for x, w in zip(nodes, weights):
        seg += w * np.linalg.norm(d(mid + half * x), axis=1)
    seg *= half
    return np.concatenate([[0.0], np.cumsum(seg)])


def _params(trace, n: int) -> np.ndarray:
    t = np.asarray(getattr(trace, "times", np.arange(n)), dtype=float)
    return t if n < 2 or np.all(np.diff(t) > 0) else np.arange(n, dtype=float)


def _as_points(trace) -> np.ndarray:
    return np.asarray(trace.base if hasattr(trace, "base") else trace, dtype=float)


def compare_paths(a, b, mode: str = "coordinate", coord: int | str | None = None) -> float:
    """Sup distance between two paths after monotone reparametrization.

    ``coordinate`` mode matches points with equal value of one coordinate
    (strictly monotone on both paths); ``arclength`` mode matches points at
    equal arclength from the start. Only the overlapping range is compared.
    """
    pa, pb = _as_points(a), _as_points(b)
    if mode == "coordinate":
        if coord is None:
            raise ValueError("coordinate mode needs a coordinate")
        if isinstance(coord, str):
            coord = a.base_vars.index(coord)
        ca, cb = pa[:, coord], pb[:, coord]
        for name, cc in (("first", ca), ("second", cb)):
            dc = np.diff(cc)
            if len(cc) > 1 and not (np.all(dc > 0) or np.all(dc < 0)):
                raise NonMonotoneError(f"coordinate {coord} is not strictly monotone on the {name} path")
        order = np.argsort(cb)
        if len(cb) < 2:
            raise ValueError("second path needs at least two samples")
        spline = CubicSpline(cb[order], pb[order], axis=0)
        lo, hi = cb.min(), cb.max()
        slack = 1e-12 * max(1.0, abs(lo), abs(hi))
        mask = (ca >= lo - slack) & (ca <= hi + slack)
        if not np.any(mask):
            raise ValueError("paths do not overlap in the chosen coordinate")
        diff = pa[mask] - spline(np.clip(ca[mask], lo, hi))
        return float(np.max(np.linalg.norm(diff, axis=1)))
    if mode == "arclength":
        sa, sb = _arclength(pa, _params(a, len(pa))), _arclength(pb, _params(b, len(pb)))
        for s in (sa, sb):
            if np.any(np.diff(s) <= 0):
                raise NonMonotoneError("path is not immersive")
        spline = CubicSpline(sb, pb, axis=0)
        mask = sa <= sb[-1] * (1 + 1e-12)
        diff = pa[mask] - spline(np.minimum(sa[mask], sb[-1]))
        return float(np.max(np.linalg.norm(diff, axis=1)))
    raise ValueError(f"unknown mode {mode!r}")
