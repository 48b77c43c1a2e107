"""The built-in G2 double fibration Y <- Z -> X and the duality pipeline."""

from __future__ import annotations

import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .exactcore import Polynomial, as_fraction, parse_expr
from .geometry import (
    Chart,
    Distribution,
    PolyMap,
    VectorField,
    derived_flag,
    generic_growth,
    pushforward,
    random_rational_points,
    same_span,
)
from .hamilton import ConstraintChain, CotangentChart, build_chain, control_hamiltonian
from .prolong import ConeSystem, Frame235, Prolongation, cone_system, frame235, prolong
from .extremal import (
    AbSystem,
    ab_system,
    admissible_cone_covector,
    classify,
    compare_paths,
    integrate_cone_extremal,
    lift_extremal,
    singular_d_path,
)

Y_VARS = ("lam", "mu", "nu", "tau", "sigma")
Z_VARS = ("lam", "x", "y", "z", "u", "v")
X_VARS = ("x", "y", "z", "u", "v")
X_MOMENTA = ("p", "q", "r", "l", "m")
Z_MOMENTA = ("kappa",) + X_MOMENTA
Y_MOMENTA = ("p_lam", "p_mu", "p_nu", "p_tau", "p_sigma")


class ModelSelfCheckError(RuntimeError):
    pass


def _field(chart: Chart, *exprs: str) -> VectorField:
    return VectorField(chart, [parse_expr(e, chart.variables) for e in exprs])


@dataclass(frozen=True)
class G2Model:
    y: Chart
    z: Chart
    x: Chart
    pi_y: PolyMap
    pi_x: PolyMap
    xi1: VectorField
    xi2: VectorField
    eta1: VectorField
    eta2: VectorField
    d: Distribution
    e: Distribution
    prolongation: Prolongation
    cone: ConeSystem
    frame: Frame235
    y_cotangent: CotangentChart
    z_cotangent: CotangentChart

    @property
    def distributions(self) -> dict[str, Distribution]:
        return {"D": self.d, "E": self.e}

    def y_point_of(self, z_point) -> tuple[Fraction, ...]:
        return self.pi_y(z_point)

    def ab(self) -> AbSystem:
        return _ab_system()


def _self_check(m: G2Model, samples: int = 8) -> None:
    if not pushforward(m.pi_y, m.xi2).is_zero():
        raise ModelSelfCheckError("pi_Y* xi2 does not vanish")
    if not pushforward(m.pi_x, m.xi1).is_zero():
        raise ModelSelfCheckError("pi_X* xi1 does not vanish")
    # pi_Y* E lands in D: pi_Y* xi1 lies in span(eta1, eta2) along pi_Y
    push = pushforward(m.pi_y, m.xi1)
    for pt in random_rational_points(m.z.dim, samples, seed=1):
        ypt = m.pi_y(pt)
        if not same_span([m.eta1.at(ypt), m.eta2.at(ypt), push.at(pt)], [m.eta1.at(ypt), m.eta2.at(ypt)], 5):
            raise ModelSelfCheckError(f"pi_Y* xi1 leaves D at {pt}")
    for kind in ("small", "big"):
        got = generic_growth(derived_flag(m.d, kind), samples).generic
        if got != (2, 3, 5):
            raise ModelSelfCheckError(f"{kind} growth of D is {got}")
    if not all(m.frame.certificate().values()):
        raise ModelSelfCheckError("eta frame certificate failed")


@lru_cache(maxsize=None)
def build_g2() -> G2Model:
    y = Chart("Y", Y_VARS)
    z = Chart("Z", Z_VARS)
    x = Chart("X", X_VARS)
    pi_y = PolyMap(z, y, tuple(parse_expr(e, Z_VARS) for e in
                               ("lam", "x + lam*y", "y + lam*z", "v + lam*x", "u + lam*(y^2 - x*z)")))
    pi_x = PolyMap(z, x, tuple(parse_expr(v, Z_VARS) for v in X_VARS))
    xi1 = VectorField.coordinate_field(z, "lam")
    xi2 = _field(z, "0", "lam^2", "-lam", "1", "lam^3*z + 2*lam^2*y + lam*x", "-lam^3")
    eta1 = _field(y, "1", "nu", "0", "-(lam*nu - mu)", "nu^2")
    eta2 = _field(y, "0", "-lam", "1", "lam^2", "-(lam*nu + mu)")
    d = Distribution(y, (eta1, eta2), name="D")
    e = Distribution(z, (xi1, xi2), name="E")
    p = Prolongation(y, z, e, (xi2,), (xi1,), pi_y, pi_x, "lam")
    cone = cone_system(p, momenta=X_MOMENTA, multiplier="mu")
    model = G2Model(y, z, x, pi_y, pi_x, xi1, xi2, eta1, eta2, d, e, p, cone, frame235(d),
                    CotangentChart(y, Y_MOMENTA), CotangentChart(z, Z_MOMENTA))
    _self_check(model)
    return model


@lru_cache(maxsize=None)
def _ab_system() -> AbSystem:
    m = build_g2()
    return ab_system(m.frame, m.y_cotangent)


@lru_cache(maxsize=None)
def affine_prolongation() -> Prolongation:
    """Prolongation of D in the affine fiber chart z = u2/u1 (chart PD)."""
    return prolong(build_g2().d)


@dataclass(frozen=True)
class SampledCurve:
    """Exact rational samples of a closed-form curve."""

    chart: Chart
    params: tuple[Fraction, ...]
    points: tuple[tuple[Fraction, ...], ...]

    @property
    def base_vars(self) -> tuple[str, ...]:
        return self.chart.variables

    @property
    def base(self) -> np.ndarray:
        return np.array([[float(c) for c in p] for p in self.points], dtype=float).reshape(len(self.points), -1)

    @property
    def times(self) -> np.ndarray:
        return np.array([float(t) for t in self.params])

    def __len__(self) -> int:
        return len(self.points)


def _q(value) -> Fraction:
    if isinstance(value, float):
        return Fraction(repr(float(value)))
    return as_fraction(value)


def _grid(a: Fraction, b: Fraction, samples: int) -> tuple[Fraction, ...]:
    if samples < 1:
        raise ValueError("samples must be positive")
    if samples == 1 or a == b:
        return (a,)
    return tuple(a + (b - a) * Fraction(i, samples - 1) for i in range(samples))


def monge_point(lam0, x0, t) -> tuple[Fraction, ...]:
    lam0, t = _q(lam0), _q(t)
    x, y, z, u, v = (_q(c) for c in x0)
    slope_u = lam0 * x + 2 * lam0**2 * y + lam0**3 * z
    return (lam0**2 * t + x, -lam0 * t + y, t + z, slope_u * t + u, -lam0**3 * t + v)


def monge_line(lam0, x0, T, samples: int) -> SampledCurve:
    """Closed-form singular cone path with constant fiber value lam0 and mu = 1."""
    ts = _grid(Fraction(0), _q(T), samples)
    return SampledCurve(build_g2().x, ts, tuple(monge_point(lam0, x0, t) for t in ts))


def cartan_point(x0, lam) -> tuple[Fraction, ...]:
    x, y, z, u, v = (_q(c) for c in x0)
    lam = _q(lam)
    return (lam, x + lam * y, y + lam * z, v + lam * x, u + lam * (y**2 - x * z))


def cartan_line(x0, lam_range, samples: int) -> SampledCurve:
    """pi_Y image of the pi_X fiber over x0, sampled at lam in lam_range."""
    a, b = (_q(c) for c in lam_range)
    lams = _grid(a, b, samples)
    return SampledCurve(build_g2().y, lams, tuple(cartan_point(x0, lam) for lam in lams))


def z_point_over(y_point, z) -> tuple[Fraction, ...]:
    """The Z point with pi_Y = y_point and given z coordinate (inverts pi_Y on the fiber)."""
    lam, mu, nu, tau, sigma = (_q(c) for c in y_point)
    z = _q(z)
    y = nu - lam * z
    x = mu - lam * y
    v = tau - lam * x
    u = sigma - lam * (y**2 - x * z)
    return (lam, x, y, z, u, v)


def pi_y_fiber(y_point, z_values) -> SampledCurve:
    """The pi_Y fiber over y_point, parametrized by the z coordinate."""
    zs = tuple(_q(z) for z in z_values)
    return SampledCurve(build_g2().z, zs, tuple(z_point_over(y_point, z) for z in zs))


def project_x(curve: SampledCurve) -> SampledCurve:
    m = build_g2()
    return SampledCurve(m.x, curve.params, tuple(m.pi_x(p) for p in curve.points))


def g2_hamiltonian(which: str):
    m = build_g2()
    if which == "Z":
        return control_hamiltonian([m.xi1, m.xi2], ["a", "b"], m.z_cotangent)
    if which == "Y":
        return control_hamiltonian([m.eta1, m.eta2], ["u1", "u2"], m.y_cotangent)
    if which == "X":
        return m.cone.hamiltonian
    raise ValueError(f"unknown system {which!r}; expected X, Y or Z")


def chain_g2(which: str) -> ConstraintChain:
    """Constraint elimination chain for the Z, Y or X system of the model."""
    h = g2_hamiltonian(which)
    if which == "X":
        return build_chain(h, nonzero=("mu",), label="X-system: cone system on X, mu != 0 (immersive)")
    if which == "Z":
        return build_chain(h, label="Z-system: E = <xi1, xi2> on Z")
    return build_chain(h, label="Y-system: D = <eta1, eta2> on Y (derived here, not printed in the source)")


def _random_rational(rng: random.Random, bound: int = 2, max_den: int = 8) -> Fraction:
    den = rng.randint(1, max_den)
    return Fraction(rng.randint(-bound * den, bound * den), den)


def duality_draws(n_samples: int, seed: int) -> list[tuple[Fraction, tuple[Fraction, ...]]]:
    """Seeded (lam0, start) pairs with rationals in [-2, 2], denominators <= 8."""
    rng = random.Random(seed)
    return [(_random_rational(rng), tuple(_random_rational(rng) for _ in range(5))) for _ in range(n_samples)]


def duality_sample(index: int, lam0: Fraction, start: tuple[Fraction, ...], tol: float, step: float,
                   horizon: float, tol_cartan: float, seed: int) -> dict:
    m = build_g2()
    cone = m.cone
    q0 = admissible_cone_covector(cone, start, lam0, seed=seed + index)
    qf = np.array([float(c) for c in q0])
    qf /= np.linalg.norm(qf)
    trace = integrate_cone_extremal(cone, start, lam0, qf, horizon, step)
    n = len(trace)
    monge = monge_line(lam0, start, horizon, n)
    dev_monge = compare_paths(trace, monge, "coordinate", 2)
    ypt = m.pi_y((lam0,) + tuple(start))
    z0 = start[2]
    fiber = pi_y_fiber(ypt, [z0 + _q(horizon) * Fraction(i, max(n - 1, 1)) for i in range(n)])
    dev_fiber = compare_paths(trace, project_x(fiber), "coordinate", 2)
    lifted = lift_extremal(cone, trace)
    lam_col = lifted.column("lam")
    lam_var = float(np.max(lam_col) - np.min(lam_col))
    lam_err = float(np.max(np.abs(lam_col - float(lam0))))
    klass = classify(lifted, m.e)
    dpath = singular_d_path(m.d, ypt, (1, z0), horizon, step, system=_ab_system())
    lam_lo, lam_hi = float(np.min(dpath.column("lam"))), float(np.max(dpath.column("lam")))
    cartan = cartan_line(start, (Fraction(lam_lo), Fraction(lam_hi)), 101)
    dev_cartan = compare_paths(dpath, cartan, "coordinate", 0)
    residual = max(trace.max_residual(), 0.0)
    ok = (dev_monge < tol and dev_fiber < tol and lam_var < 1e-9 and lam_err < 1e-9
          and klass.verdict == "Regular" and residual < tol and dev_cartan < tol_cartan)
    return {
        "index": index,
        "lambda0": str(lam0),
        "start": [str(c) for c in start],
        "deviations": {"monge": dev_monge, "fiber_image": dev_fiber, "cartan": dev_cartan},
        "lift_lambda_variation": lam_var,
        "max_residual": residual,
        "ab_max_residual": dpath.max_residual(),
        "classification": klass.verdict,
        "pass": bool(ok),
    }


def _duality_worker(args) -> dict:
    return duality_sample(*args)


def duality_report(n_samples: int, tol: float = 1e-8, step: float = 1e-3, seed: int = 0, *,
                   horizon: float = 1.0, tol_cartan: float = 1e-6, jobs: int = 1) -> dict:
    """Integrate cone extremals and singular D-paths and compare them with the closed forms."""
    if n_samples < 1:
        raise ValueError("n_samples must be at least 1")
    if tol <= 0 or step <= 0 or horizon < 0:
        raise ValueError("tol and step must be positive and horizon non-negative")
    tasks = [(i, lam0, start, tol, step, horizon, tol_cartan, seed)
             for i, (lam0, start) in enumerate(duality_draws(n_samples, seed))]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            samples = list(pool.map(_duality_worker, tasks))
    else:
        samples = [_duality_worker(t) for t in tasks]
    max_dev = max(max(s["deviations"].values()) for s in samples)
    return {
        "seed": seed,
        "tol": tol,
        "tol_cartan": tol_cartan,
        "step": step,
        "horizon": horizon,
        "samples": samples,
        "max_deviation": max_dev,
        "all_pass": all(s["pass"] for s in samples),
    }
