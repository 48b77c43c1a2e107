import random
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from singpaths.exactcore import Polynomial, parse_expr
from singpaths.g2 import build_g2, chain_g2, g2_hamiltonian
from singpaths.geometry import Chart, VectorField, annihilator_at, lie_bracket, random_rational_points
from singpaths.hamilton import (
    BracketRelationError,
    ControlAffinityError,
    ControlHamiltonian,
    CotangentChart,
    CotangentFunction,
    ab_field,
    chain_derive,
    control_hessian,
    h_lift,
    hamilton_field,
    poisson,
)

from strategies import low_degree_polynomials

CHART = Chart("R4", ("a", "b", "c", "d"))
CC = CotangentChart.default(CHART)


def fields(chart=CHART):
    return st.lists(low_degree_polynomials(chart.variables), min_size=chart.dim,
                    max_size=chart.dim).map(lambda cs: VectorField(chart, cs))


def cfun(text, cchart):
    return CotangentFunction(cchart, parse_expr(text, cchart.variables))


def test_h_lift_examples():
    m = build_g2()
    assert str(h_lift(m.xi1, m.z_cotangent)) == "kappa"
    assert h_lift(m.xi2, m.z_cotangent) == cfun("r - lam*q + lam^2*p - lam^3*m + (lam^3*z + 2*lam^2*y + lam*x)*l",
                                                m.z_cotangent)
    assert h_lift(VectorField.zero(m.z), m.z_cotangent).poly.is_zero()


def test_hamilton_field_examples():
    x1 = hamilton_field(CotangentFunction(CC, Polynomial.var("p_a", CC.variables)))
    assert x1 == VectorField.coordinate_field(CC.phase_chart, "a")
    m = build_g2()
    zc = m.z_cotangent
    assert hamilton_field(h_lift(m.xi1, zc)) == VectorField.coordinate_field(zc.phase_chart, "lam")
    f = hamilton_field(h_lift(m.xi2, zc))
    comps = dict(zip(zc.phase_chart.variables, f.coefficients))
    v = zc.variables
    assert comps["x"] == parse_expr("lam^2", v)
    assert comps["y"] == parse_expr("-lam", v)
    assert comps["z"] == parse_expr("1", v)
    assert comps["kappa"] == -parse_expr("-q + 2*lam*p - 3*lam^2*m + (3*lam^2*z + 4*lam*y + x)*l", v)


def test_poisson_canonical_pair():
    p, x = cfun("p_a", CC), cfun("a", CC)
    assert poisson(p, x).poly == 1
    assert poisson(x, p).poly == -1


def test_poisson_g2_cross_check():
    m = build_g2()
    zc = m.z_cotangent
    assert poisson(h_lift(m.xi1, zc), h_lift(m.xi2, zc)) == h_lift(lie_bracket(m.xi1, m.xi2), zc)


def test_poisson_chart_mismatch():
    other = CotangentChart(CHART, ("q1", "q2", "q3", "q4"))
    with pytest.raises(ValueError):
        poisson(cfun("p_a", CC), cfun("q1", other))


@given(fields(), fields())
def test_poisson_is_bracket(eta, xi):
    assert poisson(h_lift(eta, CC), h_lift(xi, CC)) == h_lift(lie_bracket(eta, xi), CC)


@given(fields(), fields())
def test_hamilton_field_applies_as_poisson(a, b):
    f, g = h_lift(a, CC) * cfun("a + p_b", CC), h_lift(b, CC)
    assert hamilton_field(f).apply(g.poly.align(CC.variables)) == poisson(f, g).poly


def _annihilator_samples(frame, n, seed):
    rng = random.Random(seed)
    e1, e2, e3 = frame.fields[:3]
    for pt in random_rational_points(5, n, seed):
        basis = annihilator_at([e1, e2, e3], pt)
        coeffs = [Fraction(rng.randint(-9, 9), rng.randint(1, 9)) for _ in basis]
        q = tuple(sum(c * b[i] for c, b in zip(coeffs, basis)) for i in range(5))
        yield pt, q


def test_ab_tangent_to_annihilator():
    m = build_g2()
    yc = m.y_cotangent
    ab = ab_field(m.frame, yc)
    hs = [h_lift(f, yc).poly for f in m.frame.fields[:3]]
    for pt, q in _annihilator_samples(m.frame, 10, seed=0):
        for h in hs:
            assert ab.apply(h).eval(pt + q) == 0


def test_ab_matches_independent_assembly():
    m = build_g2()
    yc = m.y_cotangent
    ab = ab_field(m.frame, yc)
    h = [h_lift(f, yc) for f in m.frame.fields]
    pt = tuple(Fraction(k, 3) for k in (1, -2, 4, 5, -1)) + tuple(Fraction(k, 7) for k in (2, 3, -1, 6, 1))
    x1, x2 = hamilton_field(h[0]).at(pt), hamilton_field(h[1]).at(pt)
    h4, h5 = h[3].poly.eval(pt), h[4].poly.eval(pt)
    assert ab.at(pt) == tuple(h5 * a - h4 * b for a, b in zip(x1, x2))


def test_ab_rejects_broken_frame():
    m = build_g2()
    e1, e2, e3, e4, e5 = m.frame.fields
    with pytest.raises(BracketRelationError, match="eta4"):
        ab_field((e1, e2, e3, e4 * 2, e5), m.y_cotangent)


def test_control_hamiltonians_of_g2():
    m = build_g2()
    hz = g2_hamiltonian("Z")
    v = hz.variables
    assert hz.poly == parse_expr("a*kappa", v) + parse_expr("b", v) * h_lift(m.xi2, m.z_cotangent).poly.align(v)
    hy = g2_hamiltonian("Y")
    assert hy.poly == (parse_expr("u1", hy.variables) * h_lift(m.eta1, m.y_cotangent).poly.align(hy.variables)
                       + parse_expr("u2", hy.variables) * h_lift(m.eta2, m.y_cotangent).poly.align(hy.variables))
    hx = g2_hamiltonian("X")
    assert hx.poly == parse_expr("mu*(r + lam*(-q + x*l) + lam^2*(p + 2*y*l) + lam^3*(-m + z*l))", hx.variables)
    assert hx.determined == ("lam",) and hx.controls == ("mu",)


def test_control_hessians_vanish():
    for which in ("Y", "X", "Z"):
        h = g2_hamiltonian(which)
        assert all(e.is_zero() for row in control_hessian(h) for e in row)
    assert len(control_hessian(g2_hamiltonian("X"))) == 1


def test_non_affine_hamiltonian_rejected():
    cc = CotangentChart.default(Chart("R1", ("x",)))
    with pytest.raises(ControlAffinityError):
        ControlHamiltonian(cc, ("u",), parse_expr("u^2*p_x", ("x", "p_x", "u")))


def test_chain_derive_examples():
    m = build_g2()
    hy = g2_hamiltonian("Y")
    d = chain_derive(hy, h_lift(m.eta1, m.y_cotangent))
    bracket = h_lift(lie_bracket(m.eta2, m.eta1), m.y_cotangent).poly
    assert d == parse_expr("u2", d.variables) * bracket.align(d.variables)
    hx = g2_hamiltonian("X")
    dH_dlam = hx.generator("mu").partial("lam")
    d = chain_derive(hx, dH_dlam)
    assert d == parse_expr("lam_dot*(2*(p + 2*y*l) + 6*lam*(-m + z*l))", d.variables)
    assert chain_derive(hy, Polynomial.constant(3, m.y_cotangent.variables)).is_zero()
    with pytest.raises(ValueError):
        chain_derive(hy, parse_expr("u1", hy.variables))


def test_chain_derive_matches_specialized_flow():
    m = build_g2()
    hy = g2_hamiltonian("Y")
    yc = m.y_cotangent
    spec = {"u1": Fraction(2, 3), "u2": Fraction(-5, 4)}
    flow = hamilton_field(CotangentFunction(yc, hy.specialize(spec).align(yc.variables)))
    for f in m.frame.fields:
        g = h_lift(f, yc).poly
        assert chain_derive(hy, g).partial_eval(spec).align(yc.variables) == flow.apply(g)


def test_chain_links_record_factors():
    x = chain_g2("X")
    kinds = [l.kind for l in x.links]
    assert kinds[0] == "criticality" and str(x.links[0].factor) == "mu"
    assert str(x.links[1].factor) == "2*lam_dot"
    assert x.conclusion.endswith("lam_dot = 0")
    z = chain_g2("Z")
    assert str(z.links[-2].successor) == "l"
    assert z.conclusion.endswith("b = 0")
    y = chain_g2("Y")
    assert y.links[-1].case == "control-dependent"
