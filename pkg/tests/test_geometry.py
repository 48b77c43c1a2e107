from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from singpaths.exactcore import Polynomial, RationalMatrix, mat_rank, parse_expr
from singpaths.g2 import build_g2
from singpaths.geometry import (
    Chart,
    ChartMismatchError,
    Distribution,
    PolyMap,
    VectorField,
    ad_injective,
    annihilator_at,
    derived_flag,
    frame_rank,
    generic_growth,
    growth_at,
    lie_bracket,
    pushforward,
    random_rational_points,
)

from strategies import low_degree_polynomials

CHART6 = Chart("R6", ("a", "b", "c", "d", "e", "f"))


def field(chart, *exprs):
    return VectorField(chart, [parse_expr(e, chart.variables) for e in exprs])


def fields_deg2(chart=CHART6):
    return st.lists(low_degree_polynomials(chart.variables),
                    min_size=chart.dim, max_size=chart.dim).map(lambda cs: VectorField(chart, cs))


def test_coordinate_fields_commute():
    c = Chart("R2", ("x", "y"))
    assert lie_bracket(VectorField.coordinate_field(c, "x"), VectorField.coordinate_field(c, "y")).is_zero()


def test_bracket_xi1_xi2():
    m = build_g2()
    assert lie_bracket(m.xi1, m.xi2) == field(m.z, "0", "2*lam", "-1", "0", "3*lam^2*z + 4*lam*y + x", "-3*lam^2")


def test_bracket_eta1_eta2_against_finite_differences():
    m = build_g2()
    eta3 = lie_bracket(m.eta1, m.eta2)
    assert eta3 == field(m.y, "0", "-2", "0", "4*lam", "-4*nu")

    # independent float transcription of the frame; [a,b] = Db a - Da b
    def a(p):
        lam, mu, nu, tau, sigma = p
        return np.array([1, nu, 0, -(lam * nu - mu), nu**2])

    def b(p):
        lam, mu, nu, tau, sigma = p
        return np.array([0, -lam, 1, lam**2, -(lam * nu + mu)])

    def jac(f, p, h=1e-4):
        return np.column_stack([(f(p + h * e) - f(p - h * e)) / (2 * h) for e in np.eye(5)])

    rng = np.random.default_rng(5)
    for _ in range(5):
        p = rng.uniform(-2, 2, 5)
        fd = jac(b, p) @ a(p) - jac(a, p) @ b(p)
        exact = np.array([float(c) for c in eta3.at([Fraction(x) for x in p])])
        assert np.max(np.abs(fd - exact)) < 1e-6


def test_bracket_chart_mismatch():
    c1, c2 = Chart("A", ("x",)), Chart("B", ("x",))
    with pytest.raises(ChartMismatchError):
        lie_bracket(VectorField.coordinate_field(c1, "x"), VectorField.coordinate_field(c2, "x"))


def test_pushforward_examples():
    m = build_g2()
    k = pushforward(m.pi_x, m.xi1)
    assert k.is_zero() and k.projectable
    assert pushforward(m.pi_y, m.xi2).is_zero()
    f = pushforward(m.pi_x, m.xi2)
    want = [parse_expr(e, m.z.variables) for e in ("lam^2", "-lam", "1", "lam^3*z + 2*lam^2*y + lam*x", "-lam^3")]
    assert list(f.components) == want
    assert f.projectable is False


def test_pushforward_is_linear():
    m = build_g2()
    a, b = Fraction(3, 2), Fraction(-5)
    lhs = pushforward(m.pi_y, m.xi1 * a + m.xi2 * b)
    r1, r2 = pushforward(m.pi_y, m.xi1), pushforward(m.pi_y, m.xi2)
    assert list(lhs.components) == [a * p + b * q for p, q in zip(r1.components, r2.components)]


def test_kernels_of_projections():
    m = build_g2()
    assert pushforward(m.pi_y, m.xi2).is_zero()
    assert pushforward(m.pi_x, m.xi1).is_zero()
    assert not pushforward(m.pi_y, m.xi1).is_zero()


def test_growth_of_g2_distributions():
    m = build_g2()
    assert generic_growth(derived_flag(m.d, "small")).generic == (2, 3, 5)
    assert generic_growth(derived_flag(m.d, "big")).generic == (2, 3, 5)
    assert generic_growth(derived_flag(m.e, "small")).generic == (2, 3, 4, 5, 6)
    assert generic_growth(derived_flag(m.e, "big")).generic == (2, 3, 4, 6)


def test_growth_at_origin_and_random_points():
    m = build_g2()
    assert growth_at(derived_flag(m.d), m.y.origin()).ranks == (2, 3, 5)
    flag = derived_flag(m.e)
    for pt in random_rational_points(6, 3, seed=11):
        g = growth_at(flag, pt)
        assert g.ranks == (2, 3, 4, 5, 6)
        assert g.ranks[0] == frame_rank(list(m.e.frame), pt)


def test_involutive_line_field():
    c = Chart("R2", ("x", "y"))
    d = Distribution(c, (VectorField.coordinate_field(c, "x"),))
    report = generic_growth(derived_flag(d, "small"))
    assert set(report.generic) == {1} and report.constant_rank


def test_singular_candidates_reported():
    c = Chart("R2", ("x", "y"))
    d = Distribution(c, (field(c, "1", "0"), field(c, "0", "x")), base_point=(1, 0))
    pts = [(Fraction(0), Fraction(1)), (Fraction(2), Fraction(1))]
    report = generic_growth(derived_flag(d), points=pts)
    assert report.generic[0] == 2
    assert report.singular_candidates == (pts[0],)


def test_distribution_rejects_dependent_frame():
    c = Chart("R2", ("x", "y"))
    with pytest.raises(ValueError):
        Distribution(c, (field(c, "1", "0"), field(c, "2", "0")))


def test_small_flag_inside_big_flag():
    m = build_g2()
    for d in (m.d, m.e):
        small, big = derived_flag(d, "small"), derived_flag(d, "big")
        for pt in random_rational_points(d.chart.dim, 5, seed=2):
            for i in range(1, len(small.levels) + 1):
                s = [f.at(pt) for f in small.frame(i)]
                b = [f.at(pt) for f in big.frame(i)]
                assert mat_rank(RationalMatrix(s + b)) == mat_rank(RationalMatrix(b))
            s2 = [f.at(pt) for f in small.frame(2)]
            b2 = [f.at(pt) for f in big.frame(2)]
            assert mat_rank(RationalMatrix(s2)) == mat_rank(RationalMatrix(b2)) == mat_rank(RationalMatrix(s2 + b2))


def test_growth_nondecreasing():
    m = build_g2()
    for pt in random_rational_points(6, 5, seed=4):
        r = growth_at(derived_flag(m.e, "big"), pt).ranks
        assert list(r) == sorted(r)


def test_annihilator_examples():
    c = Chart("R3", ("x1", "x2", "x3"))
    coords = [VectorField.coordinate_field(c, v) for v in c.variables]
    assert annihilator_at(coords, c.origin()) == []
    basis = annihilator_at(coords[:1], c.origin())
    assert mat_rank(RationalMatrix(basis)) == 2 and all(b[0] == 0 for b in basis)
    m = build_g2()
    e1, e2, e3 = m.frame.fields[:3]
    ann = annihilator_at([e1, e2, e3], m.y.origin())
    assert len(ann) == 2
    # at the origin eta1, eta2, eta3 are the lam, nu and mu axes
    assert all(a[0] == a[1] == a[2] == 0 for a in ann)


def test_ad_injective_g2():
    m = build_g2()
    p = m.prolongation
    for pt in random_rational_points(6, 5, seed=9):
        v = m.xi2.at(pt)
        assert ad_injective(p.l_frame, p.k_frame, p.e.frame, pt, v)
        assert ad_injective(p.l_frame, p.k_frame, p.e.frame, pt, [7 * x for x in v])


def test_ad_injective_involutive_and_errors():
    c = Chart("R3", ("x", "w", "s"))
    dx, dw = VectorField.coordinate_field(c, "x"), VectorField.coordinate_field(c, "w")
    assert not ad_injective((dx,), (dw,), (dx, dw), c.origin(), (1, 0, 0))
    with pytest.raises(ValueError):
        ad_injective((dx,), (dw,), (dx, dw), c.origin(), (0, 0, 0))
    with pytest.raises(ValueError):
        ad_injective((dx,), (dw,), (dx, dw), c.origin(), (0, 1, 0))


def test_polymap_component_count():
    a, b = Chart("A", ("x", "y")), Chart("B", ("s",))
    with pytest.raises(ValueError):
        PolyMap(a, b, (Polynomial.var("x", a.variables), Polynomial.var("y", a.variables)))


@given(fields_deg2(), fields_deg2())
def test_bracket_antisymmetry(a, b):
    assert lie_bracket(a, b) == -lie_bracket(b, a)


@given(fields_deg2(), fields_deg2(), fields_deg2())
def test_jacobi_identity(a, b, c):
    total = lie_bracket(lie_bracket(a, b), c) + lie_bracket(lie_bracket(b, c), a) + lie_bracket(lie_bracket(c, a), b)
    assert total.is_zero()
