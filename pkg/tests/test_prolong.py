import random
from fractions import Fraction

import pytest

from singpaths.exactcore import RationalMatrix, mat_rank, parse_expr
from singpaths.g2 import build_g2
from singpaths.geometry import Chart, Distribution, VectorField, derived_flag, generic_growth, lie_bracket, \
    random_rational_points
from singpaths.hamilton import BracketRelationError
from singpaths.prolong import (
    GrowthError,
    contact_hull,
    frame235,
    hull_contact_verdict,
    immersion_by_ad,
    immersion_by_jacobian,
    prolong,
)


def field(chart, *exprs):
    return VectorField(chart, [parse_expr(e, chart.variables) for e in exprs])


def test_prolongation_of_g2():
    m = build_g2()
    p = prolong(m.d)
    assert p.z_chart.variables == m.y.variables + ("z",)
    zeta, e2 = p.e.frame
    assert zeta == VectorField.coordinate_field(p.z_chart, "z")
    assert e2 == field(p.z_chart, "1", "nu - z*lam", "z", "-(lam*nu - mu) + z*lam^2", "nu^2 - z*(lam*nu + mu)", "0")
    assert lie_bracket(zeta, e2) == field(p.z_chart, "0", "-lam", "1", "lam^2", "-(lam*nu + mu)", "0")
    assert generic_growth(derived_flag(p.e, "small"), 20).generic == (2, 3, 4, 5, 6)
    assert generic_growth(derived_flag(p.e, "big"), 20).generic == (2, 3, 4, 6)
    assert p.l_frame == (zeta,) and p.k_frame is None


def test_prolong_rejects_involutive_input():
    c = Chart("R5", ("a", "b", "c", "d", "e"))
    d = Distribution(c, (VectorField.coordinate_field(c, "a"), VectorField.coordinate_field(c, "b")))
    with pytest.raises(GrowthError, match="level 2"):
        prolong(d)


def test_frame235_of_g2():
    m = build_g2()
    f = frame235(m.d)
    e1, e2, e3, e4, e5 = f.fields
    assert e3 == field(m.y, "0", "-2", "0", "4*lam", "-4*nu")
    assert e4 == lie_bracket(e1, e3) and e5 == lie_bracket(e2, e3)
    assert all(f.certificate().values())
    for pt in random_rational_points(5, 20, seed=6):
        assert mat_rank(RationalMatrix([g.at(pt) for g in f.fields])) == 5


def test_frame235_permuted():
    m = build_g2()
    f = frame235(m.d)
    g = frame235(Distribution(m.y, (m.eta2, m.eta1)))
    assert g.fields[2] == -f.fields[2]
    assert g.fields[3] == -f.fields[4]
    assert g.fields[4] == -f.fields[3]


def test_frame235_rejects_non_235():
    c = Chart("R5", ("a", "b", "c", "d", "e"))
    d = Distribution(c, (VectorField.coordinate_field(c, "a"), field(c, "0", "1", "a", "0", "0")))
    with pytest.raises(GrowthError):
        frame235(d)


def test_splitting_of_g2():
    m = build_g2()
    assert m.prolongation.check_splitting(random_rational_points(6, 20, seed=8))


def test_cone_system_of_g2():
    m = build_g2()
    c = m.cone
    want = [parse_expr(e, m.z.variables) for e in ("lam^2", "-lam", "1", "lam*x + 2*lam^2*y + lam^3*z", "-lam^3")]
    assert list(c.F.components) == want
    assert c.hamiltonian.poly == parse_expr("mu*(r + lam*(-q + x*l) + lam^2*(p + 2*y*l) + lam^3*(-m + z*l))",
                                            c.hamiltonian.variables)


def test_cone_immersion_two_routes():
    m = build_g2()
    rng = random.Random(1)
    for pt in random_rational_points(5, 20, seed=12):
        lam = Fraction(rng.randint(-9, 9), rng.randint(1, 9))
        zp = m.cone.z_point(pt, lam)
        assert immersion_by_ad(m.cone, zp)
        assert immersion_by_jacobian(m.cone, zp)
        assert immersion_by_ad(m.cone, zp, scale=7) == immersion_by_ad(m.cone, zp)


def _bracket_gram_determinant(fields, alpha, point):
    """Independent contact test: det of alpha([v_i, v_j]) on a frame of ker(alpha)."""
    rows = []
    for a in fields:
        rows.append([sum(x * y for x, y in zip(alpha, lie_bracket(a, b).at(point))) for b in fields])
    n = len(rows)
    m = [r[:] for r in rows]
    det = Fraction(1)
    for c in range(n):
        piv = next((i for i in range(c, n) if m[i][c]), None)
        if piv is None:
            return Fraction(0)
        if piv != c:
            m[c], m[piv] = m[piv], m[c]
            det = -det
        det *= m[c][c]
        for i in range(c + 1, n):
            f = m[i][c] / m[c][c]
            m[i] = [x - f * y for x, y in zip(m[i], m[c])]
    return det


def test_contact_hull_of_g2():
    m = build_g2()
    for pt in random_rational_points(5, 3, seed=21):
        hull = contact_hull(m.cone, pt, [Fraction(k, 3) for k in (-2, 1, 4, 7)])
        assert len(hull.frame) == 4 and hull.fiber_independent and hull.is_contact
        assert all(sum(a * b for a, b in zip(hull.alpha, v)) == 0 for v in hull.frame)


def test_contact_top_coefficient_against_bracket_route():
    c = Chart("R5", ("x", "y", "z", "u", "v"))
    frame = [field(c, "1", "0", "0", "y", "0"), field(c, "0", "1", "0", "0", "0"),
             field(c, "0", "0", "1", "v", "0"), field(c, "0", "0", "0", "0", "1")]
    pt = (Fraction(1, 2), Fraction(-1, 3), Fraction(2), Fraction(1, 5), Fraction(3, 7))
    alpha, top = hull_contact_verdict(frame, pt)
    assert top != 0
    assert _bracket_gram_determinant(frame, alpha, pt) != 0
    flat = [VectorField.coordinate_field(c, v) for v in ("x", "y", "z", "u")]
    alpha, top = hull_contact_verdict(flat, pt)
    assert top == 0 and _bracket_gram_determinant(flat, alpha, pt) == 0


def test_contact_hull_needs_four_samples():
    m = build_g2()
    with pytest.raises(ValueError):
        contact_hull(m.cone, (0, 0, 0, 0, 0), [0, 1, 2])


def test_g2_hull_contact_by_brackets():
    from singpaths.geometry import frame_rank, pushforward

    m = build_g2()
    pt = (Fraction(1, 2), Fraction(-1), Fraction(2, 3), Fraction(0), Fraction(5, 4))
    xfields = []
    for f in derived_flag(m.e, "small").frame(4):
        _, comps = pushforward(m.pi_x, f).in_target_variables()
        comps = [q.partial_eval({"lam": Fraction(1, 3)}).align(m.x.variables) for q in comps]
        cand = VectorField(m.x, comps)
        if frame_rank(xfields + [cand], pt) > len(xfields):
            xfields.append(cand)
    assert len(xfields) == 4
    alpha, top = hull_contact_verdict(xfields, pt)
    assert top != 0
    assert _bracket_gram_determinant(xfields, alpha, pt) != 0
