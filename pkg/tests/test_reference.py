import math
from fractions import Fraction

import numpy as np
import pytest

from barrierlab.poly import evaluate_affine, l2_norm_sq
from barrierlab.projgeom import E0, ProjectivePoint, fs_distance, pack_fs_balls
from barrierlab.reference import (
    BelowAsymptoticRegime,
    ReferenceSpec,
    SeparationViolation,
    boundary_circles,
    boundary_fs_lower_bound,
    build_p0,
    build_p1,
    build_p2,
    chebyshev_coeffs,
    chebyshev_eval,
    chebyshev_extrema,
    chebyshev_roots,
    circle_points,
    nest_size,
    p0_norm_sq,
    reference_polynomial,
)

from oracles import chebyshev_power_basis, monomial_norm_sq_exact


@pytest.mark.parametrize("n", [0, 1, 2, 5, 17, 40])
def test_chebyshev_coefficients_match_explicit_formula(n):
    assert list(chebyshev_coeffs(n).coeffs) == chebyshev_power_basis(n)


def test_chebyshev_values():
    th = np.linspace(0, math.pi, 101)
    for n in (0, 3, 20):
        assert np.allclose(chebyshev_eval(n, np.cos(th)), np.cos(n * th), atol=1e-12)
        assert np.allclose(chebyshev_coeffs(n)(np.cos(th)), np.cos(n * th), atol=1e-9)
    # outside [-1, 1]: cosh(n arccosh x)
    assert chebyshev_eval(5, 1.5) == pytest.approx(math.cosh(5 * math.acosh(1.5)), rel=1e-12)


def test_chebyshev_roots_and_extrema():
    for n in (1, 4, 9):
        assert np.allclose(chebyshev_eval(n, chebyshev_roots(n)), 0.0, atol=1e-12)
        e = chebyshev_extrema(n)
        v = chebyshev_eval(n, e)
        assert np.allclose(np.abs(v), 1.0, atol=1e-12)
        assert np.all(v[1:] * v[:-1] < 0)
    with pytest.raises(ValueError):
        chebyshev_roots(0)


def test_p0_zero_circle_and_exact_norm():
    d, f = 12, 2.0
    P = build_p0(d, f)
    r = math.sqrt(f / d)
    t = np.linspace(0, 2 * math.pi, 7)
    z = np.column_stack([r * np.cos(t), r * np.sin(t)])
    assert np.allclose(evaluate_affine(P, z), 0.0, atol=1e-14)
    assert evaluate_affine(P, np.zeros((1, 2)))[0] < 0
    # distinct monomials are orthogonal
    exact = (Fraction(f) / d) ** 2 * monomial_norm_sq_exact((d, 0, 0)) \
        + 2 * monomial_norm_sq_exact((d - 2, 2, 0))
    assert p0_norm_sq(d, f) == pytest.approx(float(exact), rel=1e-14)
    assert l2_norm_sq(P) == pytest.approx(float(exact), rel=1e-12)


def test_p0_validation():
    with pytest.raises(ValueError):
        build_p0(1, 1.0)
    with pytest.raises(ValueError):
        build_p0(10, 11.0)


def test_nest_size_even():
    assert nest_size(6, 0.9) == 4
    assert nest_size(5, 0.9) == 4
    assert nest_size(2, 0.9) == 0


def test_p1_zero_circles_and_alternation():
    d, f, alpha = 80, 6.0, 0.9
    ref = build_p1(d, f, alpha)
    assert ref.N == 4 and len(ref.zero_radii) == 2
    assert np.allclose(evaluate_affine(ref.poly, np.column_stack([ref.zero_radii, 0 * ref.zero_radii])), 0,
                       atol=1e-9)
    ext = evaluate_affine(ref.poly, np.column_stack([ref.extremal_radii, 0 * ref.extremal_radii]))
    assert np.allclose(np.abs(ext), 1.0, atol=1e-9)
    assert ext[0] > 0 and np.all(ext[1:] * ext[:-1] < 0)
    with pytest.raises(ValueError):
        build_p1(6, 6.0, 0.9)
    with pytest.raises(ValueError):
        build_p1(80, 1.0, 0.9)


def test_p2_copies_and_separation():
    d, eps = 60, 0.3
    pts = pack_fs_balls(d ** (-0.5 + eps))[:3]
    ref = build_p2(d, pts, eps)
    assert len(ref.copies) == 3
    for p, c in zip(pts, ref.copies):
        assert l2_norm_sq(c) == pytest.approx(p0_norm_sq(d, 1.0), rel=1e-9)
    near = ProjectivePoint.from_affine(1e-3, 0.0)
    with pytest.raises(SeparationViolation):
        build_p2(d, [E0, near], eps)


def test_spec_annuli_and_circles():
    s = ReferenceSpec("P0", 50, 2.0)
    (c, r1, r2), = s.annuli()
    assert c == E0 and r1 < math.sqrt(2 / 50) < r2
    assert len(boundary_circles(s)) == 2
    s1 = ReferenceSpec("P1", 80, 6.0, alpha=0.9)
    assert len(s1.annuli()) == 2 and len(boundary_circles(s1)) == 3
    with pytest.raises(ValueError):
        ReferenceSpec("P1", 80, 1.0, alpha=0.9)
    with pytest.raises(ValueError):
        ReferenceSpec("P3", 80)


def test_circle_points_are_at_the_right_distance():
    p = ProjectivePoint((1.0, 2.0, -0.5))
    x = circle_points(p, 0.3, 16)
    dist = [fs_distance(p, ProjectivePoint(v)) for v in x]
    assert np.allclose(dist, math.atan(0.3), atol=1e-12)


def test_boundary_bound_reports_and_raises():
    good = boundary_fs_lower_bound(ReferenceSpec("P0", 2000, 2.0), n_angles=64)
    assert good.holds and good.numeric_inf >= good.closed_form_bound
    # at f = 1 the outer-circle value tends to d^2 e^(-3/2) / 40, under the d^2/32 form
    spec = ReferenceSpec("P0", 2000, 1.0)
    with pytest.raises(BelowAsymptoticRegime) as info:
        boundary_fs_lower_bound(spec, n_angles=64)
    b = info.value.bound
    assert b.numeric_inf == pytest.approx(2000**2 * math.exp(-1.5) / 40, rel=0.01)
    assert boundary_fs_lower_bound(spec, n_angles=64, strict=False).numeric_inf == b.numeric_inf
    assert reference_polynomial(spec).degree == 2000
