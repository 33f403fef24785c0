import csv
import io
import json
import math

import numpy as np
import pytest

from barrierlab.kostlan import SamplerConfig, sample_kostlan
from barrierlab.poly import HomogeneousPoly
from barrierlab.projgeom import E0, ProjectivePoint, sphere_grid
from barrierlab.reference import build_p0, build_p1
from barrierlab.topology import (
    AnnulusSpec,
    BoundaryDegenerate,
    PointOnCurve,
    annulus_class,
    annulus_outcome,
    component_length,
    components_to_csv,
    containment_parents,
    extract_components,
    nest_depth_at,
    partition_to_json,
    projective_line_crossings,
    ray_crossings,
    ray_parity,
    separation_classes,
    sign_field,
)

from oracles import count_sign_regions, eval_terms


def circle(d, r, cx=0.0, cy=0.0):
    """X0^(d-2) ((X1 - cx X0)^2 + (X2 - cy X0)^2 - r^2 X0^2)."""
    t = {(d, 0, 0): cx * cx + cy * cy - r * r, (d - 2, 2, 0): 1.0, (d - 2, 0, 2): 1.0}
    t[(d - 1, 1, 0)] = -2 * cx
    t[(d - 1, 0, 1)] = -2 * cy
    return HomogeneousPoly.from_terms(d, {k: v for k, v in t.items() if v != 0})


def product(*ps):
    """Product of polynomials by term expansion."""
    out = {(0, 0, 0): 1.0}
    for p in ps:
        nxt = {}
        for a, ca in out.items():
            for b, cb in p.terms().items():
                k = tuple(x + y for x, y in zip(a, b))
                nxt[k] = nxt.get(k, 0.0) + ca * cb
        out = nxt
    return HomogeneousPoly.from_terms(sum(p.degree for p in ps), out)


def test_annulus_spec_validation():
    AnnulusSpec(E0, 0.0, 0.5)
    with pytest.raises(ValueError):
        AnnulusSpec(E0, 0.5, 0.5)
    with pytest.raises(ValueError):
        AnnulusSpec(E0, 0.1, 1e4)


def test_circle_class_in_annulus():
    F = circle(6, 0.5)
    assert annulus_class(F, AnnulusSpec(E0, 0.3, 0.7)) == "nontrivial"
    assert annulus_class(F, AnnulusSpec(E0, 0.6, 0.9)) == "trivial"
    assert annulus_class(F, AnnulusSpec(E0, 0.0, 0.4)) == "trivial"
    assert ray_crossings(F, AnnulusSpec(E0, 0.3, 0.7), (1.0, 1.0)) == 1
    assert ray_parity(F, AnnulusSpec(E0, 0.3, 0.7), (0.0, -1.0)) == 1


def test_off_centre_circle_inside_annulus_is_trivial():
    # a small oval sitting inside the annulus meets each ray 0 or 2 times
    F = circle(4, 0.1, cx=0.5)
    assert annulus_class(F, AnnulusSpec(E0, 0.2, 0.8)) == "trivial"
    assert ray_crossings(F, AnnulusSpec(E0, 0.2, 0.8), (1.0, 0.0)) == 2


def test_boundary_outcomes():
    F = circle(4, 0.5)
    with pytest.raises(BoundaryDegenerate):
        annulus_class(F, AnnulusSpec(E0, 0.5, 0.8))
    G = circle(4, 0.3, cx=0.5)
    assert annulus_outcome(G, AnnulusSpec(E0, 0.1, 0.6)) == "boundary_crossing"


def test_annulus_about_another_centre():
    p = ProjectivePoint.from_affine(0.4, -0.2)
    F = circle(5, 0.2, cx=0.4, cy=-0.2)
    # radius 0.2 in the chart at (0.4,-0.2) is not a round circle there, but it
    # still separates the centre from the outer boundary
    assert annulus_class(F, AnnulusSpec(p, 0.05, 0.5)) == "nontrivial"


def test_two_nearly_tangent_zeros_are_refined():
    # |z|^2 - r^2 shifted so the circle barely reaches the ray: two crossings close together
    F = circle(4, 0.3, cx=0.5, cy=0.2999)
    ann = AnnulusSpec(E0, 0.1, 0.95)
    assert ray_crossings(F, ann, (1.0, 0.0)) == 2


def test_extract_single_circle_lengths():
    r = 0.5
    comps = extract_components(circle(6, r), radius=1.0, resolution=512)
    assert len(comps) == 1 and comps[0].is_closed
    assert component_length(comps[0]) == pytest.approx(2 * math.pi * r, rel=1e-4)
    # FS length of the circle |z| = r is 2 pi r / sqrt(1 + r^2)
    assert component_length(comps[0], "fubini_study") == pytest.approx(2 * math.pi * r / math.sqrt(1 + r * r),
                                                                       rel=1e-4)
    assert comps[0].contains(np.array([[0.0, 0.0], [0.45, 0.0], [0.55, 0.0]])).tolist() == [True, True, False]
    with pytest.raises(ValueError):
        component_length(comps[0], "taxicab")


def test_open_component_touching_edge():
    comps = extract_components(circle(4, 0.5, cx=1.0), radius=1.0, resolution=256)
    assert len(comps) == 1 and not comps[0].is_closed
    with pytest.raises(ValueError):
        component_length(comps[0])


def test_nested_circles_parents_and_depth():
    F = product(circle(2, 0.2), circle(2, 0.5), circle(2, 0.8), circle(2, 0.08, cy=0.65))
    comps = extract_components(F, radius=1.0, resolution=512)
    assert len(comps) == 4 and all(c.is_closed for c in comps)
    parents = containment_parents(comps)
    r = [np.max(np.linalg.norm(c.segments[:, 0], axis=1)) for c in comps]
    by_r = {round(float(x), 1): k for k, x in enumerate(r)}
    assert parents[by_r[0.2]] == by_r[0.5]
    assert parents[by_r[0.5]] == by_r[0.8]
    assert parents[by_r[0.8]] is None
    assert parents[by_r[0.7]] == by_r[0.8]
    assert nest_depth_at(F, E0, 1.0, 512) == (3, False)
    assert nest_depth_at(F, ProjectivePoint.from_affine(0.35, 0.0), 3.0, 1024) == (2, False)


def test_nest_depth_of_chebyshev_nest():
    ref = build_p1(120, 6.0, 0.9)
    assert nest_depth_at(ref.poly, E0, 0.5).depth == ref.N // 2


def test_nest_depth_rejects_point_on_curve():
    F = HomogeneousPoly.from_terms(3, {(2, 1, 0): 1.0})
    with pytest.raises(PointOnCurve):
        nest_depth_at(F, E0)


@pytest.mark.parametrize("seed", range(4))
def test_component_count_matches_region_labelling(seed):
    # a smooth curve in a disk: every component (oval or arc) adds exactly one region
    F = sample_kostlan(SamplerConfig(8, master_seed=seed), 0)
    R = 0.9
    comps = extract_components(F, radius=R, resolution=400)
    n = 800
    xs = np.linspace(-R, R, n + 1)
    X, Y = np.meshgrid(xs, xs, indexing="ij")
    V = eval_terms(F.terms(), (np.ones_like(X), X, Y))
    inside = X**2 + Y**2 <= (R * (1 - 2 / n)) ** 2
    assert count_sign_regions(V, inside) == len(comps) + 1


def test_sign_field_antipodal():
    F = sample_kostlan(SamplerConfig(7, master_seed=1), 0)
    assert sign_field(F, sphere_grid(12)).antipodal_consistent()


def test_separation_by_two_ovals():
    F = product(circle(2, 0.2), circle(2, 0.2, cx=0.8))
    pts = [E0, ProjectivePoint.from_affine(0.8, 0.0), ProjectivePoint.from_affine(0.4, 0.4),
           ProjectivePoint((0.0, 1.0, 1.0)), ProjectivePoint.from_affine(0.05, -0.05)]
    parts = separation_classes(F, pts, sphere_grid(48))
    assert parts == [[0, 4], [1], [2, 3]]
    assert json.loads(partition_to_json(parts)) == [[0, 4], [1], [2, 3]]


def test_separation_of_an_oval_missed_by_the_grid():
    # no vertex of the coarse grid lies inside the thin oval, so its point cannot be placed
    F = circle(2, 0.02, cx=0.3)
    pts = [ProjectivePoint.from_affine(0.3, 0.0), E0]
    with pytest.raises(PointOnCurve) as info:
        separation_classes(F, pts, sphere_grid(8))
    assert info.value.index == 0
    assert separation_classes(F, pts, sphere_grid(160)) == [[0], [1]]


def test_separation_near_the_curve_uses_arc_fallback():
    # point just inside a circle, in a cell whose vertices have mixed signs
    F = circle(2, 0.5)
    pts = [ProjectivePoint.from_affine(0.499, 0.0), E0, ProjectivePoint.from_affine(0.501, 0.0)]
    assert separation_classes(F, pts, sphere_grid(24)) == [[0, 1], [2]]


def test_separation_point_on_curve():
    F = circle(2, 0.5)
    with pytest.raises(PointOnCurve) as info:
        separation_classes(F, [E0, ProjectivePoint.from_affine(0.5, 0.0)], sphere_grid(8))
    assert info.value.index == 1


@pytest.mark.parametrize("d", [3, 4, 9, 10])
def test_projective_line_crossing_parity_is_degree_parity(d):
    rng = np.random.default_rng(d)
    for k in range(5):
        F = sample_kostlan(SamplerConfig(d, master_seed=k), 0)
        a, b = np.linalg.qr(rng.standard_normal((3, 2)))[0].T
        assert projective_line_crossings(F, a, b) % 2 == d % 2


def test_components_csv_dump():
    comps = extract_components(product(circle(2, 0.2), circle(2, 0.5)), radius=1.0, resolution=256)
    rows = list(csv.reader(io.StringIO(components_to_csv(comps))))
    assert rows[0] == ["component_id", "vertex_index", "z1", "z2"]
    body = rows[1:]
    assert {r[0] for r in body} == {"0", "1"}
    assert len(body) == sum(len(c.polyline) for c in comps)
    for r in body:
        rad = math.hypot(float(r[2]), float(r[3]))
        assert min(abs(rad - 0.2), abs(rad - 0.5)) < 1e-3
