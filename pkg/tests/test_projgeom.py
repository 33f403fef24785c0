import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from barrierlab.projgeom import (
    E0,
    PACKING_CONSTANT,
    VOL_CP2,
    ProjectivePoint,
    Rotation,
    fs_ball_volume,
    fs_distance,
    fs_distance_many,
    pack_fs_balls,
    rotation_to,
    sphere_grid,
)

from oracles import fs_ball_volume_quad

coord = st.floats(-10, 10, allow_nan=False)


def test_point_is_canonical():
    p = ProjectivePoint((-2.0, 0.0, 0.0))
    assert p == E0
    assert hash(p) == hash(E0)
    assert ProjectivePoint((0.0, -1.0, 1.0)).coords[1] > 0


def test_zero_vector_rejected():
    with pytest.raises(ValueError):
        ProjectivePoint((0.0, 0.0, 0.0))


def test_affine_round_trip():
    p = ProjectivePoint.from_affine(0.3, -1.2)
    assert np.allclose(p.affine(), (0.3, -1.2))
    with pytest.raises(ValueError):
        ProjectivePoint((0.0, 1.0, 0.0)).affine()


def test_distance_matches_chart_formula():
    # tan(d_FS(0, z)) = |z|
    for r in (0.0, 0.1, 1.0, 7.0):
        p = ProjectivePoint.from_affine(r / math.sqrt(2), r / math.sqrt(2))
        assert fs_distance(E0, p) == pytest.approx(math.atan(r), abs=1e-15)


def test_distance_ignores_representative_sign():
    p = ProjectivePoint((1.0, 2.0, 3.0))
    q = np.array([-1.0, 0.5, -0.2])
    assert fs_distance_many(np.array([q, -q]), p.vector)[0] == fs_distance_many(np.array([q, -q]), p.vector)[1]


@settings(max_examples=60, deadline=None)
@given(st.tuples(coord, coord, coord), st.tuples(coord, coord, coord), st.tuples(coord, coord, coord))
def test_distance_is_a_metric(a, b, c):
    try:
        p, q, r = ProjectivePoint(a), ProjectivePoint(b), ProjectivePoint(c)
    except ValueError:
        return
    dpq = fs_distance(p, q)
    assert 0.0 <= dpq <= math.pi / 2 + 1e-15
    assert dpq == pytest.approx(fs_distance(q, p), abs=1e-15)
    assert fs_distance(p, r) <= dpq + fs_distance(q, r) + 1e-12


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_rotations_preserve_distance(seed):
    rng = np.random.default_rng(seed)
    R = Rotation.random(rng)
    p, q = ProjectivePoint(rng.standard_normal(3)), ProjectivePoint(rng.standard_normal(3))
    assert fs_distance(R @ p, R @ q) == pytest.approx(fs_distance(p, q), abs=1e-12)


def test_rotation_validation():
    with pytest.raises(ValueError):
        Rotation(np.diag([1.0, 1.0, -1.0]))
    with pytest.raises(ValueError):
        Rotation(2 * np.eye(3))
    assert Rotation.identity().is_identity()


@settings(max_examples=40, deadline=None)
@given(st.tuples(coord, coord, coord))
def test_rotation_to_sends_e0(c):
    try:
        p = ProjectivePoint(c)
    except ValueError:
        return
    R = rotation_to(p)
    assert np.allclose(R @ E0.vector, p.vector, atol=1e-13)
    assert fs_distance(R @ E0, p) < 1e-7


def test_ball_volume_against_quadrature_oracle():
    for rho in (0.05, 0.3, 1.0, 1.4):
        assert fs_ball_volume(rho) == pytest.approx(fs_ball_volume_quad(rho), rel=1e-10)
    assert fs_ball_volume(math.pi / 2) == pytest.approx(VOL_CP2, rel=1e-12)


def test_ball_volume_closed_form():
    # the chart integral equals (pi^2/2) sin^4 rho
    for rho in (0.1, 0.7):
        assert fs_ball_volume(rho) == pytest.approx(VOL_CP2 * math.sin(rho) ** 4, rel=1e-10)


@pytest.mark.parametrize("rho", [0.05, 0.1, 0.3, math.pi / 4])
def test_packing_is_separated_and_large(rho):
    pts = pack_fs_balls(rho)
    V = np.array([p.vector for p in pts])
    G = np.abs(V @ V.T)
    np.fill_diagonal(G, 0.0)
    assert np.max(G) <= math.cos(2 * rho) + 1e-12
    assert len(pts) >= PACKING_CONSTANT / rho**2


def test_sphere_grid_structure():
    g = sphere_grid(6)
    assert len(g.cells) == 8 * 36
    assert g.euler_characteristic == 2
    assert np.array_equal(g.vertices[g.antipode_vertex], -g.vertices)
    assert np.array_equal(g.antipode_vertex[g.antipode_vertex], np.arange(len(g.vertices)))
    assert not np.any(g.antipode_vertex == np.arange(len(g.vertices)))
    assert np.allclose(np.linalg.norm(g.vertices, axis=1), 1.0)
    assert g.max_cell_diameter() < 2.5 / 6
