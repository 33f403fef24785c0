"""Topology of real zero sets.

Z/2 classes of a curve in an annulus from the parity of radial crossings,
marching-squares extraction of the curve in a disk of an affine chart, nest
depth by the even-odd rule, and the partition of points of RP^2 by the
components of the complement of the curve (flood fill on a sphere grid,
quotiented by the antipodal map).

All evaluations use unit representatives, so values are the pointwise FS
norm with the sign of the polynomial and never overflow.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from typing import Literal, NamedTuple, Sequence

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from .poly import (
    HomogeneousPoly,
    evaluate_affine_grid,
    evaluate_homogeneous,
    l2_norm_sq,
    num_monomials,
    rotate_poly,
)
from .projgeom import E0, ProjectivePoint, SphereGrid, rotation_to

__all__ = [
    "AnnulusSpec",
    "CurveComponent",
    "SignField",
    "NestDepth",
    "TopologyError",
    "BoundaryDegenerate",
    "BoundaryCrossing",
    "InconsistentParity",
    "ResolutionError",
    "PointOnCurve",
    "ray_crossings",
    "ray_parity",
    "annulus_class",
    "annulus_outcome",
    "extract_components",
    "component_length",
    "containment_parents",
    "nest_depth_at",
    "sign_field",
    "separation_classes",
    "projective_line_crossings",
    "default_resolution",
    "components_to_csv",
    "partition_to_json",
]

BOUNDARY_TOL = 1e-12
POINT_TOL = 1e-8
# a sampled |F| local minimum below this fraction of the local scale is
# treated as a possible hidden pair of zeros and refined
TANGENCY_TOL = 1e-2
MAX_REFINE = 3


class TopologyError(RuntimeError):
    pass


class BoundaryDegenerate(TopologyError):
    """F (numerically) vanishes at a point where it must not."""


class BoundaryCrossing(TopologyError):
    """The zero set crosses a boundary circle of the annulus."""


class InconsistentParity(TopologyError):
    """Radial parities disagree between directions."""


class ResolutionError(TopologyError):
    """A suspected tangency could not be resolved by refinement."""


class PointOnCurve(TopologyError):
    """A query point lies on (or within one grid cell of) the zero set."""

    def __init__(self, index: int, message: str):
        super().__init__(f"point {index}: {message}")
        self.index = index


@dataclass(frozen=True)
class AnnulusSpec:
    """{r1 < |z| < r2} in the affine chart centred at ``center``.

    r1 = 0 is allowed and stands for the punctured disk, whose inner boundary
    is the centre itself.
    """

    center: ProjectivePoint
    r1: float
    r2: float

    def __post_init__(self):
        if not 0 <= self.r1 < self.r2:
            raise ValueError("need 0 <= r1 < r2")
        if math.atan(self.r2) > math.pi / 2 - 1e-3:
            raise ValueError("r2 too large: annulus must stay inside one chart")


def _value_scale(F: HomogeneousPoly) -> float:
    # sup over CP^2 of |F(x)| at unit x is at most ||F||_2 sqrt(N_d)
    return math.sqrt(l2_norm_sq(F) * num_monomials(F.degree))


def _chart_points(center: ProjectivePoint, z: np.ndarray) -> np.ndarray:
    """Unit representatives of affine points z (..., 2) of the chart at center."""
    x = np.concatenate([np.ones(z.shape[:-1] + (1,)), z], axis=-1)
    x = x / np.linalg.norm(x, axis=-1, keepdims=True)
    if center != E0:
        x = x @ rotation_to(center).matrix.T
    return x


def _scan_segment(F: HomogeneousPoly, center: ProjectivePoint, p0: np.ndarray, p1: np.ndarray,
                  n: int, scale: float, depth: int = 0) -> int:
    """Number of sign changes of F along the affine segment p0 -> p1.

    Local minima of |F| without a sign change that come within TANGENCY_TOL of
    the neighbouring values are rescanned 16x finer.
    """
    t = np.linspace(0.0, 1.0, n + 1)
    z = p0[None, :] + t[:, None] * (p1 - p0)[None, :]
    v = evaluate_homogeneous(F, _chart_points(center, z))
    return _count_with_refinement(F, center, z, v, scale, depth, closed=False)


def _count_with_refinement(F, center, z, v, scale, depth, closed: bool) -> int:
    s = v >= 0
    if closed:
        changes = int(np.sum(s != np.roll(s, -1)))
    else:
        changes = int(np.sum(s[1:] != s[:-1]))
    a = np.abs(v)
    if closed:
        left, right = np.roll(a, 1), np.roll(a, -1)
        idx = np.arange(len(a))
    else:
        left, right = a[:-2], a[2:]
        idx = np.arange(1, len(a) - 1)
        a_mid = a[1:-1]
    mid = a if closed else a_mid
    sl = s if closed else s[1:-1]
    sn_l = np.roll(s, 1) if closed else s[:-2]
    sn_r = np.roll(s, -1) if closed else s[2:]
    suspect = ((mid <= left) & (mid <= right) & (sl == sn_l) & (sl == sn_r)
               & (mid < TANGENCY_TOL * np.maximum(left, right)) & (mid < TANGENCY_TOL * scale))
    for k in idx[suspect]:
        if depth >= MAX_REFINE:
            raise ResolutionError("unresolved near-tangency after maximal refinement")
        km, kp = (k - 1) % len(z), (k + 1) % len(z)
        extra = _scan_segment(F, center, z[km], z[kp], 32, scale, depth + 1)
        changes += extra
    return changes


def _ray_samples(F: HomogeneousPoly, annulus: AnnulusSpec) -> int:
    dr = math.atan(annulus.r2) - math.atan(annulus.r1)
    return max(32, int(math.ceil(16 * math.sqrt(F.degree) * dr * 4)))


def _check_endpoint(val: float, scale: float, where: str) -> None:
    if abs(val) < BOUNDARY_TOL * scale:
        raise BoundaryDegenerate(f"F vanishes numerically at {where}")


def ray_crossings(F: HomogeneousPoly, annulus: AnnulusSpec, direction, resolution: int | None = None) -> int:
    """Sign changes of s -> F(center + s direction) on [r1, r2]."""
    u = np.asarray(direction, dtype=float)
    u = u / np.linalg.norm(u)
    scale = _value_scale(F)
    ends = np.array([annulus.r1 * u, annulus.r2 * u])
    ev = evaluate_homogeneous(F, _chart_points(annulus.center, ends))
    _check_endpoint(ev[0], scale, f"r1 = {annulus.r1:.6g}")
    _check_endpoint(ev[1], scale, f"r2 = {annulus.r2:.6g}")
    n = _ray_samples(F, annulus) if resolution is None else int(resolution)
    return _scan_segment(F, annulus.center, ends[0], ends[1], n, scale)


def ray_parity(F: HomogeneousPoly, annulus: AnnulusSpec, direction, resolution: int | None = None) -> int:
    """Parity (0 or 1) of transversal zeros of F on the radial segment."""
    return ray_crossings(F, annulus, direction, resolution) % 2


AnnulusClass = Literal["trivial", "nontrivial"]


def _boundary_samples(F: HomogeneousPoly, r: float, n_directions: int) -> int:
    circ = 2 * math.pi * r / math.sqrt(1 + r * r)
    return max(2 * n_directions, int(math.ceil(16 * math.sqrt(F.degree) * circ)))


def _circle_points(r: float, n: int) -> np.ndarray:
    if r == 0.0:
        return np.zeros((1, 2))
    t = 2 * math.pi * np.arange(n) / n
    return r * np.column_stack([np.cos(t), np.sin(t)])


def _check_circle(F: HomogeneousPoly, center: ProjectivePoint, r: float, z: np.ndarray,
                  v: np.ndarray, scale: float) -> None:
    if r == 0.0:
        _check_endpoint(v[0], scale, "the annulus centre")
        return
    if np.min(np.abs(v)) < BOUNDARY_TOL * scale:
        raise BoundaryDegenerate(f"F vanishes numerically on the circle r = {r:.6g}")
    if _count_with_refinement(F, center, z, v, scale, 0, closed=True):
        raise BoundaryCrossing(f"zero set crosses the circle r = {r:.6g}")


def annulus_class(F: HomogeneousPoly, annulus: AnnulusSpec, n_directions: int = 8,
                  resolution: int | None = None) -> AnnulusClass:
    """Z/2 class of {F = 0} in the annulus, by unanimous radial parity.

    Both boundary circles are scanned first; a zero there raises
    :class:`BoundaryDegenerate` or :class:`BoundaryCrossing`.  ``resolution``
    sets the samples per ray; boundary sampling scales with it.
    """
    if n_directions < 8:
        raise ValueError("n_directions must be >= 8")
    scale = _value_scale(F)
    c = annulus.center
    n_ray = _ray_samples(F, annulus) if resolution is None else int(resolution)
    boost = n_ray / _ray_samples(F, annulus)
    circles = [(r, _circle_points(r, int(math.ceil(boost * _boundary_samples(F, r, n_directions)))))
               for r in (annulus.r1, annulus.r2)]
    z = np.concatenate([p for _, p in circles])
    v = evaluate_homogeneous(F, _chart_points(c, z))
    k = len(circles[0][1])
    _check_circle(F, c, annulus.r1, circles[0][1], v[:k], scale)
    _check_circle(F, c, annulus.r2, circles[1][1], v[k:], scale)

    theta = 2 * math.pi * np.arange(n_directions) / n_directions
    u = np.column_stack([np.cos(theta), np.sin(theta)])
    s = annulus.r1 + (annulus.r2 - annulus.r1) * np.linspace(0.0, 1.0, n_ray + 1)
    zr = u[:, None, :] * s[None, :, None]
    vr = evaluate_homogeneous(F, _chart_points(c, zr.reshape(-1, 2))).reshape(n_directions, -1)
    par = {_count_with_refinement(F, c, zr[i], vr[i], scale, 0, closed=False) % 2
           for i in range(n_directions)}
    if len(par) != 1:
        raise InconsistentParity("radial parities differ between directions")
    return "nontrivial" if par.pop() == 1 else "trivial"


Outcome = Literal["nontrivial", "trivial", "boundary_crossing", "indeterminate"]


def annulus_outcome(F: HomogeneousPoly, annulus: AnnulusSpec, n_directions: int = 8,
                    resolution: int | None = None) -> Outcome:
    """:func:`annulus_class` with failures mapped to outcome buckets."""
    try:
        return annulus_class(F, annulus, n_directions, resolution)
    except BoundaryCrossing:
        return "boundary_crossing"
    except TopologyError:
        return "indeterminate"


# -- contours in a disk ----------------------------------------------------------

def default_resolution(d: int, radius: float) -> int:
    """Grid cells per side: at least 256 and at least 8 per d^-1/2 across the disk."""
    return max(256, int(math.ceil(16 * radius * math.sqrt(d))))


@dataclass
class CurveComponent:
    """One connected piece of the extracted zero set.

    ``segments`` (k, 2, 2) are the marching-squares segments in the chart at
    ``center``; ``is_closed`` is False when the piece reaches the disk edge.
    """

    segments: np.ndarray
    is_closed: bool
    center: ProjectivePoint = E0
    parent: int | None = None
    _polyline: np.ndarray | None = field(default=None, repr=False)

    @property
    def polyline(self) -> np.ndarray:
        """Vertices in traversal order (closed loops repeat no vertex)."""
        if self._polyline is None:
            self._polyline = _order_segments(self.segments)
        return self._polyline

    def contains(self, z: np.ndarray) -> np.ndarray:
        """Even-odd test for points z (m, 2); meaningful for closed pieces."""
        return _even_odd(self.segments, np.atleast_2d(z)) % 2 == 1


def _order_segments(seg: np.ndarray) -> np.ndarray:
    pts = seg.reshape(-1, 2)
    keys = np.round(pts * 1e12).astype(np.int64)
    _, ids = np.unique(keys, axis=0, return_inverse=True)
    ids = ids.reshape(-1, 2)
    nbrs: dict[int, list[int]] = {}
    for a, b in ids:
        nbrs.setdefault(int(a), []).append(int(b))
        nbrs.setdefault(int(b), []).append(int(a))
    coords = {int(i): p for i, p in zip(ids.ravel(), pts)}
    ends = [k for k, v in nbrs.items() if len(v) == 1]
    start = ends[0] if ends else int(ids[0, 0])
    order = [start]
    prev, cur = None, start
    while True:
        nxt = [k for k in nbrs[cur] if k != prev]
        if not nxt or nxt[0] == start:
            break
        prev, cur = cur, nxt[0]
        order.append(cur)
    return np.array([coords[k] for k in order])


def _even_odd(seg: np.ndarray, z: np.ndarray) -> np.ndarray:
    """Crossings of the rays {z + t e1, t > 0} with the segments, per point."""
    a, b = seg[:, 0, :], seg[:, 1, :]
    out = np.zeros(len(z), dtype=np.int64)
    for i, p in enumerate(z):
        straddle = (a[:, 1] > p[1]) != (b[:, 1] > p[1])
        if not np.any(straddle):
            continue
        aa, bb = a[straddle], b[straddle]
        x = aa[:, 0] + (p[1] - aa[:, 1]) * (bb[:, 0] - aa[:, 0]) / (bb[:, 1] - aa[:, 1])
        out[i] = int(np.sum(x > p[0]))
    return out


def _grid_values(F: HomogeneousPoly, center: ProjectivePoint, xs: np.ndarray) -> np.ndarray:
    if center != E0:
        F = rotate_poly(F, rotation_to(center).T)
    # FS-scaled values: same signs, bounded magnitudes
    V = evaluate_affine_grid(F, xs, xs)
    w = (1.0 + xs[:, None] ** 2 + xs[None, :] ** 2) ** (-F.degree / 2)
    return V * w, F


# marching-squares segment table: corner bits (v00, v10, v11, v01) -> edge pairs
# edges: 0 bottom (00-10), 1 right (10-11), 2 top (01-11), 3 left (00-01)
_CASES = {
    1: [(0, 3)], 2: [(0, 1)], 3: [(1, 3)], 4: [(1, 2)], 6: [(0, 2)], 7: [(2, 3)],
    8: [(2, 3)], 9: [(0, 2)], 11: [(1, 2)], 12: [(1, 3)], 13: [(0, 1)], 14: [(0, 3)],
}


def extract_components(F: HomogeneousPoly, center: ProjectivePoint = E0, radius: float = 1.0,
                       resolution: int | None = None) -> list[CurveComponent]:
    """Marching-squares zero set of F in the disk |z| <= radius of the chart at center.

    Only cells with all four corners in the disk are contoured.  Saddle cells
    take the side from the value at the cell centre.  Crossing points on grid
    edges are the graph nodes; pieces whose nodes all have degree 2 are
    closed, the rest touch the disk edge.
    """
    n = default_resolution(F.degree, radius) if resolution is None else int(resolution)
    if n < 64:
        raise ValueError("resolution must be >= 64")
    xs = np.linspace(-radius, radius, n + 1)
    V, Fc = _grid_values(F, center, xs)
    pos = V >= 0
    X, Y = np.meshgrid(xs, xs, indexing="ij")
    inside = X**2 + Y**2 <= radius**2
    active = inside[:-1, :-1] & inside[1:, :-1] & inside[1:, 1:] & inside[:-1, 1:]
    code = (pos[:-1, :-1].astype(np.int64) | (pos[1:, :-1] << 1) | (pos[1:, 1:] << 2)
            | (pos[:-1, 1:] << 3))
    code = np.where(active, code, 0)
    code[code == 15] = 0

    # edge ids: horizontal edges (i,j)-(i+1,j) -> i*(n+1)+j ; vertical (i,j)-(i,j+1) -> H + i*n + j
    H = n * (n + 1)

    def edge_ids(ci, cj, e):
        return np.select(
            [e == 0, e == 1, e == 2, e == 3],
            [ci * (n + 1) + cj, H + (ci + 1) * n + cj, ci * (n + 1) + cj + 1, H + ci * n + cj])

    seg_a, seg_b = [], []
    for c, pairs in _CASES.items():
        ci, cj = np.nonzero(code == c)
        for ea, eb in pairs:
            seg_a.append(edge_ids(ci, cj, np.full(ci.shape, ea)))
            seg_b.append(edge_ids(ci, cj, np.full(ci.shape, eb)))
    si, sj = np.nonzero((code == 5) | (code == 10))
    if si.size:
        cx = 0.5 * (xs[si] + xs[si + 1])
        cy = 0.5 * (xs[sj] + xs[sj + 1])
        cv = evaluate_affine_grid_points(Fc, np.column_stack([cx, cy])) >= 0
        c = code[si, sj]
        # centre agrees with the positive corners: they connect across the centre
        for case, joined, split in ((5, [(0, 1), (2, 3)], [(0, 3), (1, 2)]),
                                    (10, [(0, 3), (1, 2)], [(0, 1), (2, 3)])):
            for flag in (True, False):
                m = (c == case) & (cv == flag)
                pairs = joined if flag else split
                for ea, eb in pairs:
                    seg_a.append(edge_ids(si[m], sj[m], np.full(m.sum(), ea)))
                    seg_b.append(edge_ids(si[m], sj[m], np.full(m.sum(), eb)))
    if not seg_a:
        return []
    ea = np.concatenate(seg_a)
    eb = np.concatenate(seg_b)
    if ea.size == 0:
        return []
    nodes, inv = np.unique(np.concatenate([ea, eb]), return_inverse=True)
    ia, ib = inv[: ea.size], inv[ea.size:]

    # crossing coordinates by linear interpolation along each edge
    horiz = nodes < H
    i0 = np.where(horiz, nodes // (n + 1), (nodes - H) // n)
    j0 = np.where(horiz, nodes % (n + 1), (nodes - H) % n)
    i1 = np.where(horiz, i0 + 1, i0)
    j1 = np.where(horiz, j0, j0 + 1)
    v0, v1 = V[i0, j0], V[i1, j1]
    t = v0 / (v0 - v1)
    px = xs[i0] + t * (xs[i1] - xs[i0])
    py = xs[j0] + t * (xs[j1] - xs[j0])
    P = np.column_stack([px, py])

    m = len(nodes)
    g = coo_matrix((np.ones(ia.size), (ia, ib)), shape=(m, m))
    n_comp, lab = connected_components(g, directed=False)
    deg = np.bincount(ia, minlength=m) + np.bincount(ib, minlength=m)
    closed = np.ones(n_comp, dtype=bool)
    closed[lab[deg != 2]] = False
    seg_lab = lab[ia]
    order = np.argsort(seg_lab, kind="stable")
    bounds = np.searchsorted(seg_lab[order], np.arange(n_comp + 1))
    segs = np.stack([P[ia], P[ib]], axis=1)
    return [CurveComponent(segs[order[bounds[k]:bounds[k + 1]]], bool(closed[k]), center)
            for k in range(n_comp)]


def evaluate_affine_grid_points(F: HomogeneousPoly, z: np.ndarray) -> np.ndarray:
    """F at affine points z of the standard chart, FS-scaled (sign preserving)."""
    x = np.column_stack([np.ones(len(z)), z])
    x /= np.linalg.norm(x, axis=1, keepdims=True)
    return evaluate_homogeneous(F, x)


def component_length(c: CurveComponent, metric: Literal["euclidean", "fubini_study"] = "euclidean") -> float:
    """Polyline length in the chart, or its FS length (exact FS metric on RP^2
    evaluated at each segment midpoint)."""
    if not c.is_closed:
        raise ValueError("component is open (touches the disk boundary)")
    dz = c.segments[:, 1] - c.segments[:, 0]
    if metric == "euclidean":
        return float(np.sum(np.linalg.norm(dz, axis=1)))
    if metric != "fubini_study":
        raise ValueError(f"unknown metric {metric!r}")
    z = 0.5 * (c.segments[:, 1] + c.segments[:, 0])
    q = 1.0 + np.sum(z * z, axis=1)
    ds2 = (np.sum(dz * dz, axis=1) * q - np.sum(z * dz, axis=1) ** 2) / q**2
    return float(np.sum(np.sqrt(ds2)))


def containment_parents(components: Sequence[CurveComponent]) -> list[int | None]:
    """Index of the innermost closed component strictly containing each closed one."""
    closed = [k for k, c in enumerate(components) if c.is_closed]
    out: list[int | None] = [None] * len(components)
    for k in closed:
        probe = components[k].segments[0, 0][None, :]
        owners = [j for j in closed if j != k and components[j].contains(probe)[0]]
        if owners:
            # the innermost owner lies inside every other owner
            def depth(j):
                q = components[j].segments[0, 0][None, :]
                return sum(bool(components[i].contains(q)[0]) for i in owners if i != j)
            out[k] = max(owners, key=depth)
    for k, p in enumerate(out):
        components[k].parent = p
    return out


class NestDepth(NamedTuple):
    depth: int
    lower_bound: bool   # some component reaches the disk edge


def nest_depth_at(F: HomogeneousPoly, p: ProjectivePoint = E0, R_max: float = 1.0,
                  resolution: int | None = None) -> NestDepth:
    """Number of closed components within R_max of p that enclose p."""
    scale = _value_scale(F)
    v = evaluate_homogeneous(F, p.vector[None, :])[0]
    if abs(v) < POINT_TOL * scale:
        raise PointOnCurve(0, "F vanishes numerically at the query point")
    comps = extract_components(F, p, R_max, resolution)
    closed = [c for c in comps if c.is_closed]
    depth = 0
    if closed:
        seg = np.concatenate([c.segments for c in closed])
        lab = np.repeat(np.arange(len(closed)), [len(c.segments) for c in closed])
        a, b = seg[:, 0, :], seg[:, 1, :]
        straddle = (a[:, 1] > 0) != (b[:, 1] > 0)
        x = a[:, 0] + (0 - a[:, 1]) * (b[:, 0] - a[:, 0]) / np.where(straddle, b[:, 1] - a[:, 1], 1.0)
        hit = straddle & (x > 0)
        depth = int(np.sum(np.bincount(lab[hit], minlength=len(closed)) % 2))
    return NestDepth(depth, any(not c.is_closed for c in comps))


# -- complement components on RP^2 ---------------------------------------------

@dataclass(frozen=True)
class SignField:
    """Values of F at the vertices of a sphere grid (FS-scaled, signed)."""

    grid: SphereGrid
    values: np.ndarray
    degree: int

    @property
    def signs(self) -> np.ndarray:
        return np.where(self.values >= 0, 1, -1)

    def antipodal_consistent(self) -> bool:
        v = self.values
        return bool(np.array_equal(v[self.grid.antipode_vertex], (-1) ** self.degree * v))


def sign_field(F: HomogeneousPoly, grid: SphereGrid) -> SignField:
    return SignField(grid, evaluate_homogeneous(F, grid.vertices), F.degree)


def _locate(grid: SphereGrid, x: np.ndarray) -> int:
    """Index of a cell containing the unit vector x."""
    cand = np.argsort(-(grid.centers @ x))[:8]
    v = grid.vertices
    for c in cand:
        a, b, cc = v[grid.cells[c]]
        s = [np.dot(np.cross(a, b), x), np.dot(np.cross(b, cc), x), np.dot(np.cross(cc, a), x)]
        if min(s) >= -1e-12:
            return int(c)
    return int(cand[0])


def _reachable_vertex(F: HomogeneousPoly, grid: SphereGrid, x: np.ndarray, sgn: np.ndarray,
                      n_near: int = 12, n_samples: int = 64) -> int | None:
    """Nearest vertex of the point's sign joined to x by a great-circle arc on
    which F keeps its sign (at n_samples points), or None."""
    near = np.argsort(-(grid.vertices @ x))[:n_near]
    s0 = 1 if evaluate_homogeneous(F, x[None, :])[0] >= 0 else -1
    t = np.linspace(0.0, 1.0, n_samples + 1)[:, None]
    for v in near:
        if sgn[v] != s0:
            continue
        seg = (1 - t) * x[None, :] + t * grid.vertices[v][None, :]
        seg /= np.linalg.norm(seg, axis=1, keepdims=True)
        vals = evaluate_homogeneous(F, seg)
        if np.all((vals >= 0) == (s0 > 0)):
            return int(v)
    return None


def separation_classes(F: HomogeneousPoly, points: Sequence[ProjectivePoint],
                       grid: SphereGrid) -> list[list[int]]:
    """Partition of ``points`` by the component of RP^2 minus {F = 0} holding each.

    Vertices of the grid are joined along edges whose endpoints have the same
    sign; each vertex is also joined to its antipode (the same point of RP^2).
    A point joins the label of its cell when the cell's vertices share its
    sign; otherwise it joins a nearby same-sign vertex reached by a sampled
    arc free of sign changes.  Failing both, :class:`PointOnCurve` is raised.
    """
    field_ = sign_field(F, grid)
    sgn = field_.signs
    scale = _value_scale(F)
    e = grid.edges
    same = sgn[e[:, 0]] == sgn[e[:, 1]]
    nv = len(grid.vertices)
    rows = np.concatenate([e[same, 0], np.arange(nv)])
    cols = np.concatenate([e[same, 1], grid.antipode_vertex])
    g = coo_matrix((np.ones(rows.size), (rows, cols)), shape=(nv, nv))
    _, lab = connected_components(g, directed=False)
    labels = []
    for i, p in enumerate(points):
        x = p.vector
        if abs(evaluate_homogeneous(F, x[None, :])[0]) < POINT_TOL * scale:
            raise PointOnCurve(i, "F vanishes numerically at the point")
        cell = grid.cells[_locate(grid, x)]
        if len(set(sgn[cell])) == 1 and sgn[cell[0]] == (1 if evaluate_homogeneous(F, x[None, :])[0] >= 0 else -1):
            labels.append(int(lab[cell[0]]))
            continue
        v = _reachable_vertex(F, grid, x, sgn)
        if v is None:
            raise PointOnCurve(i, "no grid vertex is joined to the point by a segment free of zeros")
        labels.append(int(lab[v]))
    groups: dict[int, list[int]] = {}
    for i, l in enumerate(labels):
        groups.setdefault(l, []).append(i)
    return sorted(groups.values())


def projective_line_crossings(F: HomogeneousPoly, a, b, n: int = 2048) -> int:
    """Sign changes of F along the projective line spanned by orthonormal a, b.

    The half great circle t -> cos t a + sin t b, t in [0, pi], closes up in
    RP^2; its endpoints differ by the antipodal map, so the count has the
    parity of the degree whenever F is nonzero at the samples.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    t = np.linspace(0.0, math.pi, n + 1)
    x = np.cos(t)[:, None] * a[None, :] + np.sin(t)[:, None] * b[None, :]
    v = evaluate_homogeneous(F, x)
    return int(np.sum((v[1:] >= 0) != (v[:-1] >= 0)))


# -- dumps ---------------------------------------------------------------------------

def components_to_csv(components: Sequence[CurveComponent]) -> str:
    """Rows ``component_id, vertex_index, z1, z2`` of each ordered polyline."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["component_id", "vertex_index", "z1", "z2"])
    for k, c in enumerate(components):
        for i, (x, y) in enumerate(c.polyline):
            w.writerow([k, i, repr(float(x)), repr(float(y))])
    return buf.getvalue()


def partition_to_json(partition: Sequence[Sequence[int]]) -> str:
    return json.dumps([list(map(int, g)) for g in partition])
