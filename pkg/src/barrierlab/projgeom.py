"""Real projective points, Fubini-Study distances and volumes, rotations,
octahedral sphere grids and ball packings of RP^2."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import integrate

__all__ = [
    "ProjectivePoint",
    "Rotation",
    "SphereGrid",
    "QuadratureError",
    "fs_distance",
    "fs_distance_many",
    "fs_ball_volume",
    "rotation_to",
    "pack_fs_balls",
    "sphere_grid",
    "VOL_CP2",
    "E0",
    "PACKING_CONSTANT",
]

VOL_CP2 = math.pi**2 / 2


class QuadratureError(RuntimeError):
    """Raised when an adaptive quadrature does not reach its tolerance."""

    def __init__(self, message: str, achieved: float):
        super().__init__(f"{message} (achieved abs error {achieved:.3e})")
        self.achieved = achieved


def _canonical(v: np.ndarray) -> np.ndarray:
    v = np.asarray(v, dtype=float)
    n = np.linalg.norm(v)
    if not np.isfinite(n) or n == 0.0:
        raise ValueError("homogeneous coordinates must be finite and not all zero")
    v = v / n
    nz = np.flatnonzero(v)
    if v[nz[0]] < 0:
        v = -v
    return v + 0.0  # drop negative zeros so equality is exact


@dataclass(frozen=True)
class ProjectivePoint:
    """A point of RP^2 stored as a unit vector with its first nonzero
    coordinate positive, so that equality and hashing are exact."""

    coords: tuple[float, float, float]

    def __init__(self, coords):
        object.__setattr__(self, "coords", tuple(float(c) for c in _canonical(coords)))

    @classmethod
    def from_affine(cls, z1: float, z2: float) -> ProjectivePoint:
        """The point [1 : z1 : z2] of the chart X0 != 0."""
        return cls((1.0, z1, z2))

    @property
    def vector(self) -> np.ndarray:
        return np.array(self.coords)

    def affine(self) -> tuple[float, float]:
        x0, x1, x2 = self.coords
        if x0 == 0.0:
            raise ValueError("point lies on the line at infinity X0 = 0")
        return (x1 / x0, x2 / x0)

    def __repr__(self) -> str:
        return "ProjectivePoint([{:.6g} : {:.6g} : {:.6g}])".format(*self.coords)


E0 = ProjectivePoint((1.0, 0.0, 0.0))


@dataclass(frozen=True, eq=False)
class Rotation:
    """A real orthogonal 3x3 change of coordinates with determinant +1."""

    matrix: np.ndarray

    def __post_init__(self):
        m = np.array(self.matrix, dtype=float)
        if m.shape != (3, 3):
            raise ValueError("rotation matrix must be 3x3")
        if np.max(np.abs(m.T @ m - np.eye(3))) > 1e-12:
            raise ValueError("matrix is not orthogonal to 1e-12")
        if np.linalg.det(m) < 0:
            raise ValueError("matrix has determinant -1")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @classmethod
    def identity(cls) -> Rotation:
        return cls(np.eye(3))

    @classmethod
    def random(cls, rng: np.random.Generator) -> Rotation:
        q, r = np.linalg.qr(rng.standard_normal((3, 3)))
        q = q * np.sign(np.diag(r))
        if np.linalg.det(q) < 0:
            q[:, 0] = -q[:, 0]
        return cls(q)

    def __matmul__(self, other):
        if isinstance(other, Rotation):
            return Rotation(self.matrix @ other.matrix)
        if isinstance(other, ProjectivePoint):
            return ProjectivePoint(self.matrix @ other.vector)
        return self.matrix @ np.asarray(other)

    @property
    def T(self) -> Rotation:
        return Rotation(self.matrix.T.copy())

    def is_identity(self) -> bool:
        return bool(np.array_equal(self.matrix, np.eye(3)))


def fs_distance(p: ProjectivePoint, q: ProjectivePoint) -> float:
    """Fubini-Study distance in [0, pi/2]: the angle between the lines."""
    a, b = p.vector, q.vector
    return math.atan2(float(np.linalg.norm(np.cross(a, b))), abs(float(a @ b)))


def fs_distance_many(points: np.ndarray, q: np.ndarray) -> np.ndarray:
    """Vectorised distance from each row of ``points`` (unit or not) to ``q``."""
    pts = np.asarray(points, dtype=float)
    q = np.asarray(q, dtype=float)
    pts = pts / np.linalg.norm(pts, axis=-1, keepdims=True)
    q = q / np.linalg.norm(q)
    return np.arctan2(np.linalg.norm(np.cross(pts, q), axis=-1), np.abs(pts @ q))


def fs_ball_volume(rho: float, tol: float = 1e-12) -> float:
    """Fubini-Study 4-volume of a ball of radius ``rho`` in CP^2.

    In the chart centred at the ball's centre the ball is the Euclidean ball of
    radius tan(rho) in C^2 with density (1+|t|^2)^-3; the radial integral is
    done in u = |t|^2, where it reads |S^3| * (1/2) int u/(1+u)^3 du.
    """
    if not 0 < rho <= math.pi / 2:
        raise ValueError("rho must lie in (0, pi/2]")
    upper = math.inf if rho >= math.pi / 2 else math.tan(rho) ** 2
    val, err = integrate.quad(lambda u: 0.5 * u / (1.0 + u) ** 3, 0.0, upper,
                              epsabs=tol * 1e-3, epsrel=tol, limit=200)
    if err > max(tol * abs(val), 1e-300) * 10:
        raise QuadratureError("fs_ball_volume did not converge", err)
    return 2 * math.pi**2 * val


def rotation_to(p: ProjectivePoint) -> Rotation:
    """Deterministic rotation sending e0 = (1,0,0) to the representative of p.

    Rodrigues rotation about e0 x p; the canonical sign of p keeps the angle in
    [0, pi/2], away from the antipodal singularity.
    """
    v = p.vector
    c = float(v[0])
    axis = np.array([0.0, -v[2], v[1]])  # e0 x v
    s = float(np.linalg.norm(axis))
    if s == 0.0:
        return Rotation.identity()
    k = axis / s
    kx = np.array([[0.0, -k[2], k[1]], [k[2], 0.0, -k[0]], [-k[1], k[0], 0.0]])
    m = np.eye(3) + s * kx + (1.0 - c) * (kx @ kx)
    # re-orthogonalise to kill rounding drift
    u, _, vt = np.linalg.svd(m)
    return Rotation(u @ vt)


def _fibonacci_hemisphere(n: int) -> np.ndarray:
    k = np.arange(n) + 0.5
    z = 1.0 - k / n
    r = np.sqrt(np.maximum(0.0, 1.0 - z * z))
    phi = k * math.pi * (3.0 - math.sqrt(5.0))
    return np.column_stack([z, r * np.cos(phi), r * np.sin(phi)])


PACKING_CONSTANT = 0.2


def pack_fs_balls(rho: float) -> list[ProjectivePoint]:
    """Centres of disjoint FS balls of radius ``rho`` in RP^2.

    Greedy rejection over a Fibonacci candidate set on the upper hemisphere;
    accepted centres are pairwise at FS distance >= 2*rho.  The count is at
    least ``PACKING_CONSTANT / rho**2`` for rho <= pi/4 (checked in tests).
    """
    if not 0 < rho <= math.pi / 4:
        raise ValueError("rho must lie in (0, pi/4]")
    n = max(64, int(math.ceil(40.0 / rho**2)))
    cand = _fibonacci_hemisphere(n)
    thresh = math.cos(2 * rho)
    accepted = np.empty((0, 3))
    for x in cand:
        if accepted.shape[0] and np.max(np.abs(accepted @ x)) > thresh:
            continue
        accepted = np.vstack([accepted, x])
    return [ProjectivePoint(a) for a in accepted]


@dataclass(frozen=True, eq=False)
class SphereGrid:
    """Triangulation of S^2 from a subdivided octahedron.

    ``vertices`` are unit vectors; ``cells`` index triangles; ``adjacency`` lists
    pairs of cells sharing an edge; ``antipode_vertex`` / ``antipode_cell`` give
    the exact antipodal pairing (an involution without fixed points).
    """

    resolution: int
    vertices: np.ndarray
    cells: np.ndarray
    centers: np.ndarray
    adjacency: np.ndarray
    antipode_vertex: np.ndarray
    antipode_cell: np.ndarray
    edges: np.ndarray = field(repr=False)

    @property
    def euler_characteristic(self) -> int:
        return len(self.vertices) - len(self.edges) + len(self.cells)

    def max_cell_diameter(self) -> float:
        v = self.vertices
        c = self.cells
        out = 0.0
        for a, b in ((0, 1), (1, 2), (0, 2)):
            dots = np.clip(np.einsum("ij,ij->i", v[c[:, a]], v[c[:, b]]), -1.0, 1.0)
            out = max(out, float(np.max(np.arccos(dots))))
        return out


def sphere_grid(resolution: int) -> SphereGrid:
    """Antipodally symmetric triangulation of S^2 with ``8 * resolution**2`` cells."""
    n = int(resolution)
    if n < 1:
        raise ValueError("resolution must be >= 1")
    span = 2 * n + 1

    def encode(t):
        return ((t[..., 0] + n) * span + (t[..., 1] + n)) * span + (t[..., 2] + n)

    ii, jj = np.meshgrid(np.arange(n + 1), np.arange(n + 1), indexing="ij")
    mask = ii + jj <= n
    ii, jj = ii[mask], jj[mask]
    local = {(int(a), int(b)): k for k, (a, b) in enumerate(zip(ii, jj))}
    ups = [(local[i, j], local[i + 1, j], local[i, j + 1])
           for i in range(n) for j in range(n - i)]
    downs = [(local[i + 1, j], local[i + 1, j + 1], local[i, j + 1])
             for i in range(n) for j in range(n - i - 1)]
    tri_local = np.array(ups + downs, dtype=np.int64)
    bary = np.column_stack([ii, jj, n - ii - jj])

    all_keys = []
    all_tris = []
    for s0 in (1, -1):
        for s1 in (1, -1):
            for s2 in (1, -1):
                sign = np.array([s0, s1, s2])
                pts = bary * sign
                keys = encode(pts)
                all_keys.append(keys)
                tris = keys[tri_local]
                if s0 * s1 * s2 < 0:  # keep outward orientation
                    tris = tris[:, ::-1]
                all_tris.append(tris)
    keys = np.unique(np.concatenate(all_keys))
    tris = np.searchsorted(keys, np.concatenate(all_tris))

    a = keys // (span * span) - n
    b = (keys // span) % span - n
    c = keys % span - n
    lattice = np.column_stack([a, b, c]).astype(float)
    vertices = lattice / np.linalg.norm(lattice, axis=1, keepdims=True)
    anti_v = np.searchsorted(keys, encode(-np.column_stack([a, b, c])))

    centers = vertices[tris].mean(axis=1)
    centers /= np.linalg.norm(centers, axis=1, keepdims=True)

    # edges and cell adjacency
    e = np.concatenate([tris[:, [0, 1]], tris[:, [1, 2]], tris[:, [2, 0]]])
    owner = np.tile(np.arange(len(tris)), 3)
    e_sorted = np.sort(e, axis=1)
    ekey = e_sorted[:, 0] * len(vertices) + e_sorted[:, 1]
    order = np.argsort(ekey, kind="stable")
    ekey_s, owner_s = ekey[order], owner[order]
    pair_start = np.flatnonzero(ekey_s[1:] == ekey_s[:-1])
    adjacency = np.column_stack([owner_s[pair_start], owner_s[pair_start + 1]])
    uniq = np.unique(ekey)
    edges = np.column_stack([uniq // len(vertices), uniq % len(vertices)])

    tkey = np.sort(tris, axis=1)
    tcode = (tkey[:, 0] * len(vertices) + tkey[:, 1]) * len(vertices) + tkey[:, 2]
    anti_t = np.sort(anti_v[tris], axis=1)
    acode = (anti_t[:, 0] * len(vertices) + anti_t[:, 1]) * len(vertices) + anti_t[:, 2]
    torder = np.argsort(tcode)
    anti_c = torder[np.searchsorted(tcode[torder], acode)]

    for arr in (vertices, tris, centers, adjacency, anti_v, anti_c, edges):
        arr.setflags(write=False)
    return SphereGrid(n, vertices, tris, centers, adjacency, anti_v, anti_c, edges)
