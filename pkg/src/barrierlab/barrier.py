"""Quantitative layer of the barrier method.

Ball-average norms (Monte Carlo and exact), the local sup-norm factor, the
threshold m(d) and the resulting probability lower bound, plus the kernel
diagnostics used for sup-norm tails: the Bergman diagonal, the hyperplane
diagonal and a grid-plus-refinement estimate of sup norms over CP^2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy.special import betainc

from .poly import (
    HomogeneousPoly,
    evaluate_homogeneous,
    fs_norm_sq_homogeneous,
    multi_indices,
    normalize_l2,
    num_monomials,
    orthonormal_basis_values,
    rotate_poly,
)
from .projgeom import E0, ProjectivePoint, fs_ball_volume, rotation_to
from .reference import ReferenceSpec, boundary_circles, boundary_fs_lower_bound, reference_polynomial

__all__ = [
    "BallSpec",
    "BallAverage",
    "ProbabilityBound",
    "BarrierCertificate",
    "SubspaceDiag",
    "sample_fs_ball",
    "ball_average_norm_sq",
    "ball_average_norm_sq_exact",
    "ball_weights",
    "local_sup_bound_factor",
    "compute_m",
    "barrier_probability_lower_bound",
    "barrier_certificate",
    "bergman_diagonal",
    "cp2_grid",
    "subspace_alpha",
    "sup_norm_estimate",
    "sup_norms",
]


@dataclass(frozen=True)
class BallSpec:
    """FS ball about ``center`` of affine radius R = sqrt(g/d)."""

    center: ProjectivePoint
    g: float
    d: int

    def __post_init__(self):
        if not 1.0 <= self.g <= self.d:
            raise ValueError("g must satisfy 1 <= g <= d")

    @property
    def R(self) -> float:
        return math.sqrt(self.g / self.d)

    @property
    def rho(self) -> float:
        return math.atan(self.R)

    @property
    def volume(self) -> float:
        return fs_ball_volume(self.rho)


class BallAverage(NamedTuple):
    value: float
    stderr: float
    n_samples: int


def sample_fs_ball(ball: BallSpec, n: int, rng: np.random.Generator) -> np.ndarray:
    """n FS-uniform unit representatives (complex, shape (n, 3)) in the ball.

    Uniform in the Euclidean 4-ball of radius R in the chart about the centre,
    thinned with acceptance probability (1 + |t|^2)^-3.
    """
    R = ball.R
    out = []
    have = 0
    while have < n:
        m = int(1.3 * (n - have) * (1 + R * R) ** 3) + 16
        g = rng.standard_normal((m, 4))
        t = g / np.linalg.norm(g, axis=1, keepdims=True) * (R * rng.random(m) ** 0.25)[:, None]
        r2 = np.sum(t * t, axis=1)
        keep = rng.random(m) < (1.0 + r2) ** -3
        t = t[keep]
        out.append(t)
        have += len(t)
    t = np.concatenate(out)[:n]
    x = np.column_stack([np.ones(n), t[:, 0] + 1j * t[:, 1], t[:, 2] + 1j * t[:, 3]])
    x /= np.linalg.norm(x, axis=1, keepdims=True)
    if ball.center != E0:
        x = x @ rotation_to(ball.center).matrix.T
    return x


def ball_average_norm_sq(Q: HomogeneousPoly, ball: BallSpec, n_samples: int = 10_000,
                         rng: np.random.Generator | None = None) -> BallAverage:
    """Monte Carlo ball average of ||Q(t)||_FS^2 with its standard error."""
    if n_samples < 1000:
        raise ValueError("n_samples must be >= 1000")
    if len(Q) == 0:
        return BallAverage(0.0, 0.0, n_samples)
    rng = np.random.default_rng() if rng is None else rng
    vals = fs_norm_sq_homogeneous(Q, sample_fs_ball(ball, n_samples, rng))
    return BallAverage(float(vals.mean()), float(vals.std(ddof=1) / math.sqrt(n_samples)), n_samples)


def ball_weights(d: int, R: float) -> np.ndarray:
    """Per-monomial weights w_i with ball average = sum_i w_i |u_i|^2.

    For the ball about [1:0:0] the torus action makes the monomials orthogonal
    on the ball; with U = R^2/(1+R^2) and k = i1 + i2 each weight is the
    regularised incomplete beta I_U(k+2, d-k+1) divided by U^2.
    """
    U = R * R / (1.0 + R * R)
    k = multi_indices(d)[:, 1:].sum(axis=1)
    return betainc(k + 2.0, d - k + 1.0, U) / (U * U)


def ball_average_norm_sq_exact(Q: HomogeneousPoly, ball: BallSpec) -> float:
    """Exact ball average (rotating Q so the ball sits at [1:0:0])."""
    if ball.center != E0:
        Q = rotate_poly(Q, rotation_to(ball.center).T)
    u = Q.orthonormal()
    w = ball_weights(Q.degree, ball.R)[Q.positions]
    return float(np.sum(w * np.abs(u) ** 2))


def local_sup_bound_factor(g: float, d: int, inf_K: float) -> float:
    """2^4 exp(3g/4) (1 + g/d)^3 / inf_K."""
    if not inf_K > 0:
        raise ValueError("inf_K must be positive")
    return 16.0 * math.exp(0.75 * g) * (1.0 + g / d) ** 3 / inf_K


def compute_m(d: int, g: float, inf_K: float) -> float:
    """m(d) = sqrt(factor * 2 N_d)."""
    return math.sqrt(local_sup_bound_factor(g, d, inf_K) * 2 * num_monomials(d))


class ProbabilityBound(NamedTuple):
    value: float   # 0.0 when below 1e-300
    log10: float


_LOG10_E = math.log10(math.e)


def barrier_probability_lower_bound(m: float) -> ProbabilityBound:
    """m / (2 sqrt(2 pi)) exp(-2 m^2), evaluated in log space."""
    if not m > 0:
        raise ValueError("m must be positive")
    lg = math.log10(m / (2.0 * math.sqrt(2.0 * math.pi))) - 2.0 * m * m * _LOG10_E
    return ProbabilityBound(10.0**lg if lg > -300 else 0.0, lg)


@dataclass(frozen=True)
class BarrierCertificate:
    """Everything needed to state the probability lower bound for one reference.

    ``m`` is in the unit-variance normalisation of the span of the reference;
    under the ``half`` convention the corresponding threshold on the reference
    coefficient is ``a_threshold = m / sqrt(2)`` and the bound is unchanged.
    """

    reference: HomogeneousPoly
    K: tuple[tuple[ProjectivePoint, float], ...]
    inf_K: float
    g: float
    m: float
    prob_lower: ProbabilityBound
    convention: str

    @property
    def a_threshold(self) -> float:
        return self.m if self.convention == "unit" else self.m / math.sqrt(2.0)


def barrier_certificate(spec: ReferenceSpec, convention: str = "half",
                        n_angles: int = 2048, poly: HomogeneousPoly | None = None) -> BarrierCertificate:
    """Certificate for the normalised reference of ``spec``.

    K is the set of boundary circles of the reference's annuli and inf_K the
    sampled infimum of ||P(z)||_FS^2 over K.  ``poly`` may pass the already
    built reference (normalised or not).
    """
    if convention not in ("half", "unit"):
        raise ValueError(f"unknown variance convention {convention!r}")
    P = normalize_l2(reference_polynomial(spec) if poly is None else poly)
    bb = boundary_fs_lower_bound(spec, n_angles=n_angles, strict=False, poly=P)
    m = compute_m(spec.d, spec.g, bb.numeric_inf)
    return BarrierCertificate(P, tuple(boundary_circles(spec)), bb.numeric_inf, spec.g, m,
                              barrier_probability_lower_bound(m), convention)


def bergman_diagonal(d: int, z) -> np.ndarray:
    """sum_i ||X^i(z)||_FS^2 / ||X^i||_2^2 at affine points z (..., 2)."""
    z = np.asarray(z)
    x = np.concatenate([np.ones(z.shape[:-1] + (1,)), z], axis=-1)
    x = x / np.linalg.norm(x, axis=-1, keepdims=True)
    B = orthonormal_basis_values(d, x.reshape(-1, 3))
    return np.sum(np.abs(B) ** 2, axis=1).reshape(z.shape[:-1])


# -- sampling CP^2 -----------------------------------------------------------

def default_sup_resolution(d: int) -> int:
    return max(4, int(math.ceil(1.8 * math.sqrt(d))))


def cp2_grid(resolution: int, real_symmetric: bool = True) -> np.ndarray:
    """Unit points covering CP^2 at angular spacing about pi/(2 resolution).

    Moduli come from the octant lattice (i, j, k)/|(i, j, k)| with i+j+k = n,
    phases of x1, x2 from a torus grid whose size scales with the modulus.
    With ``real_symmetric`` only phi1 in [0, pi] is kept, enough for
    polynomials with real coefficients since |P(conj x)| = |P(x)|.
    """
    n = int(resolution)
    if n < 1:
        raise ValueError("resolution must be >= 1")
    blocks = []
    for i in range(n + 1):
        for j in range(n + 1 - i):
            k = n - i - j
            m = np.array([i, j, k], dtype=float)
            m /= np.linalg.norm(m)
            span1 = math.pi if real_symmetric else 2 * math.pi
            p1 = max(1, int(math.ceil(2 * n * m[1] * span1 / math.pi)))
            p2 = max(1, int(math.ceil(4 * n * m[2])))
            f1 = np.arange(p1) * span1 / p1
            f2 = np.arange(p2) * 2 * math.pi / p2
            F1, F2 = np.meshgrid(f1, f2, indexing="ij")
            blocks.append(np.column_stack([
                np.full(F1.size, m[0], dtype=complex),
                m[1] * np.exp(1j * F1.ravel()),
                m[2] * np.exp(1j * F2.ravel()),
            ]))
    return np.concatenate(blocks)


@dataclass(frozen=True)
class SubspaceDiag:
    """Diagonal of the kernel of W = <v>^perp sampled on a grid."""

    v: HomogeneousPoly
    k_d: int
    alpha_d: float
    sup_diag: float
    min_diag: float
    band: tuple[float, float]
    grid_size: int


def subspace_alpha(v: HomogeneousPoly, grid=None) -> SubspaceDiag:
    """alpha_d = sup_x (N_d - ||v(x)||_FS^2) / (N_d - 1) over a grid of CP^2.

    ``grid`` is a resolution for :func:`cp2_grid` or an (n, 3) array of unit
    points.  ``band`` is [N_d (1 - max||v||^2/N_d) / (N_d - 1), N_d/(N_d - 1)].
    """
    d = v.degree
    Nd = num_monomials(d)
    if grid is None:
        grid = default_sup_resolution(d)
    pts = cp2_grid(int(grid), real_symmetric=not v.is_complex) if np.isscalar(grid) else np.asarray(grid)
    vv = fs_norm_sq_homogeneous(v, pts)
    diag = Nd - vv
    k = Nd - 1
    return SubspaceDiag(v, k, float(diag.max() / k), float(diag.max()), float(diag.min()),
                        (float((Nd - vv.max()) / k), Nd / k), len(pts))


# -- sup norms -------------------------------------------------------------------

def _tangent_frame(x: np.ndarray) -> np.ndarray:
    """Four real tangent directions (complex 3-vectors) at the unit point x."""
    M = np.eye(3, dtype=complex) - np.outer(x, x.conj())
    cols = np.argsort(-np.linalg.norm(M, axis=0))[:2]
    w1 = M[:, cols[0]] / np.linalg.norm(M[:, cols[0]])
    w2 = M[:, cols[1]] - (w1.conj() @ M[:, cols[1]]) * w1
    w2 /= np.linalg.norm(w2)
    return np.array([w1, 1j * w1, w2, 1j * w2])


_OFFSETS = np.stack(np.meshgrid(*[np.arange(-2, 3)] * 4, indexing="ij"), -1).reshape(-1, 4)


def _refine(P: HomogeneousPoly, x: np.ndarray, h: float) -> tuple[float, np.ndarray]:
    pts = x[None, :] + (_OFFSETS * h) @ _tangent_frame(x)
    pts /= np.linalg.norm(pts, axis=1, keepdims=True)
    vals = np.abs(evaluate_homogeneous(P, pts)) ** 2
    i = int(np.argmax(vals))
    return float(vals[i]), pts[i]


def _distinct(grid: np.ndarray, idx: np.ndarray, count: int, sep: float) -> list[int]:
    """Greedy pick of up to ``count`` indices (already sorted by value) whose
    points are pairwise more than ``sep`` apart in FS distance."""
    cos_sep = math.cos(sep)
    chosen: list[int] = []
    for i in idx:
        x = grid[i]
        if all(abs(np.vdot(grid[j], x)) < cos_sep for j in chosen):
            chosen.append(int(i))
            if len(chosen) == count:
                break
    return chosen


def _climb(P: HomogeneousPoly, x: np.ndarray, v: float, steps, moves: int = 4):
    """Stencil ascent from x: at each step size, move to the best of the 5^4
    tangent offsets until it stops improving (at most ``moves`` per size)."""
    for h in steps:
        for _ in range(moves):
            v2, x2 = _refine(P, x, h)
            if v2 <= v * (1 + 1e-14):
                break
            v, x = v2, x2
    return v, x


def sup_norms(U: np.ndarray, d: int, resolution: int | None = None, n_candidates: int = 16,
              n_finalists: int = 3, chunk: int = 2048) -> np.ndarray:
    """Sup over CP^2 of |P(x)| for each row of orthonormal coordinates U.

    Coarse pass: one GEMM per chunk of a :func:`cp2_grid` against the
    orthonormal basis values.  Each polynomial's best ``n_candidates`` grid
    points lying in distinct basins (more than 2 h0 apart, h0 the coarse
    spacing) are screened by a 5^4 tangent-stencil ascent at step h0/2; the
    best ``n_finalists`` continue at steps h0/8, h0/32 and h0/128.  Returns
    sup |P| (the square root of the largest FS norm square found).
    """
    U = np.atleast_2d(np.asarray(U))
    real = U.dtype.kind != "c"
    n = default_sup_resolution(d) if resolution is None else int(resolution)
    grid = cp2_grid(n, real_symmetric=real)
    n_poly = U.shape[0]
    keep = 12 * n_candidates
    best_v = np.full((n_poly, keep), -1.0)
    best_i = np.zeros((n_poly, keep), dtype=np.int64)
    for s in range(0, len(grid), chunk):
        B = orthonormal_basis_values(d, grid[s:s + chunk])
        vals = np.abs(U @ B.T) ** 2
        allv = np.concatenate([best_v, vals], axis=1)
        alli = np.concatenate([best_i, np.broadcast_to(np.arange(s, s + B.shape[0]), vals.shape)], axis=1)
        top = np.argsort(-allv, axis=1, kind="stable")[:, :keep]
        best_v = np.take_along_axis(allv, top, axis=1)
        best_i = np.take_along_axis(alli, top, axis=1)
    h0 = math.pi / (2 * n)
    out = np.empty(n_poly)
    for r in range(n_poly):
        P = HomogeneousPoly.from_orthonormal(d, U[r])
        ok = best_v[r] >= 0
        best = float(best_v[r, 0])
        screened = []
        for c in _distinct(grid, best_i[r][ok], n_candidates, 2 * h0):
            x = grid[c]
            v = float(np.abs(evaluate_homogeneous(P, x[None, :]))[0] ** 2)
            screened.append(_climb(P, x, v, (h0 / 2,), moves=2))
        screened.sort(key=lambda t: -t[0])
        for v, x in screened[:n_finalists]:
            best = max(best, _climb(P, x, v, (h0 / 2, h0 / 8, h0 / 32, h0 / 128))[0])
        out[r] = math.sqrt(best)
    return out


def sup_norm_estimate(P: HomogeneousPoly, resolution: int | None = None) -> float:
    """Estimate of sup_{CP^2} ||P(x)||_FS for one polynomial."""
    return float(sup_norms(P.orthonormal_dense()[None, :], P.degree, resolution)[0])
