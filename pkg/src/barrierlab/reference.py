"""Chebyshev polynomials and the three reference polynomials of the barrier
method: a single small circle, a nest of concentric circles, and a sum of
rotated small circles centred at prescribed points.

The closed-form lower bounds for the FS norm on the boundary set K are only
asymptotic, so :func:`boundary_fs_lower_bound` always reports them next to the
numerically sampled infimum and refuses to certify when the numbers disagree.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Literal, NamedTuple, Sequence

import numpy as np

from .poly import HomogeneousPoly, fs_norm_sq_homogeneous, l2_inner, normalize_l2, rotate_poly
from .projgeom import E0, ProjectivePoint, Rotation, fs_distance, rotation_to

__all__ = [
    "ChebyshevPoly",
    "chebyshev_coeffs",
    "chebyshev_eval",
    "chebyshev_roots",
    "chebyshev_extrema",
    "ReferenceSpec",
    "NestReference",
    "MultiCircleReference",
    "BoundaryBound",
    "BelowAsymptoticRegime",
    "SeparationViolation",
    "build_p0",
    "build_p1",
    "build_p2",
    "nest_size",
    "p0_norm_sq",
    "p1_norm_sq_bound",
    "p2_norm_sq_leading",
    "boundary_circles",
    "boundary_fs_lower_bound",
    "reference_polynomial",
    "circle_points",
    "cross_term",
]

Kind = Literal["P0", "P1", "P2"]


# -- Chebyshev polynomials -----------------------------------------------

@dataclass(frozen=True)
class ChebyshevPoly:
    """T_n with exact integer power-basis coefficients a_{0,n}, ..., a_{n,n}."""

    n: int
    coeffs: tuple[int, ...]

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        out = np.zeros_like(x)
        for c in reversed(self.coeffs):
            out = out * x + float(c)
        return out


@lru_cache(maxsize=None)
def _cheb_int(n: int) -> tuple[int, ...]:
    if n == 0:
        return (1,)
    if n == 1:
        return (0, 1)
    prev, cur = [1], [0, 1]
    for _ in range(n - 1):
        nxt = [0] + [2 * c for c in cur]
        for j, c in enumerate(prev):
            nxt[j] -= c
        prev, cur = cur, nxt
    return tuple(cur)


def chebyshev_coeffs(n: int) -> ChebyshevPoly:
    """Exact coefficients from T_{n+1} = 2x T_n - T_{n-1}, T_0 = 1, T_1 = x."""
    if n < 0:
        raise ValueError("n must be >= 0")
    return ChebyshevPoly(int(n), _cheb_int(int(n)))


def chebyshev_eval(n: int, x):
    """T_n(x): cos(n arccos x) on [-1, 1], three-term recurrence outside."""
    x = np.asarray(x, dtype=float)
    inside = np.abs(x) <= 1.0
    out = np.empty_like(x)
    out[inside] = np.cos(n * np.arccos(x[inside]))
    xo = x[~inside]
    if xo.size:
        if n == 0:
            out[~inside] = 1.0
        else:
            t0, t1 = np.ones_like(xo), xo.copy()
            for _ in range(n - 1):
                t0, t1 = t1, 2.0 * xo * t1 - t0
            out[~inside] = t1
    return out if out.ndim else float(out)


def chebyshev_roots(n: int) -> np.ndarray:
    """cos((2k+1) pi / 2n), k = 0..n-1, ascending."""
    if n < 1:
        raise ValueError("n must be >= 1")
    k = np.arange(n)
    return np.sort(np.cos((2 * k + 1) * math.pi / (2 * n)))


def chebyshev_extrema(n: int) -> np.ndarray:
    """cos(k pi / n), k = 0..n, ascending; T_n = +-1 there, alternating."""
    if n < 1:
        raise ValueError("n must be >= 1")
    k = np.arange(n + 1)
    return np.sort(np.cos(k * math.pi / n))


# -- reference polynomials -------------------------------------------------

class SeparationViolation(ValueError):
    """Two centre points are closer than the required FS separation."""

    def __init__(self, i: int, j: int, dist: float, required: float):
        super().__init__(
            f"points {i} and {j} are {dist:.6g} apart in FS distance, need >= {required:.6g}")
        self.pair = (i, j)
        self.distance = dist
        self.required = required


class NestReference(NamedTuple):
    poly: HomogeneousPoly
    N: int
    zero_radii: np.ndarray      # R_k, k = 0..N/2-1, decreasing
    extremal_radii: np.ndarray  # r_k, k = 0..N/2, decreasing, last is 0


class MultiCircleReference(NamedTuple):
    poly: HomogeneousPoly
    copies: tuple[HomogeneousPoly, ...]
    rotations: tuple[Rotation, ...]


def build_p0(d: int, f: float) -> HomogeneousPoly:
    """X0^(d-2) (X1^2 + X2^2 - (f/d) X0^2); affine zeros on |z|^2 = f/d."""
    if d < 2:
        raise ValueError("degree must be >= 2")
    if not 0 < f <= d:
        raise ValueError("f must lie in (0, d]")
    return HomogeneousPoly.from_terms(d, {
        (d, 0, 0): -f / d,
        (d - 2, 2, 0): 1.0,
        (d - 2, 0, 2): 1.0,
    })


def nest_size(f: float, alpha: float) -> int:
    """Even N from floor(alpha f), dropping one when it is odd."""
    n = int(math.floor(alpha * f))
    return n if n % 2 == 0 else n - 1


def build_p1(d: int, f: float, alpha: float) -> NestReference:
    """T_N((d/f)(X1^2 + X2^2)/X0^2) homogenised to degree d.

    The affine zero set is N/2 concentric circles; |P1| = 1 on the circles of
    the Chebyshev extrema, with signs alternating from +1 on the outermost.
    """
    if not 0 < alpha < 1:
        raise ValueError("alpha must lie in (0, 1)")
    if f <= 0:
        raise ValueError("f must be positive")
    N = nest_size(f, alpha)
    if N < 2:
        raise ValueError(f"f too small for nesting (N = {N} < 2)")
    if d < 2 * N:
        raise ValueError(f"degree {d} too small for N = {N} (need d >= 2N)")
    a = chebyshev_coeffs(N).coeffs
    scale = d / f
    terms = {}
    for j in range(N + 1):
        if a[j] == 0:
            continue
        cj = float(a[j]) * scale**j
        for ell in range(j + 1):
            terms[(d - 2 * j, 2 * ell, 2 * j - 2 * ell)] = cj * math.comb(j, ell)
    k = np.arange(N // 2)
    zero_r = np.sqrt((f / d) * np.cos((2 * k + 1) * math.pi / (2 * N)))
    k = np.arange(N // 2 + 1)
    ext_r = np.sqrt(np.maximum((f / d) * np.cos(k * math.pi / N), 0.0))
    ext_r[-1] = 0.0
    return NestReference(HomogeneousPoly.from_terms(d, terms), N, zero_r, ext_r)


def _check_separation(points: Sequence[ProjectivePoint], min_dist: float) -> None:
    for i in range(len(points)):
        for j in range(i + 1, len(points)):
            dist = fs_distance(points[i], points[j])
            if dist < min_dist * (1 - 1e-12):
                raise SeparationViolation(i, j, dist, min_dist)


def build_p2(d: int, points: Sequence[ProjectivePoint], epsilon: float) -> MultiCircleReference:
    """Sum over i of the f = 1 circle polynomial moved to centre points[i].

    Copy i is ``rotate_poly(build_p0(d, 1), R_i)`` with R_i e0 = points[i], so
    its zero circle surrounds points[i].  Points must be pairwise at FS distance
    at least 2 d^(-1/2 + epsilon).
    """
    if not points:
        raise ValueError("need at least one point")
    _check_separation(points, 2.0 * d ** (-0.5 + epsilon))
    base = build_p0(d, 1.0)
    rots = tuple(rotation_to(p) for p in points)
    copies = tuple(rotate_poly(base, R) for R in rots)
    total = copies[0]
    for c in copies[1:]:
        total = total + c
    return MultiCircleReference(total, copies, rots)


def p0_norm_sq(d: int, f: float) -> float:
    """Exact ||P0||_2^2 from the two orthogonal monomial contributions."""
    return (f / d) ** 2 * 2.0 / ((d + 2) * (d + 1)) + 8.0 / ((d + 2) * (d + 1) * d * (d - 1))


def p1_norm_sq_bound(d: int, f: float) -> float:
    """Asymptotic upper bound f^2 2^(10 f) / d^2 for ||P1||_2^2."""
    return f**2 * 2.0 ** (10 * f) / d**2


def p2_norm_sq_leading(d: int, m: int) -> float:
    return 10.0 * m / d**4


# -- specs and boundary bounds ---------------------------------------------

@dataclass(frozen=True)
class ReferenceSpec:
    """Parameters of one reference construction.

    ``f`` is the scale f(d) (P0, P1; P2 always uses 1), ``alpha`` the nest
    fraction (P1), ``points`` and ``epsilon`` the centres and separation
    exponent (P2).
    """

    kind: Kind
    d: int
    f: float = 1.0
    alpha: float | None = None
    points: tuple[ProjectivePoint, ...] = field(default=())
    epsilon: float | None = None

    def __post_init__(self):
        if self.kind not in ("P0", "P1", "P2"):
            raise ValueError(f"unknown reference kind {self.kind!r}")
        if self.d < 2:
            raise ValueError("degree must be >= 2")
        if not 1.0 <= self.f <= self.d:
            raise ValueError("f must satisfy 1 <= f <= d")
        if self.kind == "P1":
            if self.alpha is None:
                raise ValueError("P1 needs alpha")
            if nest_size(self.f, self.alpha) < 2:
                raise ValueError("f too small for nesting")
        if self.kind == "P2":
            if not self.points or self.epsilon is None:
                raise ValueError("P2 needs points and epsilon")
            object.__setattr__(self, "points", tuple(self.points))
            _check_separation(self.points, self.delta * 2.0)

    @property
    def N(self) -> int | None:
        return nest_size(self.f, self.alpha) if self.kind == "P1" else None

    @property
    def delta(self) -> float | None:
        return self.d ** (-0.5 + self.epsilon) if self.kind == "P2" else None

    @property
    def g(self) -> float:
        """Ball scale g(d) used with this reference: 6f, 4f and 6."""
        return {"P0": 6.0 * self.f, "P1": 4.0 * self.f, "P2": 6.0}[self.kind]

    @property
    def ball_radius(self) -> float:
        return math.sqrt(self.g / self.d)

    def centers(self) -> tuple[ProjectivePoint, ...]:
        return self.points if self.kind == "P2" else (E0,)

    def annuli(self) -> list[tuple[ProjectivePoint, float, float]]:
        """(centre, r1, r2) of every annulus whose class the reference fixes."""
        d, f = self.d, self.f
        if self.kind == "P0":
            return [(E0, math.sqrt(f / (2 * d)), math.sqrt(3 * f / (2 * d)))]
        if self.kind == "P1":
            r = build_p1(d, f, self.alpha).extremal_radii
            return [(E0, float(r[k + 1]), float(r[k])) for k in range(len(r) - 1)]
        r1, r2 = math.sqrt(1 / (2 * d)), math.sqrt(3 / (2 * d))
        return [(p, r1, r2) for p in self.points]


def reference_polynomial(spec: ReferenceSpec) -> HomogeneousPoly:
    """The un-normalised reference polynomial described by ``spec``."""
    if spec.kind == "P0":
        return build_p0(spec.d, spec.f)
    if spec.kind == "P1":
        return build_p1(spec.d, spec.f, spec.alpha).poly
    return build_p2(spec.d, spec.points, spec.epsilon).poly


def boundary_circles(spec: ReferenceSpec) -> list[tuple[ProjectivePoint, float]]:
    """The circles (centre, affine radius) making up K; radius 0 is a point."""
    out = []
    for c, r1, r2 in spec.annuli():
        for r in (r1, r2):
            if (c, r) not in out:
                out.append((c, r))
    return out


def circle_points(center: ProjectivePoint, radius: float, n: int) -> np.ndarray:
    """Unit representatives of n equally spaced points on an affine circle
    about ``center`` (moved there by ``rotation_to``)."""
    t = 2 * math.pi * np.arange(n) / n
    x = np.column_stack([np.ones(n), radius * np.cos(t), radius * np.sin(t)])
    x /= np.linalg.norm(x, axis=1, keepdims=True)
    return x @ rotation_to(center).matrix.T


class BelowAsymptoticRegime(RuntimeError):
    """The sampled infimum falls below the closed-form bound (d too small)."""

    def __init__(self, bound: "BoundaryBound"):
        super().__init__(
            f"{bound.kind} at d={bound.d}: numeric inf {bound.numeric_inf:.6g} "
            f"< closed-form bound {bound.closed_form_bound:.6g}")
        self.bound = bound


@dataclass(frozen=True)
class BoundaryBound:
    kind: str
    d: int
    f: float
    closed_form_bound: float
    numeric_inf: float
    circles: tuple[tuple[float, float, float], ...]  # (radius, numeric inf, bound)

    @property
    def holds(self) -> bool:
        return all(num >= bnd for _, num, bnd in self.circles)


def _closed_form_bound(spec: ReferenceSpec, radius: float, circle_index: int) -> float:
    d, f = spec.d, spec.f
    if spec.kind == "P0":
        # inner circle: e^(-f/2); outer circle: e^(-3f/2)
        return d**2 / 32.0 * math.exp(-(f / 2 if circle_index == 0 else 3 * f / 2))
    if spec.kind == "P1":
        return d**2 / f**2 * math.exp(-9 * f)
    return d**2 / (1000.0 * len(spec.points))


def boundary_fs_lower_bound(spec: ReferenceSpec, n_angles: int = 2048,
                            strict: bool = True, poly: HomogeneousPoly | None = None) -> BoundaryBound:
    """Closed-form lower bound and sampled infimum of the normalised reference's
    pointwise FS norm on K.

    ``poly`` may pass a prebuilt reference to avoid rebuilding it.  With
    ``strict`` a sampled infimum below the closed form raises
    :class:`BelowAsymptoticRegime` carrying both values.
    """
    P = normalize_l2(reference_polynomial(spec) if poly is None else poly)
    rows = []
    for c, r in boundary_circles(spec):
        pts = circle_points(c, r, 1 if r == 0.0 else n_angles)
        val = float(np.min(fs_norm_sq_homogeneous(P, pts)))
        idx = 0 if spec.kind == "P0" and r < math.sqrt(spec.f / spec.d) else 1
        rows.append((float(r), val, _closed_form_bound(spec, r, idx)))
    out = BoundaryBound(spec.kind, spec.d, spec.f,
                        min(b for _, _, b in rows), min(v for _, v, _ in rows), tuple(rows))
    if strict and not out.holds:
        raise BelowAsymptoticRegime(out)
    return out


def cross_term(ref: MultiCircleReference, i: int, j: int) -> float:
    """Exact |<copy_i, copy_j>_2|."""
    return abs(l2_inner(ref.copies[i], ref.copies[j]))
