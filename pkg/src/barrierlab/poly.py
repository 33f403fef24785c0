"""Homogeneous trivariate polynomials with the Fubini-Study L^2 structure.

Terms are stored sparsely, keyed by the position of their multi-index in a
canonical enumeration of the N_d = (d+2 choose 2) monomials of degree d.  The
L^2 inner product is the FS one normalised by Vol_FS(CP^2), for which the
monomials are orthogonal with ||X^i||^2 = i0! i1! i2! 2! / (d+2)!.

Most numerical work happens in *orthonormal coordinates* u_i = a_i ||X^i||,
which stay O(1) where monomial coefficients and norms over/underflow.
"""

from __future__ import annotations

import math
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Mapping

import numpy as np
from scipy.special import gammaln

from .projgeom import Rotation

__all__ = [
    "HomogeneousPoly",
    "num_monomials",
    "multi_indices",
    "monomial_l2_norm_sq",
    "log_monomial_norms",
    "evaluate_homogeneous",
    "evaluate_affine",
    "evaluate_affine_grid",
    "fs_norm_sq_at",
    "l2_inner",
    "l2_norm_sq",
    "normalize_l2",
    "rotate_poly",
    "orthonormal_basis_values",
    "DegreeMismatch",
]


class DegreeMismatch(ValueError):
    pass


def num_monomials(d: int) -> int:
    return (d + 2) * (d + 1) // 2


@lru_cache(maxsize=64)
def multi_indices(d: int) -> np.ndarray:
    """All (i0, i1, i2) with sum d, ordered by i1 then i2 (read-only array)."""
    i1 = np.repeat(np.arange(d + 1, dtype=np.int64), np.arange(d + 1, 0, -1))
    starts = np.concatenate([[0], np.cumsum(np.arange(d + 1, 1, -1))])
    i2 = np.arange(i1.size, dtype=np.int64) - starts[i1]
    out = np.column_stack([d - i1 - i2, i1, i2])
    out.setflags(write=False)
    return out


def _position(d: int, i1, i2):
    i1 = np.asarray(i1, dtype=np.int64)
    return i1 * (d + 1) - i1 * (i1 - 1) // 2 + np.asarray(i2, dtype=np.int64)


def _unposition(d: int, pos) -> np.ndarray:
    """Multi-indices (k, 3) at canonical positions (inverse of ``_position``)."""
    pos = np.asarray(pos, dtype=np.int64)
    i1 = np.arange(d + 1, dtype=np.int64)
    starts = _position(d, i1, 0)
    a = np.searchsorted(starts, pos, side="right") - 1
    b = pos - starts[a]
    return np.column_stack([d - a - b, a, b])


@lru_cache(maxsize=64)
def log_monomial_norms(d: int) -> np.ndarray:
    """log ||X^i||_2 for every multi-index of degree d, canonical order."""
    out = _log_norms(multi_indices(d), d)
    out.setflags(write=False)
    return out


def _log_norms(idx: np.ndarray, d: int) -> np.ndarray:
    return 0.5 * (gammaln(idx + 1.0).sum(axis=1) + math.log(2.0) - gammaln(d + 3.0))


@lru_cache(maxsize=4096)
def _factorial(n: int) -> int:
    return math.factorial(n)


def monomial_l2_norm_sq(i: Iterable[int]) -> float:
    """||X^i||_2^2 = i0! i1! i2! 2! / (d+2)!, formed exactly then rounded once."""
    i0, i1, i2 = (int(k) for k in i)
    if min(i0, i1, i2) < 0:
        raise ValueError("multi-index entries must be non-negative")
    d = i0 + i1 + i2
    num = _factorial(i0) * _factorial(i1) * _factorial(i2) * 2
    return float(Fraction(num, _factorial(d + 2)))


class HomogeneousPoly:
    """Degree-d homogeneous polynomial in X0, X1, X2 (real or complex).

    Treat instances as immutable.  ``positions`` are sorted canonical indices,
    ``coeffs`` the matching monomial coefficients; exact zeros are dropped.
    """

    __slots__ = ("degree", "positions", "coeffs", "_u")

    def __init__(self, degree: int, positions, coeffs):
        d = int(degree)
        if d < 0:
            raise ValueError("degree must be non-negative")
        pos = np.asarray(positions, dtype=np.int64).ravel()
        c = np.asarray(coeffs).ravel()
        if c.dtype.kind not in "fc":
            c = c.astype(float)
        if pos.shape != c.shape:
            raise ValueError("positions and coeffs differ in length")
        if pos.size and (pos.min() < 0 or pos.max() >= num_monomials(d)):
            raise ValueError("position out of range for degree")
        order = np.argsort(pos, kind="stable")
        pos, c = pos[order], c[order]
        if pos.size > 1 and np.any(pos[1:] == pos[:-1]):
            uniq, inv = np.unique(pos, return_inverse=True)
            acc = np.zeros(uniq.size, dtype=c.dtype)
            np.add.at(acc, inv, c)
            pos, c = uniq, acc
        keep = c != 0
        self.degree = d
        self.positions = pos[keep]
        self.coeffs = c[keep]
        self.positions.setflags(write=False)
        self.coeffs.setflags(write=False)
        self._u = None

    # -- constructors -----------------------------------------------------
    @classmethod
    def from_terms(cls, degree: int, terms: Mapping[tuple[int, int, int], complex]):
        d = int(degree)
        keys = list(terms)
        for k in keys:
            if len(k) != 3 or sum(k) != d or min(k) < 0:
                raise ValueError(f"multi-index {k} is not of degree {d}")
        pos = [int(_position(d, k[1], k[2])) for k in keys]
        vals = np.array([terms[k] for k in keys])
        return cls(d, pos, vals if len(vals) else np.zeros(0))

    @classmethod
    def from_dense(cls, degree: int, coeffs) -> HomogeneousPoly:
        c = np.asarray(coeffs)
        if c.shape != (num_monomials(degree),):
            raise ValueError("dense coefficient vector has wrong length")
        return cls(degree, np.arange(c.size), c)

    @classmethod
    def from_orthonormal(cls, degree: int, u, positions=None) -> HomogeneousPoly:
        """Build from coordinates in the orthonormal basis X^i / ||X^i||."""
        u = np.asarray(u)
        pos = np.arange(u.size) if positions is None else np.asarray(positions)
        coeffs = u * np.exp(-log_monomial_norms(degree)[pos])
        p = cls(degree, pos, coeffs)
        return p

    @classmethod
    def monomial(cls, i: tuple[int, int, int], coeff=1.0) -> HomogeneousPoly:
        return cls.from_terms(sum(i), {tuple(i): coeff})

    # -- views ------------------------------------------------------------
    @property
    def indices(self) -> np.ndarray:
        return _unposition(self.degree, self.positions)

    @property
    def is_complex(self) -> bool:
        return self.coeffs.dtype.kind == "c"

    def terms(self) -> dict[tuple[int, int, int], complex]:
        return {tuple(int(v) for v in k): c.item() for k, c in zip(self.indices, self.coeffs)}

    def dense(self) -> np.ndarray:
        out = np.zeros(num_monomials(self.degree), dtype=self.coeffs.dtype)
        out[self.positions] = self.coeffs
        return out

    def orthonormal(self) -> np.ndarray:
        """Coordinates u_i = a_i ||X^i|| on ``self.positions``."""
        if self._u is None:
            u = self.coeffs * np.exp(_log_norms(self.indices, self.degree))
            u.setflags(write=False)
            self._u = u
        return self._u

    def orthonormal_dense(self) -> np.ndarray:
        out = np.zeros(num_monomials(self.degree), dtype=self.coeffs.dtype)
        out[self.positions] = self.orthonormal()
        return out

    def coefficient_matrix(self) -> np.ndarray:
        """(d+1) x (d+1) array C[i1, i2] of the dehomogenised polynomial."""
        d = self.degree
        out = np.zeros((d + 1, d + 1), dtype=self.coeffs.dtype)
        idx = self.indices
        out[idx[:, 1], idx[:, 2]] = self.coeffs
        return out

    # -- arithmetic -------------------------------------------------------
    def _combine(self, other: HomogeneousPoly, sign: float) -> HomogeneousPoly:
        if not isinstance(other, HomogeneousPoly):
            return NotImplemented
        if other.degree != self.degree:
            raise DegreeMismatch(f"degrees {self.degree} and {other.degree} differ")
        return HomogeneousPoly(
            self.degree,
            np.concatenate([self.positions, other.positions]),
            np.concatenate([self.coeffs, sign * other.coeffs]),
        )

    def __add__(self, other):
        return self._combine(other, 1.0)

    def __sub__(self, other):
        return self._combine(other, -1.0)

    def __mul__(self, scalar):
        if isinstance(scalar, HomogeneousPoly):
            return NotImplemented
        return HomogeneousPoly(self.degree, self.positions, self.coeffs * scalar)

    __rmul__ = __mul__

    def __truediv__(self, scalar):
        return HomogeneousPoly(self.degree, self.positions, self.coeffs / scalar)

    def __neg__(self):
        return self * -1.0

    def __len__(self) -> int:
        return int(self.positions.size)

    def __repr__(self) -> str:
        return f"HomogeneousPoly(degree={self.degree}, terms={len(self)})"

    # -- text format ------------------------------------------------------
    def to_text(self) -> str:
        lines = [f"degree {self.degree}"]
        for (i0, i1, i2), c in zip(self.indices, self.coeffs):
            val = repr(complex(c)) if self.is_complex else repr(float(c))
            lines.append(f"{i0} {i1} {i2} {val}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> HomogeneousPoly:
        lines = [ln.strip() for ln in text.splitlines() if ln.strip()]
        if not lines or not lines[0].startswith("degree "):
            raise ValueError("missing 'degree d' header")
        d = int(lines[0].split()[1])
        terms: dict = {}
        is_complex = False
        for ln in lines[1:]:
            i0, i1, i2, val = ln.split(maxsplit=3)
            if "j" in val:
                is_complex = True
                v = complex(val)
            else:
                v = float(val)
            terms[(int(i0), int(i1), int(i2))] = v
        p = cls.from_terms(d, terms)
        if is_complex and not p.is_complex:
            p = HomogeneousPoly(d, p.positions, p.coeffs.astype(complex))
        return p


def _as_points(x) -> tuple[np.ndarray, tuple]:
    x = np.asarray(x)
    if x.shape[-1] != 3:
        raise ValueError("points must have a trailing axis of length 3")
    if x.dtype.kind not in "fc":
        x = x.astype(float)
    return x.reshape(-1, 3), x.shape[:-1]


def _power_gather(col: np.ndarray, exps: np.ndarray) -> np.ndarray:
    """col[:, None] ** exps, evaluated once per distinct exponent."""
    uniq, inv = np.unique(exps, return_inverse=True)
    table = _powers(col, int(uniq[-1]))[:, uniq]
    return table[:, inv]


def _chart_matrix(P: HomogeneousPoly, j: int) -> np.ndarray:
    """C[p, q] = coefficient of x_a^p x_b^q x_j^(d-p-q), (a, b) the other two axes."""
    a, b = [k for k in range(3) if k != j]
    d = P.degree
    out = np.zeros((d + 1, d + 1), dtype=P.coeffs.dtype)
    idx = P.indices
    out[idx[:, a], idx[:, b]] = P.coeffs
    return out


def _powers(t: np.ndarray, d: int) -> np.ndarray:
    """[t^0, ..., t^d] per row by repeated products (pow is slow for t < 0)."""
    t = np.asarray(t).ravel()
    out = np.empty((t.size, d + 1), dtype=np.result_type(t.dtype, np.float64))
    out[:, 0] = 1
    if d:
        out[:, 1:] = t[:, None]
        np.cumprod(out[:, 1:], axis=1, out=out[:, 1:])
    return out


def _evaluate_charts(P: HomogeneousPoly, pts: np.ndarray, chunk: int) -> np.ndarray:
    # dehomogenise by the largest coordinate so every power is <= 1 in modulus
    d = P.degree
    out = np.zeros(pts.shape[0], dtype=np.result_type(P.coeffs.dtype, pts.dtype))
    lead = np.argmax(np.abs(pts), axis=1)
    for j in range(3):
        sel = np.flatnonzero(lead == j)
        if sel.size == 0:
            continue
        a, b = [i for i in range(3) if i != j]
        C = _chart_matrix(P, j)
        for s in range(0, sel.size, chunk):
            rows = sel[s:s + chunk]
            xj = pts[rows, j]
            ta = pts[rows, a] / xj
            tb = pts[rows, b] / xj
            Q = _powers(tb, d) @ C.T
            val = np.einsum("ij,ij->i", _powers(ta, d), Q)
            if xj.dtype.kind == "c":
                out[rows] = val * xj ** d
            else:
                # |x_j|^d with the sign restored keeps P(-x) = (-1)^d P(x) bit-exact
                scale = np.abs(xj) ** d
                out[rows] = val * (scale * np.sign(xj) if d % 2 else scale)
    return out


def evaluate_homogeneous(P: HomogeneousPoly, x, chunk: int = 4096):
    """P(x) for points x of shape (..., 3); returns an array of shape (...).

    Sparse polynomials are evaluated term by term; dense ones through the
    chart of the dominant coordinate, which is exactly odd/even under x -> -x.
    """
    pts, shape = _as_points(x)
    out_dtype = np.result_type(P.coeffs.dtype, pts.dtype)
    out = np.zeros(pts.shape[0], dtype=out_dtype)
    if len(P) == 0:
        return out.reshape(shape)
    if len(P) > 3 * (P.degree + 1):
        return _evaluate_charts(P, pts, chunk).reshape(shape)
    idx = P.indices
    step = max(1, int(chunk * 64 // max(64, len(P))))
    for s in range(0, pts.shape[0], step):
        blk = pts[s:s + step]
        mono = (_power_gather(blk[:, 0], idx[:, 0])
                * _power_gather(blk[:, 1], idx[:, 1])
                * _power_gather(blk[:, 2], idx[:, 2]))
        out[s:s + step] = mono @ P.coeffs
    return out.reshape(shape)


def _affine_lift(z) -> np.ndarray:
    z = np.asarray(z)
    if z.shape[-1] != 2:
        raise ValueError("affine points must have a trailing axis of length 2")
    ones = np.ones(z.shape[:-1] + (1,), dtype=z.dtype if z.dtype.kind in "fc" else float)
    return np.concatenate([ones, z], axis=-1)


def evaluate_affine(P: HomogeneousPoly, z):
    """P(1, z1, z2) for affine points z of shape (..., 2)."""
    return evaluate_homogeneous(P, _affine_lift(z))


def evaluate_affine_grid(P: HomogeneousPoly, xs, ys) -> np.ndarray:
    """Values P(1, xs[a], ys[b]) on a tensor grid, shape (len(xs), len(ys))."""
    xs = np.asarray(xs)
    ys = np.asarray(ys)
    d = P.degree
    vx = _powers(xs, d)
    vy = _powers(ys, d)
    return vx @ P.coefficient_matrix() @ vy.T


def fs_norm_sq_at(P: HomogeneousPoly, z):
    """Pointwise FS norm |P(1,z)|^2 / (1+|z|^2)^d at affine points z (real or complex).

    Evaluated at the unit representative (1, z)/sqrt(1+|z|^2), which is the same
    quantity without ever forming (1+|z|^2)^d.
    """
    x = _affine_lift(z)
    n = np.sqrt(np.sum(np.abs(x) ** 2, axis=-1, keepdims=True))
    return np.abs(evaluate_homogeneous(P, x / n)) ** 2


def fs_norm_sq_homogeneous(P: HomogeneousPoly, x):
    """|P(x)|^2 / |x|^(2d) for homogeneous points x of shape (..., 3)."""
    x = np.asarray(x)
    n = np.sqrt(np.sum(np.abs(x) ** 2, axis=-1, keepdims=True))
    return np.abs(evaluate_homogeneous(P, x / n)) ** 2


def orthonormal_basis_values(d: int, x, positions=None) -> np.ndarray:
    """Matrix of e_i(x) = x^i / ||X^i|| for unit points x; shape (n_points, n_terms)."""
    pts, _ = _as_points(x)
    idx = multi_indices(d)
    lw = log_monomial_norms(d)
    if positions is not None:
        idx = idx[positions]
        lw = lw[positions]
    mono = (_power_gather(pts[:, 0], idx[:, 0])
            * _power_gather(pts[:, 1], idx[:, 1])
            * _power_gather(pts[:, 2], idx[:, 2]))
    return mono * np.exp(-lw)[None, :]


def l2_inner(P: HomogeneousPoly, Q: HomogeneousPoly):
    """<P, Q>_2 = sum_i a_i conj(b_i) ||X^i||^2 over the shared support."""
    if P.degree != Q.degree:
        raise DegreeMismatch(f"degrees {P.degree} and {Q.degree} differ")
    common, ia, ib = np.intersect1d(P.positions, Q.positions, assume_unique=True,
                                    return_indices=True)
    if common.size == 0:
        return 0.0
    u = P.orthonormal()[ia]
    v = Q.orthonormal()[ib]
    val = np.sum(u * np.conj(v))
    return val.item()


def l2_norm_sq(P: HomogeneousPoly) -> float:
    u = P.orthonormal()
    return float(np.sum(np.abs(u) ** 2))


def normalize_l2(P: HomogeneousPoly) -> HomogeneousPoly:
    norm = math.sqrt(l2_norm_sq(P))
    if norm == 0.0:
        raise ValueError("cannot normalise the zero polynomial")
    return HomogeneousPoly(P.degree, P.positions, P.coeffs / norm)


# -- rotations ------------------------------------------------------------

def _euler_xzx(R: np.ndarray) -> tuple[float, float, float]:
    """Angles with R = Rx(a) @ Rz(b) @ Rx(c); Rx rotates the (1,2) plane,
    Rz the (0,1) plane."""
    b = math.atan2(math.hypot(R[1, 0], R[2, 0]), R[0, 0])
    a = math.atan2(R[2, 0], R[1, 0]) if math.hypot(R[1, 0], R[2, 0]) > 0 else 0.0
    M = _planar(b, (0, 1)).T @ _planar(a, (1, 2)).T @ R
    c = math.atan2(M[2, 1], M[1, 1])
    return a, b, c


def _planar(theta: float, plane: tuple[int, int]) -> np.ndarray:
    a, b = plane
    m = np.eye(3)
    c, s = math.cos(theta), math.sin(theta)
    m[a, a], m[a, b], m[b, a], m[b, b] = c, -s, s, c
    return m


@lru_cache(maxsize=32)
def _slice_permutation(d: int, plane: tuple[int, int]) -> np.ndarray:
    """Canonical positions grouped by the exponent of the untouched variable
    (ascending k = d - i_c) and, within a group, ascending in i_a."""
    a, b = plane
    c = 3 - a - b
    idx = multi_indices(d)
    order = np.lexsort((idx[:, a], -idx[:, c]))
    return order


def _givens(u: np.ndarray, d: int, plane: tuple[int, int], theta: float) -> np.ndarray:
    """Orthonormal coordinates of x -> P(A^T x) for a planar rotation A."""
    c, s = math.cos(theta), math.sin(theta)
    perm = _slice_permutation(d, plane)
    out = np.empty_like(u)
    D = np.ones((1, 1))
    start = 0
    for k in range(d + 1):
        if k > 0:
            i = np.arange(k + 1)
            up = np.sqrt(i / k)[:, None]
            stay = np.sqrt((k - i) / k)[:, None]
            new = np.zeros((k + 1, k + 1))
            prev = D
            # columns j < k: multiply previous column j by (-s x_a + c x_b)
            new[1:, :k] += -s * up[1:] * prev
            new[:-1, :k] += c * stay[:-1] * prev
            new[:, :k] *= np.sqrt(k / (k - np.arange(k)))[None, :]
            # column k: previous column k-1 times (c x_a + s x_b)
            last = prev[:, k - 1]
            new[1:, k] += c * up[1:, 0] * last
            new[:-1, k] += s * stay[:-1, 0] * last
            D = new
        sl = perm[start:start + k + 1]
        out[sl] = D @ u[sl]
        start += k + 1
    return out


def rotate_poly(P: HomogeneousPoly, R: Rotation) -> HomogeneousPoly:
    """The polynomial x -> P(R^T x), whose zero set is R applied to that of P.

    R is factored into three planar rotations; each acts on binary-form slices
    through an orthogonal matrix built by repeated multiplication with the
    substituted linear forms, so the L^2 norm is preserved to rounding.
    """
    if R.is_identity():
        return P
    d = P.degree
    u = P.orthonormal_dense()
    a, b, c = _euler_xzx(R.matrix)
    # P(R^T x) with R = Rx(a) Rz(b) Rx(c): apply Rx(c), then Rz(b), then Rx(a)
    for theta, plane in ((c, (1, 2)), (b, (0, 1)), (a, (1, 2))):
        if theta != 0.0:
            u = _givens(u, d, plane, theta)
    return HomogeneousPoly.from_orthonormal(d, u)
