"""Kostlan ensemble samplers and univariate real-root counting.

Every sample is a pure function of ``(master_seed, trial_index, stream)``: the
generator for a trial is built from a ``SeedSequence`` keyed on those integers,
so results never depend on how trials are scheduled across workers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal, NamedTuple

import numpy as np

from .poly import HomogeneousPoly, l2_inner, l2_norm_sq, normalize_l2, num_monomials

Convention = Literal["half", "unit"]

# stream ids used across the package
STREAM_MAIN = 0
STREAM_HYPERPLANE = 1
STREAM_AUX = 2


def trial_rng(master_seed: int, trial_index: int, stream: int = STREAM_MAIN) -> np.random.Generator:
    """Independent generator for one (seed, trial, stream) triple."""
    ss = np.random.SeedSequence(entropy=int(master_seed) & (2**64 - 1),
                                spawn_key=(int(trial_index), int(stream)))
    return np.random.Generator(np.random.PCG64(ss))


@dataclass(frozen=True)
class SamplerConfig:
    degree: int
    variance_convention: Convention = "half"
    master_seed: int = 0

    def __post_init__(self):
        if self.degree < 1:
            raise ValueError("degree must be >= 1")
        if self.variance_convention not in ("half", "unit"):
            raise ValueError("variance_convention must be 'half' or 'unit'")

    @property
    def sigma(self) -> float:
        """Per-coordinate standard deviation in the orthonormal basis."""
        return math.sqrt(0.5) if self.variance_convention == "half" else 1.0


def kostlan_coordinates(cfg: SamplerConfig, trial_index: int, stream: int = STREAM_MAIN) -> np.ndarray:
    """Orthonormal-basis coordinates of a Kostlan sample (i.i.d. N(0, sigma^2))."""
    rng = trial_rng(cfg.master_seed, trial_index, stream)
    return cfg.sigma * rng.standard_normal(num_monomials(cfg.degree))


def sample_kostlan(cfg: SamplerConfig, trial_index: int) -> HomogeneousPoly:
    """Real Kostlan polynomial: coefficient of X^i is g_i / ||X^i||_2."""
    return HomogeneousPoly.from_orthonormal(cfg.degree, kostlan_coordinates(cfg, trial_index))


def sample_unit_sphere(cfg: SamplerConfig, trial_index: int) -> HomogeneousPoly:
    """Uniform point of the unit sphere of real H_d (Kostlan sample, L^2-normalised)."""
    u = kostlan_coordinates(cfg, trial_index)
    return HomogeneousPoly.from_orthonormal(cfg.degree, u / np.linalg.norm(u))


def _check_unit(v: HomogeneousPoly) -> np.ndarray:
    nrm = l2_norm_sq(v)
    if abs(math.sqrt(nrm) - 1.0) > 1e-10:
        raise ValueError(f"hyperplane normal must have unit L2 norm (got {math.sqrt(nrm):.3e})")
    return v.orthonormal_dense()


def project_out(u: np.ndarray, vu: np.ndarray) -> np.ndarray:
    """Remove the component along the unit vector ``vu`` from each column of ``u``."""
    return u - np.outer(vu, vu.conj() @ u) if u.ndim == 2 else u - (vu.conj() @ u) * vu


def sample_in_hyperplane(cfg: SamplerConfig, v: HomogeneousPoly, trial_index: int) -> HomogeneousPoly:
    """Kostlan sample projected onto the hyperplane <v>^perp (v real, unit)."""
    if v.degree != cfg.degree:
        raise ValueError("normal vector degree differs from sampler degree")
    vu = _check_unit(v)
    u = project_out(kostlan_coordinates(cfg, trial_index), vu)
    return HomogeneousPoly.from_orthonormal(cfg.degree, u)


# -- univariate ensemble --------------------------------------------------

@dataclass(frozen=True)
class UnivariatePoly:
    """a_0 + a_1 x + ... + a_d x^d; ``degree`` is nominal."""

    degree: int
    coeffs: tuple[float, ...]

    def __call__(self, x):
        return np.polynomial.polynomial.polyval(x, np.asarray(self.coeffs))


def sample_univariate_kostlan(d: int, rng: np.random.Generator) -> UnivariatePoly:
    """Coefficients independent centred Gaussians with Var(a_k) = C(d, k)."""
    if d < 1:
        raise ValueError("degree must be >= 1")
    scale = np.sqrt([math.comb(d, k) for k in range(d + 1)])
    return UnivariatePoly(d, tuple(float(c) for c in scale * rng.standard_normal(d + 1)))


class RootCount(NamedTuple):
    count: int
    flagged: bool


def _sign_at(c: np.ndarray, x: float) -> float:
    """Sign of sum c_k x^k without overflow (reverse the polynomial for |x| > 1)."""
    if abs(x) <= 1.0:
        return float(np.sign(np.polynomial.polynomial.polyval(x, c)))
    n = len(c) - 1
    q = np.polynomial.polynomial.polyval(1.0 / x, c[::-1])
    return float(np.sign(q) * (np.sign(x) ** n))


def _exact_count(c: np.ndarray) -> int:
    import sympy

    x = sympy.Symbol("x")
    poly = sympy.Poly([sympy.Rational(float(v)) for v in c[::-1]], x)
    return int(sum(1 for _ in sympy.real_roots(poly.sqf_part(), multiple=True)))


def count_real_roots(p: UnivariatePoly | np.ndarray, return_flag: bool = False):
    """Number of distinct real roots.

    Companion-matrix eigenvalues (LAPACK balances the matrix) with real roots
    those satisfying |Im| <= 1e-8 (1 + |lambda|).  The count is confirmed by the
    sign pattern of p between consecutive candidate roots; if that fails, or
    a complex pair sits suspiciously close to the axis, the count falls back
    to an exact Sturm count over the rationals and the result is flagged.
    """
    c = np.asarray(p.coeffs if isinstance(p, UnivariatePoly) else p, dtype=float)
    nz = np.flatnonzero(c)
    if nz.size == 0:
        raise ValueError("identically zero polynomial has infinitely many roots")
    c = c[: nz[-1] + 1]
    zero_root = 0
    if nz[0] > 0:
        zero_root = 1
        c = c[nz[0]:]
    if c.size == 1:
        res = RootCount(zero_root, False)
        return res if return_flag else res.count
    lam = np.roots(c[::-1])
    tol = 1e-8 * (1.0 + np.abs(lam))
    real_mask = np.abs(lam.imag) <= tol
    cand = np.sort(lam.real[real_mask])
    suspicious = np.any((~real_mask) & (np.abs(lam.imag) <= 1e-5 * (1.0 + np.abs(lam))))
    ok = not suspicious
    if ok and cand.size:
        gaps = np.diff(cand)
        if np.any(gaps <= 1e-12 * (1.0 + np.abs(cand[1:]))):
            ok = False
        else:
            pad = max(1.0, float(np.max(np.abs(cand))))
            tests = np.concatenate([[cand[0] - pad], 0.5 * (cand[1:] + cand[:-1]), [cand[-1] + pad]])
            signs = np.array([_sign_at(c, t) for t in tests])
            ok = bool(np.all(signs != 0) and np.all(signs[1:] != signs[:-1]))
    if ok:
        res = RootCount(int(cand.size) + zero_root, False)
    else:
        res = RootCount(_exact_count(c) + zero_root, True)
    return res if return_flag else res.count


__all__ = [
    "SamplerConfig",
    "UnivariatePoly",
    "RootCount",
    "trial_rng",
    "kostlan_coordinates",
    "sample_kostlan",
    "sample_unit_sphere",
    "sample_in_hyperplane",
    "project_out",
    "sample_univariate_kostlan",
    "count_real_roots",
    "STREAM_MAIN",
    "STREAM_HYPERPLANE",
    "STREAM_AUX",
]
