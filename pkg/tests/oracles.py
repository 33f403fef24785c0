"""Independent reference computations used by the tests.

Nothing here calls the package's evaluation or norm code: monomial norms are
integrated in the affine chart, polynomials are evaluated term by term in
exact or plain floating arithmetic, regions are counted with an image
labeller.
"""

from __future__ import annotations

import math
from fractions import Fraction

import numpy as np
from scipy import integrate, ndimage
from scipy.stats import norm, qmc


def fs_uniform_chart_points(n: int, seed: int = 0) -> np.ndarray:
    """Affine points z in C^2 (shape (n, 2) complex), FS-uniformly distributed.

    A scrambled Sobol sequence is pushed through the Gaussian inverse CDF to
    get a standard complex Gaussian vector in C^3 (uniform direction), which is
    then dehomogenised by its first coordinate.
    """
    u = qmc.Sobol(6, scramble=True, seed=seed).random(n)
    g = norm.ppf(np.clip(u, 1e-15, 1 - 1e-15))
    x = g[:, :3] + 1j * g[:, 3:]
    return x[:, 1:] / x[:, :1]


def chart_norm_sq_mc(i: tuple[int, int, int], z: np.ndarray) -> float:
    """(1/Vol) int |z^i|^2 / (1+|z|^2)^d dVol_FS by averaging over FS-uniform z."""
    d = sum(i)
    w = np.abs(z[:, 0]) ** (2 * i[1]) * np.abs(z[:, 1]) ** (2 * i[2])
    return float(np.mean(w / (1.0 + np.sum(np.abs(z) ** 2, axis=1)) ** d))


def monomial_norm_sq_exact(i) -> Fraction:
    """i0! i1! i2! 2 / (d+2)! in exact arithmetic."""
    d = sum(i)
    return Fraction(math.factorial(i[0]) * math.factorial(i[1]) * math.factorial(i[2]) * 2,
                    math.factorial(d + 2))


def eval_terms(terms: dict, x) -> complex:
    """Plain term-by-term evaluation of sum c_i x^i."""
    x0, x1, x2 = x
    return sum(c * x0**a * x1**b * x2**e for (a, b, e), c in terms.items())


def fs_ball_volume_quad(rho: float) -> float:
    """Vol of an FS ball from the chart density (1+|z|^2)^-3 on R^4."""
    R = math.tan(rho)
    val, _ = integrate.quad(lambda r: 2 * math.pi**2 * r**3 / (1 + r * r) ** 3, 0, R)
    return val


def ball_average_radial(d: int, R: float, profile) -> float:
    """Ball average of a radial function of |z| (affine radius R), by quadrature
    of the FS density in R^4 polar coordinates."""
    w = lambda r: r**3 / (1 + r * r) ** 3
    num, _ = integrate.quad(lambda r: profile(r) * w(r), 0, R, epsabs=0, epsrel=1e-12, limit=200)
    den, _ = integrate.quad(w, 0, R, epsabs=0, epsrel=1e-12, limit=200)
    return num / den


def count_sign_regions(values: np.ndarray, mask: np.ndarray) -> int:
    """Number of 4-connected same-sign regions of a gridded function inside mask."""
    pos, _ = ndimage.label((values >= 0) & mask)
    neg, _ = ndimage.label((values < 0) & mask)
    return int(pos.max() + neg.max())


def chebyshev_power_basis(n: int) -> list[int]:
    """Coefficients of T_n from the explicit sum formula (exact integers)."""
    out = [0] * (n + 1)
    if n == 0:
        out[0] = 1
        return out
    for k in range(n // 2 + 1):
        # T_n(x) = n/2 sum_k (-1)^k (n-k-1)! / (k! (n-2k)!) (2x)^(n-2k)
        num = Fraction(n, 2) * (-1) ** k * math.factorial(n - k - 1)
        c = num / (math.factorial(k) * math.factorial(n - 2 * k)) * 2 ** (n - 2 * k)
        assert c.denominator == 1
        out[n - 2 * k] = int(c)
    return out


def inside_circle(z: np.ndarray, r: float) -> np.ndarray:
    return np.sum(np.asarray(z) ** 2, axis=-1) < r * r
