"""Numerical laboratory for random real plane curves.

Kostlan random polynomials on the projective plane, Fubini-Study norms,
Chebyshev-based reference curves, barrier-method bounds and Monte Carlo
experiments on components, nests and separation.
"""

__version__ = "0.1.0"
