"""
Dispersion relation and spectral multipliers of the linearized droplet flow.

Degree-n spherical harmonics oscillate with frequency
Lambda(n) = sqrt(F(n)), F(n) = n(n-1)(n+2). Decisions use the integer F(n);
the float Lambda(n) is for simulation and presentation only.
"""

import math
from enum import Enum

import numpy as np

ModeIndex = int


class MultiplierKind(Enum):
    DirichletNeumann = "dirichlet_neumann"
    CurvatureLinearization = "curvature_linearization"
    Lambda = "lambda"
    Laplacian = "laplacian"


def require_modes(*ns: int, minimum: int = 0):
    """Reject degrees below `minimum` (2 for oscillatory modes)."""
    for n in ns:
        if int(n) != n or n < minimum:
            raise ValueError(f"mode index must be an integer >= {minimum}, got {n}")


def F(n: ModeIndex) -> int:
    """Exact n(n-1)(n+2)."""
    require_modes(n)
    return n * (n - 1) * (n + 2)


def lam(n: ModeIndex) -> float:
    """Frequency Lambda(n) = sqrt(F(n)) as a double."""
    return math.sqrt(F(n))


def F_array(n_max: int) -> np.ndarray:
    """F(0..n_max) as int64 (exact for n_max <= 2*10**6)."""
    n = np.arange(n_max + 1, dtype=np.int64)
    return n * (n - 1) * (n + 2)


def lam_array(n_max: int) -> np.ndarray:
    """Lambda(0..n_max) as float64."""
    n = np.arange(n_max + 1, dtype=np.float64)
    return np.sqrt(n * (n - 1.0) * (n + 2.0))


def multiplier(kind: MultiplierKind, n: ModeIndex) -> float:
    """Eigenvalue of the operator `kind` on degree-n harmonics."""
    require_modes(n)
    if kind is MultiplierKind.DirichletNeumann:
        return float(n)
    if kind is MultiplierKind.CurvatureLinearization:
        return float(-(n - 1) * (n + 2))
    if kind is MultiplierKind.Laplacian:
        return float(-n * (n + 1))
    if kind is MultiplierKind.Lambda:
        return lam(n)
    raise ValueError(f"unknown multiplier kind {kind!r}")
