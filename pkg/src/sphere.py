"""
Spherical-harmonic fields on S^2.

Coefficients are stored flat in n-major order, m ascending:
index(n, m) = n*n + n + m. Harmonics are orthonormal for the standard
surface measure with Y_nm = (-1)^m * P_nm(cos t) e^{i m phi} (m > 0) and
Y_{n,-m} = P_nm(cos t) e^{-i m phi}, where P_nm is the fully normalized
associated Legendre function. A real field then satisfies
c_{n,-m} = (-1)^m conj(c_{n,m}).
"""

import json
import logging
import math
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Dict, Iterable, Iterator, List, Optional, Sequence, Tuple, Union

import numpy as np
from scipy import special

from src.config import config
from src.dispersion import require_modes
from src.parallel import chunked, parallel_map

logger = logging.getLogger(__name__)

Order = Union[int, str]

SQRT_4PI_INV = 1.0 / math.sqrt(4.0 * math.pi)
ROW_BLOCK = 128


def field_index(n: int, m: int) -> int:
    return n * n + n + m


def field_size(n_max: int) -> int:
    return (n_max + 1) ** 2


def degrees(n_max: int) -> np.ndarray:
    """Degree n of every flat index."""
    n = np.arange(n_max + 1)
    return np.repeat(n, 2 * n + 1)


def orders(n_max: int) -> np.ndarray:
    """Order m of every flat index."""
    return np.concatenate([np.arange(-n, n + 1) for n in range(n_max + 1)])


@dataclass
class SphericalField:
    n_max: int
    coeffs: np.ndarray
    real: bool = False

    def __post_init__(self):
        require_modes(self.n_max)
        self.coeffs = np.asarray(self.coeffs, dtype=np.complex128)
        if self.coeffs.shape != (field_size(self.n_max),):
            raise ValueError(f"expected {field_size(self.n_max)} coefficients for n_max={self.n_max}, "
                             f"got shape {self.coeffs.shape}")

    @classmethod
    def zeros(cls, n_max: int, real: bool = False) -> "SphericalField":
        return cls(n_max, np.zeros(field_size(n_max), dtype=np.complex128), real)

    def copy(self) -> "SphericalField":
        return replace(self, coeffs=self.coeffs.copy())

    def with_coeffs(self, coeffs: np.ndarray, real: Optional[bool] = None) -> "SphericalField":
        return SphericalField(self.n_max, coeffs, self.real if real is None else real)

    def coefficient(self, n: int, m: int) -> complex:
        return complex(self.coeffs[field_index(n, m)])

    def is_conjugate_symmetric(self, tol: float = 1e-12) -> bool:
        m = orders(self.n_max)
        n = degrees(self.n_max)
        mirror = self.coeffs[n * n + n - m]
        expected = np.where(m % 2, -1.0, 1.0) * np.conj(self.coeffs)
        scale = max(1.0, float(np.max(np.abs(self.coeffs), initial=0.0)))
        return bool(np.all(np.abs(mirror - expected) <= tol * scale))

    def __add__(self, other: "SphericalField") -> "SphericalField":
        if other.n_max != self.n_max:
            raise ValueError(f"n_max mismatch: {self.n_max} vs {other.n_max}")
        return SphericalField(self.n_max, self.coeffs + other.coeffs, self.real and other.real)

    def scaled(self, factor: complex) -> "SphericalField":
        real = self.real and complex(factor).imag == 0
        return SphericalField(self.n_max, self.coeffs * factor, real)


@dataclass(frozen=True)
class SphereGrid:
    """Gauss-Legendre nodes in cos(colatitude) times equispaced longitudes."""
    L: int
    M: int
    x: np.ndarray = field(repr=False, compare=False)
    weights: np.ndarray = field(repr=False, compare=False)

    @classmethod
    def create(cls, L: int, M: int) -> "SphereGrid":
        if L < 1 or M < 1:
            raise ValueError(f"grid sizes must be positive, got L={L}, M={M}")
        x, w = np.polynomial.legendre.leggauss(L)
        return cls(L, M, x, w)

    @classmethod
    def for_degree(cls, n_max: int, q: int = 2) -> "SphereGrid":
        """Grid exact for |f|**q with f of degree n_max (q even)."""
        return cls.create(q * n_max // 2 + 2, q * n_max + 1)

    @property
    def theta(self) -> np.ndarray:
        return np.arccos(self.x)

    @property
    def phi(self) -> np.ndarray:
        return 2.0 * np.pi * np.arange(self.M) / self.M

    def resolves(self, degree: int) -> bool:
        """True when the quadrature integrates polynomials of total degree `degree` exactly."""
        return 2 * self.L - 1 >= degree and self.M >= degree + 1

    def integrate(self, values: np.ndarray) -> complex:
        return complex(np.sum(self.weights[:, None] * values) * (2.0 * np.pi / self.M))


def _phase(m: int) -> float:
    return -1.0 if m > 0 and m % 2 else 1.0


def legendre_by_order(x: np.ndarray, n_max: int, wanted: Iterable[int]) -> Iterator[Tuple[int, np.ndarray]]:
    """Yield (m, P) with P[n - m] = fully normalized P_nm(x), n = m..n_max."""
    x = np.asarray(x, dtype=np.float64)
    s = np.sqrt(np.clip(1.0 - x * x, 0.0, None))
    pmm = np.full_like(x, SQRT_4PI_INV)
    current = 0
    for m in sorted(set(wanted)):
        while current < m:
            current += 1
            pmm = math.sqrt((2 * current + 1) / (2 * current)) * s * pmm
        P = np.empty((n_max - m + 1, x.size))
        P[0] = pmm
        if n_max > m:
            P[1] = math.sqrt(2 * m + 3) * x * pmm
        for n in range(m + 2, n_max + 1):
            a = math.sqrt((4 * n * n - 1) / (n * n - m * m))
            b = math.sqrt(((n - 1) ** 2 - m * m) / (4 * (n - 1) ** 2 - 1))
            P[n - m] = a * (x * P[n - m - 1] - b * P[n - m - 2])
        yield m, P


def _active_orders(f: SphericalField) -> List[int]:
    m = np.abs(orders(f.n_max))
    return sorted(set(m[f.coeffs != 0].tolist()))


def _block_indices(n_max: int, m: int) -> np.ndarray:
    n = np.arange(abs(m), n_max + 1)
    return n * n + n + m


class LegendreTable:
    """All P_nm on a grid's nodes, for repeated synthesis at moderate n_max."""

    def __init__(self, grid: SphereGrid, n_max: int):
        self.n_max = n_max
        self.L = grid.L
        self.blocks: Dict[int, np.ndarray] = dict(legendre_by_order(grid.x, n_max, range(n_max + 1)))

    def items(self, wanted: Iterable[int]) -> Iterator[Tuple[int, np.ndarray]]:
        for m in sorted(set(wanted)):
            yield m, self.blocks[m]


def _synthesize_blocks(coeffs: np.ndarray, n_max: int, blocks, rows: int, M: int) -> np.ndarray:
    """Values of a batch of fields (coeffs shape (B, size)) as (B, rows, M)."""
    G = np.zeros((coeffs.shape[0], rows, M), dtype=np.complex128)
    for m, P in blocks:
        for signed in ((m, -m) if m else (0,)):
            c = coeffs[:, _block_indices(n_max, signed)] * _phase(signed)
            G[:, :, signed % M] += c @ P
    return M * np.fft.ifft(G, axis=2)


def _check_resolution(n_max: int, grid: SphereGrid):
    if grid.L < n_max + 1 or grid.M < 2 * n_max + 1:
        raise ValueError(f"grid L={grid.L}, M={grid.M} too coarse for n_max={n_max}")


def synthesize(f: SphericalField, grid: SphereGrid, threads: Optional[int] = None,
               table: Optional[LegendreTable] = None) -> np.ndarray:
    """Field values on the grid, shape (L, M)."""
    _check_resolution(f.n_max, grid)
    active = _active_orders(f)
    if not active:
        return np.zeros((grid.L, grid.M), dtype=np.complex128)
    if table is not None:
        return _synthesize_blocks(f.coeffs[None, :], f.n_max, table.items(active), grid.L, grid.M)[0]
    rows = chunked(np.arange(grid.L), ROW_BLOCK)
    parts = parallel_map(
        lambda r: _synthesize_blocks(f.coeffs[None, :], f.n_max,
                                     legendre_by_order(grid.x[r], f.n_max, active), len(r), grid.M)[0],
        rows, threads)
    return np.vstack(parts)


def synthesize_batch(coeffs: np.ndarray, n_max: int, grid: SphereGrid, table: LegendreTable) -> np.ndarray:
    """Values of many fields sharing n_max, shape (B, L, M)."""
    _check_resolution(n_max, grid)
    coeffs = np.atleast_2d(np.asarray(coeffs, dtype=np.complex128))
    m = np.abs(orders(n_max))
    active = sorted(set(m[np.any(coeffs != 0, axis=0)].tolist()))
    if not active:
        return np.zeros((coeffs.shape[0], grid.L, grid.M), dtype=np.complex128)
    return _synthesize_blocks(coeffs, n_max, table.items(active), grid.L, grid.M)


def analyze(values: np.ndarray, grid: SphereGrid, n_max: int, real: bool = False) -> SphericalField:
    """Coefficients up to n_max from grid values (exact for band-limited input)."""
    if values.shape != (grid.L, grid.M):
        raise ValueError(f"values shape {values.shape} does not match grid ({grid.L}, {grid.M})")
    _check_resolution(n_max, grid)
    G = np.fft.fft(values, axis=1) / grid.M
    coeffs = np.zeros(field_size(n_max), dtype=np.complex128)
    for m, P in legendre_by_order(grid.x, n_max, range(n_max + 1)):
        for signed in ((m, -m) if m else (0,)):
            column = grid.weights * G[:, signed % grid.M]
            coeffs[_block_indices(n_max, signed)] = _phase(signed) * 2.0 * np.pi * (P @ column)
    return SphericalField(n_max, coeffs, real)


def evaluate(f: SphericalField, theta, phi) -> np.ndarray:
    """Point values at colatitudes theta and longitudes phi (broadcast together)."""
    theta, phi = np.broadcast_arrays(np.asarray(theta, dtype=np.float64), np.asarray(phi, dtype=np.float64))
    x = np.cos(theta).ravel()
    values = np.zeros(x.size, dtype=np.complex128)
    for m, P in legendre_by_order(x, f.n_max, _active_orders(f)):
        for signed in ((m, -m) if m else (0,)):
            c = f.coeffs[_block_indices(f.n_max, signed)] * _phase(signed)
            values += (c @ P) * np.exp(1j * signed * phi.ravel())
    return values.reshape(theta.shape)


def norm_Lq_batch(values: np.ndarray, grid: SphereGrid, q: int) -> np.ndarray:
    """L^q norms of a (B, L, M) stack of grid values."""
    weighted = grid.weights[None, :, None] * np.abs(values) ** q
    return (np.sum(weighted, axis=(1, 2)) * (2.0 * np.pi / grid.M)) ** (1.0 / q)


def project(f: SphericalField, n: int, which: str = "single") -> SphericalField:
    """Orthogonal projection onto degree n ('single'), degrees <= n ('le') or >= n ('ge')."""
    require_modes(n)
    if n > f.n_max:
        raise ValueError(f"degree {n} exceeds n_max={f.n_max}")
    deg = degrees(f.n_max)
    if which == "single":
        mask = deg == n
    elif which == "le":
        mask = deg <= n
    elif which == "ge":
        mask = deg >= n
    else:
        raise ValueError(f"projection must be 'single', 'le' or 'ge', got {which!r}")
    return f.with_coeffs(np.where(mask, f.coeffs, 0.0))


def _single_mode(n: int, m: int, n_max: int, real: bool) -> SphericalField:
    require_modes(n)
    if n > n_max:
        raise ValueError(f"degree {n} exceeds n_max={n_max}")
    f = SphericalField.zeros(n_max, real)
    f.coeffs[field_index(n, m)] = 1.0
    return f


def zonal(n: int, n_max: Optional[int] = None) -> SphericalField:
    """Normalized axially symmetric harmonic of degree n."""
    return _single_mode(n, 0, n if n_max is None else n_max, real=True)


def highest_weight(n: int, n_max: Optional[int] = None) -> SphericalField:
    """The mode c_{n,n} = 1, proportional to sin(t)**n e^{i n phi}."""
    return _single_mode(n, n, n if n_max is None else n_max, real=False)


def l2_norm(f: SphericalField) -> float:
    return float(np.sqrt(np.sum(np.abs(f.coeffs) ** 2)))


def norm_sobolev(f: SphericalField, s: float) -> float:
    n = degrees(f.n_max).astype(np.float64)
    weight = (1.0 + n * (n + 1.0)) ** s
    return float(np.sqrt(np.sum(weight * np.abs(f.coeffs) ** 2)))


def _linf(f: SphericalField, threads: Optional[int]) -> float:
    refinement = config.get("sphere", "linf_refinement", default=4)
    grid = SphereGrid.for_degree(max(f.n_max, 1), 2 * refinement)
    values = np.abs(synthesize(f, grid, threads))
    poles = np.abs(evaluate(f, np.array([0.0, np.pi]), np.zeros(2)))
    return float(max(values.max(initial=0.0), poles.max()))


def norm_Lq(f: SphericalField, q: Order, grid: Optional[SphereGrid] = None,
            threads: Optional[int] = None) -> float:
    """L^q norm for even q (exact quadrature) or q = 'inf' (refined sampling)."""
    if q in ("inf", math.inf):
        return _linf(f, threads)
    if int(q) != q or q < 2 or q % 2:
        raise ValueError(f"q must be an even integer >= 2 or 'inf', got {q!r}")
    q = int(q)
    if grid is None:
        grid = SphereGrid.for_degree(f.n_max, q)
    elif not grid.resolves(q * f.n_max):
        raise ValueError(f"grid L={grid.L}, M={grid.M} does not resolve degree {q * f.n_max}")
    values = synthesize(f, grid, threads)
    return float(grid.integrate(np.abs(values) ** q).real ** (1.0 / q))


def random_field(n_max: int, rng: np.random.Generator, s: float = 0.0, real: bool = False,
                 min_degree: int = 0) -> SphericalField:
    """Mode-wise complex Gaussian coefficients with flat spectrum in H^s."""
    size = field_size(n_max)
    coeffs = (rng.standard_normal(size) + 1j * rng.standard_normal(size)) / math.sqrt(2.0)
    n = degrees(n_max).astype(np.float64)
    coeffs *= (1.0 + n * (n + 1.0)) ** (-s / 2.0)
    coeffs[degrees(n_max) < min_degree] = 0.0
    if real:
        m = orders(n_max)
        coeffs[m == 0] = coeffs[m == 0].real * math.sqrt(2.0)
        positive = np.nonzero(m > 0)[0]
        mirror = positive - 2 * m[positive]
        coeffs[mirror] = np.where(m[positive] % 2, -1.0, 1.0) * np.conj(coeffs[positive])
    return SphericalField(n_max, coeffs, real)


def sogge_exponent(q: Order, d: int = 2, variant: str = "standard") -> float:
    """Spectral-projection growth exponent s(q) on the d-sphere."""
    if q in ("inf", math.inf):
        return (d - 1) / 2
    q = float(q)
    if q < 2:
        raise ValueError(f"q must be >= 2, got {q}")
    critical = 2 * (d + 1) / (d - 1)
    if q > critical:
        return (d - 1) / 2 - d / q
    if variant == "standard":
        return (d - 1) / 2 * (0.5 - 1 / q)
    if variant == "as_printed":
        return (d - 1) / 2 * (0.5 - 1 / (2 * q))
    raise ValueError(f"variant must be 'standard' or 'as_printed', got {variant!r}")


def highest_weight_lq_closed_form(k: int, q: int) -> float:
    """||Y_kk||_q from the Beta integrals of sin(t)**j over [0, pi]."""
    require_modes(k)
    # |c_k|**2 * 2 pi * B(1/2, k + 1) = 1
    log_c2 = -math.log(2 * math.pi) - special.betaln(0.5, k + 1)
    log_int = (q / 2) * log_c2 + math.log(2 * math.pi) + special.betaln(0.5, q * k / 2 + 1)
    return math.exp(log_int / q)


FAMILIES = {"zonal": zonal, "highest_weight": highest_weight}


def sogge_regression(family: str, q: Order, ks: Sequence[int], threads: Optional[int] = None) -> Dict:
    """Log-log slope of ||h_k||_q / ||h_k||_2 against k for a harmonic family."""
    if family not in FAMILIES:
        raise ValueError(f"family must be one of {sorted(FAMILIES)}, got {family!r}")
    if len(ks) < 2:
        raise ValueError("sogge_regression needs at least two degrees")
    ratios = []
    for k in ks:
        f = FAMILIES[family](int(k))
        ratio = norm_Lq(f, q, threads=threads) / l2_norm(f)
        ratios.append(ratio)
        logger.info(f"[SPHERE] {family} k={k} q={q}: ratio {ratio:.6g}")
    slope, intercept = np.polyfit(np.log(np.asarray(ks, dtype=np.float64)), np.log(ratios), 1)
    report = {
        "family": family,
        "q": "inf" if q in ("inf", math.inf) else int(q),
        "ks": [int(k) for k in ks],
        "ratios": [float(r) for r in ratios],
        "slope": float(slope),
        "intercept": float(intercept),
        "exponent_standard": sogge_exponent(q),
        "exponent_as_printed": sogge_exponent(q, variant="as_printed"),
    }
    if q in ("inf", math.inf):
        report["caveat"] = "L^inf is a maximum over a refined grid plus both poles"
    return report


def field_to_records(f: SphericalField) -> List[List]:
    """[n, m, re, im] rows in storage order."""
    n = degrees(f.n_max)
    m = orders(f.n_max)
    return [[int(a), int(b), float(c.real), float(c.imag)] for a, b, c in zip(n, m, f.coeffs)]


def field_from_records(records: Sequence[Sequence], n_max: Optional[int] = None,
                       real: bool = False) -> SphericalField:
    if n_max is None:
        n_max = max((int(r[0]) for r in records), default=0)
    f = SphericalField.zeros(n_max, real)
    for n, m, re, im in records:
        if abs(m) > n or n > n_max:
            raise ValueError(f"invalid record (n={n}, m={m}) for n_max={n_max}")
        f.coeffs[field_index(int(n), int(m))] = complex(re, im)
    return f


def save_field(f: SphericalField, path: Union[str, Path]):
    """Write a field as .npy (flat complex array) or .json records."""
    path = Path(path)
    if path.suffix == ".npy":
        np.save(path, f.coeffs)
    else:
        with open(path, "w", encoding="utf-8") as fh:
            json.dump({"n_max": f.n_max, "real": f.real, "records": field_to_records(f)}, fh)


def load_field(path: Union[str, Path]) -> SphericalField:
    path = Path(path)
    if path.suffix == ".npy":
        coeffs = np.load(path)
        n_max = math.isqrt(coeffs.size) - 1
        f = SphericalField(n_max, coeffs)
        f.real = f.is_conjugate_symmetric()
        return f
    with open(path, "r", encoding="utf-8") as fh:
        data = json.load(fh)
    return field_from_records(data["records"], data["n_max"], data.get("real", False))
