"""
Linearized capillary droplet flow on the unit sphere.

The state (zeta, phi) packs into one complex field u whose modes rotate
with frequency Lambda(n): du/dt + i Lambda u = 0. Degrees 0 and 1 carry no
oscillation (Lambda(0) = Lambda(1) = 0) and are constrained to vanish in u.
"""

import logging
import math
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence

import numpy as np
from scipy import integrate

from src.config import config
from src.dispersion import lam, lam_array
from src.parallel import parallel_map
from src.sphere import (
    LegendreTable,
    SphereGrid,
    SphericalField,
    degrees,
    field_index,
    highest_weight,
    l2_norm,
    norm_Lq,
    norm_Lq_batch,
    norm_sobolev,
    orders,
    random_field,
    synthesize,
    synthesize_batch,
    zonal,
)

logger = logging.getLogger(__name__)

TIME_BLOCK = 32


class ResolutionError(RuntimeError):
    """Time or space sampling too coarse for the requested accuracy."""


class DecomposeError(ValueError):
    """u has degree-0 or degree-1 content, so (zeta, phi) cannot be recovered."""


@dataclass
class SurfaceState:
    zeta: SphericalField
    phi: SphericalField

    def __post_init__(self):
        if self.zeta.n_max != self.phi.n_max:
            raise ValueError(f"zeta and phi n_max differ: {self.zeta.n_max} vs {self.phi.n_max}")
        if not (self.zeta.real and self.phi.real):
            raise ValueError("zeta and phi must be real fields")
        if abs(self.phi.coeffs[0]) > _tolerance() * max(1.0, l2_norm(self.phi)):
            raise ValueError(f"phi must have no degree-0 component, got {self.phi.coeffs[0]}")

    @property
    def n_max(self) -> int:
        return self.zeta.n_max

    @classmethod
    def zeros(cls, n_max: int) -> "SurfaceState":
        return cls(SphericalField.zeros(n_max, real=True), SphericalField.zeros(n_max, real=True))


@dataclass
class ComplexState:
    u: SphericalField

    @property
    def n_max(self) -> int:
        return self.u.n_max


def _tolerance() -> float:
    return config.get("evolution", "decompose_tolerance", default=1e-12)


def mode_weights(n_max: int):
    """(w_zeta, w_phi) per flat index."""
    n = degrees(n_max).astype(np.float64)
    w_zeta = np.where(n >= 2, np.sqrt(np.clip((n - 1.0) * (n + 2.0), 0.0, None)), 1.0)
    w_phi = np.sqrt(n)
    return w_zeta, w_phi


def _mirror(coeffs: np.ndarray, n_max: int) -> np.ndarray:
    """(-1)^m conj(c_{n,-m}) at every index."""
    n = degrees(n_max)
    m = orders(n_max)
    return np.where(m % 2, -1.0, 1.0) * np.conj(coeffs[n * n + n - m])


def assemble(state: SurfaceState) -> ComplexState:
    w_zeta, w_phi = mode_weights(state.n_max)
    u = w_zeta * state.zeta.coeffs + 1j * w_phi * state.phi.coeffs
    return ComplexState(SphericalField(state.n_max, u))


def decompose(state: ComplexState, tol: Optional[float] = None) -> SurfaceState:
    """Inverse of assemble on fields without degree-0 and degree-1 content."""
    tol = _tolerance() if tol is None else tol
    n_max = state.n_max
    u = state.u.coeffs
    low = np.abs(u[:min(4, u.size)])
    if low.size and low.max() > tol * max(1.0, l2_norm(state.u)):
        raise DecomposeError(f"u has degree 0/1 content of size {low.max():.3e}")
    w_zeta, w_phi = mode_weights(n_max)
    mirror = _mirror(u, n_max)
    high = degrees(n_max) >= 2
    zeta = np.where(high, (u + mirror) / (2.0 * w_zeta), 0.0)
    phi = np.zeros_like(u)
    phi[high] = (u[high] - mirror[high]) / (2j * w_phi[high])
    return SurfaceState(SphericalField(n_max, zeta, real=True), SphericalField(n_max, phi, real=True))


def _frequencies(n_max: int) -> np.ndarray:
    return lam_array(n_max)[degrees(n_max)]


def evolve(state: ComplexState, t: float) -> ComplexState:
    """Exact propagator u -> exp(-i Lambda t) u."""
    phase = np.exp(-1j * _frequencies(state.n_max) * t)
    return ComplexState(SphericalField(state.n_max, phase * state.u.coeffs))


def evolve_ode(state: SurfaceState, t: float, dt: float) -> SurfaceState:
    """Classic RK4 on zeta' = n phi, phi' = -(n-1)(n+2) zeta for n >= 2.

    Degrees 0 and 1 are held fixed, matching the exact propagator.
    """
    if dt <= 0:
        raise ValueError(f"dt must be positive, got {dt}")
    n_max = state.n_max
    steps = max(1, int(round(abs(t) / dt)))
    h = t / steps
    if lam(n_max) * abs(h) >= 2.8:
        raise ResolutionError(f"RK4 step {h:g} unstable for Lambda({n_max}) = {lam(n_max):.4g}")

    n = degrees(n_max).astype(np.float64)
    active = n >= 2
    k_zeta = np.where(active, n, 0.0)
    k_phi = np.where(active, -(n - 1.0) * (n + 2.0), 0.0)

    def rhs(z, p):
        return k_zeta * p, k_phi * z

    z = state.zeta.coeffs.copy()
    p = state.phi.coeffs.copy()
    for _ in range(steps):
        a_z, a_p = rhs(z, p)
        b_z, b_p = rhs(z + 0.5 * h * a_z, p + 0.5 * h * a_p)
        c_z, c_p = rhs(z + 0.5 * h * b_z, p + 0.5 * h * b_p)
        d_z, d_p = rhs(z + h * c_z, p + h * c_p)
        z = z + h / 6.0 * (a_z + 2 * b_z + 2 * c_z + d_z)
        p = p + h / 6.0 * (a_p + 2 * b_p + 2 * c_p + d_p)
    return SurfaceState(SphericalField(n_max, z, real=True), SphericalField(n_max, p, real=True))


def energy2(state: SurfaceState) -> float:
    """1/2 sum_{n>=2} [(n-1)(n+2)|zeta|^2 + n|phi|^2]."""
    n = degrees(state.n_max).astype(np.float64)
    high = n >= 2
    terms = (n - 1.0) * (n + 2.0) * np.abs(state.zeta.coeffs) ** 2 + n * np.abs(state.phi.coeffs) ** 2
    return float(0.5 * np.sum(terms[high]))


def hamiltonian_quadratic(state: SurfaceState) -> float:
    """Quadratic surface energy written with +2|zeta|^2 and the area expansion terms.

    4 pi + 2 int(zeta) + 1/2 int(|grad zeta|^2 + 2|zeta|^2) + 1/2 int(phi |D| phi)
    in spectral form; not conserved by the linear flow.
    """
    n = degrees(state.n_max).astype(np.float64)
    zeta2 = np.abs(state.zeta.coeffs) ** 2
    phi2 = np.abs(state.phi.coeffs) ** 2
    mean = math.sqrt(4.0 * math.pi) * state.zeta.coeffs[0].real
    return float(4.0 * math.pi + 2.0 * mean + 0.5 * np.sum((n * (n + 1.0) + 2.0) * zeta2) + 0.5 * np.sum(n * phi2))


def _surface_values(field: SphericalField, grid: SphereGrid) -> np.ndarray:
    return synthesize(field, grid).real


def volume_residual(state: SurfaceState) -> float:
    """(1/3) int (1 + zeta)^3 dmu - 4 pi / 3."""
    grid = SphereGrid.for_degree(max(state.n_max, 1), 4)
    r = 1.0 + _surface_values(state.zeta, grid)
    return float(grid.integrate(r ** 3).real / 3.0 - 4.0 * math.pi / 3.0)


def center_of_mass_residual(state: SurfaceState) -> List[float]:
    """int (1 + zeta)^4 N dmu with N the outward unit normal of the unit sphere."""
    grid = SphereGrid.for_degree(state.n_max + 1, 4)
    r4 = (1.0 + _surface_values(state.zeta, grid)) ** 4
    sin_t = np.sqrt(1.0 - grid.x ** 2)[:, None]
    phi = grid.phi[None, :]
    normal = (sin_t * np.cos(phi), sin_t * np.sin(phi), grid.x[:, None] * np.ones_like(phi))
    return [float(grid.integrate(r4 * component).real) for component in normal]


def random_state(n_max: int, seed: int, s: float = 0.0, amplitude: float = 1.0) -> SurfaceState:
    """Seeded real state with no degree-0 or degree-1 content."""
    rng = np.random.default_rng(seed)
    zeta = random_field(n_max, rng, s=s, real=True, min_degree=2).scaled(amplitude)
    phi = random_field(n_max, rng, s=s, real=True, min_degree=2).scaled(amplitude)
    return SurfaceState(zeta, phi)


def real_highest_weight(k: int, n_max: int) -> SphericalField:
    """Real field (Y_kk + (-1)^k Y_{k,-k}) / sqrt 2, unit L2 norm."""
    f = highest_weight(k, n_max).scaled(1.0 / math.sqrt(2.0))
    f.coeffs[field_index(k, -k)] = (-1) ** k / math.sqrt(2.0)
    f.real = True
    return f


def initial_state(init: str, n_max: int) -> SurfaceState:
    """Parse zonal:k, hw:k or random:seed into a state with phi = 0 (or random)."""
    kind, _, arg = init.partition(":")
    try:
        value = int(arg)
    except ValueError:
        raise ValueError(f"initial condition must look like zonal:k, hw:k or random:seed, got {init!r}")
    if kind == "random":
        return random_state(n_max, value)
    if kind not in ("zonal", "hw"):
        raise ValueError(f"unknown initial condition kind {kind!r}")
    if value < 2 or value > n_max:
        raise ValueError(f"{kind} degree must lie in [2, n_max={n_max}], got {value}")
    zeta = zonal(value, n_max) if kind == "zonal" else real_highest_weight(value, n_max)
    return SurfaceState(zeta, SphericalField.zeros(n_max, real=True))


def time_series(u0: ComplexState, t: float, dt: float) -> List[Dict]:
    """Rows (t, L2, energy2, L4) of the exact flow at 0, dt, 2dt, ... and finally at t.

    When dt does not divide t the last step is shorter.
    """
    if dt <= 0 or t < 0:
        raise ValueError(f"need t >= 0 and dt > 0, got t={t}, dt={dt}")
    steps = int(math.floor(t / dt + 1e-9))
    times = [j * dt for j in range(steps + 1)]
    if abs(times[-1] - t) <= 1e-9 * dt:
        times[-1] = t
    else:
        times.append(t)
    grid = SphereGrid.for_degree(u0.n_max, 4)
    table = LegendreTable(grid, u0.n_max)
    rows = []
    for tj in times:
        u = evolve(u0, tj)
        rows.append({
            "t": tj,
            "L2": l2_norm(u.u),
            "energy2": energy2(decompose(u)),
            "L4": float(norm_Lq_batch(synthesize_batch(u.u.coeffs, u.n_max, grid, table), grid, 4)[0]),
        })
    return rows


def convergence_study(state: SurfaceState, t: float, dts: Sequence[float]) -> Dict:
    """RK4 error against the exact flow for each dt, and the fitted order."""
    if len(dts) < 2:
        raise ValueError("convergence_study needs at least two step sizes")
    exact = decompose(evolve(assemble(state), t))
    errors = []
    for dt in dts:
        approx = evolve_ode(state, t, dt)
        err = max(np.max(np.abs(approx.zeta.coeffs - exact.zeta.coeffs)),
                  np.max(np.abs(approx.phi.coeffs - exact.phi.coeffs)))
        errors.append(float(err))
        logger.info(f"[EVOLVE] dt={dt:g}: max mode error {err:.3e}")
    order, _ = np.polyfit(np.log(dts), np.log(errors), 1)
    drift = [abs(energy2(evolve_ode(state, t, dt)) - energy2(state)) for dt in dts]
    return {
        "t": t,
        "dts": [float(dt) for dt in dts],
        "errors": errors,
        "order": float(order),
        "energy2_drift": [float(d) for d in drift],
    }


def _required_samples(T: float, n_max: int) -> int:
    oversampling = config.get("evolution", "time_oversampling", default=32)
    return int(oversampling * max(1, math.ceil(T * lam(n_max) / (2.0 * math.pi))))


def strichartz_norm(u0: ComplexState, T: float, q: int = 4, n_t: Optional[int] = None,
                    grid: Optional[SphereGrid] = None, table: Optional[LegendreTable] = None) -> float:
    """||exp(-i t Lambda) u0||_{L^q([0,T]; L^q)} by trapezoid in t, exact quadrature in space."""
    if T <= 0:
        raise ValueError(f"T must be positive, got {T}")
    if q < 2 or q % 2:
        raise ValueError(f"q must be an even integer >= 2, got {q}")
    required = _required_samples(T, u0.n_max)
    n_t = required if n_t is None else n_t
    if n_t < required:
        raise ResolutionError(f"{n_t} time samples under-resolve T*Lambda({u0.n_max}); need >= {required}")
    if grid is None:
        grid = SphereGrid.for_degree(u0.n_max, q)
    if table is None:
        table = LegendreTable(grid, u0.n_max)

    times = np.linspace(0.0, T, n_t + 1)
    freq = _frequencies(u0.n_max)
    norms_q = np.empty(times.size)
    for start in range(0, times.size, TIME_BLOCK):
        block = times[start:start + TIME_BLOCK]
        coeffs = np.exp(-1j * np.outer(block, freq)) * u0.u.coeffs[None, :]
        values = synthesize_batch(coeffs, u0.n_max, grid, table)
        norms_q[start:start + block.size] = norm_Lq_batch(values, grid, q) ** q
    integral = integrate.trapezoid(norms_q, times)
    return float(integral ** (1.0 / q))


def band_field(N: int, n_max: int) -> SphericalField:
    """Zonal modes with Lambda(n) in [Lambda(N)/2, Lambda(N)], unit L2 norm."""
    lams = lam_array(n_max)
    f = SphericalField.zeros(n_max, real=True)
    band = [n for n in range(2, N + 1) if lams[n] >= lams[N] / 2]
    for n in band:
        f.coeffs[field_index(n, 0)] = 1.0 / math.sqrt(len(band))
    return f


def _quotient(f: SphericalField, s: float, T: float, q: int, grid: SphereGrid, table: LegendreTable) -> float:
    return strichartz_norm(ComplexState(f), T, q, grid=grid, table=table) / norm_sobolev(f, s)


def strichartz_report(s: float, q: int, T: float, n_max: int, n_samples: int = 4, seed: int = 0,
                      levels: Optional[Sequence[int]] = None, threads: Optional[int] = None) -> Dict:
    """Strichartz quotients R = ||e^{-it Lambda} f||_{L^q_T L^q} / ||f||_{H^s} across n_max levels."""
    if n_max < 2:
        raise ValueError(f"n_max must be >= 2, got {n_max}")
    if levels is None:
        levels = sorted({max(2, n_max // 4), max(2, n_max // 2), n_max})
    rows = []
    for N in levels:
        grid = SphereGrid.for_degree(N, q)
        table = LegendreTable(grid, N)
        rng = np.random.default_rng([seed, N])
        samples = [random_field(N, rng, s=s, min_degree=2) for _ in range(n_samples)]
        random_R = parallel_map(lambda f: _quotient(f, s, T, q, grid, table), samples, threads)
        row = {
            "n_max": N,
            "time_samples": _required_samples(T, N),
            "random": [float(r) for r in random_R],
            "zonal": _quotient(zonal(N, N), s, T, q, grid, table),
            "highest_weight": _quotient(highest_weight(N, N), s, T, q, grid, table),
            "band": _quotient(band_field(N, N), s, T, q, grid, table),
        }
        rows.append(row)
        logger.info(f"[EVOLVE] Strichartz n_max={N}: max random R = {max(random_R, default=0.0):.4g}")

    top = levels[-1]
    probe = ComplexState(random_field(top, np.random.default_rng([seed, top]), s=s, min_degree=2))
    coarse = strichartz_norm(probe, T, q)
    fine = strichartz_norm(probe, T, q, n_t=2 * _required_samples(T, top))
    return {
        "s": s,
        "q": q,
        "T": T,
        "seed": seed,
        "n_samples": n_samples,
        "levels": rows,
        "resolution_change": abs(fine - coarse) / coarse if coarse else 0.0,
    }


def single_mode_identity(n: int, m: int, n_max: int, T: float, q: int = 4) -> Dict:
    """Compare ||e^{-it Lambda} f||_{L^q_T L^q} with T^{1/q} ||f||_q for a single mode."""
    f = SphericalField.zeros(n_max)
    f.coeffs[field_index(n, m)] = 1.0
    lhs = strichartz_norm(ComplexState(f), T, q)
    rhs = T ** (1.0 / q) * norm_Lq(f, q)
    return {"lhs": lhs, "rhs": rhs, "relative_error": abs(lhs - rhs) / rhs}
