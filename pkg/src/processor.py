#!/usr/bin/env python3
"""
Main Processor for the capillary droplet toolkit
One run_* method per report; each returns a JSON-ready payload
"""

import logging
from fractions import Fraction
from pathlib import Path
from typing import Dict, Iterator, List, Optional, Sequence

import numpy as np

from src.config import config
from src.dispersion import F
from src.elliptic import admissible_csv_rows, uniqueness_table
from src.evolution import (
    assemble,
    center_of_mass_residual,
    convergence_study,
    energy2,
    hamiltonian_quadratic,
    initial_state,
    single_mode_identity,
    strichartz_report,
    time_series,
    volume_residual,
)
from src.reference_data import SOGGE_TARGETS
from src.reporting import dict_rows, read_envelope
from src.resonance import (
    enumerate_resonances,
    estimate_rho,
    kernel_solutions,
    normal_form_table,
    resonant_modes,
    small_divisor_scan,
    squarefree_form,
)
from src.sphere import sogge_regression
from src.validation import batch_validate, get_validation_summary, validate_elliptic_report

logger = logging.getLogger(__name__)

TIME_SERIES_COLUMNS = ("t", "L2", "energy2", "L4")


class ReportProcessor:
    """Report generation for every command-line mode."""

    def __init__(self, threads: Optional[int] = None):
        """Initialize processor."""
        self.threads = config.thread_count(threads)
        self.elliptic_config = config.get("elliptic", default={})
        logger.info(f"ReportProcessor initialized with {self.threads} threads")

    def run_resonances(self, n_max: int) -> Dict:
        """Exact resonant triples with all indices <= n_max."""
        triples = enumerate_resonances(n_max, self.threads)
        certificates = []
        for t in triples:
            forms = [squarefree_form(n) for n in (t.n1, t.n2, t.n3)]
            certificates.append({
                "triple": [t.n1, t.n2, t.n3],
                "F": [F(t.n1), F(t.n2), F(t.n3)],
                "squarefree": [f.s for f in forms],
                "m": [f.m for f in forms],
            })
        return {
            "n_max": n_max,
            "count": len(triples),
            "triples": [t.as_dict() for t in triples],
            "certificates": certificates,
            "resonant_modes": resonant_modes(n_max, self.threads),
        }

    def resonance_rows(self, payload: Dict) -> List[List]:
        return dict_rows(payload["triples"], ("n1", "n2", "n3", "triangle"))

    def run_elliptic(self, c_max: Optional[int] = None, x_bound: Optional[int] = None) -> Dict:
        """Integral points, admissible sets and uniqueness flags for c <= c_max."""
        c_max = c_max or self.elliptic_config.get("c_max", 50)
        x_bound = x_bound or self.elliptic_config.get("x_bound", 1000000)
        report = uniqueness_table(c_max, x_bound, self.threads)
        validation = validate_elliptic_report(report)
        if not validation["is_valid"]:
            for issue in validation["issues"]:
                logger.warning(f"[ELLIPTIC] {issue}")
        report["validation"] = validation
        return report

    def elliptic_rows(self, payload: Dict) -> List[List]:
        return admissible_csv_rows(payload)

    def run_kernel(self, a: int, b: int, n_max: int) -> Dict:
        solutions = kernel_solutions(a, b, n_max)
        return {
            "a": a,
            "b": b,
            "n_max": n_max,
            "solutions": [{"j": s.j, "n": s.n} for s in solutions],
            "one_dimensional_kernel": len(solutions) == 1,
        }

    def normalform_rows(self, n_max: int, kind: int, min_degree: int = 2,
                        b2_sign: Optional[str] = None) -> Iterator[List]:
        """Header plus streamed coefficient rows."""
        yield ["kind", "n1", "n2", "n3", "beta", "zero", "reason"]
        for coeff in normal_form_table(n_max, kind, min_degree, b2_sign):
            beta = "" if coeff.beta is None else repr(coeff.beta)
            yield [coeff.kind, coeff.n1, coeff.n2, coeff.n3, beta, int(coeff.zero), coeff.reason]

    def run_normalform(self, n_max: int, kind: int, min_degree: int = 2,
                       b2_sign: Optional[str] = None) -> Dict:
        rows = list(self.normalform_rows(n_max, kind, min_degree, b2_sign))
        header, body = rows[0], rows[1:]
        records = [dict(zip(header, row)) for row in body]
        return {
            "n_max": n_max,
            "kind": kind,
            "min_degree": min_degree,
            "b2_sign": b2_sign or config.get("resonance", "b2_sign"),
            "coefficients": records,
            "zero_rows": [[r["n1"], r["n2"], r["n3"]] for r in records if r["zero"]],
        }

    def run_counting(self, a_grid: Sequence[Fraction], ratio_lo: Fraction = Fraction(1, 2),
                     ratio_hi: Optional[Fraction] = Fraction(2)) -> Dict:
        return estimate_rho(a_grid, ratio_lo, ratio_hi)

    def run_smalldivisor(self, n_max: int, signs=("-", "-"), exponent: Optional[float] = None) -> Dict:
        return small_divisor_scan(n_max, signs, exponent, self.threads)

    def run_evolve(self, n_max: int, t: float, dt: float, init: str,
                   convergence: bool = False) -> Dict:
        """Exact flow time series with conservation and diagnostic functionals."""
        state = initial_state(init, n_max)
        u0 = assemble(state)
        rows = time_series(u0, t, dt)
        l2 = np.array([r["L2"] for r in rows])
        e2 = np.array([r["energy2"] for r in rows])
        payload = {
            "n_max": n_max,
            "t": t,
            "dt": dt,
            "init": init,
            "rows": rows,
            "conservation": {
                "L2_relative_drift": float(np.max(np.abs(l2 - l2[0])) / l2[0]) if l2[0] else 0.0,
                "energy2_relative_drift": float(np.max(np.abs(e2 - e2[0])) / e2[0]) if e2[0] else 0.0,
            },
            "diagnostics": {
                "energy2": energy2(state),
                "hamiltonian_quadratic": hamiltonian_quadratic(state),
                "volume_residual": volume_residual(state),
                "center_of_mass_residual": center_of_mass_residual(state),
            },
        }
        if convergence:
            payload["convergence"] = convergence_study(state, t, [dt, dt / 2, dt / 4])
        return payload

    def evolve_rows(self, payload: Dict) -> List[List]:
        return dict_rows(payload["rows"], TIME_SERIES_COLUMNS)

    def run_strichartz(self, s: float, q: int, T: float, n_max: int, seeds: Sequence[int],
                       n_samples: int = 4) -> Dict:
        reports = [strichartz_report(s, q, T, n_max, n_samples, seed, threads=self.threads) for seed in seeds]
        return {
            "reports": reports,
            "single_mode_check": single_mode_identity(2, 0, n_max, T, q),
            "note": "exploratory data; no estimate is asserted",
        }

    def run_sogge(self, ks: Sequence[int], targets: Optional[Sequence] = None) -> Dict:
        targets = list(targets or SOGGE_TARGETS.keys())
        regressions = []
        for family, q in targets:
            report = sogge_regression(family, q, ks, self.threads)
            expected = SOGGE_TARGETS.get((family, q))
            report["target"] = expected
            report["deviation"] = None if expected is None else abs(report["slope"] - expected)
            regressions.append(report)
        return {"ks": list(ks), "regressions": regressions}

    def run_validate(self, paths: Sequence[str]) -> Dict:
        envelopes = [read_envelope(Path(p)) for p in paths]
        results = batch_validate(envelopes)
        return {"results": results, "summary": get_validation_summary(results)}


def geometric_grid(lo: float, hi: float, count: int) -> List[Fraction]:
    """Integer-rounded geometric grid, strictly increasing."""
    if lo <= 0 or hi <= lo or count < 2:
        raise ValueError(f"need 0 < lo < hi and count >= 2, got {lo}, {hi}, {count}")
    values = sorted({int(round(v)) for v in np.geomspace(lo, hi, count)})
    return [Fraction(v) for v in values]


def integer_grid(lo: int, hi: int, count: int) -> List[int]:
    values = sorted({int(round(v)) for v in np.geomspace(lo, hi, count)})
    return [v for v in values if v >= 1]
