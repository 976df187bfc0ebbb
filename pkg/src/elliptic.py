"""
Integral points on the curves E_c: y**2 = x(x - c)(x + 2c).

Bounded enumeration only: points with x > x_bound are never searched, so
every report carries a completeness caveat. Admissible points (ab | x,
a**2 b | y) encode solutions (j0, n0) of a*j**2 = b*F(n).
"""

import logging
import math
from dataclasses import dataclass
from typing import Dict, List, Optional, Tuple

import numpy as np

from src.arith import coprime_pairs, is_perfect_square, radical_form
from src.config import config
from src.dispersion import F, lam
from src.parallel import parallel_map
from src.reference_data import PUBLISHED_TABLE

logger = logging.getLogger(__name__)

# int64 evaluation of the cubic stays exact while |x| + 2c <= this bound
INT64_SAFE_X = 2_000_000

COMPLETENESS_NOTE = ("bounded search: integral points with x > x_bound are not searched; "
                     "no descent, so completeness beyond the bound is not claimed")


@dataclass(frozen=True, order=True)
class EllipticPoint:
    c: int
    x: int
    y: int

    def as_list(self) -> List[int]:
        return [self.x, self.y]


@dataclass(frozen=True)
class AdmissiblePoint:
    point: EllipticPoint
    a: int
    b: int
    n0: int
    j0: int

    def as_dict(self) -> Dict:
        return {
            "x": self.point.x,
            "y": self.point.y,
            "n0": self.n0,
            "j0": self.j0,
            "frequency": radical_frequency(self.n0),
        }


def curve_rhs(c: int, x: int) -> int:
    return x * (x - c) * (x + 2 * c)


def _require_curve(c: int):
    if int(c) != c or c < 1:
        raise ValueError(f"curve parameter c must be a positive integer, got {c}")


def coprime_factorizations(c: int) -> List[Tuple[int, int]]:
    """All (a, b) with a*b == c, gcd(a, b) == 1."""
    _require_curve(c)
    return coprime_pairs(c)


def _scan_exact(c: int, lo: int, hi: int) -> List[EllipticPoint]:
    points = []
    for x in range(lo, hi + 1):
        y = is_perfect_square(curve_rhs(c, x))
        if y is not None:
            points.append(EllipticPoint(c, x, y))
    return points


def _scan_int64(c: int, lo: int, hi: int, chunk: int) -> List[EllipticPoint]:
    points = []
    for start in range(lo, hi + 1, chunk):
        x = np.arange(start, min(start + chunk, hi + 1), dtype=np.int64)
        v = x * (x - c) * (x + 2 * c)
        r = np.rint(np.sqrt(v.astype(np.float64))).astype(np.int64)
        for xv in x[r * r == v]:
            # recheck on emission in exact integers
            y = is_perfect_square(curve_rhs(c, int(xv)))
            if y is not None:
                points.append(EllipticPoint(c, int(xv), y))
    return points


def integral_points(c: int, x_bound: int) -> List[EllipticPoint]:
    """Points with -2c <= x <= x_bound and y >= 0, sorted by x."""
    _require_curve(c)
    if x_bound < 2 * c:
        raise ValueError(f"x_bound must be >= 2c = {2 * c}, got {x_bound}")

    # the cubic is negative on (-inf, -2c) and on (0, c)
    points = _scan_exact(c, -2 * c, 0)
    if x_bound + 2 * c <= INT64_SAFE_X:
        chunk = config.get("elliptic", "scan_chunk", default=250000)
        points.extend(_scan_int64(c, c, x_bound, chunk))
    else:
        logger.warning(f"[ELLIPTIC] x_bound {x_bound} exceeds int64 range, scanning c={c} in Python integers")
        points.extend(_scan_exact(c, c, x_bound))
    points.sort()
    return points


def admissible_points(a: int, b: int, x_bound: int, points: Optional[List[EllipticPoint]] = None,
                      rejected: Optional[List[Dict]] = None) -> List[AdmissiblePoint]:
    """Points of E_ab with x, y > 0, ab | x and a**2 b | y, mapped to (n0, j0)."""
    if a < 1 or b < 1 or math.gcd(a, b) != 1:
        raise ValueError(f"a, b must be coprime positive integers, got ({a}, {b})")
    c = a * b
    if points is None:
        points = integral_points(c, x_bound)
    admissible = []
    for p in points:
        if p.x <= 0 or p.y <= 0 or p.x % c or p.y % (a * a * b):
            continue
        n0 = p.x // c
        j0 = p.y // (a * a * b)
        if n0 < 2 or a * j0 * j0 != b * F(n0):
            entry = {"c": c, "a": a, "b": b, "x": p.x, "y": p.y, "n0": n0, "j0": j0,
                     "reason": "a*j0**2 != b*F(n0)"}
            logger.warning(f"[ELLIPTIC] rejected point {entry}")
            if rejected is not None:
                rejected.append(entry)
            continue
        admissible.append(AdmissiblePoint(p, a, b, n0, j0))
    return admissible


def radical_frequency(n0: int) -> Dict:
    """Lambda(n0) = d*sqrt(k) with k square-free, plus its decimal value."""
    d, k = radical_form(F(n0))
    if k == 1:
        exact = str(d)
    elif d == 1:
        exact = f"√{k}"
    else:
        exact = f"{d}√{k}"
    return {"n0": n0, "F": F(n0), "d": d, "k": k, "exact": exact, "decimal": lam(n0)}


def _curve_report(c: int, x_bound: int) -> Dict:
    points = integral_points(c, x_bound)
    rejected: List[Dict] = []
    factorizations = []
    for a, b in coprime_factorizations(c):
        found = admissible_points(a, b, x_bound, points=points, rejected=rejected)
        factorizations.append({
            "a": a,
            "b": b,
            "admissible": [p.as_dict() for p in found],
            "unique": len(found) == 1,
        })
    nonempty = [f for f in factorizations if f["admissible"]]
    return {
        "c": c,
        "points": [p.as_list() for p in points],
        "nontrivial": len(points) > 3,
        "factorizations": factorizations,
        "unique_kernel": bool(nonempty) and all(f["unique"] for f in nonempty),
        "rejected": rejected,
    }


def _published_comparison(curves: List[Dict]) -> List[Dict]:
    by_c = {curve["c"]: curve for curve in curves}
    rows = []
    for c, (n0, d, k) in sorted(PUBLISHED_TABLE.items()):
        curve = by_c.get(c)
        if curve is None:
            continue
        n0_values = sorted({f["admissible"][0]["n0"] for f in curve["factorizations"] if f["unique"]})
        computed = radical_frequency(n0_values[0]) if n0_values else None
        radical_ok = computed is not None and (computed["d"], computed["k"]) == (d, k)
        n0_ok = computed is not None and computed["n0"] == n0
        rows.append({
            "c": c,
            "printed": {"n0": n0, "d": d, "k": k, "exact": f"{d}√{k}"},
            "computed": computed,
            "agrees": radical_ok and n0_ok,
            "discrepancy": not (radical_ok and n0_ok),
        })
        if not (radical_ok and n0_ok):
            logger.warning(f"[ELLIPTIC] printed table row c={c} ({d}√{k}) disagrees with "
                           f"recomputation ({computed['exact'] if computed else 'none'})")
    return rows


def uniqueness_table(c_max: int, x_bound: int, threads: Optional[int] = None) -> Dict:
    """Per-curve admissible sets, uniqueness flags and exact frequencies for c <= c_max."""
    _require_curve(c_max)
    if x_bound < 2 * c_max:
        raise ValueError(f"x_bound must be >= 2*c_max = {2 * c_max}, got {x_bound}")
    logger.info(f"[ELLIPTIC] scanning {c_max} curves up to x = {x_bound}")
    curves = parallel_map(lambda c: _curve_report(c, x_bound), range(1, c_max + 1), threads)

    rows = []
    for curve in curves:
        for f in curve["factorizations"]:
            if f["unique"]:
                point = f["admissible"][0]
                rows.append({"c": curve["c"], "a": f["a"], "b": f["b"], "x": point["x"], "y": point["y"],
                             "n0": point["n0"], "j0": point["j0"], "frequency": point["frequency"]})

    return {
        "c_max": c_max,
        "x_bound": x_bound,
        "curves": curves,
        "table": rows,
        "published_comparison": _published_comparison(curves),
        "min_n0": _min_n0(curves),
        "completeness": COMPLETENESS_NOTE,
    }


def _min_n0(curves: List[Dict]) -> Optional[Dict]:
    best = None
    for curve in curves:
        if not curve["unique_kernel"]:
            continue
        for f in curve["factorizations"]:
            for point in f["admissible"]:
                candidate = (point["n0"], curve["c"])
                if best is None or candidate < best:
                    best = candidate
    if best is None:
        return None
    return {"n0": best[0], "c": best[1]}


def min_n0_scan(c_max: int, x_bound: int, threads: Optional[int] = None) -> Optional[Dict]:
    """Smallest n0 over unique-kernel curves with c <= c_max, or None."""
    _require_curve(c_max)
    curves = parallel_map(lambda c: _curve_report(c, x_bound), range(1, c_max + 1), threads)
    return _min_n0(curves)


def admissible_csv_rows(report: Dict) -> List[List]:
    """One row per admissible point of a uniqueness_table report."""
    rows = [["c", "a", "b", "x", "y", "n0", "j0", "unique", "lambda_exact", "lambda_decimal"]]
    for curve in report["curves"]:
        for f in curve["factorizations"]:
            for point in f["admissible"]:
                freq = point["frequency"]
                rows.append([curve["c"], f["a"], f["b"], point["x"], point["y"], point["n0"], point["j0"],
                             int(f["unique"]), freq["exact"], f"{freq['decimal']:.12g}"])
    return rows
