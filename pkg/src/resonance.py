"""
Three-wave resonances of the droplet dispersion relation.

Exact resonance search, normal-form coefficients, small-divisor scans,
kernel solutions of a*j**2 == b*F(n) and the pair-counting function used
for the X^{s,b} embedding exponent.
"""

import bisect
import logging
import math
from dataclasses import asdict, dataclass
from fractions import Fraction
from typing import Dict, Iterator, List, Optional, Sequence, Tuple

import numpy as np

from src.arith import (
    Rational,
    cmp_sqrt_sum,
    factor_product,
    is_perfect_square,
    signed_sqrt_sum,
    squarefree_split,
)
from src.config import config
from src.dispersion import F, lam, lam_array, require_modes
from src.parallel import chunked, parallel_map

logger = logging.getLogger(__name__)

Signs = Tuple[int, int]

MINUS_MINUS: Signs = (-1, -1)


@dataclass(frozen=True)
class SquarefreeForm:
    """F(n) = s * m**2 with s square-free."""
    n: int
    s: int
    m: int


@dataclass(frozen=True)
class ResonanceTriple:
    n1: int
    n2: int
    n3: int
    resonant: bool
    divisor: Optional[float] = None

    @property
    def triangle(self) -> bool:
        """Selection rule n3 <= n1 + n2 for products of harmonics."""
        return self.n3 <= self.n1 + self.n2

    def as_dict(self) -> Dict:
        data = asdict(self)
        data["triangle"] = self.triangle
        return data


@dataclass(frozen=True)
class NormalFormCoefficient:
    """b = i * beta, or zero (resonant or degenerate denominator)."""
    kind: int
    n1: int
    n2: int
    n3: int
    beta: Optional[float]
    zero: bool
    reason: str = ""


@dataclass(frozen=True)
class KernelSolution:
    a: int
    b: int
    j: int
    n: int


@dataclass(frozen=True)
class DivisorValue:
    value: float
    exact_zero: bool
    refined: bool = False


def squarefree_form(n: int) -> SquarefreeForm:
    require_modes(n, minimum=2)
    s, m = squarefree_split(factor_product(n, n - 1, n + 2))
    return SquarefreeForm(n, s, m)


def squarefree_classes(n_max: int, threads: Optional[int] = None) -> Dict[int, List[SquarefreeForm]]:
    """Group 2..n_max by the square-free part of F(n); each class lists n ascending."""
    require_modes(n_max, minimum=2)
    chunk = config.get("processing", "resonance_chunk", default=2000)
    blocks = chunked(range(2, n_max + 1), chunk)
    forms = parallel_map(lambda block: [squarefree_form(n) for n in block], blocks, threads)
    classes: Dict[int, List[SquarefreeForm]] = {}
    for block in forms:
        for form in block:
            classes.setdefault(form.s, []).append(form)
    return classes


def is_resonant(n1: int, n2: int, n3: int) -> bool:
    """True iff Lambda(n3) == Lambda(n1) + Lambda(n2) exactly.

    Checks [F1 + F2 - F3]**2 == 4*F1*F2 together with F3 - F1 - F2 >= 0; the
    sign condition is what pins the orientation to n3 carrying the largest
    frequency (it implies F3 >= max(F1, F2)).
    """
    require_modes(n1, n2, n3, minimum=2)
    F1, F2, F3 = F(n1), F(n2), F(n3)
    D = F3 - F1 - F2
    return D >= 0 and D * D == 4 * F1 * F2


def enumerate_resonances(n_max: int, threads: Optional[int] = None) -> List[ResonanceTriple]:
    """All resonant triples with 2 <= n1 <= n2 and n3 <= n_max, sorted."""
    require_modes(n_max, minimum=2)
    classes = squarefree_classes(n_max, threads)
    logger.info(f"[RESONANCE] {len(classes)} square-free classes for n <= {n_max}")

    # sqrt(s1)*m1 + sqrt(s2)*m2 = sqrt(s3)*m3 forces s1 = s2 = s3: square roots of
    # distinct square-free integers are linearly independent over Q. Inside a
    # class the identity reduces to m3 = m1 + m2.
    triples = []
    for s, forms in classes.items():
        if len(forms) < 2:
            continue
        by_m = {form.m: form.n for form in forms}
        for i, first in enumerate(forms):
            for second in forms[i:]:
                n3 = by_m.get(first.m + second.m)
                if n3 is None:
                    continue
                if not is_resonant(first.n, second.n, n3):
                    raise RuntimeError(f"class {s} produced non-resonant triple {(first.n, second.n, n3)}")
                triples.append(ResonanceTriple(first.n, second.n, n3, True, 0.0))
    triples.sort(key=lambda t: (t.n1, t.n2, t.n3))
    logger.info(f"[RESONANCE] found {len(triples)} resonant triples")
    return triples


def brute_force_resonances(n_max: int) -> List[ResonanceTriple]:
    """Direct scan of every triple; oracle for enumerate_resonances."""
    require_modes(n_max, minimum=2)
    values = [n * (n - 1) * (n + 2) for n in range(n_max + 1)]
    found = []
    for n1 in range(2, n_max + 1):
        F1 = values[n1]
        for n2 in range(n1, n_max + 1):
            F2 = values[n2]
            target = 4 * F1 * F2
            for n3 in range(2, n_max + 1):
                D = values[n3] - F1 - F2
                if D >= 0 and D * D == target:
                    found.append(ResonanceTriple(n1, n2, n3, True, 0.0))
    return found


def resonant_modes(n_max: int, threads: Optional[int] = None) -> List[int]:
    """Degrees kept by the finite-rank projection: 0, 1 and every resonant n3."""
    return sorted({0, 1} | {t.n3 for t in enumerate_resonances(n_max, threads)})


def _vanishes(n1: int, n2: int, n3: int, signs: Signs) -> bool:
    """Exact test for Lambda(n3) + s1*Lambda(n1) + s2*Lambda(n2) == 0."""
    s1, s2 = signs
    if s1 > 0 and s2 > 0:
        return False
    if s1 < 0 and s2 < 0:
        return is_resonant(n1, n2, n3)
    if s1 > 0:
        return is_resonant(n1, n3, n2)
    return is_resonant(n2, n3, n1)


def _parse_signs(signs) -> Signs:
    parsed = []
    for sign in signs:
        if sign in ("+", 1, +1.0):
            parsed.append(1)
        elif sign in ("-", -1, -1.0):
            parsed.append(-1)
        else:
            raise ValueError(f"sign must be '+' or '-', got {sign!r}")
    if len(parsed) != 2:
        raise ValueError(f"expected two signs, got {signs!r}")
    return parsed[0], parsed[1]


def _exact_divisor(n1: int, n2: int, n3: int, signs: Signs) -> float:
    bits = config.get("resonance", "exact_bits", default=80)
    lo, hi = signed_sqrt_sum([(1, F(n3)), (signs[0], F(n1)), (signs[1], F(n2))], bits)
    return float((lo + hi) / 2)


def small_divisor(n1: int, n2: int, n3: int, signs=MINUS_MINUS) -> DivisorValue:
    """Lambda(n3) +/- Lambda(n1) +/- Lambda(n2), exact zero for resonant patterns."""
    require_modes(n1, n2, n3, minimum=2)
    signs = _parse_signs(signs)
    if _vanishes(n1, n2, n3, signs):
        return DivisorValue(0.0, exact_zero=True)
    value = lam(n3) + signs[0] * lam(n1) + signs[1] * lam(n2)
    threshold = config.get("resonance", "near_zero_threshold", default=1e-6)
    if abs(value) < threshold:
        return DivisorValue(_exact_divisor(n1, n2, n3, signs), exact_zero=False, refined=True)
    return DivisorValue(value, exact_zero=False)


def _better(candidate, best) -> bool:
    """Smaller weighted divisor wins; ties go to the lexicographically first triple."""
    if candidate[1] is None or not math.isfinite(candidate[0]):
        return False
    if best[1] is None:
        return True
    return candidate[0] < best[0] or (candidate[0] == best[0] and candidate[1] < best[1])


def _scan_rows(n1_values: Sequence[int], n_max: int, signs: Signs, exponent: float) -> Dict:
    lam_table = lam_array(n_max)
    threshold = config.get("resonance", "near_zero_threshold", default=1e-6)
    n3 = np.arange(2, n_max + 1)
    best = (math.inf, None, None)
    scanned = 0
    refined = 0
    resonant = []
    for n1 in n1_values:
        # (-,-) and (+,+) are symmetric in n1, n2
        start = n1 if signs[0] == signs[1] else 2
        n2 = np.arange(start, n_max + 1)
        d = lam_table[n3][None, :] + signs[0] * lam_table[n1] + signs[1] * lam_table[n2][:, None]
        near = np.argwhere(np.abs(d) < threshold)
        for i, k in near:
            a, b, c = int(n1), int(n2[i]), int(n3[k])
            if _vanishes(a, b, c, signs):
                d[i, k] = np.inf
                resonant.append([a, b, c])
            else:
                d[i, k] = _exact_divisor(a, b, c, signs)
                refined += 1
        top = np.maximum(np.maximum(n2[:, None], n3[None, :]), n1).astype(np.float64)
        weighted = np.abs(d) * top ** exponent
        scanned += weighted.size
        flat = int(np.argmin(weighted))
        i, k = divmod(flat, weighted.shape[1])
        candidate = (float(weighted[i, k]), (int(n1), int(n2[i]), int(n3[k])), float(d[i, k]))
        if _better(candidate, best):
            best = candidate
    return {"best": best, "scanned": scanned, "refined": refined, "resonant": resonant}


def small_divisor_scan(n_max: int, signs=MINUS_MINUS, exponent: Optional[float] = None,
                       threads: Optional[int] = None) -> Dict:
    """Minimum of |divisor| * max(n_i)**exponent over non-resonant triples in [2, n_max]."""
    require_modes(n_max, minimum=2)
    signs = _parse_signs(signs)
    if exponent is None:
        exponent = config.get("resonance", "divisor_exponent", default=4.5)
    chunk = config.get("processing", "divisor_chunk", default=16)
    blocks = chunked(list(range(2, n_max + 1)), chunk)
    logger.info(f"[RESONANCE] small-divisor scan n <= {n_max}, signs {signs}, {len(blocks)} blocks")
    parts = parallel_map(lambda block: _scan_rows(block, n_max, signs, exponent), blocks, threads)

    best = (math.inf, None, None)
    scanned = refined = 0
    resonant = []
    for part in parts:
        if _better(part["best"], best):
            best = part["best"]
        scanned += part["scanned"]
        refined += part["refined"]
        resonant.extend(part["resonant"])

    if best[1] is None or not best[0] > 0:
        raise RuntimeError(f"small-divisor scan produced non-positive minimum {best[0]}")

    return {
        "n_max": n_max,
        "signs": ["+" if s > 0 else "-" for s in signs],
        "exponent": exponent,
        "min_weighted_divisor": best[0],
        "argmin": list(best[1]),
        "divisor_at_argmin": best[2],
        "triples_scanned": scanned,
        "refined_divisors": refined,
        "resonant_skipped": sorted(resonant),
    }


def _kind_signs(kind: int, b2_sign: Optional[str] = None) -> Signs:
    if kind == 1:
        return -1, -1
    if kind == 2:
        mode = b2_sign or config.get("resonance", "b2_sign", default="verbatim")
        if mode == "verbatim":
            return -1, 1
        if mode == "conjugate":
            return 1, -1
        raise ValueError(f"b2_sign must be 'verbatim' or 'conjugate', got {mode!r}")
    if kind == 3:
        return 1, 1
    raise ValueError(f"normal form kind must be 1, 2 or 3, got {kind}")


def normal_form_coeff(kind: int, n1: int, n2: int, n3: int, b2_sign: Optional[str] = None) -> NormalFormCoefficient:
    """Quadratic normal-form coefficient b_kind(n1, n2, n3) = i * beta."""
    signs = _kind_signs(kind, b2_sign)
    require_modes(n1, n2, n3)
    if min(n1, n2, n3) <= 1:
        return NormalFormCoefficient(kind, n1, n2, n3, None, True, "degenerate")
    divisor = small_divisor(n1, n2, n3, signs)
    if divisor.exact_zero:
        return NormalFormCoefficient(kind, n1, n2, n3, None, True, "resonant")
    return NormalFormCoefficient(kind, n1, n2, n3, 1.0 / divisor.value, False)


def normal_form_table(n_max: int, kind: int, min_degree: int = 2,
                      b2_sign: Optional[str] = None) -> Iterator[NormalFormCoefficient]:
    """Stream coefficients over [min_degree, n_max]**3; n1 <= n2 for the symmetric kinds."""
    signs = _kind_signs(kind, b2_sign)
    require_modes(n_max, min_degree)
    symmetric = signs[0] == signs[1]
    for n1 in range(min_degree, n_max + 1):
        for n2 in range(n1 if symmetric else min_degree, n_max + 1):
            for n3 in range(min_degree, n_max + 1):
                yield normal_form_coeff(kind, n1, n2, n3, b2_sign)


def _ratio_ok(n1: int, n2: int, ratio_lo: Rational, ratio_hi: Optional[Rational]) -> bool:
    # ratio_lo <= n2/n1 <= ratio_hi in exact arithmetic
    if n2 < ratio_lo * n1:
        return False
    return ratio_hi is None or n2 <= ratio_hi * n1


def _largest_mode_below(bound: Fraction) -> int:
    """Largest n >= 1 with F(n) <= bound**2."""
    limit = bound * bound
    n = 1
    while (n + 1) * n * (n + 3) <= limit:
        n += 1
    return n


def count_pairs(A: Rational, ratio_lo: Rational = Fraction(1, 2),
                ratio_hi: Optional[Rational] = Fraction(2)) -> int:
    """#{(n1, n2), n_i >= 2 : ratio window, |Lambda(n1) + Lambda(n2) - A| <= 1/2}, exact."""
    A = Fraction(A)
    if A <= 0:
        raise ValueError(f"count_pairs requires A > 0, got {A}")
    lo = A - Fraction(1, 2)
    hi = A + Fraction(1, 2)
    n_top = _largest_mode_below(hi)
    if n_top < 2:
        return 0
    lams = [lam(n) for n in range(n_top + 1)]
    count = 0
    for n1 in range(2, n_top + 1):
        # float bisection only narrows the candidate range; membership is exact
        first = bisect.bisect_left(lams, float(lo) - lams[n1] - 1.0, 2)
        last = bisect.bisect_right(lams, float(hi) - lams[n1] + 1.0, 2)
        F1 = F(n1)
        for n2 in range(max(first, 2), min(last, n_top + 1)):
            if not _ratio_ok(n1, n2, ratio_lo, ratio_hi):
                continue
            F2 = F(n2)
            if cmp_sqrt_sum(F1, F2, lo) >= 0 and cmp_sqrt_sum(F1, F2, hi) <= 0:
                count += 1
    return count


class PairSumIndex:
    """Sorted table of Lambda(n1) + Lambda(n2) for repeated exact window counts."""

    EPS = 1e-9

    def __init__(self, max_center: Rational, ratio_lo: Rational = Fraction(1, 2),
                 ratio_hi: Optional[Rational] = Fraction(2)):
        self.max_center = Fraction(max_center)
        self.ratio_lo = ratio_lo
        self.ratio_hi = ratio_hi
        n_top = _largest_mode_below(self.max_center + Fraction(1, 2))
        n = np.arange(2, max(n_top, 1) + 1)
        n1, n2 = np.meshgrid(n, n, indexing="ij")
        n1 = n1.ravel()
        n2 = n2.ravel()
        lo_frac = Fraction(ratio_lo)
        keep = n2 * lo_frac.denominator >= lo_frac.numerator * n1
        if ratio_hi is not None:
            ratio_hi = Fraction(ratio_hi)
            keep &= n2 * ratio_hi.denominator <= ratio_hi.numerator * n1
        lams = lam_array(max(n_top, 2))
        sums = lams[n1[keep]] + lams[n2[keep]]
        order = np.argsort(sums, kind="stable")
        self.sums = sums[order]
        self.n1 = n1[keep][order]
        self.n2 = n2[keep][order]
        logger.debug(f"PairSumIndex: {self.sums.size} pairs up to n = {n_top}")

    def _exact_inside(self, index: int, lo: Fraction, hi: Fraction) -> bool:
        F1 = F(int(self.n1[index]))
        F2 = F(int(self.n2[index]))
        return cmp_sqrt_sum(F1, F2, lo) >= 0 and cmp_sqrt_sum(F1, F2, hi) <= 0

    def count(self, A: Rational) -> int:
        return self.count_many([A])[0]

    def count_many(self, centers: Sequence[Rational]) -> List[int]:
        """Exact window counts for each center A (|sum - A| <= 1/2)."""
        centers = [Fraction(c) for c in centers]
        if centers and max(centers) > self.max_center:
            raise ValueError(f"center {max(centers)} exceeds index range {self.max_center}")
        lo = np.array([float(c - Fraction(1, 2)) for c in centers])
        hi = np.array([float(c + Fraction(1, 2)) for c in centers])
        lo_in = np.searchsorted(self.sums, lo - self.EPS, side="left")
        lo_out = np.searchsorted(self.sums, lo + self.EPS, side="right")
        hi_in = np.searchsorted(self.sums, hi - self.EPS, side="left")
        hi_out = np.searchsorted(self.sums, hi + self.EPS, side="right")
        counts = np.maximum(hi_in - lo_out, 0)
        result = []
        for k, center in enumerate(centers):
            total = int(counts[k])
            ambiguous = list(range(lo_in[k], lo_out[k])) + list(range(max(hi_in[k], lo_out[k]), hi_out[k]))
            if ambiguous:
                exact_lo = center - Fraction(1, 2)
                exact_hi = center + Fraction(1, 2)
                total += sum(1 for i in ambiguous if self._exact_inside(i, exact_lo, exact_hi))
            result.append(total)
        return result


def estimate_rho(A_grid: Sequence[Rational], ratio_lo: Rational = Fraction(1, 2),
                 ratio_hi: Optional[Rational] = Fraction(2), step: Rational = Fraction(1, 2)) -> Dict:
    """Log-log slope of the window-maximized pair count max_{A' in [A, 2A]} N(A')."""
    grid = [Fraction(a) for a in A_grid]
    if len(grid) < 10:
        raise ValueError(f"estimate_rho needs at least 10 grid points, got {len(grid)}")
    if any(a <= 0 for a in grid) or any(b <= a for a, b in zip(grid, grid[1:])):
        raise ValueError("A grid must be positive and strictly increasing")
    step = Fraction(step)

    index = PairSumIndex(2 * grid[-1], ratio_lo, ratio_hi)
    counts = []
    window_max = []
    for A in grid:
        samples = [A + k * step for k in range(int(A / step) + 1)]
        values = index.count_many(samples)
        counts.append(values[0])
        window_max.append(max(values))
        logger.debug(f"[RESONANCE] A = {float(A):g}: N = {values[0]}, max window = {window_max[-1]}")

    usable = [(float(a), m) for a, m in zip(grid, window_max) if m > 0]
    if len(usable) < 2:
        raise ValueError("regression undefined: fewer than two nonzero counts")
    x = np.log([a for a, _ in usable])
    y = np.log([m for _, m in usable])
    slope, intercept = np.polyfit(x, y, 1)

    return {
        "grid": [str(a) for a in grid],
        "counts": counts,
        "max_window_counts": window_max,
        "ratio_window": [str(Fraction(ratio_lo)), None if ratio_hi is None else str(Fraction(ratio_hi))],
        "slope": float(slope),
        "intercept": float(intercept),
        "sobolev_threshold": float(3 * slope / 8 + 1 / 8),
    }


def kernel_solutions(a: int, b: int, n_max: int) -> List[KernelSolution]:
    """All (j, n), 2 <= n <= n_max, with a*j**2 == b*F(n)."""
    if a < 1 or b < 1 or math.gcd(a, b) != 1:
        raise ValueError(f"a, b must be coprime positive integers, got ({a}, {b})")
    require_modes(n_max)
    solutions = []
    for n in range(2, n_max + 1):
        value = b * F(n)
        if value % a:
            continue
        j = is_perfect_square(value // a)
        if j:
            solutions.append(KernelSolution(a, b, j, n))
    return solutions
