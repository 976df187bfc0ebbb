import math

import pytest

from src.dispersion import lam
from src.elliptic import (
    _scan_exact,
    _scan_int64,
    admissible_csv_rows,
    admissible_points,
    coprime_factorizations,
    curve_rhs,
    integral_points,
    min_n0_scan,
    radical_frequency,
    uniqueness_table,
)
from src.reference_data import PUBLISHED_POINTS, PUBLISHED_TABLE

X_BOUND = 10**6


@pytest.fixture(scope="module")
def table50():
    return uniqueness_table(50, X_BOUND)


def curve(report, c):
    return next(entry for entry in report["curves"] if entry["c"] == c)


class TestIntegralPoints:
    @pytest.mark.parametrize("c", sorted(PUBLISHED_POINTS))
    def test_published_points_recovered(self, c):
        found = {(p.x, p.y) for p in integral_points(c, X_BOUND)}
        assert found == set(PUBLISHED_POINTS[c])
        assert all(y * y == curve_rhs(c, x) for x, y in found)

    def test_only_trivial_points(self):
        assert [(p.x, p.y) for p in integral_points(1, X_BOUND)] == [(-2, 0), (0, 0), (1, 0)]

    def test_c2_listing(self):
        points = [(p.x, p.y) for p in integral_points(2, 1000)]
        assert set(PUBLISHED_POINTS[2]) <= set(points)
        assert (50, 360) in points

    def test_sorted_and_nonnegative(self):
        points = integral_points(30, 10**4)
        assert points == sorted(points)
        assert all(p.y >= 0 for p in points)

    def test_bound_too_small(self):
        with pytest.raises(ValueError):
            integral_points(15, 29)

    @pytest.mark.parametrize("c", [0, -3])
    def test_bad_curve(self, c):
        with pytest.raises(ValueError):
            integral_points(c, 100)

    @pytest.mark.parametrize("c", [2, 15, 35])
    def test_scan_paths_agree(self, c):
        assert _scan_exact(c, c, 20000) == _scan_int64(c, c, 20000, 4096)


class TestAdmissible:
    @pytest.mark.parametrize("a, b, j0", [(15, 1, 4), (1, 15, 60), (3, 5, 20), (5, 3, 12)])
    def test_c15(self, a, b, j0):
        found = admissible_points(a, b, X_BOUND)
        assert [(p.point.x, p.point.y, p.n0, p.j0) for p in found] == [(90, 900, 6, j0)]

    def test_point_beyond_bound_is_missed(self):
        assert admissible_points(15, 1, 80) == []

    def test_non_unique_factorization(self):
        assert [p.n0 for p in admissible_points(1, 2, X_BOUND)] == [2, 4, 25]

    def test_requires_coprime(self):
        with pytest.raises(ValueError):
            admissible_points(2, 4, 100)

    def test_factorizations(self):
        assert coprime_factorizations(30) == [(1, 30), (2, 15), (3, 10), (5, 6), (6, 5), (10, 3), (15, 2), (30, 1)]
        assert coprime_factorizations(1) == [(1, 1)]


class TestRadicalFrequency:
    @pytest.mark.parametrize("n0, d, k", [(6, 4, 15), (9, 6, 22), (7, 3, 42), (25, 90, 2), (576, 2040, 46),
                                          (49, 84, 17), (50, 70, 26)])
    def test_radicals(self, n0, d, k):
        freq = radical_frequency(n0)
        assert (freq["d"], freq["k"]) == (d, k)
        assert abs(freq["decimal"] - d * math.sqrt(k)) <= 1e-12 * freq["decimal"]

    def test_exact_text(self):
        assert radical_frequency(6)["exact"] == "4√15"

    @pytest.mark.parametrize("c", sorted(PUBLISHED_TABLE))
    def test_frequency_matches_dispersion(self, c):
        n0, _, _ = PUBLISHED_TABLE[c]
        freq = radical_frequency(n0)
        assert abs(freq["d"] * math.sqrt(freq["k"]) - lam(n0)) <= 1e-12 * lam(n0)


class TestUniquenessTable:
    def test_c15_unique(self, table50):
        entry = curve(table50, 15)
        assert entry["unique_kernel"]
        assert {f["admissible"][0]["n0"] for f in entry["factorizations"]} == {6}

    @pytest.mark.parametrize("c, n0", [(22, 9), (42, 7), (46, 576), (17, 49), (26, 50)])
    def test_unique_curves(self, table50, c, n0):
        entry = curve(table50, c)
        assert entry["unique_kernel"]
        assert all(f["admissible"][0]["n0"] == n0 for f in entry["factorizations"] if f["admissible"])

    def test_c50_rows_without_unique_kernel(self, table50):
        entry = curve(table50, 50)
        assert not entry["unique_kernel"]
        rows = [(r["a"], r["b"], r["n0"]) for r in table50["table"] if r["c"] == 50]
        assert rows == [(25, 2, 25), (50, 1, 25)]

    @pytest.mark.parametrize("c", [2, 8, 18, 30, 32, 35])
    def test_multiple_points_not_unique(self, table50, c):
        assert not curve(table50, c)["unique_kernel"]

    def test_published_comparison(self, table50):
        rows = {r["c"]: r for r in table50["published_comparison"]}
        assert sorted(rows) == sorted(PUBLISHED_TABLE)
        assert {c for c, r in rows.items() if r["discrepancy"]} == {17, 26}
        assert rows[17]["computed"]["exact"] == "84√17"
        assert rows[26]["computed"]["exact"] == "70√26"
        assert rows[50]["computed"]["exact"] == "90√2"

    def test_min_n0(self, table50):
        assert table50["min_n0"] == {"n0": 6, "c": 15}

    def test_no_rejections(self, table50):
        assert all(entry["rejected"] == [] for entry in table50["curves"])

    def test_completeness_caveat(self, table50):
        assert "x_bound" in table50["completeness"]

    def test_csv_rows(self, table50):
        rows = admissible_csv_rows(table50)
        assert rows[0][:3] == ["c", "a", "b"]
        c15 = [r for r in rows[1:] if r[0] == 15]
        assert [r[5] for r in c15] == [6, 6, 6, 6]
        assert all(r[7] == 1 for r in c15)

    def test_bound_too_small(self):
        with pytest.raises(ValueError):
            uniqueness_table(10, 19)


class TestMinN0:
    @pytest.mark.parametrize("c_max", [1, 14])
    def test_none_below_fifteen(self, c_max):
        assert min_n0_scan(c_max, 10**5) is None

    def test_first_at_fifteen(self):
        assert min_n0_scan(15, 10**4) == {"n0": 6, "c": 15}
