import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

from src.dispersion import lam
from src.evolution import (
    ComplexState,
    DecomposeError,
    ResolutionError,
    SurfaceState,
    assemble,
    band_field,
    center_of_mass_residual,
    convergence_study,
    decompose,
    energy2,
    evolve,
    evolve_ode,
    hamiltonian_quadratic,
    initial_state,
    mode_weights,
    random_state,
    real_highest_weight,
    single_mode_identity,
    strichartz_norm,
    strichartz_report,
    time_series,
    volume_residual,
)
from src.sphere import SphericalField, field_index, l2_norm, norm_Lq, zonal


def constant_shift(n_max, a):
    zeta = SphericalField.zeros(n_max, real=True)
    zeta.coeffs[0] = a * math.sqrt(4 * math.pi)
    return SurfaceState(zeta, SphericalField.zeros(n_max, real=True))


class TestAssembly:
    def test_weights(self):
        w_zeta, w_phi = mode_weights(3)
        assert_allclose(w_zeta[:4], 1.0)
        assert_allclose(w_zeta[field_index(2, 0)], 2.0)
        assert_allclose(w_zeta[field_index(3, 1)], math.sqrt(10))
        assert_allclose(w_phi[field_index(3, -2)], math.sqrt(3))

    def test_zonal_example(self):
        state = SurfaceState(zonal(2, 4), SphericalField.zeros(4, real=True))
        u = assemble(state).u
        assert_allclose(u.coefficient(2, 0), 2.0)
        assert_allclose(np.delete(u.coeffs, field_index(2, 0)), 0.0)

    def test_phi_enters_imaginary_part(self):
        phi = zonal(3, 3)
        u = assemble(SurfaceState(SphericalField.zeros(3, real=True), phi)).u
        assert_allclose(u.coefficient(3, 0), 1j * math.sqrt(3))

    @pytest.mark.parametrize("seed", [0, 1, 2])
    def test_round_trip(self, seed):
        state = random_state(10, seed)
        back = decompose(assemble(state))
        assert_allclose(back.zeta.coeffs, state.zeta.coeffs, atol=1e-13)
        assert_allclose(back.phi.coeffs, state.phi.coeffs, atol=1e-13)

    def test_low_degree_content_rejected(self):
        u = SphericalField.zeros(4)
        u.coeffs[field_index(1, 0)] = 0.5
        with pytest.raises(DecomposeError):
            decompose(ComplexState(u))

    def test_state_validation(self):
        phi = SphericalField.zeros(3, real=True)
        phi.coeffs[0] = 1.0
        with pytest.raises(ValueError):
            SurfaceState(SphericalField.zeros(3, real=True), phi)
        with pytest.raises(ValueError):
            SurfaceState(SphericalField.zeros(3), SphericalField.zeros(3, real=True))
        with pytest.raises(ValueError):
            SurfaceState(SphericalField.zeros(3, real=True), SphericalField.zeros(4, real=True))


class TestExactFlow:
    def test_identity_at_zero(self):
        u = assemble(random_state(8, 3))
        assert_allclose(evolve(u, 0.0).u.coeffs, u.u.coeffs)

    @pytest.mark.parametrize("n", [2, 5, 11])
    def test_single_mode_period(self, n):
        u = SphericalField.zeros(12)
        u.coeffs[field_index(n, 1)] = 1.0 + 0.5j
        back = evolve(ComplexState(u), 2 * math.pi / lam(n))
        assert_allclose(back.u.coeffs, u.coeffs, atol=1e-12)

    def test_group_law(self):
        u = assemble(random_state(12, 4))
        assert_allclose(evolve(evolve(u, 0.7), 1.9).u.coeffs, evolve(u, 2.6).u.coeffs, atol=1e-12)

    def test_unitary(self):
        u = assemble(random_state(20, 5))
        for t in (0.1, 3.0, 47.5):
            moved = evolve(u, t).u
            assert abs(l2_norm(moved) - l2_norm(u.u)) <= 1e-14 * l2_norm(u.u)
            moduli = np.abs(u.u.coeffs)
            assert np.max(np.abs(np.abs(moved.coeffs) - moduli)) <= 1e-14 * np.max(moduli)

    def test_rotation_direction(self):
        u = SphericalField.zeros(2)
        u.coeffs[field_index(2, 0)] = 1.0
        t = 0.1
        assert_allclose(evolve(ComplexState(u), t).u.coefficient(2, 0), np.exp(-1j * lam(2) * t))


class TestEnergy:
    def test_examples(self):
        assert_allclose(energy2(SurfaceState(zonal(2, 3), SphericalField.zeros(3, real=True))), 2.0)
        assert_allclose(energy2(SurfaceState(SphericalField.zeros(3, real=True), zonal(3, 3))), 1.5)

    def test_half_squared_norm(self):
        state = random_state(15, 7)
        assert_allclose(energy2(state), 0.5 * l2_norm(assemble(state).u) ** 2, rtol=1e-12)

    def test_conserved_by_exact_flow(self):
        state = random_state(64, 11)
        u0 = assemble(state)
        e0 = energy2(state)
        for t in np.linspace(0.0, 100.0, 9):
            assert abs(energy2(decompose(evolve(u0, t))) - e0) <= 1e-12 * e0

    def test_hamiltonian_examples(self):
        assert_allclose(hamiltonian_quadratic(SurfaceState.zeros(4)), 4 * math.pi)
        state = SurfaceState(zonal(2, 4), SphericalField.zeros(4, real=True))
        assert_allclose(hamiltonian_quadratic(state), 4 * math.pi + 4.0)


class TestDiagnostics:
    @pytest.mark.parametrize("a", [0.0, 0.01, -0.2])
    def test_volume_of_constant_shift(self, a):
        expected = 4 * math.pi / 3 * ((1 + a) ** 3 - 1)
        assert_allclose(volume_residual(constant_shift(3, a)), expected, atol=1e-13)

    def test_center_of_mass_of_sphere(self):
        assert_allclose(center_of_mass_residual(SurfaceState.zeros(4)), [0.0, 0.0, 0.0], atol=1e-13)

    def test_center_of_mass_shift(self):
        state = SurfaceState(zonal(1, 3).scaled(0.01), SphericalField.zeros(3, real=True))
        x, y, z = center_of_mass_residual(state)
        assert abs(x) < 1e-13 and abs(y) < 1e-13
        assert z > 0


class TestRungeKutta:
    def test_fourth_order(self):
        report = convergence_study(random_state(6, 0), 1.0, [0.02, 0.01, 0.005])
        assert abs(report["order"] - 4.0) <= 0.2
        assert report["errors"] == sorted(report["errors"], reverse=True)

    def test_matches_exact_flow(self):
        state = random_state(8, 2)
        approx = evolve_ode(state, 0.5, 0.001)
        exact = decompose(evolve(assemble(state), 0.5))
        assert_allclose(approx.zeta.coeffs, exact.zeta.coeffs, atol=1e-7)
        assert_allclose(approx.phi.coeffs, exact.phi.coeffs, atol=1e-7)

    def test_low_degrees_frozen(self):
        zeta = SphericalField.zeros(4, real=True)
        zeta.coeffs[0] = 0.3
        zeta.coeffs[field_index(1, 0)] = 0.1
        zeta.coeffs[field_index(3, 0)] = 0.2
        phi = SphericalField.zeros(4, real=True)
        phi.coeffs[field_index(1, 0)] = -0.4
        result = evolve_ode(SurfaceState(zeta, phi), 2.0, 0.01)
        assert_allclose(result.zeta.coeffs[:4], zeta.coeffs[:4])
        assert_allclose(result.phi.coeffs[:4], phi.coeffs[:4])

    def test_unstable_step(self):
        with pytest.raises(ResolutionError):
            evolve_ode(random_state(64, 0), 1.0, 0.01)

    def test_bad_step(self):
        with pytest.raises(ValueError):
            evolve_ode(random_state(4, 0), 1.0, 0.0)


class TestInitialConditions:
    def test_zonal(self):
        state = initial_state("zonal:3", 6)
        assert_allclose(state.zeta.coefficient(3, 0), 1.0)
        assert l2_norm(state.phi) == 0.0

    def test_highest_weight_is_real(self):
        f = real_highest_weight(3, 5)
        assert f.is_conjugate_symmetric()
        assert_allclose(l2_norm(f), 1.0)
        initial_state("hw:3", 5)

    def test_random_is_seeded(self):
        a = initial_state("random:9", 6)
        b = initial_state("random:9", 6)
        assert_allclose(a.zeta.coeffs, b.zeta.coeffs)
        assert_allclose(a.zeta.coeffs[:4], 0.0)

    @pytest.mark.parametrize("init", ["zonal:1", "zonal:9", "hw:0", "cap:2", "zonal:x"])
    def test_rejected(self, init):
        with pytest.raises(ValueError):
            initial_state(init, 6)


class TestTimeSeries:
    def test_single_mode_is_stationary(self):
        rows = time_series(assemble(initial_state("zonal:2", 4)), 1.0, 0.25)
        assert [r["t"] for r in rows] == [0.0, 0.25, 0.5, 0.75, 1.0]
        assert_allclose([r["L2"] for r in rows], 2.0)
        assert_allclose([r["energy2"] for r in rows], 2.0)
        l4 = [r["L4"] for r in rows]
        assert_allclose(l4, l4[0], rtol=1e-12)
        assert_allclose(l4[0], 2.0 * norm_Lq(zonal(2, 4), 4), rtol=1e-12)

    @pytest.mark.parametrize("t, dt, times", [(0.3, 0.25, [0.0, 0.25, 0.3]), (0.3, 0.1, [0.0, 0.1, 0.2, 0.3]),
                                              (0.0, 0.5, [0.0])])
    def test_series_ends_at_t(self, t, dt, times):
        rows = time_series(assemble(initial_state("zonal:2", 4)), t, dt)
        assert_allclose([r["t"] for r in rows], times)
        assert rows[-1]["t"] == t

    def test_bad_arguments(self):
        with pytest.raises(ValueError):
            time_series(assemble(random_state(4, 0)), 1.0, 0.0)


class TestStrichartz:
    def test_single_mode_identity(self):
        check = single_mode_identity(3, 1, 5, 1.0, 4)
        assert check["relative_error"] <= 1e-6

    def test_under_resolved(self):
        u0 = assemble(random_state(8, 0))
        with pytest.raises(ResolutionError):
            strichartz_norm(u0, 1.0, 4, n_t=3)

    def test_bad_exponent(self):
        with pytest.raises(ValueError):
            strichartz_norm(assemble(random_state(4, 0)), 1.0, 3)

    def test_band_field(self):
        f = band_field(8, 8)
        assert_allclose(l2_norm(f), 1.0)
        support = [n for n in range(9) if f.coefficient(n, 0) != 0]
        assert support == [n for n in range(2, 9) if lam(n) >= lam(8) / 2]

    def test_report_is_resolved(self):
        report = strichartz_report(0.0, 4, 0.5, 8, n_samples=2, seed=1)
        assert [row["n_max"] for row in report["levels"]] == [2, 4, 8]
        assert report["resolution_change"] < 0.01
        assert all(len(row["random"]) == 2 for row in report["levels"])

    def test_smooth_quotient_does_not_grow(self):
        report = strichartz_report(3.0, 4, 0.5, 16, n_samples=4, seed=0)
        levels = report["levels"]
        assert levels[-1]["zonal"] <= levels[0]["zonal"]
        assert max(levels[-1]["random"]) <= max(levels[0]["random"])
