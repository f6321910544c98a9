import numpy as np
import pytest

from bosetrap import scf, tc
from bosetrap.ideal import beta_critical, thermal_profile
from bosetrap.potentials import RadialDensity, make_gaussian_potential, radial_fourier
from bosetrap.quadrature import RadialGrid


@pytest.fixture(scope="module")
def v():
    return make_gaussian_potential(1.0, 1.0)


class TestApplyT:
    def test_lambda_zero_is_constant_map(self, v, rng):
        grid = tc.critical_grid(1.0, v, 0.0)
        beta0 = beta_critical(1.0)
        vals = np.exp(-0.3 * grid.r**2) + 0.2 * np.exp(-((grid.r - 2) ** 2))
        mass = 4 * np.pi * np.dot(grid.w, grid.r**2 * vals)
        rho = RadialDensity.on_grid(grid, vals / mass)
        new_rho, beta = tc.apply_T(rho, 0.0, 1.0, v)
        assert beta == pytest.approx(beta0, rel=1e-12)
        ref = thermal_profile(beta0, 1.0, 0.0, grid.r)
        assert np.allclose(new_rho.values, ref, rtol=1e-10)

    def test_unit_mass_by_construction(self, v):
        grid = tc.critical_grid(1.0, v, 0.05)
        rho = RadialDensity.on_grid(grid, thermal_profile(beta_critical(1.0), 1.0,
                                                          0.0, grid.r))
        new_rho, _ = tc.apply_T(rho, 0.05, 1.0, v)
        assert new_rho.mass() == pytest.approx(1.0, abs=1e-9)

    def test_beta_inside_bracket(self, v, rng):
        lam = 0.05
        grid = tc.critical_grid(1.0, v, lam)
        lo, hi = tc.beta_bracket(lam, 1.0, v)
        for _ in range(5):
            vals = np.abs(rng.uniform(0.2, 1.0)
                          * np.exp(-rng.uniform(0.2, 0.6) * grid.r**2))
            mass = 4 * np.pi * np.dot(grid.w, grid.r**2 * vals)
            rho = RadialDensity.on_grid(grid, vals / mass)
            _, beta = tc.apply_T(rho, lam, 1.0, v)
            assert lo <= beta <= hi

    def test_rejects_point_mass(self, v):
        grid = tc.critical_grid(1.0, v, 0.0)
        rho = RadialDensity.on_grid(grid, np.zeros_like(grid.r), point_mass=1.0)
        with pytest.raises(ValueError):
            tc.apply_T(rho, 0.0, 1.0, v)


class TestFindTc:
    def test_lambda_zero_exact(self, v):
        res = tc.find_tc(0.0, 1.0, v)
        assert res.beta_c == pytest.approx(beta_critical(1.0), rel=1e-12)
        assert res.iterations == 1

    def test_shift_is_positive(self, v):
        res = tc.find_tc(0.05, 1.0, v)
        assert res.beta_c > beta_critical(1.0)
        lo, hi = res.bracket
        assert lo <= res.beta_c <= hi
        assert res.rho_c.mass() == pytest.approx(1.0, abs=1e-9)

    def test_independent_of_initialization(self, v):
        res1 = tc.find_tc(0.05, 1.0, v, tol=1e-10)
        res2 = tc.find_tc(0.05, 1.0, v, tol=1e-10,
                          rho_init=lambda r: np.exp(-0.2 * r**2) * (1 + 0.3 * r))
        assert res2.beta_c == pytest.approx(res1.beta_c, abs=1e-9)
        grid = RadialGrid(res1.rho_c.grid, res1.rho_c.weights)
        l1 = 4 * np.pi * np.dot(grid.w, grid.r**2
                                * np.abs(res1.rho_c.values - res2.rho_c.values))
        assert l1 <= 10 * 1e-10

    def test_consistent_with_sc_solver_boundary(self, v):
        lam = 0.05
        res = tc.find_tc(lam, 1.0, v)
        eps = 1e-3 * beta_critical(1.0)
        above = scf.solve_selfconsistent(res.beta_c + eps, 1.0, v, lam)
        below = scf.solve_selfconsistent(res.beta_c - eps, 1.0, v, lam)
        assert above.g > 0 and above.mu == 0.0
        assert below.g == 0.0 and below.mu < 0.0

    def test_critical_density_fourier_positive(self, v):
        res = tc.find_tc(0.04, 1.0, v)
        ps = np.linspace(0.0, 12.0, 30)
        vals = np.array([radial_fourier(res.rho_c, p) for p in ps])
        assert np.all(vals >= -1e-8)


class TestContraction:
    def test_lipschitz_ratio_below_one(self, v):
        ratios = tc.measured_contraction(0.05, 1.0, v, n_pairs=25, seed=3)
        assert ratios.size >= 20
        assert ratios.max() < 1.0


class TestXi:
    def test_positive(self, v):
        assert tc.xi_coefficient(1.0, v) > 0
        assert tc.xi_coefficient(2.0, v) > 0

    def test_dimensional_reduction_oracle(self, v):
        xi1 = tc.xi_coefficient(2.0, v)
        xi2 = tc.xi_coefficient_2d(2.0, v)
        assert xi1 == pytest.approx(xi2, rel=1e-5)

    def test_mean_field_attraction_profile(self, v):
        # v * rho_0 peaks at the origin for the critical ideal density
        from bosetrap.potentials import convolution_at_zero, radial_convolution
        beta0, rho0 = tc._critical_ideal_density(1.0)
        r = np.linspace(0.0, 8.0, 60)
        conv = radial_convolution(v, rho0, r)
        assert np.all(convolution_at_zero(v, rho0) - conv >= -1e-12)


class TestSlope:
    def test_richardson_matches_xi(self, v):
        rep = tc.tc_slope_check(2.0, v, [0.04, 0.02, 0.01])
        assert rep.rel_deviation < 0.05
        assert rep.extrapolated_slope > 0

    def test_residual_shrinks_with_lambda(self, v):
        xi = tc.xi_coefficient(2.0, v)
        rep = tc.tc_slope_check(2.0, v, [0.04, 0.02])
        err = [abs(s - xi) for s in rep.slopes]  # ordered by ascending lambda
        assert err[0] < 0.75 * err[1]  # first-order law: error ~ lambda

    def test_serialization(self, v):
        import json
        rep = tc.tc_slope_check(2.0, v, [0.02, 0.01])
        json.dumps(rep.to_dict())
        res = tc.find_tc(0.02, 2.0, v)
        json.dumps(res.to_dict())
