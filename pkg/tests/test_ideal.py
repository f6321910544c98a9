import numpy as np
import pytest
from scipy.integrate import quad

from bosetrap import ideal
from bosetrap.potentials import radial_fourier
from bosetrap.special import ZETA3, ZETA3_CBRT, ZETA4


class TestBetaCritical:
    def test_zeta3_by_series(self):
        k = np.arange(1, 200000, dtype=float)
        zeta3 = float(np.sum(k**-3.0)) + 1.0 / (2 * 199999.0**2)  # integral tail
        assert ideal.beta_critical(1.0) == pytest.approx(zeta3 ** (1 / 3), rel=1e-9)

    def test_scaling(self):
        assert ideal.beta_critical(2.0) == pytest.approx(0.5 * ideal.beta_critical(1.0))
        for om in [0.3, 1.7, 5.0]:
            assert om * ideal.beta_critical(om) == pytest.approx(ZETA3_CBRT)

    def test_domain(self):
        with pytest.raises(ValueError):
            ideal.beta_critical(0.0)


class TestIdealState:
    def test_condensed_closed_form(self):
        st = ideal.ideal_state(2 * ZETA3_CBRT, 1.0)
        assert st.g0 == pytest.approx(0.875, abs=1e-12)
        assert st.mu0 == 0.0

    def test_exact_criticality(self):
        st = ideal.ideal_state(ZETA3_CBRT, 1.0)
        assert st.g0 == 0.0
        assert st.mu0 == 0.0

    def test_normal_phase_quadrature_oracle(self):
        beta = 0.8 * ZETA3_CBRT
        st = ideal.ideal_state(beta, 1.0)
        assert st.g0 == 0.0 and st.mu0 < 0.0
        # 6D normalization collapses to 2D (radial p, radial r)
        def inner(r):
            f = lambda p: p * p / np.expm1(beta * (p * p + 0.25 * r * r - st.mu0))
            return quad(f, 0, 8, epsabs=1e-12)[0] * r * r
        total = quad(inner, 0, 14, epsabs=1e-11, limit=200)[0]
        total *= (2 * np.pi) ** -3 * (4 * np.pi) ** 2
        assert total == pytest.approx(1.0, abs=1e-7)

    def test_normalization_invariant(self):
        for bw in [0.8, 1.0, 1.4, 2.5]:
            st = ideal.ideal_state(bw * ZETA3_CBRT, 1.0)
            assert st.rho0.mass() == pytest.approx(1.0, abs=1e-8)
            assert st.g0 * st.mu0 == 0.0
            assert st.mu0 <= 0.0

    def test_g0_monotone_continuous(self):
        betas = np.linspace(0.7, 3.0, 40) * ZETA3_CBRT
        gs = np.array([ideal.ideal_state(b, 1.0).g0 for b in betas])
        mus = np.array([ideal.ideal_state(b, 1.0).mu0 for b in betas])
        assert np.all(np.diff(gs) >= -1e-12)
        assert np.all(gs[betas < ZETA3_CBRT] == 0)
        assert np.all(mus[betas < ZETA3_CBRT - 1e-9] < 0)
        assert np.all(mus[betas >= ZETA3_CBRT] == 0)
        # continuity: refining the grid shrinks the largest jump proportionally
        for vals in (gs, mus):
            j = int(np.argmax(np.abs(np.diff(vals))))
            fine = np.linspace(betas[j], betas[j + 1], 9)
            fine_vals = np.array([getattr(ideal.ideal_state(b, 1.0),
                                          "g0" if vals is gs else "mu0")
                                  for b in fine])
            coarse_jump = abs(vals[j + 1] - vals[j])
            assert np.max(np.abs(np.diff(fine_vals))) < 0.4 * coarse_jump


class TestIdealFreeEnergy:
    def test_condensed_closed_form_digits(self):
        beta = 2 * ZETA3_CBRT
        val = ideal.ideal_free_energy(beta, 1.0)
        assert val == pytest.approx(-ZETA4 / (beta * 8 * ZETA3), rel=1e-14)
        assert val == pytest.approx(-0.052926, abs=1e-6)

    def test_quadrature_oracle(self):
        # minimizer formula: beta^-1 (2pi)^-3 int ln(1 - e^{-beta(p^2+r^2 w^2/4 - mu)}) + mu
        for bw in [0.85, 1.6]:
            beta = bw * ZETA3_CBRT
            st = ideal.ideal_state(beta, 1.0)
            def inner(r):
                f = lambda p: p * p * np.log1p(
                    -np.exp(-beta * (p * p + 0.25 * r * r - st.mu0)))
                return quad(f, 0, 9, epsabs=1e-13)[0] * r * r
            val = quad(inner, 0, 15, epsabs=1e-12, limit=200)[0]
            val *= (2 * np.pi) ** -3 * (4 * np.pi) ** 2 / beta
            val += st.mu0
            assert ideal.ideal_free_energy(beta, 1.0) == pytest.approx(val, rel=1e-7)

    def test_monotone_in_temperature(self):
        betas = np.linspace(0.7, 3.0, 25) * ZETA3_CBRT
        vals = [ideal.ideal_free_energy(b, 1.0) for b in betas]
        assert np.all(np.diff(vals) > 0)  # F decreasing in T = increasing in beta


class TestRho0Fourier:
    def test_value_at_zero(self):
        beta = ZETA3_CBRT  # critical: thermal mass 1
        got = ideal.rho0_fourier(0.0, beta, 1.0)
        assert got == pytest.approx((2 * np.pi) ** -1.5, rel=1e-10)

    def test_nonnegative(self, rng):
        beta = 1.8 * ZETA3_CBRT
        ps = rng.uniform(0, 25, size=40)
        vals = ideal.rho0_fourier(ps, beta, 1.0)
        assert np.all(vals >= 0)

    def test_transform_oracle(self):
        beta = ZETA3_CBRT
        st = ideal.ideal_state(beta, 1.0)
        for p in [0.3, 1.0, 2.5]:
            direct = radial_fourier(st.rho0, p)
            assert ideal.rho0_fourier(p, beta, 1.0) == pytest.approx(direct, abs=1e-6)

    def test_requires_condensed_branch(self):
        with pytest.raises(ValueError):
            ideal.rho0_fourier(1.0, 0.5 * ZETA3_CBRT, 1.0)
