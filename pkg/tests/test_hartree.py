import numpy as np
import pytest
from scipy.special import gammaln

from bosetrap import hartree as H
from bosetrap import scf
from bosetrap.potentials import RadialDensity, make_gaussian_potential
from bosetrap.special import ZETA3_CBRT

BETA_W = 2 * ZETA3_CBRT


@pytest.fixture(scope="module")
def v():
    return make_gaussian_potential(1.0, 1.0)


@pytest.fixture(scope="module")
def ideal_512():
    return H.solve_hartree(512, BETA_W, 1.0)


@pytest.fixture(scope="module")
def matched_512():
    # omega = 2 matches the Gaussian coherent-state window: closed-form Husimi
    return H.solve_hartree(512, BETA_W / 2.0, 2.0)


@pytest.fixture(scope="module")
def interacting_512(v):
    return H.solve_hartree(512, BETA_W, 1.0, v, lam=0.05)


def matched_husimi_exact(state, p, q, exclude_ground=True):
    """Poisson-weighted shell sum, valid when the window matches the trap."""
    hbar, omega = state.hbar, state.omega
    s = (p @ p + q @ q) / (2 * hbar)
    n = np.arange(1 if exclude_ground else 0, 700)
    occ = 1.0 / np.expm1(state.beta * (hbar * omega * (n + 1.5) - state.mu))
    if s == 0:
        pois = np.where(n == 0, 1.0, 0.0)
    else:
        pois = np.exp(-s + n * np.log(s) - gammaln(n + 1))
    return float(np.sum(occ * pois))


class TestOscillatorOracle:
    def test_eigenvalues(self, ideal_512):
        hw = ideal_512.hbar
        for ell in range(3):
            got = ideal_512.channel_energies[ell][:4] / hw
            expect = 2 * np.arange(4) + ell + 1.5
            assert got == pytest.approx(expect, rel=2e-3)

    def test_total_number(self, ideal_512):
        total = sum((2 * l + 1) * o.sum()
                    for l, o in enumerate(ideal_512.occupations))
        assert total == pytest.approx(512.0, rel=1e-9)

    def test_condensate_vs_exact_ideal_sum(self, ideal_512):
        ref, _ = H.ideal_reference(512, BETA_W, 1.0)
        assert H.condensate_fraction(ideal_512) == pytest.approx(ref, abs=2e-4)

    def test_gap_is_hbar_omega(self, ideal_512):
        assert ideal_512.gap == pytest.approx(ideal_512.hbar, rel=1e-3)

    def test_density_normalized(self, ideal_512):
        assert ideal_512.rho.mass() == pytest.approx(1.0, abs=1e-8)

    def test_condensate_grows_with_beta(self):
        cold = H.solve_hartree(216, 4 * ZETA3_CBRT, 1.0)
        colder = H.solve_hartree(216, 8 * ZETA3_CBRT, 1.0)
        assert H.condensate_fraction(colder) > H.condensate_fraction(cold) > 0.9

    def test_rejects_tiny_n(self):
        with pytest.raises(ValueError):
            H.solve_hartree(5, BETA_W, 1.0)


class TestTrends:
    def test_ideal_condensate_trend(self):
        devs = []
        for n in (216, 512, 1331):
            st = H.solve_hartree(n, BETA_W, 1.0)
            devs.append(abs(H.condensate_fraction(st) - 0.875))
        assert devs[0] > devs[1] > devs[2]

    def test_interacting_number_and_residual(self, interacting_512):
        st = interacting_512
        total = sum((2 * l + 1) * o.sum() for l, o in enumerate(st.occupations))
        assert total == pytest.approx(512.0, rel=1e-9)
        assert st.residual < 1e-8
        assert st.mu < st.e0

    def test_gap_positive_interacting(self, interacting_512):
        hw = interacting_512.hbar
        assert interacting_512.gap / hw > 0.5

    def test_trace_scaling_lemma(self):
        # tr[Q zeta(beta(H - mu))] stays within a bounded multiple of
        # (beta hbar omega)^-3 across the N sweep
        zeta = lambda t: (1 + np.exp(np.minimum(t, 500))) / np.expm1(np.minimum(t, 500)) ** 2
        ratios = []
        for n in (216, 512, 1331):
            st = H.solve_hartree(n, BETA_W, 1.0)
            val = H.trace_zeta_excited(st, zeta)
            ratios.append(val * (st.beta * st.hbar) ** 3)
        ratios = np.array(ratios)
        assert np.all(ratios > 0)
        assert ratios.max() / ratios.min() < 1.5


class TestHusimi:
    def test_coherent_overlap_closed_form(self, rng):
        hbar = 0.21
        for _ in range(5):
            p1, q1 = rng.normal(size=3), rng.normal(size=3)
            assert H.coherent_overlap_sq(p1, q1, p1, q1, hbar) == pytest.approx(1.0)
            p2, q2 = rng.normal(size=3), rng.normal(size=3)
            val = H.coherent_overlap_sq(p1, q1, p2, q2, hbar)
            expect = np.exp(-(np.sum((q1 - q2) ** 2) + np.sum((p1 - p2) ** 2))
                            / (2 * hbar))
            assert val == pytest.approx(expect, rel=1e-12)

    def test_matched_window_closed_form(self, matched_512):
        sl = H.husimi_slice(matched_512, n_samples=5)
        for p, q, val in sl.samples:
            exact = matched_husimi_exact(matched_512, p, q)
            assert val == pytest.approx(exact, rel=5e-3)

    def test_values_nonnegative_bounded(self, matched_512):
        sl = H.husimi_slice(matched_512, n_samples=6)
        vals = sl.values()
        n_max = max(float(np.max(o)) for o in matched_512.occupations)
        assert np.all(vals >= 0)
        assert np.all(vals <= n_max)

    def test_phase_space_normalization_synthetic(self, matched_512):
        # single (n_r=1, l=0) mode with unit occupation: the full 6D integral
        # (2 pi hbar)^-3 int m d(p,q) must equal the trace (= 1).  m depends
        # on |p|, |q| and the relative angle, so integrate all three.
        st = matched_512
        hbar = st.hbar

        def occupancy(l, w):
            occ = np.zeros_like(w)
            if l == 0 and w.size > 1:
                occ[1] = 1.0
            return occ

        from bosetrap.quadrature import gauss_legendre
        n_pq, n_mu = 28, 12
        pmax = np.sqrt(2 * hbar * 42)
        pn, pw = gauss_legendre(0, pmax, n_pq)
        qn, qw = gauss_legendre(0, pmax, n_pq)
        mu_n, mu_w = gauss_legendre(-1.0, 1.0, n_mu)
        integral = 0.0
        for mu, wmu in zip(mu_n, mu_w):
            sin_t = np.sqrt(max(1.0 - mu * mu, 0.0))
            rays = [(np.array([p * sin_t, 0.0, p * mu]),
                     np.array([0.0, 0.0, q]), "grid")
                    for p in pn for q in qn]
            sl = H.husimi_slice(st, rays=rays, exclude_ground=False,
                                occupancy=occupancy, l_channels=[0])
            vals = sl.values().reshape(n_pq, n_pq)
            integral += wmu * float((pw * pn**2) @ vals @ (qw * qn**2))
        integral *= (2 * np.pi * hbar) ** -3 * 8 * np.pi**2
        assert integral == pytest.approx(1.0, rel=1e-3)

    def test_pure_coherent_state_value(self, matched_512):
        # occupancy concentrated on the ground state reproduces the coherent
        # overlap with the matched ground mode: m(p,q) = n0 |<l_pq, phi_0>|^2
        st = matched_512
        p = np.array([0.0, 0.0, 0.4])
        q = np.array([0.0, 0.0, 0.6])
        occupancy = lambda l, w: np.where(
            (l == 0) & (np.arange(w.size) == 0), 1.0, 0.0)
        sl = H.husimi_slice(st, rays=[(p, q, "x")], exclude_ground=False,
                            occupancy=occupancy, l_channels=[0])
        expect = H.coherent_overlap_sq(p, q, np.zeros(3), np.zeros(3), st.hbar)
        assert sl.samples[0][2] == pytest.approx(expect, rel=1e-3)


class TestCompare:
    def test_mismatched_beta_raises(self, ideal_512, v):
        scs = scf.solve_selfconsistent(1.1 * BETA_W, 1.0, v, 0.0)
        with pytest.raises(ValueError):
            H.compare_to_semiclassical(ideal_512, scs)

    def test_report_fields(self, interacting_512, v):
        scs = scf.solve_selfconsistent(BETA_W, 1.0, v, 0.05)
        rep = H.compare_to_semiclassical(interacting_512, scs, n_samples=4)
        assert rep.condensate_gap > 0
        assert rep.husimi_l1 > 0
        assert rep.samples == 8
        import json
        json.dumps(rep.to_dict())


class TestDuality:
    def test_equality_at_hartree_density(self, interacting_512, v):
        st = interacting_512
        fh = H.hartree_free_energy(st, v)
        eta = RadialDensity(st.rho.grid, st.n_particles * st.rho.values, 0.0,
                            st.rho.weights)
        dual = H.dual_objective(eta, st, v)
        assert dual == pytest.approx(fh, rel=1e-6)

    def test_random_trials_below(self, interacting_512, v, rng):
        st = interacting_512
        fh = H.hartree_free_energy(st, v)
        tol = 1e-6 * abs(fh)
        for _ in range(4):
            width = rng.uniform(0.8, 3.0)
            vals = st.n_particles * (2 * np.pi * width**2) ** -1.5 \
                * np.exp(-st.r**2 / (2 * width**2))
            eta = RadialDensity(st.r, vals, 0.0, st.rho.weights)
            assert H.dual_objective(eta, st, v) <= fh + tol
