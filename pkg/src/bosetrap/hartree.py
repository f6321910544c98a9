"""Finite-N grand-canonical Hartree solver in the semiclassical scaling.

hbar = N^(-1/3) and the pair interaction enters as lam v / N, so the
effective one-body potential is omega^2 r^2/4 + lam (v * rho_hat) with
rho_hat the unit-mass total density.  The operator is diagonalized in an
angular-momentum channel decomposition on a uniform radial grid (three-point
finite differences, Dirichlet ends), occupations are Bose factors at a
chemical potential fixed by the total number, and the density is iterated
to self-consistency.

Eigenvectors are never retained on the state: consumers (Husimi slices,
the dual objective) re-diagonalize channels on demand, which keeps the
largest runs inside a few hundred MB.
"""

from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import eigh_tridiagonal, eigvalsh_tridiagonal
from scipy.optimize import brentq

from .ideal import thermal_profile, ideal_mu
from .potentials import RadialDensity, interaction_energy, radial_convolution, \
    convolution_at_zero, validate_assumption

__all__ = ["HartreeOptions", "HartreeState", "HusimiSlice", "DistanceReport",
           "solve_hartree", "condensate_fraction", "spectral_gap",
           "husimi_slice", "compare_to_semiclassical", "dual_objective",
           "hartree_free_energy", "ideal_reference", "trace_zeta_excited",
           "default_rays", "coherent_overlap_sq", "HartreeError"]


class HartreeError(RuntimeError):
    pass


@dataclass
class HartreeOptions:
    n_grid: int = 2048
    cutoff_nkt: float = 20.0     # E_cut = e0 + cutoff_nkt / beta
    tol: float = 1e-8            # L1 residual on the unit-mass density
    max_iter: int = 60
    damping: float = 0.85
    tail_fraction: float = 1e-6  # allowed occupation beyond the cutoff


@dataclass
class HartreeState:
    n_particles: int
    hbar: float
    beta: float
    omega: float
    lam: float
    r: np.ndarray                # interior grid points, uniform spacing
    dr: float
    v_eff: np.ndarray            # omega^2 r^2/4 + lam (v*rho_hat), no mu
    channel_energies: list       # channel_energies[l] = ndarray of e_{nl}
    occupations: list            # matching Bose occupations
    mu: float
    rho: RadialDensity           # unit-mass total density on the grid
    condensate_number: float
    gap: float
    residual: float
    iterations: int
    e_cut: float
    potential: dict = field(default_factory=dict)

    @property
    def e0(self):
        return float(self.channel_energies[0][0])

    def summary(self):
        return {
            "N": self.n_particles, "hbar": self.hbar, "beta": self.beta,
            "omega": self.omega, "lambda": self.lam, "mu": self.mu,
            "condensate_number": self.condensate_number,
            "condensate_fraction": self.condensate_number / self.n_particles,
            "gap": self.gap, "gap_over_hbar_omega": self.gap / (self.hbar * self.omega),
            "residual": self.residual, "iterations": self.iterations,
            "e_cut": self.e_cut, "n_channels": len(self.channel_energies),
            "spectrum_head": [float(x) for x in
                              np.sort(np.concatenate(self.channel_energies))[:12]],
            "potential": self.potential,
        }


def _grid(beta, omega, hbar, n_grid):
    r_edge2 = 4.0 * max(46.0 / beta, 46.0 * hbar * omega) / omega**2
    R = np.sqrt(r_edge2)
    dr = R / (n_grid + 1)
    return np.arange(1, n_grid + 1) * dr, dr


def _channel_eigh(r, dr, hbar, v_eff, ell, e_cut, vectors=True):
    """Eigenpairs of -hbar^2 u'' + [hbar^2 l(l+1)/r^2 + v_eff] u below e_cut."""
    diag = 2.0 * hbar**2 / dr**2 + hbar**2 * ell * (ell + 1) / r**2 + v_eff
    off = np.full(r.size - 1, -hbar**2 / dr**2)
    if vectors:
        w, u = eigh_tridiagonal(diag, off, select="v", select_range=(-np.inf, e_cut))
        return w, u / np.sqrt(dr)  # continuum normalization int u^2 dr = 1
    w = eigvalsh_tridiagonal(diag, off, select="v", select_range=(-np.inf, e_cut))
    return w, None


def _solve_mu(energies_flat, degeneracy_flat, beta, n_target, e0):
    """Chemical potential below e0 fixing the total particle number."""

    def number(s):  # s = e0 - mu > 0
        return float(np.sum(degeneracy_flat / np.expm1(beta * (energies_flat - e0 + s))))

    s_lo = 1.0 / (beta * 20.0 * n_target)
    s_hi = 80.0 / beta
    if number(s_lo) < n_target:
        raise HartreeError("number equation bracket failed near condensation")
    s = brentq(lambda x: number(x) - n_target, s_lo, s_hi,
               xtol=1e-16, rtol=8.881784197001252e-16)
    return e0 - s


def _oscillator_tail(e_cut, mu, beta, hbar, omega, n_levels=4000):
    """Occupation estimate beyond the cutoff from the bare oscillator ladder."""
    n0 = max(int(np.ceil((e_cut / (hbar * omega)) - 1.5)), 0)
    n = np.arange(n0, n0 + n_levels)
    e = hbar * omega * (n + 1.5)
    keep = e > e_cut
    g = (n[keep] + 1.0) * (n[keep] + 2.0) / 2.0
    arg = np.minimum(beta * (e[keep] - mu), 500.0)
    return float(np.sum(g / np.expm1(arg)))


def _sc_seed(beta, omega, hbar, lam, r, v=None):
    """Semiclassical thermal profile plus a ground-mode condensate bump."""
    if v is not None and lam > 0:
        from .scf import solve_selfconsistent
        scs = solve_selfconsistent(beta, omega, v, lam)
        th = scs.rho_thermal.interpolate(r)
        g = scs.g
    else:
        mu0 = ideal_mu(beta, omega)
        th = thermal_profile(beta, omega, mu0, r)
        mass_th = min(1.0, np.trapezoid(4 * np.pi * r**2 * th, r))
        g = max(0.0, 1.0 - mass_th)
    bump = (omega / (2.0 * np.pi * hbar)) ** 1.5 * np.exp(-omega * r**2 / (2.0 * hbar))
    return th + g * bump


def solve_hartree(n_particles, beta, omega, v=None, lam=0.0, opts=None):
    """Self-consistent Hartree state; v = None or lam = 0 is the ideal gas."""
    opts = opts or HartreeOptions()
    if n_particles < 10:
        raise ValueError("need N >= 10")
    interacting = v is not None and lam > 0.0
    if interacting:
        report = validate_assumption(v, omega, lam)
        if not report.passed:
            raise ValueError(f"potential fails admissibility: {report.to_dict()}")
    hbar = float(n_particles) ** (-1.0 / 3.0)
    r, dr = _grid(beta, omega, hbar, opts.n_grid)
    trap = 0.25 * omega**2 * r**2
    w_simp = _simpson_weights(r, dr)

    rho_vals = _sc_seed(beta, omega, hbar, lam, r, v if interacting else None)
    theta = opts.damping
    resid = np.inf
    for it in range(1, opts.max_iter + 1):
        if interacting:
            dens = RadialDensity(r, rho_vals, 0.0, weights=w_simp)
            v_eff = trap + lam * radial_convolution(v, dens)
        else:
            v_eff = trap
        e0_est = 1.5 * hbar * omega + (v_eff[0] - trap[0])
        e_cut = e0_est + opts.cutoff_nkt / beta
        channel_e, channel_u = [], []
        ell = 0
        while True:
            w, u = _channel_eigh(r, dr, hbar, v_eff, ell, e_cut)
            if w.size == 0:
                break
            channel_e.append(w)
            channel_u.append(u)
            ell += 1
        energies = np.concatenate(channel_e)
        degen = np.concatenate([np.full(e.size, 2.0 * l + 1.0)
                                for l, e in enumerate(channel_e)])
        e0 = float(channel_e[0][0])
        mu = _solve_mu(energies, degen, beta, n_particles, e0)
        occ = [1.0 / np.expm1(beta * (e - mu)) for e in channel_e]
        new_rho = np.zeros_like(r)
        for l, (u, n_l) in enumerate(zip(channel_u, occ)):
            new_rho += (2.0 * l + 1.0) * (u**2 @ n_l)
        new_rho /= 4.0 * np.pi * r**2 * n_particles
        resid = 4.0 * np.pi * float(np.dot(w_simp, r**2 * np.abs(new_rho - rho_vals)))
        if not interacting or resid < opts.tol:
            rho_vals = new_rho
            break
        rho_vals = (1.0 - theta) * rho_vals + theta * new_rho
    else:
        raise HartreeError(f"no self-consistency after {opts.max_iter} iterations "
                           f"(residual {resid:.3e})")

    tail = _oscillator_tail(e_cut, mu, beta, hbar, omega)
    if tail > opts.tail_fraction * n_particles:
        raise HartreeError(f"energy cutoff too low: {tail:.3e} particles beyond e_cut")

    n0 = float(occ[0][0])
    e1_candidates = [channel_e[0][1] if channel_e[0].size > 1 else np.inf,
                     channel_e[1][0] if len(channel_e) > 1 else np.inf]
    gap = float(min(e1_candidates) - e0)
    rho = RadialDensity(r, rho_vals, 0.0, weights=w_simp)
    return HartreeState(
        n_particles=n_particles, hbar=hbar, beta=beta, omega=omega,
        lam=lam if interacting else 0.0, r=r, dr=dr, v_eff=v_eff,
        channel_energies=channel_e, occupations=occ, mu=mu, rho=rho,
        condensate_number=n0, gap=gap, residual=float(resid), iterations=it,
        e_cut=e_cut, potential=v.describe() if interacting else {"name": "none"})


def _simpson_weights(r, dr):
    """Composite weights on the closed interval [0, R] restricted to the
    interior nodes (the integrand vanishes at both ends for our densities)."""
    n_full = r.size + 2
    w = np.full(n_full, 2.0)
    w[1::2] = 4.0
    w[0] = w[-1] = 1.0
    if n_full % 2 == 0:  # trapezoid patch on the last cell
        w[-1] = 2.5
        w[-2] = 2.5
    return (dr / 3.0) * w[1:-1]


def condensate_fraction(state):
    """Largest single-mode occupation divided by N."""
    best = max(float(np.max(o)) for o in state.occupations)
    return best / state.n_particles


def spectral_gap(state):
    return state.gap


def ideal_reference(n_particles, beta, omega):
    """Exact finite-N ideal gas from the closed-form oscillator spectrum.

    Levels hbar omega (n + 3/2) with degeneracy (n+1)(n+2)/2; returns
    (condensate fraction, chemical potential).
    """
    hbar = float(n_particles) ** (-1.0 / 3.0)
    n_lev = int(120.0 / (beta * hbar * omega)) + 200
    n = np.arange(n_lev)
    e = hbar * omega * (n + 1.5)
    g = (n + 1.0) * (n + 2.0) / 2.0
    mu = _solve_mu(e, g, beta, n_particles, float(e[0]))
    n0 = 1.0 / np.expm1(beta * (e[0] - mu))
    return n0 / n_particles, mu


def trace_zeta_excited(state, zeta_func):
    """sum over excited modes of degeneracy * zeta(beta (e - mu))."""
    total = 0.0
    for l, e in enumerate(state.channel_energies):
        vals = zeta_func(state.beta * (e - state.mu))
        if l == 0:
            vals = vals[1:]
        total += (2.0 * l + 1.0) * float(np.sum(vals))
    return total


# ---------------------------------------------------------------------------
# Coherent states and Husimi slices
# ---------------------------------------------------------------------------

def coherent_overlap_sq(p1, q1, p2, q2, hbar):
    """|<l_{p1,q1}, l_{p2,q2}>|^2 for the Gaussian window (closed form)."""
    dq = np.asarray(q1, dtype=float) - np.asarray(q2, dtype=float)
    dp = np.asarray(p1, dtype=float) - np.asarray(p2, dtype=float)
    return float(np.exp(-(dq @ dq + dp @ dp) / (2.0 * hbar)))


def _log_legendre_scalar(lmax, x):
    """log P_l(x) for x >= 1, stable against overflow."""
    logs = np.empty(lmax + 1)
    p_prev, p_cur = 1.0, x
    shift = 0.0
    logs[0] = 0.0
    if lmax >= 1:
        logs[1] = np.log(x) if x > 0 else -np.inf
    for l in range(1, lmax):
        p_next = ((2 * l + 1) * x * p_cur - l * p_prev) / (l + 1)
        if p_next > 1e250:
            p_next /= 1e250
            p_cur /= 1e250
            shift += np.log(1e250)
        p_prev, p_cur = p_cur, p_next
        logs[l + 1] = np.log(p_cur) + shift
    return logs


@dataclass
class HusimiSlice:
    samples: list          # (p_vec, q_vec, value)
    window: str = "gaussian pi^-3/4 exp(-x^2/2)"

    def values(self):
        return np.array([s[2] for s in self.samples])


def default_rays(state, n_samples=8):
    """Sample points on the p || q and p perp q rays spanning the thermal shell."""
    beta, omega = state.beta, state.omega
    eps = np.linspace(0.5, 5.0, n_samples) / beta
    pts = []
    for e in eps:
        p = np.sqrt(0.5 * e)
        q = np.sqrt(2.0 * e) / omega
        pts.append((np.array([0.0, 0.0, p]), np.array([0.0, 0.0, q]), "parallel"))
        pts.append((np.array([p, 0.0, 0.0]), np.array([0.0, 0.0, q]), "perpendicular"))
    return pts


def _scaled_i_miller(z, lmax):
    """i_l(z) e^(-Re z) for l = 0..lmax by Miller downward recurrence.

    z: complex array with Re z >= 0 and |z| > 0.  Per-element rescaling keeps
    the pass inside double range; the result keeps relative accuracy even
    where i_l is exponentially small (underflow to 0 is harmless there).
    """
    z = np.asarray(z)
    n = z.size
    l_start = lmax + 60
    inv_z = 1.0 / z
    val = np.zeros((lmax + 1, n), dtype=complex)
    shift_at = np.zeros((lmax + 1, n))
    upper = np.zeros(n, dtype=complex)       # path value at l+1
    cur = np.full(n, 1e-280 + 0j)            # seed at l_start
    shift = np.zeros(n)
    for l in range(l_start, -1, -1):
        if l <= lmax:
            val[l] = cur
            shift_at[l] = shift
        lower = upper + (2 * l + 1) * inv_z * cur
        upper = cur
        cur = lower
        mag = np.abs(cur)
        mask = mag > 1e250
        if np.any(mask):
            upper[mask] /= mag[mask]
            cur[mask] /= mag[mask]
            shift[mask] += np.log(mag[mask])
    # cur now holds the (rescaled) path value at l = -1; val[0]: l = 0
    i0_true = (np.exp(z - z.real) - np.exp(-z - z.real)) / (2.0 * z)
    with np.errstate(under="ignore"):
        base = i0_true / val[0]
        out = val * base[None, :] * np.exp(shift_at - shift_at[0][None, :])
    return out


def _sample_factors(p_vec, q_vec, hbar, r, w_quad, lmax):
    """Weighted overlap rows t_l(r) and per-l log factors for one (p, q).

    The mode-summed overlap weight is
        sum_m |<l_pq, phi_nlm>|^2
            = (pi hbar)^(-3/2) 4 pi (2l+1) P_l(x_c) |R_nl|^2 e^(-q^2/hbar),
    R_nl = int r u_nl(r) e^(-r^2/2hbar) i_l(kappa r) dr, kappa^2 = w.w,
    w = (q - i p)/hbar and x_c = (w.conj w)/|w.w|.  Two log-stabilized
    routes: a solid-harmonic power series (exact through the degenerate
    locus w.w -> 0) when |kappa| r_max is small, else a Gauss-Legendre
    representation of the scaled Bessel function.
    Returns (t, logfac) with contribution_l = (2l+1) e^(logfac_l) sum_n
    occ_nl |t_l . u_nl|^2.
    """
    q2 = float(q_vec @ q_vec)
    p2 = float(p_vec @ p_vec)
    ww = complex((q_vec - 1j * p_vec) @ (q_vec - 1j * p_vec)) / hbar**2
    big_x = (q2 + p2) / hbar**2
    rmax = float(r[-1])
    kappa = np.sqrt(ww)
    ells = np.arange(lmax + 1)

    if abs(kappa) * rmax <= 18.0:
        # series route: i_l(z)/kappa^l = r^l sum_j (kappa^2 r^2)^j 2^-j /(j! (2l+2j+1)!!)
        zz = ww * np.square(r)  # complex, |zz| <= 324
        ratio = np.clip(r / rmax, 1e-300, None)
        s_hat = np.ones((lmax + 1, r.size), dtype=complex)
        term = np.ones_like(s_hat)
        for j in range(80):
            denom = 2.0 * (j + 1.0) * (2.0 * ells[:, None] + 2.0 * j + 3.0)
            term = term * zz[None, :] / denom
            s_hat += term
            if np.max(np.abs(term)) < 1e-18:
                break
        t = (w_quad * r * np.exp(-np.square(r) / (2.0 * hbar)))[None, :] \
            * ratio[None, :] ** ells[:, None] * s_hat
        # log g_l with g_l = y^l P_l(X/y), y = |w.w|; rescaled recurrence
        y = abs(ww)
        log_g = np.empty(lmax + 1)
        big_x = max(big_x, 1e-300)  # p = q = 0: only the l = 0 term survives
        g_prev, g_cur, shift = 1.0, big_x, 0.0
        log_g[0] = 0.0
        if lmax >= 1:
            log_g[1] = np.log(big_x)
        for l in range(1, lmax):
            g_next = ((2 * l + 1) * big_x * g_cur - l * y**2 * g_prev) / (l + 1)
            if g_next > 1e250:
                g_next /= 1e250
                g_cur /= 1e250
                shift += np.log(1e250)
            g_prev, g_cur = g_cur, g_next
            log_g[l + 1] = np.log(max(g_cur, 1e-300)) + shift
        from scipy.special import gammaln
        log_dfact = gammaln(2 * ells + 2) - gammaln(ells + 1) - ells * np.log(2.0)
        logfac = log_g + 2 * ells * np.log(rmax) - 2 * log_dfact - q2 / hbar
        return t, logfac

    # recurrence route: scaled i_l by Miller downward recursion, which keeps
    # relative accuracy at every l (the P_l(x_c) factor amplifies any absolute
    # noise floor, so quadrature representations are not safe here)
    x_c = max(big_x / abs(ww), 1.0)
    itilde = _scaled_i_miller(kappa * r, lmax)
    payload = w_quad * r * np.exp(-np.square(r - hbar * kappa.real) / (2.0 * hbar))
    t = payload[None, :] * itilde
    logfac = _log_legendre_scalar(lmax, x_c) + hbar * kappa.real**2 - q2 / hbar
    return t, logfac


@dataclass
class HusimiSlice:
    samples: list          # (p_vec, q_vec, value)
    window: str = "gaussian pi^-3/4 exp(-x^2/2)"

    def values(self):
        return np.array([s[2] for s in self.samples])


def default_rays(state, n_samples=8):
    """Sample points on the p || q and p perp q rays spanning the thermal shell."""
    beta, omega = state.beta, state.omega
    eps = np.linspace(0.5, 5.0, n_samples) / beta
    pts = []
    for e in eps:
        p = np.sqrt(0.5 * e)
        q = np.sqrt(2.0 * e) / omega
        pts.append((np.array([0.0, 0.0, p]), np.array([0.0, 0.0, q]), "parallel"))
        pts.append((np.array([p, 0.0, 0.0]), np.array([0.0, 0.0, q]), "perpendicular"))
    return pts


def husimi_slice(state, rays=None, n_samples=8, exclude_ground=True,
                 n_grid=768, occupancy=None, l_channels=None):
    """Husimi function of the (ground-mode-depleted) Hartree operator sampled
    along phase-space rays.

    Channels are re-diagonalized once and streamed through every sample, so
    nothing large is retained.  ``n_grid`` downsamples the radial grid used
    for the overlap quadrature.  ``occupancy(l, energies)`` overrides the
    Bose occupations and ``l_channels`` restricts the channel sum; both are
    diagnostic hooks for synthetic finite-rank operators.
    """
    pts = rays if rays is not None else default_rays(state, n_samples)
    hbar = state.hbar
    step = max(1, state.r.size // n_grid)
    r_s = state.r[::step]
    w_trap = np.full(r_s.size, state.dr * step)
    w_trap[0] = w_trap[-1] = 0.5 * state.dr * step
    lmax = len(state.channel_energies) - 1 if l_channels is None else max(l_channels)
    pre = [_sample_factors(p_vec, q_vec, hbar, r_s, w_trap, lmax)
           for p_vec, q_vec, *_ in pts]
    values = np.zeros(len(pts))
    pref = (np.pi * hbar) ** -1.5 * 4.0 * np.pi
    channels = range(lmax + 1) if l_channels is None else l_channels
    for l in channels:
        w, u = _channel_eigh(state.r, state.dr, hbar, state.v_eff, l, state.e_cut)
        occ = occupancy(l, w) if occupancy is not None \
            else 1.0 / np.expm1(state.beta * (w - state.mu))
        u_s = u[::step, :]
        for j, (t, logfac) in enumerate(pre):
            if logfac[l] < -1400.0:
                continue
            rtil = t[l] @ u_s                              # (n_states,)
            mag2 = np.abs(rtil) ** 2
            if l == 0 and exclude_ground:
                mag2 = mag2.copy()
                mag2[0] = 0.0
            with np.errstate(over="ignore"):
                values[j] += (2.0 * l + 1.0) * float(
                    np.sum(np.exp(np.log(np.maximum(mag2, 1e-300)) + logfac[l]) * occ))
    values *= pref
    return HusimiSlice([(p, q, float(val)) for (p, q, *_), val in zip(pts, values)])


@dataclass
class DistanceReport:
    """Sampled-ray discrepancies; the Husimi metric weights each sample with
    the local phase-space volume factor p^2 q^2, a ray discretization of the
    L1(R^6) distance (not the full 6D norm)."""

    n_particles: int
    condensate_gap: float       # |N0/N - g_sc|
    husimi_l1: float            # phase-space-weighted mean |m - gamma_sc|
    husimi_max: float
    samples: int

    def to_dict(self):
        return {"N": self.n_particles, "condensate_gap": self.condensate_gap,
                "husimi_l1": self.husimi_l1, "husimi_max": self.husimi_max,
                "samples": self.samples,
                "metric": "ray samples weighted by p^2 q^2"}


def compare_to_semiclassical(hstate, scstate, n_samples=8):
    """Condensate-fraction and sampled Husimi-slice discrepancies."""
    if abs(hstate.beta - scstate.beta) > 1e-9 or abs(hstate.omega - scstate.omega) > 1e-9:
        raise ValueError("hstate and scstate must share (beta, omega)")
    if abs(hstate.lam - scstate.lam) > 1e-12:
        raise ValueError("hstate and scstate must share lambda")
    gap0 = abs(condensate_fraction(hstate) - scstate.g)
    sl = husimi_slice(hstate, n_samples=n_samples)
    diffs, weights = [], []
    for p_vec, q_vec, m_val in sl.samples:
        q = float(np.linalg.norm(q_vec))
        p2 = float(p_vec @ p_vec)
        w_sc = np.interp(q, scstate.rho_thermal.grid, scstate.w_eff)
        gam = 1.0 / np.expm1(scstate.beta * (p2 + w_sc))
        diffs.append(abs(m_val - gam))
        weights.append(p2 * q * q)
    diffs = np.array(diffs)
    weights = np.array(weights)
    weighted = float(np.sum(weights * diffs) / np.sum(weights))
    return DistanceReport(hstate.n_particles, gap0, weighted,
                          float(diffs.max()), diffs.size)


# ---------------------------------------------------------------------------
# Alternative variational principle (duality)
# ---------------------------------------------------------------------------

def _log_trace_terms(channel_e, beta, mu):
    total = 0.0
    for l, e in enumerate(channel_e):
        total += (2.0 * l + 1.0) * float(np.sum(np.log1p(-np.exp(-beta * (e - mu)))))
    return total


def _spectrum_for_field(state, field_vals, e_cut):
    channel_e = []
    ell = 0
    while True:
        w, _ = _channel_eigh(state.r, state.dr, state.hbar, field_vals, ell,
                             e_cut, vectors=False)
        if w.size == 0:
            break
        channel_e.append(w)
        ell += 1
    return channel_e


def dual_objective(eta, hstate, v, cutoff_nkt=27.0):
    """Concave dual of the Hartree problem evaluated at a trial density.

    eta is a RadialDensity of mass ~ N; the one-body field is the trap plus
    lam (v * eta) / N, mu is solved so the Bose-factor trace equals N, and
    the value is beta^-1 tr ln(1 - e^{-beta(H - mu)}) + mu N - lam D(eta, eta)/N.
    Never exceeds the Hartree free energy; equality at eta = N rho_hat.
    """
    beta, lam, n_part = hstate.beta, hstate.lam, hstate.n_particles
    trap = 0.25 * hstate.omega**2 * hstate.r**2
    if lam > 0:
        field_vals = trap + (lam / n_part) * radial_convolution(
            v, eta, out_r=hstate.r)
    else:
        field_vals = trap
    e_cut = 1.5 * hstate.hbar * hstate.omega + (field_vals[0] - trap[0]) \
        + cutoff_nkt / beta
    channel_e = _spectrum_for_field(hstate, field_vals, e_cut)
    energies = np.concatenate(channel_e)
    degen = np.concatenate([np.full(e.size, 2.0 * l + 1.0)
                            for l, e in enumerate(channel_e)])
    mu = _solve_mu(energies, degen, beta, n_part, float(channel_e[0][0]))
    log_tr = _log_trace_terms(channel_e, beta, mu)
    d_term = (lam / n_part) * interaction_energy(eta, eta, v) if lam > 0 else 0.0
    return log_tr / beta + mu * n_part - d_term


def hartree_free_energy(state, v=None):
    """F^H from the solved state's own spectrum (the minimizer formula)."""
    log_tr = _log_trace_terms(state.channel_energies, state.beta, state.mu)
    if state.lam > 0:
        n_rho = RadialDensity(state.rho.grid, state.n_particles * state.rho.values,
                              0.0, weights=state.rho.weights)
        d_term = (state.lam / state.n_particles) * interaction_energy(n_rho, n_rho, v)
    else:
        d_term = 0.0
    return log_tr / state.beta + state.mu * state.n_particles - d_term
