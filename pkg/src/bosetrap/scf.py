"""Self-consistent solution of the semiclassical minimization problem.

The Euler-Lagrange solution depends on momentum only through p^2, so the
momentum integral collapses to the integrated Bose function eta and the
fixed point runs on the radial thermal density rho(r) and the chemical
potential alone.  The full phase-space density gamma(p, r) is reconstructed
lazily for diagnostics and for direct evaluation of the free-energy
functional on arbitrary admissible pairs.
"""

from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq

from .kernels import bose_f, bose_f_prime, eta, li_exp
from .potentials import (RadialDensity, convolution_at_zero, interaction_energy,
                         radial_convolution, validate_assumption)
from .quadrature import RadialGrid, graded_gauss
from .special import ZETA3_CBRT
from . import ideal

__all__ = ["SCOptions", "SCState", "PhaseSpacePair", "solve_selfconsistent",
           "free_energy_of_state", "evaluate_functional", "reconstruct_pair",
           "sc_relative_entropy_to_state", "SolverError"]

_TAIL_EXP = 46.0


class SolverError(RuntimeError):
    """Fixed-point iteration failed; carries the last residual."""

    def __init__(self, message, residual=None, iterations=None):
        super().__init__(message)
        self.residual = residual
        self.iterations = iterations


@dataclass
class SCOptions:
    tol: float = 1e-9
    max_iter: int = 500
    damping: float = 0.5
    n_per_panel: int = 128
    mu_bracket: float = 80.0
    init: str = "ideal"  # or "uniform"
    grid: RadialGrid = None


@dataclass
class SCState:
    """Semiclassical minimizer data on a radial GL grid.

    w_eff includes the chemical-potential shift: W(r) = omega^2 r^2/4
    + lam (v*rho)(r) - lam (v*rho)(0) - mu, so the thermal density is
    beta^(-3/2) eta(beta W).
    """

    beta: float
    omega: float
    lam: float
    rho_thermal: RadialDensity
    g: float
    mu: float
    w_eff: np.ndarray
    free_energy: float
    residual: float
    iterations: int
    potential: dict = field(default_factory=dict)

    def total_density(self):
        return RadialDensity(self.rho_thermal.grid, self.rho_thermal.values,
                             point_mass=self.g, weights=self.rho_thermal.weights)

    def to_dict(self):
        return {
            "beta": self.beta, "omega": self.omega, "lambda": self.lam,
            "g": self.g, "mu": self.mu, "free_energy": self.free_energy,
            "residual": self.residual, "iterations": self.iterations,
            "potential": self.potential,
            "grid": self.rho_thermal.grid.tolist(),
            "grid_weights": self.rho_thermal.weights.tolist(),
            "rho_thermal": self.rho_thermal.values.tolist(),
            "w_eff": self.w_eff.tolist(),
        }

    @classmethod
    def from_dict(cls, d):
        rho = RadialDensity(np.array(d["grid"]), np.array(d["rho_thermal"]),
                            0.0, weights=np.array(d["grid_weights"]))
        return cls(d["beta"], d["omega"], d["lambda"], rho, d["g"], d["mu"],
                   np.array(d["w_eff"]), d["free_energy"], d["residual"],
                   d["iterations"], d.get("potential", {}))


def curvature_constant(omega, v, lam):
    """c in W(r) >= c omega^2 r^2: c = 1/4 - lam sup||D2v|| / (2 omega^2)."""
    return 0.25 - lam * v.hessian_sup / (2.0 * omega**2)


def _default_grid(beta, omega, v, lam, n_per_panel):
    c = max(curvature_constant(omega, v, lam), 0.05)
    rmax = np.sqrt(_TAIL_EXP / (beta * c * omega**2))
    return RadialGrid.graded(rmax, n_per_panel)


def _mass_and_mu(grid, beta, w0, tie_tol=1e-12):
    """Branch selection: returns (mu, g, rho_candidate values).

    Condensed if the thermal mass at mu = 0 falls short of 1, otherwise mu
    solves the unit-mass equation by bisection; ties resolve to the critical
    point mu = 0, g = 0.
    """
    prof0 = beta**-1.5 * eta(beta * w0)
    m0 = 4.0 * np.pi * float(np.dot(grid.w, grid.r**2 * prof0))
    deficit = 1.0 - m0
    if abs(deficit) <= tie_tol:
        return 0.0, 0.0, prof0
    if deficit > 0:
        return 0.0, deficit, prof0

    def mass_err(u):  # u = beta*mu <= 0
        prof = beta**-1.5 * eta(beta * w0 - u)
        return 4.0 * np.pi * float(np.dot(grid.w, grid.r**2 * prof)) - 1.0

    u = brentq(mass_err, -80.0, 0.0, xtol=1e-14, rtol=8.881784197001252e-16)
    mu = u / beta
    return mu, 0.0, beta**-1.5 * eta(beta * (w0 - mu))


def solve_selfconsistent(beta, omega, v, lam, opts=None):
    """Damped fixed point on the thermal density with inner normalization."""
    opts = opts or SCOptions()
    if lam < 0:
        raise ValueError("lambda must be nonnegative")
    report = validate_assumption(v, omega, lam)
    if not report.passed:
        raise ValueError(f"potential fails admissibility: {report.to_dict()}")

    grid = opts.grid or _default_grid(beta, omega, v, lam, opts.n_per_panel)
    r = grid.r
    if opts.init == "uniform":
        r0 = 0.5 * grid.rmax
        rho = np.where(r <= r0, 1.0 / (4.0 / 3.0 * np.pi * r0**3), 0.0)
    else:
        rho = ideal.thermal_profile(beta, omega, ideal.ideal_mu(beta, omega), r)
    g = max(0.0, 1.0 - 4.0 * np.pi * float(np.dot(grid.w, r**2 * rho)))

    theta = opts.damping
    prev_resid = np.inf
    mu = 0.0
    it = 0
    for it in range(1, opts.max_iter + 1):
        dens = RadialDensity.on_grid(grid, rho, point_mass=g)
        u_of_r = radial_convolution(v, dens)
        u_at_0 = convolution_at_zero(v, dens)
        w0 = 0.25 * omega**2 * r**2 + lam * (u_of_r - u_at_0)
        w0 = np.maximum(w0, 0.0)  # rounding guard at the origin
        mu, g_new, rho_cand = _mass_and_mu(grid, beta, w0)
        resid = 4.0 * np.pi * float(np.dot(grid.w, r**2 * np.abs(rho_cand - rho))) \
            + abs(g_new - g)
        if resid < opts.tol:
            rho, g = rho_cand, g_new
            break
        if resid > prev_resid:
            theta = max(theta * 0.5, 0.05)
        else:
            theta = min(opts.damping, theta * 1.25)
        rho = (1.0 - theta) * rho + theta * rho_cand
        g = max(0.0, 1.0 - 4.0 * np.pi * float(np.dot(grid.w, r**2 * rho)))
        prev_resid = resid
    else:
        raise SolverError(
            f"no convergence after {opts.max_iter} iterations (residual {resid:.3e})",
            residual=resid, iterations=opts.max_iter)

    dens = RadialDensity.on_grid(grid, rho, point_mass=g)
    u_of_r = radial_convolution(v, dens)
    u_at_0 = convolution_at_zero(v, dens)
    w_eff = np.maximum(0.25 * omega**2 * r**2 + lam * (u_of_r - u_at_0), 0.0) - mu
    state = SCState(beta=beta, omega=omega, lam=lam,
                    rho_thermal=RadialDensity.on_grid(grid, rho),
                    g=g, mu=mu, w_eff=w_eff, free_energy=0.0,
                    residual=resid, iterations=it, potential=v.describe())
    state.free_energy = free_energy_of_state(state, v)
    return state


def free_energy_of_state(state, v):
    """Free energy from the minimizer (Li_5/2 route).

    F = -beta^-1 (4 pi beta)^-3/2 * 4 pi int r^2 Li_5/2(e^-beta W) dr
        + lam (v*rho)(0) + mu - lam D(rho, rho).
    """
    beta, lam = state.beta, state.lam
    grid = RadialGrid(state.rho_thermal.grid, state.rho_thermal.weights)
    li = li_exp(2.5, beta * state.w_eff)
    log_term = -(1.0 / beta) * (4.0 * np.pi * beta) ** -1.5 * grid.volume_integral(li)
    dens = state.total_density()
    u_at_0 = convolution_at_zero(v, dens)
    dself = interaction_energy(dens, dens, v)
    return log_term + lam * u_at_0 + state.mu - lam * dself


@dataclass
class PhaseSpacePair:
    """Phase-space density gamma(p, r) on a GL product grid plus condensate g."""

    p_grid: RadialGrid
    r_grid: RadialGrid
    gamma: np.ndarray  # shape (n_p, n_r)
    g: float

    _PREF = (2.0 * np.pi) ** -3 * (4.0 * np.pi) ** 2

    def phase_integral(self, values):
        """(2 pi)^-3 int d^3p d^3x of a radially symmetric integrand."""
        wp = self.p_grid.w * self.p_grid.r**2
        wr = self.r_grid.w * self.r_grid.r**2
        return self._PREF * float(wp @ values @ wr)

    def thermal_mass(self):
        return self.phase_integral(self.gamma)

    def norm_defect(self):
        return self.thermal_mass() + self.g - 1.0

    def density(self):
        wp = self.p_grid.w * self.p_grid.r**2
        vals = (2.0 * np.pi) ** -3 * 4.0 * np.pi * (wp @ self.gamma)
        return RadialDensity.on_grid(self.r_grid, vals, point_mass=self.g)


def reconstruct_pair(state, n_p_per_panel=128):
    """gamma(p, r) = 1/(e^(beta(p^2 + W(r))) - 1) on a graded momentum grid."""
    beta = state.beta
    pmax = np.sqrt(_TAIL_EXP / beta)
    p_grid = RadialGrid.graded(pmax, n_p_per_panel)
    r_grid = RadialGrid(state.rho_thermal.grid, state.rho_thermal.weights)
    arg = beta * (np.square(p_grid.r)[:, None] + state.w_eff[None, :])
    gamma = 1.0 / np.expm1(arg)
    return PhaseSpacePair(p_grid, r_grid, gamma, state.g)


def evaluate_functional(pair, beta, omega, v, lam, admis_tol=1e-6):
    """Direct quadrature of the free-energy functional on an admissible pair."""
    defect = pair.norm_defect()
    if abs(defect) > admis_tol:
        raise ValueError(f"pair is not admissible: normalization defect {defect:.3e}")
    eps = np.square(pair.p_grid.r)[:, None] + 0.25 * omega**2 * np.square(pair.r_grid.r)[None, :]
    energy = pair.phase_integral(eps * pair.gamma)
    entropy_term = pair.phase_integral(bose_f(pair.gamma)) / beta
    dens = pair.density()
    interaction = lam * interaction_energy(dens, dens, v)
    return energy + entropy_term + interaction


def sc_relative_entropy_to_state(pair, state):
    """S_sc(m, gamma_state) = (2 pi)^-3 int [f(m) - f(g) - f'(g)(m - g)] >= 0."""
    beta = state.beta
    w_interp = np.interp(pair.r_grid.r, state.rho_thermal.grid, state.w_eff)
    arg = beta * (np.square(pair.p_grid.r)[:, None] + w_interp[None, :])
    gam = 1.0 / np.expm1(np.maximum(arg, 1e-300))
    m = pair.gamma
    integrand = bose_f(m) - bose_f(gam) - bose_f_prime(gam) * (m - gam)
    return pair.phase_integral(integrand)


def critical_beta_from_solver(omega, v, lam, opts=None, rel_tol=1e-4):
    """Locate the g > 0 boundary of the solver itself by bisection in beta."""
    beta0 = ZETA3_CBRT / omega
    lo, hi = 0.8 * beta0, 1.5 * beta0
    solve = lambda b: solve_selfconsistent(b, omega, v, lam, opts)
    if solve(lo).g > 0 or solve(hi).g == 0:
        raise SolverError("bracket does not straddle the condensation boundary")
    while (hi - lo) > rel_tol * beta0:
        mid = 0.5 * (lo + hi)
        if solve(mid).g > 0:
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)
