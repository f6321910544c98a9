"""Closed-form semiclassical ideal Bose gas (v = 0).

Every interacting solver is validated against this module: condensation
threshold, condensate fraction, chemical potential, thermal density profile
and free energy are all explicit in polylogarithms.
"""

from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq
from scipy.special import zeta as hurwitz_zeta

from .potentials import RadialDensity
from .quadrature import RadialGrid
from .special import ZETA3, ZETA3_CBRT, ZETA4, eta, li_exp

__all__ = ["IdealState", "beta_critical", "ideal_state", "ideal_free_energy",
           "ideal_mu", "thermal_profile", "rho0_fourier"]

_TAIL_EXP = 46.0  # eta argument at the grid edge; tail mass < 1e-19


@dataclass(frozen=True)
class IdealState:
    beta: float
    omega: float
    g0: float
    mu0: float
    rho0: RadialDensity
    free_energy: float


def beta_critical(omega):
    """beta_0 = zeta(3)^(1/3) / omega."""
    if omega <= 0:
        raise ValueError("omega must be positive")
    return ZETA3_CBRT / omega


def ideal_mu(beta, omega):
    """Chemical potential: 0 when condensed, else the Li_3 inversion root."""
    bw = beta * omega
    if bw >= ZETA3_CBRT:
        return 0.0
    target = bw**3
    func = lambda u: li_exp(3.0, -u) - target  # u = beta * mu <= 0
    lo = -80.0
    return brentq(func, lo, 0.0, xtol=1e-14, rtol=8.881784197001252e-16) / beta


def thermal_profile(beta, omega, mu, r):
    """rho_th(r) = beta^(-3/2) eta(beta (omega^2 r^2 / 4 - mu))."""
    arg = beta * (0.25 * omega**2 * np.square(r) - mu)
    return beta**-1.5 * eta(arg)


def default_grid(beta, omega, curvature=0.25, n_per_panel=128):
    rmax = np.sqrt(_TAIL_EXP / (beta * curvature * omega**2))
    return RadialGrid.graded(rmax, n_per_panel)


def ideal_state(beta, omega, grid=None):
    """Full ideal-gas solution at inverse temperature beta."""
    if beta <= 0 or omega <= 0:
        raise ValueError("beta and omega must be positive")
    bw = beta * omega
    if grid is None:
        grid = default_grid(beta, omega)
    if bw >= ZETA3_CBRT:
        mu0 = 0.0
        g0 = 1.0 - ZETA3 / bw**3
    else:
        mu0 = ideal_mu(beta, omega)
        g0 = 0.0
    rho = RadialDensity.on_grid(grid, thermal_profile(beta, omega, mu0, grid.r),
                                point_mass=g0)
    return IdealState(beta, omega, g0, mu0, rho, ideal_free_energy(beta, omega))


def ideal_free_energy(beta, omega):
    """F_0 = -zeta(4)/(beta (beta omega)^3) condensed, Li_4 variant otherwise."""
    bw = beta * omega
    if bw >= ZETA3_CBRT:
        return -ZETA4 / (beta * bw**3)
    mu0 = ideal_mu(beta, omega)
    return -li_exp(4.0, -beta * mu0) / (beta * bw**3) + mu0


def rho0_fourier(p, beta, omega, n_direct=64, n_tail=24):
    """Fourier transform of the thermal ideal density at mu_0 = 0.

    rho0-hat(p) = (2 pi)^(-3/2) (beta omega)^(-3) sum_a a^(-3) e^(-p^2/(beta a omega^2)),
    each Gaussian summand manifestly nonnegative.  The tail beyond the direct
    sum is resummed through Hurwitz zeta values.
    """
    bw = beta * omega
    if bw < ZETA3_CBRT - 1e-12:
        raise ValueError("rho0_fourier requires the condensed/critical branch (mu0 = 0)")
    p = np.atleast_1d(np.asarray(p, dtype=float))
    c = np.square(p) / (beta * omega**2)
    a_split = max(n_direct, int(4 * np.max(c)) + 1)
    alphas = np.arange(1, a_split + 1)
    direct = np.einsum("a,ap->p", alphas**-3.0,
                       np.exp(-np.outer(1.0 / alphas, c)))
    tail = np.zeros_like(c)
    fact = 1.0
    for j in range(n_tail):
        if j > 0:
            fact *= j
        tail += (-c) ** j / fact * hurwitz_zeta(3.0 + j, a_split + 1)
    out = (2.0 * np.pi) ** -1.5 * bw**-3 * (direct + tail)
    return out if out.size > 1 else float(out[0])
