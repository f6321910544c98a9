"""BEC transition temperature via the critical-density contraction map.

At the critical point the condensate and chemical potential both vanish, so
the self-consistent equation closes on a unit-mass density alone: each
application of the map rebuilds the effective potential from the density
and re-solves the inverse temperature that restores unit mass.  The map
contracts for weak coupling; its fixed point is (beta_c, rho_c).  The
first-order shift coefficient of beta_c(lambda) reduces to a 1D radial
quadrature against eta'.
"""

from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import quad
from scipy.optimize import brentq

from .ideal import beta_critical, thermal_profile
from .kernels import eta, eta_prime
from .potentials import RadialDensity, convolution_at_zero, radial_convolution
from .quadrature import RadialGrid

__all__ = ["TcResult", "SlopeReport", "apply_T", "find_tc", "beta_bracket",
           "xi_coefficient", "xi_coefficient_2d", "tc_slope_check",
           "measured_contraction", "critical_grid"]

_TAIL_EXP = 46.0


class ContractionError(RuntimeError):
    """Iteration of the map diverged (coupling outside the contraction regime)."""


@dataclass
class TcResult:
    lam: float
    beta_c: float
    rho_c: RadialDensity
    iterations: int
    residual: float
    bracket: tuple

    def to_dict(self):
        return {
            "lambda": self.lam, "beta_c": self.beta_c,
            "iterations": self.iterations, "residual": self.residual,
            "bracket": list(self.bracket),
            "grid": self.rho_c.grid.tolist(),
            "rho_c": self.rho_c.values.tolist(),
        }


@dataclass
class SlopeReport:
    lambdas: list
    beta_cs: list
    slopes: list
    extrapolated_slope: float
    xi: float
    rel_deviation: float
    details: dict = field(default_factory=dict)

    def to_dict(self):
        return {
            "lambdas": list(self.lambdas), "beta_cs": list(self.beta_cs),
            "slopes": list(self.slopes),
            "extrapolated_slope": self.extrapolated_slope,
            "xi": self.xi, "rel_deviation": self.rel_deviation,
            "details": self.details,
        }


def beta_bracket(lam, omega, v):
    """(1 + c lam)^(-1/2) beta_0 <= beta <= (1 - c lam)^(-1/2) beta_0.

    c = 2 sup||D2v|| / omega^2 < 1 under the admissibility bound; the
    two-sided curvature estimate on the effective potential gives the
    two-sided mass estimate behind the bracket.
    """
    beta0 = beta_critical(omega)
    c = 2.0 * v.hessian_sup / omega**2
    if lam * c >= 1.0:
        raise ValueError("coupling too large for the curvature bracket")
    return beta0 * (1.0 + c * lam) ** -0.5, beta0 * (1.0 - c * lam) ** -0.5


def critical_grid(omega, v, lam, n_per_panel=128):
    c_curv = max(0.25 - lam * v.hessian_sup / (2.0 * omega**2), 0.05)
    beta_lo = beta_bracket(lam, omega, v)[0]
    rmax = np.sqrt(_TAIL_EXP / (beta_lo * c_curv * omega**2))
    return RadialGrid.graded(rmax, n_per_panel)


def apply_T(rho, lam, omega, v):
    """One application of the map: returns (new unit-mass density, beta).

    beta is the unique root of the unit-mass condition for the effective
    potential built from rho; uniqueness follows from strict monotonicity
    of the mass in beta.
    """
    grid = RadialGrid(rho.grid, rho.weights)
    if rho.point_mass != 0.0:
        raise ValueError("apply_T expects a thermal density without point mass")
    u_of_r = radial_convolution(v, rho)
    u_at_0 = convolution_at_zero(v, rho)
    w = np.maximum(0.25 * omega**2 * grid.r**2 + lam * (u_of_r - u_at_0), 0.0)

    def mass_minus_one(beta):
        prof = beta**-1.5 * eta(beta * w)
        return 4.0 * np.pi * float(np.dot(grid.w, grid.r**2 * prof)) - 1.0

    if lam > 0:
        lo, hi = beta_bracket(lam, omega, v)
        lo, hi = 0.995 * lo, 1.005 * hi
    else:
        beta0 = beta_critical(omega)
        lo, hi = 0.5 * beta0, 2.0 * beta0
    try:
        beta = brentq(mass_minus_one, lo, hi, xtol=1e-15,
                      rtol=8.881784197001252e-16)
    except ValueError as exc:
        raise ContractionError(f"beta bisection bracket failed: {exc}") from exc
    new_vals = beta**-1.5 * eta(beta * w)
    return RadialDensity.on_grid(grid, new_vals), beta


def _l1(grid, a, b):
    return 4.0 * np.pi * float(np.dot(grid.w, grid.r**2 * np.abs(a - b)))


def find_tc(lam, omega, v, tol=1e-10, max_iter=200, n_per_panel=128,
            rho_init=None):
    """Iterate the map from the ideal critical density (or a caller-supplied
    unit-mass start) to its fixed point."""
    grid = critical_grid(omega, v, lam, n_per_panel)
    beta0 = beta_critical(omega)
    if rho_init is not None:
        vals = np.maximum(rho_init(grid.r), 0.0)
        mass = 4.0 * np.pi * float(np.dot(grid.w, grid.r**2 * vals))
        rho = RadialDensity.on_grid(grid, vals / mass)
    else:
        rho = RadialDensity.on_grid(grid, thermal_profile(beta0, omega, 0.0, grid.r))
    beta = beta0
    prev_resid = np.inf
    n_up = 0
    for it in range(1, max_iter + 1):
        new_rho, beta = apply_T(rho, lam, omega, v)
        resid = _l1(grid, new_rho.values, rho.values)
        rho = new_rho
        if resid < tol:
            return TcResult(lam, beta, rho, it, resid,
                            beta_bracket(lam, omega, v) if lam > 0 else (beta0, beta0))
        n_up = n_up + 1 if resid > prev_resid else 0
        if n_up >= 5:
            raise ContractionError(
                f"residual increased for 5 consecutive iterations (lambda={lam})")
        prev_resid = resid
    raise ContractionError(f"no fixed point after {max_iter} iterations "
                           f"(residual {resid:.3e})")


def measured_contraction(lam, omega, v, n_pairs=50, seed=0, n_per_panel=96):
    """Lipschitz ratios of the map on random unit-mass density pairs."""
    rng = np.random.default_rng(seed)
    grid = critical_grid(omega, v, lam, n_per_panel)
    rmax = grid.rmax

    def random_density():
        k = rng.integers(2, 5)
        vals = np.zeros_like(grid.r)
        for _ in range(k):
            center = rng.uniform(0.0, 0.5 * rmax)
            width = rng.uniform(0.1, 0.4) * rmax
            vals += rng.uniform(0.2, 1.0) * np.exp(-((grid.r - center) / width) ** 2)
        mass = 4.0 * np.pi * float(np.dot(grid.w, grid.r**2 * vals))
        return RadialDensity.on_grid(grid, vals / mass)

    ratios = []
    for _ in range(n_pairs):
        r1, r2 = random_density(), random_density()
        t1, _ = apply_T(r1, lam, omega, v)
        t2, _ = apply_T(r2, lam, omega, v)
        dist = _l1(grid, r1.values, r2.values)
        if dist < 1e-12:
            continue
        ratios.append(_l1(grid, t1.values, t2.values) / dist)
    return np.array(ratios)


def _critical_ideal_density(omega, n_per_panel=192):
    beta0 = beta_critical(omega)
    rmax = np.sqrt(4.0 * _TAIL_EXP / (beta0 * omega**2))
    grid = RadialGrid.graded(rmax, n_per_panel)
    return beta0, RadialDensity.on_grid(grid, thermal_profile(beta0, omega, 0.0, grid.r))


def xi_coefficient(omega, v):
    """Mean-field shift coefficient, reduced to a 1D radial quadrature.

    The momentum integral of gamma_0^2 e^(beta_0 eps) collapses to
    -(2 pi)^3 beta_0^(-3/2) eta'(beta_0 w), leaving

        Xi = -(beta_0^(-1/2) / 3) * 4 pi int r^2 eta'(beta_0 w(r)) D(r) dr,

    with w = omega^2 r^2 / 4 and D(r) = (v*rho_0)(0) - (v*rho_0)(r) >= 0.
    The integrable eta' singularity at the origin is tamed by the u = r^2
    substitution on the innermost piece.
    """
    beta0, rho0 = _critical_ideal_density(omega)
    u_at_0 = convolution_at_zero(v, rho0)

    def delta_v(r):
        return u_at_0 - radial_convolution(v, rho0, np.atleast_1d(r))[0]

    a = 0.25 * beta0 * omega**2

    def integrand(r):
        return -(r**2) * eta_prime(a * r**2) * delta_v(r)

    r_cross = 0.5 / np.sqrt(a)
    inner = 0.5 * quad(lambda u: -np.sqrt(u) * eta_prime(a * u) * delta_v(np.sqrt(u)),
                       0.0, r_cross**2, epsabs=1e-13, limit=300)[0]
    outer = quad(integrand, r_cross, rho0.grid[-1], epsabs=1e-13, limit=300)[0]
    return (beta0**-0.5 / 3.0) * 4.0 * np.pi * (inner + outer)


def xi_coefficient_2d(omega, v):
    """Brute-force oracle: nested (radial p, radial x) quadrature of the
    defining phase-space integral, no eta' reduction."""
    beta0, rho0 = _critical_ideal_density(omega)
    u_at_0 = convolution_at_zero(v, rho0)
    pmax = np.sqrt(_TAIL_EXP / beta0)

    def p_integral(w):
        def f(p):
            u = beta0 * (p * p + w)
            em = np.expm1(u)
            return p * p * np.exp(u) / (em * em)
        return quad(f, 0.0, pmax, epsabs=1e-13, limit=300)[0]

    def r_integrand(r):
        w = 0.25 * omega**2 * r * r
        dv = u_at_0 - radial_convolution(v, rho0, np.atleast_1d(r))[0]
        return r * r * dv * p_integral(w)

    val = quad(r_integrand, 0.0, rho0.grid[-1], epsabs=1e-12, limit=200)[0]
    return 2.0 * beta0 / (3.0 * np.pi) * val


def tc_slope_check(omega, v, lambda_grid, tol=1e-10):
    """Fits (beta_c(lambda)/beta_0 - 1)/lambda and extrapolates lambda -> 0."""
    beta0 = beta_critical(omega)
    lams = sorted(float(x) for x in lambda_grid)
    beta_cs, slopes = [], []
    for lam in lams:
        res = find_tc(lam, omega, v, tol=tol)
        beta_cs.append(res.beta_c)
        slopes.append((res.beta_c / beta0 - 1.0) / lam)
    coeffs = np.polyfit(lams, slopes, deg=len(lams) - 1)
    extrapolated = float(coeffs[-1])
    xi = xi_coefficient(omega, v)
    rel = abs(extrapolated - xi) / abs(xi)
    return SlopeReport(lams, beta_cs, slopes, extrapolated, xi, rel,
                       details={"beta0": beta0})
