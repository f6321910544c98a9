"""Two-body interaction potentials and radial densities.

Potentials are radial, repulsive and of positive type; the admissibility
conditions (nonnegativity, integrability, nonnegative Fourier transform and
the strict Hessian bound against the trap curvature) are checked by
:func:`validate_assumption`.  Densities may carry a condensate point mass at
the origin, and convolutions against them expand the Dirac part explicitly.
"""

from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import quad
from scipy.interpolate import CubicSpline

from .quadrature import RadialGrid

__all__ = [
    "Potential",
    "RadialDensity",
    "ValidationReport",
    "make_gaussian_potential",
    "load_table_potential",
    "validate_assumption",
    "radial_convolution",
    "interaction_energy",
    "radial_fourier",
]


class Potential:
    """Radial two-body potential v(r) >= 0 with analytic metadata.

    profile, fourier and cumulative_tv are callables; ``cumulative_tv(u)``
    is the antiderivative int_0^u t v(t) dt that the radial convolution
    formula consumes.  ``coupling`` is the default lambda used by the CLI;
    solver functions take lambda explicitly and treat the profile as bare.
    """

    def __init__(self, profile, v0, l1_norm, fourier, hessian_sup,
                 cumulative_tv, coupling=1.0, name="custom", params=None):
        self.profile = profile
        self.v0 = float(v0)
        self.l1_norm = float(l1_norm)
        self.fourier = fourier
        self.hessian_sup = float(hessian_sup)
        self.cumulative_tv = cumulative_tv
        self.coupling = float(coupling)
        self.name = name
        self.params = dict(params or {})

    def __call__(self, r):
        return self.profile(np.asarray(r, dtype=float))

    def describe(self):
        return {"name": self.name, "params": self.params, "coupling": self.coupling}


def make_gaussian_potential(amplitude, width, coupling=1.0):
    """v(x) = a exp(-x^2 / (2 sigma^2)); everything analytic."""
    if amplitude <= 0 or width <= 0:
        raise ValueError("amplitude and width must be positive")
    a, sigma = float(amplitude), float(width)

    def profile(r):
        return a * np.exp(-np.square(r) / (2.0 * sigma**2))

    def fourier(p):
        return a * sigma**3 * np.exp(-0.5 * (sigma * np.asarray(p, dtype=float))**2)

    def cumulative_tv(u):
        return a * sigma**2 * (1.0 - np.exp(-np.square(u) / (2.0 * sigma**2)))

    return Potential(
        profile=profile,
        v0=a,
        l1_norm=a * (2.0 * np.pi * sigma**2) ** 1.5,
        fourier=fourier,
        hessian_sup=a / sigma**2,
        cumulative_tv=cumulative_tv,
        coupling=coupling,
        name="gaussian",
        params={"amplitude": a, "width": sigma},
    )


def _tabulated_potential(r_tab, v_tab, coupling, name, params):
    if np.any(np.diff(r_tab) <= 0):
        raise ValueError("table radii must be strictly increasing")
    rmax = float(r_tab[-1])
    spline = CubicSpline(r_tab, v_tab, extrapolate=False)

    def profile(r):
        r = np.asarray(r, dtype=float)
        out = np.where(r <= rmax, spline(np.clip(r, r_tab[0], rmax)), 0.0)
        return out

    l1_norm = 4.0 * np.pi * quad(lambda r: r**2 * float(profile(r)), 0.0, rmax,
                                 epsabs=1e-10, limit=200)[0]

    def fourier(p):
        p = np.atleast_1d(np.asarray(p, dtype=float))
        out = np.empty_like(p)
        for i, pi in enumerate(p):
            if pi < 1e-12:
                out[i] = l1_norm / (2.0 * np.pi) ** 1.5
            else:
                val = quad(lambda r: r * np.sin(pi * r) * float(profile(r)),
                           0.0, rmax, epsabs=1e-12, limit=400)[0]
                out[i] = (2.0 * np.pi) ** -1.5 * 4.0 * np.pi * val / pi
        return out if out.size > 1 else float(out[0])

    # second finite differences along a ray plus the transverse v'(r)/r term;
    # an estimate, not a certificate
    rr = np.linspace(r_tab[0], rmax, 4001)
    d1 = spline(rr, 1)
    d2 = spline(rr, 2)
    with np.errstate(divide="ignore", invalid="ignore"):
        transverse = np.where(rr > 1e-9, np.abs(d1 / rr), np.abs(d2))
    hessian_sup = float(np.max(np.maximum(np.abs(d2), transverse)))

    fine = np.linspace(0.0, rmax, 8193)
    tv = fine * np.where(fine <= rmax, np.nan_to_num(spline(np.clip(fine, r_tab[0], rmax))), 0.0)
    cum = np.concatenate([[0.0], np.cumsum((tv[1:] + tv[:-1]) * 0.5 * np.diff(fine))])
    cum_spline = CubicSpline(fine, cum)
    total = float(cum[-1])

    def cumulative_tv(u):
        u = np.asarray(u, dtype=float)
        return np.where(u >= rmax, total, cum_spline(np.clip(u, 0.0, rmax)))

    return Potential(profile, float(v_tab[0]), l1_norm, fourier, hessian_sup,
                     cumulative_tv, coupling, name, params)


def load_table_potential(path, coupling=1.0):
    """Potential from a two-column text table (r, v(r))."""
    data = np.loadtxt(path)
    if data.ndim != 2 or data.shape[1] < 2:
        raise ValueError("expected a two-column table (r, v)")
    return _tabulated_potential(data[:, 0], data[:, 1], coupling,
                                name="table", params={"path": str(path)})


@dataclass
class ValidationReport:
    checks: dict = field(default_factory=dict)

    def add(self, name, passed, detail=""):
        self.checks[name] = {"passed": bool(passed), "detail": detail}

    @property
    def passed(self):
        return all(c["passed"] for c in self.checks.values())

    def to_dict(self):
        return {"passed": self.passed, "checks": self.checks}


def validate_assumption(v, omega, lam=1.0, fourier_tol=1e-10):
    """Admissibility report: v >= 0, v in L1, v-hat >= 0, Hessian bound.

    The Hessian condition is the strict bound lam * sup||D^2 v|| < omega^2/2
    that keeps the effective trap convex.
    """
    report = ValidationReport()
    r = np.linspace(0.0, 12.0, 481)
    vals = v(r)
    report.add("nonnegative", bool(np.all(vals >= -1e-14)),
               f"min v on sample grid = {float(np.min(vals)):.3e}")
    report.add("integrable", np.isfinite(v.l1_norm) and v.l1_norm >= 0,
               f"L1 norm = {v.l1_norm:.6g}")
    p = np.linspace(0.0, 20.0, 241)
    fv = np.atleast_1d(v.fourier(p))
    report.add("positive_type", bool(np.all(fv >= -fourier_tol)),
               f"min v-hat on sample grid = {float(np.min(fv)):.3e}")
    bound = 0.5 * omega**2
    report.add("hessian_bound", lam * v.hessian_sup < bound,
               f"lambda*sup||D2v|| = {lam * v.hessian_sup:.6g} vs omega^2/2 = {bound:.6g}")
    return report


class RadialDensity:
    """Density on a radial grid plus an optional point mass at the origin.

    ``weights`` are 1D quadrature weights for the grid; when omitted,
    trapezoid weights are used, which is adequate for tabulated input but
    solver-produced densities carry their GL weights.
    """

    def __init__(self, grid, values, point_mass=0.0, weights=None):
        self.grid = np.asarray(grid, dtype=float)
        self.values = np.asarray(values, dtype=float)
        if self.grid.shape != self.values.shape:
            raise ValueError("grid and values must have the same shape")
        if np.any(np.diff(self.grid) <= 0):
            raise ValueError("grid must be strictly increasing")
        if np.any(self.values < -1e-13):
            raise ValueError("density values must be nonnegative")
        if point_mass < 0:
            raise ValueError("point mass must be nonnegative")
        self.point_mass = float(point_mass)
        if weights is None:
            w = np.empty_like(self.grid)
            d = np.diff(self.grid)
            w[0] = 0.5 * d[0]
            w[1:-1] = 0.5 * (d[:-1] + d[1:])
            w[-1] = 0.5 * d[-1]
            self.weights = w
        else:
            self.weights = np.asarray(weights, dtype=float)

    @classmethod
    def on_grid(cls, grid: RadialGrid, values, point_mass=0.0):
        return cls(grid.r, values, point_mass, weights=grid.w)

    def thermal_mass(self):
        return 4.0 * np.pi * float(np.dot(self.weights, self.grid**2 * self.values))

    def mass(self):
        return self.thermal_mass() + self.point_mass

    def interpolate(self, r):
        return np.interp(np.asarray(r, dtype=float), self.grid, self.values,
                         left=self.values[0], right=0.0)


def _convolve_values(v, rho, out_r):
    """(v * rho_thermal)(r) on out_r via the double radial reduction."""
    s = rho.grid
    ws = rho.weights * s * rho.values
    out_r = np.asarray(out_r, dtype=float)
    rp = out_r[:, None] + s[None, :]
    rm = np.abs(out_r[:, None] - s[None, :])
    inner = v.cumulative_tv(rp) - v.cumulative_tv(rm)
    raw = 2.0 * np.pi * (inner @ ws)
    vals = np.empty_like(out_r)
    small = out_r < 1e-12
    vals[~small] = raw[~small] / out_r[~small]
    if np.any(small):
        vals[small] = 4.0 * np.pi * float(np.dot(rho.weights, s**2 * v(s) * rho.values))
    return vals


def radial_convolution(v, rho, out_r=None):
    """(v * rho)(r) including the point-mass contribution g v(r).

    With out_r omitted the result is evaluated on rho's own grid.
    """
    if out_r is None:
        out_r = rho.grid
    out_r = np.atleast_1d(np.asarray(out_r, dtype=float))
    vals = _convolve_values(v, rho, out_r)
    if rho.point_mass > 0:
        vals = vals + rho.point_mass * v(out_r)
    return vals


def convolution_at_zero(v, rho):
    """(v * rho)(0) = 4 pi int s^2 v(s) rho(s) ds + g v(0)."""
    core = 4.0 * np.pi * float(np.dot(rho.weights, rho.grid**2 * v(rho.grid) * rho.values))
    return core + rho.point_mass * v.v0


def interaction_energy(rho1, rho2, v):
    """D(rho1, rho2) = (1/2) iint v(x - y) d rho1 d rho2, point masses expanded."""
    g1, g2 = rho1.point_mass, rho2.point_mass
    conv2_at_1 = _convolve_values(v, rho2, rho1.grid)
    cross = 4.0 * np.pi * float(np.dot(rho1.weights, rho1.grid**2 * rho1.values * conv2_at_1))
    term_pp = g1 * g2 * v.v0
    term_p1 = g1 * (convolution_at_zero(v, RadialDensity(rho2.grid, rho2.values,
                                                         0.0, rho2.weights)))
    term_p2 = g2 * (convolution_at_zero(v, RadialDensity(rho1.grid, rho1.values,
                                                         0.0, rho1.weights)))
    return 0.5 * (term_pp + term_p1 + term_p2 + cross)


def radial_fourier(rho, p):
    """Unitary Fourier transform of a radial density (point mass included)."""
    p = np.atleast_1d(np.asarray(p, dtype=float))
    r, w, vals = rho.grid, rho.weights, rho.values
    out = np.empty_like(p)
    for i, pi in enumerate(p):
        if pi < 1e-12:
            out[i] = rho.thermal_mass() * (2.0 * np.pi) ** -1.5
        else:
            out[i] = (2.0 * np.pi) ** -1.5 * (4.0 * np.pi / pi) * float(
                np.dot(w, r * np.sin(pi * r) * vals))
    out += rho.point_mass * (2.0 * np.pi) ** -1.5
    return out if out.size > 1 else float(out[0])
