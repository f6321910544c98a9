"""Property-test engines for the standalone trace and phase-space inequalities.

Small, brute-forceable instances: coherent-state resolution of the identity,
the Berezin-Lieb inequality for coherent-state-quantized symbols, trace
convexity against projections, coercivity of the phase-space and operator
relative entropies, and the positive-type lower bound that converts the pair
interaction into a one-body potential.  Existential constants are measured
and reported, never asserted against a literature value.
"""

from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad
from scipy.special import gammaln

from .kernels import bose_f, bose_f_prime
from .potentials import interaction_energy, radial_convolution
from .quadrature import gauss_legendre

__all__ = [
    "HermiteProbe", "EnergySymbol", "PhaseSampleSet",
    "hermite_values", "coherent_overlap_1d",
    "coherent_resolution_check", "berezin_lieb_check", "trace_convexity_check",
    "phase_coercivity_ratio", "operator_coercivity_ratio",
    "operator_relative_entropy", "positive_type_bound_check",
    "random_phase_samples", "random_operator_pair",
    "bose_symbol", "gaussian_symbol", "exponential_symbol", "indicator_symbol",
    "trace_convexity_bruteforce",
]


# ---------------------------------------------------------------------------
# Coherent-state resolution of the identity
# ---------------------------------------------------------------------------

def hermite_values(n_max, xi):
    """Normalized Hermite functions h_0..h_nmax at xi (stable recurrence)."""
    h = np.empty((n_max + 1,) + xi.shape)
    h[0] = np.pi**-0.25 * np.exp(-0.5 * xi**2)
    if n_max >= 1:
        h[1] = np.sqrt(2.0) * xi * h[0]
    for n in range(1, n_max):
        h[n + 1] = np.sqrt(2.0 / (n + 1)) * xi * h[n] - np.sqrt(n / (n + 1.0)) * h[n - 1]
    return h


@dataclass
class HermiteProbe:
    """Probe wave function as a tensor product of 1D Hermite superpositions.

    coeffs[d] are the basis coefficients in dimension d for the oscillator
    basis with length scale sqrt(hbar); each factor is normalized on use.
    """

    coeffs: tuple

    @classmethod
    def mode(cls, n1=0, n2=0, n3=0):
        def unit(n):
            c = np.zeros(n + 1)
            c[n] = 1.0
            return c
        return cls((unit(n1), unit(n2), unit(n3)))

    @classmethod
    def random_superposition(cls, n_modes, rng):
        c = rng.standard_normal(n_modes)
        c /= np.linalg.norm(c)
        return cls((c, np.array([1.0]), np.array([1.0])))


def coherent_overlap_1d(p, q, coeffs, hbar, n_x=400):
    """|<l1_pq, phi>|^2 by x-quadrature for a 1D Hermite superposition."""
    n_max = len(coeffs) - 1
    L = np.sqrt(hbar) * (np.sqrt(2.0 * n_max + 1.0) + 7.0) + abs(q)
    x, w = gauss_legendre(-L, L, n_x)
    phi = coeffs @ hermite_values(n_max, x / np.sqrt(hbar)) * hbar**-0.25
    window = (np.pi * hbar) ** -0.25 * np.exp(-np.square(x - q) / (2.0 * hbar))
    val = np.sum(w * window * phi * np.exp(-1j * p * x / hbar))
    return float(np.abs(val) ** 2)


def _resolution_factor_1d(coeffs, hbar, n_pq=90, n_x=300):
    """(2 pi hbar)^-1 iint |<l1_pq, phi>|^2 dp dq for one dimension."""
    coeffs = np.asarray(coeffs, dtype=float)
    coeffs = coeffs / np.linalg.norm(coeffs)
    n_max = len(coeffs) - 1
    spread = np.sqrt(hbar) * (np.sqrt(2.0 * n_max + 1.0) + 8.0)
    q_nodes, q_w = gauss_legendre(-spread, spread, n_pq)
    p_nodes, p_w = gauss_legendre(-spread, spread, n_pq)
    L = spread + 7.0 * np.sqrt(hbar)
    x, w = gauss_legendre(-L, L, n_x)
    phi = coeffs @ hermite_values(n_max, x / np.sqrt(hbar)) * hbar**-0.25
    window = (np.pi * hbar) ** -0.25 * np.exp(
        -np.square(x[None, :] - q_nodes[:, None]) / (2.0 * hbar))
    fourier = np.exp(-1j * np.outer(p_nodes, x) / hbar)
    amp = np.einsum("qx,px,x,x->qp", window, fourier, w * phi,
                    np.ones_like(x), optimize=True)
    dens = np.abs(amp) ** 2
    total = float(q_w @ dens @ p_w)
    return total / (2.0 * np.pi * hbar)


def coherent_resolution_check(hbar, probe, n_pq=90, n_x=300):
    """Defect |(2 pi hbar)^-3 iint |<probe, l_pq>|^2 d(p,q) - 1|.

    The probe is a product of 1D factors, so the 6D phase-space integral
    factorizes into honest 2D quadratures per dimension.
    """
    product = 1.0
    for coeffs in probe.coeffs:
        product *= _resolution_factor_1d(coeffs, hbar, n_pq, n_x)
    return abs(product - 1.0)


# ---------------------------------------------------------------------------
# Berezin-Lieb for coherent-state quantized energy symbols
# ---------------------------------------------------------------------------

@dataclass
class EnergySymbol:
    """Nonnegative symbol a(p, q) = sigma(p^2 + q^2), a function of the
    classical energy of the window-matched trap (frequency 2).

    With the Gaussian window the quantized operator is diagonal in the
    oscillator number basis; its eigenvalue on the shell with total quantum
    number n is an explicit Gamma-weighted average of sigma.
    """

    sigma: callable
    eps_scale: float  # decay scale of sigma in the energy variable

    def __call__(self, eps):
        return self.sigma(eps)


def _shell_eigenvalues(symbol, hbar, n_max, n_quad=160):
    """lambda_n = int_0^inf sigma(2 hbar s) s^(n+2) e^-s / (n+2)! ds.

    The weight is the normalized Gamma(n+3) density, evaluated in log space
    on Gauss-Legendre panels covering every shell's mass."""
    s_hi = (n_max + 2.0) + 12.0 * np.sqrt(n_max + 2.0) + 30.0
    s1, w1 = gauss_legendre(1e-12, 0.1 * s_hi, n_quad)
    s2, w2 = gauss_legendre(0.1 * s_hi, s_hi, 2 * n_quad)
    s = np.concatenate([s1, s2])
    w = np.concatenate([w1, w2])
    vals = symbol(2.0 * hbar * s)
    logs = np.log(s)
    lam = np.empty(n_max + 1)
    for k in range(n_max + 1):
        lw = np.exp((k + 2) * logs - s - gammaln(k + 3))
        lam[k] = float(np.sum(w * vals * lw))
    return lam


def berezin_lieb_check(symbol, zeta, hbar, basis_dim=4096, tail_tol=1e-8):
    """margin = (2 pi hbar)^-3 int zeta(a) - tr[zeta(A)] >= -tol.

    The operator side is the degeneracy-weighted sum over oscillator shells
    n with (n+1)(n+2)/2 states; basis_dim caps the total basis size.  zeta
    must be convex with zeta(0) = 0 so both sides are finite.
    """
    n_max = 0
    while (n_max + 2) * (n_max + 3) * (n_max + 4) // 6 <= basis_dim:
        n_max += 1
    lam = _shell_eigenvalues(symbol, hbar, n_max)
    degen = (np.arange(n_max + 1) + 1.0) * (np.arange(n_max + 1) + 2.0) / 2.0
    if lam[-1] > 0 and lam[-2] > 0:
        ratio = min(lam[-1] / lam[-2], 0.95)
        tail_weight = degen[-1] * lam[-1] * ratio / max(1.0 - ratio, 0.05) ** 2
        if tail_weight > tail_tol:
            raise ValueError(f"basis truncation too small: tail weight {tail_weight:.2e}")
    operator_side = float(np.sum(degen * zeta(np.maximum(lam, 0.0))))
    s_max = max(60.0, 40.0 * symbol.eps_scale / (2.0 * hbar) + 40.0)
    phase_side = 0.5 * quad(lambda s: zeta(max(float(symbol(2.0 * hbar * s)), 0.0)) * s * s,
                            0.0, s_max, epsabs=1e-12, limit=400)[0]
    return phase_side - operator_side


def bose_symbol(beta_eff, shift=0.0, amp=1.0):
    """sigma(eps) = amp / (e^(beta_eff (eps + shift)) - 1), clamped args."""
    def sigma(eps):
        arg = np.clip(beta_eff * (np.asarray(eps, dtype=float) + shift), 1e-9, 600.0)
        return amp / np.expm1(arg)
    return EnergySymbol(sigma, eps_scale=1.0 / beta_eff)


def gaussian_symbol(amp, scale):
    return EnergySymbol(lambda e: amp * np.exp(-np.square(np.asarray(e) / scale)),
                        eps_scale=scale)


def exponential_symbol(amp, scale):
    return EnergySymbol(lambda e: amp * np.exp(-np.asarray(e) / scale),
                        eps_scale=scale)


def indicator_symbol(amp, e_max):
    return EnergySymbol(lambda e: amp * (np.asarray(e) <= e_max).astype(float),
                        eps_scale=e_max)


# ---------------------------------------------------------------------------
# Trace convexity
# ---------------------------------------------------------------------------

def _matrix_function(a_sym, func):
    w, u = np.linalg.eigh(a_sym)
    return (u * func(w)) @ u.T.conj()


def trace_convexity_check(a_matrix, q_proj, f_convex):
    """margin = tr[Q f(A) Q] - tr[f(QAQ)|_{ran Q}] >= 0 for convex f."""
    a_matrix = np.asarray(a_matrix)
    fa = _matrix_function(a_matrix, f_convex)
    lhs = float(np.real(np.trace(q_proj @ fa @ q_proj)))
    w, u = np.linalg.eigh(q_proj)
    cols = u[:, w > 0.5]  # orthonormal basis of ran Q
    compressed = cols.T.conj() @ a_matrix @ cols
    ev = np.linalg.eigvalsh(compressed)
    rhs = float(np.sum(f_convex(ev)))
    return lhs - rhs


def trace_convexity_bruteforce(a_matrix, q_proj, f_convex):
    """Same margin via the eigenbasis expansion and Jensen term by term.

    w_j are the eigenvectors of the compression QAQ restricted to ran Q, so
    the Jensen side reproduces tr[f(QAQ)] exactly and the expansion side
    reproduces tr[Q f(A) Q]."""
    w_a, v_a = np.linalg.eigh(a_matrix)
    w_q, u_q = np.linalg.eigh(q_proj)
    cols = u_q[:, w_q > 0.5]
    _, s_vec = np.linalg.eigh(cols.T.conj() @ a_matrix @ cols)
    basis = cols @ s_vec
    overlaps = np.abs(basis.T.conj() @ v_a) ** 2   # (k, d), rows sum to 1
    lhs = float(np.sum(overlaps @ f_convex(w_a)))
    rhs = float(np.sum(f_convex(overlaps @ w_a)))
    return lhs - rhs


# ---------------------------------------------------------------------------
# Relative-entropy coercivity (phase-space and operator versions)
# ---------------------------------------------------------------------------

@dataclass
class PhaseSampleSet:
    """Two nonnegative functions sampled on a common phase-space grid."""

    a: np.ndarray
    b: np.ndarray
    weights: np.ndarray  # quadrature weights including the volume factors


def random_phase_samples(rng, n_grid=48):
    p, wp = gauss_legendre(0.0, 4.0, n_grid)
    x, wx = gauss_legendre(0.0, 6.0, n_grid)
    w2d = np.outer(wp * p**2, wx * x**2) * (4.0 * np.pi) ** 2

    def field():
        out = np.zeros((n_grid, n_grid))
        for _ in range(rng.integers(1, 4)):
            amp = rng.uniform(0.1, 3.0)
            bp = rng.uniform(0.3, 2.0)
            bx = rng.uniform(0.2, 1.5)
            cp = rng.uniform(0.0, 1.5)
            cx = rng.uniform(0.0, 2.0)
            out += amp * np.exp(-bp * (p[:, None] - cp) ** 2 - bx * (x[None, :] - cx) ** 2)
        return out

    return PhaseSampleSet(field(), field(), w2d)


def phase_coercivity_ratio(sample, floor=1e-14):
    """S_sc(a,b) * int (a+b)(1+b) / (int |a-b|)^2; +inf on degenerate pairs."""
    a, b, w = sample.a, sample.b, sample.weights
    l1 = float(np.sum(w * np.abs(a - b)))
    if l1 < floor:
        return np.inf
    bregman = bose_f(a) - bose_f(b) - bose_f_prime(np.maximum(b, 1e-300)) * (a - b)
    s_sc = (2.0 * np.pi) ** -3 * float(np.sum(w * bregman))
    denom_int = float(np.sum(w * (a + b) * (1.0 + b)))
    return s_sc * denom_int / l1**2


def operator_relative_entropy(a, b):
    """S(a,b) = tr[f(a) - f(b) - f'(b)(a - b)] for positive definite b."""
    fa = _matrix_function(a, bose_f)
    fb = _matrix_function(b, bose_f)
    fpb = _matrix_function(b, bose_f_prime)
    return float(np.real(np.trace(fa - fb - fpb @ (a - b))))


def random_operator_pair(rng, dim):
    def one():
        m = rng.standard_normal((dim, dim))
        s = m @ m.T / dim + np.diag(rng.uniform(0.05, 2.0, dim))
        return s
    return one(), one()


def operator_coercivity_ratio(a, b, floor=1e-14):
    """S(a,b) ||1+b|| tr[a+b] / ||a-b||_1^2; +inf on degenerate pairs."""
    diff = a - b
    nuc = float(np.sum(np.abs(np.linalg.eigvalsh(diff))))
    if nuc < floor:
        return np.inf
    s_rel = operator_relative_entropy(a, b)
    op_norm = float(np.max(np.abs(np.linalg.eigvalsh(np.eye(b.shape[0]) + b))))
    tr_sum = float(np.trace(a + b))
    return s_rel * op_norm * tr_sum / nuc**2


# ---------------------------------------------------------------------------
# Positive-type interaction bound
# ---------------------------------------------------------------------------

def positive_type_bound_check(points, eta, v):
    """margin of sum_{i<j} v(x_i - x_j) >= sum_i (eta*v)(x_i) - D(eta,eta) - N v(0)/2."""
    pts = np.asarray(points, dtype=float)
    n = pts.shape[0]
    lhs = 0.0
    for i in range(n):
        d = np.linalg.norm(pts[i + 1:] - pts[i], axis=1)
        lhs += float(np.sum(v(d)))
    radii = np.linalg.norm(pts, axis=1)
    one_body = float(np.sum(radial_convolution(v, eta, out_r=radii)))
    d_self = interaction_energy(eta, eta, v)
    rhs = one_body - d_self - n * v.v0 / 2.0
    return lhs - rhs
