"""Scalar building blocks shared by every solver module.

Bosonic entropy function f and its derivative, polylogarithms Li_s on
[0, 1] for the orders that appear in the momentum integrals, the integrated
Bose function eta, and the harmonic-oscillator heat kernel.  Everything here
is pure and reentrant; the hot kernels live in :mod:`bosetrap.kernels`.
"""

import numpy as np

from . import kernels
from ._licoef import ORDERS, zeta_any

__all__ = [
    "POLYLOG_ORDERS",
    "ZETA3",
    "ZETA4",
    "ZETA3_CBRT",
    "bose_entropy_f",
    "bose_entropy_f_prime",
    "bregman_f",
    "polylog",
    "li_exp",
    "eta",
    "eta_prime",
    "mehler_kernel",
]

POLYLOG_ORDERS = ORDERS

ZETA3 = zeta_any(3.0)
ZETA4 = zeta_any(4.0)
ZETA3_CBRT = ZETA3 ** (1.0 / 3.0)

bose_entropy_f = kernels.bose_f
bose_entropy_f_prime = kernels.bose_f_prime
li_exp = kernels.li_exp
eta = kernels.eta
eta_prime = kernels.eta_prime


def bregman_f(x, y):
    """Bregman divergence of f: f(x) - f(y) - f'(y)(x - y) >= 0 for x, y > 0."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    return kernels.bose_f(x) - kernels.bose_f(y) - kernels.bose_f_prime(y) * (x - y)


def polylog(s, z):
    """Li_s(z) = sum_{k>=1} z^k / k^s for z in [0, 1].

    Orders are restricted to {1/2, 3/2, 5/2, 3, 4}; Li_{1/2} diverges at
    z = 1 and raises there.
    """
    if s not in POLYLOG_ORDERS:
        raise ValueError(f"unsupported polylog order {s}; allowed: {POLYLOG_ORDERS}")
    z = np.asarray(z, dtype=float)
    if np.any(z < 0) or np.any(z > 1):
        raise ValueError("polylog requires 0 <= z <= 1")
    scalar = z.ndim == 0
    z = np.atleast_1d(z)
    out = np.zeros_like(z)
    pos = z > 0
    with np.errstate(divide="ignore"):
        out[pos] = kernels.li_exp(s, -np.log(z[pos]))
    return float(out[0]) if scalar else out


def _log_sinh(tau):
    return tau + np.log1p(-np.exp(-2.0 * tau)) - np.log(2.0)


def mehler_kernel(t, x, y, omega=1.0, hbar=1.0):
    """Heat kernel e^{-t h}(x, y) of h = -hbar^2 Laplacian + omega^2 x^2 / 4.

    x and y are points in R^3 (arrays broadcastable to shape (..., 3)).
    Evaluated in log space so large t*hbar*omega cannot overflow the sinh.
    """
    t = float(t)
    if t <= 0:
        raise ValueError("mehler_kernel requires t > 0")
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    tau = t * hbar * omega
    x2 = np.sum(x * x, axis=-1)
    y2 = np.sum(y * y, axis=-1)
    xy = np.sum(x * y, axis=-1)
    em = np.exp(-2.0 * tau)
    coth = (1.0 + em) / (1.0 - em)
    inv_sinh = 2.0 * np.exp(-tau) / (1.0 - em)
    log_pref = -1.5 * (np.log(hbar) + np.log(2.0 * np.pi) + _log_sinh(tau)) \
        + 1.5 * np.log(omega / 2.0)
    # exponent coefficient omega/4: fixed by the particle mass 1/2; this is
    # what reproduces both the free short-time limit (4 pi hbar^2 t)^(-3/2)
    # and the trace (2 sinh(t hbar omega / 2))^(-3)
    exponent = -(omega / (4.0 * hbar)) * (coth * (x2 + y2) - 2.0 * xy * inv_sinh)
    return np.exp(log_pref + exponent)
