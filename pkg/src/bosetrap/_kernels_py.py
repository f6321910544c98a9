"""Pure-NumPy kernel backend.

Same public surface as the compiled backend in ``_kernels_cy``: the bosonic
entropy function and its derivative, Li_s(e^-t) for the supported orders,
and the integrated Bose function eta with its derivative.  All functions
accept scalars or arrays.
"""

import numpy as np

from ._licoef import N_DIRECT, ORDERS, T_SWITCH, TABLES

# (4 pi)^(-3/2)
_ETA_PREF = (4.0 * np.pi) ** -1.5

_X_TINY = 1e-12


def bose_f(x):
    """f(x) = x ln x - (1+x) ln(1+x), continuous at 0 with f(0) = 0."""
    x = np.asarray(x, dtype=float)
    if np.any(x < 0):
        raise ValueError("bose_f requires x >= 0")
    out = np.zeros_like(x)
    tiny = (x > 0) & (x < _X_TINY)
    big = x >= _X_TINY
    xt = x[tiny]
    out[tiny] = xt * (np.log(xt) - 1.0) - 0.5 * xt * xt
    xb = x[big]
    out[big] = xb * np.log(xb) - (1.0 + xb) * np.log1p(xb)
    return out if out.ndim else float(out)


def bose_f_prime(x):
    """f'(x) = ln(x / (1+x)), defined for x > 0."""
    x = np.asarray(x, dtype=float)
    if np.any(x <= 0):
        raise ValueError("bose_f_prime requires x > 0")
    out = np.log(x) - np.log1p(x)
    return out if out.ndim else float(out)


def _li_exp_direct(s, t):
    k = np.arange(1, N_DIRECT + 1)
    return np.einsum("k,k...->...", k**-s, np.exp(-np.outer(k, t).reshape((N_DIRECT,) + t.shape)))


def _li_exp_taylor(s, t):
    gamma_factor, harmonic, c = TABLES[s]
    acc = np.polynomial.polynomial.polyval(t, c)
    pos = t > 0  # at t = 0 the singular term vanishes for s > 1
    tp = t[pos]
    extra = np.zeros_like(t)
    if float(s).is_integer():
        m = int(s)
        extra[pos] = gamma_factor * tp ** (m - 1) * (harmonic - np.log(tp))
    else:
        extra[pos] = gamma_factor * tp ** (s - 1.0)
    return acc + extra


def li_exp(s, t):
    """Li_s(e^-t) for t >= 0 (t > 0 when s <= 1), s in the supported orders."""
    if s not in ORDERS:
        raise ValueError(f"unsupported polylog order {s}")
    t = np.asarray(t, dtype=float)
    if np.any(t < 0):
        raise ValueError("li_exp requires t >= 0")
    if s <= 1.0 and np.any(t == 0.0):
        raise ValueError(f"Li_{s}(e^-t) diverges at t = 0")
    scalar = t.ndim == 0
    t = np.atleast_1d(t)
    out = np.empty_like(t)
    lo = t < T_SWITCH
    if np.any(lo):
        out[lo] = _li_exp_taylor(s, t[lo])
    if np.any(~lo):
        out[~lo] = _li_exp_direct(s, t[~lo])
    return float(out[0]) if scalar else out


def eta(t):
    """eta(t) = (2 pi)^-3 integral dp (e^(p^2+t) - 1)^-1 = (4 pi)^-3/2 Li_3/2(e^-t)."""
    return _ETA_PREF * li_exp(1.5, t)


def eta_prime(t):
    """eta'(t) = -(4 pi)^-3/2 Li_1/2(e^-t), integrable singularity at t = 0."""
    return -_ETA_PREF * li_exp(0.5, t)
