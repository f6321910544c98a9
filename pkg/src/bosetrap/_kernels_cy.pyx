# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernel backend.

Scalar C implementations of the hot special-function kernels plus thin
array loops.  Public surface matches ``_kernels_py``.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport exp, log, log1p, pow

from ._licoef import N_DIRECT, N_TAYLOR, ORDERS, TABLES, T_SWITCH

cnp.import_array()

cdef double T_SW = T_SWITCH
cdef int NDIR = N_DIRECT
cdef int NTAY = N_TAYLOR

cdef double[5] GFAC
cdef double[5] HARM
cdef double[5] SVAL
cdef int[5] ISINT
cdef double[5][64] COEF

_idx = {0.5: 0, 1.5: 1, 2.5: 2, 3.0: 3, 4.0: 4}

def _load_tables():
    cdef int i, k
    for s, i_ in _idx.items():
        i = i_
        gfac, harm, c = TABLES[s]
        GFAC[i] = gfac
        HARM[i] = harm
        SVAL[i] = s
        ISINT[i] = 1 if float(s).is_integer() else 0
        for k in range(NTAY + 1):
            COEF[i][k] = c[k]

_load_tables()


cdef inline double _bose_f(double x) nogil:
    if x == 0.0:
        return 0.0
    if x < 1e-12:
        return x * (log(x) - 1.0) - 0.5 * x * x
    return x * log(x) - (1.0 + x) * log1p(x)


cdef inline double _bose_f_prime(double x) nogil:
    return log(x) - log1p(x)


cdef double _li_exp(int idx, double t) nogil:
    cdef double acc = 0.0
    cdef double q, qk, s, tk
    cdef int k, m
    if t >= T_SW:
        q = exp(-t)
        qk = 1.0
        s = SVAL[idx]
        for k in range(1, NDIR + 1):
            qk *= q
            acc += qk * pow(k, -s)
        return acc
    # Horner on the Taylor coefficients, then the t^(s-1) / log term
    for k in range(NTAY, -1, -1):
        acc = acc * t + COEF[idx][k]
    if t > 0.0:  # at t = 0 the singular term vanishes for s > 1
        if ISINT[idx]:
            m = <int> SVAL[idx]
            acc += GFAC[idx] * pow(t, m - 1) * (HARM[idx] - log(t))
        else:
            acc += GFAC[idx] * pow(t, SVAL[idx] - 1.0)
    return acc


cdef double ETA_PREF = pow(4.0 * np.pi, -1.5)


def _as_index(s):
    try:
        return _idx[float(s)]
    except KeyError:
        raise ValueError(f"unsupported polylog order {s}")


def bose_f(x):
    """f(x) = x ln x - (1+x) ln(1+x), continuous at 0 with f(0) = 0."""
    cdef cnp.ndarray[cnp.float64_t, ndim=1] flat, out
    cdef Py_ssize_t i, n
    arr = np.asarray(x, dtype=float)
    if np.any(arr < 0):
        raise ValueError("bose_f requires x >= 0")
    if arr.ndim == 0:
        return _bose_f(float(arr))
    flat = np.ascontiguousarray(arr.ravel())
    n = flat.shape[0]
    out = np.empty(n)
    with nogil:
        for i in range(n):
            out[i] = _bose_f(flat[i])
    return out.reshape(arr.shape)


def bose_f_prime(x):
    """f'(x) = ln(x / (1+x)), defined for x > 0."""
    cdef cnp.ndarray[cnp.float64_t, ndim=1] flat, out
    cdef Py_ssize_t i, n
    arr = np.asarray(x, dtype=float)
    if np.any(arr <= 0):
        raise ValueError("bose_f_prime requires x > 0")
    if arr.ndim == 0:
        return _bose_f_prime(float(arr))
    flat = np.ascontiguousarray(arr.ravel())
    n = flat.shape[0]
    out = np.empty(n)
    with nogil:
        for i in range(n):
            out[i] = _bose_f_prime(flat[i])
    return out.reshape(arr.shape)


def li_exp(s, t):
    """Li_s(e^-t) for t >= 0 (t > 0 when s <= 1), s in the supported orders."""
    cdef cnp.ndarray[cnp.float64_t, ndim=1] flat, out
    cdef Py_ssize_t i, n
    cdef int idx = _as_index(s)
    arr = np.asarray(t, dtype=float)
    if np.any(arr < 0):
        raise ValueError("li_exp requires t >= 0")
    if float(s) <= 1.0 and np.any(arr == 0.0):
        raise ValueError(f"Li_{s}(e^-t) diverges at t = 0")
    if arr.ndim == 0:
        return _li_exp(idx, float(arr))
    flat = np.ascontiguousarray(arr.ravel())
    n = flat.shape[0]
    out = np.empty(n)
    with nogil:
        for i in range(n):
            out[i] = _li_exp(idx, flat[i])
    return out.reshape(arr.shape)


def eta(t):
    """eta(t) = (4 pi)^-3/2 Li_3/2(e^-t)."""
    res = li_exp(1.5, t)
    return ETA_PREF * res


def eta_prime(t):
    """eta'(t) = -(4 pi)^-3/2 Li_1/2(e^-t)."""
    res = li_exp(0.5, t)
    return -ETA_PREF * res
