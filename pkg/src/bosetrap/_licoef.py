"""Series coefficients for the polylogarithms used by the kernel backends.

Two evaluation regimes for Li_s(e^-t), t >= 0:

* t >= T_SWITCH: the defining series sum_k e^{-kt} / k^s truncated once the
  tail drops below 1e-16 (geometric decay).
* 0 < t < T_SWITCH: the expansion around t = 0,

      Li_s(e^-t) = Gamma(1-s) t^(s-1) + sum_k zeta(s-k) (-t)^k / k!

  for half-integer s, and for integer s = m the variant with the
  t^(m-1) (H_{m-1} - ln t) / (m-1)! term replacing the k = m-1 summand.
  Both converge for |t| < 2*pi; at t < 0.7 the term ratio is < 0.12.
"""

import numpy as np
from scipy.special import gamma as _gamma
from scipy.special import zeta as _zeta_pos

T_SWITCH = 0.7
N_DIRECT = 64
N_TAYLOR = 34

ORDERS = (0.5, 1.5, 2.5, 3.0, 4.0)


def zeta_any(x):
    """Riemann zeta for any real x != 1 (reflection formula for x < 1)."""
    if x > 1.0:
        return float(_zeta_pos(x))
    if x == 0.0:
        return -0.5
    if x < 0.0 and x == np.round(x) and int(np.round(x)) % 2 == 0:
        return 0.0
    # zeta(x) = 2^x pi^(x-1) sin(pi x / 2) Gamma(1-x) zeta(1-x)
    return float(
        2.0**x * np.pi ** (x - 1.0) * np.sin(np.pi * x / 2.0)
        * _gamma(1.0 - x) * _zeta_pos(1.0 - x)
    )


def taylor_table(s):
    """Coefficients (gamma_factor, log_flag, c[0..N]) for the t->0 expansion.

    For half-integer s the value is gamma_factor * t**(s-1) + sum c_k t^k.
    For integer s = m, gamma_factor multiplies t**(m-1) * (H_{m-1} - ln t)
    and the k = m-1 coefficient is zeroed.
    """
    is_int = float(s).is_integer()
    c = np.zeros(N_TAYLOR + 1)
    fact = 1.0
    for k in range(N_TAYLOR + 1):
        if k > 0:
            fact *= k
        arg = s - k
        if is_int and k == int(s) - 1:
            c[k] = 0.0
        else:
            c[k] = zeta_any(arg) * (-1.0) ** k / fact
    if is_int:
        m = int(s)
        harmonic = sum(1.0 / j for j in range(1, m))
        # multiplies t^(m-1) (H_{m-1} - ln t); the (-t)^(m-1) sign is folded in
        gamma_factor = (-1.0) ** (m - 1) / _gamma(m)
        return gamma_factor, harmonic, c
    return float(_gamma(1.0 - s)), 0.0, c


TABLES = {s: taylor_table(s) for s in ORDERS}
