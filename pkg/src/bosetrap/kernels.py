"""Kernel backend selection.

Prefers the compiled Cython kernels and falls back to the pure-NumPy
implementation when the extension is not built (or when
BOSETRAP_PURE_KERNELS=1 forces the fallback).  ``BACKEND`` records the
active choice; ``benchmarks/bench_kernels.py`` compares both.
"""

import os

if os.environ.get("BOSETRAP_PURE_KERNELS") == "1":
    from . import _kernels_py as _impl

    BACKEND = "python"
else:
    try:
        from . import _kernels_cy as _impl

        BACKEND = "cython"
    except ImportError:  # extension not built
        from . import _kernels_py as _impl

        BACKEND = "python"

bose_f = _impl.bose_f
bose_f_prime = _impl.bose_f_prime
li_exp = _impl.li_exp
eta = _impl.eta
eta_prime = _impl.eta_prime

__all__ = ["BACKEND", "bose_f", "bose_f_prime", "li_exp", "eta", "eta_prime"]
