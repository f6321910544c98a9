"""Cross-backend equivalence of the compiled and pure-NumPy kernels."""

import numpy as np
import pytest

import bosetrap._kernels_py as kpy

try:
    import bosetrap._kernels_cy as kcy
except ImportError:
    kcy = None

needs_ext = pytest.mark.skipif(kcy is None, reason="compiled kernels not built")


@needs_ext
class TestBackendEquivalence:
    def test_li_exp(self):
        t = np.concatenate([np.logspace(-8, -0.5, 40), np.linspace(0.5, 40, 40)])
        for s in (0.5, 1.5, 2.5, 3.0, 4.0):
            a = kcy.li_exp(s, t)
            b = kpy.li_exp(s, t)
            assert np.allclose(a, b, rtol=1e-13, atol=0)

    def test_bose_functions(self):
        x = np.logspace(-14, 6, 60)
        assert np.allclose(kcy.bose_f(x), kpy.bose_f(x), rtol=1e-13)
        assert np.allclose(kcy.bose_f_prime(x), kpy.bose_f_prime(x), rtol=1e-13)

    def test_eta(self):
        t = np.linspace(0.01, 20, 50)
        assert np.allclose(kcy.eta(t), kpy.eta(t), rtol=1e-13)
        assert np.allclose(kcy.eta_prime(t), kpy.eta_prime(t), rtol=1e-13)

    def test_scalars_return_floats(self):
        assert isinstance(kcy.eta(1.0), float)
        assert isinstance(kpy.eta(1.0), float)

    def test_same_domain_errors(self):
        for mod in (kcy, kpy):
            with pytest.raises(ValueError):
                mod.li_exp(0.5, 0.0)
            with pytest.raises(ValueError):
                mod.bose_f(-1.0)


def test_backend_selection_reports():
    from bosetrap import kernels
    assert kernels.BACKEND in ("cython", "python")
