"""Gauss-Legendre grids for radial and phase-space integrals.

Solver densities live on panel-graded GL nodes: smooth Bose profiles are
integrated to near machine precision, and panels accumulating toward the
origin keep the mild log corner of the entropy integrand under control.
"""

import numpy as np


def gauss_legendre(a, b, n):
    """GL nodes and weights on [a, b]."""
    x, w = np.polynomial.legendre.leggauss(n)
    half = 0.5 * (b - a)
    return a + half * (x + 1.0), half * w


def graded_gauss(xmax, n_per_panel=128, ratio=8.0, n_panels=4):
    """GL panels on [0, xmax] geometrically refined toward 0.

    Panel edges are xmax / ratio^k, k = n_panels-1 .. 0, so the innermost
    panel hugs the origin.  Returns (nodes, weights) sorted ascending.
    """
    edges = [0.0] + [xmax / ratio**k for k in range(n_panels - 1, -1, -1)]
    xs, ws = [], []
    for a, b in zip(edges[:-1], edges[1:]):
        x, w = gauss_legendre(a, b, n_per_panel)
        xs.append(x)
        ws.append(w)
    return np.concatenate(xs), np.concatenate(ws)


class RadialGrid:
    """Radial quadrature nodes r_i with 1D weights w_i on [0, rmax]."""

    def __init__(self, r, w):
        self.r = np.asarray(r, dtype=float)
        self.w = np.asarray(w, dtype=float)

    @classmethod
    def graded(cls, rmax, n_per_panel=128, ratio=8.0, n_panels=4):
        return cls(*graded_gauss(rmax, n_per_panel, ratio, n_panels))

    @property
    def rmax(self):
        return float(self.r[-1])

    def volume_integral(self, values):
        """4 pi int r^2 f(r) dr for f sampled on the nodes."""
        return 4.0 * np.pi * float(np.dot(self.w, self.r**2 * values))

    def line_integral(self, values):
        return float(np.dot(self.w, values))
