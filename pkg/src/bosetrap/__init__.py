"""Semiclassical and finite-N mean-field thermodynamics of a trapped Bose gas."""

__version__ = "0.1.0"
