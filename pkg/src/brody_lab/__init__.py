"""Numerical laboratory for Brody curves, Nevanlinna characteristics and lattice products."""

__version__ = "0.1.0"
