"""Hoelder regularity of spectral measures and densities of states for random lattice operators."""

__version__ = "0.1.0"
