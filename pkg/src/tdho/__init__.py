"""Exact classical and quantum evolution of time-dependent harmonic oscillators."""

__version__ = "0.1.0"
