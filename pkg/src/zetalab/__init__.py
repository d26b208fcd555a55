"""Numerical laboratory for smoothed Dirichlet series, random Euler products,
and simultaneous phase/function approximation hunts along vertical shifts."""

__version__ = "0.1.0"
