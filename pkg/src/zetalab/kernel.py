"""Smooth cutoff weights and their Mellin transform.

The cutoff equals 1 on [0, 1], drops to 0 at the support bound through a
C-infinity bump step, and its Mellin transform is evaluated everywhere
through the identity  transform(s) = 1/s + (entire integral over the
transition region), which makes the simple pole at 0 with residue 1 a
structural property rather than a numerical one.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad


def _bump_step(t: np.ndarray) -> np.ndarray:
    """Smooth step rising 0 -> 1 on [0, 1]: psi(t) / (psi(t) + psi(1-t))."""
    t = np.asarray(t, dtype=np.float64)
    out = np.empty_like(t)
    lo = t <= 0.0
    hi = t >= 1.0
    mid = ~(lo | hi)
    out[lo] = 0.0
    out[hi] = 1.0
    tm = t[mid]
    with np.errstate(over="ignore"):
        a = np.exp(-1.0 / tm)
        b = np.exp(-1.0 / (1.0 - tm))
    out[mid] = a / (a + b)
    return out


@dataclass(frozen=True)
class SmoothingKernel:
    """Cutoff profile: 1 on [0, 1], smooth descent, 0 beyond ``support_bound``."""

    support_bound: float = 2.0

    def __post_init__(self):
        if not self.support_bound > 1.0:
            raise ValueError(f"support_bound must exceed 1, got {self.support_bound}")

    def __call__(self, x):
        scalar = np.isscalar(x)
        x = np.asarray(x, dtype=np.float64)
        if np.any(x < 0):
            raise ValueError("cutoff argument must be nonnegative")
        c = self.support_bound
        out = 1.0 - _bump_step((x - 1.0) / (c - 1.0))
        if scalar:
            return float(out)
        return out

    def required_terms(self, truncation: float) -> int:
        """Largest n with a nonzero weight lambda(n / truncation)."""
        edge = self.support_bound * truncation
        n = int(np.floor(edge))
        if n >= edge:  # weight at the exact support edge is 0
            n -= 1
        return max(n, 0)


@dataclass(frozen=True)
class MellinTransform:
    """Meromorphic continuation of the kernel's Mellin transform to Re(s) > -1."""

    kernel: SmoothingKernel = SmoothingKernel()
    quad_tol: float = 1e-10

    def _check(self, s: complex) -> complex:
        s = complex(s)
        if s == 0:
            raise ValueError("s = 0 is the pole of the transform")
        if s.real <= -1.0:
            raise ValueError(f"Re(s) must exceed -1, got {s.real}")
        return s

    def entire_part(self, s: complex) -> complex:
        """Integral of kernel(x) x^(s-1) over the transition region [1, C]."""
        s = complex(s)
        c = self.kernel.support_bound
        re = quad(lambda x: (self.kernel(x) * np.exp((s - 1) * np.log(x))).real,
                  1.0, c, epsabs=self.quad_tol, epsrel=0.0, limit=400)[0]
        im = quad(lambda x: (self.kernel(x) * np.exp((s - 1) * np.log(x))).imag,
                  1.0, c, epsabs=self.quad_tol, epsrel=0.0, limit=400)[0]
        return complex(re, im)

    def __call__(self, s: complex) -> complex:
        s = self._check(s)
        return 1.0 / s + self.entire_part(s)

    def values(self, s_list) -> np.ndarray:
        """Vectorized transform on an array of points (same continuation identity).

        The transition integral is done by composite Gauss-Legendre with the
        panel count scaled to the largest imaginary part, so the oscillatory
        factor x^(it) is resolved at every requested point.
        """
        s = np.asarray(s_list, dtype=np.complex128).ravel()
        if np.any(s == 0):
            raise ValueError("s = 0 is the pole of the transform")
        if np.any(s.real <= -1.0):
            raise ValueError("Re(s) must exceed -1")
        c = self.kernel.support_bound
        tmax = float(np.max(np.abs(s.imag), initial=0.0))
        panels = max(8, int(tmax * np.log(c) / 2.0) + 8)
        nodes, weights = np.polynomial.legendre.leggauss(16)
        edges = np.linspace(1.0, c, panels + 1)
        mid = 0.5 * (edges[1:] + edges[:-1])
        half = 0.5 * (edges[1:] - edges[:-1])
        x = (mid[:, None] + half[:, None] * nodes[None, :]).ravel()
        w = (half[:, None] * weights[None, :]).ravel() * self.kernel(x)
        lx = np.log(x)
        integral = np.exp(np.subtract.outer(s, 1.0)[:, None] * lx[None, :]) @ w
        return 1.0 / s + integral


def mellin_inversion(transform: MellinTransform, x: float, line: float = 2.0,
                     height: float = 200.0) -> float:
    """Reconstruct the cutoff at x from the inversion integral on Re = ``line``.

    Evaluates (1/2 pi) * integral over |v| <= height of
    transform(line + iv) x^-(line + iv) dv by composite Gauss-Legendre,
    truncated at ``height``; the integrand's vertical decay controls the
    truncation error.
    """
    if x <= 0:
        raise ValueError("x must be positive")
    panel_width = min(0.5, 2.0 * np.pi / (8.0 * (abs(np.log(x)) + 1.0)))
    panels = int(np.ceil(2 * height / panel_width))
    nodes, weights = np.polynomial.legendre.leggauss(8)
    edges = np.linspace(-height, height, panels + 1)
    mid = 0.5 * (edges[1:] + edges[:-1])
    half = 0.5 * (edges[1:] - edges[:-1])
    v = (mid[:, None] + half[:, None] * nodes[None, :]).ravel()
    w = (half[:, None] * weights[None, :]).ravel()
    s = line + 1j * v
    vals = transform.values(s) * np.exp(-s * np.log(x))
    return float((vals @ w).real / (2.0 * np.pi))
