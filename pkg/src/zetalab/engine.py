"""Evaluation of smoothed Dirichlet series and batch scans along vertical shifts."""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .arith import CoefficientTable
from .kernel import SmoothingKernel

REANCHOR_EVERY = 4096


@dataclass(frozen=True)
class ShiftGrid:
    """Uniform vertical grid sigma + i(tau_start + k dtau), k < count."""

    sigma: float
    tau_start: float
    dtau: float
    count: int
    truncation: float

    def __post_init__(self):
        if self.dtau <= 0:
            raise ValueError("dtau must be positive")
        if self.count < 1:
            raise ValueError("count must be >= 1")
        if self.truncation < 2:
            raise ValueError("truncation must be >= 2 for shift grids")

    def taus(self) -> np.ndarray:
        return self.tau_start + self.dtau * np.arange(self.count)


def _term_data(coeffs: CoefficientTable, kernel: SmoothingKernel, truncation: float):
    """Indices n and weights a(n) * lambda(n/truncation) of the finite sum."""
    if truncation <= 0:
        raise ValueError("truncation must be positive")
    top = kernel.required_terms(truncation)
    if top > coeffs.limit:
        raise ValueError(
            f"coefficient table too short: need n <= {top} "
            f"(= support_bound * truncation), table stops at {coeffs.limit}"
        )
    n = np.arange(1, top + 1, dtype=np.float64)
    weights = coeffs.a[1 : top + 1] * kernel(n / truncation)
    return n, weights


def smoothed_value(coeffs: CoefficientTable, kernel: SmoothingKernel,
                   s: complex, truncation: float) -> complex:
    """Cutoff-weighted Dirichlet sum of a(n) n^-s, truncated near ``truncation``."""
    n, w = _term_data(coeffs, kernel, truncation)
    if n.size == 0:
        return 0j
    return complex(np.dot(w, np.exp(-complex(s) * np.log(n))))


def shifted_grid_values(coeffs: CoefficientTable, kernel: SmoothingKernel,
                        grid: ShiftGrid, threads: int = 1) -> np.ndarray:
    """Values along a shift grid via per-term incremental rotation.

    Each term's contribution is rotated by n^(-i dtau) per step and the
    rotation state is re-anchored by direct recomputation every
    ``REANCHOR_EVERY`` steps to cap multiplicative drift.  Chunk boundaries
    are fixed by the re-anchoring period, so thread count does not change
    the result.
    """
    n, w = _term_data(coeffs, kernel, grid.truncation)
    out = np.empty(grid.count, dtype=np.complex128)
    if n.size == 0:
        out[:] = 0j
        return out
    log_n = np.log(n)
    base = w * n ** (-grid.sigma)
    rot_step = np.exp(-1j * grid.dtau * log_n)

    starts = range(0, grid.count, REANCHOR_EVERY)

    def run_chunk(start: int) -> None:
        stop = min(start + REANCHOR_EVERY, grid.count)
        tau0 = grid.tau_start + grid.dtau * start
        state = base * np.exp(-1j * tau0 * log_n)
        for k in range(start, stop):
            out[k] = state.sum()
            if k + 1 < stop:
                state *= rot_step

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            list(pool.map(run_chunk, starts))
    else:
        for start in starts:
            run_chunk(start)
    return out


@dataclass(frozen=True)
class RectangleEvaluator:
    """Fast smoothed-series evaluation on a rectangle grid at many shifts.

    Separates n^-(sigma + i t) into a sigma part and a t part once, so each
    shift costs one small rotation plus one matrix product.
    """

    coeffs: CoefficientTable
    kernel: SmoothingKernel
    rect: "object"  # metrics.CompactRectangle (duck-typed: .sigmas, .ts)
    truncation: float

    def __post_init__(self):
        n, w = _term_data(self.coeffs, self.kernel, self.truncation)
        log_n = np.log(n) if n.size else n
        sig = np.asarray(self.rect.sigmas, dtype=np.float64)
        ts = np.asarray(self.rect.ts, dtype=np.float64)
        object.__setattr__(self, "_log_n", log_n)
        object.__setattr__(self, "_sig_part", w * np.exp(-np.outer(sig, log_n)))
        object.__setattr__(self, "_t_part", np.exp(-1j * np.outer(ts, log_n)))

    def at_shift(self, tau: float) -> np.ndarray:
        """Grid of values at s + i tau, shaped (len(sigmas), len(ts))."""
        if self._log_n.size == 0:
            return np.zeros((len(self.rect.sigmas), len(self.rect.ts)), dtype=np.complex128)
        rot = np.exp(-1j * tau * self._log_n)
        return (self._sig_part * rot) @ self._t_part.T


def smoothed_on_rectangle(coeffs: CoefficientTable, kernel: SmoothingKernel,
                          rect, truncation: float, tau: float = 0.0) -> np.ndarray:
    return RectangleEvaluator(coeffs, kernel, rect, truncation).at_shift(tau)


def sup_distance_on_compact(values: np.ndarray, target: np.ndarray, rect) -> float:
    """Grid maximum of |values - target| over the rectangle's sample grid."""
    values = np.asarray(values)
    target = np.asarray(target)
    expected = (len(rect.sigmas), len(rect.ts))
    if values.shape != expected or target.shape != expected:
        raise ValueError(
            f"grid mismatch: expected shape {expected}, "
            f"got {values.shape} vs {target.shape}"
        )
    return float(np.max(np.abs(values - target)))


def shift_lipschitz_bound(coeffs: CoefficientTable, kernel: SmoothingKernel,
                          truncation: float, sigma_left: float) -> float:
    """Bound on |d/dtau| of the smoothed sum over Re(s) >= sigma_left."""
    n, w = _term_data(coeffs, kernel, truncation)
    if n.size == 0:
        return 0.0
    return float(np.sum(np.abs(w) * np.log(n) * n ** (-sigma_left)))


def default_truncation(max_prime: int, horizon: float) -> float:
    """Truncation heuristic: twice the largest prime in play or sqrt(horizon)."""
    return float(max(2.0 * max_prime, np.sqrt(horizon), 2.0))
