"""Statistical verifiers: mean-square surrogates, equidistribution averages,
and empirical comparison of the shift ensemble against the random model."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .arith import CoefficientTable
from .engine import ShiftGrid, shifted_grid_values, _term_data
from .kernel import SmoothingKernel
from .metrics import (DEFAULT_LEVEL, ExhaustionFamily, ProductPoint, StripDomain,
                      product_metric)
from .primes import is_prime, primes_up_to
from .randmodel import angle_matrix, omega_table_batch


# ---------------------------------------------------------------------------
# mean square along a vertical line

def smoothed_square_sum(coeffs: CoefficientTable, kernel: SmoothingKernel,
                        sigma: float, truncation: float) -> float:
    """Exact weighted sum |a(n)|^2 lambda(n/X)^2 n^(-2 sigma)."""
    n, w = _term_data(coeffs, kernel, truncation)
    if n.size == 0:
        return 0.0
    return float(np.sum(np.abs(w) ** 2 * n ** (-2.0 * sigma)))


def mean_square_estimate(coeffs: CoefficientTable, kernel: SmoothingKernel,
                         sigma: float, horizon: float, dt: float,
                         truncation: float, threads: int = 1) -> float:
    """Midpoint Riemann sum of the two-sided vertical mean square."""
    if dt > 1:
        raise ValueError("dt must be <= 1 to resolve the integrand's oscillation")
    count = int(round(2.0 * horizon / dt))
    grid = ShiftGrid(sigma=sigma, tau_start=-horizon + dt / 2.0, dtau=dt,
                     count=count, truncation=max(truncation, 2.0))
    vals = shifted_grid_values(coeffs, kernel, grid, threads=threads)
    return float(np.mean(np.abs(vals) ** 2))


@dataclass(frozen=True)
class MeanSquareReport:
    ratio: float
    estimate: float
    target: float
    sigma: float
    horizon: float
    dt: float
    truncation: float


def mean_square_ratio(coeffs: CoefficientTable, kernel: SmoothingKernel,
                      sigma: float, horizon: float, dt: float,
                      truncation: float, threads: int = 1) -> MeanSquareReport:
    """Riemann-sum mean square divided by the exact weighted target sum.

    The estimate carries an O(truncation/horizon) error on top of the
    quadrature error, so ratios are read against wide brackets.
    """
    if sigma <= coeffs.spec.sigma_phi:
        raise ValueError(f"sigma must exceed sigma_phi={coeffs.spec.sigma_phi}")
    est = mean_square_estimate(coeffs, kernel, sigma, horizon, dt, truncation, threads)
    target = smoothed_square_sum(coeffs, kernel, sigma, truncation)
    return MeanSquareReport(ratio=est / target, estimate=est, target=target,
                            sigma=sigma, horizon=horizon, dt=dt, truncation=truncation)


# ---------------------------------------------------------------------------
# equidistribution averages

def oscillatory_mean_quadrature(omega: float, horizon: float) -> complex:
    """(1/T) integral of exp(i omega tau) over [0, T] by per-period panels."""
    if horizon <= 0:
        raise ValueError("horizon must be positive")
    if omega == 0.0:
        return 1.0 + 0j
    cycles = abs(omega) * horizon / (2 * np.pi)
    panels = int(min(max(8, 4 * cycles + 8), 4_000_000))
    nodes, weights = np.polynomial.legendre.leggauss(8)
    edges = np.linspace(0.0, horizon, panels + 1)
    mid = 0.5 * (edges[1:] + edges[:-1])
    half = 0.5 * (edges[1:] - edges[:-1])
    tau = (mid[:, None] + half[:, None] * nodes[None, :]).ravel()
    w = (half[:, None] * weights[None, :]).ravel()
    return complex(np.dot(np.exp(1j * omega * tau), w) / horizon)


@dataclass(frozen=True)
class WeylAverage:
    prime: int
    horizon: float
    closed_form: complex
    quadrature: complex

    @property
    def bound(self) -> float:
        return 2.0 / (self.horizon * np.log(self.prime))


def weyl_average(p: int, horizon: float) -> WeylAverage:
    """(1/T) integral of p^(i tau): closed form plus a quadrature cross-check."""
    if not is_prime(p):
        raise ValueError(f"{p} is not prime")
    if horizon <= 0:
        raise ValueError("horizon must be positive")
    omega = np.log(p)
    closed = (np.exp(1j * omega * horizon) - 1.0) / (1j * omega * horizon)
    return WeylAverage(prime=p, horizon=horizon, closed_form=complex(closed),
                       quadrature=oscillatory_mean_quadrature(omega, horizon))


def joint_weyl_moment(primes: Sequence[int], exponents: Sequence[int],
                      horizon: float) -> complex:
    """(1/T) integral of prod p_n^(i k_n tau); frequency sum k_n log p_n != 0."""
    primes = [int(p) for p in primes]
    exponents = [int(k) for k in exponents]
    if len(primes) != len(exponents):
        raise ValueError("primes and exponents must have equal length")
    if len(set(primes)) != len(primes):
        raise ValueError("primes must be distinct")
    for p in primes:
        if not is_prime(p):
            raise ValueError(f"{p} is not prime")
    if all(k == 0 for k in exponents):
        raise ValueError("exponent vector must not be identically zero")
    if any(abs(k) > 10 for k in exponents):
        raise ValueError("exponents are capped at |k| <= 10")
    omega = float(sum(k * np.log(p) for p, k in zip(primes, exponents)))
    # unique factorization keeps omega away from 0 for nonzero exponents
    return complex((np.exp(1j * omega * horizon) - 1.0) / (1j * omega * horizon))


# ---------------------------------------------------------------------------
# two-sample comparison of |value| distributions

def ks_statistic(x: np.ndarray, y: np.ndarray) -> float:
    """Two-sample Kolmogorov-Smirnov statistic (sup distance of the ECDFs)."""
    x = np.sort(np.asarray(x, dtype=np.float64))
    y = np.sort(np.asarray(y, dtype=np.float64))
    if x.size == 0 or y.size == 0:
        raise ValueError("samples must be nonempty")
    both = np.concatenate([x, y])
    cdf_x = np.searchsorted(x, both, side="right") / x.size
    cdf_y = np.searchsorted(y, both, side="right") / y.size
    return float(np.max(np.abs(cdf_x - cdf_y)))


def _point_weights(coeffs, kernel, s0, truncation):
    n, w = _term_data(coeffs, kernel, truncation)
    return n, w * np.exp(-complex(s0) * np.log(n))


def shift_samples(coeffs: CoefficientTable, kernel: SmoothingKernel, s0: complex,
                  horizon: float, count: int, truncation: float, seed: int) -> np.ndarray:
    """|smoothed value| at s0 + i tau for ``count`` uniform random shifts."""
    rng = np.random.default_rng(seed)
    taus = rng.uniform(0.0, horizon, size=count)
    n, w = _point_weights(coeffs, kernel, s0, truncation)
    out = np.empty(count, dtype=np.float64)
    log_n = np.log(n)
    for lo in range(0, count, 512):
        hi = min(lo + 512, count)
        out[lo:hi] = np.abs(w @ np.exp(-1j * np.outer(log_n, taus[lo:hi])))
    return out


def model_samples(coeffs: CoefficientTable, kernel: SmoothingKernel, s0: complex,
                  count: int, truncation: float, seed: int,
                  stream_offset: int = 0) -> np.ndarray:
    """|randomized smoothed value| at s0 for ``count`` torus draws."""
    top = kernel.required_terms(truncation)
    n, w = _point_weights(coeffs, kernel, s0, truncation)
    out = np.empty(count, dtype=np.float64)
    streams = np.arange(stream_offset, stream_offset + count)
    for lo in range(0, count, 1024):
        hi = min(lo + 1024, count)
        om = omega_table_batch(max(top, 2), top, seed, streams[lo:hi])
        out[lo:hi] = np.abs(w @ om[1:])
    return out


def _moments(x: np.ndarray) -> dict:
    m1 = float(np.mean(x))
    m2 = float(np.mean(x**2))
    return {
        "mean": m1,
        "mean_se": float(np.std(x, ddof=1) / np.sqrt(x.size)),
        "second": m2,
        "second_se": float(np.std(x**2, ddof=1) / np.sqrt(x.size)),
    }


@dataclass(frozen=True)
class DistributionComparison:
    ks: float
    shift_moments: dict
    model_moments: dict
    count: int
    config: dict = field(default_factory=dict)


def empirical_vs_model(coeffs: CoefficientTable, kernel: SmoothingKernel, s0: complex,
                       horizon: float, count: int, truncation: float,
                       seed: int) -> DistributionComparison:
    """KS statistic between the shift ensemble and the random model at one point."""
    s0 = complex(s0)
    strip = StripDomain(coeffs.spec.sigma_phi)
    if not strip.sigma_low < s0.real < strip.sigma_high:
        raise ValueError(f"s0 must lie strictly inside the strip ({strip.sigma_low}, 1)")
    if count < 100:
        raise ValueError("count must be >= 100")
    a = shift_samples(coeffs, kernel, s0, horizon, count, truncation, seed)
    b = model_samples(coeffs, kernel, s0, count, truncation, seed + 1)
    return DistributionComparison(
        ks=ks_statistic(a, b),
        shift_moments=_moments(a),
        model_moments=_moments(b),
        count=count,
        config={"s0": [s0.real, s0.imag], "horizon": horizon,
                "truncation": truncation, "seed": seed},
    )


# ---------------------------------------------------------------------------
# bounded-Lipschitz functional gap and support probing

class FamilyEvaluator:
    """Smoothed values on every exhaustion grid K_1..K_level, batched.

    Stacks all grid points into one matrix so shift batches and model
    batches are single matrix products.
    """

    def __init__(self, coeffs: CoefficientTable, kernel: SmoothingKernel,
                 family: ExhaustionFamily, level: int, truncation: float):
        self.family = family
        self.level = level
        self.truncation = truncation
        rects = [family.rect(ell) for ell in range(1, level + 1)]
        pts = np.concatenate([r.points().ravel() for r in rects])
        self._shapes = [(r.resolution, r.resolution) for r in rects]
        self._splits = np.cumsum([np.prod(s) for s in self._shapes])[:-1]
        n, w = _term_data(coeffs, kernel, truncation)
        self._n = n
        self._log_n = np.log(n) if n.size else n
        self._base = w[None, :] * np.exp(-np.outer(pts, self._log_n))  # (S, N)
        self._top = n.size

    def _split(self, col: np.ndarray) -> tuple[np.ndarray, ...]:
        parts = np.split(col, self._splits)
        return tuple(part.reshape(shape) for part, shape in zip(parts, self._shapes))

    def at_shifts(self, taus: np.ndarray) -> list[tuple[np.ndarray, ...]]:
        """Per-shift tuples of level samples of the smoothed series at s + i tau."""
        taus = np.asarray(taus, dtype=np.float64)
        out = []
        for lo in range(0, taus.size, 256):
            hi = min(lo + 256, taus.size)
            rot = np.exp(-1j * np.outer(self._log_n, taus[lo:hi]))
            vals = self._base @ rot  # (S, chunk)
            out.extend(self._split(vals[:, j]) for j in range(hi - lo))
        return out

    def at_omegas(self, seed: int, streams: np.ndarray) -> list[tuple[np.ndarray, ...]]:
        """Per-draw tuples of level samples of the randomized smoothed series."""
        streams = np.asarray(streams)
        out = []
        for lo in range(0, streams.size, 256):
            hi = min(lo + 256, streams.size)
            om = omega_table_batch(max(self._top, 2), self._top, seed, streams[lo:hi])
            vals = self._base @ om[1:]
            out.extend(self._split(vals[:, j]) for j in range(hi - lo))
        return out


def constant_reference(families: Sequence[ExhaustionFamily], level: int,
                       num_torus: int, value: complex = 1.0,
                       torus_value: complex = 1.0) -> ProductPoint:
    """Product point whose function slots are a constant (the model mean is 1)."""
    funcs = []
    for fam in families:
        funcs.append(tuple(np.full((fam.resolution, fam.resolution), complex(value))
                           for _ in range(level)))
    return ProductPoint.build(funcs, [torus_value] * num_torus)


@dataclass(frozen=True)
class GapReport:
    gap: float
    shift_mean: float
    model_mean: float
    shift_se: float
    model_se: float
    count: int
    horizon: float
    truncation: float


def lipschitz_gap(reference: ProductPoint, coeffs_list: Sequence[CoefficientTable],
                  kernel: SmoothingKernel, primes: Sequence[int], horizon: float,
                  count: int, truncation: float, seed: int,
                  level: int = DEFAULT_LEVEL) -> GapReport:
    """Gap between the two ensemble means of F = min(1, distance to reference).

    F is bounded by 1 and Lipschitz in the product metric, so the gap is a
    single-functional witness of weak convergence; it is estimated by Monte
    Carlo on both sides with the same sample count.
    """
    r = len(coeffs_list)
    if len(reference.functions) != r or len(reference.torus) != len(primes):
        raise ValueError("reference shape does not match (r function slots, N primes)")
    families = [ExhaustionFamily(StripDomain(c.spec.sigma_phi)) for c in coeffs_list]
    evaluators = [FamilyEvaluator(c, kernel, fam, level, truncation)
                  for c, fam in zip(coeffs_list, families)]
    primes = np.asarray([int(p) for p in primes], dtype=np.int64)

    rng = np.random.default_rng(seed)
    taus = rng.uniform(0.0, horizon, size=count)
    shift_funcs = [ev.at_shifts(taus) for ev in evaluators]
    shift_torus = np.exp(1j * np.outer(taus, np.log(primes.astype(np.float64))))

    streams = np.arange(count)
    model_funcs = [ev.at_omegas(seed + 1, streams) for ev in evaluators]
    angles = angle_matrix(primes, seed + 1, streams)  # (N, count)
    model_torus = np.exp(2j * np.pi * angles.T)

    def functional(funcs_by_slot, torus_row) -> float:
        point = ProductPoint.build([funcs_by_slot[j] for j in range(r)], torus_row)
        return min(1.0, product_metric(point, reference, families))

    f_shift = np.array([
        functional([shift_funcs[j][m] for j in range(r)], shift_torus[m])
        for m in range(count)
    ])
    f_model = np.array([
        functional([model_funcs[j][m] for j in range(r)], model_torus[m])
        for m in range(count)
    ])
    return GapReport(
        gap=float(abs(f_shift.mean() - f_model.mean())),
        shift_mean=float(f_shift.mean()),
        model_mean=float(f_model.mean()),
        shift_se=float(np.std(f_shift, ddof=1) / np.sqrt(count)),
        model_se=float(np.std(f_model, ddof=1) / np.sqrt(count)),
        count=count,
        horizon=horizon,
        truncation=truncation,
    )


@dataclass(frozen=True)
class HitRateReport:
    rate: float
    hits: int
    count: int
    delta: float
    note: str = ("a zero rate is consistent with a tiny positive measure; "
                 "no convergence rate is available")


def support_hit_rate(target: ProductPoint, coeffs_list: Sequence[CoefficientTable],
                     kernel: SmoothingKernel, primes: Sequence[int], delta: float,
                     count: int, truncation: float, seed: int,
                     level: int = DEFAULT_LEVEL) -> HitRateReport:
    """Fraction of model draws within product-metric delta of the target.

    The target's function slots must be non-vanishing on their grids (the
    limit law charges only such functions, or the zero function).
    """
    if count < 1:
        raise ValueError("count must be >= 1")
    if delta <= 0:
        raise ValueError("delta must be positive")
    for slot in target.functions:
        for arr in slot:
            if np.any(np.abs(arr) == 0.0):
                raise ValueError(
                    "target vanishes on its grid; admissible targets are "
                    "non-vanishing (or identically zero) on the strip"
                )
    r = len(coeffs_list)
    if len(target.functions) != r or len(target.torus) != len(primes):
        raise ValueError("target shape does not match (r function slots, N primes)")
    families = [ExhaustionFamily(StripDomain(c.spec.sigma_phi)) for c in coeffs_list]
    evaluators = [FamilyEvaluator(c, kernel, fam, level, truncation)
                  for c, fam in zip(coeffs_list, families)]
    primes = np.asarray([int(p) for p in primes], dtype=np.int64)
    streams = np.arange(count)
    model_funcs = [ev.at_omegas(seed, streams) for ev in evaluators]
    angles = angle_matrix(primes, seed, streams)
    torus = np.exp(2j * np.pi * angles.T)
    hits = 0
    for m in range(count):
        point = ProductPoint.build([model_funcs[j][m] for j in range(r)], torus[m])
        if product_metric(point, target, families) < delta:
            hits += 1
    return HitRateReport(rate=hits / count, hits=hits, count=count, delta=delta)
