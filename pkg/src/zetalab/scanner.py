"""Simultaneous phase/function shift hunts.

The phase condition carves periodic windows out of the shift range; only
shifts inside the intersection of all windows are evaluated against the
function targets, and the qualifying set's measure is reported as a
density estimate with its grid-resolution caveat.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .arith import CoefficientTable, EulerProductSpec, coefficients_from_euler
from .engine import RectangleEvaluator, shift_lipschitz_bound, sup_distance_on_compact
from .kernel import SmoothingKernel
from .metrics import CompactRectangle, StripDomain
from .primes import is_prime

MERGE_TOL = 1e-12


@dataclass(frozen=True)
class PhaseWindows:
    """Shifts tau in [start, start+horizon] with ||tau log(p)/2pi - theta|| < eps."""

    prime: int
    theta: float
    epsilon: float
    horizon: float
    start: float
    intervals: np.ndarray  # (k, 2) sorted disjoint [lo, hi]
    degenerate: bool = False

    @property
    def period(self) -> float:
        return 2.0 * np.pi / np.log(self.prime)

    def measure(self) -> float:
        return interval_measure(self.intervals)

    def contains(self, tau: float) -> bool:
        iv = self.intervals
        k = np.searchsorted(iv[:, 0], tau, side="right") - 1
        return k >= 0 and tau <= iv[k, 1]


def interval_measure(intervals: np.ndarray) -> float:
    if len(intervals) == 0:
        return 0.0
    iv = np.asarray(intervals, dtype=np.float64)
    return float(np.sum(iv[:, 1] - iv[:, 0]))


def phase_windows(p: int, theta: float, epsilon: float, horizon: float,
                  start: float = 0.0) -> PhaseWindows:
    """Closed-form window family of the single-prime phase condition."""
    if not is_prime(p):
        raise ValueError(f"{p} is not prime")
    if epsilon <= 0:
        raise ValueError("epsilon must be positive")
    if horizon <= 0:
        raise ValueError("horizon must be positive")
    theta = theta % 1.0
    end = start + horizon
    if epsilon >= 0.5:
        iv = np.array([[start, end]])
        return PhaseWindows(prime=p, theta=theta, epsilon=epsilon, horizon=horizon,
                            start=start, intervals=iv, degenerate=True)
    beta = np.log(p) / (2.0 * np.pi)  # tau * beta must be within eps of theta mod 1
    k_lo = math.floor(start * beta - theta - epsilon)
    k_hi = math.ceil(end * beta - theta + epsilon)
    out = []
    for k in range(k_lo, k_hi + 1):
        lo = (k + theta - epsilon) / beta
        hi = (k + theta + epsilon) / beta
        lo = max(lo, start)
        hi = min(hi, end)
        if hi > lo:
            out.append((lo, hi))
    iv = np.array(out, dtype=np.float64).reshape(-1, 2)
    return PhaseWindows(prime=p, theta=theta, epsilon=epsilon, horizon=horizon,
                        start=start, intervals=iv)


def _intersect_two(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    out = []
    i = j = 0
    while i < len(a) and j < len(b):
        lo = max(a[i, 0], b[j, 0])
        hi = min(a[i, 1], b[j, 1])
        if hi - lo > MERGE_TOL:
            out.append((lo, hi))
        if a[i, 1] < b[j, 1]:
            i += 1
        else:
            j += 1
    return np.array(out, dtype=np.float64).reshape(-1, 2)


def intersect_windows(window_lists: Sequence[PhaseWindows | np.ndarray]) -> np.ndarray:
    """Sorted disjoint intervals equal to the set intersection of all lists."""
    if not window_lists:
        raise ValueError("need at least one window list")
    ivs = [w.intervals if isinstance(w, PhaseWindows) else np.asarray(w, dtype=np.float64)
           for w in window_lists]
    acc = ivs[0]
    for nxt in ivs[1:]:
        acc = _intersect_two(acc, nxt)
        if len(acc) == 0:
            break
    return acc


@dataclass(frozen=True)
class TargetComponent:
    """One function slot of a hunt: spec, compact rectangle, and target samples."""

    spec: EulerProductSpec
    rect: CompactRectangle
    samples: np.ndarray
    label: str = ""

    def __post_init__(self):
        strip = StripDomain(self.spec.sigma_phi)
        if not self.rect.inside(strip):
            raise ValueError(
                f"rectangle [{self.rect.sigma_left}, {self.rect.sigma_right}] not inside "
                f"the strip ({strip.sigma_low}, 1)"
            )
        samp = np.asarray(self.samples, dtype=np.complex128)
        if samp.shape != (self.rect.resolution, self.rect.resolution):
            raise ValueError("target samples do not match the rectangle grid")
        samp.setflags(write=False)
        object.__setattr__(self, "samples", samp)

    @classmethod
    def from_polynomial(cls, spec: EulerProductSpec, rect: CompactRectangle,
                        coefficients: Sequence[complex], label: str = "") -> "TargetComponent":
        """Target given as polynomial coefficients in s (ascending degree)."""
        pts = rect.points()
        vals = np.zeros_like(pts)
        for c in reversed(list(coefficients)):
            vals = vals * pts + complex(c)
        return cls(spec=spec, rect=rect, samples=vals, label=label)


@dataclass(frozen=True)
class HybridTarget:
    """Function targets on compact rectangles plus per-prime phase constraints."""

    components: tuple[TargetComponent, ...]
    phases: tuple[tuple[int, float], ...]
    epsilon: float

    def __post_init__(self):
        if self.epsilon <= 0:
            raise ValueError("epsilon must be positive")
        ps = [p for p, _ in self.phases]
        if len(set(ps)) != len(ps):
            raise ValueError("phase-constraint primes must be distinct")
        for p, _ in self.phases:
            if not is_prime(p):
                raise ValueError(f"{p} is not prime")
        object.__setattr__(self, "components", tuple(self.components))
        object.__setattr__(self, "phases",
                           tuple((int(p), float(t) % 1.0) for p, t in self.phases))

    def max_prime(self) -> int:
        return max((p for p, _ in self.phases), default=2)


@dataclass
class ScanReport:
    """Outcome of a hunt over one shift range."""

    qualifying_taus: np.ndarray
    candidate_taus: np.ndarray
    distances: np.ndarray  # (num_candidates, r) sup distances per slot
    density: float
    phase_measure: float
    phase_windows_empty: bool
    epsilon: float
    horizon: float
    dtau: float
    truncation: float
    lipschitz_bounds: tuple[float, ...]
    config: dict = field(default_factory=dict)

    def qualifying_count(self) -> int:
        return int(self.qualifying_taus.size)


def candidate_shifts(intervals: np.ndarray, dtau: float) -> np.ndarray:
    """Uniform dtau grid inside each interval; narrow intervals give their midpoint."""
    if dtau <= 0:
        raise ValueError("dtau must be positive")
    out = []
    for lo, hi in intervals:
        if hi - lo < dtau:
            out.append(np.array([(lo + hi) / 2.0]))
        else:
            out.append(np.arange(lo, hi + dtau * 1e-9, dtau))
    if not out:
        return np.array([], dtype=np.float64)
    return np.concatenate(out)


def hybrid_scan(target: HybridTarget, horizon: float, dtau: float,
                truncation: float, kernel: SmoothingKernel | None = None,
                coeff_tables: Sequence[CoefficientTable] | None = None,
                start: float = 0.0, threads: int = 1) -> ScanReport:
    """Scan the phase-window intersection and test every function target.

    The phase condition is necessary, so only shifts inside the window
    intersection are evaluated.  A shift qualifies when every slot's grid
    sup distance is below the target tolerance.  The emitted Lipschitz
    bounds certify how much the sup can move between neighbouring
    candidates; they are logged, not enforced.
    """
    kernel = kernel or SmoothingKernel()
    r = len(target.components)

    if target.phases:
        wins = [phase_windows(p, th, target.epsilon, horizon, start)
                for p, th in target.phases]
        intervals = intersect_windows(wins)
    else:
        intervals = np.array([[start, start + horizon]])
    phase_measure = interval_measure(intervals)
    empty = len(intervals) == 0

    if coeff_tables is None:
        limit = kernel.required_terms(truncation)
        coeff_tables = [coefficients_from_euler(c.spec, max(limit, 1))
                        for c in target.components]

    evaluators = [RectangleEvaluator(tab, kernel, comp.rect, truncation)
                  for tab, comp in zip(coeff_tables, target.components)]
    bounds = tuple(
        shift_lipschitz_bound(tab, kernel, truncation, comp.rect.sigma_left)
        for tab, comp in zip(coeff_tables, target.components)
    )

    taus = candidate_shifts(intervals, dtau) if not empty else np.array([])
    dists = np.empty((taus.size, r), dtype=np.float64)

    def eval_range(lo_hi):
        lo, hi = lo_hi
        for i in range(lo, hi):
            for j, (ev, comp) in enumerate(zip(evaluators, target.components)):
                dists[i, j] = sup_distance_on_compact(ev.at_shift(taus[i]),
                                                      comp.samples, comp.rect)

    chunks = [(i, min(i + 256, taus.size)) for i in range(0, taus.size, 256)]
    if threads > 1 and chunks:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            list(pool.map(eval_range, chunks))
    else:
        for ch in chunks:
            eval_range(ch)

    ok = np.all(dists < target.epsilon, axis=1) if r > 0 else np.ones(taus.size, dtype=bool)
    qualifying = taus[ok]
    density = float(qualifying.size * dtau / horizon)

    return ScanReport(
        qualifying_taus=qualifying,
        candidate_taus=taus,
        distances=dists,
        density=density,
        phase_measure=phase_measure,
        phase_windows_empty=empty,
        epsilon=target.epsilon,
        horizon=horizon,
        dtau=dtau,
        truncation=truncation,
        lipschitz_bounds=bounds,
        config={
            "r": r,
            "phases": list(target.phases),
            "start": start,
            "labels": [c.label or c.spec.label for c in target.components],
        },
    )


def self_target(coeffs: CoefficientTable, kernel: SmoothingKernel,
                rect: CompactRectangle, truncation: float, tau0: float,
                phase_primes: Sequence[int], epsilon: float) -> HybridTarget:
    """Target that shift tau0 satisfies exactly: its own samples and phases."""
    samples = RectangleEvaluator(coeffs, kernel, rect, truncation).at_shift(tau0)
    comp = TargetComponent(spec=coeffs.spec, rect=rect, samples=samples,
                           label=f"self@{tau0}")
    phases = tuple((int(p), float((tau0 * np.log(p) / (2 * np.pi)) % 1.0))
                   for p in phase_primes)
    return HybridTarget(components=(comp,), phases=phases, epsilon=epsilon)
