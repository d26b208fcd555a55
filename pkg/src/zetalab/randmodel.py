"""Random Euler-product model: torus sampling and randomized smoothed series.

One uniform angle per prime is derived from a counter-style 64-bit mix of
(seed, stream, prime), so samples are reproducible, stream-splittable for
parallel Monte Carlo, and identical no matter how many primes are asked
for at once.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .arith import CoefficientTable, EulerProductSpec
from .kernel import SmoothingKernel
from .primes import exponent_matrix, factorize, primes_up_to

_GAMMA = np.uint64(0x9E3779B97F4A7C15)
_MIX1 = np.uint64(0xBF58476D1CE4E5B9)
_MIX2 = np.uint64(0x94D049BB133111EB)
_TWO64 = float(2**64)


def _mix(x: np.ndarray) -> np.ndarray:
    """SplitMix64 finalizer on uint64 arrays."""
    z = (x + _GAMMA).astype(np.uint64)
    z ^= z >> np.uint64(30)
    z *= _MIX1
    z ^= z >> np.uint64(27)
    z *= _MIX2
    z ^= z >> np.uint64(31)
    return z


def torus_angles(primes, seed: int, stream: int) -> np.ndarray:
    """Angles in [0, 1), one per prime, from hash(seed, stream, prime)."""
    p = np.asarray(primes, dtype=np.uint64)
    state = _mix(np.uint64(seed % 2**64) + np.zeros_like(p))
    state = _mix(state ^ np.uint64(stream % 2**64))
    state = _mix(state ^ p)
    return state.astype(np.float64) / _TWO64


def angle_matrix(primes, seed: int, streams) -> np.ndarray:
    """(num_primes, num_streams) matrix of angles; column m is stream ``streams[m]``."""
    p = np.asarray(primes, dtype=np.uint64)
    st = np.asarray(streams, dtype=np.uint64)
    base = _mix(np.full(p.shape, np.uint64(seed % 2**64), dtype=np.uint64))
    out = np.empty((p.size, st.size), dtype=np.float64)
    for j, sval in enumerate(st):
        state = _mix(base ^ sval)
        out[:, j] = _mix(state ^ p).astype(np.float64) / _TWO64
    return out


@dataclass(frozen=True)
class OmegaSample:
    """One point of the finite-prime torus: a unit number per prime <= bound."""

    primes: np.ndarray
    angles: np.ndarray
    seed: int
    stream: int

    def __post_init__(self):
        self.primes.setflags(write=False)
        self.angles.setflags(write=False)
        object.__setattr__(self, "_index", {int(p): i for i, p in enumerate(self.primes)})

    @property
    def values(self) -> np.ndarray:
        return np.exp(2j * np.pi * self.angles)

    @property
    def prime_bound(self) -> int:
        return int(self.primes[-1]) if self.primes.size else 0

    def at_prime(self, p: int) -> complex:
        try:
            return complex(np.exp(2j * np.pi * self.angles[self._index[p]]))
        except KeyError:
            raise ValueError(f"prime {p} exceeds the sample's bound {self.prime_bound}") from None

    def angle_at(self, p: int) -> float:
        try:
            return float(self.angles[self._index[p]])
        except KeyError:
            raise ValueError(f"prime {p} exceeds the sample's bound {self.prime_bound}") from None


def sample_omega(primes, seed: int, stream: int = 0) -> OmegaSample:
    p = np.asarray(sorted(int(q) for q in set(np.asarray(primes).tolist())), dtype=np.int64)
    return OmegaSample(primes=p, angles=torus_angles(p, seed, stream),
                       seed=int(seed), stream=int(stream))


def sample_omega_up_to(prime_bound: int, seed: int, stream: int = 0) -> OmegaSample:
    return sample_omega(primes_up_to(prime_bound), seed, stream)


def omega_at_n(sample: OmegaSample, n: int) -> complex:
    """Completely multiplicative extension at n from the prime factorization."""
    if n < 1:
        raise ValueError("n must be >= 1")
    angle = 0.0
    for p, e in factorize(n):
        angle += e * sample.angle_at(p)
    return complex(np.exp(2j * np.pi * angle))


def omega_table(sample: OmegaSample, limit: int) -> np.ndarray:
    """omega(n) for n = 0..limit (entry 0 unused, set to 0)."""
    ps, expo = exponent_matrix(limit)
    if ps.size and (sample.primes.size == 0 or int(ps[-1]) > sample.prime_bound):
        raise ValueError(
            f"sample covers primes <= {sample.prime_bound}, need <= {int(ps[-1])}"
        )
    if ps.size:
        pos = np.searchsorted(sample.primes, ps)
        phases = expo @ sample.angles[pos]
    else:
        phases = np.zeros(limit + 1)
    out = np.exp(2j * np.pi * phases)
    out[0] = 0.0
    if limit >= 1:
        out[1] = 1.0
    return out


def omega_table_batch(prime_bound: int, limit: int, seed: int, streams) -> np.ndarray:
    """(limit+1, num_streams) matrix whose column m is omega_m(0..limit)."""
    ps, expo = exponent_matrix(limit)
    if ps.size and int(ps[-1]) > prime_bound:
        raise ValueError(f"prime bound {prime_bound} below largest needed prime {int(ps[-1])}")
    all_ps = primes_up_to(prime_bound)
    angles = angle_matrix(all_ps, seed, streams)  # (P, M)
    pos = np.searchsorted(all_ps, ps)
    phases = expo @ angles[pos]  # (limit+1, M)
    out = np.exp(2j * np.pi * phases)
    out[0] = 0.0
    if limit >= 1:
        out[1] = 1.0
    return out


def log_euler_factor(spec: EulerProductSpec, p: int, z: complex, s: complex) -> complex:
    """Principal-branch log of the twisted local factor at p.

    Sum over the local roots of -Log(1 - root * z * p^-s); requires every
    |root * z * p^-s| < 1, which holds automatically for Re(s) > 0.
    """
    z = complex(z)
    s = complex(s)
    out = 0j
    ps = p ** (-s)
    for root in spec.roots_at(p):
        arg = root * z * ps
        if abs(arg) >= 1.0:
            raise ValueError(
                f"local log argument |{arg:.4g}| >= 1 at p={p}; need Re(s) > 0 and |z| <= 1"
            )
        out -= np.log1p(-arg)
    return out


def random_log_value(spec: EulerProductSpec, sample: OmegaSample, s: complex,
                     prime_bound: int) -> complex:
    """Partial sum over p <= prime_bound of the twisted local factor logs."""
    s = complex(s)
    if s.real <= spec.sigma_phi:
        raise ValueError(f"Re(s) must exceed sigma_phi={spec.sigma_phi}")
    ps = primes_up_to(prime_bound)
    if ps.size == 0:
        return 0j
    if sample.primes.size == 0 or int(ps[-1]) > sample.prime_bound:
        raise ValueError(f"sample covers primes <= {sample.prime_bound}, need {int(ps[-1])}")
    roots = spec.root_matrix(ps)  # (P, m)
    pos = np.searchsorted(sample.primes, ps)
    z = np.exp(2j * np.pi * sample.angles[pos])
    args = roots * (z * np.exp(-s * np.log(ps.astype(np.float64))))[:, None]
    if np.any(np.abs(args) >= 1.0):
        raise ValueError("local log argument reached modulus 1; need Re(s) > 0")
    return complex(-np.sum(np.log1p(-args)))


def truncated_euler_product(spec: EulerProductSpec, sample: OmegaSample, s: complex,
                            prime_bound: int) -> complex:
    """Product over p <= prime_bound of the twisted local factors."""
    s = complex(s)
    ps = primes_up_to(prime_bound)
    if ps.size == 0:
        return 1.0 + 0j
    roots = spec.root_matrix(ps)
    pos = np.searchsorted(sample.primes, ps)
    z = np.exp(2j * np.pi * sample.angles[pos])
    args = roots * (z * np.exp(-s * np.log(ps.astype(np.float64))))[:, None]
    return complex(1.0 / np.prod(1.0 - args))


def random_smoothed_value(coeffs: CoefficientTable, kernel: SmoothingKernel,
                          sample: OmegaSample, s: complex, truncation: float) -> complex:
    """Cutoff-weighted sum of a(n) omega(n) n^-s."""
    top = kernel.required_terms(truncation)
    if top > coeffs.limit:
        raise ValueError(
            f"coefficient table too short: need n <= {top}, table stops at {coeffs.limit}"
        )
    if top < 1:
        return 0j
    om = omega_table(sample, top)
    n = np.arange(1, top + 1, dtype=np.float64)
    w = coeffs.a[1 : top + 1] * kernel(n / truncation) * om[1:]
    return complex(np.dot(w, np.exp(-complex(s) * np.log(n))))
