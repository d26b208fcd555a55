"""Function-space metrics on the strip, torus distances, and their product.

Holomorphic functions are represented by samples on rectangle grids, so
every metric here is the computable grid surrogate of its exact
counterpart; the engine module emits the Lipschitz gap bound that
controls the surrogate error.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

DEFAULT_RESOLUTION = 21
DEFAULT_LEVEL = 20


@dataclass(frozen=True)
class StripDomain:
    """Open vertical strip sigma_low < Re(s) < 1."""

    sigma_low: float
    sigma_high: float = 1.0

    def __post_init__(self):
        if self.sigma_high != 1.0:
            raise ValueError("the strip's right edge is fixed at 1")
        if not 0.5 <= self.sigma_low < self.sigma_high:
            raise ValueError(f"sigma_low must lie in [1/2, 1), got {self.sigma_low}")


@dataclass(frozen=True)
class CompactRectangle:
    """Closed rectangle [sigma_left, sigma_right] x [-height, height] with a grid."""

    sigma_left: float
    sigma_right: float
    height: float
    resolution: int = DEFAULT_RESOLUTION

    def __post_init__(self):
        if self.sigma_left > self.sigma_right:
            raise ValueError("sigma_left must not exceed sigma_right")
        if self.height < 0:
            raise ValueError("height must be >= 0")
        if self.resolution < 2:
            raise ValueError("resolution must be >= 2")

    @property
    def sigmas(self) -> np.ndarray:
        return np.linspace(self.sigma_left, self.sigma_right, self.resolution)

    @property
    def ts(self) -> np.ndarray:
        return np.linspace(-self.height, self.height, self.resolution)

    def points(self) -> np.ndarray:
        """Grid as a (resolution, resolution) complex array, sigma along axis 0."""
        return self.sigmas[:, None] + 1j * self.ts[None, :]

    def inside(self, strip: StripDomain) -> bool:
        return strip.sigma_low < self.sigma_left and self.sigma_right < strip.sigma_high

    def sample(self, fn: Callable[[np.ndarray], np.ndarray]) -> np.ndarray:
        return np.asarray(fn(self.points()), dtype=np.complex128)


@dataclass(frozen=True)
class ExhaustionFamily:
    """Nested compact rectangles K_1 c K_2 c ... exhausting the strip.

    K_level pulls 1/(level + offset) away from each strip edge and spans
    heights up to ``level``.  The requested offset is raised to the
    smallest value that keeps K_1 nonempty for the strip's width, and the
    effective value is recorded.
    """

    strip: StripDomain
    offset: int = 2
    resolution: int = DEFAULT_RESOLUTION

    def __post_init__(self):
        if self.offset < 1:
            raise ValueError("offset must be >= 1")
        width = self.strip.sigma_high - self.strip.sigma_low
        # K_1 nonempty needs 2/(1 + offset) < width
        minimal = 1
        while 2.0 / (1 + minimal) >= width:
            minimal += 1
        object.__setattr__(self, "offset", max(self.offset, minimal))

    def margin(self, level: int) -> float:
        return 1.0 / (level + self.offset)

    def rect(self, level: int) -> CompactRectangle:
        if level < 1:
            raise ValueError("level must be >= 1")
        m = self.margin(level)
        return CompactRectangle(
            sigma_left=self.strip.sigma_low + m,
            sigma_right=self.strip.sigma_high - m,
            height=float(level),
            resolution=self.resolution,
        )

    def level_for(self, rect: CompactRectangle) -> int:
        """Smallest level whose rectangle contains ``rect`` (must be in the strip)."""
        if not rect.inside(self.strip):
            raise ValueError("rectangle is not contained in the open strip")
        gap_left = rect.sigma_left - self.strip.sigma_low
        gap_right = self.strip.sigma_high - rect.sigma_right
        level = max(1, math.ceil(1.0 / gap_left - self.offset),
                    math.ceil(1.0 / gap_right - self.offset), math.ceil(rect.height))
        while self.margin(level) > gap_left or self.margin(level) > gap_right:
            level += 1
        return level

    def sample(self, fn: Callable[[np.ndarray], np.ndarray], level: int) -> list[np.ndarray]:
        """Samples of fn on K_1 .. K_level."""
        return [self.rect(ell).sample(fn) for ell in range(1, level + 1)]


def seminorm(f_samples: np.ndarray, g_samples: np.ndarray, rect: CompactRectangle) -> float:
    """sup of |f - g| over the rectangle's sample grid."""
    f = np.asarray(f_samples)
    g = np.asarray(g_samples)
    expected = (rect.resolution, rect.resolution)
    if f.shape != expected or g.shape != expected:
        raise ValueError(f"grid mismatch: expected {expected}, got {f.shape} vs {g.shape}")
    return float(np.max(np.abs(f - g)))


def _capped_sum(sups: Sequence[float]) -> float:
    total = 0.0
    for ell, d in enumerate(sups, start=1):
        total += min(d, 1.0) / 2.0**ell
    return total


def metric_d_phi(f_levels: Sequence[np.ndarray], g_levels: Sequence[np.ndarray],
                 family: ExhaustionFamily, level: int) -> float:
    """Exhaustion metric truncated at ``level``; truncation error <= 2^-level."""
    if level < 1:
        raise ValueError("truncation level must be >= 1")
    if len(f_levels) < level or len(g_levels) < level:
        raise ValueError(f"need samples on K_1..K_{level}")
    sups = [seminorm(f_levels[i], g_levels[i], family.rect(i + 1)) for i in range(level)]
    return _capped_sum(sups)


def torus_distance(x: complex, y: complex) -> float:
    """Nearest-integer distance of the angles of two unit complex numbers."""
    x = complex(x)
    y = complex(y)
    if abs(abs(x) - 1.0) > 1e-9 or abs(abs(y) - 1.0) > 1e-9:
        raise ValueError("torus points must have modulus 1")
    tx = (np.angle(x) / (2 * np.pi)) % 1.0
    ty = (np.angle(y) / (2 * np.pi)) % 1.0
    return circle_distance(tx, ty)


def circle_distance(theta1: float, theta2: float) -> float:
    """Distance from theta1 - theta2 to the nearest integer."""
    d = (theta1 - theta2) % 1.0
    return float(min(d, 1.0 - d))


@dataclass(frozen=True)
class ProductPoint:
    """A point of (functions)^r x (torus)^N: per-slot level samples plus unit numbers."""

    functions: tuple[tuple[np.ndarray, ...], ...]
    torus: tuple[complex, ...]

    @classmethod
    def build(cls, functions, torus) -> "ProductPoint":
        fn = tuple(tuple(np.asarray(a, dtype=np.complex128) for a in slot) for slot in functions)
        return cls(functions=fn, torus=tuple(complex(z) for z in torus))


def product_metric(a: ProductPoint, b: ProductPoint,
                   families: Sequence[ExhaustionFamily]) -> float:
    """Sum of the per-slot exhaustion metrics and the per-prime torus distances."""
    if len(a.functions) != len(b.functions) or len(a.torus) != len(b.torus):
        raise ValueError("product points have mismatched shapes")
    if len(families) != len(a.functions):
        raise ValueError("need one exhaustion family per function slot")
    total = 0.0
    for fa, fb, family in zip(a.functions, b.functions, families):
        if len(fa) != len(fb):
            raise ValueError("function slots sampled at different truncation levels")
        total += metric_d_phi(fa, fb, family, len(fa))
    for xa, xb in zip(a.torus, b.torus):
        total += torus_distance(xa, xb)
    return total
