"""Dirichlet characters, polynomial Euler-product data, and coefficient tables.

Characters are stored as complete value tables mod q.  Euler-product data
is a per-prime list of local roots of modulus at most 1; Dirichlet
coefficients are generated by expanding every local factor into a power
series and combining the prime-power blocks multiplicatively.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence

import numpy as np

from .primes import factorize, primes_up_to

ROOT_BOUND_TOL = 1e-12


def euler_totient(q: int) -> int:
    out = 1
    for p, e in factorize(q):
        out *= (p - 1) * p ** (e - 1)
    return out


def _odd_prime_power_generator(p: int, e: int) -> int:
    """Smallest primitive root mod p**e for odd p."""
    pe = p**e
    group = p**e - p ** (e - 1)
    # primitive root mod p first, lifted to p**e if needed
    fac = [f for f, _ in factorize(p - 1)]
    g = None
    for cand in range(2, p):
        if all(pow(cand, (p - 1) // f, p) != 1 for f in fac):
            g = cand
            break
    assert g is not None
    if e > 1 and pow(g, p - 1, p * p) == 1:
        g += p
    assert pow(g, group, pe) == 1
    return g


def _unit_group_components(q: int) -> list[tuple[int, int]]:
    """Cyclic decomposition of (Z/q)* as [(generator mod q, order)].

    Factors are listed by ascending prime; the 2-power part contributes
    nothing for 2, one component (generator 3) for 4, and the pair
    (q-part of -1, then 5) for 8 and above.  This fixed ordering is what
    makes character indices reproducible.
    """
    comps: list[tuple[int, int]] = []  # (local generator, order, prime power)
    local: list[tuple[int, int, int]] = []
    for p, e in factorize(q):
        pe = p**e
        if p == 2:
            if e == 1:
                continue
            if e == 2:
                local.append((3, 2, 4))
            else:
                local.append((pe - 1, 2, pe))
                local.append((5, 2 ** (e - 2), pe))
        else:
            g = _odd_prime_power_generator(p, e)
            local.append((g, pe - pe // p, pe))
    # lift each local generator to a residue mod q that is 1 in the other factors
    for g, order, pe in local:
        rest = q // pe
        if rest == 1:
            lifted = g % q
        else:
            # CRT: x = g (mod pe), x = 1 (mod rest)
            inv = pow(pe, -1, rest)
            lifted = (g + pe * ((1 - g) * inv % rest)) % q
        comps.append((lifted, order))
    return comps


def _component_logs(q: int, comps: list[tuple[int, int]]) -> dict[int, tuple[int, ...]]:
    """Map each unit mod q to its exponent vector on the component generators."""
    logs = {1: tuple(0 for _ in comps)}
    if not comps:
        return logs
    # walk the group: repeatedly multiply by each generator
    frontier = [1]
    while frontier:
        new = []
        for n in frontier:
            vec = logs[n]
            for i, (g, order) in enumerate(comps):
                m = (n * g) % q
                if m not in logs:
                    nv = list(vec)
                    nv[i] = (nv[i] + 1) % order
                    logs[m] = tuple(nv)
                    new.append(m)
        frontier = new
    return logs


@dataclass(frozen=True)
class DirichletCharacter:
    """Complete table of a Dirichlet character mod q.

    ``values[r]`` is the character at the residue class r; entries are
    roots of unity on the units and 0 elsewhere.
    """

    modulus: int
    values: np.ndarray
    index: int | None = None

    def __post_init__(self):
        q = self.modulus
        if q < 1:
            raise ValueError(f"modulus must be positive, got {q}")
        vals = np.asarray(self.values, dtype=np.complex128)
        if vals.shape != (q,):
            raise ValueError(f"value table must have length q={q}")
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)
        for r in range(q):
            if math.gcd(r, q) > 1:
                if vals[r] != 0:
                    raise ValueError(f"chi({r}) must vanish (gcd({r},{q})>1)")
            elif abs(abs(vals[r]) - 1.0) > 1e-9:
                raise ValueError(f"chi({r}) must have modulus 1 on units")
        if abs(vals[1 % q] - 1.0) > 1e-9:
            raise ValueError("chi(1) must equal 1")

    def __call__(self, n: int) -> complex:
        return complex(self.values[n % self.modulus])

    def value_at_primes(self, primes: Sequence[int]) -> np.ndarray:
        idx = np.asarray(primes, dtype=np.int64) % self.modulus
        return self.values[idx]

    @property
    def is_principal(self) -> bool:
        units = [r for r in range(self.modulus) if math.gcd(r, self.modulus) == 1]
        return bool(np.allclose(self.values[units], 1.0))


def character_from_index(q: int, index: int) -> DirichletCharacter:
    """Deterministic enumeration of the characters mod q.

    The unit group is decomposed into cyclic components (ascending prime
    order, 2-part split as documented in ``_unit_group_components``) and
    ``index`` is read as the mixed-radix exponent tuple in lexicographic
    order, so index 0 is always the principal character.
    """
    if q < 1:
        raise ValueError(f"modulus must be positive, got {q}")
    phi = euler_totient(q)
    if not 0 <= index < phi:
        raise ValueError(f"character index {index} out of range [0, {phi}) for q={q}")
    comps = _unit_group_components(q)
    orders = [d for _, d in comps]
    # lexicographic on the exponent tuple: first component most significant
    digits = []
    rem = index
    for i in range(len(orders)):
        radix = math.prod(orders[i + 1 :])
        digits.append(rem // radix)
        rem %= radix
    logs = _component_logs(q, comps)
    values = np.zeros(q, dtype=np.complex128)
    for n, vec in logs.items():
        phase = Fraction(0)
        for c, t, d in zip(digits, vec, orders):
            phase += Fraction(c * t, d)
        phase %= 1
        values[n % q] = np.exp(2j * np.pi * float(phase))
    return DirichletCharacter(modulus=q, values=values, index=index)


def character_group(q: int) -> list[DirichletCharacter]:
    return [character_from_index(q, k) for k in range(euler_totient(q))]


def conductor(chi: DirichletCharacter) -> int:
    """Smallest divisor d of q such that chi factors through (Z/d)*."""
    q = chi.modulus
    divisors = sorted(d for d in range(1, q + 1) if q % d == 0)
    for d in divisors:
        ok = True
        for n in range(1, q + 1):
            if math.gcd(n, q) == 1 and n % d == 1 % d:
                if abs(chi.values[n % q] - 1.0) > 1e-9:
                    ok = False
                    break
        if ok:
            return d
    return q


def primitive_values(chi: DirichletCharacter) -> tuple[int, np.ndarray]:
    """Conductor d and the table of the primitive character inducing chi."""
    q = chi.modulus
    d = conductor(chi)
    table = np.zeros(d, dtype=np.complex128)
    for a in range(d):
        if d > 1 and math.gcd(a, d) > 1:
            continue
        n = a
        while n == 0 or math.gcd(n, q) > 1:
            n += d
        table[a] = chi.values[n % q]
    return d, table


def are_equivalent(chi1: DirichletCharacter, chi2: DirichletCharacter) -> bool:
    """True when both characters are induced by the same primitive character."""
    d1, t1 = primitive_values(chi1)
    d2, t2 = primitive_values(chi2)
    return d1 == d2 and bool(np.allclose(t1, t2, atol=1e-9))


@dataclass(frozen=True)
class EulerProductSpec:
    """Local data of a degree-m polynomial Euler product.

    ``local_roots[p]`` lists the m inverse roots of the local factor at p;
    every root must satisfy |root| <= 1.  ``sigma_phi`` is the declared
    mean-square abscissa (not computable from finitely many coefficients,
    so it is carried as data; 1/2 for Dirichlet characters).
    """

    degree: int
    local_roots: Mapping[int, tuple[complex, ...]]
    pole_order: int = 0
    sigma_phi: float = 0.5
    label: str = ""

    def __post_init__(self):
        if self.degree < 1:
            raise ValueError(f"degree must be >= 1, got {self.degree}")
        if self.pole_order < 0:
            raise ValueError("pole_order must be >= 0")
        if not 0.5 <= self.sigma_phi < 1.0:
            raise ValueError(f"sigma_phi must lie in [1/2, 1), got {self.sigma_phi}")
        frozen = {}
        for p, roots in self.local_roots.items():
            roots = tuple(complex(r) for r in roots)
            if len(roots) != self.degree:
                raise ValueError(f"prime {p}: expected {self.degree} roots, got {len(roots)}")
            for r in roots:
                if abs(r) > 1.0 + ROOT_BOUND_TOL:
                    raise ValueError(f"prime {p}: local root {r} exceeds modulus 1")
            frozen[int(p)] = roots
        object.__setattr__(self, "local_roots", frozen)

    def prime_bound(self) -> int:
        return max(self.local_roots, default=0)

    def roots_at(self, p: int) -> tuple[complex, ...]:
        try:
            return self.local_roots[p]
        except KeyError:
            raise ValueError(
                f"no local root data for prime {p} (spec '{self.label}' stops at "
                f"{self.prime_bound()})"
            ) from None

    def root_matrix(self, primes: Sequence[int]) -> np.ndarray:
        """(len(primes), degree) array of local roots, erroring on gaps."""
        out = np.empty((len(primes), self.degree), dtype=np.complex128)
        for i, p in enumerate(primes):
            out[i] = self.roots_at(int(p))
        return out

    @classmethod
    def from_character(cls, chi: DirichletCharacter, prime_bound: int, label: str = "") -> "EulerProductSpec":
        ps = primes_up_to(prime_bound)
        roots = {int(p): (complex(chi.values[p % chi.modulus]),) for p in ps}
        if not label:
            label = f"chi{chi.modulus}_{chi.index}" if chi.index is not None else f"chi{chi.modulus}"
        return cls(degree=1, local_roots=roots, pole_order=1 if chi.is_principal else 0,
                   sigma_phi=0.5, label=label)

    @classmethod
    def zeta(cls, prime_bound: int) -> "EulerProductSpec":
        ps = primes_up_to(prime_bound)
        return cls(degree=1, local_roots={int(p): (1.0 + 0j,) for p in ps},
                   pole_order=1, sigma_phi=0.5, label="zeta")

    @classmethod
    def constant_roots(cls, roots: Sequence[complex], prime_bound: int,
                       sigma_phi: float = 0.5, label: str = "") -> "EulerProductSpec":
        ps = primes_up_to(prime_bound)
        tup = tuple(complex(r) for r in roots)
        return cls(degree=len(tup), local_roots={int(p): tup for p in ps},
                   sigma_phi=sigma_phi, label=label)


def local_factor_coefficients(roots: Sequence[complex], kmax: int) -> np.ndarray:
    """Power-series coefficients h[0..kmax] of 1 / prod_j (1 - r_j x).

    h[k] is the coefficient of x^k, i.e. the coefficient of p^{-ks} in the
    expanded local factor.  Computed by the linear recurrence against the
    polynomial prod_j (1 - r_j x).
    """
    q = np.zeros(len(roots) + 1, dtype=np.complex128)
    q[0] = 1.0
    for r in roots:
        q[1:] -= r * q[:-1].copy()
    h = np.zeros(kmax + 1, dtype=np.complex128)
    h[0] = 1.0
    m = len(roots)
    for k in range(1, kmax + 1):
        top = min(k, m)
        h[k] = -np.dot(q[1 : top + 1], h[k - top : k][::-1])
    return h


@dataclass(frozen=True)
class CoefficientTable:
    """Dense Dirichlet coefficients a(1..limit) of an Euler-product spec."""

    spec: EulerProductSpec
    limit: int
    a: np.ndarray  # complex, length limit+1, a[0] = 0

    def __post_init__(self):
        arr = np.asarray(self.a, dtype=np.complex128)
        arr.setflags(write=False)
        object.__setattr__(self, "a", arr)

    def __getitem__(self, n: int) -> complex:
        return complex(self.a[n])


def coefficients_from_euler(spec: EulerProductSpec, limit: int) -> CoefficientTable:
    """Expand the Euler product into Dirichlet coefficients up to ``limit``.

    Each prime block contributes a(p^k) = h_k from the local factor
    expansion; the table is then filled multiplicatively, each integer
    being written exactly once while its largest prime factor is merged.
    """
    if limit < 1:
        raise ValueError("limit must be >= 1")
    ps = primes_up_to(limit)
    avail = spec.prime_bound()
    if ps.size and int(ps[-1]) > avail:
        missing = int(ps[np.searchsorted(ps, avail, side="right")])
        raise ValueError(
            f"no local root data for prime {missing} (spec '{spec.label}' stops at {avail})"
        )
    a = np.zeros(limit + 1, dtype=np.complex128)
    a[1] = 1.0
    sqrt_lim = int(limit**0.5)
    small = ps[ps <= sqrt_lim]
    large = ps[ps > sqrt_lim]

    for p in small:
        p = int(p)
        kmax = int(math.log(limit) / math.log(p)) + 1
        while p**kmax > limit:
            kmax -= 1
        h = local_factor_coefficients(spec.roots_at(p), kmax)
        pk = p
        for k in range(1, kmax + 1):
            m = np.arange(1, limit // pk + 1, dtype=np.int64)
            m = m[m % p != 0]
            a[m * pk] = a[m] * h[k]
            pk *= p

    if large.size:
        # for p > sqrt(limit) only k = 1 occurs and every m <= limit/p is coprime to p
        h1 = np.array([sum(spec.roots_at(int(p))) for p in large], dtype=np.complex128)
        max_m = limit // int(large[0])
        for m in range(1, max_m + 1):
            sel = large <= limit // m
            if not sel.any():
                break
            a[m * large[sel]] = a[m] * h1[sel]

    return CoefficientTable(spec=spec, limit=limit, a=a)


def prime_mean_square(coeffs: CoefficientTable, x: float) -> float:
    """Average of |a(p)|^2 over primes p <= x."""
    if x < 2:
        raise ValueError(f"x must be >= 2, got {x}")
    if x > coeffs.limit:
        raise ValueError(f"x={x} exceeds the table limit {coeffs.limit}")
    ps = primes_up_to(int(x))
    vals = np.abs(coeffs.a[ps]) ** 2
    return float(vals.sum() / ps.size)


def divisor_table(order: int, limit: int) -> np.ndarray:
    """d_m(n) for n <= limit: the m-fold divisor function (d_1 = 1)."""
    ones = EulerProductSpec.constant_roots([1.0] * order, prime_bound=limit, label=f"d{order}")
    return coefficients_from_euler(ones, limit).a.real
