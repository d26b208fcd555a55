"""Prime sieves and factorization tables shared by the other modules."""

from __future__ import annotations

from functools import lru_cache

import numpy as np
import scipy.sparse as sp


def primes_up_to(n: int) -> np.ndarray:
    """Return all primes <= n as an int64 array (Eratosthenes)."""
    n = int(n)
    if n < 2:
        return np.array([], dtype=np.int64)
    is_prime = np.ones(n + 1, dtype=bool)
    is_prime[:2] = False
    for p in range(2, int(n**0.5) + 1):
        if is_prime[p]:
            is_prime[p * p :: p] = False
    return np.nonzero(is_prime)[0].astype(np.int64)


def prime_count(x: float) -> int:
    """pi(x), the number of primes <= x."""
    if x < 2:
        return 0
    return int(primes_up_to(int(x)).size)


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n < 4:
        return True
    if n % 2 == 0:
        return False
    d = 3
    while d * d <= n:
        if n % d == 0:
            return False
        d += 2
    return True


def factorize(n: int) -> list[tuple[int, int]]:
    """Prime factorization of n >= 1 as [(p, exponent)] with p ascending."""
    if n < 1:
        raise ValueError(f"cannot factorize n={n}; need n >= 1")
    out = []
    d = 2
    while d * d <= n:
        if n % d == 0:
            e = 0
            while n % d == 0:
                n //= d
                e += 1
            out.append((d, e))
        d += 1 if d == 2 else 2
    if n > 1:
        out.append((n, 1))
    return out


@lru_cache(maxsize=8)
def exponent_matrix(limit: int) -> tuple[np.ndarray, sp.csr_matrix]:
    """Primes <= limit plus the sparse matrix E with E[n, j] = v_{p_j}(n).

    Row n of E holds the exponents of the prime factorization of n
    (rows 0 and 1 are empty).  Used to evaluate completely multiplicative
    functions on 1..limit as a single sparse product on prime data.
    """
    ps = primes_up_to(limit)
    rows, cols = [], []
    for j, p in enumerate(ps):
        pk = int(p)
        while pk <= limit:
            multiples = np.arange(pk, limit + 1, pk, dtype=np.int64)
            rows.append(multiples)
            cols.append(np.full(multiples.size, j, dtype=np.int64))
            pk *= int(p)
    if rows:
        r = np.concatenate(rows)
        c = np.concatenate(cols)
        data = np.ones(r.size, dtype=np.float64)
    else:
        r = c = np.array([], dtype=np.int64)
        data = np.array([], dtype=np.float64)
    mat = sp.coo_matrix((data, (r, c)), shape=(limit + 1, ps.size)).tocsr()
    return ps, mat
