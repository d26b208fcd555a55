import math

import numpy as np
import pytest

from zetalab.arith import (CoefficientTable, EulerProductSpec, are_equivalent,
                           character_from_index, character_group, coefficients_from_euler,
                           conductor, divisor_table, euler_totient,
                           local_factor_coefficients, prime_mean_square)
from zetalab.primes import primes_up_to

SEED = 20250810


def sieve_pi(x):
    # independent prime-count oracle
    flags = [True] * (x + 1)
    flags[0] = flags[1] = False
    for i in range(2, int(x**0.5) + 1):
        if flags[i]:
            for j in range(i * i, x + 1, i):
                flags[j] = False
    return sum(flags)


# ---------------------------------------------------------------------------
# characters

def test_mod1_character_is_all_ones():
    chi = character_from_index(1, 0)
    assert chi(0) == 1 and chi(7) == 1 and chi(123456) == 1


def test_mod4_nontrivial_character_forced():
    chi = character_from_index(4, 1)
    assert chi(1) == 1
    assert chi(3) == pytest.approx(-1)
    assert chi(0) == 0 and chi(2) == 0


def test_mod5_nonprincipal_sums_vanish():
    # oracle: brute-force sum over the full table
    for k in range(1, 4):
        chi = character_from_index(5, k)
        assert abs(chi.values.sum()) < 1e-12
    principal = character_from_index(5, 0)
    assert principal.values.sum() == pytest.approx(4)


def test_index_zero_is_principal():
    for q in (1, 4, 5, 8, 12, 36):
        assert character_from_index(q, 0).is_principal


def test_enumeration_deterministic():
    a = character_from_index(36, 7)
    b = character_from_index(36, 7)
    assert np.array_equal(a.values, b.values)


def test_bad_modulus_and_index_rejected():
    with pytest.raises(ValueError):
        character_from_index(0, 0)
    with pytest.raises(ValueError):
        character_from_index(5, 4)
    with pytest.raises(ValueError):
        character_from_index(5, -1)


@pytest.mark.parametrize("q", [5, 8, 12])
def test_orthogonality_all_pairs(q):
    group = character_group(q)
    phi = euler_totient(q)
    for i, chi in enumerate(group):
        for j, psi in enumerate(group):
            inner = np.sum(chi.values * np.conj(psi.values))
            expected = phi if i == j else 0.0
            assert abs(inner - expected) < 1e-9


@pytest.mark.parametrize("q", [5, 8, 12, 36])
def test_full_table_multiplicativity(q):
    group = character_group(q)
    for chi in group:
        for m in range(q):
            for n in range(q):
                assert abs(chi(m * n) - chi(m) * chi(n)) < 1e-12


def test_values_are_carmichael_roots_of_unity():
    q = 36
    # lcm of the unit-group component orders
    lam = 6
    for chi in character_group(q):
        for n in range(q):
            if math.gcd(n, q) == 1:
                assert abs(chi(n) ** lam - 1.0) < 1e-9


def test_equivalence_by_primitivity_reduction():
    chi4 = character_from_index(4, 1)
    # the induced character mod 8 agrees with chi4 on odd residues
    induced = [k for k in range(4)
               if np.allclose([character_from_index(8, k)(n) for n in (1, 3, 5, 7)],
                              [chi4(n) for n in (1, 3, 5, 7)])]
    assert len(induced) == 1
    chi8 = character_from_index(8, induced[0])
    assert conductor(chi8) == 4
    assert are_equivalent(chi4, chi8)
    others = [k for k in range(4) if k != induced[0]]
    for k in others:
        assert not are_equivalent(chi4, character_from_index(8, k))
    # principal characters of any modulus reduce to the trivial character
    assert are_equivalent(character_from_index(4, 0), character_from_index(8, 0))
    assert conductor(character_from_index(8, 0)) == 1


# ---------------------------------------------------------------------------
# Euler products and coefficients

def test_zeta_coefficients_all_one(zeta_table):
    assert np.allclose(zeta_table.a[1:], 1.0)


def brute_force_euler_coefficients(spec, limit):
    # oracle: dict-convolution of the local power series, one prime at a time
    coeffs = {1: 1.0 + 0j}
    for p in primes_up_to(limit):
        kmax = 0
        while p ** (kmax + 1) <= limit:
            kmax += 1
        h = local_factor_coefficients(spec.roots_at(int(p)), kmax)
        new = {}
        for n, v in coeffs.items():
            for k in range(kmax + 1):
                m = n * p**k
                if m <= limit:
                    new[m] = new.get(m, 0j) + v * h[k]
        coeffs = new
    out = np.zeros(limit + 1, dtype=complex)
    for n, v in coeffs.items():
        out[n] = v
    return out


def test_chi4_coefficients_match_product_expansion(chi4_table):
    expansion = brute_force_euler_coefficients(chi4_table.spec, 50)
    assert np.allclose(chi4_table.a[:51], expansion, atol=1e-12)
    # and the table is the 4-periodic +1/0/-1 pattern
    chi = character_from_index(4, 1)
    expected = [chi(n) for n in range(1, 51)]
    assert np.allclose(chi4_table.a[1:51], expected, atol=1e-12)


def test_double_unit_roots_give_divisor_function():
    spec = EulerProductSpec.constant_roots([1.0, 1.0], prime_bound=200)
    table = coefficients_from_euler(spec, 200)
    # oracle: d = 1 * 1 by direct convolution
    d = np.zeros(201)
    for i in range(1, 201):
        for j in range(i, 201, i):
            d[j] += 1.0
    assert np.allclose(table.a[1:], d[1:], atol=1e-12)


def test_multiplicativity_fuzz():
    rng = np.random.default_rng(SEED)
    roots = np.exp(2j * np.pi * rng.random(2)) * rng.uniform(0.3, 1.0, 2)
    spec = EulerProductSpec.constant_roots(roots, prime_bound=3000)
    table = coefficients_from_euler(spec, 3000)
    checked = 0
    while checked < 500:
        m = int(rng.integers(2, 60))
        n = int(rng.integers(2, 3000 // m))
        if math.gcd(m, n) != 1:
            continue
        lhs = table.a[m * n]
        rhs = table.a[m] * table.a[n]
        assert abs(lhs - rhs) <= 1e-12 * max(1.0, abs(rhs))
        checked += 1


def test_divisor_bound():
    rng = np.random.default_rng(SEED + 1)
    roots = np.exp(2j * np.pi * rng.random(3))  # unit-modulus roots, degree 3
    spec = EulerProductSpec.constant_roots(roots, prime_bound=2000)
    table = coefficients_from_euler(spec, 2000)
    bound = divisor_table(3, 2000)
    assert np.all(np.abs(table.a[1:]) <= bound[1:] + 1e-9)


def test_root_bound_gate():
    with pytest.raises(ValueError, match="exceeds modulus 1"):
        EulerProductSpec(degree=1, local_roots={2: (1.0 + 1e-6 + 0j,)})
    # exactly at the tolerance is allowed
    EulerProductSpec(degree=1, local_roots={2: (1.0 + 0j,)})


def test_missing_prime_data_named():
    spec = EulerProductSpec(degree=1, local_roots={2: (1.0,), 3: (1.0,), 5: (1.0,)})
    with pytest.raises(ValueError, match="prime 7"):
        coefficients_from_euler(spec, 10)


def test_prime_mean_square_examples(zeta_table, chi4_table):
    assert prime_mean_square(zeta_table, 100) == pytest.approx(1.0)
    pi100 = sieve_pi(100)
    assert pi100 == 25
    assert prime_mean_square(chi4_table, 100) == pytest.approx((pi100 - 1) / pi100)
    dspec = EulerProductSpec.constant_roots([1.0, 1.0], prime_bound=200)
    dtable = coefficients_from_euler(dspec, 200)
    assert prime_mean_square(dtable, 100) == pytest.approx(4.0)
    with pytest.raises(ValueError):
        prime_mean_square(zeta_table, 1.5)
    with pytest.raises(ValueError):
        prime_mean_square(zeta_table, 10**9)


def test_character_spec_degree_one(chi4_table):
    spec = chi4_table.spec
    assert spec.degree == 1
    chi = character_from_index(4, 1)
    for p in (2, 3, 5, 7):
        assert spec.roots_at(p)[0] == pytest.approx(chi(p))


def test_sigma_phi_range_enforced():
    with pytest.raises(ValueError):
        EulerProductSpec(degree=1, local_roots={2: (1.0,)}, sigma_phi=0.4)
    with pytest.raises(ValueError):
        EulerProductSpec(degree=1, local_roots={2: (1.0,)}, sigma_phi=1.0)


def test_coefficient_table_is_immutable(zeta_table):
    with pytest.raises(ValueError):
        zeta_table.a[5] = 2.0
