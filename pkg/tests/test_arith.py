import math
import random

import numpy as np
import pytest

from resonator_lab.arith import (
    Modulus,
    big_omega,
    build_factor_table,
    euler_phi,
    factorize,
    factorize_trial,
    is_prime,
    iterated_log,
    next_prime,
    primes_up_to,
    primitive_root,
    small_omega,
)
from resonator_lab.errors import CapacityError, DomainError, NoGeneratorError


@pytest.fixture(scope="module")
def table():
    return build_factor_table(10**5)


def smallest_factor_by_trial(n):
    p = 2
    while p * p <= n:
        if n % p == 0:
            return p
        p += 1
    return n


def test_spf_small_values():
    t = build_factor_table(10)
    assert t.spf.tolist() == [0, 1, 2, 3, 2, 5, 2, 7, 2, 3, 2]


def test_spf_prime_is_its_own_factor(table):
    # 9973 is prime: trial division up to sqrt finds no divisor.
    assert smallest_factor_by_trial(9973) == 9973
    assert table.spf[9973] == 9973


def test_spf_even_product(table):
    assert table.spf[2 * 3 * 5 * 7] == 2


def test_spf_invariants(table):
    spf = table.spf
    for n in random.Random(7).sample(range(2, 10**5), 500):
        p = int(spf[n])
        assert n % p == 0
        if p != n:
            assert p * p <= n or is_prime(n // p)
            assert p <= math.isqrt(n) or is_prime(n)


def test_capacity_error():
    with pytest.raises(CapacityError):
        build_factor_table(10**6, budget=10**5)
    with pytest.raises(DomainError):
        build_factor_table(1)


def test_factorize_examples(table):
    assert factorize(12, table).pairs == ((2, 2), (3, 1))
    assert factorize(1, table).pairs == ()
    assert factorize(9973, table).pairs == ((9973, 1),)
    with pytest.raises(DomainError):
        factorize(10**5 + 1, table)
    with pytest.raises(DomainError):
        factorize(0, table)


def test_factorize_reconstructs(table):
    for n in range(1, 10**5 + 1):
        fac = factorize(n, table)
        assert fac.n() == n
    for n in range(1, 10**4, 13):
        fac = factorize(n, table)
        primes = [p for p, _ in fac.pairs]
        assert primes == sorted(primes)
        assert all(e >= 1 for _, e in fac.pairs)


def test_big_omega_examples(table):
    assert big_omega(8) == 3
    assert big_omega(1) == 0
    assert big_omega(12) == 3
    assert big_omega(12, table) == 3


def test_big_omega_additive(table):
    rng = random.Random(11)
    for _ in range(200):
        m = rng.randint(1, 316)
        n = rng.randint(1, 316)
        assert big_omega(m * n, table) == big_omega(m, table) + big_omega(n, table)


def test_phi_examples():
    assert euler_phi(5) == 4
    assert euler_phi(12) == 4
    assert small_omega(30030) == 6
    assert small_omega(1) == 0


def test_phi_multiplicative(table):
    rng = random.Random(3)
    checked = 0
    while checked < 100:
        a = rng.randint(2, 10**4)
        b = rng.randint(2, 10**4)
        if math.gcd(a, b) != 1:
            continue
        assert euler_phi(a * b, table=None) == euler_phi(a) * euler_phi(b)
        checked += 1


def test_modulus():
    m = Modulus.from_int(30030)
    assert m.phi == 5760
    assert m.omega == 6
    assert not m.is_prime()
    assert Modulus.from_int(99991).is_prime()
    with pytest.raises(DomainError):
        Modulus.from_int(1)


def test_primitive_root_examples():
    assert primitive_root(5) == 2
    assert primitive_root(7) == 3
    assert primitive_root(4) == 3
    assert primitive_root(2) == 1
    for bad in (8, 12, 15, 2 * 3 * 5):
        with pytest.raises(NoGeneratorError):
            primitive_root(bad)


def test_primitive_root_order():
    for p in (5, 7, 11, 101, 997, 9973):
        g = primitive_root(p)
        assert pow(g, p - 1, p) == 1
        for ell, _ in factorize_trial(p - 1).pairs:
            assert pow(g, (p - 1) // ell, p) != 1


def test_primitive_root_prime_power():
    g = primitive_root(3**4)
    order = euler_phi(3**4)
    seen = {pow(g, k, 81) for k in range(order)}
    assert len(seen) == order


def test_iterated_log():
    assert iterated_log(1, math.e) == pytest.approx(1.0)
    assert iterated_log(2, math.exp(math.e)) == pytest.approx(1.0)
    assert iterated_log(3, 10**6) == pytest.approx(
        math.log(math.log(math.log(10**6)))
    )
    assert iterated_log(3, 10**6) == pytest.approx(0.9654, abs=1e-4)
    assert iterated_log(0, 5.0) == 5.0
    with pytest.raises(DomainError):
        iterated_log(2, 1.0)
    with pytest.raises(DomainError):
        iterated_log(1, 0.0)


def test_primes_up_to():
    assert primes_up_to(10).tolist() == [2, 3, 5, 7]
    assert primes_up_to(1.9).size == 0
    assert primes_up_to(2).tolist() == [2]
    assert len(primes_up_to(10**4)) == 1229


def test_is_prime_and_next_prime():
    small = {p for p in range(2, 200) if all(p % d for d in range(2, p))}
    assert {n for n in range(2, 200) if is_prime(n)} == small
    assert is_prime(2**31 - 1)
    assert not is_prime(2**32 + 1)
    assert next_prime(1000) == 1009
    assert next_prime(1009) == 1009


def test_table_primes(table):
    assert np.array_equal(table.primes()[:5], [2, 3, 5, 7, 11])
    assert len(table.primes()) == 9592
