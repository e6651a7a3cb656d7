"""Prime sieves, factorization, and elementary arithmetic functions.

Everything here is setup machinery: the hot loops downstream never factor
integers on the fly, they read the smallest-prime-factor table built once.
"""

import math
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import CapacityError, DomainError, NoGeneratorError

#: Hard cap on factor-table size, in entries.  The table is uint32, so
#: 1e8 entries cost 400 MB; the default budget allows 2e8 (800 MB).
DEFAULT_TABLE_BUDGET = 2 * 10**8

# Euler-Mascheroni constant, used by the totient sanity bound.
_EULER_GAMMA = 0.5772156649015329

_MR_WITNESSES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


@dataclass(frozen=True)
class FactorTable:
    """Smallest-prime-factor table enabling O(log n) factorization.

    Attributes:
        limit: Largest n covered.
        spf: uint32 array with spf[n] = smallest prime factor of n for
            2 <= n <= limit; spf[0] = 0 and spf[1] = 1 are sentinels.
    """

    limit: int
    spf: np.ndarray

    def primes(self) -> np.ndarray:
        """All primes <= limit, from the table."""
        idx = np.arange(self.limit + 1, dtype=np.uint32)
        fixed = np.flatnonzero(self.spf == idx)
        return fixed[fixed >= 2].astype(np.int64)


@dataclass(frozen=True)
class Factorization:
    """Prime factorization as (prime, exponent) pairs, primes ascending."""

    pairs: tuple

    def n(self) -> int:
        out = 1
        for p, e in self.pairs:
            out *= p**e
        return out

    def big_omega(self) -> int:
        return sum(e for _, e in self.pairs)

    def small_omega(self) -> int:
        return len(self.pairs)

    def phi(self) -> int:
        out = 1
        for p, e in self.pairs:
            out *= p ** (e - 1) * (p - 1)
        return out


def build_factor_table(n, budget=DEFAULT_TABLE_BUDGET, segment=1 << 20):
    """Sieve smallest prime factors for all integers up to n.

    The build is segmented in blocks of ``segment`` above sqrt(n), keeping
    the working set cache-sized; only the finished uint32 table (4 bytes
    per entry) stays resident.
    """
    if n < 2:
        raise DomainError(f"factor table needs n >= 2, got {n}")
    if n > budget:
        raise CapacityError(
            f"factor table of {n} entries exceeds budget {budget}"
        )
    return FactorTable(limit=int(n), spf=_kernels.spf_sieve(int(n), segment))


def factorize(n, table):
    """Factor n by repeated division through the spf table."""
    if not 1 <= n <= table.limit:
        raise DomainError(f"n={n} outside factor table range [1, {table.limit}]")
    pairs = []
    spf = table.spf
    m = int(n)
    while m > 1:
        p = int(spf[m])
        e = 0
        while m % p == 0:
            m //= p
            e += 1
        pairs.append((p, e))
    return Factorization(pairs=tuple(pairs))


def factorize_trial(n):
    """Trial-division factorization, table-free (setup-scale inputs only)."""
    if n < 1:
        raise DomainError(f"cannot factor n={n}")
    pairs = []
    m = int(n)
    p = 2
    while p * p <= m:
        if m % p == 0:
            e = 0
            while m % p == 0:
                m //= p
                e += 1
            pairs.append((p, e))
        p += 1 if p == 2 else 2
    if m > 1:
        pairs.append((m, 1))
    return Factorization(pairs=tuple(pairs))


def big_omega(n, table=None):
    """Number of prime factors of n counted with multiplicity; 0 for n=1."""
    if n < 1:
        raise DomainError(f"big_omega needs n >= 1, got {n}")
    if table is not None and n <= table.limit:
        count = 0
        m = int(n)
        spf = table.spf
        while m > 1:
            m //= int(spf[m])
            count += 1
        return count
    return factorize_trial(n).big_omega()


def small_omega(q, table=None):
    """Number of distinct prime factors of q; 0 for q=1."""
    if q < 1:
        raise DomainError(f"small_omega needs q >= 1, got {q}")
    fac = factorize(q, table) if table is not None and q <= table.limit else factorize_trial(q)
    return fac.small_omega()


def euler_phi(q, table=None):
    """Euler totient of q."""
    if q < 1:
        raise DomainError(f"euler_phi needs q >= 1, got {q}")
    fac = factorize(q, table) if table is not None and q <= table.limit else factorize_trial(q)
    return fac.phi()


@dataclass(frozen=True)
class Modulus:
    """A modulus with its factorization and basic invariants precomputed."""

    q: int
    factorization: Factorization
    phi: int
    omega: int

    @classmethod
    def from_int(cls, q, table=None):
        if q < 2:
            raise DomainError(f"modulus must be >= 2, got {q}")
        fac = factorize(q, table) if table is not None and q <= table.limit else factorize_trial(q)
        phi = fac.phi()
        if q >= 16:
            # Rosser-Schoenfeld floor; a failed check means a broken sieve.
            llq = math.log(math.log(q))
            floor = q / (math.exp(_EULER_GAMMA) * llq + 3.0 / llq)
            assert phi > floor, f"totient sanity bound failed for q={q}"
        return cls(q=q, factorization=fac, phi=phi, omega=fac.small_omega())

    def is_prime(self) -> bool:
        return len(self.factorization.pairs) == 1 and self.factorization.pairs[0][1] == 1


def is_prime(n):
    """Deterministic Miller-Rabin, valid for all n < 3.3e24."""
    if n < 2:
        return False
    for p in _MR_WITNESSES:
        if n % p == 0:
            return n == p
    d = n - 1
    s = 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MR_WITNESSES:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def next_prime(n):
    """Smallest prime >= n."""
    m = max(2, int(n))
    while not is_prime(m):
        m += 1
    return m


def primes_up_to(y):
    """All primes <= y as an int64 array (empty for y < 2)."""
    n = int(math.floor(y)) if y >= 2 else 1
    if n < 2:
        return np.empty(0, dtype=np.int64)
    sieve = np.ones(n + 1, dtype=bool)
    sieve[:2] = False
    for p in range(2, math.isqrt(n) + 1):
        if sieve[p]:
            sieve[p * p :: p] = False
    return np.flatnonzero(sieve).astype(np.int64)


def primitive_root(pk):
    """Smallest generator of the unit group mod pk.

    Exists only for pk an odd prime power, 2, or 4.
    """
    if pk < 2:
        raise DomainError(f"modulus must be >= 2, got {pk}")
    if pk == 2:
        return 1
    if pk == 4:
        return 3
    fac = factorize_trial(pk)
    if len(fac.pairs) != 1 or fac.pairs[0][0] == 2:
        raise NoGeneratorError(f"unit group mod {pk} is not cyclic")
    phi = fac.phi()
    phi_primes = [p for p, _ in factorize_trial(phi).pairs]
    for g in range(2, pk):
        if g % fac.pairs[0][0] == 0:
            continue
        if all(pow(g, phi // ell, pk) != 1 for ell in phi_primes):
            return g
    raise NoGeneratorError(f"no generator found mod {pk}")  # unreachable


def iterated_log(j, t):
    """Apply the natural logarithm j times to t."""
    if j < 0:
        raise DomainError(f"iteration count must be >= 0, got {j}")
    value = float(t)
    for step in range(j):
        if value <= 0.0:
            raise DomainError(
                f"log undefined after {step} of {j} iterations (value {value})"
            )
        value = math.log(value)
    return value
