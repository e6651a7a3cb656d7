"""Pure-Python/numpy kernel implementations.

Reference backend: always importable, and the ground truth the compiled
backend is benchmarked and tested against.  Accumulation orders are kept
identical to ``_ckernels`` so both backends produce bit-equal floats.
"""

import math

import numpy as np

BACKEND = "python"


def spf_sieve(n, segment=1 << 19):
    """Smallest-prime-factor table for 0..n as uint32.

    spf[0] = 0 and spf[1] = 1 are sentinels; spf[p] = p exactly for primes.
    Construction is segmented in blocks of ``segment`` so the transient
    working set stays small; the table itself is 4*(n+1) bytes.
    """
    spf = np.zeros(n + 1, dtype=np.uint32)
    if n >= 1:
        spf[1] = 1
    if n < 2:
        return spf

    root = math.isqrt(n)

    # Base sieve up to sqrt(n), plain and unsegmented.
    base = np.arange(root + 1, dtype=np.uint32)
    for p in range(2, math.isqrt(root) + 1):
        if base[p] == p:
            sl = base[p * p :: p]
            sl[sl == np.arange(p * p, root + 1, p, dtype=np.uint32)] = p
    spf[2 : root + 1] = base[2:]
    base_primes = [p for p in range(2, root + 1) if spf[p] == p]

    lo = root + 1
    while lo <= n:
        hi = min(lo + segment, n + 1)
        block = np.zeros(hi - lo, dtype=np.uint32)
        for p in base_primes:
            start = max(p * p, ((lo + p - 1) // p) * p)
            if start >= hi:
                continue
            sl = block[start - lo :: p]
            sl[sl == 0] = p
        unmarked = block == 0
        block[unmarked] = np.arange(lo, hi, dtype=np.uint32)[unmarked]
        spf[lo:hi] = block
        lo = hi
    return spf


def dlog_table(modulus, generator, order):
    """Discrete logs base ``generator`` over residues mod ``modulus``.

    Returns an int64 array of size ``modulus`` with table[g^k % modulus] = k
    for 0 <= k < order and -1 elsewhere.
    """
    table = np.full(modulus, -1, dtype=np.int64)
    v = 1
    for k in range(order):
        table[v] = k
        v = (v * generator) % modulus
    return table


def weight_table(limit, prime_weight):
    """Completely multiplicative extension of per-prime weights up to limit.

    ``prime_weight[p]`` must hold the weight of prime p (0.0 for primes with
    no weight); entries at composite indices are ignored.  w[1] = 1.
    """
    spf = spf_sieve(limit)
    w = np.zeros(limit + 1, dtype=np.float64)
    if limit >= 1:
        w[1] = 1.0
    for m in range(2, limit + 1):
        p = int(spf[m])
        w[m] = w[m // p] * prime_weight[p]
    return w


def smooth_enumerate(x, primes):
    """All integers <= x whose prime factors lie in ``primes``, ascending."""
    out = [1]
    np_ = len(primes)

    def rec(value, i0):
        for i in range(i0, np_):
            p = int(primes[i])
            if value > x // p:
                break
            out.append(value * p)
            rec(value * p, i)

    if x >= 1:
        rec(1, 0)
        out.sort()
        return np.array(out, dtype=np.int64)
    return np.empty(0, dtype=np.int64)


def smooth_reduce(x, primes, weights):
    """One DFS over the smooth numbers <= x built from ``primes``.

    Returns (count, weight_sum, omega_sum) where weight_sum accumulates the
    product of per-prime ``weights`` along each number's factorization and
    omega_sum the number of prime factors with multiplicity.  Visit order is
    fixed (ascending prime index, depth first) for bit-stable float sums.
    """
    np_ = len(primes)
    state = [0, 0.0, 0]

    def rec(value, i0, w, om):
        state[0] += 1
        state[1] += w
        state[2] += om
        for i in range(i0, np_):
            p = int(primes[i])
            if value > x // p:
                break
            rec(value * p, i, w * weights[i], om + 1)

    if x >= 1:
        rec(1, 0, 1.0, 0)
    return state[0], state[1], state[2]
