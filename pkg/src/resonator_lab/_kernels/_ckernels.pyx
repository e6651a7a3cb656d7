# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernel implementations (see pykernels for the reference)."""

from libc.math cimport sqrt

import numpy as np

BACKEND = "cython"


def spf_sieve(long long n, long long segment=1 << 19):
    """Smallest-prime-factor table for 0..n as uint32, segmented build.

    Even entries are filled directly; odd primes mark only their odd
    multiples, halving the write traffic.
    """
    spf_arr = np.zeros(n + 1, dtype=np.uint32)
    cdef unsigned int[::1] spf = spf_arr
    cdef long long root, p, m, k, lo, hi, start, step
    if n >= 1:
        spf[1] = 1
    if n < 2:
        return spf_arr

    for m in range(2, n + 1, 2):
        spf[m] = 2

    root = <long long> sqrt(<double> n)
    while (root + 1) * (root + 1) <= n:
        root += 1
    while root * root > n:
        root -= 1

    for p in range(3, root + 1, 2):
        if spf[p] == 0:
            spf[p] = <unsigned int> p
            m = p * p
            step = 2 * p
            while m <= root:
                if spf[m] == 0:
                    spf[m] = <unsigned int> p
                m += step
    base_primes_arr = np.array(
        [p for p in range(3, root + 1, 2) if spf[p] == p], dtype=np.int64
    )
    cdef long long[::1] base_primes = base_primes_arr
    cdef Py_ssize_t nb = base_primes.shape[0], j

    lo = root + 1
    while lo <= n:
        hi = lo + segment
        if hi > n + 1:
            hi = n + 1
        for j in range(nb):
            p = base_primes[j]
            if p * p >= hi:
                break
            start = p * p
            if start < lo:
                # smallest odd multiple of p in [lo, hi)
                k = (lo + p - 1) // p
                if k % 2 == 0:
                    k += 1
                start = k * p
            step = 2 * p
            for m in range(start, hi, step):
                if spf[m] == 0:
                    spf[m] = <unsigned int> p
        for m in range(lo | 1, hi, 2):
            if spf[m] == 0:
                spf[m] = <unsigned int> m
        lo = hi
    return spf_arr


def dlog_table(long long modulus, long long generator, long long order):
    """table[g^k % modulus] = k for 0 <= k < order, -1 at non-units."""
    table_arr = np.full(modulus, -1, dtype=np.int64)
    cdef long long[::1] table = table_arr
    cdef long long v = 1, k
    for k in range(order):
        table[v] = k
        v = (v * generator) % modulus
    return table_arr


def weight_table(long long limit, double[::1] prime_weight):
    """Completely multiplicative extension of per-prime weights up to limit."""
    spf_arr = spf_sieve(limit)
    cdef unsigned int[::1] spf = spf_arr
    w_arr = np.zeros(limit + 1, dtype=np.float64)
    cdef double[::1] w = w_arr
    cdef long long m, p
    if limit >= 1:
        w[1] = 1.0
    for m in range(2, limit + 1):
        p = spf[m]
        w[m] = w[m // p] * prime_weight[p]
    return w_arr


cdef long long _enum_count(long long x, long long[::1] primes, Py_ssize_t np_,
                           long long value, Py_ssize_t i0):
    cdef long long total = 1
    cdef Py_ssize_t i
    cdef long long p
    for i in range(i0, np_):
        p = primes[i]
        if value > x // p:
            break
        total += _enum_count(x, primes, np_, value * p, i)
    return total


cdef void _enum_fill(long long x, long long[::1] primes, Py_ssize_t np_,
                     long long value, Py_ssize_t i0,
                     long long[::1] out, long long *pos):
    cdef Py_ssize_t i
    cdef long long p
    out[pos[0]] = value
    pos[0] += 1
    for i in range(i0, np_):
        p = primes[i]
        if value > x // p:
            break
        _enum_fill(x, primes, np_, value * p, i, out, pos)


def smooth_enumerate(long long x, long long[::1] primes):
    """All integers <= x whose prime factors lie in ``primes``, ascending."""
    if x < 1:
        return np.empty(0, dtype=np.int64)
    cdef Py_ssize_t np_ = primes.shape[0]
    cdef long long total = _enum_count(x, primes, np_, 1, 0)
    out_arr = np.empty(total, dtype=np.int64)
    cdef long long[::1] out = out_arr
    cdef long long pos = 0
    _enum_fill(x, primes, np_, 1, 0, out, &pos)
    out_arr.sort()
    return out_arr


cdef void _reduce(long long x, long long[::1] primes, double[::1] weights,
                  Py_ssize_t np_, long long value, Py_ssize_t i0,
                  double w, long long om,
                  long long *count, double *wsum, long long *omsum):
    cdef Py_ssize_t i
    cdef long long p
    count[0] += 1
    wsum[0] += w
    omsum[0] += om
    for i in range(i0, np_):
        p = primes[i]
        if value > x // p:
            break
        _reduce(x, primes, weights, np_, value * p, i,
                w * weights[i], om + 1, count, wsum, omsum)


def smooth_reduce(long long x, long long[::1] primes, double[::1] weights):
    """(count, weight_sum, omega_sum) over the smooth numbers <= x."""
    cdef long long count = 0, omsum = 0
    cdef double wsum = 0.0
    if x >= 1:
        _reduce(x, primes, weights, primes.shape[0], 1, 0, 1.0, 0,
                &count, &wsum, &omsum)
    return count, wsum, omsum
