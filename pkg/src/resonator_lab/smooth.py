"""Counting and summing over friable (smooth) integers.

Exact counts come from a memoized divide-by-largest-prime recursion; sums
of black-box functions come from enumeration, which is budget-guarded.
The asymptotic estimators here drop their unquantified error terms and are
meant for ratio tracking, not assertions.
"""

import csv
import math
import os
from bisect import bisect_right
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .arith import primes_up_to
from .errors import BudgetError, ConvergenceError, DomainError

DEFAULT_ENUM_BUDGET = 10**7

#: Memo entries kept per cache before it is dropped and rebuilt.
MEMO_CAP = 4 * 10**6


def resolve_budget(budget=None):
    """Effective enumeration budget: explicit arg, else env, else default."""
    if budget is not None:
        return int(budget)
    env = os.environ.get("RESONATOR_LAB_BUDGET")
    return int(env) if env else DEFAULT_ENUM_BUDGET


def _check_budget(x, budget):
    limit = resolve_budget(budget)
    if x > limit:
        raise BudgetError(f"x={x} exceeds enumeration budget {limit}")


@dataclass(frozen=True)
class SmoothParams:
    """The (x, y) rectangle with its shape parameter u = log x / log y."""

    x: float
    y: float
    u: float

    @classmethod
    def from_xy(cls, x, y):
        if x < 2 or y < 2:
            raise DomainError(f"need x, y >= 2, got ({x}, {y})")
        return cls(x=float(x), y=float(y), u=math.log(x) / math.log(y))


class SmoothCountCache:
    """Memoized recursion state for exact smooth counts at one level y.

    The memo is keyed by (floor(x), number of usable primes); entries are
    dropped wholesale if the table outgrows MEMO_CAP.  ``skip`` lists primes
    excluded from the smooth factorizations (for counts coprime to m).
    """

    def __init__(self, y, skip=()):
        if y < 2:
            raise DomainError(f"smoothness level must be >= 2, got {y}")
        self.y = float(y)
        skipset = set(int(p) for p in skip)
        self.primes = [int(p) for p in primes_up_to(y) if int(p) not in skipset]
        self.skip = tuple(sorted(skipset))
        self._memo = {}

    def _coprime_below(self, t):
        # #{1 <= n <= t : gcd(n, prod(skip)) = 1} by inclusion-exclusion.
        if t < 1:
            return 0
        count = 0
        for mask in range(1 << len(self.skip)):
            d = 1
            bits = 0
            for i, p in enumerate(self.skip):
                if mask >> i & 1:
                    d *= p
                    bits += 1
            term = t // d
            count += term if bits % 2 == 0 else -term
        return count

    def count(self, x):
        """Number of y-smooth n <= x built only from the usable primes."""
        x = int(math.floor(x))
        if x < 1:
            return 0
        if self.y >= x:
            return self._coprime_below(x) if self.skip else x
        if len(self._memo) > MEMO_CAP:
            self._memo.clear()
        return self._count(x, len(self.primes))

    def _count(self, x, k):
        primes = self.primes
        k = min(k, bisect_right(primes, x))
        if k == 0:
            return 1
        key = (x, k)
        cached = self._memo.get(key)
        if cached is not None:
            return cached
        # Smooth n <= x split by largest prime p_i; when p_i^2 > x the
        # inner count collapses to all integers <= x // p_i.
        s = min(k, bisect_right(primes, math.isqrt(x)))
        total = 1
        for i in range(s):
            total += self._count(x // primes[i], i + 1)
        if self.skip:
            for i in range(s, k):
                total += self._coprime_below(x // primes[i])
        else:
            for i in range(s, k):
                total += x // primes[i]
        self._memo[key] = total
        return total


def psi(x, y, cache=None):
    """Exact count of y-smooth integers in [1, x]."""
    if y < 2:
        raise DomainError(f"smoothness level must be >= 2, got {y}")
    if cache is None:
        cache = SmoothCountCache(y)
    return cache.count(x)


def psi_coprime(x, y, m, cache=None):
    """Exact count of y-smooth integers in [1, x] coprime to m."""
    if m < 1:
        raise DomainError(f"m must be >= 1, got {m}")
    if cache is None:
        skip = [p for p in primes_up_to(y) if m % int(p) == 0]
        cache = SmoothCountCache(y, skip=skip)
    return cache.count(x)


def enumerate_smooth(x, y, budget=None):
    """All y-smooth integers in [1, x], ascending (1 included)."""
    if x < 1:
        raise DomainError(f"need x >= 1, got {x}")
    if y < 2:
        raise DomainError(f"smoothness level must be >= 2, got {y}")
    x = int(math.floor(x))
    _check_budget(x, budget)
    return _kernels.smooth_enumerate(x, primes_up_to(y))


def psi_twisted(x, y, f, budget=None):
    """Sum of f(n) over the y-smooth integers n <= x, as a complex number."""
    values = enumerate_smooth(x, y, budget=budget)
    return complex(sum(complex(f(int(n))) for n in values))


def omega_sum_smooth(x, y, budget=None):
    """Exact sum of Omega(n) over the y-smooth integers n <= x."""
    if x < 1:
        return 0
    x = int(math.floor(x))
    _check_budget(x, budget)
    primes = primes_up_to(y)
    ones = np.ones(len(primes), dtype=np.float64)
    _, _, omega_total = _kernels.smooth_reduce(x, primes, ones)
    return int(omega_total)


@dataclass(frozen=True)
class SaddlePoint:
    """Solution alpha of sum_{p<=y} log p / (p^alpha - 1) = log x."""

    alpha: float
    residual: float


def saddle_alpha(x, y, tol=None, max_iter=200):
    """Solve the saddle-point equation for the (x, y) smooth-count regime.

    The left side is strictly decreasing in alpha, so the root is unique;
    it is found by bracketing plus safeguarded Newton.  ``tol`` bounds the
    absolute residual (default 1e-12 * max(1, log x)).
    """
    if x <= 1 or y < 2:
        raise DomainError(f"need x > 1 and y >= 2, got ({x}, {y})")
    target = math.log(x)
    if tol is None:
        tol = 1e-12 * max(1.0, target)
    logs = [math.log(int(p)) for p in primes_up_to(y)]

    def g(a):
        return sum(lp / math.expm1(a * lp) for lp in logs)

    def dg(a):
        total = 0.0
        for lp in logs:
            e = math.expm1(a * lp)
            total -= lp * lp * (e + 1.0) / (e * e)
        return total

    lo = hi = 1.0
    while g(lo) < target:
        lo *= 0.5
        if lo < 1e-300:
            raise ConvergenceError("saddle bracket underflow")
    while g(hi) > target:
        hi *= 2.0
        if hi > 1e300:
            raise ConvergenceError("saddle bracket overflow")
    assert g(lo) >= target >= g(hi)

    a = 0.5 * (lo + hi)
    for _ in range(max_iter):
        r = g(a) - target
        if abs(r) <= tol:
            return SaddlePoint(alpha=a, residual=r)
        if r > 0:
            lo = a
        else:
            hi = a
        step = a - r / dg(a)
        a = step if lo < step < hi else 0.5 * (lo + hi)
    r = g(a) - target
    if abs(r) <= tol:
        return SaddlePoint(alpha=a, residual=r)
    raise ConvergenceError(f"saddle solver stalled at residual {r:.3e}")


def psi_estimate(x, y):
    """Smooth-count approximation x * exp(-u log u - u loglog(u+2) + u).

    Heuristic only: the error term in the exponent is dropped, so this is
    for ratio tracking against exact counts, never for assertions.
    """
    if y < 3 or x < y:
        raise DomainError(f"estimate needs x >= y >= 3, got ({x}, {y})")
    u = math.log(x) / math.log(y)
    return x * math.exp(-u * math.log(u) - u * math.log(math.log(u + 2)) + u)


def predicted_psi_logratio(x, y, kappa):
    """Main-term prediction of log(Psi(x, e^kappa * y) / Psi(x, y)).

    Valid for u < sqrt(y), u > 1, |kappa| < 1; the unquantified correction
    inside the parenthesis is set to zero.
    """
    if abs(kappa) >= 1:
        raise DomainError(f"need |kappa| < 1, got {kappa}")
    u = math.log(x) / math.log(y)
    if u <= 1 or u >= math.sqrt(y):
        raise DomainError(f"need 1 < u < sqrt(y), got u={u:.4f}, y={y}")
    return (kappa / math.log(y)) * u * (math.log(u) + math.log(math.log(u + 2)))


GRID_COLUMNS = ["x", "y", "u", "psi_exact", "psi_estimate", "ratio"]


def grid_report(xs, ys):
    """Exact-vs-estimate rows over a grid, for CSV emission.

    Each row has x, y, u, psi_exact, psi_estimate, ratio (exact/estimate).
    """
    rows = []
    for x in xs:
        for y in ys:
            exact = psi(x, y)
            est = psi_estimate(x, y)
            rows.append(
                {
                    "x": x,
                    "y": y,
                    "u": math.log(x) / math.log(y),
                    "psi_exact": exact,
                    "psi_estimate": est,
                    "ratio": exact / est,
                }
            )
    return rows


def grid_to_csv(rows, stream):
    """Write grid_report rows with the fixed column schema."""
    writer = csv.DictWriter(stream, fieldnames=GRID_COLUMNS)
    writer.writeheader()
    for row in rows:
        out = {}
        for name in GRID_COLUMNS:
            value = row[name]
            out[name] = f"{value:.12g}" if isinstance(value, float) else value
        writer.writerow(out)
