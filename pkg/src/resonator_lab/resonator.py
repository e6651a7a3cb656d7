"""Resonator weights and the exact finite-modulus inequality chain.

The resonator is a short Euler product over the primes up to a smoothness
level y derived from (x, q, c); its completely multiplicative coefficients
concentrate mass on smooth integers.  At finite q the chain

    max |S_chi(x)|  >=  |S1|/S2  >=  sum of weights over smooth n <= x
                    >=  Psi(x, y) - correction

holds exactly (up to binary64 rounding): the first step is the resonance
inequality, the rest expand S1 over residue classes and keep only the
positive diagonal terms.  Magnitudes |R(chi)|^2 are handled in the log
domain and re-centered at the principal character, since every reported
quantity is invariant under a common rescaling.
"""

import json
import math
import warnings
from dataclasses import dataclass, replace

import numpy as np

from . import _kernels
from .arith import Modulus, iterated_log, primes_up_to
from .characters import (
    all_char_sums,
    build_group,
    char_values_per_character,
    evaluate,
    sums_from_unit_weights,
    unit_count_below,
)
from .errors import DomainError
from .smooth import _check_budget, omega_sum_smooth, psi, psi_coprime

DEFAULT_EPS = 0.1
DEFAULT_C_PRIME = 0.24
DEFAULT_C_COMPOSITE = 0.16


def smoothness_level(x, q, c):
    """Level y = c log(q) loglog(q) / max{loglog x - logloglog q, logloglog q}.

    Requires q >= 16 and x >= 3 so every iterated log is positive.
    """
    if q < 16:
        raise DomainError(f"need q >= 16 for iterated logs, got {q}")
    if x < 3:
        raise DomainError(f"need x >= 3 for loglog x, got {x}")
    lq = iterated_log(1, q)
    llq = iterated_log(2, q)
    lllq = iterated_log(3, q)
    llx = iterated_log(2, x)
    return c * lq * llq / max(llx - lllq, lllq)


def sigma_rule_level(q, sigma):
    """Compact level (1/(2 sigma)) log q for the regime log x = (log q)^sigma."""
    if not 0 < sigma < 0.5:
        raise DomainError(f"need 0 < sigma < 1/2, got {sigma}")
    return math.log(q) / (2.0 * sigma)


def small_range_level(q):
    """Compact level (1/2) log(q) loglog(q) / logloglog(q) for x = log^A q."""
    if q < 16:
        raise DomainError(f"need q >= 16, got {q}")
    return 0.5 * math.log(q) * iterated_log(2, q) / iterated_log(3, q)


@dataclass(frozen=True, eq=False)
class ResonatorConfig:
    """Smoothness level, per-prime weights, and their shared parameters.

    All primes p <= y carry the same weight in [0, 1); the weight of any
    integer is the completely multiplicative extension, zero as soon as a
    prime factor exceeds y.
    """

    modulus: Modulus
    x: int
    c: float
    eps: float
    y: float
    u: float
    prime_weights: dict
    composite_mode: bool

    @property
    def q(self) -> int:
        return self.modulus.q

    @property
    def weight_value(self) -> float:
        return next(iter(self.prime_weights.values())) if self.prime_weights else 0.0

    def primes(self) -> np.ndarray:
        return np.array(sorted(self.prime_weights), dtype=np.int64)

    def primes_coprime(self) -> np.ndarray:
        ps = self.primes()
        return ps[np.gcd(ps, self.q) == 1]


def build_weights(q, x, c=None, eps=DEFAULT_EPS, composite_mode=False, table=None):
    """Derive the smoothness level and attach the prime weights.

    The damping exponent on loglog(q) is 1+eps, or 2+eps in composite mode.
    A constant c outside the supported open range only warns (exploration
    is allowed); a level y < 2 or a weight escaping [0, 1) is fatal.
    """
    if c is None:
        c = DEFAULT_C_COMPOSITE if composite_mode else DEFAULT_C_PRIME
    if eps <= 0:
        raise DomainError(f"need eps > 0, got {eps}")
    c_cap = 1.0 / 6.0 if composite_mode else 0.25
    if not 0 < c < c_cap:
        warnings.warn(
            f"c={c} outside the supported range (0, {c_cap:.4g}); "
            "bounds may degrade",
            stacklevel=2,
        )
    y = smoothness_level(x, q, c)
    if y < 2:
        raise DomainError(f"degenerate smoothness level y={y:.4f} < 2")
    u = math.log(x) / math.log(y)
    exponent = (2.0 if composite_mode else 1.0) + eps
    damping = u * iterated_log(2, q) ** exponent
    w = 1.0 - 1.0 / damping
    if not 0.0 <= w < 1.0:
        raise DomainError(f"prime weight {w:.4f} outside [0, 1); u too small")
    modulus = Modulus.from_int(q, table=table)
    prime_weights = {int(p): w for p in primes_up_to(y)}
    return ResonatorConfig(
        modulus=modulus,
        x=int(x),
        c=float(c),
        eps=float(eps),
        y=float(y),
        u=float(u),
        prime_weights=prime_weights,
        composite_mode=bool(composite_mode),
    )


def forced_config(q, x, y, eps=DEFAULT_EPS, composite_mode=False, weight_value=None, table=None):
    """Config with an explicit level y, bypassing the derived formula.

    For exploration and degenerate cases (forced weights, y >= x, ...).
    ``weight_value`` overrides the damping formula when given.
    """
    if y < 2:
        raise DomainError(f"need y >= 2, got {y}")
    u = math.log(x) / math.log(y)
    if weight_value is None:
        exponent = (2.0 if composite_mode else 1.0) + eps
        weight_value = 1.0 - 1.0 / (u * iterated_log(2, q) ** exponent)
    if not 0.0 <= weight_value < 1.0:
        raise DomainError(f"prime weight {weight_value:.4f} outside [0, 1)")
    modulus = Modulus.from_int(q, table=table)
    return ResonatorConfig(
        modulus=modulus,
        x=int(x),
        c=math.nan,
        eps=float(eps),
        y=float(y),
        u=float(u),
        prime_weights={int(p): float(weight_value) for p in primes_up_to(y)},
        composite_mode=bool(composite_mode),
    )


def weight(n, cfg):
    """Multiplicative coefficient of n: product of prime weights, or 0."""
    if n < 1:
        raise DomainError(f"need n >= 1, got {n}")
    value = 1.0
    m = int(n)
    for p, wp in cfg.prime_weights.items():
        while m % p == 0:
            m //= p
            value *= wp
    return value if m == 1 else 0.0


def resonator_value(chi, cfg):
    """Euler product over p <= y of 1/(1 - w_p chi(p)) for one character.

    Primes dividing q contribute a factor 1 (chi vanishes there).  The
    magnitude is accumulated in the log domain with a separate phase.
    """
    logmag = 0.0
    phase = 0.0
    for p, wp in sorted(cfg.prime_weights.items()):
        if cfg.q % p == 0:
            continue
        factor = 1.0 - wp * evaluate(chi, p)
        assert abs(factor) > 0.0, "resonator pole: weight reached 1"
        logmag -= math.log(abs(factor))
        phase -= math.atan2(factor.imag, factor.real)
    return complex(math.exp(logmag) * math.cos(phase), math.exp(logmag) * math.sin(phase))


def log_r2_all(group, cfg):
    """log |R(chi)|^2 for every character, flat-indexed like the profiles."""
    lm = np.zeros(group.char_count, dtype=np.float64)
    for p, wp in sorted(cfg.prime_weights.items()):
        if group.q % p == 0:
            continue
        z = char_values_per_character(group, p)
        lm -= 2.0 * np.log(np.abs(1.0 - wp * z))
    return lm


@dataclass(frozen=True)
class ResonanceReport:
    """Weighted moment sums and the lower bounds they certify.

    All |R(chi)|^2 are divided by the principal value, so s2 <= phi(q) and
    nothing overflows; the bounds are invariant under that rescaling.
    ``normalization`` echoes the divided-out scale (its log is exact).
    """

    q: int
    x: int
    c: float
    eps: float
    y: float
    u: float
    s1: complex
    s2: float
    s_principal: float
    bound_all: float
    bound_nonprincipal: float
    log_normalization: float
    friable_minorant: float = None
    delta_exact: float = None

    @property
    def normalization(self) -> float:
        return math.exp(self.log_normalization)

    def to_json_obj(self):
        obj = {
            "q": self.q,
            "x": self.x,
            "c": self.c,
            "eps": self.eps,
            "y": self.y,
            "u": self.u,
            "s1_re": self.s1.real,
            "s1_im": self.s1.imag,
            "s2": self.s2,
            "s_principal": self.s_principal,
            "bound_all": self.bound_all,
            "bound_nonprincipal": self.bound_nonprincipal,
            "normalization": self.normalization,
            "log_normalization": self.log_normalization,
            "friable_minorant": self.friable_minorant,
            "delta_exact": self.delta_exact,
        }
        # forced configs carry c=nan and extreme levels overflow the
        # exponentiated normalization; keep the JSON strictly parseable
        for key, value in obj.items():
            if isinstance(value, float) and not math.isfinite(value):
                obj[key] = None
        return obj

    def to_json(self):
        return json.dumps(self.to_json_obj(), sort_keys=True)


def resonance_moments(q, x, cfg, profile=None, group=None, table=None):
    """First and zeroth resonator-weighted moments over the characters.

    bound_all = |S1|/S2 sits below the maximum of |S_chi(x)| over all
    characters; bound_nonprincipal subtracts the principal term from the
    numerator and sits below the non-principal maximum.
    """
    if profile is None:
        profile = all_char_sums(q, x, table=table, group=group)
    group = profile.group
    if group.q != cfg.q:
        raise DomainError("profile and config disagree on the modulus")

    lm = log_r2_all(group, cfg)
    weights = np.exp(lm - lm[0])
    s1 = complex((profile.sums * weights).sum())
    s2 = float(weights.sum())
    assert s2 > 0.0
    assert abs(s1.imag) <= 1e-8 * max(1.0, abs(s1)), "S1 should be real"

    s_principal = float(unit_count_below(group, x))
    bound_all = abs(s1) / s2
    bound_nonprincipal = (abs(s1) - s_principal) / s2
    return ResonanceReport(
        q=cfg.q,
        x=int(x),
        c=cfg.c,
        eps=cfg.eps,
        y=cfg.y,
        u=cfg.u,
        s1=s1,
        s2=s2,
        s_principal=s_principal,
        bound_all=bound_all,
        bound_nonprincipal=bound_nonprincipal,
        log_normalization=float(lm[0]),
    )


def friable_minorant(q, x, cfg, budget=None):
    """Exact sum of the weights over smooth n <= x coprime to q.

    This is the quantity the moment quotient |S1|/S2 dominates.
    """
    x = int(x)
    _check_budget(x, budget)
    primes = cfg.primes_coprime()
    w = np.full(len(primes), cfg.weight_value, dtype=np.float64)
    _, wsum, _ = _kernels.smooth_reduce(x, primes, w)
    return float(wsum)


def minorant_psi_bound(q, x, cfg, budget=None):
    """The smooth-count floor under the minorant: (psi_term, correction).

    correction = (1 - w) * sum of Omega(n) over the counted smooth n; the
    count is coprime-restricted exactly when some weighted prime divides q
    (always the case in composite mode at practical scales).
    """
    x = int(x)
    _check_budget(x, budget)
    shares_prime = any(q % p == 0 for p in cfg.prime_weights)
    if shares_prime:
        psi_term = psi_coprime(x, cfg.y, q)
        primes = cfg.primes_coprime()
        ones = np.ones(len(primes), dtype=np.float64)
        _, _, omega_total = _kernels.smooth_reduce(x, primes, ones)
    else:
        psi_term = psi(x, cfg.y)
        omega_total = omega_sum_smooth(x, cfg.y, budget=budget)
    correction = (1.0 - cfg.weight_value) * float(omega_total)

    minorant = friable_minorant(q, x, cfg, budget=budget)
    scale = max(1.0, abs(minorant), abs(psi_term))
    assert minorant >= psi_term - correction - 1e-9 * scale, (
        f"minorant {minorant} fell under {psi_term} - {correction}"
    )
    return float(psi_term), correction


@dataclass(frozen=True)
class GrowthCheck:
    """Exact principal-resonator size against its analytic budget."""

    log_r2: float
    budget: float
    ratio_vs_log_q: float
    target_exponent: float


def growth_check(q, x, cfg):
    """log |R(chi0)|^2 exactly, and the 2 (y/log y)(log u + logloglog q) cap.

    The ratio against log q is reported, not asserted: the cap's lower
    order terms are unquantified.
    """
    w = cfg.weight_value
    n_primes = len(cfg.primes_coprime())
    log_r2 = -2.0 * n_primes * math.log(1.0 - w)
    budget = 2.0 * (cfg.y / math.log(cfg.y)) * (math.log(cfg.u) + iterated_log(3, q))
    target = (6.0 if cfg.composite_mode else 4.0) * cfg.c
    return GrowthCheck(
        log_r2=log_r2,
        budget=budget,
        ratio_vs_log_q=log_r2 / math.log(q),
        target_exponent=target,
    )


@dataclass(frozen=True)
class TruncationCheck:
    """Two independent evaluations of one identity, and their gap."""

    lhs: float
    rhs: float
    residual: float
    scale: float
    min_inner: float = None

    @property
    def relative_residual(self) -> float:
        return self.residual / self.scale


def _truncated_unit_weights(group, cfg, trunc, budget=None):
    """Residue-class masses of the weights w_a for a <= trunc, units only."""
    _check_budget(trunc, budget)
    primes = [p for p in cfg.prime_weights if p <= trunc]
    prime_weight = np.zeros(trunc + 1, dtype=np.float64)
    for p in primes:
        prime_weight[p] = cfg.prime_weights[p]
    qa = _kernels.weight_table(trunc, prime_weight)
    residues = np.arange(1, trunc + 1, dtype=np.int64) % group.q
    full = np.bincount(residues, weights=qa[1:], minlength=group.q)
    return full[group.units], qa


def orthogonality_identity_check(q, cfg, trunc, group=None, table=None, budget=None):
    """Parseval identity for the truncated resonator series.

    Left side sums |R_trunc(chi)|^2 over the characters via the DFT; right
    side is phi(q) times the sum of squared residue-class masses.  Both are
    the same finite double sum rearranged, so the gap is pure float error.
    """
    if group is None:
        group = build_group(q, table=table)
    v_units, _ = _truncated_unit_weights(group, cfg, trunc, budget=budget)
    sums = sums_from_unit_weights(group, v_units)
    lhs = float((np.abs(sums) ** 2).sum())
    rhs = float(group.modulus.phi * (v_units**2).sum())
    scale = max(abs(lhs), abs(rhs), 1.0)
    return TruncationCheck(lhs=lhs, rhs=rhs, residual=abs(lhs - rhs), scale=scale)


def convolution_identity_check(q, x, cfg, trunc, group=None, table=None, budget=None):
    """Residue-convolution form of S1 for the truncated series.

    Left side: sum over characters of S_chi(x) |R_trunc(chi)|^2.  Right
    side: for each n <= x the inner sum phi(q) * sum_{n a = b mod q} w_a w_b,
    evaluated by direct convolution.  Inner sums are individually
    nonnegative; the smallest is reported.
    """
    if group is None:
        group = build_group(q, table=table)
    x = int(x)
    v_units, _ = _truncated_unit_weights(group, cfg, trunc, budget=budget)
    sums = sums_from_unit_weights(group, v_units)
    r2 = np.abs(sums) ** 2
    profile = all_char_sums(q, x, group=group)
    lhs_c = complex((profile.sums * r2).sum())
    assert abs(lhs_c.imag) <= 1e-8 * max(1.0, abs(lhs_c))
    lhs = float(lhs_c.real)

    v_full = np.zeros(group.q, dtype=np.float64)
    v_full[group.units] = v_units
    phi = group.modulus.phi
    rhs = 0.0
    min_inner = math.inf
    units = group.units
    for n in range(1, x + 1):
        if math.gcd(n, group.q) != 1:
            continue
        inner = phi * float((v_units * v_full[(n * units) % group.q]).sum())
        min_inner = min(min_inner, inner)
        rhs += inner
    scale = max(abs(lhs), abs(rhs), 1.0)
    return TruncationCheck(
        lhs=lhs, rhs=rhs, residual=abs(lhs - rhs), scale=scale, min_inner=min_inner
    )


def with_minorant(report, minorant):
    """Report with the friable minorant filled in."""
    return replace(report, friable_minorant=minorant)


def with_delta(report, delta):
    """Report with the exhaustive maximum filled in."""
    return replace(report, delta_exact=delta)
