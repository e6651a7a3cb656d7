import json
import math

import numpy as np
import pytest

from resonator_lab.characters import all_char_sums, build_group, delta_max, evaluate
from resonator_lab.errors import BudgetError, DomainError
from resonator_lab.resonator import (
    build_weights,
    convolution_identity_check,
    forced_config,
    friable_minorant,
    growth_check,
    log_r2_all,
    minorant_psi_bound,
    orthogonality_identity_check,
    resonance_moments,
    resonator_value,
    sigma_rule_level,
    small_range_level,
    smoothness_level,
    weight,
    with_delta,
    with_minorant,
)
from resonator_lab.smooth import enumerate_smooth, psi


def iln(j, t):
    for _ in range(j):
        t = math.log(t)
    return t


class TestSmoothnessLevel:
    def test_worked_value(self):
        # independent recomputation of the level formula
        q, x, c = 10**6 + 3, 10**3, 0.25
        want = c * iln(1, q) * iln(2, q) / max(iln(2, x) - iln(3, q), iln(3, q))
        got = smoothness_level(x, q, c)
        assert got == pytest.approx(want, rel=1e-12)
        assert got == pytest.approx(9.376, abs=5e-3)

    def test_branches_meet(self):
        q = 99991
        lllq = iln(3, q)
        x = math.exp(math.exp(2 * lllq))
        got = smoothness_level(x, q, 0.25)
        want = 0.25 * iln(1, q) * iln(2, q) / lllq
        assert got == pytest.approx(want, rel=1e-9)

    def test_zero_c_degenerates(self):
        assert smoothness_level(10**3, 99991, 0.0) == 0.0
        with pytest.warns(UserWarning), pytest.raises(DomainError):
            build_weights(99991, 10**3, c=0.0)

    def test_domain(self):
        with pytest.raises(DomainError):
            smoothness_level(10, 15, 0.2)
        with pytest.raises(DomainError):
            smoothness_level(2, 101, 0.2)

    def test_compact_levels(self):
        q = 10**6 + 3
        assert sigma_rule_level(q, 0.4) == pytest.approx(math.log(q) / 0.8)
        assert small_range_level(q) == pytest.approx(
            0.5 * math.log(q) * iln(2, q) / iln(3, q)
        )
        with pytest.raises(DomainError):
            sigma_rule_level(q, 0.6)


class TestBuildWeights:
    @pytest.mark.filterwarnings("ignore::UserWarning")
    def test_worked_example(self):
        cfg = build_weights(99991, 10**3, c=0.25, eps=0.1)
        u = math.log(10**3) / math.log(cfg.y)
        want = 1.0 - 1.0 / (u * iln(2, 99991) ** 1.1)
        assert cfg.weight_value == pytest.approx(want, rel=1e-12)
        assert cfg.u == pytest.approx(u)

    def test_same_weight_for_all_primes(self):
        cfg = build_weights(99991, 10**3, c=0.24)
        assert len(set(cfg.prime_weights.values())) == 1
        assert sorted(cfg.prime_weights) == [2, 3, 5]

    def test_weight_tends_to_one(self):
        cfg = forced_config(99991, 10**6, 20.0)
        # 1 - w equals the reciprocal damping exactly
        damping = cfg.u * iln(2, 99991) ** 1.1
        assert 1.0 - cfg.weight_value == pytest.approx(1.0 / damping, rel=1e-12)

    def test_c_out_of_range_warns(self):
        with pytest.warns(UserWarning):
            build_weights(99991, 10**3, c=0.3)
        with pytest.warns(UserWarning):
            build_weights(99991, 10**3, c=0.2, composite_mode=True)

    def test_degenerate_level_fatal(self):
        with pytest.raises(DomainError):
            build_weights(101, 50, c=0.2)

    def test_eps_positive(self):
        with pytest.raises(DomainError):
            build_weights(99991, 10**3, c=0.24, eps=0.0)

    def test_composite_mode_exponent(self):
        cfg = build_weights(99991, 10**3, c=0.15, composite_mode=True)
        damping = cfg.u * iln(2, 99991) ** 2.1
        assert 1.0 - cfg.weight_value == pytest.approx(1.0 / damping, rel=1e-12)


@pytest.fixture(scope="module")
def cfg():
    return forced_config(99991, 10**3, 6.5, weight_value=0.9)


class TestWeight:
    def test_one(self, cfg):
        assert weight(1, cfg) == 1.0

    def test_large_prime_kills(self, cfg):
        assert weight(2 * 7, cfg) == 0.0
        assert weight(11, cfg) == 0.0

    def test_complete_multiplicativity(self, cfg):
        assert weight(12, cfg) == pytest.approx(0.9**3)
        assert weight(30, cfg) == pytest.approx(0.9**3)
        assert weight(8, cfg) == pytest.approx(0.9**3)


class TestResonatorValue:
    def test_principal_real_product(self):
        cfg = build_weights(99991, 10**3, c=0.24)
        g = build_group(99991)
        w = cfg.weight_value
        want = (1.0 - w) ** -3
        got = resonator_value(g.principal(), cfg)
        assert got.imag == pytest.approx(0.0, abs=1e-9 * want)
        assert got.real == pytest.approx(want, rel=1e-12)
        assert got.real >= 1.0

    def test_conjugation(self):
        cfg = build_weights(99991, 10**3, c=0.24)
        g = build_group(99991)
        chi = g.character_from_flat(12345)
        assert resonator_value(chi.conjugate(), cfg) == pytest.approx(
            np.conj(resonator_value(chi, cfg)), rel=1e-12
        )

    def test_truncated_series_oracle(self):
        # Euler product against the Dirichlet series cut at A, with the
        # geometric tail of the series bounding the gap.
        q, x, c = 997, 50, 0.2
        cfg = build_weights(q, x, c=c, eps=0.1)
        g = build_group(q)
        trunc = 10**5
        primes = sorted(cfg.prime_weights)
        for flat in (1, 17, 500):
            chi = g.character_from_flat(flat)
            series = 0j
            tail = 0.0
            for n in range(1, trunc + 1):
                w = weight(n, cfg)
                if w:
                    series += w * evaluate(chi, n)
            # tail bound: sum of weights beyond the cutoff
            full_mass = 1.0
            for p in primes:
                full_mass /= 1.0 - cfg.prime_weights[p]
            head_mass = sum(weight(n, cfg) for n in range(1, trunc + 1))
            tail = full_mass - head_mass
            got = resonator_value(chi, cfg)
            assert abs(got - series) <= tail + 1e-9

    def test_skips_primes_dividing_q(self):
        cfg = forced_config(30030, 500, 3.7, weight_value=0.8)
        g = build_group(30030)
        # 2 and 3 divide q, so every factor is 1
        assert resonator_value(g.principal(), cfg) == pytest.approx(1.0)
        assert log_r2_all(g, cfg)[0] == pytest.approx(0.0)


class TestResonanceMoments:
    def test_orthogonality_collapse_zero_weights(self):
        # all weights zero: R = 1, S2 = phi(q), S1 = phi(q) #{n<=x: n=1 mod q}
        q, x = 11, 7
        cfg = forced_config(q, x, 2.5, weight_value=0.0)
        report = resonance_moments(q, x, cfg)
        assert report.s2 == pytest.approx(10.0)
        assert report.s1.real == pytest.approx(10.0, abs=1e-9)
        q, x = 11, 14
        cfg = forced_config(q, x, 2.5, weight_value=0.0)
        report = resonance_moments(q, x, cfg)
        assert report.s1.real == pytest.approx(20.0, abs=1e-9)  # n=1 and n=12

    def test_bound_all_below_max_over_all(self):
        q, x = 101, 20
        cfg = build_weights(q, x, c=0.2)
        prof = all_char_sums(q, x)
        report = resonance_moments(q, x, cfg, profile=prof)
        assert report.bound_all <= np.abs(prof.sums).max() + 1e-9

    def test_bound_nonprincipal_below_delta(self):
        q, x = 101, 20
        cfg = build_weights(q, x, c=0.2)
        report = resonance_moments(q, x, cfg)
        delta, _ = delta_max(x, q)
        assert report.bound_nonprincipal <= delta + 1e-9 * max(1.0, delta)

    def test_normalization_invariance(self):
        # direct unnormalized computation from per-character Euler products
        q, x = 29, 11
        cfg = forced_config(q, x, 4.5, weight_value=0.7)
        g = build_group(q)
        prof = all_char_sums(q, x, group=g)
        r2 = np.array(
            [abs(resonator_value(g.character_from_flat(j), cfg)) ** 2 for j in range(28)]
        )
        s1 = (prof.sums * r2).sum()
        s2 = r2.sum()
        report = resonance_moments(q, x, cfg, profile=prof)
        assert report.bound_all == pytest.approx(abs(s1) / s2, rel=1e-12)
        npr = (abs(s1) - prof.sums[0].real * r2[0]) / s2
        assert report.bound_nonprincipal == pytest.approx(npr, rel=1e-10)

    def test_report_fields_and_json(self):
        q, x = 101, 20
        cfg = build_weights(q, x, c=0.2)
        report = resonance_moments(q, x, cfg)
        assert report.s2 > 0
        assert abs(report.s1.imag) <= 1e-8 * abs(report.s1)
        assert report.normalization == pytest.approx(math.exp(report.log_normalization))
        report = with_minorant(report, friable_minorant(q, x, cfg))
        report = with_delta(report, delta_max(x, q)[0])
        obj = json.loads(report.to_json())
        for key in ("q", "x", "c", "eps", "y", "u", "normalization",
                    "friable_minorant", "delta_exact", "s2"):
            assert key in obj
        assert obj["q"] == q and obj["x"] == x


class TestFriableMinorant:
    def test_tiny_x(self):
        cfg = forced_config(99991, 1, 6.5, weight_value=0.9)
        assert friable_minorant(99991, 1, cfg) == 1.0

    def test_weights_near_one_give_coprime_count(self):
        cfg = forced_config(101, 20, 25.0, weight_value=1 - 1e-12)
        got = friable_minorant(101, 20, cfg)
        assert got == pytest.approx(20.0, abs=1e-6)

    @pytest.mark.filterwarnings("ignore::UserWarning")
    def test_matches_direct_sum(self):
        q, x = 99991, 10**3
        cfg = build_weights(q, x, c=0.25, eps=0.1)
        direct = sum(weight(int(n), cfg) for n in enumerate_smooth(x, cfg.y))
        assert friable_minorant(q, x, cfg) == pytest.approx(direct, rel=1e-12)

    @pytest.mark.filterwarnings("ignore::UserWarning")
    def test_below_quotient(self):
        q, x = 99991, 10**3
        cfg = build_weights(q, x, c=0.25, eps=0.1)
        report = resonance_moments(q, x, cfg)
        mino = friable_minorant(q, x, cfg)
        assert mino <= report.bound_all + 1e-9 * max(1.0, report.bound_all)

    def test_composite_skips_shared_primes(self):
        q, x = 30030, 500
        cfg = forced_config(q, x, 3.7, weight_value=0.8, composite_mode=True)
        direct = sum(
            weight(int(n), cfg)
            for n in enumerate_smooth(x, cfg.y)
            if math.gcd(int(n), q) == 1
        )
        assert friable_minorant(q, x, cfg) == pytest.approx(direct, rel=1e-12)

    def test_budget(self):
        cfg = forced_config(99991, 10**3, 6.5, weight_value=0.9)
        with pytest.raises(BudgetError):
            friable_minorant(99991, 10**3, cfg, budget=100)


class TestMinorantPsiBound:
    @pytest.mark.filterwarnings("ignore::UserWarning")
    def test_correction_nonnegative_and_exact(self):
        q, x = 99991, 10**3
        cfg = build_weights(q, x, c=0.25, eps=0.1)
        psi_term, correction = minorant_psi_bound(q, x, cfg)
        assert correction >= 0.0
        assert psi_term == psi(x, cfg.y)
        mino = friable_minorant(q, x, cfg)
        assert mino >= psi_term - correction - 1e-9 * max(1.0, psi_term)

    def test_degenerate_collapse(self):
        q, x = 101, 20
        cfg = forced_config(q, x, 25.0, weight_value=1 - 1e-12)
        psi_term, correction = minorant_psi_bound(q, x, cfg)
        assert psi_term == 20
        assert friable_minorant(q, x, cfg) == pytest.approx(20.0 - 0.0, abs=1e-6)

    def test_composite_uses_coprime_floor(self):
        q, x = 30030, 500
        cfg = forced_config(q, x, 3.7, weight_value=0.8, composite_mode=True)
        psi_term, correction = minorant_psi_bound(q, x, cfg)
        assert psi_term == 1  # only n=1 is {2,3}-smooth and coprime to q
        assert correction == 0.0


class TestGrowthCheck:
    def test_exact_log_identity(self):
        q, x = 99991, 10**3
        cfg = build_weights(q, x, c=0.24)
        chk = growth_check(q, x, cfg)
        w = cfg.weight_value
        want = -2.0 * sum(math.log(1.0 - w) for p in cfg.prime_weights if q % p)
        assert chk.log_r2 == pytest.approx(want, rel=1e-12)
        assert chk.budget == pytest.approx(
            2.0 * (cfg.y / math.log(cfg.y)) * (math.log(cfg.u) + iln(3, q))
        )
        assert chk.ratio_vs_log_q == pytest.approx(chk.log_r2 / math.log(q))
        assert chk.target_exponent == pytest.approx(4 * 0.24)

    def test_composite_target(self):
        cfg = build_weights(30030, 500, c=0.15, composite_mode=True)
        chk = growth_check(30030, 500, cfg)
        assert chk.target_exponent == pytest.approx(6 * 0.15)


class TestExactLinksRandomized:
    def test_chain_links_hold_for_arbitrary_weights(self):
        # the quotient and minorant links are identities in the weights:
        # any completely multiplicative coefficients in [0, 1) must satisfy
        # them, not just the derived damping formula
        import random

        rng = random.Random(2027)
        for _ in range(25):
            q = rng.choice([29, 101, 120, 210, 997, 1009])
            x = rng.randint(3, min(q - 1, 400))
            y = rng.uniform(2.0, 20.0)
            w = rng.uniform(0.05, 0.95)
            cfg = forced_config(q, x, y, weight_value=w,
                                composite_mode=q in (120, 210))
            prof = all_char_sums(q, x)
            report = resonance_moments(q, x, cfg, profile=prof)
            mino = friable_minorant(q, x, cfg)
            delta, _ = delta_max(x, q, profile=prof)
            scale = max(1.0, delta, report.bound_all)
            assert report.bound_nonprincipal <= delta + 1e-9 * scale
            assert report.bound_all <= np.abs(prof.sums).max() + 1e-9 * scale
            assert mino <= report.bound_all + 1e-9 * scale
            psi_term, corr = minorant_psi_bound(q, x, cfg)
            assert mino >= psi_term - corr - 1e-9 * max(1.0, psi_term)


class TestTruncationChecks:
    def test_a_equals_one(self):
        q = 101
        cfg = build_weights(q, 20, c=0.2)
        chk = orthogonality_identity_check(q, cfg, 1)
        assert chk.lhs == pytest.approx(100.0, rel=1e-12)
        assert chk.rhs == pytest.approx(100.0, rel=1e-12)

    def test_orthogonality_small_residual(self):
        for q in (101, 997):
            x = 20 if q == 101 else 50
            cfg = build_weights(q, x, c=0.2)
            chk = orthogonality_identity_check(q, cfg, 10**4)
            assert chk.relative_residual <= 1e-8

    def test_convolution_x1_reduces_to_orthogonality(self):
        q = 997
        cfg = build_weights(q, 50, c=0.2)
        orth = orthogonality_identity_check(q, cfg, 2000)
        conv = convolution_identity_check(q, 1, cfg, 2000)
        assert conv.rhs == pytest.approx(orth.rhs, rel=1e-12)
        assert conv.min_inner >= 0.0

    def test_convolution_small_residual_and_positivity(self):
        q, x = 997, 20
        cfg = build_weights(q, x, c=0.2)
        chk = convolution_identity_check(q, x, cfg, 10**4)
        assert chk.relative_residual <= 1e-8
        assert chk.min_inner >= -1e-12 * chk.scale

    def test_positivity_chain_with_truncation(self):
        # inner sum at coprime n dominates w_n times the diagonal mass,
        # with the b side cut at A // n
        q, x, trunc = 997, 12, 4000
        cfg = build_weights(q, 50, c=0.2)
        g = build_group(q)
        qa = [0.0] + [weight(a, cfg) for a in range(1, trunc + 1)]
        phi = g.modulus.phi
        for n in (2, 3, 5, 12):
            inner = 0.0
            for residue in range(q):
                mass_a = sum(qa[a] for a in range(residue or q, trunc + 1, q) if math.gcd(a, q) == 1)
                target = (n * residue) % q
                mass_b = sum(qa[b] for b in range(target or q, trunc + 1, q) if math.gcd(b, q) == 1)
                inner += mass_a * mass_b
            inner *= phi
            cut = trunc // n
            diag = 0.0
            for residue in range(q):
                mass = sum(qa[a] for a in range(residue or q, cut + 1, q) if math.gcd(a, q) == 1)
                diag += mass * mass
            assert inner >= weight(n, cfg) * phi * diag - 1e-9

    def test_budget_guard(self):
        cfg = build_weights(997, 50, c=0.2)
        with pytest.raises(BudgetError):
            orthogonality_identity_check(997, cfg, 10**9)
