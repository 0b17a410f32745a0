"""Sawtooth values, Fourier truncation, dyadic blocks, exponential sums,
curvature bounds, and the boundary cancellation sum."""

from __future__ import annotations

import math
import random
from fractions import Fraction

import mpmath as mp
import pytest

from powersum import sawtooth
from powersum.counting import integer_kth_root
from powersum.errors import EnvelopeViolationError, PrecisionError
from powersum.sawtooth import (
    Block,
    ExpSumConfig,
    admissible_H_exponent_range,
    b1,
    b1_fourier_remainder,
    b2,
    block_partition,
    cancellation_blocks,
    cancellation_sum,
    default_H,
    default_nu,
    distance_to_nearest_integer,
    dyadic_blocks,
    phase_second_derivative,
    sawtooth_value,
    t_sum,
    vdc_bound,
    working_precision,
)


# ----------------------------------------------------------------------
# sawtooth values
# ----------------------------------------------------------------------

class TestSawtoothValues:
    @pytest.mark.parametrize(
        "alpha, want",
        [(0.0, -0.5), (0.25, -0.25), (0.5, 0.0), (0.75, 0.25),
         (1.0, -0.5), (-0.25, 0.25), (3.5, 0.0), (-2.0, -0.5)],
    )
    def test_b1_pinned(self, alpha, want):
        assert b1(alpha) == want

    @pytest.mark.parametrize(
        "alpha, want",
        [(0.0, 0.0), (0.5, -0.125), (1.0, 0.0), (1.25, -0.09375),
         (-0.5, -0.125), (2.75, -0.09375)],
    )
    def test_b2_pinned(self, alpha, want):
        assert b2(alpha) == want

    def test_periodicity_exact_on_dyadic_grid(self):
        for i in range(-64, 65):
            a = i / 64.0
            for shift in (-3, -1, 1, 2, 7):
                assert b1(a + shift) == b1(a)
                assert b2(a + shift) == b2(a)

    def test_b1_odd_symmetry_off_integers(self):
        for i in range(1, 64):
            a = i / 64.0
            assert b1(-a) == -b1(a)

    def test_b1_range_and_b2_range(self):
        for i in range(-1000, 1001):
            a = i / 313.0
            assert -0.5 <= b1(a) < 0.5
            assert -0.125 <= b2(a) <= 0.0

    def test_mpf_paths_match_float(self):
        for a in (0.0, 0.3125, 0.5, 1.75, -0.25):
            assert float(b1(mp.mpf(a))) == b1(a)
            assert float(b2(mp.mpf(a))) == b2(a)

    def test_b2_is_quadrature_of_b1(self):
        # The sawtooth jumps at integers, so the quadrature path must be
        # split there; agreement across several periods pins the closed
        # form, negatives included.
        for a in (0.5, 1.25, 2.0, 3.75, -0.5, -1.6):
            lo, hi = (0.0, a) if a >= 0 else (a, 0.0)
            breaks = [lo] + [t for t in range(math.ceil(lo), math.floor(hi) + 1)
                             if lo < t < hi] + [hi]
            with mp.workprec(80):
                num = mp.quad(lambda t: b1(mp.mpf(t)), breaks)
                num = num if a >= 0 else -num
                assert abs(num - b2(a)) < mp.mpf("1e-12"), a

    @pytest.mark.parametrize(
        "alpha, want",
        [(0.3, 0.3), (0.75, 0.25), (2.0, 0.0), (-1.25, 0.25), (0.5, 0.5)],
    )
    def test_distance_to_nearest_integer(self, alpha, want):
        assert distance_to_nearest_integer(alpha) == pytest.approx(want, abs=1e-15)

    def test_sawtooth_value_bundle(self):
        v = sawtooth_value(0.75)
        assert (v.alpha, v.b1, v.b2) == (0.75, 0.25, b2(0.75))


# ----------------------------------------------------------------------
# Fourier truncation
# ----------------------------------------------------------------------

class TestFourierTruncation:
    def test_partial_sum_is_leibniz_series_at_quarter(self):
        # At alpha = 1/4 the truncated series is the alternating Leibniz
        # series for -pi/4 divided by pi, so it must approach -1/4.
        approx, _ = b1_fourier_remainder(0.25, 10**5)
        assert abs(approx - (-0.25)) < 1e-5

    def test_error_shrinks_with_height(self):
        rng = random.Random(5)
        alphas = [rng.uniform(0.05, 0.95) for _ in range(25)]
        for a in alphas:
            errs = [abs(b1(a) - b1_fourier_remainder(a, H)[0])
                    for H in (10, 100, 1000)]
            assert errs[2] <= errs[0] + 1e-9, a

    def test_bound_values(self):
        _, bound = b1_fourier_remainder(0.5, 10)
        assert bound == pytest.approx(0.2)
        _, bound = b1_fourier_remainder(3.0, 10)
        assert bound == 1.0  # at integers the min degenerates to 1
        _, bound = b1_fourier_remainder(0.5 + 1e-9, 10**6)
        assert bound == pytest.approx(2e-6, rel=1e-3)

    def test_error_within_constant_times_bound(self):
        rng = random.Random(17)
        for _ in range(500):
            a = rng.uniform(-3, 3)
            if distance_to_nearest_integer(a) < 1e-3:
                continue
            for H in (10, 100):
                approx, bound = b1_fourier_remainder(a, H)
                assert abs(b1(a) - approx) <= 5 * bound, (a, H)

    def test_height_validation(self):
        with pytest.raises(ValueError):
            b1_fourier_remainder(0.3, 1.5)


# ----------------------------------------------------------------------
# dyadic blocks
# ----------------------------------------------------------------------

class TestBlockPartition:
    def test_defaults_pinned(self):
        assert default_nu(65536, 4) == 8.0
        assert default_H(65536, 4) == pytest.approx(2**1.5, rel=1e-15)
        lo, hi = admissible_H_exponent_range(4)
        assert (lo, hi) == (Fraction(1, 16), Fraction(1, 8))

    @pytest.mark.parametrize("x, k", [
        (2**16, 4), (2**20, 4), (2**24, 5), (12345, 2), (2 * 6**4, 4),
        (1e5, 3), (2**30, 6),
    ])
    def test_blocks_tile_the_range_exactly(self, x, k):
        init_hi, blocks = block_partition(x, k)
        cap = integer_kth_root(int(x) // 2, k) if float(x).is_integer() else None
        prev = init_hi
        for blk in blocks:
            assert blk.m_lo == prev + 1
            assert blk.m_hi >= blk.m_lo - 1  # empty ranges allowed
            assert blk.M_prime <= 2 * blk.M + 1e-9
            assert blk.M_prime > blk.M
            prev = blk.m_hi
        if cap is not None:
            assert prev == cap  # last integer covered is exactly the cap

    def test_cap_is_exact_at_perfect_power_boundary(self):
        # x = 2*m**k puts the fold cap exactly at integer m; float rounding
        # of (x/2)**(1/k) must not lose it.
        for m, k in [(6, 4), (10, 4), (17, 3), (2**15, 2)]:
            x = 2 * m**k
            init_hi, blocks = block_partition(x, k)
            last = blocks[-1].m_hi if blocks else init_hi
            assert last == m

    def test_custom_nu_and_empty_blocks(self):
        init_hi, blocks = block_partition(2**16, 4, nu=30.0)
        # nu beyond the cap puts everything in the initial segment.
        assert blocks == []
        assert init_hi == integer_kth_root(2**15, 4)
        init_hi2, blocks2 = block_partition(2**16, 4, nu=3.0)
        assert init_hi2 == 3
        assert blocks2[0].m_lo == 4

    def test_dyadic_blocks_helper(self):
        assert dyadic_blocks(2**16, 4) == block_partition(2**16, 4)[1]

    def test_validation(self):
        with pytest.raises(ValueError):
            block_partition(2**16, 1)
        with pytest.raises(ValueError):
            block_partition(1, 4)
        with pytest.raises(ValueError):
            block_partition(2**16, 4, nu=0.5)


class TestExpSumConfig:
    def test_make_derives_endpoints(self):
        # fold cap (x/2)**(1/4) ~ 26.9 for x = 2**20, so 2M stays below it
        cfg = ExpSumConfig.make(2**20, 4, 8.0, 1)
        assert cfg.m_lo == 9
        assert cfg.M_prime == 16.0
        assert cfg.m_hi == 16
        assert cfg.H == pytest.approx(default_H(2**20, 4))

    def test_make_caps_at_fold_boundary(self):
        cfg = ExpSumConfig.make(2**16, 4, 12.0, 1)
        cap_f = float(mp.power(mp.mpf(2**16) / 2, mp.mpf(1) / 4))
        assert cfg.M_prime == pytest.approx(cap_f)
        assert cfg.m_hi == integer_kth_root(2**15, 4)

    def test_for_block_copies_block(self):
        blk = dyadic_blocks(2**16, 4)[0]
        cfg = ExpSumConfig.for_block(2**16, 4, blk, 2)
        assert (cfg.M, cfg.M_prime, cfg.m_lo, cfg.m_hi) == tuple(blk)
        assert cfg.h == 2

    def test_validation(self):
        with pytest.raises(ValueError):
            ExpSumConfig(x=2**16, k=1, M=4.0, M_prime=8.0, h=1, H=2.0,
                         nu=8.0, m_lo=5, m_hi=8)
        with pytest.raises(ValueError):
            ExpSumConfig(x=2**16, k=4, M=0.0, M_prime=8.0, h=1, H=2.0,
                         nu=8.0, m_lo=1, m_hi=8)
        with pytest.raises(ValueError):
            ExpSumConfig(x=2**16, k=4, M=8.0, M_prime=4.0, h=1, H=2.0,
                         nu=8.0, m_lo=9, m_hi=4)
        with pytest.raises(ValueError):
            # beyond the fold cap (x/2)**(1/k) ~ 16.8
            ExpSumConfig(x=2**16, k=4, M=10.0, M_prime=30.0, h=1, H=2.0,
                         nu=8.0, m_lo=11, m_hi=16)


# ----------------------------------------------------------------------
# working precision and exponential sums
# ----------------------------------------------------------------------

class TestWorkingPrecision:
    def test_adaptive_formula(self):
        assert working_precision(2**16, 4, 1) == math.ceil(17 * 1.25) + 1 + 40

    def test_grows_with_magnitudes(self):
        base = working_precision(2**16, 4, 1)
        assert working_precision(2**40, 4, 1) > base
        assert working_precision(2**16, 4, 10**6) > base

    def test_explicit_precision_honored_or_rejected(self):
        assert working_precision(2**16, 4, 1, 200) == 200
        with pytest.raises(PrecisionError):
            working_precision(10**40, 4, 1, 60)


class TestTSum:
    def test_zero_frequency_is_exact_count(self):
        cfg = ExpSumConfig.make(2**16, 4, 8.0, 0)
        t = t_sum(cfg)
        assert t == mp.mpc(cfg.m_hi - cfg.m_lo + 1, 0)

    def test_single_term_has_unit_modulus(self):
        cfg = ExpSumConfig.make(5000, 4, 6.0, 1)
        assert cfg.m_hi - cfg.m_lo == 0
        t = t_sum(cfg)
        assert abs(abs(t) - 1) < mp.mpf("1e-15")

    def test_matches_direct_high_precision_evaluation(self):
        cfg = ExpSumConfig.make(5000, 4, 5.0, 2)
        t = t_sum(cfg)
        with mp.workprec(300):
            want = mp.mpc(0)
            for m in range(cfg.m_lo, cfg.m_hi + 1):
                root = mp.power(5000 - m**4, mp.mpf(1) / 4)
                want += mp.expjpi(2 * (cfg.h * root))
            assert abs(t - want) < mp.mpf("1e-14")

    def test_negating_frequency_conjugates(self):
        tp = t_sum(ExpSumConfig.make(2**20, 4, 8.0, 3))
        tm = t_sum(ExpSumConfig.make(2**20, 4, 8.0, -3))
        assert abs(tp.real - tm.real) < mp.mpf("1e-20")
        assert abs(tp.imag + tm.imag) < mp.mpf("1e-20")

    def test_stable_across_precisions(self):
        cfg = ExpSumConfig.make(2**24, 5, 12.0, 7)
        a = t_sum(cfg)
        b = t_sum(cfg, precision_bits=250)
        assert abs(a - b) < mp.mpf("1e-15")

    def test_modulus_bounded_by_term_count(self):
        cfg = ExpSumConfig.make(2**20, 4, 12.0, 5)
        n = cfg.m_hi - cfg.m_lo + 1
        assert abs(t_sum(cfg)) <= n + 1e-12

    def test_rejects_block_past_the_radius(self):
        bad = ExpSumConfig(x=200, k=2, M=8.0, M_prime=10.0, h=1, H=2.0,
                           nu=8.0, m_lo=9, m_hi=15)
        with pytest.raises(ValueError):
            t_sum(bad)


class TestVdcBound:
    def test_mu_and_eta_pinned(self):
        cfg = ExpSumConfig.make(2**16, 4, 4.0, 1)
        assert cfg.M_prime == 8.0  # 2M, well below the fold cap ~13.45
        b = vdc_bound(cfg)
        assert b.mu == 3 * 2.0**-8
        assert b.eta == 2.0 ** (15 / 4)
        want = b.mu**-0.5 + (cfg.M_prime - cfg.M) * b.eta * b.mu**0.5
        assert b.bound == pytest.approx(want, rel=1e-15)

    def test_second_derivative_matches_numerical(self):
        for x, k, h, a in [(2**16, 4, 3, 10.0), (10**6, 5, -2, 7.0),
                           (5000, 2, 1, 30.0)]:
            got = phase_second_derivative(x, k, h, a)
            with mp.workprec(120):
                f = lambda t: h * mp.power(x - t**k, mp.mpf(1) / k)
                want = abs(mp.diff(f, a, 2))
            assert got == pytest.approx(float(want), rel=1e-10)

    def test_second_derivative_domain(self):
        with pytest.raises(ValueError):
            phase_second_derivative(2**16, 4, 1, 20.0)

    def test_envelope_holds_on_generated_blocks(self):
        for x, k in [(2**16, 4), (2**20, 4), (2**24, 5)]:
            for blk in dyadic_blocks(x, k):
                for h in (1, -2):
                    cfg = ExpSumConfig.for_block(x, k, blk, h)
                    b = vdc_bound(cfg)  # raises EnvelopeViolationError on failure
                    assert abs(t_sum(cfg)) <= 10 * b.bound

    def test_envelope_violation_on_overwide_block(self):
        bad = ExpSumConfig(x=2**20, k=4, M=2.0, M_prime=20.0, h=1,
                           H=10.0, nu=2.0, m_lo=3, m_hi=20)
        with pytest.raises(EnvelopeViolationError):
            vdc_bound(bad)

    def test_validation(self):
        cfg = ExpSumConfig.make(2**16, 4, 4.0, 0)
        with pytest.raises(ValueError):
            vdc_bound(cfg)
        with pytest.raises(ValueError):
            vdc_bound(ExpSumConfig.make(2**16, 4, 4.0, 1), grid_points=1)


# ----------------------------------------------------------------------
# boundary cancellation sum
# ----------------------------------------------------------------------

class TestCancellationSum:
    def test_pinned_tiny_case(self):
        # x=2, k=4: the single term is at the perfect power 1**4, where the
        # sawtooth is exactly -1/2.
        assert cancellation_sum(2, 4) == mp.mpf(-0.5)

    def test_matches_direct_high_precision_sum(self):
        # x chosen so no x - m**4 is a perfect fourth power: every term is
        # then safe to evaluate by straightforward mpmath arithmetic.
        x, k = 10000, 4
        cap = integer_kth_root(x // 2, k)
        assert all(integer_kth_root(x - m**k, k) ** k != x - m**k
                   for m in range(1, cap + 1))
        got = cancellation_sum(x, k)
        with mp.workprec(250):
            want = mp.mpf(0)
            for m in range(1, cap + 1):
                r = mp.power(x - m**k, mp.mpf(1) / k)
                want += r - mp.floor(r) - mp.mpf(1) / 2
            assert abs(got - want) < mp.mpf("1e-12")

    def test_perfect_power_terms_detected_exactly(self):
        # x=17, k=4: the only term within the fold radius is m=1, where
        # x - 1 = 16 is a perfect fourth power, so the sum is exactly -1/2.
        assert cancellation_sum(17, 4) == mp.mpf(-0.5)
        # k=2, x=50: the m=1 and m=5 terms sit on the perfect squares 49
        # and 25 and must contribute exactly -1/2 each.
        with mp.workprec(200):
            want = mp.mpf(-1)
            for m in (2, 3, 4):
                r = mp.sqrt(50 - m * m)
                want += r - mp.floor(r) - mp.mpf(1) / 2
            assert abs(cancellation_sum(50, 2) - want) < mp.mpf("1e-12")

    def test_blocks_regroup_identically(self):
        for nu in (None, 3.0, 10.0):
            dec = cancellation_blocks(2**16, 4, nu=nu)
            assert dec.initial_sum + sum(dec.block_sums, Fraction(0)) == dec.total
        dec = cancellation_blocks(2**16, 4)
        with mp.workprec(100):
            direct = cancellation_sum(2**16, 4)
            regrouped = mp.mpf(dec.total.numerator) / dec.total.denominator
            assert abs(direct - regrouped) < mp.mpf("1e-25")

    def test_block_term_attribution(self):
        dec = cancellation_blocks(2**16, 4)
        covered = dec.initial_m_hi + sum(
            blk.m_hi - blk.m_lo + 1 for blk in dec.blocks)
        assert covered == integer_kth_root(2**15, 4)

    def test_validation(self):
        with pytest.raises(ValueError):
            cancellation_sum(1, 4)
        with pytest.raises(ValueError):
            cancellation_sum(100, 1)
