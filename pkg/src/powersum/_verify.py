"""Self-verification suites behind ``powersum verify``.

``quick`` cross-checks every subsystem in a few seconds: exact-counter
agreement (including the root-extraction contract), Gamma identities, the
sawtooth Fourier bound, block-partition exactness, one curvature-bound
configuration, and the synthetic fit oracle.  ``full`` widens the sweeps
and adds a real residual scan, a boundary-sum slope measurement, and a
curvature-bound census.

Checks never stop at the first failure; every failing case is reported.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, List

import mpmath as mp

from . import asymptotics, counting, residuals, sawtooth
from .instance import Instance


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str


def _run(name: str, fn: Callable[[], str]) -> CheckResult:
    """Run one check; the callable returns a detail string or raises."""
    try:
        return CheckResult(name=name, passed=True, detail=fn())
    except Exception as exc:  # noqa: BLE001 - report, never crash the suite
        return CheckResult(name=name, passed=False, detail=str(exc))


# ----------------------------------------------------------------------
# Quick checks
# ----------------------------------------------------------------------

def _check_root_contract() -> str:
    cases = [(0, 4, 0), (16, 4, 2), (624, 4, 4), (1, 7, 1), (2**40, 8, 32)]
    for n, k, want in cases:
        got = counting.integer_kth_root(n, k)
        if got != want:
            raise AssertionError(f"integer_kth_root({n}, {k}) = {got}, want {want}")
    rng = random.Random(12345)
    for _ in range(200):
        k = rng.randint(1, 10)
        n = rng.randrange(0, 10**24)
        r = counting.integer_kth_root(n, k)
        if not (r**k <= n < (r + 1) ** k):
            raise AssertionError(
                f"integer_kth_root({n}, {k}) = {r} violates r**k <= n < (r+1)**k"
            )
    return "5 pinned cases and 200 random round-trips"


def _check_table_examples() -> str:
    t = counting.build_table(Instance(k=2, s=2), 10)
    want = {2: 1, 5: 2, 8: 1, 10: 2}
    for m in range(1, 11):
        if t.count(m) != want.get(m, 0):
            raise AssertionError(f"r_(2,2)({m}) = {t.count(m)}, want {want.get(m, 0)}")
    t = counting.build_table(Instance(k=5, s=2), 10)
    for m in range(1, 11):
        if t.count(m) != (1 if m == 2 else 0):
            raise AssertionError(f"r_(5,2)({m}) = {t.count(m)}")
    t = counting.build_table(Instance(k=3, s=3), 10)
    for m in range(1, 11):
        expect = {3: 1, 10: 3}.get(m, 0)
        if t.count(m) != expect:
            raise AssertionError(f"r_(3,3)({m}) = {t.count(m)}, want {expect}")
    return "pinned count tables at x = 10 for (2,2), (5,2), (3,3)"


def _check_split_agreement() -> str:
    xs = [1, 2, 3, 7, 16, 50, 97, 255, 256, 1000, 2500, 4096]
    for k in (2, 3, 4, 5):
        table = counting.summatory_direct_table(Instance(k=k, s=2), max(xs))
        for x in xs:
            split = counting.summatory_split_s2(k, x)
            if split != table[x]:
                raise AssertionError(
                    f"summatory_split_s2 disagreement at k={k}, x={x}: "
                    f"direct={table[x]}, split={split}"
                )
    return f"fold counter matches the direct table at {len(xs)} cutoffs for k=2..5"


def _check_recursive_agreement() -> str:
    xs = [10, 50, 300, 600]
    for k in (2, 3, 4):
        for s in (3, 4):
            inst = Instance(k=k, s=s)
            table = counting.summatory_direct_table(inst, max(xs))
            for x in xs:
                rec = counting.summatory_recursive(inst, x)
                if rec != table[x]:
                    raise AssertionError(
                        f"summatory_recursive disagreement at k={k}, s={s}, "
                        f"x={x}: direct={table[x]}, recursive={rec}"
                    )
    return "peel counter matches the direct table for k=2..4, s=3..4"


def _check_gamma_identities() -> str:
    prec = 128
    bar = mp.mpf(2) ** -120
    g_half = asymptotics.gamma_hp(Fraction(1, 2), prec).value
    with mp.workprec(prec):
        if abs(g_half**2 - mp.pi) > bar:
            raise AssertionError("Gamma(1/2)**2 deviates from pi beyond 2**-120")
    rng = random.Random(777)
    for _ in range(10):
        a = Fraction(rng.randint(1, 20 * 10**6), 10**6)
        lhs = asymptotics.gamma_hp(a + 1, prec).value
        rhs_g = asymptotics.gamma_hp(a, prec).value
        with mp.workprec(prec):
            rhs = asymptotics.to_mpf_exact(a) * rhs_g
            if abs(lhs - rhs) > bar * abs(lhs):
                raise AssertionError(f"recurrence Gamma(a+1)=a*Gamma(a) fails at a={a}")
    worst = mp.mpf(0)
    for k in range(2, 6):
        for s in range(1, k + 2):
            d = asymptotics.beta_gamma_check(k, s, prec).value
            worst = max(worst, d)
            if d >= bar:
                raise AssertionError(f"Beta-Gamma discrepancy {d} at k={k}, s={s}")
    return f"reflection, recurrence, Beta-Gamma (k<=5); worst discrepancy {mp.nstr(worst, 3)}"


def _check_coefficient_consistency() -> str:
    prec = 128
    bar = mp.mpf(2) ** -120
    inst = Instance(k=4, s=4)
    main = asymptotics.main_coeff(inst, prec).value
    second = asymptotics.second_coeff(inst, prec).value
    g54 = asymptotics.gamma_hp(Fraction(5, 4), prec).value
    g74 = asymptotics.gamma_hp(Fraction(7, 4), prec).value
    with mp.workprec(prec):
        if abs(main - g54**4) > bar * abs(main):
            raise AssertionError("s=k main coefficient differs from Gamma(5/4)**4")
        want_second = mp.mpf(2) * g54**3 / g74
        if abs(second - want_second) > bar * abs(second):
            raise AssertionError("s=k second coefficient differs from its closed form")
    return "s=k coefficients reduce to the closed forms at k=4"


def _check_area_quadrature() -> str:
    for k, x in ((2, 1), (4, 1), (3, 8)):
        quad = asymptotics.area_quadrature_s2(k, x, 128).value
        closed = asymptotics.area_closed_form_s2(k, x, 128).value
        rel = abs(quad - closed) / abs(closed)
        if rel > 1e-12:
            raise AssertionError(f"area quadrature off by {float(rel)} at k={k}, x={x}")
    with mp.workprec(128):
        quarter_disc = asymptotics.area_quadrature_s2(2, 1, 128).value
        if abs(quarter_disc - mp.pi / 4) > mp.mpf(1e-15):
            raise AssertionError("k=2, x=1 area is not pi/4")
    return "quadrature meets the closed form to 1e-12 at (2,1), (4,1), (3,8)"


def _check_sawtooth() -> str:
    cases = [(0.5, 0.0), (3.75, 0.25), (7.0, -0.5)]
    for a, want in cases:
        got = sawtooth.b1(a)
        if abs(got - want) > 1e-15:
            raise AssertionError(f"b1({a}) = {got}, want {want}")
    if sawtooth.b2(0.0) != 0.0 or sawtooth.b2(1.0) != 0.0:
        raise AssertionError("b2 must vanish at integers")
    if abs(sawtooth.b2(0.5) + 0.125) > 1e-15:
        raise AssertionError(f"b2(0.5) = {sawtooth.b2(0.5)}, want -0.125")
    for a in (0.5, 1.25, -0.5, 3.75):
        with mp.workprec(80):
            # The sawtooth jumps at integers, so quadrature must break there.
            lo, hi = (0, a) if a >= 0 else (a, 0)
            breaks = [lo] + [t for t in range(math.ceil(lo), math.floor(hi) + 1)
                             if lo < t < hi] + [hi]
            num = mp.quad(lambda t: sawtooth.b1(mp.mpf(t)), breaks)
            num = num if a >= 0 else -num
            if abs(num - sawtooth.b2(a)) > mp.mpf(1e-12):
                raise AssertionError(f"b2({a}) disagrees with quadrature of b1")
    worst = 0.0
    for i in range(50):
        a = 0.01 + 0.98 * i / 49
        approx, bound = sawtooth.b1_fourier_remainder(a, 100)
        err = abs(sawtooth.b1(a) - approx)
        worst = max(worst, err / bound)
        if err > 5 * bound:
            raise AssertionError(f"Fourier truncation error {err} > 5*bound at alpha={a}")
    return f"pinned values, quadrature match, truncation ratio <= {worst:.3f} (bar 5)"


def _check_block_partition() -> str:
    x, k = 2**16, 4
    init_hi, blocks = sawtooth.block_partition(x, k)
    cap = counting.integer_kth_root(x // 2, k)
    covered = list(range(1, init_hi + 1))
    for blk in blocks:
        covered.extend(range(blk.m_lo, blk.m_hi + 1))
    if covered != list(range(1, cap + 1)):
        raise AssertionError(f"block partition does not tile 1..{cap}: {covered}")
    dec = sawtooth.cancellation_blocks(x, k)
    regrouped = dec.initial_sum + sum(dec.block_sums, Fraction(0))
    if regrouped != dec.total:
        raise AssertionError("block regrouping changed the exact boundary sum")
    direct = sawtooth.cancellation_sum(x, k)
    from ._serialize import mpf_to_fraction
    if mpf_to_fraction(direct) != dec.total:
        raise AssertionError("decomposed total differs from the direct boundary sum")
    return f"blocks tile 1..{cap} exactly; regrouped sum identical"


def _check_vdc_single() -> str:
    x, k, h = 2**20, 4, 1
    worst = 0.0
    for blk in sawtooth.dyadic_blocks(x, k):
        cfg = sawtooth.ExpSumConfig.for_block(x, k, blk, h)
        bound = sawtooth.vdc_bound(cfg)  # raises on envelope violation
        t = sawtooth.t_sum(cfg)
        ratio = float(abs(t)) / bound.bound
        worst = max(worst, ratio)
        if ratio > 10.0:
            raise AssertionError(f"|T|/bound = {ratio} > 10 at M={blk.M}")
    mu_example = sawtooth.vdc_bound(
        sawtooth.ExpSumConfig.make(2**16, 4, 4.0, 1)).mu
    if abs(mu_example - 3 * 2.0**-8) > 1e-12:
        raise AssertionError(f"mu at (x=2**16, k=4, M=4, h=1) is {mu_example}, want 3*2**-8")
    return f"envelope holds; worst |T|/bound = {worst:.3f} (bar 10); mu example pinned"


def _check_synthetic_fit() -> str:
    for planted in (0.1875, 0.25):
        pts = [(10.0**(1 + 6 * i / 9), 3.7 * (10.0**(1 + 6 * i / 9)) ** planted)
               for i in range(10)]
        fit = residuals.fit_exponent(pts)
        if abs(fit.slope - planted) > 1e-6:
            raise AssertionError(f"planted slope {planted} recovered as {fit.slope}")
    return "planted slopes 0.1875 and 0.25 recovered within 1e-6"


def _check_residual_consistency() -> str:
    inst = Instance(k=4, s=2)
    sc = residuals.scan(inst, 2**10, 2**14, grid="dyadic", precision_bits=128)
    with mp.workprec(128):
        for rec in sc.records:
            lhs = rec.residual_main_only - rec.residual_two
            if abs(lhs + rec.second) > mp.mpf(2) ** -100 * abs(rec.second):
                raise AssertionError(
                    f"residual identity broken at x={rec.x}: {lhs} vs {-rec.second}"
                )
    return f"residual_main - residual_two = -second at {len(sc.records)} records"


def run_quick(precision_bits: int = 128) -> List[CheckResult]:
    """Fast cross-checks of every subsystem (a few seconds)."""
    del precision_bits  # individual checks pin their own precision
    return [
        _run("integer_kth_root contract", _check_root_contract),
        _run("count table pinned examples", _check_table_examples),
        _run("summatory_split_s2 agreement", _check_split_agreement),
        _run("summatory_recursive agreement", _check_recursive_agreement),
        _run("gamma identity suite", _check_gamma_identities),
        _run("s=k coefficient consistency", _check_coefficient_consistency),
        _run("area quadrature vs closed form", _check_area_quadrature),
        _run("sawtooth values and Fourier truncation", _check_sawtooth),
        _run("block partition exactness", _check_block_partition),
        _run("curvature bound single configuration", _check_vdc_single),
        _run("synthetic fit recovery", _check_synthetic_fit),
        _run("residual identity on a small scan", _check_residual_consistency),
    ]


# ----------------------------------------------------------------------
# Full checks
# ----------------------------------------------------------------------

def _check_threeway_extended() -> str:
    x_cap = 2000
    spots = [17, 500, 1717, 2000]
    for k in range(2, 6):
        split_table = counting.split_s2_table(k, x_cap)
        for s in range(2, 6):
            inst = Instance(k=k, s=s)
            direct = counting.summatory_direct_table(inst, x_cap)
            rec = (split_table if s == 2
                   else counting.summatory_recursive_table(inst, x_cap))
            if direct != rec:
                bad = next(y for y in range(x_cap + 1) if direct[y] != rec[y])
                raise AssertionError(
                    f"direct vs recursive tables differ at k={k}, s={s}, "
                    f"x={bad}: {direct[bad]} vs {rec[bad]}"
                )
            for y in spots:
                per_x = counting.summatory_recursive(inst, y)
                if per_x != direct[y]:
                    raise AssertionError(
                        f"per-point recursive differs at k={k}, s={s}, x={y}"
                    )
    return f"all (k, s) in 2..5 x 2..5 agree at every x <= {x_cap}"


def _check_beta_gamma_sweep() -> str:
    bar = mp.mpf(2) ** -120
    worst = mp.mpf(0)
    for k in range(2, 11):
        for s in range(1, k + 2):
            d = asymptotics.beta_gamma_check(k, s, 128).value
            worst = max(worst, d)
            if d >= bar:
                raise AssertionError(f"Beta-Gamma discrepancy {d} at k={k}, s={s}")
    return f"2<=k<=10, 1<=s<=k+1; worst discrepancy {mp.nstr(worst, 3)}"


def _check_residual_scan_s2() -> str:
    inst = Instance(k=4, s=2)
    sc = residuals.scan(inst, 2**10, 2**20, grid="geometric", precision_bits=128)
    slope_main, slope_two = residuals.second_term_benefit(inst, sc)
    if slope_two > 0.30:
        raise AssertionError(
            f"two-term residual slope {slope_two:.4f} above 0.30 at k=4, s=2"
        )
    return (f"windowed slopes to 2**20: two-term {slope_two:.4f} (bar 0.30), "
            f"main-only {slope_main:.4f}")


def _check_cancellation_slope() -> str:
    pts = residuals.grid_points(2**10, 2**20, grid="geometric")
    samples = [(x, abs(float(sawtooth.cancellation_sum(x, 4)))) for x in pts]
    best: dict = {}
    for x, v in samples:
        j = x.bit_length() - 1
        if j not in best or v > best[j][1]:
            best[j] = (x, v)
    wins = [best[j] for j in sorted(best) if best[j][1] > 0]
    fit = residuals.fit_exponent(wins)
    if fit.slope > 0.2875:
        raise AssertionError(f"boundary-sum slope {fit.slope:.4f} above 0.2875")
    return f"windowed boundary-sum slope {fit.slope:.4f} (bar 0.2875)"


def _check_vdc_census() -> str:
    count = 0
    worst = 0.0
    for k in (4, 5, 6):
        for j in range(6, 21):
            x = 2**j
            H = sawtooth.default_H(x, k)
            for blk in sawtooth.dyadic_blocks(x, k):
                for h_abs in range(1, int(H) + 1):
                    for h in (h_abs, -h_abs):
                        cfg = sawtooth.ExpSumConfig.for_block(x, k, blk, h)
                        bnd = sawtooth.vdc_bound(cfg)
                        ratio = float(abs(sawtooth.t_sum(cfg))) / bnd.bound
                        worst = max(worst, ratio)
                        count += 1
                        if ratio > 10.0:
                            raise AssertionError(
                                f"|T|/bound = {ratio} > 10 at k={k}, x=2**{j}, "
                                f"M={blk.M}, h={h}"
                            )
    return f"{count} configurations; worst |T|/bound = {worst:.3f} (bar 10)"


def run_full(precision_bits: int = 128) -> List[CheckResult]:
    """Quick checks plus wide sweeps and a real residual scan (a minute or two)."""
    results = run_quick(precision_bits)
    results.extend([
        _run("three-way agreement (extended)", _check_threeway_extended),
        _run("Beta-Gamma sweep to k=10", _check_beta_gamma_sweep),
        _run("k=4, s=2 residual scan to 2**20", _check_residual_scan_s2),
        _run("boundary-sum slope to 2**20", _check_cancellation_slope),
        _run("curvature bound census", _check_vdc_census),
    ])
    return results


def format_report(results: List[CheckResult]) -> str:
    lines = []
    for r in results:
        lines.append(f"{'PASS' if r.passed else 'FAIL'}  {r.name}: {r.detail}")
    failed = sum(1 for r in results if not r.passed)
    lines.append(f"{len(results) - failed}/{len(results)} checks passed")
    return "\n".join(lines)
