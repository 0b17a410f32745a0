"""Sawtooth functions, their Fourier truncation, dyadic-block exponential
sums with second-derivative bounds, and the boundary cancellation sum.

The fold identity behind the s = 2 counter leaves a boundary correction

    sum over m <= (x/2)**(1/k) of B1((x - m**k)**(1/k)),

where B1 is the centered sawtooth.  Its cancellation is what improves the
error exponent, and it is quantified by expanding B1 in a truncated
Fourier series and estimating the resulting exponential sums

    T(M, h) = sum over integers m in (M, M'] of e(h * (x - m**k)**(1/k))

block-by-block with the second-derivative (curvature) test.  This module
implements each ingredient exactly enough to measure: sawtooth values and
their truncated Fourier series, dyadic block decomposition, high-precision
phase summation, the curvature bound with its envelope check, and the
boundary sum itself with exact detection of perfect k-th powers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import List, NamedTuple, Optional, Tuple, Union

import mpmath as mp
import numpy as np

from ._serialize import mpf_to_fraction
from .counting import integer_kth_root
from .errors import EnvelopeViolationError, PrecisionError

RealLike = Union[int, float, mp.mpf]


# ----------------------------------------------------------------------
# Sawtooth functions
# ----------------------------------------------------------------------

def b1(alpha: RealLike):
    """Centered sawtooth alpha - floor(alpha) - 1/2, in [-1/2, 1/2).

    Periodic with period 1; equals -1/2 at integers (the floor convention
    makes the value left-closed).
    """
    if isinstance(alpha, mp.mpf):
        return alpha - mp.floor(alpha) - mp.mpf(1) / 2
    a = float(alpha)
    return a - math.floor(a) - 0.5


def b2(alpha: RealLike):
    """Antiderivative of b1 that vanishes at 0: ({a}**2 - {a})/2.

    ({a} is the fractional part.)  Periodic with period 1, zero at
    integers, and bounded in [-1/8, 0]; the closed form holds for all real
    arguments, negatives included, and matches direct quadrature of b1.
    """
    if isinstance(alpha, mp.mpf):
        fr = alpha - mp.floor(alpha)
        return (fr * fr - fr) / 2
    a = float(alpha)
    fr = a - math.floor(a)
    return (fr * fr - fr) / 2.0


def distance_to_nearest_integer(alpha: RealLike) -> float:
    """The distance from alpha to the nearest integer, in [0, 1/2]."""
    a = float(alpha)
    fr = a - math.floor(a)
    return min(fr, 1.0 - fr)


@dataclass(frozen=True)
class SawtoothValue:
    """Both sawtooth values at one point."""

    alpha: float
    b1: float
    b2: float


def sawtooth_value(alpha: RealLike) -> SawtoothValue:
    """Evaluate both sawtooth functions at alpha."""
    a = float(alpha)
    return SawtoothValue(alpha=a, b1=float(b1(a)), b2=float(b2(a)))


def b1_fourier_remainder(alpha: RealLike, H: float) -> Tuple[float, float]:
    """Truncated Fourier series of b1 and the guaranteed remainder scale.

    Returns ``(approx, bound)`` where

        approx = - sum_{h=1..floor(H)} sin(2*pi*alpha*h) / (pi*h)

    (the symmetric sum of e(alpha h)/(2*pi*i*h) over 0 < |h| <= H collapses
    to this real series) and ``bound = min(1, 1/(H*dist))`` with ``dist``
    the distance from alpha to the nearest integer; by convention the min
    evaluates to 1 when dist = 0.  |b1(alpha) - approx| is O(bound) with a
    modest constant, which callers estimate empirically.
    """
    if not H >= 2:
        raise ValueError(f"H must be >= 2, got {H!r}")
    a = float(alpha)
    n = int(math.floor(H))
    hs = np.arange(1, n + 1, dtype=np.float64)
    approx = -float(np.sum(np.sin((2.0 * math.pi * a) * hs) / hs)) / math.pi
    dist = distance_to_nearest_integer(a)
    bound = 1.0 if dist == 0.0 else min(1.0, 1.0 / (H * dist))
    return approx, bound


# ----------------------------------------------------------------------
# Dyadic blocks
# ----------------------------------------------------------------------

class Block(NamedTuple):
    """One dyadic block (M, M'] with its exact integer sub-range.

    Integers m with m in (M, M'] are exactly m_lo..m_hi (inclusive); an
    empty integer range has m_lo = m_hi + 1.  Adjacent blocks share
    boundaries, so the integer ranges partition their union exactly.
    """

    M: float
    M_prime: float
    m_lo: int
    m_hi: int


def default_H(x: RealLike, k: int) -> float:
    """Default Fourier truncation height H = x**(3/(2*k**2))."""
    return float(mp.power(mp.mpf(x), mp.mpf(3) / (2 * k * k)))


def default_nu(x: RealLike, k: int) -> float:
    """Default initial-segment boundary nu = x**((k-1)/k**2)."""
    return float(mp.power(mp.mpf(x), mp.mpf(k - 1) / (k * k)))


def admissible_H_exponent_range(k: int) -> Tuple[Fraction, Fraction]:
    """Open interval (1/k**2, (k-2)/k**2) of admissible exponents A for H = x**A."""
    return Fraction(1, k * k), Fraction(k - 2, k * k)


def _is_integral(x: RealLike) -> bool:
    if isinstance(x, int):
        return True
    if isinstance(x, float):
        return x.is_integer()
    if isinstance(x, mp.mpf):
        return mp.isint(x)
    return False


def _cap_int(x: RealLike, k: int) -> int:
    """Exact floor((x/2)**(1/k)): the largest integer m with 2*m**k <= x."""
    if _is_integral(x):
        return integer_kth_root(int(x) // 2, k)
    with mp.workprec(80):
        return int(mp.floor(mp.power(mp.mpf(x) / 2, mp.mpf(1) / k)))


def _cap_float(x: RealLike, k: int) -> float:
    return float(mp.power(mp.mpf(x) / 2, mp.mpf(1) / k))


def block_partition(x: RealLike, k: int,
                    nu: Optional[float] = None) -> Tuple[int, List[Block]]:
    """Initial segment plus dyadic blocks covering (0, (x/2)**(1/k)].

    Returns ``(initial_m_hi, blocks)``: integers m <= initial_m_hi form the
    initial segment below nu, and the blocks are (nu*2**j, min(2*M, cap)]
    with exact, boundary-shared integer sub-ranges; together they
    partition 1..cap with no gap or overlap.  ``nu`` defaults to
    x**((k-1)/k**2).
    """
    if k < 2 or not isinstance(k, int) or isinstance(k, bool):
        raise ValueError(f"k must be an integer >= 2, got {k!r}")
    if not float(x) > 1:
        raise ValueError(f"x must exceed 1, got {x!r}")
    cap_f = _cap_float(x, k)
    cap_i = _cap_int(x, k)
    if nu is None:
        nu = default_nu(x, k)
    nu = float(nu)
    if not 1.0 <= nu:
        raise ValueError(f"nu must be >= 1, got {nu}")
    init_hi = min(math.floor(nu), cap_i)
    blocks: List[Block] = []
    prev = init_hi
    M = nu
    while M <= cap_f:
        Mp = min(2.0 * M, cap_f)
        if Mp > M:
            hi = cap_i if Mp >= cap_f else min(math.floor(Mp), cap_i)
            blocks.append(Block(M=M, M_prime=Mp, m_lo=prev + 1, m_hi=hi))
            prev = hi
        M *= 2.0
    return init_hi, blocks


def dyadic_blocks(x: RealLike, k: int, nu: Optional[float] = None) -> List[Block]:
    """The dyadic block list of :func:`block_partition` (blocks only)."""
    return block_partition(x, k, nu)[1]


# ----------------------------------------------------------------------
# Exponential sums and the curvature bound
# ----------------------------------------------------------------------

@dataclass(frozen=True)
class ExpSumConfig:
    """One exponential-sum configuration: block (M, M'], frequency h.

    ``m_lo..m_hi`` is the exact integer range of the block; ``H`` and
    ``nu`` record the truncation height and initial-segment boundary the
    block was generated under.
    """

    x: RealLike
    k: int
    M: float
    M_prime: float
    h: int
    H: float
    nu: float
    m_lo: int
    m_hi: int

    def __post_init__(self) -> None:
        if self.k < 2:
            raise ValueError(f"k must be >= 2, got {self.k}")
        if not self.M > 0:
            raise ValueError(f"M must be positive, got {self.M}")
        if self.M_prime < self.M:
            raise ValueError(f"M'={self.M_prime} below M={self.M}")
        cap = _cap_float(self.x, self.k)
        if self.M_prime > cap * (1 + 1e-12):
            raise ValueError(f"M'={self.M_prime} beyond (x/2)**(1/k)={cap}")

    @classmethod
    def for_block(cls, x: RealLike, k: int, block: Block, h: int,
                  H: Optional[float] = None,
                  nu: Optional[float] = None) -> "ExpSumConfig":
        """Configuration for one generated block."""
        return cls(x=x, k=k, M=block.M, M_prime=block.M_prime, h=h,
                   H=float(H if H is not None else default_H(x, k)),
                   nu=float(nu if nu is not None else default_nu(x, k)),
                   m_lo=block.m_lo, m_hi=block.m_hi)

    @classmethod
    def make(cls, x: RealLike, k: int, M: float, h: int,
             H: Optional[float] = None,
             nu: Optional[float] = None) -> "ExpSumConfig":
        """Standalone configuration: M' = min(2M, (x/2)**(1/k)) and exact
        integer endpoints derived from M."""
        cap_f = _cap_float(x, k)
        cap_i = _cap_int(x, k)
        Mp = min(2.0 * float(M), cap_f)
        m_lo = math.floor(float(M)) + 1
        m_hi = cap_i if Mp >= cap_f else min(math.floor(Mp), cap_i)
        return cls(x=x, k=k, M=float(M), M_prime=Mp, h=h,
                   H=float(H if H is not None else default_H(x, k)),
                   nu=float(nu if nu is not None else default_nu(x, k)),
                   m_lo=m_lo, m_hi=m_hi)


def _bits_of(x: RealLike) -> int:
    if _is_integral(x):
        return max(1, int(x).bit_length())
    return max(1, int(math.ceil(math.log2(float(x)))))


def working_precision(x: RealLike, k: int, h: int,
                      precision_bits: Optional[int] = None) -> int:
    """Working precision for phases h * (x - m**k)**(1/k), mod-1 safe.

    The adaptive choice ceil(bits(x) * (1 + 1/k)) + bits(h) + 40 keeps the
    phase's absolute error well below 1e-6 after reduction modulo 1.  An
    explicit ``precision_bits`` is honored only if it can still resolve
    the phase to 1e-6; otherwise PrecisionError is raised.
    """
    xb = _bits_of(x)
    hb = max(1, abs(h).bit_length())
    adaptive = math.ceil(xb * (1 + 1 / k)) + hb + 40
    if precision_bits is None:
        return adaptive
    phase_mag_bits = hb + math.ceil(xb / k) + 2
    needed = phase_mag_bits + 24  # 20 bits resolve 1e-6; 4 bits of slack
    if precision_bits < needed:
        raise PrecisionError(
            f"precision_bits={precision_bits} cannot resolve the phase mod 1 "
            f"to 1e-6 (needs >= {needed} bits for x={x}, k={k}, h={h})"
        )
    return precision_bits


def t_sum(cfg: ExpSumConfig, precision_bits: Optional[int] = None) -> mp.mpc:
    """Exponential sum over the block: sum of e(h*(x - m**k)**(1/k)).

    Summation runs over ascending integers m in (M, M']; each phase is
    computed at :func:`working_precision` and reduced modulo 1 before
    exponentiation, so terms stay accurate even when h*(x - m**k)**(1/k)
    is large.  For h = 0 the sum is exactly the integer count of the
    block.  Results are bit-stable at a given precision (fixed order).
    """
    if cfg.h == 0:
        n = max(0, cfg.m_hi - cfg.m_lo + 1)
        return mp.mpc(n, 0)
    W = working_precision(cfg.x, cfg.k, cfg.h, precision_bits)
    integral = _is_integral(cfg.x)
    with mp.workprec(W):
        total = mp.mpc(0)
        inv_k = mp.mpf(1) / cfg.k
        xv = int(cfg.x) if integral else mp.mpf(cfg.x)
        for m in range(cfg.m_lo, cfg.m_hi + 1):
            t = xv - m**cfg.k
            if t < 0:
                raise ValueError(f"m={m} exceeds x**(1/k) in block {cfg}")
            root = mp.power(mp.mpf(t) if integral else t, inv_k)
            phase = cfg.h * root
            frac = phase - mp.floor(phase)
            total += mp.expjpi(2 * frac)
        return +total


@dataclass(frozen=True)
class VdcBound:
    """Curvature-test bound data for one configuration.

    ``mu`` is the proven lower envelope of |f''| on [M, M'] for the phase
    f(a) = h*(x - a**k)**(1/k); ``eta*mu`` is the upper envelope with
    eta = 2**(k - 1/k); ``bound = mu**(-1/2) + (M' - M)*eta*mu**(1/2)``
    dominates |T(M, h)| up to an absolute constant.
    """

    mu: float
    eta: float
    bound: float


def phase_second_derivative(x: RealLike, k: int, h: int, alpha: float) -> float:
    """|f''(alpha)| for f(a) = h*(x - a**k)**(1/k).

    Equals (k-1) * |h| * x * alpha**(k-2) * (x - alpha**k)**(1/k - 2);
    requires alpha**k < x.
    """
    xf = float(x)
    a = float(alpha)
    rem = xf - a**k
    if rem <= 0:
        raise ValueError(f"alpha**k must stay below x, got alpha={alpha}, x={x}")
    return (k - 1) * abs(h) * xf * a ** (k - 2) * rem ** (1.0 / k - 2.0)


def vdc_bound(cfg: ExpSumConfig, grid_points: int = 257,
              envelope_rel_slack: float = 1e-9) -> VdcBound:
    """Curvature-test bound for the block, with an envelope audit.

    Computes mu = (k-1)*|h|*x**(1/k-1)*M**(k-2), eta = 2**(k-1/k) and the
    bound mu**(-1/2) + (M'-M)*eta*mu**(1/2), then samples |f''| on a
    uniform grid over [M, M'] and verifies mu <= |f''| <= eta*mu (an exact
    statement; the tiny relative slack only absorbs float rounding).
    Raises EnvelopeViolationError when a sample escapes the band, which
    would signal an implementation bug.
    """
    if cfg.h == 0:
        raise ValueError("vdc_bound requires h != 0")
    if grid_points < 2:
        raise ValueError(f"grid_points must be >= 2, got {grid_points}")
    xf = float(cfg.x)
    k = cfg.k
    mu = (k - 1) * abs(cfg.h) * xf ** (1.0 / k - 1.0) * cfg.M ** (k - 2)
    eta = 2.0 ** (k - 1.0 / k)
    bound = mu**-0.5 + (cfg.M_prime - cfg.M) * eta * mu**0.5
    lo = mu * (1.0 - envelope_rel_slack)
    hi = eta * mu * (1.0 + envelope_rel_slack)
    for a in np.linspace(cfg.M, cfg.M_prime, grid_points):
        f2 = phase_second_derivative(xf, k, cfg.h, float(a))
        if not lo <= f2 <= hi:
            raise EnvelopeViolationError(
                f"|f''({a})| = {f2} outside [{mu}, {eta * mu}] for {cfg}"
            )
    return VdcBound(mu=mu, eta=eta, bound=bound)


# ----------------------------------------------------------------------
# Boundary cancellation sum
# ----------------------------------------------------------------------

def _b1_term_fractions(x: RealLike, k: int,
                       precision_bits: Optional[int] = None) -> List[Fraction]:
    """Exact dyadic values of B1((x - m**k)**(1/k)) for m = 1..cap.

    Perfect k-th powers are detected with exact integer arithmetic (the
    sawtooth is exactly -1/2 there); all other roots are evaluated at
    :func:`working_precision` bits, and the resulting dyadic values are
    returned as exact rationals so that any regrouping sums identically.
    """
    W = working_precision(x, k, 1, precision_bits)
    cap = _cap_int(x, k)
    integral = _is_integral(x)
    half = Fraction(1, 2)
    out: List[Fraction] = []
    with mp.workprec(W):
        inv_k = mp.mpf(1) / k
        xv = int(x) if integral else mp.mpf(x)
        for m in range(1, cap + 1):
            t = xv - m**k
            if integral:
                r = integer_kth_root(t, k)
                if r**k == t:
                    out.append(Fraction(-1, 2))
                    continue
                root = mp.power(mp.mpf(t), inv_k)
            else:
                root = mp.power(t, inv_k)
            frac = root - mp.floor(root)
            out.append(mpf_to_fraction(frac) - half)
    return out


def cancellation_sum(x: RealLike, k: int,
                     precision_bits: Optional[int] = None) -> mp.mpf:
    """The boundary sawtooth sum: sum over m <= (x/2)**(1/k) of
    B1((x - m**k)**(1/k)).

    Terms at perfect k-th powers are exactly -1/2 (detected by integer
    arithmetic); the rest are evaluated at adaptive precision.  The sum's
    magnitude is expected to grow no faster than about x**((k-1)/k**2)
    for k >= 4; measuring that is the caller's job.
    """
    if not float(x) > 1:
        raise ValueError(f"x must exceed 1, got {x!r}")
    if k < 2:
        raise ValueError(f"k must be >= 2, got {k}")
    terms = _b1_term_fractions(x, k, precision_bits)
    total = sum(terms, Fraction(0))
    W = working_precision(x, k, 1, precision_bits)
    with mp.workprec(W):
        return mp.mpf(total.numerator) / total.denominator


@dataclass(frozen=True)
class CancellationDecomposition:
    """The boundary sum regrouped by initial segment and dyadic blocks.

    All sums are exact rationals over the same per-term values, so
    ``initial_sum + sum(block_sums) == total`` holds exactly.
    """

    x: RealLike
    k: int
    nu: float
    initial_m_hi: int
    blocks: List[Block]
    initial_sum: Fraction
    block_sums: List[Fraction]
    total: Fraction


def cancellation_blocks(x: RealLike, k: int, nu: Optional[float] = None,
                        precision_bits: Optional[int] = None) -> CancellationDecomposition:
    """Group the boundary sum's terms by the dyadic block partition.

    Uses the identical per-term values as :func:`cancellation_sum`, so the
    regrouped total matches it exactly (same rationals, different order).
    """
    init_hi, blocks = block_partition(x, k, nu)
    terms = _b1_term_fractions(x, k, precision_bits)
    initial_sum = sum(terms[:init_hi], Fraction(0))
    block_sums: List[Fraction] = []
    for blk in blocks:
        block_sums.append(sum(terms[blk.m_lo - 1 : blk.m_hi], Fraction(0)))
    total = sum(terms, Fraction(0))
    return CancellationDecomposition(
        x=x, k=k,
        nu=float(nu) if nu is not None else default_nu(x, k),
        initial_m_hi=init_hi, blocks=blocks,
        initial_sum=initial_sum, block_sums=block_sums, total=total,
    )
