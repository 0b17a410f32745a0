"""High-precision two-term asymptotic for power-sum counts, and its identities.

The count S_{k,s}(x) of s-tuples of positive integers with k-th powers
summing to at most x satisfies, for k >= 4 and 2 <= s <= k+1,

    S_{k,s}(x) = c1 * x**(s/k) - c2 * x**((s-1)/k) + error,

with Gamma-function coefficients

    c1 = Gamma((k+1)/k)**s / Gamma((k+s)/k)
    c2 = (s/2) * Gamma((k+1)/k)**(s-1) / Gamma((k+s-1)/k)

and an error term whose predicted growth exponent is ((s-1)k - 1)/k**2.
This module evaluates the two terms at configurable precision and provides
the consistency checks (Beta-Gamma identity, quadrature of the underlying
area integral, monotonicity of the integrand used in the derivation) that
keep the Gamma evaluations honest.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from fractions import Fraction
from numbers import Real
from typing import Union

import mpmath as mp
import numpy as np

from .errors import QuadratureError
from .instance import Instance

#: Guard bits used internally; results are correct to within
#: 2**(-precision_bits + g) relative error with g <= 8.
GUARD_BITS = 8

_ENV_PRECISION = "POWERSUM_PRECISION_BITS"
_FALLBACK_PRECISION = 128

RealLike = Union[int, float, Fraction, mp.mpf]


def default_precision_bits() -> int:
    """Default precision in bits: $POWERSUM_PRECISION_BITS or 128."""
    raw = os.environ.get(_ENV_PRECISION)
    if raw is None:
        return _FALLBACK_PRECISION
    try:
        bits = int(raw)
    except ValueError as exc:
        raise ValueError(f"{_ENV_PRECISION} must be an integer, got {raw!r}") from exc
    if bits < 53:
        raise ValueError(f"{_ENV_PRECISION} must be >= 53, got {bits}")
    return bits


def _resolve(precision_bits: int | None) -> int:
    if precision_bits is None:
        return default_precision_bits()
    if not isinstance(precision_bits, int) or isinstance(precision_bits, bool):
        raise ValueError(f"precision_bits must be an integer, got {precision_bits!r}")
    if precision_bits < 53:
        raise ValueError(f"precision_bits must be >= 53, got {precision_bits}")
    return precision_bits


def to_mpf_exact(value: RealLike) -> mp.mpf:
    """Convert to mpf at the current working precision.

    Fractions are converted by exact integer division at working precision;
    ints and floats are exact by construction.
    """
    if isinstance(value, Fraction):
        return mp.mpf(value.numerator) / value.denominator
    if isinstance(value, (int, float, mp.mpf)):
        return mp.mpf(value)
    if isinstance(value, Real):
        return mp.mpf(float(value))
    raise ValueError(f"cannot convert {value!r} to a high-precision real")


@dataclass(frozen=True)
class PrecReal:
    """A real value tagged with the precision (bits) it was computed at.

    The producing operation guarantees relative error at most
    2**(-precision_bits + g) with guard g <= 8.
    """

    value: mp.mpf
    precision_bits: int

    def __float__(self) -> float:
        return float(self.value)


@dataclass(frozen=True)
class AsymptoticEstimate:
    """The evaluated two-term asymptotic at one point x.

    ``two_term_value`` = ``main_term`` - ``second_term`` (the second-order
    term enters with a minus sign; ``second_term`` is its positive
    magnitude).  ``predicted_error_exponent`` is the exact rational
    ((s-1)k - 1)/k**2.
    """

    main_term: PrecReal
    second_term: PrecReal
    two_term_value: PrecReal
    predicted_error_exponent: Fraction


def _round_to(v: mp.mpf, prec: int) -> mp.mpf:
    with mp.workprec(prec):
        return +v


def gamma_hp(a: RealLike, precision_bits: int | None = None) -> PrecReal:
    """Gamma(a) for a > 0 at the requested precision."""
    prec = _resolve(precision_bits)
    with mp.workprec(prec + GUARD_BITS):
        av = to_mpf_exact(a)
        if av <= 0:
            raise ValueError(f"gamma_hp is defined for positive arguments, got {a!r}")
        v = mp.gamma(av)
    return PrecReal(_round_to(v, prec), prec)


def main_coeff(inst: Instance, precision_bits: int | None = None) -> PrecReal:
    """Leading coefficient Gamma((k+1)/k)**s / Gamma((k+s)/k).

    Defined for every k >= 2, s >= 1; ``inst.theorem_valid`` tells whether
    (k, s) is inside the proven range of the two-term expansion.
    """
    prec = _resolve(precision_bits)
    k, s = inst.k, inst.s
    with mp.workprec(prec + GUARD_BITS):
        num = mp.gamma(to_mpf_exact(Fraction(k + 1, k))) ** s
        den = mp.gamma(to_mpf_exact(Fraction(k + s, k)))
        v = num / den
    return PrecReal(_round_to(v, prec), prec)


def second_coeff(inst: Instance, precision_bits: int | None = None) -> PrecReal:
    """Second-order coefficient (s/2) * Gamma((k+1)/k)**(s-1) / Gamma((k+s-1)/k).

    Returned as a positive magnitude; ``two_term`` applies it with a minus
    sign.  Requires s >= 2.
    """
    if inst.s < 2:
        raise ValueError(f"second_coeff requires s >= 2, got s={inst.s}")
    prec = _resolve(precision_bits)
    k, s = inst.k, inst.s
    with mp.workprec(prec + GUARD_BITS):
        num = mp.gamma(to_mpf_exact(Fraction(k + 1, k))) ** (s - 1)
        den = mp.gamma(to_mpf_exact(Fraction(k + s - 1, k)))
        v = mp.mpf(s) / 2 * num / den
    return PrecReal(_round_to(v, prec), prec)


def two_term(inst: Instance, x: RealLike,
             precision_bits: int | None = None) -> AsymptoticEstimate:
    """Evaluate c1*x**(s/k) - c2*x**((s-1)/k) at x > 0.

    The powers are computed as exp(q * log x) with the exact rational
    exponent q converted at working precision, avoiding compounded
    root-then-power rounding.  Requires s >= 2 (the second term needs it).
    """
    if inst.s < 2:
        raise ValueError(f"two_term requires s >= 2, got s={inst.s}")
    prec = _resolve(precision_bits)
    k, s = inst.k, inst.s
    with mp.workprec(prec + GUARD_BITS):
        xv = to_mpf_exact(x)
        if xv <= 0:
            raise ValueError(f"x must be positive, got {x!r}")
        g_top = mp.gamma(to_mpf_exact(Fraction(k + 1, k)))
        c1 = g_top**s / mp.gamma(to_mpf_exact(Fraction(k + s, k)))
        c2 = mp.mpf(s) / 2 * g_top ** (s - 1) / mp.gamma(to_mpf_exact(Fraction(k + s - 1, k)))
        lx = mp.log(xv)
        main = c1 * mp.exp(to_mpf_exact(Fraction(s, k)) * lx)
        second = c2 * mp.exp(to_mpf_exact(Fraction(s - 1, k)) * lx)
        diff = main - second
    return AsymptoticEstimate(
        main_term=PrecReal(_round_to(main, prec), prec),
        second_term=PrecReal(_round_to(second, prec), prec),
        two_term_value=PrecReal(_round_to(diff, prec), prec),
        predicted_error_exponent=inst.predicted_error_exponent,
    )


def beta_gamma_check(k: int, s: int, precision_bits: int | None = None) -> PrecReal:
    """Absolute discrepancy of the Beta-Gamma reduction used by the peel step.

    Evaluates |(1/k) * B(1/k, s/k + 1) - Gamma((k+1)/k) * Gamma((k+s)/k) /
    Gamma((k+s+1)/k)| with B(a, b) = Gamma(a)Gamma(b)/Gamma(a+b).  The two
    sides hit Gamma at different arguments, so a correct Gamma makes the
    discrepancy vanish to the precision contract while a broken one does not.
    """
    if k < 2 or s < 1:
        raise ValueError(f"beta_gamma_check requires k >= 2, s >= 1, got k={k}, s={s}")
    prec = _resolve(precision_bits)
    with mp.workprec(prec + GUARD_BITS):
        a = to_mpf_exact(Fraction(1, k))
        b = to_mpf_exact(Fraction(s, k)) + 1
        lhs = mp.gamma(a) * mp.gamma(b) / mp.gamma(a + b) / k
        rhs = (mp.gamma(to_mpf_exact(Fraction(k + 1, k)))
               * mp.gamma(to_mpf_exact(Fraction(k + s, k)))
               / mp.gamma(to_mpf_exact(Fraction(k + s + 1, k))))
        d = abs(lhs - rhs)
    return PrecReal(_round_to(d, prec), prec)


def area_closed_form_s2(k: int, x: RealLike,
                        precision_bits: int | None = None) -> PrecReal:
    """Closed form (1/k) * B(1/k, 1/k + 1) * x**(2/k) of the s=2 area integral."""
    prec = _resolve(precision_bits)
    with mp.workprec(prec + GUARD_BITS):
        xv = to_mpf_exact(x)
        if xv <= 0:
            raise ValueError(f"x must be positive, got {x!r}")
        a = to_mpf_exact(Fraction(1, k))
        b = a + 1
        coeff = mp.gamma(a) * mp.gamma(b) / mp.gamma(a + b) / k
        v = coeff * mp.exp(to_mpf_exact(Fraction(2, k)) * mp.log(xv))
    return PrecReal(_round_to(v, prec), prec)


def area_quadrature_s2(k: int, x: RealLike, precision_bits: int | None = None,
                       rel_tol: float = 1e-14) -> PrecReal:
    """Numerical value of integral_0^(x**(1/k)) (x - a**k)**(1/k) da.

    Substituting a = x**(1/k) * t reduces it to x**(2/k) times
    integral_0^1 (1 - t**k)**(1/k) dt, which tanh-sinh quadrature handles
    cleanly despite the infinite derivative at t = 1.  Raises
    QuadratureError when the quadrature's own error estimate exceeds
    ``rel_tol`` relative to the value.
    """
    prec = _resolve(precision_bits)
    if k < 2:
        raise ValueError(f"k must be >= 2, got {k}")
    with mp.workprec(max(prec + GUARD_BITS, 80)):
        xv = to_mpf_exact(x)
        if xv <= 0:
            raise ValueError(f"x must be positive, got {x!r}")
        inv_k = to_mpf_exact(Fraction(1, k))

        def f(t):
            return (1 - t**k) ** inv_k

        val, err = mp.quad(f, [0, 1], error=True)
        scale = mp.exp(to_mpf_exact(Fraction(2, k)) * mp.log(xv))
        total = scale * val
        if err > rel_tol * abs(val):
            raise QuadratureError(
                f"quadrature error estimate {mp.nstr(err, 6)} exceeds "
                f"relative tolerance {rel_tol}",
                achieved_error=float(err),
            )
    return PrecReal(_round_to(total, prec), prec)


def integrand_monotone_check(k: int, s: int, x: RealLike,
                             grid_points: int = 1000) -> bool:
    """Check s * a**(k-1) * (x - a**k)**(s/k - 1) is nondecreasing on [0, eta].

    eta = (x - x**((k-1)/k))**(1/k).  The derivative's sign equals the sign
    of the bracket (k-1)*x + (1-s)*a**k (the remaining factors are
    positive on (0, eta)), so the check samples that bracket on a uniform
    grid.  True is guaranteed for 2 <= s <= k; for s >= k+1 the bracket
    can flip sign below eta, and the function reports that honestly.
    """
    if k < 2 or s < 2:
        raise ValueError(f"requires k >= 2 and s >= 2, got k={k}, s={s}")
    if grid_points < 2:
        raise ValueError(f"grid_points must be >= 2, got {grid_points}")
    xf = float(x)
    if xf <= 1:
        raise ValueError(f"x must exceed 1, got {x!r}")
    eta = (xf - xf ** ((k - 1) / k)) ** (1.0 / k)
    alpha = np.linspace(0.0, eta, grid_points)
    bracket = (k - 1) * xf + (1 - s) * alpha**k
    return bool((bracket >= 0).all())
