"""Residual measurement: exact counts vs the two-term asymptotic, and
log-log exponent fits on dyadic-window suprema.

The residual of an oscillating error term passes through zero, so fitting
log|residual| at raw sample points is meaningless near the crossings.
The pipeline here therefore samples the range on a grid, takes the
supremum of |residual| inside each dyadic window [2**j, 2**(j+1)), and
fits the growth exponent on those window suprema.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import List, Literal, Optional, Sequence, Tuple

import mpmath as mp

from .asymptotics import two_term, _resolve
from .counting import summatory_direct, summatory_recursive, summatory_split_s2
from .errors import DegenerateFitError, OracleMismatchError
from .instance import Instance

logger = logging.getLogger("powersum.residuals")

#: Geometric grids default to 4 samples per octave; denser grids raise the
#: window suprema of the fast-oscillating residual faster than those of
#: the slowly varying one and are configurable for exactly that study.
DEFAULT_GEOMETRIC_RATIO = 2.0 ** 0.25


@dataclass(frozen=True)
class ScanRecord:
    """Exact count and asymptotic values at one cutoff x.

    ``residual_two`` = exact - (main - second); ``residual_main_only`` =
    exact - main.  Signed, at the scan's precision.
    """

    x: int
    exact: int
    main: mp.mpf
    second: mp.mpf
    two_term: mp.mpf
    residual_two: mp.mpf
    residual_main_only: mp.mpf


@dataclass(frozen=True)
class ResidualScan:
    """All records of one scan, ascending in x."""

    instance: Instance
    precision_bits: int
    grid: str
    records: List[ScanRecord]
    exploratory: bool = False


@dataclass(frozen=True)
class ExponentFit:
    """Least-squares slope of log(sup) against log(x)."""

    slope: float
    intercept: float
    points_used: int
    max_abs_residual_of_fit: float


def grid_points(x_min: int, x_max: int, grid: str = "dyadic",
                ratio: float = DEFAULT_GEOMETRIC_RATIO) -> List[int]:
    """Integer sample points in [x_min, x_max] on the requested grid.

    ``dyadic``: the powers of two inside the range.  ``geometric``: rounded
    x_min * ratio**i, deduplicated, with x_max always included.
    """
    if not 2 <= x_min < x_max:
        raise ValueError(f"need 2 <= x_min < x_max, got {x_min}, {x_max}")
    if grid == "dyadic":
        lo = x_min.bit_length() - (1 if x_min & (x_min - 1) == 0 else 0)
        pts = [1 << j for j in range(lo, x_max.bit_length())]
        return [p for p in pts if x_min <= p <= x_max]
    if grid == "geometric":
        if not ratio > 1.0:
            raise ValueError(f"ratio must exceed 1, got {ratio}")
        pts = set()
        lx = math.log2(x_min)
        step = math.log2(ratio)
        i = 0
        while True:
            v = round(2.0 ** (lx + i * step))
            if v > x_max:
                break
            if v >= x_min:
                pts.add(int(v))
            i += 1
        pts.add(x_max)
        return sorted(pts)
    raise ValueError(f"unknown grid {grid!r}")


def _exact_value(inst: Instance, x: int) -> int:
    """Fastest exact counter for the instance: the s=2 fold, else the peel."""
    if inst.s == 2:
        return summatory_split_s2(inst.k, x)
    return summatory_recursive(inst, x)


def scan(inst: Instance, x_min: int, x_max: int, *, grid: str = "dyadic",
         ratio: float = DEFAULT_GEOMETRIC_RATIO,
         precision_bits: Optional[int] = None,
         audit: bool = True) -> ResidualScan:
    """Evaluate exact counts and the two-term asymptotic across a grid.

    Exact values use the fastest counter (fold for s = 2, peel otherwise)
    and are spot-audited against the direct (root-free) counter at the two
    smallest grid points, so a broken fast path cannot produce a quiet
    scan.  Records are in ascending x.  Outside the proven (k, s) range
    the scan is flagged exploratory.
    """
    prec = _resolve(precision_bits)
    pts = grid_points(x_min, x_max, grid=grid, ratio=ratio)
    if inst.s < 2:
        raise ValueError(f"scan requires s >= 2, got s={inst.s}")
    records: List[ScanRecord] = []
    audit_points = set(pts[:2]) if audit else set()
    for x in pts:
        exact = _exact_value(inst, x)
        if x in audit_points:
            direct = summatory_direct(inst, x)
            if direct != exact:
                raise OracleMismatchError(
                    f"audit failed at x={x} for k={inst.k}, s={inst.s}: "
                    f"direct={direct}, fast={exact}"
                )
        est = two_term(inst, x, prec)
        with mp.workprec(prec):
            exact_mpf = mp.mpf(exact)
            residual_two = exact_mpf - est.two_term_value.value
            residual_main = exact_mpf - est.main_term.value
        records.append(ScanRecord(
            x=x, exact=exact,
            main=est.main_term.value,
            second=est.second_term.value,
            two_term=est.two_term_value.value,
            residual_two=residual_two,
            residual_main_only=residual_main,
        ))
    grid_desc = grid if grid == "dyadic" else f"geometric(ratio={ratio:.6g})"
    return ResidualScan(instance=inst, precision_bits=prec, grid=grid_desc,
                        records=records, exploratory=not inst.theorem_valid)


def probe_beyond_theorem(k: int, s: int, x_max: int, *, x_min: int = 1024,
                         grid: str = "dyadic",
                         ratio: float = DEFAULT_GEOMETRIC_RATIO,
                         precision_bits: Optional[int] = None) -> ResidualScan:
    """Run the scan pipeline outside the proven range (s >= k + 2).

    For s up to k + 1 the ordinary :func:`scan` applies and this function
    refuses; beyond it the two-term expansion carries no guarantee, so the
    resulting scan is always flagged exploratory and no invariant is
    asserted about its slopes.
    """
    if s < k + 2:
        raise ValueError(
            f"probe_beyond_theorem requires s >= k + 2, got k={k}, s={s}; "
            "use scan for instances inside or at the edge of the proven range"
        )
    inst = Instance(k=k, s=s)
    result = scan(inst, x_min, x_max, grid=grid, ratio=ratio,
                  precision_bits=precision_bits)
    return ResidualScan(instance=result.instance,
                        precision_bits=result.precision_bits,
                        grid=result.grid, records=result.records,
                        exploratory=True)


def window_sup(scan_result: ResidualScan,
               which: Literal["two_term", "main_only"] = "two_term",
               ) -> List[Tuple[int, float]]:
    """Supremum of |residual| per dyadic window [2**j, 2**(j+1)).

    Returns (x, sup) per nonempty window, where x is the sample attaining
    the supremum; windows whose supremum is exactly zero are dropped (and
    logged), since they carry no growth information on a log scale.
    """
    if len(scan_result.records) < 4:
        raise ValueError("window_sup needs a scan with at least 4 records")
    field_name = "residual_two" if which == "two_term" else "residual_main_only"
    if which not in ("two_term", "main_only"):
        raise ValueError(f"unknown residual kind {which!r}")
    best: dict = {}
    for rec in scan_result.records:
        j = rec.x.bit_length() - 1
        v = abs(float(getattr(rec, field_name)))
        if j not in best or v > best[j][1]:
            best[j] = (rec.x, v)
    out: List[Tuple[int, float]] = []
    for j in sorted(best):
        x, v = best[j]
        if v == 0.0:
            logger.info("window 2**%d dropped: zero residual supremum", j)
            continue
        out.append((x, v))
    return out


def fit_exponent(points: Sequence[Tuple[float, float]]) -> ExponentFit:
    """Least-squares slope of log(sup) vs log(x) over (x, sup) points.

    Requires at least 4 points, positive sups, and non-identical x values;
    otherwise DegenerateFitError.
    """
    if len(points) < 4:
        raise DegenerateFitError(f"need >= 4 points, got {len(points)}")
    xs = [float(x) for x, _ in points]
    sups = [float(s) for _, s in points]
    if any(s <= 0 for s in sups):
        raise DegenerateFitError("all suprema must be positive")
    if any(x <= 0 for x in xs):
        raise DegenerateFitError("all x must be positive")
    lx = [math.log(x) for x in xs]
    ly = [math.log(s) for s in sups]
    n = len(lx)
    mean_x = sum(lx) / n
    mean_y = sum(ly) / n
    sxx = sum((a - mean_x) ** 2 for a in lx)
    if sxx == 0.0:
        raise DegenerateFitError("all x coincide; slope undefined")
    sxy = sum((a - mean_x) * (b - mean_y) for a, b in zip(lx, ly))
    slope = sxy / sxx
    intercept = mean_y - slope * mean_x
    max_resid = max(abs(b - (intercept + slope * a)) for a, b in zip(lx, ly))
    return ExponentFit(slope=slope, intercept=intercept, points_used=n,
                       max_abs_residual_of_fit=max_resid)


def second_term_benefit(inst: Instance,
                        scan_result: ResidualScan) -> Tuple[float, float]:
    """Fitted (slope_main_only, slope_two_term) on window suprema.

    The second-order term is predicted to lower the growth exponent from
    (s-1)/k to ((s-1)k - 1)/k**2, so slope_two_term is expected to come
    out strictly smaller.
    """
    fit_main = fit_exponent(window_sup(scan_result, "main_only"))
    fit_two = fit_exponent(window_sup(scan_result, "two_term"))
    return fit_main.slope, fit_two.slope
