"""NumPy-based fallback kernels.

Mirrors the compiled extension ``powersum._core``; selected by
``powersum._kernels`` when the extension is unavailable or when
``POWERSUM_PURE_PYTHON=1`` is set.

All kernels operate on int64 arrays.  Callers are responsible for the
overflow gating documented in :mod:`powersum.counting`: values passed to
``floor_roots_batch`` must stay below 2**60 and table entries below 2**61
so that no intermediate wraps.
"""

from __future__ import annotations

import numpy as np

BACKEND_NAME = "python"

# Above this, float seeding of k-th roots is not trusted and callers must
# use exact big-integer arithmetic instead.
MAX_BATCH_ROOT_VALUE = 1 << 60


def accumulate_shifted_range(dest, src, powers, lo: int, hi: int) -> None:
    """dest[i] += src[i - p] for every power p and every i in [lo, hi).

    ``dest`` and ``src`` have equal length; only dest[lo:hi] is written,
    so disjoint [lo, hi) chunks may be processed concurrently.
    """
    for p in powers:
        p = int(p)
        if p >= hi:
            break
        a = lo if lo > p else p
        dest[a:hi] += src[a - p : hi - p]


def floor_roots_batch(vals, k: int):
    """Exact floor k-th roots of an int64 array of nonnegative values.

    Float-seeded, then corrected with exact integer comparisons, so the
    result is exact for every element (given the MAX_BATCH_ROOT_VALUE gate).
    """
    v = np.asarray(vals, dtype=np.int64)
    if v.size == 0:
        return np.zeros(0, dtype=np.int64)
    if int(v.max(initial=0)) >= MAX_BATCH_ROOT_VALUE:
        raise ValueError("values too large for the batched root kernel")
    if int(v.min(initial=0)) < 0:
        raise ValueError("negative value in root batch")
    r = np.power(v.astype(np.float64), 1.0 / k).astype(np.int64)
    # The float seed is within a couple of units of the truth; nudge down
    # first, then correct upward exactly.
    r = np.maximum(r - 2, 0)
    for _ in range(64):
        low = (r + 1) ** k <= v
        if not low.any():
            break
        r[low] += 1
    else:  # pragma: no cover - float pow would have to be absurdly wrong
        raise AssertionError("root correction did not converge")
    high = r**k > v
    while high.any():  # pragma: no cover - seed already nudged below truth
        r[high] -= 1
        high = r**k > v
    return r


def split_sum_batch(x: int, k: int, R: int) -> int:
    """Sum of floor((x - m**k)**(1/k)) over m = 1..R, exactly."""
    if R <= 0:
        return 0
    m = np.arange(1, R + 1, dtype=np.int64)
    return int(floor_roots_batch(x - m**k, k).sum())
