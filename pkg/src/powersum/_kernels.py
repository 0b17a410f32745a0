"""Kernel backend selection.

Imports the compiled extension ``powersum._core`` when it is available and
``POWERSUM_PURE_PYTHON`` is not set to ``1``; otherwise falls back to the
NumPy implementation in ``powersum._core_py``.  Both expose the same
functions with identical exact semantics:

* ``accumulate_shifted_range(dest, src, powers, lo, hi)``
* ``floor_roots_batch(vals, k)``
* ``split_sum_batch(x, k, R)``

``BACKEND`` names the selected implementation ("cython" or "python").
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor

from . import _core_py

if os.environ.get("POWERSUM_PURE_PYTHON") == "1":
    _impl = _core_py
else:
    try:
        from . import _core as _impl  # type: ignore[no-redef]
    except ImportError:
        _impl = _core_py

BACKEND: str = _impl.BACKEND_NAME
MAX_BATCH_ROOT_VALUE: int = _impl.MAX_BATCH_ROOT_VALUE

accumulate_shifted_range = _impl.accumulate_shifted_range
floor_roots_batch = _impl.floor_roots_batch
split_sum_batch = _impl.split_sum_batch

_CHUNK = 1 << 16


def accumulate_layer(dest, src, powers, workers: int = 0) -> None:
    """One full shift-accumulate layer over the whole table.

    Processes the destination in cache-sized chunks; chunks are disjoint,
    so with ``workers > 1`` they are dispatched to a thread pool.  Results
    are exact integer additions in either mode, so the outcome is
    identical regardless of ``workers``.
    """
    n = len(dest)
    spans = [(lo, min(lo + _CHUNK, n)) for lo in range(0, n, _CHUNK)]
    if workers and workers > 1 and len(spans) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            futures = [
                pool.submit(accumulate_shifted_range, dest, src, powers, lo, hi)
                for lo, hi in spans
            ]
            for f in futures:
                f.result()
    else:
        for lo, hi in spans:
            accumulate_shifted_range(dest, src, powers, lo, hi)
