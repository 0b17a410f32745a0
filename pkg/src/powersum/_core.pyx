# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled hot kernels: shift-accumulate table layers and batched floor roots.

Semantics match powersum._core_py exactly; powersum._kernels picks one of
the two at import time.  Intermediate powers are computed in 128-bit
integers so the int64 gating documented in powersum.counting is honored
with room to spare.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport pow as cpow, sqrt as csqrt

ctypedef long long i64

cdef extern from *:
    ctypedef long long i128 "__int128"

BACKEND_NAME = "cython"

MAX_BATCH_ROOT_VALUE = 1 << 60


cdef inline bint _pow_gt(i64 r, int k, i64 v) nogil:
    """True iff r**k > v, overflow-safe for r**k up to ~2**120."""
    cdef i128 acc = 1
    cdef int i
    for i in range(k):
        acc *= r
        if acc > <i128> v:
            return True
    return acc > <i128> v


cdef inline double _root_seed(double v, int k) nogil:
    # Hardware square roots beat libm pow for the power-of-two k that
    # dominate this package's workloads.
    if k == 2:
        return csqrt(v)
    if k == 4:
        return csqrt(csqrt(v))
    if k == 8:
        return csqrt(csqrt(csqrt(v)))
    return cpow(v, 1.0 / k)


cdef inline i64 _floor_root(i64 v, int k) nogil:
    # The float seed is within a couple of units of the truth; correct it
    # with exact integer comparisons, downward first.
    cdef i64 r = <i64> _root_seed(<double> v, k)
    if r < 0:
        r = 0
    while r > 0 and _pow_gt(r, k, v):
        r -= 1
    while not _pow_gt(r + 1, k, v):
        r += 1
    return r


def accumulate_shifted_range(i64[::1] dest, i64[::1] src, i64[::1] powers,
                             Py_ssize_t lo, Py_ssize_t hi):
    """dest[i] += src[i - p] for each power p and each i in [lo, hi)."""
    cdef Py_ssize_t i, j, a
    cdef i64 p
    with nogil:
        for j in range(powers.shape[0]):
            p = powers[j]
            if p >= hi:
                break
            a = lo if lo > p else <Py_ssize_t> p
            for i in range(a, hi):
                dest[i] += src[i - p]


def floor_roots_batch(vals, int k):
    """Exact floor k-th roots of an int64 array of nonnegative values."""
    v_arr = np.ascontiguousarray(vals, dtype=np.int64)
    out_arr = np.empty(v_arr.shape[0], dtype=np.int64)
    cdef i64[::1] v = v_arr
    cdef i64[::1] out = out_arr
    cdef Py_ssize_t i, n = v.shape[0]
    cdef i64 bound = MAX_BATCH_ROOT_VALUE
    for i in range(n):
        if v[i] < 0:
            raise ValueError("negative value in root batch")
        if v[i] >= bound:
            raise ValueError("values too large for the batched root kernel")
    with nogil:
        for i in range(n):
            out[i] = _floor_root(v[i], k)
    return out_arr


def split_sum_batch(i64 x, int k, i64 R):
    """Sum of floor((x - m**k)**(1/k)) over m = 1..R, exactly.

    The radicand x - m**k shrinks as m grows, so its floor root is
    non-increasing: one seeded root is carried forward and stepped down,
    amortized O(1) exact corrections per term instead of a fresh root.
    """
    cdef i64 m, t, r = -1, total = 0
    cdef i128 p
    cdef int i
    if R <= 0:
        return 0
    if x - 1 >= MAX_BATCH_ROOT_VALUE:
        raise ValueError("values too large for the batched root kernel")
    with nogil:
        for m in range(1, R + 1):
            p = 1
            for i in range(k):
                p *= m
            t = x - <i64> p
            if t < 0:
                raise ValueError("m**k exceeds x in split kernel")
            if r < 0:
                r = _floor_root(t, k)
            else:
                while r > 0 and _pow_gt(r, k, t):
                    r -= 1
            total += r
    return int(total)
