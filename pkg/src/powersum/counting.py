"""Exact counting of representations as sums of k-th powers.

Three independent algorithms compute the partial-sum count

    S_{k,s}(x) = #{(v_1, ..., v_s) : v_i >= 1 integer, v_1**k + ... + v_s**k <= x}
               = sum over m <= x of r_{k,s}(m),

where r_{k,s}(m) counts ordered s-tuples of positive integers whose k-th
powers sum to m:

* ``summatory_direct`` — table route (s-fold additive convolution of the
  indicator of positive k-th powers, then a cumulative sum) or literal
  tuple enumeration.  Neither route extracts roots: powers are enumerated
  by incrementing the base.
* ``summatory_split_s2`` — for s = 2, folds the count across the diagonal:
  2 * sum_{m <= (x/2)^(1/k)} floor((x - m**k)**(1/k)) minus the square of
  floor((x/2)**(1/k)).  Built on exact integer root extraction.
* ``summatory_recursive`` — peels one coordinate at a time,
  S_{k,s}(x) = sum over l**k <= x of S_{k,s-1}(x - l**k), bottoming out at
  the s = 2 split counter.

All arithmetic is exact (Python integers); compiled/NumPy int64 kernels
are used only in ranges proven not to overflow.
"""

from __future__ import annotations

from bisect import bisect_right
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import List, Sequence, Union

import numpy as np

from . import _kernels
from .errors import ResourceLimitError
from .instance import Instance

#: Default memory budget for count tables (bytes).  Two int64 layers at
#: x ~ 1.3e8 fit; anything larger raises ResourceLimitError unless the
#: caller passes a bigger budget.
DEFAULT_MEMORY_BUDGET_BYTES = 2 << 30


def integer_kth_root(n: int, k: int) -> int:
    """Exact floor(n**(1/k)) for n >= 0, k >= 1, by integer arithmetic only.

    Returns the unique r with r**k <= n < (r+1)**k.  Small inputs are
    float-seeded and corrected exactly; large inputs use integer Newton
    iteration followed by the same exact correction, so the result never
    depends on floating-point rounding.
    """
    if not isinstance(n, int) or isinstance(n, bool):
        raise ValueError(f"n must be an integer, got {n!r}")
    if not isinstance(k, int) or isinstance(k, bool):
        raise ValueError(f"k must be an integer, got {k!r}")
    if n < 0:
        raise ValueError(f"n must be nonnegative, got {n}")
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    if k == 1 or n < 2:
        return n
    if n.bit_length() <= 52:
        r = int(n ** (1.0 / k))
    else:
        # Integer Newton iteration: strictly decreasing once above the root.
        r = 1 << -(-n.bit_length() // k)  # 2**ceil(bits/k) >= true root
        while True:
            d = r ** (k - 1)
            nxt = ((k - 1) * r + n // d) // k
            if nxt >= r:
                break
            r = nxt
    while r > 0 and r**k > n:
        r -= 1
    while (r + 1) ** k <= n:
        r += 1
    return r


def powers_upto(x: int, k: int) -> List[int]:
    """All positive k-th powers <= x, ascending, by base enumeration.

    Deliberately root-free: the list is produced by incrementing the base,
    so routines built on it are independent of ``integer_kth_root``.
    """
    out: List[int] = []
    base = 1
    while True:
        p = base**k
        if p > x:
            return out
        out.append(p)
        base += 1


@dataclass
class CountTable:
    """Dense table of representation counts r_{k,s}(m) for 1 <= m <= limit.

    ``counts[m]`` is r_{k,s}(m); index 0 is unused and zero.  The backing
    store is an int64 NumPy array when the values provably fit, otherwise a
    list of Python integers.
    """

    instance: Instance
    limit: int
    counts: Union[np.ndarray, List[int]]

    def count(self, m: int) -> int:
        """r_{k,s}(m) for 0 <= m <= limit."""
        if not 0 <= m <= self.limit:
            raise ValueError(f"m={m} outside table range [0, {self.limit}]")
        return int(self.counts[m])

    def summatory_table(self) -> List[int]:
        """Partial sums: entry y is S_{k,s}(y), for 0 <= y <= limit."""
        if isinstance(self.counts, np.ndarray):
            return [int(v) for v in np.cumsum(self.counts)]
        out: List[int] = []
        acc = 0
        for v in self.counts:
            acc += v
            out.append(acc)
        return out

    def total(self) -> int:
        """S_{k,s}(limit): the sum of all table entries."""
        if isinstance(self.counts, np.ndarray):
            return int(self.counts.sum())
        return sum(self.counts)


def _int64_safe(num_powers: int, s: int) -> bool:
    """True when every table entry and partial sum provably fits int64.

    Each coordinate of a counted tuple is one of ``num_powers`` bases, so
    every count and cumulative sum is at most (num_powers + 1)**s; a 4x
    margin keeps intermediate additions safe.
    """
    return (num_powers + 1) ** s * 4 < 2**63


def _check_budget(x: int, bytes_per_cell: int, memory_budget_bytes) -> None:
    budget = DEFAULT_MEMORY_BUDGET_BYTES if memory_budget_bytes is None else memory_budget_bytes
    need = (x + 1) * bytes_per_cell
    if need > budget:
        raise ResourceLimitError(
            f"table of {x + 1} cells needs ~{need} bytes, over the budget of {budget};"
            " raise memory_budget_bytes to override"
        )


def build_table(inst: Instance, x: int, *, workers: int = 0,
                memory_budget_bytes: int | None = None) -> CountTable:
    """Representation counts r_{k,s}(m) for all m <= x by additive convolution.

    Starts from the indicator of positive k-th powers and applies s-1
    shift-accumulate layers: layer_j[m] = sum over powers p of
    layer_{j-1}[m - p].  No root extraction anywhere on this path.
    """
    if not isinstance(x, int) or isinstance(x, bool):
        raise ValueError(f"x must be an integer, got {x!r}")
    if x < 1:
        raise ValueError(f"x must be >= 1, got {x}")
    k, s = inst.k, inst.s
    powers = powers_upto(x, k)
    if _int64_safe(len(powers), s):
        _check_budget(x, 16, memory_budget_bytes)  # two int64 layers
        cur = np.zeros(x + 1, dtype=np.int64)
        if powers:
            cur[np.asarray(powers, dtype=np.int64)] = 1
        parr = np.asarray(powers, dtype=np.int64)
        for _ in range(s - 1):
            nxt = np.zeros(x + 1, dtype=np.int64)
            _kernels.accumulate_layer(nxt, cur, parr, workers=workers)
            cur = nxt
        return CountTable(instance=inst, limit=x, counts=cur)
    # Arbitrary-precision path: same algorithm on Python integers.
    _check_budget(x, 32, memory_budget_bytes)
    cur_l: List[int] = [0] * (x + 1)
    for p in powers:
        cur_l[p] = 1
    for _ in range(s - 1):
        nxt_l = [0] * (x + 1)
        for p in powers:
            src = cur_l
            for i in range(0, x + 1 - p):
                v = src[i]
                if v:
                    nxt_l[i + p] += v
        cur_l = nxt_l
    return CountTable(instance=inst, limit=x, counts=cur_l)


def r_count(inst: Instance, n: int) -> int:
    """Number of ordered s-tuples of positive integers with k-th powers summing to n.

    Recursive enumeration over the last coordinate with pruning
    v**k <= remaining - (s-1) (each remaining coordinate contributes at
    least 1).
    """
    if not isinstance(n, int) or isinstance(n, bool):
        raise ValueError(f"n must be an integer, got {n!r}")
    if n < 0:
        raise ValueError(f"n must be nonnegative, got {n}")
    k = inst.k
    memo: dict = {}

    def rec(s: int, budget: int) -> int:
        if budget < s:  # each coordinate is >= 1, so the sum is >= s
            return 0
        if s == 1:
            r = integer_kth_root(budget, k)
            return 1 if r**k == budget else 0
        key = (s, budget)
        got = memo.get(key)
        if got is not None:
            return got
        total = 0
        v = 1
        while v**k <= budget - (s - 1):
            total += rec(s - 1, budget - v**k)
            v += 1
        memo[key] = total
        return total

    return rec(inst.s, n)


def _enumerate_count(k: int, s: int, x: int, powers: Sequence[int],
                     workers: int = 0) -> int:
    """Count tuples with power-sum <= x by direct enumeration (root-free).

    Memoized on (coordinates left, remaining budget); the base case counts
    powers <= budget by bisecting the precomputed ascending power list.
    """
    memo: dict = {}

    def rec(si: int, budget: int) -> int:
        if budget < si:
            return 0
        if si == 1:
            return bisect_right(powers, budget)
        key = (si, budget)
        got = memo.get(key)
        if got is not None:
            return got
        total = 0
        cap = budget - (si - 1)
        for p in powers:
            if p > cap:
                break
            total += rec(si - 1, budget - p)
        memo[key] = total
        return total

    if s == 1:
        return bisect_right(powers, x)
    if workers and workers > 1:
        # Partition the outermost coordinate across threads; exact integer
        # partial counts are summed in a fixed order, so the result is
        # identical to the sequential run.
        firsts = [p for p in powers if p <= x - (s - 1)]
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(lambda p: rec(s - 1, x - p), firsts))
        return sum(parts)
    return rec(s, x)


def summatory_direct(inst: Instance, x: int, *, method: str = "auto",
                     workers: int = 0,
                     memory_budget_bytes: int | None = None) -> int:
    """S_{k,s}(x) by the direct route (convolution table or tuple enumeration).

    ``method`` is one of ``"auto"``, ``"table"``, ``"enumerate"``.  Both
    concrete methods are root-free; ``auto`` prefers the table and falls
    back to enumeration when the table would exceed the memory budget.
    """
    if not isinstance(x, int) or isinstance(x, bool):
        raise ValueError(f"x must be an integer, got {x!r}")
    if x < 0:
        raise ValueError(f"x must be nonnegative, got {x}")
    if method not in ("auto", "table", "enumerate"):
        raise ValueError(f"unknown method {method!r}")
    if x < inst.s:
        return 0
    if method == "auto":
        budget = (DEFAULT_MEMORY_BUDGET_BYTES if memory_budget_bytes is None
                  else memory_budget_bytes)
        method = "table" if (x + 1) * 16 <= budget else "enumerate"
    if method == "table":
        return build_table(inst, x, workers=workers,
                           memory_budget_bytes=memory_budget_bytes).total()
    return _enumerate_count(inst.k, inst.s, x, powers_upto(x, k=inst.k),
                            workers=workers)


def summatory_split_s2(k: int, x: int, *, workers: int = 0) -> int:
    """S_{k,2}(x) by folding the lattice count across the diagonal.

    With R = floor((x/2)**(1/k)) computed exactly as
    integer_kth_root(x // 2, k):

        S_{k,2}(x) = 2 * sum_{m=1..R} floor((x - m**k)**(1/k)) - R**2.

    Every pair has at least one coordinate with k-th power <= x/2, and the
    pairs with both such coordinates form exactly the R x R square, so the
    fold is exact.  All floors go through ``integer_kth_root``.
    """
    if not isinstance(x, int) or isinstance(x, bool):
        raise ValueError(f"x must be an integer, got {x!r}")
    if x < 1:
        raise ValueError(f"x must be >= 1, got {x}")
    if not isinstance(k, int) or isinstance(k, bool) or k < 2:
        raise ValueError(f"k must be an integer >= 2, got {k!r}")
    R = integer_kth_root(x // 2, k)
    if R == 0:
        return 0
    if workers and workers > 1:
        chunk = max(1, R // workers)
        spans = [(a, min(a + chunk - 1, R)) for a in range(1, R + 1, chunk)]

        def part(span):
            a, b = span
            return sum(integer_kth_root(x - m**k, k) for m in range(a, b + 1))

        with ThreadPoolExecutor(max_workers=workers) as pool:
            total = sum(pool.map(part, spans))
    else:
        total = 0
        for m in range(1, R + 1):
            total += integer_kth_root(x - m**k, k)
    return 2 * total - R * R


def summatory_recursive(inst: Instance, x: int) -> int:
    """S_{k,s}(x) by peeling one coordinate per level, down to the s=2 fold.

    Uses the identity S_{k,s}(x) = sum over l >= 1 with l**k <= x of
    S_{k,s-1}(x - l**k); the s = 2 base case is ``summatory_split_s2``.
    Memoized per call; no state is shared across calls.
    """
    if inst.s < 2:
        raise ValueError(f"summatory_recursive requires s >= 2, got s={inst.s}")
    if not isinstance(x, int) or isinstance(x, bool):
        raise ValueError(f"x must be an integer, got {x!r}")
    if x < 0:
        raise ValueError(f"x must be nonnegative, got {x}")
    k = inst.k
    memo: dict = {}

    def S(s: int, y: int) -> int:
        if y < s:
            return 0
        if s == 2:
            return summatory_split_s2(k, y)
        key = (s, y)
        got = memo.get(key)
        if got is not None:
            return got
        total = 0
        for l in range(1, integer_kth_root(y, k) + 1):
            total += S(s - 1, y - l**k)
        memo[key] = total
        return total

    return S(inst.s, x)


# ----------------------------------------------------------------------
# Batch variants: full summatory tables S(y) for every y <= x.  These are
# what the cross-verification sweeps use; each shares its per-point
# algorithm with the corresponding public function above.
# ----------------------------------------------------------------------

def summatory_direct_table(inst: Instance, x: int, *, workers: int = 0,
                           memory_budget_bytes: int | None = None) -> List[int]:
    """S_{k,s}(y) for all 0 <= y <= x, from the convolution table."""
    table = build_table(inst, x, workers=workers,
                        memory_budget_bytes=memory_budget_bytes)
    return table.summatory_table()


def split_s2_table(k: int, x: int) -> List[int]:
    """S_{k,2}(y) for all 0 <= y <= x via the diagonal fold at every y."""
    out = [0] * (x + 1)
    for y in range(1, x + 1):
        out[y] = summatory_split_s2(k, y)
    return out


def summatory_recursive_table(inst: Instance, x: int) -> List[int]:
    """S_{k,s}(y) for all 0 <= y <= x by layering the peel identity.

    The s = 2 base table comes from the diagonal fold (root-extraction
    route); each additional coordinate is added with a shift-accumulate
    pass over enumerated powers, mirroring ``summatory_recursive``.
    """
    if inst.s < 2:
        raise ValueError(f"summatory_recursive_table requires s >= 2, got s={inst.s}")
    k = inst.k
    base = split_s2_table(k, x)
    if inst.s == 2:
        return base
    powers = powers_upto(x, k)
    cur = base
    use_int64 = _int64_safe(len(powers), inst.s)
    if use_int64:
        arr = np.asarray(cur, dtype=np.int64)
        parr = np.asarray(powers, dtype=np.int64)
        for _ in range(inst.s - 2):
            nxt = np.zeros(x + 1, dtype=np.int64)
            _kernels.accumulate_layer(nxt, arr, parr)
            arr = nxt
        return [int(v) for v in arr]
    for _ in range(inst.s - 2):
        nxt_l = [0] * (x + 1)
        for p in powers:
            for i in range(0, x + 1 - p):
                v = cur[i]
                if v:
                    nxt_l[i + p] += v
        cur = nxt_l
    return cur
