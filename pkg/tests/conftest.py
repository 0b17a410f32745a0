"""Shared brute-force oracles for the test suite.

Everything here is deliberately naive — literal tuple enumeration and
direct mpmath evaluation — and shares no code with the package internals,
so agreement between an oracle and the library is meaningful evidence.
"""

from __future__ import annotations

import itertools


def brute_count_le(k: int, s: int, x: int) -> int:
    """Count s-tuples of positive integers whose k-th powers sum to <= x.

    Literal product enumeration; exponential in s, so keep inputs tiny.
    """
    base_max = 0
    while (base_max + 1) ** k <= x:
        base_max += 1
    bases = range(1, base_max + 1)
    return sum(
        1
        for tup in itertools.product(bases, repeat=s)
        if sum(b**k for b in tup) <= x
    )


def brute_count_eq(k: int, s: int, n: int) -> int:
    """Count s-tuples of positive integers whose k-th powers sum to exactly n."""
    base_max = 0
    while (base_max + 1) ** k <= n:
        base_max += 1
    bases = range(1, base_max + 1)
    return sum(
        1
        for tup in itertools.product(bases, repeat=s)
        if sum(b**k for b in tup) == n
    )


def brute_floor_root(n: int, k: int) -> int:
    """floor(n**(1/k)) by linear search from zero.  O(n**(1/k)), exact."""
    r = 0
    while (r + 1) ** k <= n:
        r += 1
    return r
