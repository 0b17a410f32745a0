"""Problem instance: the pair (k, s) defining a power-sum counting problem.

An instance fixes the exponent ``k`` and the number of summands ``s`` for
the representation count r_{k,s}(n) = #{ordered s-tuples of positive
integers whose k-th powers sum to n} and its partial sums.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction


@dataclass(frozen=True)
class Instance:
    """An immutable (k, s) configuration.

    ``k`` is the exponent (k >= 2) and ``s`` the number of summands
    (s >= 1).  ``theorem_valid`` reports whether (k, s) lies in the proven
    validity range of the two-term asymptotic: k >= 4 and 2 <= s <= k + 1.
    Outside that range the asymptotic coefficients are still defined and
    computable, but results are exploratory.
    """

    k: int
    s: int

    def __post_init__(self) -> None:
        if not isinstance(self.k, int) or isinstance(self.k, bool):
            raise ValueError(f"k must be an integer, got {self.k!r}")
        if not isinstance(self.s, int) or isinstance(self.s, bool):
            raise ValueError(f"s must be an integer, got {self.s!r}")
        if self.k < 2:
            raise ValueError(f"k must be >= 2, got {self.k}")
        if self.s < 1:
            raise ValueError(f"s must be >= 1, got {self.s}")

    @property
    def theorem_valid(self) -> bool:
        """True iff (k, s) is inside the proven two-term asymptotic range."""
        return self.k >= 4 and 2 <= self.s <= self.k + 1

    @property
    def predicted_error_exponent(self) -> Fraction:
        """Predicted decay exponent ((s-1)k - 1) / k**2 of the two-term residual.

        Returned as an exact rational.  Meaningful inside the
        ``theorem_valid`` range; computed unconditionally.
        """
        return Fraction((self.s - 1) * self.k - 1, self.k * self.k)

    @property
    def main_only_error_exponent(self) -> Fraction:
        """Growth exponent (s-1)/k of the residual left by the main term alone."""
        return Fraction(self.s - 1, self.k)
