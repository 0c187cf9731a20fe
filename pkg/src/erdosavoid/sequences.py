"""Exact monotone sequence generators with difference metadata.

A SequenceSpec produces terms a_1, a_2, ... as exact rationals (or
rational enclosures for the non-integer power kind) together with the
metadata needed to evaluate tail suprema of consecutive differences,
sup { a_p - a_{p+1} : p >= n }, with finitely many term evaluations.
Sequences without that metadata are rejected by the operations that
need it rather than approximated.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Optional, Sequence

from .errors import (
    CannotBoundTailError,
    InvalidParameterError,
    NeedsLongerWindowError,
    PrecisionError,
)
from .intervals import Interval
from .rationals import RationalLike, as_rational

DOWN = "down"
UP = "up"


@dataclass(frozen=True)
class SequenceSpec:
    """Strictly monotone rational sequence, 1-indexed.

    `diff_decreasing_from` is the index from which consecutive
    differences a_n - a_{n+1} are known to be monotonically
    nonincreasing; it enables exact evaluation of tail suprema.
    `length` bounds the usable window for explicit lists.
    """

    kind: str
    direction: str
    _term: Callable[[int], Fraction]
    diff_decreasing_from: Optional[int] = None
    length: Optional[int] = None
    params: tuple = ()

    def term(self, n: int) -> Fraction:
        if n < 1:
            raise InvalidParameterError("sequence indices start at 1")
        if self.length is not None and n > self.length:
            raise NeedsLongerWindowError(
                f"term {n} requested but the sequence window has {self.length} terms"
            )
        return self._term(n)

    def term_enclosure(self, n: int, bits: int = 64) -> Interval:
        """Rational enclosure of a_n; exact kinds return a point."""
        if self.kind == "reciprocal_power" and self.params[0].denominator != 1:
            from .enclosures import root_enclosure

            alpha = self.params[0]
            base = root_enclosure(
                Fraction(n ** alpha.numerator), alpha.denominator, bits
            )
            return Interval(1 / base.hi, 1 / base.lo)
        t = self.term(n)
        return Interval(t, t)

    def terms(self, count: int, start: int = 1) -> list[Fraction]:
        return [self.term(n) for n in range(start, start + count)]

    def diff(self, n: int) -> Fraction:
        """a_n - a_{n+1} for down sequences (positive by monotonicity)."""
        return self.term(n) - self.term(n + 1)

    def max_index(self) -> Optional[int]:
        return self.length

    def sup_tail_difference(self, n: int) -> Fraction:
        """Exact sup over p >= n of a_p - a_{p+1}.

        Requires the difference-monotonicity metadata (or a finite
        explicit list, whose tail is a finite maximum).
        """
        if self.direction != DOWN:
            raise InvalidParameterError("tail differences apply to down sequences")
        if self.length is not None:
            last = self.length - 1
            if n > last:
                raise NeedsLongerWindowError(
                    f"no differences available from index {n}"
                )
            return max(self.diff(p) for p in range(n, last + 1))
        if self.diff_decreasing_from is None:
            raise CannotBoundTailError(
                f"sequence kind {self.kind!r} carries no difference metadata"
            )
        stop = max(n, self.diff_decreasing_from)
        return max(self.diff(p) for p in range(n, stop + 1))

    def first_index_with_ratio_at_most(
        self, bound: Fraction, start: int = 1, window: int = 1_000_000
    ) -> int:
        """Least n >= start with (a_n - a_{n+1})/a_n <= bound.

        Uses a closed form for the reciprocal kind and a linear scan
        capped at `window` otherwise.
        """
        bound = as_rational(bound)
        if bound <= 0:
            raise InvalidParameterError("ratio bound must be positive")
        if self.kind == "reciprocal":
            # difference ratio is 1/(n+1), decreasing
            from .rationals import ceil_rational

            n = ceil_rational(1 / bound - 1)
            return max(start, max(n, 1))
        limit = window if self.length is None else min(window, self.length - 1)
        for n in range(start, limit + 1):
            a = self.term(n)
            if self.diff(n) / a <= bound:
                return n
        raise NeedsLongerWindowError(
            f"no index with difference ratio <= {bound} found in [{start}, {limit}]"
        )


def _check_strictly_monotone(values: Sequence[Fraction], direction: str) -> None:
    for a, b in zip(values, values[1:]):
        if direction == DOWN and not a > b:
            raise InvalidParameterError("explicit list is not strictly decreasing")
        if direction == UP and not a < b:
            raise InvalidParameterError("explicit list is not strictly increasing")


def reciprocal() -> SequenceSpec:
    """a_n = 1/n; differences 1/(n(n+1)) decrease from the start."""
    return SequenceSpec(
        "reciprocal", DOWN, lambda n: Fraction(1, n), diff_decreasing_from=1
    )


def geometric_down(r: RationalLike) -> SequenceSpec:
    """a_n = r^n for 0 < r < 1; differences r^n(1-r) decrease."""
    r = as_rational(r)
    if not 0 < r < 1:
        raise InvalidParameterError("geometric-down ratio must lie in (0, 1)")
    return SequenceSpec(
        "geometric_down", DOWN, lambda n: r**n, diff_decreasing_from=1, params=(r,)
    )


def reciprocal_power(alpha: RationalLike) -> SequenceSpec:
    """a_n = n^-alpha for rational alpha > 0.

    Exact terms exist only for integer alpha; other exponents expose
    enclosures via `term_enclosure` and reject exact `term` calls.
    """
    alpha = as_rational(alpha)
    if alpha <= 0:
        raise InvalidParameterError("power must be positive")
    if alpha.denominator == 1:
        k = alpha.numerator
        return SequenceSpec(
            "reciprocal_power",
            DOWN,
            lambda n: Fraction(1, n**k),
            diff_decreasing_from=1,
            params=(alpha,),
        )

    def not_exact(n: int) -> Fraction:
        raise PrecisionError(
            f"n^-{alpha} is irrational for n > 1; use term_enclosure"
        )

    return SequenceSpec("reciprocal_power", DOWN, not_exact, params=(alpha,))


def linear() -> SequenceSpec:
    """a_n = n."""
    return SequenceSpec("linear", UP, lambda n: Fraction(n))


def geometric_up(b: RationalLike) -> SequenceSpec:
    """a_n = b^n for rational b > 1."""
    b = as_rational(b)
    if b <= 1:
        raise InvalidParameterError("geometric-up base must exceed 1")
    return SequenceSpec("geometric_up", UP, lambda n: b**n, params=(b,))


def explicit(values: Sequence[RationalLike], direction: str = DOWN) -> SequenceSpec:
    vals = [as_rational(v) for v in values]
    if len(vals) < 2:
        raise InvalidParameterError("explicit sequences need at least two terms")
    _check_strictly_monotone(vals, direction)
    return SequenceSpec(
        "explicit", direction, lambda n: vals[n - 1], length=len(vals)
    )


def custom(
    term: Callable[[int], RationalLike],
    direction: str,
    diff_decreasing_from: Optional[int] = None,
) -> SequenceSpec:
    return SequenceSpec(
        "custom",
        direction,
        lambda n: as_rational(term(n)),
        diff_decreasing_from=diff_decreasing_from,
    )


def from_name(name: str, **kwargs) -> SequenceSpec:
    """CLI-facing constructor: reciprocal | geometric-down | linear | geometric-up."""
    if name == "reciprocal":
        return reciprocal()
    if name == "geometric-down":
        return geometric_down(kwargs.get("ratio", Fraction(1, 2)))
    if name == "linear":
        return linear()
    if name == "geometric-up":
        return geometric_up(kwargs.get("base", 2))
    raise InvalidParameterError(f"unknown sequence name {name!r}")
