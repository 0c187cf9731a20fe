"""Shared oracles and generators for the test suite.

The oracles here are deliberately independent of the library code they
check: membership is brute-forced on rational grids and trees are built
by a direct recursive generator.
"""

from __future__ import annotations

import random
from fractions import Fraction

from erdosavoid.gaptree import GapTree
from erdosavoid.intervals import Interval, IntervalSet


def grid_points(lo, hi, steps=1000):
    """Rational probe grid including both endpoints."""
    lo, hi = Fraction(lo), Fraction(hi)
    step = (hi - lo) / steps
    return [lo + k * step for k in range(steps + 1)]


def brute_member(intervals, x) -> bool:
    """Membership by scanning the raw (non-normalized) interval list."""
    return any(iv.lo <= x <= iv.hi for iv in intervals)


def random_fraction(rng: random.Random, lo, hi, denom: int = 64) -> Fraction:
    lo, hi = Fraction(lo), Fraction(hi)
    return lo + (hi - lo) * Fraction(rng.randrange(denom + 1), denom)


def random_interval_list(rng: random.Random, count: int, span=(0, 10)):
    out = []
    for _ in range(count):
        a = random_fraction(rng, *span)
        b = random_fraction(rng, *span)
        if a > b:
            a, b = b, a
        out.append(Interval(a, b))
    return out


def random_decreasing_gap_tree(
    rng: random.Random,
    depth: int,
    hull: Interval = Interval(Fraction(0), Fraction(1)),
    gap0: Fraction = Fraction(1, 10),
    shrink: Fraction = Fraction(1, 4),
) -> GapTree:
    """Random complete tree whose gap lengths are constant per level and
    strictly decreasing with depth (so largest-gap decomposition
    recovers the tree exactly)."""
    gap_lengths = [gap0 * hull.length * shrink**n for n in range(depth)]

    def build(iv: Interval, level: int) -> GapTree:
        if level == depth:
            return GapTree(iv)
        g = gap_lengths[level]
        assert g < iv.length, "gap schedule too aggressive for this hull"
        room = iv.length - g
        u = Fraction(rng.randrange(16, 49), 64)  # split point in [1/4, 3/4]
        gap_lo = iv.lo + room * u
        gap = Interval(gap_lo, gap_lo + g)
        return GapTree(
            iv,
            gap,
            build(Interval(iv.lo, gap.lo), level + 1),
            build(Interval(gap.hi, iv.hi), level + 1),
        )

    return build(hull, 0)


def random_interval_set(rng: random.Random, components: int, span=(0, 1)) -> IntervalSet:
    """Disjoint random components with positive separations."""
    lo, hi = Fraction(span[0]), Fraction(span[1])
    cuts = sorted(
        {random_fraction(rng, lo, hi, denom=4096) for _ in range(2 * components + 8)}
    )
    pieces = []
    for a, b in zip(cuts[::2], cuts[1::2]):
        if a < b:
            pieces.append(Interval(a, b))
        if len(pieces) == components:
            break
    return IntervalSet(pieces)
