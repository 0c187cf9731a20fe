"""Constructive intersection of gap trees.

Two routes are kept deliberately separate.  The gap-lemma checker only
verifies the hypotheses under which two thick sets must meet; it never
exhibits a point.  The containment walker produces an explicit chain of
nested node pairs, hence a point estimate with a rigorous error bound.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .errors import (
    GapConditionError,
    HullContainmentError,
    InvalidParameterError,
    ZeroSlackError,
)
from .gaptree import GapTree, Thickness, thickness, thickness_product_at_least_one
from .intervals import Interval
from .rationals import RationalLike, as_rational, format_rational

REASON_OK = "ok"
REASON_THIN = "thickness_product_below_one"
REASON_K1_IN_GAP = "K1_inside_gap_of_K2"
REASON_K2_IN_GAP = "K2_inside_gap_of_K1"


@dataclass(frozen=True)
class GapLemmaVerdict:
    applicable: bool
    reason: str
    thickness_1: Thickness
    thickness_2: Thickness
    scanned_depth_1: int = 0
    scanned_depth_2: int = 0

    def to_json(self) -> dict:
        return {
            "applicable": self.applicable,
            "reason": self.reason,
            "thickness": [str(self.thickness_1), str(self.thickness_2)],
            "scanned_depths": [self.scanned_depth_1, self.scanned_depth_2],
        }


def _all_gaps(tree: GapTree) -> list[Interval]:
    out = []

    def visit(node: GapTree):
        if node.is_leaf:
            return
        out.append(node.gap)
        visit(node.left)
        visit(node.right)

    visit(tree)
    return out


def check_gap_lemma(k1: GapTree, k2: GapTree) -> GapLemmaVerdict:
    """Check the hypotheses of the thickness gap lemma.

    Applicable iff the thickness product is at least 1 and neither hull
    sits strictly inside a recorded gap of the other tree.  The gap
    scan covers all materialized gaps, so the containment verdict is
    depth-limited; scanned depths are reported alongside.
    """
    t1, t2 = thickness(k1), thickness(k2)
    d1, d2 = k1.min_depth(), k2.min_depth()
    if not thickness_product_at_least_one(t1, t2):
        return GapLemmaVerdict(False, REASON_THIN, t1, t2, d1, d2)
    for gap in _all_gaps(k2):
        if gap.strictly_contains_interval(k1.interval):
            return GapLemmaVerdict(False, REASON_K1_IN_GAP, t1, t2, d1, d2)
    for gap in _all_gaps(k1):
        if gap.strictly_contains_interval(k2.interval):
            return GapLemmaVerdict(False, REASON_K2_IN_GAP, t1, t2, d1, d2)
    return GapLemmaVerdict(True, REASON_OK, t1, t2, d1, d2)


@dataclass(frozen=True)
class WalkTrace:
    """Chain of nested node pairs (inner, outer) down to the walk depth.

    The inner interval stays contained in the outer one at every step;
    the point estimate lies in the final intervals of both trees and
    the error bound is the final outer interval length.
    """

    chain: tuple[tuple[str, str], ...]
    point_estimate: Fraction
    error_bound: Fraction
    step_bounds: tuple[Fraction, ...] = field(default=())

    def to_json(self) -> dict:
        return {
            "chain": [[a, b] for a, b in self.chain],
            "point": format_rational(self.point_estimate),
            "error": format_rational(self.error_bound),
        }


def _check_walk_preconditions(inner: GapTree, outer: GapTree, depth: int) -> None:
    if depth < 1:
        raise InvalidParameterError("walk depth must be >= 1")
    if not outer.interval.contains_interval(inner.interval):
        raise HullContainmentError(
            f"hull {inner.interval} of the inner tree is not inside {outer.interval}"
        )
    if inner.min_depth() < depth or outer.min_depth() < depth:
        raise InvalidParameterError(
            f"both trees must be complete to depth {depth} "
            f"(have {inner.min_depth()} and {outer.min_depth()})"
        )
    for n in range(depth):
        outer_max = max(g.length for g in outer.level_gaps(n))
        inner_min = min(g.length for g in inner.level_gaps(n))
        if not outer_max < inner_min:
            raise GapConditionError(n, outer_max, inner_min)


def containment_walk(inner: GapTree, outer: GapTree, depth: int) -> WalkTrace:
    """Walk a chain of children with the inner node always contained.

    At a split, the outer gap is shorter than the inner gap, so the
    inner left child fits in the outer left child or the inner right
    child fits in the outer right child; when both fit the left pair
    is taken.
    """
    _check_walk_preconditions(inner, outer, depth)
    node_in, node_out = inner, outer
    label_in, label_out = "", ""
    chain = []
    bounds = []
    for _ in range(depth):
        a = node_in.left.interval.hi  # inner gap endpoints
        b = node_in.right.interval.lo
        c = node_out.left.interval.hi  # outer gap endpoints
        d = node_out.right.interval.lo
        if a <= c:
            node_in, node_out = node_in.left, node_out.left
            label_in, label_out = label_in + "0", label_out + "0"
        else:
            if not d <= b:
                raise GapConditionError(
                    len(chain), node_out.gap.length, node_in.gap.length
                )
            node_in, node_out = node_in.right, node_out.right
            label_in, label_out = label_in + "1", label_out + "1"
        if not node_out.interval.contains_interval(node_in.interval):
            raise HullContainmentError(
                f"containment lost at step {len(chain) + 1}"
            )
        chain.append((label_in, label_out))
        bounds.append(node_out.interval.length)
    return WalkTrace(
        tuple(chain),
        node_in.interval.midpoint,
        node_out.interval.length,
        tuple(bounds),
    )


def build_tilde(tree: GapTree, depth: int, margin: RationalLike) -> GapTree:
    """Surrounding tree with strictly larger hull and per-level gaps
    shorter than a quarter of the inner tree's smallest same-level gap.

    The quarter factor leaves slack below the 1/2 bound that
    `perturbation_delta` certifies against.
    """
    margin = as_rational(margin)
    if margin <= 0:
        raise InvalidParameterError("margin must be positive")
    if tree.min_depth() < depth:
        raise InvalidParameterError(
            f"inner tree must be complete to depth {depth}, has {tree.min_depth()}"
        )
    min_gaps = [min(g.length for g in tree.level_gaps(n)) for n in range(depth)]
    hull = Interval(tree.interval.lo - margin, tree.interval.hi + margin)

    def build(iv: Interval, level: int) -> GapTree:
        if level == depth:
            return GapTree(iv)
        g = min(min_gaps[level], iv.length) / 4
        mid = iv.midpoint
        gap = Interval(mid - g / 2, mid + g / 2)
        return GapTree(
            iv,
            gap,
            build(Interval(iv.lo, gap.lo), level + 1),
            build(Interval(gap.hi, iv.hi), level + 1),
        )

    return build(hull, 0)


def perturbation_delta(inner: GapTree, outer: GapTree, depth: int) -> Fraction:
    """Certified radius of affine stability for the containment walk.

    Returns delta > 0 such that for every (lam, t) with lam in
    [1/(1+delta), 1+delta] and t in [-delta, delta], the walk
    preconditions hold for lam*inner + t against outer.  The checks are
    evaluated at box corners; they are monotone in lam and t, so they
    hold throughout the box.
    """
    _check_walk_preconditions(inner, outer, depth)
    a, b = inner.interval.lo, inner.interval.hi
    c, d = outer.interval.lo, outer.interval.hi
    margin_left = a - c
    margin_right = d - b
    if margin_left <= 0 or margin_right <= 0:
        raise ZeroSlackError("outer hull must strictly contain the inner hull")
    min_gaps = [min(g.length for g in inner.level_gaps(n)) for n in range(depth)]
    max_gaps = [max(g.length for g in outer.level_gaps(n)) for n in range(depth)]
    for n in range(depth):
        if not max_gaps[n] < min_gaps[n] / 2:
            raise ZeroSlackError(
                f"level {n} gap slack below the factor-1/2 requirement"
            )

    def ok(delta: Fraction) -> bool:
        lam_lo = 1 / (1 + delta)
        lam_hi = 1 + delta
        for lam in (lam_lo, lam_hi):
            for t in (-delta, delta):
                lo = min(lam * a, lam * b) + t
                hi = max(lam * a, lam * b) + t
                if lo < c or hi > d:
                    return False
        return all(lam_lo * min_gaps[n] > max_gaps[n] for n in range(depth))

    scale = 1 + max(abs(a), abs(b))
    delta = min(min(margin_left, margin_right) / scale, Fraction(1, 2))
    for _ in range(64):
        if ok(delta):
            return delta
        delta /= 2
    raise ZeroSlackError("no certifiable radius found after 64 halvings")
