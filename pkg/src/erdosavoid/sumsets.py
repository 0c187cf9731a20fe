"""Dyadic families of scaled Cantor translates and coverage probes.

The family members 2^n (K + l) tile all scales and positions: an affine
copy lam*X + t selects the unique frame (n, l) with |lam| in
(2^(n-1), 2^n] and t in (l 2^n, (l+1) 2^n], and the thickness gap
lemma applies to the pair whenever the thickness product clears 1 and
neither hull hides inside a gap of the other.  Whether the lemma's
conditions hold and whether a common point is exhibited at finite depth
are reported separately: the first is a verified hypothesis, the second
a constructive witness.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from .errors import InvalidParameterError, ResourceLimitError
from .gaptree import (
    GapTree,
    affine_tree,
    from_middle_ratio,
    thickness,
    thickness_product_at_least_one,
    to_interval_set,
)
from .intersect import (
    REASON_K1_IN_GAP,
    REASON_K2_IN_GAP,
    REASON_OK,
    REASON_THIN,
    GapLemmaVerdict,
    _all_gaps,
)
from .intervals import Interval, IntervalSet, ParamBox
from .rationals import RationalLike, as_rational, format_rational


class DyadicFamily:
    """Lazily materialized members 2^n (K + l) of a middle-ratio base."""

    def __init__(
        self,
        n_ratio: int,
        depth: int,
        n_range: tuple[int, int],
        l_range: tuple[int, int],
    ):
        if n_range[0] > n_range[1] or l_range[0] > l_range[1]:
            raise InvalidParameterError("ranges must be nonempty")
        self.n_ratio = n_ratio
        self.depth = depth
        self.n_range = n_range
        self.l_range = l_range
        self.base = from_middle_ratio(n_ratio, depth)
        self._trees: dict[tuple[int, int], GapTree] = {}
        self._sets: dict[tuple[int, int, int], IntervalSet] = {}
        self._union: dict[int, IntervalSet] = {}

    def frames(self) -> list[tuple[int, int]]:
        return [
            (n, l)
            for n in range(self.n_range[0], self.n_range[1] + 1)
            for l in range(self.l_range[0], self.l_range[1] + 1)
        ]

    def in_range(self, frame: tuple[int, int]) -> bool:
        n, l = frame
        return (
            self.n_range[0] <= n <= self.n_range[1]
            and self.l_range[0] <= l <= self.l_range[1]
        )

    def member(self, n: int, l: int) -> GapTree:
        key = (n, l)
        if key not in self._trees:
            scale = Fraction(2) ** n
            self._trees[key] = affine_tree(self.base, scale, scale * l)
        return self._trees[key]

    def member_set(self, n: int, l: int, level: Optional[int] = None) -> IntervalSet:
        level = self.depth if level is None else level
        key = (n, l, level)
        if key not in self._sets:
            self._sets[key] = to_interval_set(self.member(n, l), level)
        return self._sets[key]

    def union_set(self, level: Optional[int] = None) -> IntervalSet:
        level = self.depth if level is None else level
        if level not in self._union:
            acc = IntervalSet.empty()
            for n, l in self.frames():
                acc = acc.union(self.member_set(n, l, level))
            self._union[level] = acc
        return self._union[level]

    def level_measure(self, level: int) -> Fraction:
        """Total member measure at a level: the measure-zero surrogate,
        monotone decreasing in the level."""
        per_unit = Fraction(2 * self.n_ratio, 2 * self.n_ratio + 1) ** level
        total = Fraction(0)
        width = self.l_range[1] - self.l_range[0] + 1
        for n in range(self.n_range[0], self.n_range[1] + 1):
            total += Fraction(2) ** n * per_unit * width
        return total

    def describe(self) -> dict:
        return {
            "middle_ratio": self.n_ratio,
            "depth": self.depth,
            "n_range": list(self.n_range),
            "l_range": list(self.l_range),
        }


def build_dyadic_family(
    n_ratio: int,
    depth: int,
    n_range: tuple[int, int],
    l_range: tuple[int, int],
) -> DyadicFamily:
    return DyadicFamily(n_ratio, depth, n_range, l_range)


def select_frame(lam: RationalLike, t: RationalLike) -> tuple[int, int]:
    """Unique (n, l) with |lam| in (2^(n-1), 2^n] and t in (l 2^n, (l+1) 2^n]."""
    lam = as_rational(lam)
    t = as_rational(t)
    if lam == 0:
        raise InvalidParameterError("frame selection needs a nonzero scale")
    a = abs(lam)
    n = a.numerator.bit_length() - a.denominator.bit_length()
    while _pow2(n) < a:
        n += 1
    while _pow2(n - 1) >= a:
        n -= 1
    l = math.ceil(t / _pow2(n)) - 1
    return n, l


def _pow2(n: int) -> Fraction:
    return Fraction(2**n) if n >= 0 else Fraction(1, 2**-n)


@dataclass(frozen=True)
class FrameTrace:
    """Outcome of one framed intersection attempt."""

    box: ParamBox
    frame: Optional[tuple[int, int]]
    status: str  # "certified" | "applicable_unwitnessed" | "not_applicable" | "split"
    verdicts: tuple[GapLemmaVerdict, ...] = ()
    witness: Optional[Fraction] = None
    children: tuple["FrameTrace", ...] = ()
    level_measure: Optional[Fraction] = None

    def to_json(self) -> dict:
        return {
            "box": self.box.to_json(),
            "frame": list(self.frame) if self.frame else None,
            "status": self.status,
            "witness": None if self.witness is None else format_rational(self.witness),
            "children": [c.to_json() for c in self.children],
        }


class FrameCertifier:
    """Reusable certifier for parameter sweeps.

    Every member is an affine image of the family base and every check
    commutes with affine maps, so the base analyses are computed once
    and member quantities are produced by O(1) coordinate changes; no
    member tree is materialized on the certification path.
    """

    def __init__(self, x_tree: GapTree, family: DyadicFamily):
        self.x_tree = x_tree
        self.family = family
        self.x_thick = thickness(x_tree)
        self.x_gaps_desc = sorted(
            _all_gaps(x_tree), key=lambda g: g.length, reverse=True
        )
        self.base_thick = thickness(family.base)
        self.base_gaps_desc = sorted(
            _all_gaps(family.base), key=lambda g: g.length, reverse=True
        )

    @staticmethod
    def _frame_map(frame: tuple[int, int]) -> tuple[Fraction, Fraction]:
        n, l = frame
        scale = _pow2(n)
        return scale, scale * l

    def corner_verdict(
        self, frame: tuple[int, int], lam: Fraction, t: Fraction
    ) -> GapLemmaVerdict:
        """Gap-lemma verdict for lam*X + t against the framed member.

        Thickness is affine-invariant and the hull/gap comparisons
        commute with the affine maps, so both trees stay unmaterialized;
        gaps are scanned in decreasing length with an early exit.
        Agrees with check_gap_lemma on materialized trees.
        """
        if not thickness_product_at_least_one(self.x_thick, self.base_thick):
            return GapLemmaVerdict(False, REASON_THIN, self.x_thick, self.base_thick)
        ms, mt = self._frame_map(frame)
        hull1 = self.x_tree.interval.scale(lam).translate(t)
        hull2 = self.family.base.interval.scale(ms).translate(mt)
        for gap in self.base_gaps_desc:
            if gap.length * ms <= hull1.length:
                break
            if gap.scale(ms).translate(mt).strictly_contains_interval(hull1):
                return GapLemmaVerdict(
                    False, REASON_K1_IN_GAP, self.x_thick, self.base_thick
                )
        scale = abs(lam)
        for gap in self.x_gaps_desc:
            if gap.length * scale <= hull2.length:
                break
            if gap.scale(lam).translate(t).strictly_contains_interval(hull2):
                return GapLemmaVerdict(
                    False, REASON_K2_IN_GAP, self.x_thick, self.base_thick
                )
        return GapLemmaVerdict(True, REASON_OK, self.x_thick, self.base_thick)

    def find_common_point(
        self, lam: Fraction, t: Fraction, frame: tuple[int, int], depth: int
    ) -> Optional[Fraction]:
        """Exact common point of the level sets of lam*X + t and the
        framed member, by synchronized descent into overlapping node
        pairs with both affine maps applied on the fly.

        Equivalent to intersecting the full level sets but prunes
        disjoint branches, so a hit normally costs O(depth) visits; a
        visit budget falls back to the full intersection.
        """
        depth = min(depth, self.x_tree.min_depth(), self.family.depth)
        ms, mt = self._frame_map(frame)
        budget = [16 * (depth + 1) ** 2]

        def dfs(a: GapTree, b: GapTree, d: int) -> Optional[Fraction]:
            if budget[0] <= 0:
                return None
            budget[0] -= 1
            a_lo = lam * a.interval.lo + t
            a_hi = lam * a.interval.hi + t
            if lam < 0:
                a_lo, a_hi = a_hi, a_lo
            b_lo = ms * b.interval.lo + mt
            b_hi = ms * b.interval.hi + mt
            if a_hi < b_lo or b_hi < a_lo:
                return None
            if d == depth or a.is_leaf or b.is_leaf:
                return max(a_lo, b_lo)
            for ac in (a.left, a.right) if lam > 0 else (a.right, a.left):
                for bc in (b.left, b.right):
                    hit = dfs(ac, bc, d + 1)
                    if hit is not None:
                        return hit
            return None

        hit = dfs(self.x_tree, self.family.base, 0)
        if hit is not None or budget[0] > 0:
            return hit
        x_set = to_interval_set(self.x_tree, depth).affine(lam, t)
        m_set = self.family.member_set(*frame, level=depth)
        common = x_set.intersection(m_set)
        return common.intervals[0].lo if common else None

    def certify(self, box: ParamBox, depth: int, split_budget: int = 16) -> FrameTrace:
        corners = list(box.corners())
        frames = {select_frame(lam, t) for lam, t in corners}
        # the midpoint frame is tried first even when corners disagree:
        # the corner checks carry the soundness, so a member that passes
        # them certifies the whole box without splitting
        frame = select_frame(box.lam.midpoint, box.t.midpoint)
        if not self.family.in_range(frame):
            raise InvalidParameterError(
                f"frame {frame} outside the materialized family ranges"
            )
        verdicts = tuple(self.corner_verdict(frame, lam, t) for lam, t in corners)
        level_measure = self.family.level_measure(depth)
        if not all(v.applicable for v in verdicts):
            if len(frames) > 1:
                if split_budget <= 0:
                    raise ResourceLimitError(
                        "split budget exhausted before a constant frame"
                    )
                if box.lam.length >= box.t.length:
                    mid = box.lam.midpoint
                    parts = [
                        ParamBox(Interval(box.lam.lo, mid), box.t),
                        ParamBox(Interval(mid, box.lam.hi), box.t),
                    ]
                else:
                    mid = box.t.midpoint
                    parts = [
                        ParamBox(box.lam, Interval(box.t.lo, mid)),
                        ParamBox(box.lam, Interval(mid, box.t.hi)),
                    ]
                children = tuple(
                    self.certify(part, depth, split_budget - 2) for part in parts
                )
                status = (
                    "certified"
                    if all(c.status == "certified" for c in children)
                    else "split"
                )
                return FrameTrace(box, None, status, children=children)
            return FrameTrace(
                box, frame, "not_applicable", verdicts, level_measure=level_measure
            )
        witness = self.find_common_point(
            box.lam.midpoint, box.t.midpoint, frame, depth
        )
        if witness is not None:
            return FrameTrace(
                box, frame, "certified", verdicts, witness, level_measure=level_measure
            )
        return FrameTrace(
            box, frame, "applicable_unwitnessed", verdicts, level_measure=level_measure
        )


def certify_frame_intersection(
    x_tree: GapTree,
    family: DyadicFamily,
    box: ParamBox,
    depth: int,
    split_budget: int = 16,
) -> FrameTrace:
    """Frame an affine copy of X against the family and try to meet it.

    The frame must be constant on the box (the box splits automatically
    up to a budget).  Gap-lemma applicability is checked at the four
    corners, and a constructive common point is sought at the box
    center by exact descent through the level sets.  Certified traces
    carry an exact common point; applicable-but-unwitnessed means the
    hypotheses hold but this depth exhibited no common component.
    """
    return FrameCertifier(x_tree, family).certify(box, depth, split_budget)


# ---------------------------------------------------------------------------
# sumset coverage


@dataclass(frozen=True)
class CoverageRecord:
    target: Fraction
    covered: bool
    witness: Optional[Fraction] = None
    nearest_miss: Optional[Fraction] = None


@dataclass(frozen=True)
class CoverageReport:
    """Per-target hits of X + lam * (family members) at finite depth."""

    lam: Fraction
    records: tuple[CoverageRecord, ...]

    @property
    def probed(self) -> int:
        return len(self.records)

    @property
    def certified(self) -> int:
        return sum(r.covered for r in self.records)

    @property
    def failures(self) -> tuple[CoverageRecord, ...]:
        return tuple(r for r in self.records if not r.covered)

    def to_json(self) -> dict:
        return {
            "lambda": format_rational(self.lam),
            "probed": self.probed,
            "certified": self.certified,
            "targets": [
                {
                    "target": format_rational(r.target),
                    "covered": r.covered,
                    "witness": None if r.witness is None else format_rational(r.witness),
                    "nearest_miss": None
                    if r.nearest_miss is None
                    else format_rational(r.nearest_miss),
                }
                for r in self.records
            ],
        }


def set_distance(a: IntervalSet, b: IntervalSet) -> Fraction:
    """Minimal distance between two nonempty interval sets (0 = meet)."""
    if not a or not b:
        raise InvalidParameterError("distance needs nonempty sets")
    best: Optional[Fraction] = None
    i = j = 0
    ai, bj = a.intervals, b.intervals
    while i < len(ai) and j < len(bj):
        x, y = ai[i], bj[j]
        if x.intersects(y):
            return Fraction(0)
        gap = y.lo - x.hi if x.hi < y.lo else x.lo - y.hi
        best = gap if best is None else min(best, gap)
        if x.hi < y.lo:
            i += 1
        else:
            j += 1
    return best if best is not None else Fraction(0)


def sumset_cover_probe(
    x_tree: GapTree,
    family: DyadicFamily,
    lam: RationalLike,
    targets: Sequence[RationalLike],
    depth: int,
) -> CoverageReport:
    """Check which targets are hit by X + lam*M at a finite level.

    A target r is covered exactly when (r - lam*M) meets the level set
    of X, i.e. when some member interval meets (r - X)/lam; the check
    walks the X components with a binary search into the member union,
    so no affine image is materialized per target.  The witness is an
    exact common point; misses report their nearest-miss distance.
    """
    from bisect import bisect_right

    lam = as_rational(lam)
    if lam == 0:
        raise InvalidParameterError("coverage probes need a nonzero scale")
    level = min(depth, family.depth, x_tree.min_depth())
    x_set = to_interval_set(x_tree, level)
    m_union = family.union_set(level)
    m_items = m_union.intervals
    m_los = [iv.lo for iv in m_items]
    inv = 1 / lam
    x_div = [(iv.lo * inv, iv.hi * inv) for iv in x_set.intervals]
    scale = abs(lam)
    records = []
    for raw in targets:
        r = as_rational(raw)
        rq = r * inv
        witness = None
        best: Optional[Fraction] = None
        for xlo, xhi in x_div:
            t_lo, t_hi = rq - xhi, rq - xlo
            if t_lo > t_hi:
                t_lo, t_hi = t_hi, t_lo
            i = bisect_right(m_los, t_hi) - 1
            if i >= 0 and m_items[i].hi >= t_lo:
                mm = max(t_lo, m_items[i].lo)
                witness = r - lam * mm
                break
            if i >= 0:
                d = (t_lo - m_items[i].hi) * scale
                best = d if best is None else min(best, d)
            if i + 1 < len(m_items):
                d = (m_items[i + 1].lo - t_hi) * scale
                best = d if best is None else min(best, d)
        if witness is not None:
            records.append(CoverageRecord(r, True, witness))
        else:
            records.append(CoverageRecord(r, False, None, best))
    return CoverageReport(lam, tuple(records))


def escape_to_coverage_params(
    lam_prime: RationalLike, t: RationalLike
) -> tuple[Fraction, Fraction]:
    """Translate escape parameters into the equivalent coverage probe.

    If (lam' X + t) misses M, then the target -t/lam' is not covered by
    X + (-1/lam') M, and conversely; the two probes must always agree.
    """
    lam_prime = as_rational(lam_prime)
    t = as_rational(t)
    if lam_prime == 0:
        raise InvalidParameterError("escape parameters need a nonzero scale")
    return Fraction(-1, 1) / lam_prime, -t / lam_prime
