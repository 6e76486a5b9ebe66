"""Half-open arc sets on the unit circle R/Z.

Arcs are finite unions of [a, b) intervals.  The canonical representation
is unrolled to [0, 1): seam-crossing arcs are stored as a trailing piece
[a, 1) plus a leading piece [0, b), and adjacent pieces are always merged.
All set operations move endpoints around without doing arithmetic on them,
so unions, intersections and complements are exact on float coordinates.
"""

from __future__ import annotations


def _norm_point(x):
    x = x % 1
    return x if x != 1 else type(x)(0)


class ArcSet:
    """Normalized union of half-open arcs on the circle."""

    __slots__ = ("segments",)

    def __init__(self, segments=()):
        # segments: iterable of (a, b) with 0 <= a < b <= 1, already disjoint
        # only trusted internal callers pass segments directly
        self.segments = tuple(segments)

    # ---------------------------------------------------------------- build

    @classmethod
    def empty(cls) -> "ArcSet":
        return cls(())

    @classmethod
    def full(cls) -> "ArcSet":
        return cls(((0.0, 1.0),))

    @classmethod
    def from_pairs(cls, pairs) -> "ArcSet":
        """Build from (start, end) pairs read counterclockwise.

        start == end is rejected: it is ambiguous between the empty and the
        full circle.  Use empty()/full() for those.
        """
        raw = []
        for a, b in pairs:
            a = _norm_point(a)
            b = _norm_point(b)
            if a == b:
                raise ValueError("arc with start == end is ambiguous")
            if a < b:
                raw.append((a, b))
            else:
                raw.append((a, 1.0))
                if b > 0:
                    raw.append((0.0, b))
        return cls._union_raw(raw)

    @classmethod
    def from_start_width(cls, start, width) -> "ArcSet":
        """Arc [start, start + width) of the given width in (0, 1]."""
        if width <= 0:
            return cls.empty()
        if width >= 1:
            return cls.full()
        a = _norm_point(start)
        b = a + width
        if b <= 1:
            return cls(((a, b),))
        return cls._union_raw([(a, 1.0), (0.0, b - 1)])

    @classmethod
    def _union_raw(cls, raw) -> "ArcSet":
        if not raw:
            return cls.empty()
        out = cls.empty()
        return _sweep([cls(tuple(sorted(raw))), out], lambda c: c[0] > 0)

    # ---------------------------------------------------------------- query

    @property
    def is_empty(self) -> bool:
        return not self.segments

    def length(self):
        return sum(b - a for a, b in self.segments)

    def contains(self, x) -> bool:
        x = _norm_point(x)
        for a, b in self.segments:
            if a <= x < b:
                return True
            if a > x:
                break
        return False

    def contains_arc(self, start, width) -> bool:
        """True if the whole arc [start, start+width) lies inside the set."""
        if width <= 0:
            return True
        if width > 1:
            return False
        s = _norm_point(start)
        for a, b in self.segments:
            if a <= s < b:
                if s + width <= b:
                    return True
                if b == 1.0 and self.segments and self.segments[0][0] == 0.0:
                    # continue across the seam into the leading piece
                    return s + width - 1 <= self.segments[0][1]
                return False
        return False

    def endpoints(self):
        pts = []
        for a, b in self.segments:
            pts.append(a)
            if b < 1:
                pts.append(b)
        return pts

    # ------------------------------------------------------------- algebra

    def union(self, other: "ArcSet") -> "ArcSet":
        return _sweep([self, other], lambda c: c[0] > 0 or c[1] > 0)

    def intersection(self, other: "ArcSet") -> "ArcSet":
        return _sweep([self, other], lambda c: c[0] > 0 and c[1] > 0)

    def complement(self) -> "ArcSet":
        return _sweep([self], lambda c: c[0] == 0)

    def difference(self, other: "ArcSet") -> "ArcSet":
        return _sweep([self, other], lambda c: c[0] > 0 and c[1] == 0)

    def symmetric_difference(self, other: "ArcSet") -> "ArcSet":
        return _sweep([self, other], lambda c: (c[0] > 0) != (c[1] > 0))

    # ---------------------------------------------------------------- misc

    def __eq__(self, other):
        return isinstance(other, ArcSet) and self.segments == other.segments

    def __hash__(self):
        return hash(self.segments)

    def __repr__(self):
        inner = ", ".join(f"[{a!r}, {b!r})" for a, b in self.segments)
        return f"ArcSet({inner})"

    def to_json(self):
        return [[a, b] for a, b in self.segments]

    @classmethod
    def from_json(cls, data) -> "ArcSet":
        segs = [(float(a), float(b)) for a, b in data]
        return cls._union_raw(segs)


def _sweep(sets, pred) -> ArcSet:
    """Boundary sweep over [0, 1).

    Segment starts sort before segment ends at equal coordinates, so a set
    like [a,b) u [b,c) never drops coverage at b and merges exactly.
    """
    events = []  # (x, order, set_index, delta)
    for i, s in enumerate(sets):
        for a, b in s.segments:
            events.append((a, 0, i, 1))
            events.append((b, 1, i, -1))
    counts = [0] * len(sets)
    events.sort(key=lambda e: (e[0], e[1]))
    out = []
    active = pred(counts)
    seg_start = 0.0 if active else None
    k = 0
    n = len(events)
    while k < n:
        x = events[k][0]
        while k < n and events[k][0] == x:
            _, _, i, d = events[k]
            counts[i] += d
            k += 1
        now = pred(counts)
        if now and not active:
            seg_start = x
            active = True
        elif active and not now:
            if seg_start < x:
                out.append((seg_start, x))
            active = False
            seg_start = None
    if active and seg_start is not None and seg_start < 1.0:
        out.append((seg_start, 1.0))
    return ArcSet(tuple(out))


def circular_distance(a, b) -> float:
    """Shortest distance between two points on R/Z."""
    d = abs((a % 1) - (b % 1))
    return min(d, 1 - d)
