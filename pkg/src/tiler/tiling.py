"""Square tilings of the unit cylinder.

Each edge of a solved instance becomes a rectangle of width |flow| and
height |dh|, positioned by circular width coordinates assigned on the dual
graph: crossing a dart from its right face to its left face advances the
coordinate by the dart's flow, mod 1.  Killed instances are first closed
up by a ground vertex star-joined to the sinks inside their common face,
which makes those sums path-independent.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .arcs import ArcSet
from .errors import GraphFormatError, TilingError
from .graph import DualGraph, PlanarGraph, build_dual, trace_faces
from .harmonic import HarmonicProfile, killed_profile, normalize_flow

TILING_SCHEMA = "tiler-tiling/1"

GROUND = "__ground__"


# ---------------------------------------------------------------- types


@dataclass
class Rectangle:
    """Axis-aligned rectangle on the cylinder; w_start is circular."""

    edge_id: object
    w_start: float
    width: float
    h_low: float
    h_high: float
    degenerate: bool = False
    exact: tuple | None = None  # (w_start, width, h_low, h_high) Fractions

    @property
    def area(self) -> float:
        return self.width * (self.h_high - self.h_low)

    def span(self) -> tuple:
        return self.w_start, self.width


@dataclass
class VertexInterval:
    """Circular arc swept by a vertex, at its height."""

    vertex_id: object
    height: float
    arcs: ArcSet
    w_start: float
    width: float
    fragmented: bool = False
    exact: tuple | None = None  # (w_start, width) Fractions


@dataclass
class Tiling:
    graph: PlanarGraph              # normalized instance actually tiled
    profile: HarmonicProfile
    rectangles: list                # one Rectangle per edge, edge order
    vertex_intervals: list          # one VertexInterval per vertex
    widths: list                    # per augmented face
    zeta: int                       # reference face index, width 0
    exact: bool = False
    circumference: float = 1.0

    def rectangle(self, edge_id) -> Rectangle:
        return self.rectangles[self.graph.eindex[edge_id]]

    def interval(self, vertex_id) -> VertexInterval:
        return self.vertex_intervals[self.graph.vindex[vertex_id]]


# ------------------------------------------------------- ground augmentation


def ground_augment(g: PlanarGraph, flow):
    """Join a ground vertex to every sink inside their common face.

    Returns (augmented graph, per-edge flows extended with the ground
    inflows, list of ground edge ids).  The flows argument is indexed per
    edge along canonical darts; Fractions lists stay exact.  The sinks
    must all lie on one face; the ground edges enter each sink at its
    first corner of that face, and the ground vertex's rotation runs in
    reverse corner order, which keeps the embedding planar.
    """
    if not g.sinks:
        raise TilingError("ground augmentation needs sinks")
    faces = trace_faces(g)
    sinks = set(g.sinks)
    bottom = None
    for f, cyc in enumerate(faces.cycles):
        verts = {int(g.tail[d]) for d in cyc}
        if sinks <= verts:
            bottom = f
            break
    if bottom is None:
        raise TilingError("sinks are not co-facial; no bottom face")

    # divergence per sink from the given flows
    def div(x: int):
        total = flow[0] * 0
        for d in g.out_darts(x):
            f = flow[d >> 1]
            total = total + (f if (d & 1) == 0 else -f)
        return total

    # first corner of the bottom face at each sink, in walk order
    corner: dict[int, int] = {}   # sink -> arriving dart
    order: list[int] = []
    for d in faces.cycles[bottom]:
        b = int(g.head[d])
        if b in sinks and b not in corner:
            corner[b] = d
            order.append(b)
    if len(order) != len(sinks):
        raise TilingError("sinks are not co-facial; no bottom face")

    if GROUND in g.vindex:
        raise GraphFormatError(f"vertex id {GROUND!r} is reserved")
    rot = g.rotation_lists()
    edges = [(g.edge_ids[e], g.vertex_ids[int(g.tail[2 * e])],
              g.vertex_ids[int(g.head[2 * e])], g.conductance_exact[e])
             for e in range(g.m)]
    ground_ids = []
    exact = not isinstance(flow, np.ndarray)
    flows_ext = list(flow) if exact else flow.tolist()
    for i, b in enumerate(order):
        gid = f"{GROUND}{i}"
        bid = g.vertex_ids[b]
        edges.append((gid, bid, GROUND, 1))
        ground_ids.append(gid)
        flows_ext.append(-div(b))   # inflow at the sink drains to ground
        # insert at the corner: between the face's in-dart reversed and its
        # out-dart, i.e. immediately before rev(arrival) in b's rotation
        d = corner[b]
        rev_id = g.dart_id(d ^ 1)
        lst = rot[bid]
        lst.insert(lst.index(rev_id), gid + "+")
    # the star's rotation follows the corner walk order: face tracing then
    # pairs each ground spoke with the stretch of the old face before it
    rot[GROUND] = [gid + "-" for gid in ground_ids]

    g2 = PlanarGraph(list(g.vertex_ids) + [GROUND], edges, rot,
                     root=g.vertex_ids[g.root] if g.root is not None else None,
                     sinks=[g.vertex_ids[s] for s in g.sinks],
                     kind=g.kind, provenance=g.provenance, validate=False)
    flows_out = flows_ext if exact else np.asarray(flows_ext)
    return g2, flows_out, ground_ids


# ------------------------------------------------------------- dual widths


def _dart_flow(flow, d: int):
    f = flow[d >> 1]
    return f if (d & 1) == 0 else -f


def assign_dual_widths(g: PlanarGraph, dual: DualGraph, flow, *,
                       zeta: int | None = None, tol: float = 1e-9):
    """Width coordinate per face, propagated from zeta by w(L) = w(R) + flow.

    flow may be a HarmonicProfile, a per-edge float array, or a per-edge
    Fraction list (exact mod-1 arithmetic).  Every non-tree crossing must
    close up mod 1 within tol; a violation means the flow is inconsistent
    (not uniquely absorbing).
    """
    if isinstance(flow, HarmonicProfile):
        flow = flow.flow_exact if flow.exact else flow.flow
    exact = not isinstance(flow, np.ndarray)
    faces = dual.faces
    nf = len(faces.cycles)
    if zeta is None:
        if g.root is None:
            raise TilingError("no root to anchor the reference face")
        d0 = g.first_dart[g.root]
        zeta = int(faces.dart_face[d0])

    one = Fraction(1) if exact else 1.0
    w = [None] * nf
    w[zeta] = one * 0
    stack = [zeta]
    worst = 0.0
    while stack:
        f = stack.pop()
        for d in faces.cycles[f]:
            # f is left of d; the face across d is its right face
            other = int(faces.dart_face[d ^ 1])
            expect = (w[f] - _dart_flow(flow, d)) % one
            if w[other] is None:
                w[other] = expect
                stack.append(other)
            else:
                dev = (expect - w[other]) % one
                err = min(dev, one - dev)
                if err > tol:
                    raise TilingError(
                        "not uniquely absorbing / inconsistent flow: "
                        f"cycle sum {float(err):g} at face {other}")
                worst = max(worst, float(err))
    if any(x is None for x in w):
        raise TilingError("dual graph is disconnected")
    return w


# ------------------------------------------------------------- placement


def _merge_spans(spans, tol, one):
    """Merge circular (start, width) spans; returns (segments, total).

    Segments come back as (start, end) with 0 <= start < 1, start < end
    <= start + 1 (a segment may wrap the seam).  Exact inputs merge on
    exact adjacency (tol 0); floats within tol.
    """
    items = [((s % one), w) for s, w in spans if w > 0]
    if not items:
        return [], one * 0
    total = sum(w for _, w in items)
    if total >= one:
        return [(one * 0, one)], one
    items.sort()
    merged = [(items[0][0], items[0][0] + items[0][1])]
    for s, wd in items[1:]:
        ps, pe = merged[-1]
        if s - pe <= tol:
            merged[-1] = (ps, pe if pe > s + wd else s + wd)
        else:
            merged.append((s, s + wd))
    # circular: last may wrap onto first
    if len(merged) > 1:
        s0, e0 = merged[0]
        sl, el = merged[-1]
        if (s0 + one) - el <= tol:
            merged[0] = (sl, e0 + one)
            merged.pop()
    return merged, total


def place_rectangles(g: PlanarGraph, profile: HarmonicProfile, widths,
                     dual: DualGraph | None = None) -> Tiling:
    """One rectangle per edge, between the endpoint heights.

    The rectangle of edge e starts at the width of the face to the right
    of e's downward dart and extends by the flow through e; zero-flow
    edges keep zero-width rectangles, flagged degenerate.
    """
    if dual is None:
        dual = build_dual(g)
    exact = profile.exact and not isinstance(widths, np.ndarray) \
        and (not widths or isinstance(widths[0], Fraction))
    faces = dual.faces
    one = Fraction(1) if exact else 1.0
    h = profile.h_exact if exact else profile.h
    flow = profile.flow_exact if exact else profile.flow

    rectangles = []
    for e in range(g.m):
        u, v = int(g.tail[2 * e]), int(g.head[2 * e])
        down = 2 * e if h[u] >= h[v] else 2 * e + 1
        t_, h_ = int(g.tail[down]), int(g.head[down])
        f = _dart_flow(flow, down)
        right = int(faces.dart_face[down ^ 1])
        ws = widths[right] % one
        width = f
        degenerate = (h[t_] == h[h_]) or f == 0
        if width < 0:
            # zero-height edges can carry float-noise negative flow
            if not degenerate and float(-width) > 1e-12:
                raise TilingError(
                    f"negative flow {float(width):g} on downward dart of "
                    f"edge {g.edge_ids[e]!r}")
            width = -width
        rect = Rectangle(edge_id=g.edge_ids[e], w_start=float(ws),
                         width=float(width), h_low=float(h[h_]),
                         h_high=float(h[t_]), degenerate=bool(degenerate))
        if exact:
            rect.exact = (ws, width, h[h_], h[t_])
        rectangles.append(rect)

    intervals = _vertex_intervals(g, profile, rectangles, exact)
    return Tiling(graph=g, profile=profile, rectangles=rectangles,
                  vertex_intervals=intervals,
                  widths=list(widths), zeta=-1, exact=exact)


def _vertex_intervals(g, profile, rectangles, exact):
    one = Fraction(1) if exact else 1.0
    h = profile.h_exact if exact else profile.h
    above = [[] for _ in range(g.n)]   # spans of edges seen from below
    below = [[] for _ in range(g.n)]
    for e, rect in enumerate(rectangles):
        u, v = int(g.tail[2 * e]), int(g.head[2 * e])
        top, bot = (u, v) if h[u] >= h[v] else (v, u)
        span = rect.exact[:2] if exact else (rect.w_start, rect.width)
        below[top].append(span)
        above[bot].append(span)

    tol = 0 if exact else 1e-9
    out = []
    for x in range(g.n):
        spans = above[x] if above[x] else below[x]
        if x == g.root:
            arcs = ArcSet.full()
            out.append(VertexInterval(
                vertex_id=g.vertex_ids[x], height=float(h[x]), arcs=arcs,
                w_start=0.0, width=1.0,
                exact=(Fraction(0), Fraction(1)) if exact else None))
            continue
        segs, total = _merge_spans(spans, tol, one)
        if segs:
            ws, we = max(segs, key=lambda se: se[1] - se[0])
        else:
            ws, we = one * 0, one * 0
        frag = len(segs) > 1
        arcs = ArcSet.empty()
        for s, e in segs:
            arcs = arcs.union(
                ArcSet.from_start_width(float(s % one), float(e - s)))
        out.append(VertexInterval(
            vertex_id=g.vertex_ids[x], height=float(h[x]), arcs=arcs,
            w_start=float(ws % one), width=float(we - ws), fragmented=frag,
            exact=(ws % one, we - ws) if exact else None))
    return out


# ------------------------------------------------------------ the pipeline


def build_tiling(profile: HarmonicProfile, *, tol: float = 1e-9) -> Tiling:
    """Widths, rectangles, and intervals from a solved profile.

    Normalizes the profile if needed, grounds the sinks, assigns widths on
    the augmented dual, and places rectangles for the original edges only.
    """
    g = profile.graph
    if g.root is None:
        raise TilingError("tiling needs a rooted instance")
    if g.m == 0:
        return _empty_tiling(profile)
    if profile.exact:
        if profile.eta_exact != 1:
            profile = normalize_flow(profile)
    elif abs(profile.eta - 1.0) > tol:
        profile = normalize_flow(profile)
    g = profile.graph

    flow = profile.flow_exact if profile.exact else profile.flow
    g2, flow2, _ = ground_augment(g, flow)
    dual2 = build_dual(g2)
    if not dual2.euler_check():
        raise TilingError("augmented embedding fails the Euler check")
    widths = assign_dual_widths(g2, dual2, flow2, tol=tol)

    # rectangles for the original edges only; face data from the augmented
    # trace (original darts keep their ids 0..2m-1)
    tiling = place_rectangles(_restricted_view(g, g2), profile, widths, dual2)
    d0 = g2.first_dart[g2.root]
    tiling.zeta = int(dual2.faces.dart_face[d0])
    return tiling


def _restricted_view(g: PlanarGraph, g2: PlanarGraph) -> PlanarGraph:
    # the first m edges of the augmented graph are the original ones, with
    # identical dart numbering, so g works as the placement view directly
    for e in range(g.m):
        if g.edge_ids[e] != g2.edge_ids[e]:
            raise TilingError("augmentation reordered the edges")
    return g


def _empty_tiling(profile: HarmonicProfile) -> Tiling:
    g = profile.graph
    intervals = [VertexInterval(vertex_id=g.vertex_ids[x],
                                height=float(profile.h[x]),
                                arcs=ArcSet.full() if x == g.root else ArcSet.empty(),
                                w_start=0.0,
                                width=1.0 if x == g.root else 0.0)
                 for x in range(g.n)]
    return Tiling(graph=g, profile=profile, rectangles=[],
                  vertex_intervals=intervals, widths=[], zeta=0,
                  exact=profile.exact)


def tile_killed(g: PlanarGraph, *, method: str = "direct",
                tol: float = 1e-9, solver_tol: float = 1e-10) -> Tiling:
    """Full pipeline for a finite killed instance."""
    if g.root is None:
        raise TilingError("tiling needs a rooted instance")
    if g.m == 0:
        h = np.ones(1)
        prof = HarmonicProfile(graph=g, h=h, flow=np.zeros(0), eta=0.0,
                               pi=np.zeros(1), mode="killed-at-sinks",
                               residual=0.0)
        return _empty_tiling(prof)
    profile = killed_profile(g, method=method, tol=solver_tol)
    return build_tiling(profile, tol=tol)


# ------------------------------------------------------------------ audit


@dataclass
class TilingAudit:
    total_area: float
    area_vs_energy: float
    max_aspect_dev: float
    max_overlap: float
    max_coverage_gap: float
    covered_range: tuple
    degenerate_edges: list
    fragmented_vertices: list
    band_max_vertex_width: list      # (h_low, h_high, max width) per band
    exact_clean: bool | None         # exact pipeline: all identities exact
    tolerance: float
    passed: bool

    def failures(self) -> list:
        out = []
        if self.max_aspect_dev > self.tolerance:
            out.append(f"aspect deviation {self.max_aspect_dev:g}")
        if self.max_overlap > self.tolerance:
            out.append(f"interior overlap {self.max_overlap:g}")
        if self.max_coverage_gap > self.tolerance:
            out.append(f"coverage gap {self.max_coverage_gap:g}")
        if abs(self.area_vs_energy) > self.tolerance:
            out.append(f"area vs energy {self.area_vs_energy:g}")
        return out


def audit_tiling(t: Tiling, tol: float = 1e-7) -> TilingAudit:
    """Geometric identities of a tiling; failures are report entries."""
    g = t.graph
    prof = t.profile
    if t.exact:
        return _audit_exact(t, tol)

    area = float(sum(r.area for r in t.rectangles))
    dh = np.abs(prof.h[g.tail[0::2]] - prof.h[g.head[0::2]])
    energy = float(np.dot(np.abs(prof.flow), dh))

    aspect = 0.0
    for e, r in enumerate(t.rectangles):
        hgt = r.h_high - r.h_low
        if hgt > 0:
            c = float(g.conductance[e])
            aspect = max(aspect, abs(r.width / hgt - c) / max(c, 1.0))

    overlap, gap, lo, hi, bands = _sweep_bands(
        [r for r in t.rectangles if not r.degenerate],
        [(iv.height, iv.width) for iv in t.vertex_intervals], tol)

    audit = TilingAudit(
        total_area=area, area_vs_energy=area - energy,
        max_aspect_dev=aspect, max_overlap=overlap, max_coverage_gap=gap,
        covered_range=(lo, hi),
        degenerate_edges=[r.edge_id for r in t.rectangles if r.degenerate],
        fragmented_vertices=[iv.vertex_id for iv in t.vertex_intervals
                             if iv.fragmented],
        band_max_vertex_width=bands, exact_clean=None, tolerance=tol,
        passed=False)
    audit.passed = not audit.failures()
    return audit


def _sweep_bands(rects, vertex_points, tol):
    """Slab sweep: per height band, spans must tile the circle exactly."""
    if not rects:
        return 0.0, 0.0, 0.0, 0.0, []
    cuts = sorted({r.h_low for r in rects} | {r.h_high for r in rects})
    merged = [cuts[0]]
    for cval in cuts[1:]:
        if cval - merged[-1] > tol:
            merged.append(cval)
    overlap = 0.0
    gap = 0.0
    bands = []
    for lo, hi in zip(merged, merged[1:]):
        mid = 0.5 * (lo + hi)
        active = [(r.w_start, r.width) for r in rects
                  if r.h_low <= mid < r.h_high]
        o, gp = _band_check(active, 1.0)
        overlap = max(overlap, o)
        gap = max(gap, gp)
        vmax = max((w for h, w in vertex_points if lo <= h <= hi),
                   default=0.0)
        bands.append((lo, hi, vmax))
    return overlap, gap, merged[0], merged[-1], bands


def _band_check(active, one):
    """Max pairwise overlap and coverage deficit of circular spans."""
    if not active:
        return 0.0, float(one)
    total = sum(w for _, w in active)
    spans = sorted((s % one, w) for s, w in active if w > 0)
    overlap = one * 0
    for (s1, w1), (s2, w2) in zip(spans, spans[1:]):
        if s1 + w1 > s2:
            overlap = max(overlap, s1 + w1 - s2)
    if spans:
        s_first, _ = spans[0]
        s_last, w_last = spans[-1]
        if s_last + w_last - one > s_first:
            overlap = max(overlap, s_last + w_last - one - s_first)
    return float(overlap), abs(float(total - one))


def _audit_exact(t: Tiling, tol: float) -> TilingAudit:
    g = t.graph
    prof = t.profile
    area = Fraction(0)
    energy = Fraction(0)
    aspect_clean = True
    aspect = 0.0
    for e, r in enumerate(t.rectangles):
        ws, wd, hl, hh = r.exact
        area += wd * (hh - hl)
        energy += abs(prof.flow_exact[e]) * abs(hh - hl)
        if hh != hl:
            c = g.conductance_exact[e]
            dev = abs(wd / (hh - hl) - c)
            if dev != 0:
                aspect_clean = False
                aspect = max(aspect, float(dev / max(c, 1)))

    rects = [r.exact for r in t.rectangles if not r.degenerate]
    cuts = sorted({x for r in rects for x in (r[2], r[3])})
    overlap = Fraction(0)
    gap = Fraction(0)
    bands = []
    vpoints = [(iv.height, iv.width) for iv in t.vertex_intervals]
    for lo, hi in zip(cuts, cuts[1:]):
        mid = (lo + hi) / 2
        active = [(r[0], r[1]) for r in rects if r[2] <= mid < r[3]]
        o, gp = _band_check_exact(active)
        overlap = max(overlap, o)
        gap = max(gap, gp)
        vmax = max((w for h, w in vpoints if lo <= h <= hi), default=0.0)
        bands.append((float(lo), float(hi), float(vmax)))

    audit = TilingAudit(
        total_area=float(area), area_vs_energy=float(area - energy),
        max_aspect_dev=aspect, max_overlap=float(overlap),
        max_coverage_gap=float(gap),
        covered_range=(float(cuts[0]) if cuts else 0.0,
                       float(cuts[-1]) if cuts else 0.0),
        degenerate_edges=[r.edge_id for r in t.rectangles if r.degenerate],
        fragmented_vertices=[iv.vertex_id for iv in t.vertex_intervals
                             if iv.fragmented],
        band_max_vertex_width=bands,
        exact_clean=aspect_clean and area == energy and overlap == 0
        and gap == 0,
        tolerance=tol, passed=False)
    audit.passed = not audit.failures()
    return audit


def _band_check_exact(active):
    one = Fraction(1)
    if not active:
        return Fraction(0), one
    total = sum((w for _, w in active), Fraction(0))
    spans = sorted((s % one, w) for s, w in active if w > 0)
    overlap = Fraction(0)
    for (s1, w1), (s2, w2) in zip(spans, spans[1:]):
        if s1 + w1 > s2:
            overlap = max(overlap, s1 + w1 - s2)
    if spans:
        s_first, _ = spans[0]
        s_last, w_last = spans[-1]
        if s_last + w_last - one > s_first:
            overlap = max(overlap, s_last + w_last - one - s_first)
    return overlap, abs(total - one)


# --------------------------------------------- subdivision and cross-cuts


def collapse_dummies(t: Tiling) -> dict:
    """Rectangles keyed by pre-subdivision edge id, halves re-joined.

    Dummy vertices carry provenance {"edge", "upper_half", "lower_half"};
    the two halves of a subdivided edge share their width span and stack
    vertically, so the join is their common span with the union height.
    """
    g = t.graph
    out = {}
    halves = {}
    for vid, info in g.provenance.items():
        if isinstance(info, dict) and "edge" in info:
            halves[info["upper_half"]] = (info["edge"], "upper")
            halves[info["lower_half"]] = (info["edge"], "lower")
    for r in t.rectangles:
        if r.edge_id not in halves:
            out[r.edge_id] = r
    pairs: dict = {}
    for r in t.rectangles:
        if r.edge_id in halves:
            eid, _ = halves[r.edge_id]
            pairs.setdefault(eid, []).append(r)
    for eid, rs in pairs.items():
        if len(rs) != 2:
            raise TilingError(f"edge {eid!r} has {len(rs)} halves")
        a, b = rs
        if t.exact:
            if a.exact[0] != b.exact[0] or a.exact[1] != b.exact[1]:
                raise TilingError(f"halves of {eid!r} disagree on their span")
            lo = min(a.exact[2], b.exact[2])
            hi = max(a.exact[3], b.exact[3])
            merged = Rectangle(edge_id=eid, w_start=float(a.exact[0]),
                               width=float(a.exact[1]), h_low=float(lo),
                               h_high=float(hi),
                               degenerate=a.degenerate and b.degenerate,
                               exact=(a.exact[0], a.exact[1], lo, hi))
        else:
            merged = Rectangle(edge_id=eid, w_start=a.w_start,
                               width=a.width, h_low=min(a.h_low, b.h_low),
                               h_high=max(a.h_high, b.h_high),
                               degenerate=a.degenerate and b.degenerate)
        out[eid] = merged
    return out


def cross_section(t: Tiling, level: float) -> list:
    """Spans of the rectangles crossing a horizontal line, sorted."""
    hits = []
    for r in t.rectangles:
        if r.h_low <= level < r.h_high and not r.degenerate:
            hits.append((r.w_start, r.width, r.edge_id))
    return sorted(hits)


def affine_match(shallow: Tiling, deep: Tiling, level: float) -> float:
    """Max deviation between a shallow tiling and the rescaled deep one.

    The shallow instance is the deep one killed at the given height level;
    its heights relate to the deep ones by h -> (h - level)/(1 - level).
    Rectangles are compared by edge id; deep edges are matched whole or as
    their upper halves when the level cut split them.
    """
    scale = 1.0 / (1.0 - level)
    dev = 0.0
    deep_by_id = {r.edge_id: r for r in deep.rectangles}
    for r in shallow.rectangles:
        cand = deep_by_id.get(r.edge_id)
        if cand is None and isinstance(r.edge_id, str) and r.edge_id.endswith("~a"):
            cand = deep_by_id.get(r.edge_id[:-2])
        if cand is None:
            return float("inf")
        lo = max(cand.h_low, level)
        dev = max(dev,
                  abs(r.w_start - cand.w_start),
                  abs(r.width - cand.width),
                  abs(r.h_low - (lo - level) * scale),
                  abs(r.h_high - (cand.h_high - level) * scale))
    return dev


# ------------------------------------------------------------------- io


def tiling_to_json(t: Tiling, audit: TilingAudit | None = None) -> dict:
    g = t.graph
    data = {
        "schema": TILING_SCHEMA,
        "circumference": 1.0,
        "zeta": t.zeta,
        "exact": t.exact,
        "rectangles": [
            {"edge": str(r.edge_id), "w_start": r.w_start, "width": r.width,
             "h_low": r.h_low, "h_high": r.h_high,
             "degenerate": r.degenerate}
            for r in t.rectangles],
        "vertex_intervals": [
            {"vertex": str(iv.vertex_id), "height": iv.height,
             "w_start": iv.w_start, "width": iv.width,
             "fragmented": iv.fragmented}
            for iv in t.vertex_intervals],
    }
    if audit is not None:
        data["audit"] = {
            "total_area": audit.total_area,
            "area_vs_energy": audit.area_vs_energy,
            "max_aspect_dev": audit.max_aspect_dev,
            "max_overlap": audit.max_overlap,
            "max_coverage_gap": audit.max_coverage_gap,
            "passed": audit.passed,
        }
    return data
