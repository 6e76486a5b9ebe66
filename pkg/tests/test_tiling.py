import dataclasses
import json
import math
import random
from fractions import Fraction

import numpy as np
import pytest

from tiler import families
from tiler.graph import build_dual, cut_at_level, subdivide_edge
from tiler.tiling import (
    TilingError,
    affine_match,
    assign_dual_widths,
    audit_tiling,
    collapse_dummies,
    cross_section,
    tile_killed,
    tiling_to_json,
)

# hand-solved square tiling of the 4-cycle with a chord
CHORD_RECTS = {
    "a": (Fraction(5, 8), Fraction(3, 8), Fraction(0), Fraction(1)),
    "b": (Fraction(0), Fraction(1, 8), Fraction(0), Fraction(1, 3)),
    "c": (Fraction(1, 8), Fraction(1, 8), Fraction(0), Fraction(1, 3)),
    "d": (Fraction(1, 4), Fraction(3, 8), Fraction(0), Fraction(1)),
    "x": (Fraction(0), Fraction(1, 4), Fraction(1, 3), Fraction(1)),
}


def test_cycle_chord_rectangles_are_the_known_squares():
    t = tile_killed(families.cycle_chord())
    for eid, (w0, w, lo, hi) in CHORD_RECTS.items():
        r = t.rectangle(eid)
        assert abs(r.w_start - float(w0)) < 1e-12
        assert abs(r.width - float(w)) < 1e-12
        assert abs(r.h_low - float(lo)) < 1e-12
        assert abs(r.h_high - float(hi)) < 1e-12
        assert not r.degenerate
    assert t.circumference == 1.0


def test_cycle_chord_exact_route_is_exact():
    t = tile_killed(families.cycle_chord(), method="exact")
    assert t.exact
    for eid, coords in CHORD_RECTS.items():
        assert t.rectangle(eid).exact == coords
    audit = audit_tiling(t)
    assert audit.passed and audit.exact_clean


def test_float_route_tracks_exact_route():
    g = families.make_family("perturbed-tree", depth=5, seed=7)
    tf = tile_killed(g)
    te = tile_killed(g, method="exact")
    for rf in tf.rectangles:
        re = te.rectangle(rf.edge_id)
        assert abs(rf.w_start - re.w_start) < 1e-9
        assert abs(rf.width - re.width) < 1e-9


@pytest.mark.parametrize(
    "graph",
    [
        families.cycle_chord(),
        families.bary_tree(5),
        families.make_family("perturbed-tree", depth=5, seed=7),
        families.z2_half_disc(radius=5),
        families.hyperbolic_disc(3, 7, layers=3),
    ],
)
def test_audit_passes_on_families(graph):
    t = tile_killed(graph)
    a = audit_tiling(t)
    assert a.passed, a.failures()
    assert abs(a.total_area - 1.0) < 1e-9
    assert abs(a.area_vs_energy) < 1e-9
    assert a.covered_range == (0.0, 1.0)
    assert a.max_overlap < 1e-9 and a.max_coverage_gap < 1e-9
    assert a.max_aspect_dev < 1e-7


def test_root_and_sink_intervals_wrap_the_circle():
    t = tile_killed(families.cycle_chord())
    root = t.interval("1")
    assert root.width == 1.0 and root.height == 1.0
    sink_sum = math.fsum(t.interval(t.graph.vertex_ids[s]).width
                         for s in t.graph.sinks)
    assert abs(sink_sum - 1.0) < 1e-9
    # sink 2 owns the wrapping arc [5/8, 1) + [0, 1/8)
    two = t.interval("2")
    assert two.arcs.endpoints() == [0.0, 0.125, 0.625]
    assert abs(two.width - 0.5) < 1e-12


def test_chord_interval_sits_between_its_rectangles():
    t = tile_killed(families.cycle_chord())
    iv = t.interval("3")
    assert abs(iv.height - 1 / 3) < 1e-12
    assert not iv.fragmented
    assert iv.arcs.endpoints() == [0.0, 0.25]


def test_zero_flow_edge_is_degenerate_but_audit_passes():
    t = tile_killed(families.z2_half_disc(radius=4))
    a = audit_tiling(t)
    assert a.passed
    assert a.degenerate_edges
    r = t.rectangle(a.degenerate_edges[0])
    assert r.degenerate and r.area == 0.0


def test_tampered_width_fails_audit():
    t = tile_killed(families.cycle_chord())
    i = next(k for k, r in enumerate(t.rectangles) if r.edge_id == "a")
    t.rectangles[i] = dataclasses.replace(
        t.rectangles[i], width=t.rectangles[i].width * 1.01)
    a = audit_tiling(t)
    assert not a.passed
    assert a.failures()


def test_inconsistent_flow_is_rejected():
    g = families.cycle_chord()
    junk = np.array([0.3, 0.1, 0.2, 0.25, 0.4])
    with pytest.raises(TilingError):
        assign_dual_widths(g, build_dual(g), junk)


def test_collapse_rejoins_subdivided_edges_exactly():
    g = subdivide_edge(families.cycle_chord(), "x", Fraction(1, 3))
    t = tile_killed(g, method="exact")
    joined = collapse_dummies(t)
    base = tile_killed(families.cycle_chord(), method="exact")
    assert set(joined) == set(base.graph.edge_ids)
    for eid in base.graph.edge_ids:
        assert joined[eid].exact == base.rectangle(eid).exact


def test_collapse_tracks_original_under_random_subdivision():
    rng = random.Random(5)
    base_g = families.make_family("perturbed-tree", depth=4, seed=9)
    base = tile_killed(base_g)
    g = base_g
    for eid in rng.sample(base_g.edge_ids, 6):
        g = subdivide_edge(g, eid, Fraction(rng.randrange(1, 16), 16))
    t = tile_killed(g)
    joined = collapse_dummies(t)
    for eid in base_g.edge_ids:
        r0, r1 = base.rectangle(eid), joined[eid]
        assert abs(r0.w_start - r1.w_start) < 1e-9
        assert abs(r0.width - r1.width) < 1e-9
        assert abs(r0.h_low - r1.h_low) < 1e-9
        assert abs(r0.h_high - r1.h_high) < 1e-9


@pytest.mark.parametrize("level", [0.15, 0.5, 0.87])
def test_cross_section_partitions_the_circle(level):
    t = tile_killed(families.make_family("perturbed-tree", depth=5, seed=7))
    spans = cross_section(t, level)
    assert spans == sorted(spans)
    total = math.fsum(w for _, w, _ in spans)
    assert abs(total - 1.0) < 1e-9
    for (s0, w0, _), (s1, _, _) in zip(spans, spans[1:]):
        assert s1 >= s0 + w0 - 1e-12


def test_upper_part_is_an_affine_copy():
    g = families.bary_tree(6)
    deep = tile_killed(g)
    hmap = {v: deep.profile.h[i] for i, v in enumerate(g.vertex_ids)}
    cut = cut_at_level(g, hmap, 0.37)
    shallow = tile_killed(cut.upper)
    assert affine_match(shallow, deep, 0.37) < 1e-9


def test_tiling_json_is_deterministic_and_schema_tagged():
    t = tile_killed(families.cycle_chord())
    doc = tiling_to_json(t, audit_tiling(t))
    assert doc["schema"] == "tiler-tiling/1"
    assert doc["audit"]["passed"] is True
    blob1 = json.dumps(doc, sort_keys=True)
    blob2 = json.dumps(tiling_to_json(tile_killed(families.cycle_chord()),
                                      audit_tiling(t)), sort_keys=True)
    assert blob1 == blob2
