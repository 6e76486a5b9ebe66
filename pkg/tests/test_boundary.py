import math

import numpy as np
import pytest

from tiler import families
from tiler.arcs import ArcSet
from tiler.boundary import (
    audit_to_json,
    boundary_event_match,
    check_arc_endpoints,
    combine_zero_one,
    drift_item,
    extend_to_subdivision,
    harmonic_from_arcs,
    harmonic_residual,
    layered_boundary_checklist,
    layeredness_item,
    level_set_drift,
    sharp_to_json,
    trajectory_item,
    verify_zero_one,
)
from tiler.errors import ArcEndpointError
from tiler.graph import subdivide_edge
from tiler.tiling import tile_killed
from tiler.walks import WalkConfig


def depth_levels(g, depths):
    return [[v for v in g.vertex_ids if families.tree_depth(v) == d]
            for d in depths]


@pytest.fixture(scope="module")
def tree_tiling():
    g = families.bary_tree(8)
    return g, tile_killed(g)


@pytest.fixture(scope="module")
def half_arc(tree_tiling):
    g, t = tree_tiling
    return harmonic_from_arcs(t, [(0.0, 0.5)], depth_levels(g, (3, 4, 5)))


def test_dyadic_half_arc_splits_the_root_evenly(half_arc):
    s = half_arc
    assert abs(s.value("o") - 0.5) < 1e-9
    assert all(0.0 <= v <= 1.0 for v in np.asarray(s.values))


def test_complement_sums_to_one(tree_tiling, half_arc):
    g, t = tree_tiling
    comp = harmonic_from_arcs(t, ArcSet.from_pairs([(0.0, 0.5)]).complement(),
                              depth_levels(g, (3, 4, 5)))
    total = np.asarray(half_arc.values) + np.asarray(comp.values)
    assert np.max(np.abs(total - 1.0)) < 1e-9


def test_full_circle_solves_to_one(tree_tiling):
    g, t = tree_tiling
    s = harmonic_from_arcs(t, [(0.0, 1.0)], depth_levels(g, (3, 4)))
    assert np.max(np.abs(np.asarray(s.values) - 1.0)) < 1e-12


def test_union_intersection_inclusion_exclusion(tree_tiling):
    g, t = tree_tiling
    levels = depth_levels(g, (3, 4, 5))
    a = harmonic_from_arcs(t, [(0.0, 0.5)], levels)
    b = harmonic_from_arcs(t, [(0.25, 0.75)], levels)
    union = combine_zero_one([a, b], "union")
    inter = combine_zero_one([a, b], "intersection")
    assert union.arcs.endpoints() == [0.0, 0.75]
    assert inter.arcs.endpoints() == [0.25, 0.5]
    lhs = np.asarray(union.values) + np.asarray(inter.values)
    rhs = np.asarray(a.values) + np.asarray(b.values)
    assert np.max(np.abs(lhs - rhs)) < 1e-9


def test_de_morgan_on_the_defining_arcs(tree_tiling):
    g, t = tree_tiling
    levels = depth_levels(g, (3, 4))
    a = harmonic_from_arcs(t, [(0.0, 0.375)], levels)
    b = harmonic_from_arcs(t, [(0.25, 0.625)], levels)
    left = combine_zero_one([a, b], "union").arcs.complement()
    ca = harmonic_from_arcs(t, a.arcs.complement(), levels)
    cb = harmonic_from_arcs(t, b.arcs.complement(), levels)
    right = combine_zero_one([ca, cb], "intersection").arcs
    assert left.endpoints() == right.endpoints()


def test_refinement_converges_for_deep_level_pairs(tree_tiling):
    g, t = tree_tiling
    s = harmonic_from_arcs(t, [(0.0, 0.5)], depth_levels(g, (6, 7, 8)),
                           tol=5e-3)
    assert s.converged
    assert s.max_gap < 5e-3


def test_level_set_drift_vanishes_on_the_uniform_tree(half_arc):
    rows = level_set_drift(half_arc)
    assert len(rows) == 2
    for r in rows:
        assert r.symdiff_width == 0.0
        assert r.x_symdiff_width == 0.0
        assert r.impurity_mass == 0.0


def test_zero_one_report_is_clean(half_arc):
    rep = verify_zero_one(half_arc, WalkConfig(seed=5, trials=20000))
    assert rep.all_ok()
    assert rep.escape_ok and rep.alternations_ok
    probe = rep.probes[0]
    assert probe.value_ok and probe.middle_ok
    assert abs(probe.value - 0.5) < 0.02


def test_boundary_event_match_is_faithful(half_arc):
    fr = boundary_event_match(half_arc, WalkConfig(seed=5, trials=20000))
    assert fr.ok()
    assert fr.estimate <= fr.sigma * 4 + 0.02
    assert fr.drift_converged


def test_residual_is_tiny_and_detects_tampering(half_arc):
    assert harmonic_residual(half_arc) < 1e-9
    values = np.array(half_arc.values, dtype=float)
    values[half_arc.graph.vindex["00"]] += 0.05
    import dataclasses

    broken = dataclasses.replace(half_arc, values=values)
    assert harmonic_residual(broken) > 1e-3


def test_arc_endpoint_near_miss_is_rejected(tree_tiling):
    g, t = tree_tiling
    check_arc_endpoints(t, ArcSet.from_pairs([(0.25, 0.5)]))
    with pytest.raises(ArcEndpointError, match="perturb"):
        check_arc_endpoints(t, ArcSet.from_pairs([(0.25 + 1e-13, 0.5)]))


def test_subdivision_extension_interpolates_in_series(tree_tiling, half_arc):
    g, t = tree_tiling
    eid = g.edge_ids[3]
    u = g.vertex_ids[g.tail[2 * g.eindex[eid]]]
    v = g.vertex_ids[g.head[2 * g.eindex[eid]]]
    from fractions import Fraction

    g2 = subdivide_edge(g, eid, Fraction(1, 4))
    s2 = extend_to_subdivision(half_arc, g2)
    for vid in g.vertex_ids:
        assert s2.value(vid) == half_arc.value(vid)
    expect = half_arc.value(u) + 0.25 * (half_arc.value(v) - half_arc.value(u))
    assert abs(s2.value(f"{eid}~x") - expect) < 1e-12


def test_layeredness_flags_injected_mass(tree_tiling):
    # a 16-atom cut keeps the sampling noise well under the TV cap
    g, t = tree_tiling
    cfg = WalkConfig(seed=3, trials=20000)
    cut = [v for v in g.vertex_ids if families.tree_depth(v) == 4]
    good = {v: t.interval(v).width for v in cut}
    assert layeredness_item(t, cfg, level=cut, width_reference=good).passed
    bad = {v: w * 1.01 for v, w in good.items()}
    item = layeredness_item(t, cfg, level=cut, width_reference=bad)
    assert item.passed is False
    assert "mass" in item.detail


def test_trajectory_item_converges(tree_tiling):
    g, t = tree_tiling
    item = trajectory_item(t, WalkConfig(seed=3, trials=5000,
                                         horizontal_sampling=True))
    assert item.passed


def test_drift_item_needs_two_levels(tree_tiling, half_arc):
    g, t = tree_tiling
    assert drift_item(half_arc).passed is True
    single = harmonic_from_arcs(t, [(0.0, 0.5)], depth_levels(g, (4,)))
    item = drift_item(single)
    assert item.passed is None
    assert "insufficient" in item.detail


def test_checklist_aggregates_and_serializes(tree_tiling, half_arc):
    g, t = tree_tiling
    cfg = WalkConfig(seed=3, trials=8000, horizontal_sampling=True)
    cut = [v for v in g.vertex_ids if families.tree_depth(v) == 3]
    ref = {v: t.interval(v).width for v in cut}
    checklist = layered_boundary_checklist(t, [half_arc], cfg,
                                           level=cut, width_reference=ref)
    assert checklist.all_passed
    doc = audit_to_json(checklist)
    assert doc["schema"] == "tiler-audit/1"
    assert {i["name"] for i in doc["items"]} >= {"layeredness",
                                                 "trajectory-convergence"}
    sharp = sharp_to_json(half_arc)
    assert sharp["schema"] == "tiler-sharp/1"
    assert sharp["probe_values"]["o"] == half_arc.value("o")
