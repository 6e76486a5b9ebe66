from fractions import Fraction

import pytest

from tiler import families
from tiler.errors import GraphFormatError
from tiler.graph import build_dual


def test_registry_builds_every_family():
    params = {
        "bary-tree": {"depth": 3},
        "binary-tree": {"depth": 3},
        "perturbed-tree": {"depth": 3, "seed": 7},
        "cycle-chord": {},
        "triangle": {},
        "path": {"inner": 2},
        "root-only": {},
        "hyperbolic": {"p": 3, "q": 7, "layers": 2},
        "z2-half-disc": {"radius": 3},
    }
    assert sorted(params) == sorted(families.FAMILIES)
    for name, kw in params.items():
        g = families.make_family(name, **kw)
        assert g.n >= 1


def test_unknown_family_lists_choices():
    with pytest.raises(GraphFormatError, match="choices"):
        families.make_family("moebius")


@pytest.mark.parametrize("depth,branching", [(1, 2), (3, 2), (2, 3), (4, 5)])
def test_tree_sizes(depth, branching):
    g = families.bary_tree(depth, branching=branching)
    b = branching
    assert g.n == (b ** (depth + 1) - 1) // (b - 1)
    assert g.m == g.n - 1
    assert g.vertex_ids[g.root] == "o"
    sinks = {g.vertex_ids[s] for s in g.sinks}
    assert len(sinks) == b ** depth
    assert all(families.tree_depth(v) == depth for v in sinks)


def test_tree_rotation_counterclockwise_children():
    g = families.bary_tree(2)
    rot = g.rotation_lists()
    assert len(rot["o"]) == 2
    # interior vertex lists the parent dart then its children
    darts = rot["0"]
    assert len(darts) == 3
    e0 = g.parse_dart(darts[0])
    assert g.vertex_ids[g.head[e0]] == "o"


def test_tree_depth_helper():
    assert families.tree_depth("o") == 0
    assert families.tree_depth("010") == 3


def test_perturbed_tree_conductances_dyadic_and_bounded():
    g = families.make_family("perturbed-tree", depth=5, seed=7)
    for c in g.conductance_exact:
        assert Fraction(1, 2) <= c <= Fraction(2)
        assert c.denominator & (c.denominator - 1) == 0
    assert len(set(g.conductance_exact)) > 1


def test_perturbed_tree_seed_controls_draw():
    a = families.make_family("perturbed-tree", depth=4, seed=7)
    b = families.make_family("perturbed-tree", depth=4, seed=7)
    c = families.make_family("perturbed-tree", depth=4, seed=8)
    assert a.conductance_exact == b.conductance_exact
    assert a.conductance_exact != c.conductance_exact


def test_cycle_chord_is_the_frozen_example():
    g = families.cycle_chord()
    assert g.vertex_ids == ["1", "2", "3", "4"]
    assert g.edge_ids == ["a", "b", "c", "d", "x"]
    assert g.vertex_ids[g.root] == "1"
    assert [g.vertex_ids[s] for s in g.sinks] == ["2", "4"]


def test_path_graph_shape():
    g = families.path_graph(inner=3)
    assert g.vertex_ids == ["o", "a1", "a2", "a3", "t"]
    assert g.m == 4
    assert [g.vertex_ids[s] for s in g.sinks] == ["t"]


def test_root_only_graph():
    g = families.root_only()
    assert g.n == 1 and g.m == 0
    assert g.vertex_ids[g.root] == "o"
    assert not g.sinks


def test_z2_half_disc_sinks_are_the_outer_rim():
    r = 4
    g = families.z2_half_disc(radius=r)
    assert build_dual(g).euler_check()
    assert g.vertex_ids[g.root] == "0,0"
    sinks = {g.vertex_ids[s] for s in g.sinks}
    rim = set()
    for vid in g.vertex_ids:
        x, y = map(int, vid.split(","))
        for dx, dy in ((1, 0), (-1, 0), (0, 1), (0, -1)):
            nx, ny = x + dx, y + dy
            if ny >= 0 and nx * nx + ny * ny > r * r:
                rim.add(vid)
    assert sinks == rim


@pytest.mark.parametrize("p,q,layers", [(3, 7, 2), (4, 5, 2), (7, 3, 1)])
def test_hyperbolic_disc_planarity(p, q, layers):
    g = families.hyperbolic_disc(p, q, layers=layers)
    assert build_dual(g).euler_check()
    assert g.kind == "exhaustion-level-of-infinite"
    assert g.sinks


@pytest.mark.parametrize("p,q", [(3, 6), (2, 9), (4, 4)])
def test_hyperbolic_guard_rejects_flat_pairs(p, q):
    with pytest.raises(GraphFormatError, match="not hyperbolic"):
        families.hyperbolic_disc(p, q, layers=2)


def test_tree_depth_must_be_positive():
    with pytest.raises(GraphFormatError, match=">= 1"):
        families.bary_tree(0)
