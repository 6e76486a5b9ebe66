from fractions import Fraction

import pytest

from tiler import families
from tiler.errors import GraphFormatError, LevelCollisionError
from tiler.graph import (
    build_dual,
    build_graph,
    cut_at_level,
    subdivide_edge,
    trace_faces,
)


def _square_data(**overrides):
    data = {
        "schema": "tiler-graph/1",
        "kind": "finite-with-sinks",
        "vertices": ["p", "q", "r", "s"],
        "edges": [
            ["pq", "p", "q", 1],
            ["qr", "q", "r", 2],
            ["rs", "r", "s", "1/3"],
            ["sp", "s", "p", 1],
        ],
        "rotation": {
            "p": ["pq+", "sp-"],
            "q": ["qr+", "pq-"],
            "r": ["rs+", "qr-"],
            "s": ["sp+", "rs-"],
        },
        "root": "p",
        "sinks": ["r"],
    }
    data.update(overrides)
    return data


def _cyclic_tuples(graph, faces):
    out = set()
    for cyc in faces.cycles:
        ids = [graph.dart_id(d) for d in cyc]
        k = ids.index(min(ids))
        out.add(tuple(ids[k:] + ids[:k]))
    return out


def test_json_roundtrip_preserves_everything():
    g = families.cycle_chord()
    h = build_graph(g.to_json())
    assert h.vertex_ids == g.vertex_ids
    assert h.edge_ids == g.edge_ids
    assert h.rotation_lists() == g.rotation_lists()
    assert h.root == g.root and h.sinks == g.sinks
    assert h.conductance_exact == g.conductance_exact
    assert h.kind == g.kind


def test_fraction_conductance_survives_serialization():
    g = build_graph(_square_data())
    assert g.conductance_exact[g.eindex["rs"]] == Fraction(1, 3)
    again = build_graph(g.to_json())
    assert again.conductance_exact == g.conductance_exact


@pytest.mark.parametrize(
    "mutate,needle",
    [
        (lambda d: d.update(vertices=["p", "p", "r", "s"]), "duplicate vertex"),
        (lambda d: d["edges"].append(["pq", "p", "q", 1]), "duplicate edge"),
        (lambda d: d["edges"].append(["zz", "p", "zz", 1]), "unknown vertex"),
        (lambda d: d["edges"].append(["ll", "p", "p", 1]), "self-loop"),
        (lambda d: d["edges"].__setitem__(0, ["pq", "p", "q", 0]), "non-positive"),
        (lambda d: d.update(sinks=["nope"]), "unknown sink"),
        (lambda d: d.update(sinks=["p"]), "root cannot be a sink"),
        (lambda d: d.update(schema="tiler-graph/9"), "unsupported schema"),
        (lambda d: d["rotation"].__setitem__("p", ["pq+"]), "rotation misses"),
        (lambda d: d["rotation"].__setitem__("p", ["pq-", "sp-"]), "does not leave"),
        (lambda d: d["rotation"].__setitem__("p", ["pq+", "pq+"]), "listed twice"),
    ],
)
def test_format_errors(mutate, needle):
    data = _square_data()
    mutate(data)
    with pytest.raises(GraphFormatError, match=needle):
        build_graph(data)


def test_disconnected_rejected_unless_allowed():
    data = _square_data(
        vertices=["p", "q", "r", "s", "lone"],
        rotation={**_square_data()["rotation"], "lone": []},
    )
    with pytest.raises(GraphFormatError, match="not connected"):
        build_graph(data)
    g = build_graph({**data, "allow_disconnected": True})
    assert g.n == 5


def test_dart_ids_roundtrip_and_reverse():
    g = families.cycle_chord()
    for d in range(2 * g.m):
        assert g.parse_dart(g.dart_id(d)) == d
        assert g.tail[d ^ 1] == g.head[d]
        assert g.head[d ^ 1] == g.tail[d]
    with pytest.raises(GraphFormatError):
        g.parse_dart("zz+")
    with pytest.raises(GraphFormatError):
        g.parse_dart("a*")


def test_cycle_chord_faces_are_the_known_three():
    g = families.cycle_chord()
    faces = trace_faces(g)
    assert _cyclic_tuples(g, faces) == {
        ("a+", "b+", "x-"),
        ("a-", "d-", "c-", "b-"),
        ("c+", "d+", "x+"),
    }


@pytest.mark.parametrize(
    "graph",
    [
        families.cycle_chord(),
        families.triangle_graph(),
        families.z2_half_disc(radius=4),
        families.hyperbolic_disc(3, 7, layers=2),
        families.bary_tree(4),
    ],
)
def test_euler_formula_and_face_degree_sum(graph):
    dual = build_dual(graph)
    assert dual.euler_check()
    assert sum(dual.faces.degree(f) for f in range(dual.n_faces)) == 2 * graph.m


def test_dual_darts_transpose_under_reversal():
    g = families.z2_half_disc(radius=3)
    dual = build_dual(g)
    for d in range(2 * g.m):
        a, b = dual.dual_dart(d)
        assert dual.dual_dart(d ^ 1) == (b, a)


def test_induced_subgraph_keeps_rotation_order():
    g = families.bary_tree(3)
    keep = [v for v in g.vertex_ids if families.tree_depth(v) <= 1]
    sub = g.induced_subgraph(keep, root="o", sinks=["0", "1"],
                             kind="finite-with-sinks")
    assert sub.vertex_ids == ["o", "0", "1"]
    assert sub.m == 2
    full = g.rotation_lists()["o"]
    assert sub.rotation_lists()["o"] == [d for d in full
                                         if d[:-1] in sub.eindex]


def test_with_boundary_moves_root():
    g = families.triangle_graph().with_boundary(root="1", sinks=["3"],
                                                kind="finite-with-sinks")
    assert g.vertex_ids[g.root] == "1"
    assert [g.vertex_ids[s] for s in g.sinks] == ["3"]


def test_subdivision_resistance_is_exact_series_split():
    g = build_graph(_square_data())
    t = Fraction(1, 3)
    sub = subdivide_edge(g, "qr", t, vertex_id="mid")
    c = g.conductance_exact[g.eindex["qr"]]
    ca = sub.conductance_exact[sub.eindex["qr~a"]]
    cb = sub.conductance_exact[sub.eindex["qr~b"]]
    assert ca == c / t and cb == c / (1 - t)
    assert 1 / ca + 1 / cb == 1 / c
    assert sub.provenance["mid"]["edge"] == "qr"
    assert "qr" not in sub.eindex


def test_subdivision_preserves_embedding():
    g = families.cycle_chord()
    sub = subdivide_edge(g, "x", Fraction(1, 2))
    assert sub.n == g.n + 1 and sub.m == g.m + 1
    assert len(trace_faces(sub)) == len(trace_faces(g))
    assert build_dual(sub).euler_check()


@pytest.mark.parametrize(
    "edge,t,needle",
    [
        ("nope", Fraction(1, 2), "unknown edge"),
        ("a", Fraction(0), "outside"),
        ("a", Fraction(3, 2), "outside"),
    ],
)
def test_subdivision_rejects_bad_input(edge, t, needle):
    g = families.cycle_chord()
    with pytest.raises(GraphFormatError, match=needle):
        subdivide_edge(g, edge, t)


def test_cut_at_level_splits_the_crossing_edge():
    g = families.path_graph(inner=2)
    heights = {"o": 1.0, "a1": 2 / 3, "a2": 1 / 3, "t": 0.0}
    cut = cut_at_level(g, heights, 0.5)
    assert cut.boundary_ids == ["e1@cut"]
    assert cut.heights["e1@cut"] == 0.5
    assert set(cut.upper.vertex_ids) == {"o", "a1", "e1@cut"}
    assert set(cut.lower.vertex_ids) == {"a2", "t", "e1@cut"}
    assert cut.upper.vertex_ids[cut.upper.root] == "o"
    assert [cut.upper.vertex_ids[s] for s in cut.upper.sinks] == ["e1@cut"]
    assert "t" in {cut.lower.vertex_ids[s] for s in cut.lower.sinks}


def test_cut_accepts_height_array_in_vertex_order():
    g = families.path_graph(inner=2)
    cut = cut_at_level(g, [1.0, 2 / 3, 1 / 3, 0.0], 0.5)
    assert cut.boundary_ids == ["e1@cut"]


def test_cut_on_vertex_height_raises():
    g = families.path_graph(inner=2)
    heights = {"o": 1.0, "a1": 2 / 3, "a2": 1 / 3, "t": 0.0}
    with pytest.raises(LevelCollisionError, match="collides"):
        cut_at_level(g, heights, 1 / 3)


def test_height_map_must_cover_all_vertices():
    g = families.path_graph(inner=2)
    with pytest.raises(GraphFormatError, match="misses vertex"):
        cut_at_level(g, {"o": 1.0}, 0.5)
    with pytest.raises(GraphFormatError, match="length"):
        cut_at_level(g, [1.0, 0.5], 0.5)
