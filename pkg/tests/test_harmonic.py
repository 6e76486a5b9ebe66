import math
from fractions import Fraction

import numpy as np
import pytest

from tiler import families
from tiler.errors import (
    GraphFormatError,
    TransienceNotEstablished,
)
from tiler.harmonic import (
    dirichlet_energy,
    divergence,
    escape_profile,
    green_function,
    killed_profile,
    normalize_flow,
    profile_from_json,
    profile_to_json,
    solve_dirichlet,
)


def closed_form(d, depth):
    # escape height of a depth-d vertex in the killed binary tree
    return (Fraction(1, 2**d) - Fraction(1, 2**depth)) / (1 - Fraction(1, 2**depth))


def test_binary_tree_killed_heights_match_closed_form():
    depth = 6
    g = families.bary_tree(depth)
    p = killed_profile(g)
    for i, vid in enumerate(g.vertex_ids):
        d = families.tree_depth(vid)
        assert abs(p.h[i] - float(closed_form(d, depth))) < 1e-12


def test_exact_solver_hits_closed_form_exactly():
    depth = 5
    g = families.bary_tree(depth)
    p = killed_profile(g, method="exact")
    assert p.exact
    for i, vid in enumerate(g.vertex_ids):
        assert p.h_exact[i] == closed_form(families.tree_depth(vid), depth)
    assert p.eta_exact == 2 * (1 - closed_form(1, depth))


def test_float_and_exact_routes_agree():
    g = families.make_family("perturbed-tree", depth=5, seed=7)
    pf = killed_profile(g)
    pe = killed_profile(g, method="exact")
    assert np.max(np.abs(pf.h - np.array([float(x) for x in pe.h_exact]))) < 1e-10
    assert abs(pf.eta - float(pe.eta_exact)) < 1e-10


def test_cg_matches_direct():
    g = families.z2_half_disc(radius=6)
    pd = killed_profile(g, method="direct")
    pc = killed_profile(g, method="cg", tol=1e-12)
    assert np.max(np.abs(pd.h - pc.h)) < 1e-8


def test_heights_obey_the_maximum_principle():
    g = families.make_family("perturbed-tree", depth=5, seed=11)
    p = killed_profile(g)
    assert p.h[g.root] == 1.0
    assert all(p.h[s] == 0.0 for s in g.sinks)
    interior = [i for i in range(g.n)
                if i != g.root and i not in set(g.sinks)]
    assert all(0.0 < p.h[i] < 1.0 for i in interior)


def test_energy_equals_strength():
    for g in (families.bary_tree(5), families.cycle_chord(),
              families.z2_half_disc(radius=4)):
        p = killed_profile(g)
        assert abs(dirichlet_energy(p) - p.eta) < 1e-9


def test_flow_is_divergence_free_inside():
    g = families.hyperbolic_disc(3, 7, layers=3)
    p = killed_profile(g)
    sinks = set(g.sinks)
    total_out = 0.0
    for i, vid in enumerate(g.vertex_ids):
        d = divergence(p, vid)
        if i == g.root:
            assert abs(d - p.eta) < 1e-9
        elif i in sinks:
            total_out += d
        else:
            assert abs(d) < 1e-9
    assert abs(total_out + p.eta) < 1e-9


def test_dart_flow_is_antisymmetric():
    g = families.cycle_chord()
    p = killed_profile(g)
    for d in range(2 * g.m):
        assert p.dart_flow(d) == -p.dart_flow(d ^ 1)


def test_green_function_effective_resistance_identity():
    g = families.bary_tree(4)
    p = killed_profile(g, method="exact")
    G, v = green_function(g, method="exact")
    assert v[g.root] == 1 / p.eta_exact
    assert G[g.root] == p.pi_exact[g.root] / p.eta_exact
    assert all(G[s] == 0 for s in g.sinks)
    Gf, vf = green_function(g)
    assert np.max(np.abs(Gf - np.array([float(x) for x in G]))) < 1e-12


def test_normalize_flow_scales_strength_to_one():
    g = families.make_family("perturbed-tree", depth=4, seed=3)
    p = normalize_flow(killed_profile(g))
    assert abs(p.eta - 1.0) < 1e-12
    assert abs(dirichlet_energy(p) - 1.0) < 1e-9


def test_dirichlet_interpolation_on_a_path():
    g = families.path_graph(inner=3)
    h = solve_dirichlet(g, {0: 1.0, 4: 0.0})
    assert np.allclose(h, [1.0, 0.75, 0.5, 0.25, 0.0], atol=1e-12)


def test_escape_profile_extrapolates_toward_the_limit():
    # limit heights solve q = 1/3 + (2/3) q^2 at the root, so h(d) = 2^-d
    p = escape_profile(families.bary_tree, [8, 10, 12],
                       extrapolate=True, stop_early=False, tol=1e-2)
    g = p.graph
    assert g.n == families.bary_tree(8).n
    raw = killed_profile(families.bary_tree(12))
    for i, vid in enumerate(g.vertex_ids):
        d = families.tree_depth(vid)
        assert abs(p.h[i] - 2.0**-d) < 1e-6
    assert p.extrapolated
    assert p.mode == "exhaustion-approximation"
    assert p.cauchy_gap is not None and p.cauchy_gap < 1e-2
    # the Aitken step must beat the deepest raw solve at the root's children
    i = g.vindex["0"]
    j = raw.graph.vindex["0"]
    assert abs(p.h[i] - 0.5) < abs(raw.h[j] - 0.5)


def test_escape_profile_flags_recurrent_growth():
    with pytest.raises(TransienceNotEstablished, match="recurrent"):
        escape_profile(lambda r: families.z2_half_disc(radius=r),
                       [4, 8, 12], tol=1e-6, stop_early=False)


def test_escape_profile_rejects_bad_depths():
    with pytest.raises(GraphFormatError, match="increasing"):
        escape_profile(families.bary_tree, [8, 8])
    with pytest.raises(GraphFormatError, match="increasing"):
        escape_profile(families.bary_tree, [8])


def test_escape_profile_accepts_finite_instance():
    g = families.bary_tree(4)
    p = escape_profile(g)
    q = killed_profile(g)
    assert np.array_equal(p.h, q.h)


def test_profile_json_roundtrip():
    g = families.cycle_chord()
    p = killed_profile(g)
    doc = profile_to_json(p)
    assert doc["schema"] == "tiler-profile/1"
    q = profile_from_json(g, doc)
    assert np.array_equal(q.h, p.h)
    assert np.array_equal(q.flow, p.flow)
    assert q.eta == p.eta and q.mode == p.mode


def test_killed_profile_requires_boundary():
    g = families.triangle_graph()
    with pytest.raises(GraphFormatError, match="root"):
        killed_profile(g)
    rooted = g.with_boundary(root="1", kind="plain")
    with pytest.raises(GraphFormatError, match="sink"):
        killed_profile(rooted)
