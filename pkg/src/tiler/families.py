"""Built-in graph families.

All generators are deterministic; truncations of infinite graphs are nested,
so the same vertex keeps its id as the depth grows.  Rooted families mark
their frontier as sinks and use kind "exhaustion-level-of-infinite".
"""

from __future__ import annotations

from fractions import Fraction

from .errors import GraphFormatError
from .graph import PlanarGraph, build_graph
from .rng import Stream


def path_graph(inner: int = 1, conductance=1) -> PlanarGraph:
    """Path o - a1 - ... - a_inner - t with the far end absorbing."""
    names = ["o"] + [f"a{i}" for i in range(1, inner + 1)] + ["t"]
    edges = [(f"e{i}", names[i], names[i + 1], conductance)
             for i in range(len(names) - 1)]
    rotation = {}
    for i, v in enumerate(names):
        lst = []
        if i > 0:
            lst.append(f"e{i-1}-")
        if i < len(names) - 1:
            lst.append(f"e{i}+")
        rotation[v] = lst
    return build_graph(vertices=names, edges=edges, rotation=rotation,
                       root="o", sinks=["t"], kind="finite-with-sinks")


def cycle_chord() -> PlanarGraph:
    """4-cycle 1-2-3-4 with chord 1-3; root 1, sinks 2 and 4."""
    return build_graph(
        vertices=["1", "2", "3", "4"],
        edges=[("a", "1", "2", 1), ("b", "2", "3", 1), ("c", "3", "4", 1),
               ("d", "4", "1", 1), ("x", "1", "3", 1)],
        rotation={"1": ["a+", "x+", "d-"], "2": ["b+", "a-"],
                  "3": ["c+", "x-", "b-"], "4": ["d+", "c-"]},
        root="1", sinks=["2", "4"], kind="finite-with-sinks")


def triangle_graph() -> PlanarGraph:
    return build_graph(
        vertices=["1", "2", "3"],
        edges=[("a", "1", "2", 1), ("b", "2", "3", 1), ("c", "3", "1", 1)],
        rotation={"1": ["a+", "c-"], "2": ["b+", "a-"], "3": ["c+", "b-"]})


def root_only() -> PlanarGraph:
    return build_graph(vertices=["o"], edges=[], rotation={}, root="o",
                       kind="finite-with-sinks")


def bary_tree(depth: int, branching: int = 2, conductance=1,
              perturb_seed=None) -> PlanarGraph:
    """Rooted b-ary tree truncated at the given depth; leaves are sinks.

    Vertex ids are the digit strings of root-to-vertex paths.  When
    perturb_seed is given, each edge draws a conductance from the 25 dyadic
    values {8/16, ..., 32/16} in [1/2, 2], keyed by (seed, edge counter),
    so float and exact pipelines see the same numbers.
    """
    if depth < 1:
        raise GraphFormatError("tree depth must be >= 1")
    if branching < 2:
        raise GraphFormatError("branching must be >= 2")
    vertices = ["o"]
    edges = []
    rotation = {"o": []}
    level = ["o"]
    counter = 0
    for d in range(depth):
        nxt = []
        for v in level:
            for j in range(branching):
                w = str(j) if v == "o" else v + str(j)
                eid = "e" + w
                if perturb_seed is None:
                    c = Fraction(conductance)
                else:
                    k = Stream(perturb_seed, counter).below(25)
                    c = Fraction(8 + k, 16)
                counter += 1
                vertices.append(w)
                edges.append((eid, v, w, c))
                rotation[v].append(eid + "+")
                rotation[w] = [eid + "-"]
                nxt.append(w)
        level = nxt
    return build_graph(vertices=vertices, edges=edges, rotation=rotation,
                       root="o", sinks=level, kind="exhaustion-level-of-infinite")


def tree_depth(vertex_id: str) -> int:
    return 0 if vertex_id == "o" else len(vertex_id)


def z2_half_disc(radius: int) -> PlanarGraph:
    """Half-disc of the square lattice: j >= 0, i*i + j*j <= R*R.

    The frontier (vertices with a missing in-range neighbor) is the sink
    set.  Random walk on the full half-plane is recurrent, so exhaustion
    solves on this family do not converge; that is the point of it.
    """
    if radius < 2:
        raise GraphFormatError("radius must be >= 2")
    r2 = radius * radius
    pts = [(i, j) for j in range(radius + 1)
           for i in range(-radius, radius + 1) if i * i + j * j <= r2]
    pts.sort(key=lambda p: (p[1], p[0]))
    names = {p: f"{p[0]},{p[1]}" for p in pts}
    inside = set(pts)
    edges = []
    for (i, j) in pts:
        if (i + 1, j) in inside:
            edges.append((f"h:{i},{j}", names[(i, j)], names[(i + 1, j)], 1))
        if (i, j + 1) in inside:
            edges.append((f"v:{i},{j}", names[(i, j)], names[(i, j + 1)], 1))
    rotation = {}
    for (i, j) in pts:
        lst = []
        if (i + 1, j) in inside:
            lst.append(f"h:{i},{j}+")          # east
        if (i, j + 1) in inside:
            lst.append(f"v:{i},{j}+")          # north
        if (i - 1, j) in inside:
            lst.append(f"h:{i-1},{j}-")        # west
        if (i, j - 1) in inside:
            lst.append(f"v:{i},{j-1}-")        # south
        rotation[names[(i, j)]] = lst
    sinks = []
    for (i, j) in pts:
        nbrs = [(i + 1, j), (i - 1, j), (i, j + 1), (i, j - 1)]
        if any(jj >= 0 and q not in inside for q in nbrs for jj in [q[1]]):
            sinks.append(names[(i, j)])
    return build_graph(vertices=[names[p] for p in pts], edges=edges,
                       rotation=rotation, root="0,0", sinks=sinks,
                       kind="exhaustion-level-of-infinite")


# ------------------------------------------------------- {p,q} tessellation


def hyperbolic_disc(p: int, q: int, layers: int, conductance=1) -> PlanarGraph:
    """Disk of the {p,q} tessellation: p-gon faces, q around each vertex.

    Built ring by ring; every vertex of the inner rings reaches its full
    degree q, the last ring is left incomplete and marked as the sink set.
    Requires 1/p + 1/q < 1/2 (hyperbolic).
    """
    if p < 3 or q < 3 or 2 * (p + q) >= p * q:
        raise GraphFormatError(f"({p},{q}) is not hyperbolic")
    if layers < 1:
        raise GraphFormatError("layers must be >= 1")

    faces: list[tuple[str, ...]] = []   # ccw vertex-id cycles
    fcount = {"o": 0}                   # faces attached so far, per vertex
    serial = [0]

    def fresh() -> str:
        serial[0] += 1
        v = f"h{serial[0]}"
        fcount[v] = 0
        return v

    def add_face(cycle: list[str]) -> None:
        faces.append(tuple(cycle))
        for v in cycle:
            fcount[v] += 1

    # ring 1: q faces around the root
    spokes = [fresh() for _ in range(q)]
    boundary = []
    for j in range(q):
        a, b = spokes[j], spokes[(j + 1) % q]
        mids = [fresh() for _ in range(p - 3)]
        add_face(["o", a] + mids + [b])
        boundary.extend([a] + mids)

    for _ in range(1, layers):
        boundary = _add_ring(p, q, boundary, fcount, fresh, add_face)

    return _assemble(faces, boundary, conductance)


def _add_ring(p, q, boundary, fcount, fresh, add_face):
    """Attach one full ring of faces outside the current ccw boundary cycle.

    Each boundary vertex v still needs q - fcount[v] faces: one per incident
    boundary edge plus k(v) = q - fcount[v] - 2 vertex-faces in between.
    When k(v) = -1 (only possible for q = 3) the two edge-faces merge, so
    edge-faces span maximal runs of k = -1 interior vertices.
    """
    k_of = lambda v: q - fcount[v] - 2
    # start the scan at a vertex with k >= 0 so no run wraps the seam
    shift = next((i for i, v in enumerate(boundary) if k_of(v) >= 0), None)
    if shift is None:
        raise GraphFormatError(f"({p},{q}) boundary is fully saturated")
    boundary = boundary[shift:] + boundary[:shift]
    L = len(boundary)

    # plan the cyclic face sequence: edge-face over each run, then the
    # vertex-faces at the run's far endpoint
    plans = []
    i = 0
    while i < L:
        j = i + 1
        while j < L and k_of(boundary[j]) < 0:
            j += 1
        plans.append(("edge", [boundary[k % L] for k in range(i, j + 1)]))
        plans.extend(("vertex", boundary[j % L]) for _ in range(k_of(boundary[j % L])))
        i = j
    if len(plans) < 3:
        raise GraphFormatError(f"({p},{q}) ring is degenerate")

    # consecutive ring faces share one new vertex (they meet along an edge
    # at the junction vertex); the last face closes up with the first
    new_boundary = []
    first_shared = None
    carry = None
    for idx, (kindp, datap) in enumerate(plans):
        last = idx == len(plans) - 1
        run = list(reversed(datap)) if kindp == "edge" else [datap]
        n_new = p - len(run)
        if n_new < 2 - (0 if last else 1):
            raise GraphFormatError(f"({p},{q}) ring construction ran out of room")
        news = []
        for s in range(n_new):
            if s == 0 and carry is not None:
                news.append(carry)
            elif last and s == n_new - 1:
                news.append(first_shared)
            else:
                news.append(fresh())
        add_face(run + news)
        if carry is None:
            first_shared = news[0]
        carry = news[-1]
        new_boundary.extend(news)

    seen = set()
    out = []
    for v in new_boundary:   # shared vertices were appended twice
        if v not in seen:
            seen.add(v)
            out.append(v)
    return out


def _assemble(faces, boundary, conductance) -> PlanarGraph:
    # derive edges and rotations from the ccw face cycles: in the face
    # (..., a, v, b, ...) the dart v->a immediately follows v->b in the
    # ccw rotation at v, and adjacent faces share edges, so the per-vertex
    # successor maps chain into the rotation (boundary vertices have one
    # gap, where the outer face sits)
    succ: dict[str, dict[str, str]] = {}
    for cyc in faces:
        for t in range(len(cyc)):
            a, v, b = cyc[t - 2], cyc[t - 1], cyc[t]
            succ.setdefault(v, {})[b] = a

    vertices = []
    seen = set()
    for cyc in faces:
        for v in cyc:
            if v not in seen:
                seen.add(v)
                vertices.append(v)

    edges = []
    eids = {}
    for v in vertices:
        for w in succ[v]:
            key = (v, w) if v < w else (w, v)
            if key not in eids:
                eid = f"{key[0]}|{key[1]}"
                eids[key] = eid
                edges.append((eid, key[0], key[1], conductance))

    def dart(v, w):
        key = (v, w) if v < w else (w, v)
        return eids[key] + ("+" if key[0] == v else "-")

    rotation = {}
    for v in vertices:
        succs = succ[v]
        nbrs = set(succs) | set(succs.values())
        followers = set(succs.values())
        starts = [w for w in succs if w not in followers]
        order = [starts[0] if starts else next(iter(succs))]
        while len(order) < len(nbrs):
            nxt = succs.get(order[-1])
            if nxt is None or nxt == order[0]:
                break
            order.append(nxt)
        if len(order) != len(nbrs):
            raise GraphFormatError("face corners do not chain at a vertex")
        rotation[v] = [dart(v, w) for w in order]

    return build_graph(vertices=vertices, edges=edges, rotation=rotation,
                       root="o", sinks=list(boundary),
                       kind="exhaustion-level-of-infinite")


FAMILIES = {
    "path": path_graph,
    "cycle-chord": cycle_chord,
    "triangle": triangle_graph,
    "root-only": root_only,
    "binary-tree": lambda depth, **kw: bary_tree(depth, 2, **kw),
    "bary-tree": bary_tree,
    "perturbed-tree": lambda depth, seed=7, branching=2: bary_tree(
        depth, branching, perturb_seed=seed),
    "hyperbolic": hyperbolic_disc,
    "z2-half-disc": z2_half_disc,
}


def make_family(name: str, **params) -> PlanarGraph:
    if name not in FAMILIES:
        raise GraphFormatError(
            f"unknown family {name!r}; choices: {sorted(FAMILIES)}")
    return FAMILIES[name](**params)
