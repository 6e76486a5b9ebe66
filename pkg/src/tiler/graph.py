"""Planar graphs with rotation systems, their faces, duals, and level cuts.

A graph is stored as index arrays over darts (directed edge sides): edge e
owns darts 2e (as listed, u to v) and 2e+1 (v to u), and ``d ^ 1`` reverses
a dart.  The rotation system gives the counterclockwise cyclic order of
out-darts at each vertex; faces are traced with the face on the left of
each dart, so the successor of (u, v) is the dart (v, w) with w the
predecessor of u in the rotation at v.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .errors import GraphFormatError, LevelCollisionError

GRAPH_SCHEMA = "tiler-graph/1"

KINDS = ("finite-with-sinks", "exhaustion-level-of-infinite", "plain")


class PlanarGraph:
    """Immutable planar network with conductances and a rotation system."""

    def __init__(self, vertex_ids, edges, rotation, root=None, sinks=(),
                 kind="plain", provenance=None, validate=True,
                 allow_disconnected=False):
        # edges: list of (edge_id, u_id, v_id, conductance) with conductance
        # given as Fraction (exact mirror of whatever the caller supplied)
        self.vertex_ids = list(vertex_ids)
        self.vindex = {v: i for i, v in enumerate(self.vertex_ids)}
        if len(self.vindex) != len(self.vertex_ids):
            raise GraphFormatError("duplicate vertex ids")

        self.edge_ids = []
        self.eindex = {}
        tails, heads = [], []
        cond_exact = []
        for eid, u, v, c in edges:
            if eid in self.eindex:
                raise GraphFormatError(f"duplicate edge id {eid!r}")
            if u not in self.vindex or v not in self.vindex:
                raise GraphFormatError(f"edge {eid!r} references unknown vertex")
            if u == v:
                raise GraphFormatError(f"edge {eid!r} is a self-loop")
            c = Fraction(c)
            if c <= 0:
                raise GraphFormatError(f"edge {eid!r} has non-positive conductance")
            self.eindex[eid] = len(self.edge_ids)
            self.edge_ids.append(eid)
            tails.append(self.vindex[u])
            heads.append(self.vindex[v])
            cond_exact.append(c)

        n, m = len(self.vertex_ids), len(self.edge_ids)
        self.tail = np.empty(2 * m, dtype=np.int64)
        self.head = np.empty(2 * m, dtype=np.int64)
        self.tail[0::2] = tails
        self.head[0::2] = heads
        self.tail[1::2] = heads
        self.head[1::2] = tails
        self.conductance_exact = cond_exact
        self.conductance = np.array([float(c) for c in cond_exact], dtype=np.float64)

        self.rot_next = np.full(2 * m, -1, dtype=np.int64)
        self.rot_prev = np.full(2 * m, -1, dtype=np.int64)
        self.first_dart = np.full(n, -1, dtype=np.int64)
        self._install_rotation(rotation)

        self.root = self.vindex[root] if root is not None else None
        self.sinks = []
        seen = set()
        for s in sinks:
            if s not in self.vindex:
                raise GraphFormatError(f"unknown sink {s!r}")
            if s in seen:
                raise GraphFormatError(f"duplicate sink {s!r}")
            seen.add(s)
            self.sinks.append(self.vindex[s])
        if self.root is not None and self.root in set(self.sinks):
            raise GraphFormatError("root cannot be a sink")
        if kind not in KINDS:
            raise GraphFormatError(f"unknown graph kind {kind!r}")
        self.kind = kind
        self.provenance = dict(provenance or {})

        if validate:
            self._validate(allow_disconnected)

    # ------------------------------------------------------------ structure

    @property
    def n(self) -> int:
        return len(self.vertex_ids)

    @property
    def m(self) -> int:
        return len(self.edge_ids)

    def dart_id(self, d: int) -> str:
        return self.edge_ids[d >> 1] + ("+" if d % 2 == 0 else "-")

    def parse_dart(self, dart_id: str) -> int:
        eid, sign = dart_id[:-1], dart_id[-1]
        if sign not in "+-" or eid not in self.eindex:
            raise GraphFormatError(f"bad dart id {dart_id!r}")
        return 2 * self.eindex[eid] + (0 if sign == "+" else 1)

    def out_darts(self, v: int):
        """Darts leaving vertex v in rotation order."""
        d0 = self.first_dart[v]
        if d0 < 0:
            return
        d = d0
        while True:
            yield d
            d = self.rot_next[d]
            if d == d0:
                break

    def degree(self, v: int) -> int:
        return sum(1 for _ in self.out_darts(v))

    def rotation_lists(self):
        return {self.vertex_ids[v]: [self.dart_id(d) for d in self.out_darts(v)]
                for v in range(self.n)}

    def _install_rotation(self, rotation):
        placed = np.zeros(2 * self.m, dtype=bool)
        for vid, dart_ids in rotation.items():
            if vid not in self.vindex:
                raise GraphFormatError(f"rotation lists unknown vertex {vid!r}")
            v = self.vindex[vid]
            darts = [self.parse_dart(di) if isinstance(di, str) else int(di)
                     for di in dart_ids]
            if not darts:
                continue
            for d in darts:
                if self.tail[d] != v:
                    raise GraphFormatError(
                        f"dart {self.dart_id(d)} listed at vertex {vid!r} "
                        "but does not leave it")
                if placed[d]:
                    raise GraphFormatError(f"dart {self.dart_id(d)} listed twice")
                placed[d] = True
            self.first_dart[v] = darts[0]
            k = len(darts)
            for i, d in enumerate(darts):
                self.rot_next[d] = darts[(i + 1) % k]
                self.rot_prev[d] = darts[(i - 1) % k]
        if not placed.all():
            missing = self.dart_id(int(np.flatnonzero(~placed)[0]))
            raise GraphFormatError(f"rotation misses dart {missing}")

    def _validate(self, allow_disconnected):
        if self.n == 0:
            raise GraphFormatError("graph has no vertices")
        if not allow_disconnected and not self.connected():
            raise GraphFormatError("graph is not connected")

    def connected(self) -> bool:
        if self.n <= 1:
            return True
        seen = np.zeros(self.n, dtype=bool)
        stack = [0]
        seen[0] = True
        count = 1
        while stack:
            v = stack.pop()
            for d in self.out_darts(v):
                w = int(self.head[d])
                if not seen[w]:
                    seen[w] = True
                    count += 1
                    stack.append(w)
        return count == self.n

    def adjacency(self):
        """CSR-style (indptr, dart) arrays with darts in rotation order."""
        indptr = np.zeros(self.n + 1, dtype=np.int64)
        darts = np.empty(2 * self.m, dtype=np.int64)
        pos = 0
        for v in range(self.n):
            for d in self.out_darts(v):
                darts[pos] = d
                pos += 1
            indptr[v + 1] = pos
        return indptr, darts

    # ------------------------------------------------------------- editing

    def with_boundary(self, root=None, sinks=None, kind=None) -> "PlanarGraph":
        return PlanarGraph(
            self.vertex_ids,
            [(eid, self.vertex_ids[self.tail[2 * e]],
              self.vertex_ids[self.head[2 * e]], self.conductance_exact[e])
             for e, eid in enumerate(self.edge_ids)],
            self.rotation_lists(),
            root=root if root is not None else (
                None if self.root is None else self.vertex_ids[self.root]),
            sinks=sinks if sinks is not None else
                [self.vertex_ids[s] for s in self.sinks],
            kind=kind or self.kind,
            provenance=self.provenance,
            validate=False,
        )

    def induced_subgraph(self, vertex_ids, root=None, sinks=(), kind="plain",
                         allow_disconnected=False) -> "PlanarGraph":
        """Subgraph on the given vertices, rotation order preserved."""
        keep = set(vertex_ids)
        verts = [v for v in self.vertex_ids if v in keep]
        edges = []
        for e, eid in enumerate(self.edge_ids):
            u, v = self.vertex_ids[self.tail[2 * e]], self.vertex_ids[self.head[2 * e]]
            if u in keep and v in keep:
                edges.append((eid, u, v, self.conductance_exact[e]))
        kept_edges = {eid for eid, *_ in edges}
        rotation = {}
        for vid in verts:
            lst = [self.dart_id(d) for d in self.out_darts(self.vindex[vid])
                   if self.edge_ids[d >> 1] in kept_edges]
            rotation[vid] = lst
        prov = {k: v for k, v in self.provenance.items() if k in keep}
        return PlanarGraph(verts, edges, rotation, root=root, sinks=sinks,
                           kind=kind, provenance=prov,
                           allow_disconnected=allow_disconnected)

    # ----------------------------------------------------------------- io

    def to_json(self) -> dict:
        def num(c: Fraction):
            return float(c) if Fraction(float(c)) == c else f"{c.numerator}/{c.denominator}"
        return {
            "schema": GRAPH_SCHEMA,
            "kind": self.kind,
            "vertices": [{"id": v} for v in self.vertex_ids],
            "edges": [
                {"id": eid,
                 "u": self.vertex_ids[self.tail[2 * e]],
                 "v": self.vertex_ids[self.head[2 * e]],
                 "conductance": num(self.conductance_exact[e])}
                for e, eid in enumerate(self.edge_ids)
            ],
            "rotation": self.rotation_lists(),
            "root": None if self.root is None else self.vertex_ids[self.root],
            "sinks": [self.vertex_ids[s] for s in self.sinks],
            "provenance": self.provenance,
        }


def build_graph(data=None, **kwargs) -> PlanarGraph:
    """Build a validated PlanarGraph from tiler-graph/1 data or kwargs."""
    if data is None:
        data = kwargs
    schema = data.get("schema", GRAPH_SCHEMA)
    if schema != GRAPH_SCHEMA:
        raise GraphFormatError(f"unsupported schema {schema!r}")
    vertices = [v["id"] if isinstance(v, dict) else v for v in data["vertices"]]
    edges = []
    for e in data["edges"]:
        if isinstance(e, dict):
            edges.append((e["id"], e["u"], e["v"], _parse_conductance(e["conductance"])))
        else:
            eid, u, v, c = e
            edges.append((eid, u, v, _parse_conductance(c)))
    return PlanarGraph(
        vertices, edges, data["rotation"],
        root=data.get("root"),
        sinks=data.get("sinks", ()),
        kind=data.get("kind", "plain"),
        provenance=data.get("provenance"),
        allow_disconnected=bool(data.get("allow_disconnected", False)),
    )


def _parse_conductance(c) -> Fraction:
    if isinstance(c, str):
        return Fraction(c)
    if isinstance(c, (int, Fraction)):
        return Fraction(c)
    if isinstance(c, float):
        return Fraction(c)
    raise GraphFormatError(f"bad conductance {c!r}")


# -------------------------------------------------------------------- faces


@dataclass
class Faces:
    """Face cycles of the embedding; each cycle keeps its face on the left."""

    cycles: list
    dart_face: np.ndarray

    def __len__(self):
        return len(self.cycles)

    def degree(self, f: int) -> int:
        return len(self.cycles[f])

    def vertices_of(self, graph: PlanarGraph, f: int):
        return {int(graph.tail[d]) for d in self.cycles[f]}


def trace_faces(graph: PlanarGraph) -> Faces:
    """Trace all face cycles via the fixed successor rule.

    The successor of dart d is rot_prev[reverse(d)], which walks each face
    counterclockwise with the face on the left.  Works per component; for a
    connected plane graph V - E + F = 2.
    """
    two_m = 2 * graph.m
    dart_face = np.full(two_m, -1, dtype=np.int64)
    rot_prev = graph.rot_prev
    cycles = []
    for d0 in range(two_m):
        if dart_face[d0] >= 0:
            continue
        f = len(cycles)
        cycle = []
        d = d0
        while True:
            dart_face[d] = f
            cycle.append(d)
            d = int(rot_prev[d ^ 1])
            if d == d0:
                break
        cycles.append(cycle)
    return Faces(cycles=cycles, dart_face=dart_face)


@dataclass
class DualGraph:
    """Faces as vertices; dual dart of d runs from right(d) to left(d).

    Crossing a primal dart from its right face to its left face moves one
    step along the corresponding dual dart; dual edge conductances are the
    reciprocals of the primal ones.
    """

    graph: PlanarGraph
    faces: Faces
    left: np.ndarray
    right: np.ndarray

    @property
    def n_faces(self) -> int:
        return len(self.faces)

    def dual_dart(self, d: int):
        return int(self.right[d]), int(self.left[d])

    def euler_check(self) -> bool:
        g = self.graph
        return g.n - g.m + self.n_faces == 2


def build_dual(graph: PlanarGraph, faces: Faces | None = None) -> DualGraph:
    if faces is None:
        faces = trace_faces(graph)
    left = faces.dart_face
    right = faces.dart_face[np.arange(2 * graph.m) ^ 1] if graph.m else \
        np.empty(0, dtype=np.int64)
    return DualGraph(graph=graph, faces=faces, left=left, right=right)


# -------------------------------------------------------- edge subdivision


def subdivide_edge(graph: PlanarGraph, edge_id: str, t, *, vertex_id=None):
    """Replace edge e=(u,v) by u-x-v; resistances add up to the original.

    t in (0,1) is the fraction of the edge's resistance on the u side, so
    the u-side conductance is c/t and the v-side is c/(1-t).  Returns the
    new graph; the dummy vertex is recorded in graph.provenance.
    """
    return _subdivide_many(graph, [(edge_id, t, vertex_id)])


def _subdivide_many(graph: PlanarGraph, items) -> PlanarGraph:
    todo = {}
    for edge_id, t, vertex_id in items:
        if edge_id not in graph.eindex:
            raise GraphFormatError(f"unknown edge {edge_id!r}")
        if edge_id in todo:
            raise GraphFormatError(f"edge {edge_id!r} subdivided twice in one pass")
        t = t if isinstance(t, Fraction) else Fraction(t)
        if not (0 < t < 1):
            raise GraphFormatError(f"subdivision parameter {t} outside (0,1)")
        todo[edge_id] = (t, vertex_id or f"{edge_id}~x")

    vertices = list(graph.vertex_ids)
    prov = dict(graph.provenance)
    edges = []
    dart_replace = {}  # old dart id -> new dart id in-place
    for e, eid in enumerate(graph.edge_ids):
        u = graph.vertex_ids[graph.tail[2 * e]]
        v = graph.vertex_ids[graph.head[2 * e]]
        c = graph.conductance_exact[e]
        if eid not in todo:
            edges.append((eid, u, v, c))
            continue
        t, x = todo[eid]
        if x in graph.vindex or x in prov:
            raise GraphFormatError(f"dummy vertex id {x!r} already in use")
        ea, eb = f"{eid}~a", f"{eid}~b"
        vertices.append(x)
        edges.append((ea, u, x, c / t))
        edges.append((eb, x, v, c / (1 - t)))
        dart_replace[eid + "+"] = ea + "+"
        dart_replace[eid + "-"] = eb + "-"
        prov[x] = {"edge": eid, "t": str(t), "upper_half": ea, "lower_half": eb}

    rotation = {}
    for vid in graph.vertex_ids:
        lst = [graph.dart_id(d) for d in graph.out_darts(graph.vindex[vid])]
        rotation[vid] = [dart_replace.get(di, di) for di in lst]
    for eid, (t, x) in todo.items():
        rotation[x] = [f"{eid}~b+", f"{eid}~a-"]

    return PlanarGraph(
        vertices, edges, rotation,
        root=None if graph.root is None else graph.vertex_ids[graph.root],
        sinks=[graph.vertex_ids[s] for s in graph.sinks],
        kind=graph.kind, provenance=prov, validate=False,
    )


# ------------------------------------------------------------- level cuts


@dataclass
class LevelCut:
    """A horizontal cut of the network at height ``level``.

    ``graph`` is the input with every crossing edge subdivided at the cut;
    ``boundary_ids`` are the inserted dummies, which are exactly the
    vertices at height ``level``.  ``upper`` keeps the root and is killed
    at the cut; ``lower`` is everything at or below it.
    """

    level: object
    graph: PlanarGraph
    upper: PlanarGraph
    lower: PlanarGraph
    boundary_ids: list
    heights: dict = field(default_factory=dict)


def cut_at_level(graph: PlanarGraph, heights, level) -> LevelCut:
    """Cut the network along h == level; dummies land exactly on the level.

    heights: mapping vertex id -> height, or an array in vertex order.
    Raises LevelCollisionError if the level hits an existing vertex height;
    nudge the level and retry.
    """
    h = _height_map(graph, heights)
    for vid, val in h.items():
        if val == level:
            raise LevelCollisionError(
                f"level {level} collides with vertex {vid!r}; perturb the level")

    items = []
    for e, eid in enumerate(graph.edge_ids):
        hu = h[graph.vertex_ids[graph.tail[2 * e]]]
        hv = h[graph.vertex_ids[graph.head[2 * e]]]
        if (hu > level) != (hv > level):
            t = (hu - level) / (hu - hv)
            items.append((eid, t, f"{eid}@cut"))
    cut_graph = _subdivide_many(graph, items)

    boundary = [x for _, _, x in items]
    h_ext = dict(h)
    for x in boundary:
        h_ext[x] = level

    upper_ids = [v for v in cut_graph.vertex_ids if h_ext[v] >= level]
    lower_ids = [v for v in cut_graph.vertex_ids if h_ext[v] <= level]
    root_id = None if graph.root is None else graph.vertex_ids[graph.root]
    upper = cut_graph.induced_subgraph(
        upper_ids, root=root_id, sinks=boundary, kind="finite-with-sinks")
    lower_sinks = list(boundary) + [
        graph.vertex_ids[s] for s in graph.sinks
        if h[graph.vertex_ids[s]] < level]
    lower = cut_graph.induced_subgraph(
        lower_ids, sinks=lower_sinks, kind="plain", allow_disconnected=True)
    return LevelCut(level=level, graph=cut_graph, upper=upper, lower=lower,
                    boundary_ids=boundary, heights=h_ext)


def _height_map(graph: PlanarGraph, heights) -> dict:
    if isinstance(heights, dict):
        missing = [v for v in graph.vertex_ids if v not in heights]
        if missing:
            raise GraphFormatError(f"height map misses vertex {missing[0]!r}")
        return {v: heights[v] for v in graph.vertex_ids}
    arr = list(heights)
    if len(arr) != graph.n:
        raise GraphFormatError("height array length != vertex count")
    return {v: arr[i] for i, v in enumerate(graph.vertex_ids)}
