"""Escape probabilities, random-walk flows, and their diagnostics.

The height of a vertex is the probability that walk started there reaches
the root before the sinks.  A solved profile carries the height, the edge
flows c(xy)(h(x) - h(y)), the total outflow eta at the root, and the vertex
strengths pi.  Everything exists twice: float arrays solved sparsely, and
exact rationals from Gaussian elimination, used as the ground truth on
small instances.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spl

from .errors import GraphFormatError, SolverError, TransienceNotEstablished
from .graph import PlanarGraph

PROFILE_SCHEMA = "tiler-profile/1"

MODE_KILLED = "killed-at-sinks"
MODE_EXHAUSTION = "exhaustion-approximation"


def _resolve(g: PlanarGraph, v) -> int:
    if v in g.vindex:
        return g.vindex[v]
    if isinstance(v, int) and 0 <= v < g.n:
        return v
    raise GraphFormatError(f"unknown vertex {v!r}")


def _boundary_indices(g: PlanarGraph, boundary) -> dict:
    out = {}
    for v, val in dict(boundary).items():
        out[_resolve(g, v)] = val
    if not out:
        raise GraphFormatError("boundary set is empty")
    return out


def _check_reachable(g: PlanarGraph, seeds) -> None:
    indptr, darts = g.adjacency()
    seen = np.zeros(g.n, dtype=bool)
    stack = list(seeds)
    seen[stack] = True
    while stack:
        x = stack.pop()
        for d in darts[indptr[x]:indptr[x + 1]]:
            y = g.head[d]
            if not seen[y]:
                seen[y] = True
                stack.append(y)
    if not seen.all():
        bad = g.vertex_ids[int(np.flatnonzero(~seen)[0])]
        raise SolverError(f"vertex {bad!r} is not connected to the boundary")


# ---------------------------------------------------------------- solvers


def solve_dirichlet(g: PlanarGraph, boundary, method: str = "direct",
                    tol: float = 1e-10, maxiter: int | None = None):
    """Harmonic extension of the boundary data.

    method "direct" or "cg" returns a float array over vertices with
    relative residual <= tol; method "exact" runs rational elimination and
    returns a list of Fractions.
    """
    bidx = _boundary_indices(g, boundary)
    _check_reachable(g, list(bidx))
    if method == "exact":
        vals = {x: Fraction(v) for x, v in bidx.items()}
        return _solve_exact(g, vals)
    if method not in ("direct", "cg"):
        raise GraphFormatError(f"unknown solver method {method!r}")
    h, _ = _solve_float(g, bidx, method, tol, maxiter)
    return h


def _solve_float(g, bidx, method, tol, maxiter):
    n = g.n
    bvals = np.zeros(n)
    is_b = np.zeros(n, dtype=bool)
    for x, v in bidx.items():
        is_b[x] = True
        bvals[x] = float(v)
    h = bvals.copy()
    interior = np.flatnonzero(~is_b)
    if interior.size == 0:
        return h, 0.0
    pos = np.full(n, -1, dtype=np.int64)
    pos[interior] = np.arange(interior.size)

    u = g.tail[0::2]
    v = g.head[0::2]
    c = g.conductance
    pi = np.zeros(n)
    np.add.at(pi, u, c)
    np.add.at(pi, v, c)

    iu, iv = ~is_b[u], ~is_b[v]
    both = iu & iv
    rows = np.concatenate([pos[interior], pos[u[both]], pos[v[both]]])
    cols = np.concatenate([pos[interior], pos[v[both]], pos[u[both]]])
    data = np.concatenate([pi[interior], -c[both], -c[both]])
    A = sp.coo_matrix((data, (rows, cols)),
                      shape=(interior.size, interior.size)).tocsr()
    b = np.zeros(interior.size)
    ub = iu & ~iv
    np.add.at(b, pos[u[ub]], c[ub] * bvals[v[ub]])
    vb = ~iu & iv
    np.add.at(b, pos[v[vb]], c[vb] * bvals[u[vb]])

    if method == "direct":
        x = spl.spsolve(A, b)
    else:
        cap = maxiter if maxiter is not None else 50 * interior.size
        try:
            x, info = spl.cg(A, b, rtol=tol, atol=0.0, maxiter=cap)
        except TypeError:  # older scipy spells the kwarg tol
            x, info = spl.cg(A, b, tol=tol, atol=0.0, maxiter=cap)
        if info != 0:
            raise SolverError(f"cg failed to converge (info={info})")
    if not np.all(np.isfinite(x)):
        raise SolverError("singular system (boundary does not pin the solve)")
    bn = float(np.linalg.norm(b))
    res = float(np.linalg.norm(A @ x - b)) / (bn if bn > 0 else 1.0)
    if res > tol:
        raise SolverError(f"residual {res:g} exceeds tolerance {tol:g}")
    h[interior] = x
    return h, res


def _solve_exact(g: PlanarGraph, bvals: dict, source: dict | None = None):
    """Rational Gaussian elimination with min-degree pivoting.

    bvals pins vertices to exact values; source adds an exact net outflow
    requirement at a vertex (for Green-function solves).  Returns the full
    vertex list of Fractions.
    """
    if g.n > 2000:
        raise SolverError("exact solver is limited to 2000 vertices")
    rows: dict[int, dict[int, Fraction]] = {}
    rhs: dict[int, Fraction] = {}
    for x in range(g.n):
        if x not in bvals:
            rows[x] = {}
            rhs[x] = Fraction(0)
    if source:
        for x, s in source.items():
            if x in rhs:
                rhs[x] += Fraction(s)
    for e in range(g.m):
        x, y = int(g.tail[2 * e]), int(g.head[2 * e])
        c = g.conductance_exact[e]
        for a, bv in ((x, y), (y, x)):
            if a in rows:
                row = rows[a]
                row[a] = row.get(a, Fraction(0)) + c
                if bv in rows:
                    row[bv] = row.get(bv, Fraction(0)) - c
                else:
                    rhs[a] += c * Fraction(bvals[bv])

    order = []
    while rows:
        x = min(rows, key=lambda k: len(rows[k]))
        row = rows.pop(x)
        diag = row.pop(x)
        if diag == 0:
            raise SolverError("singular system in exact elimination")
        r = rhs.pop(x)
        coeffs = {y: cf / diag for y, cf in row.items()}
        order.append((x, coeffs, r / diag))
        for y, cf in row.items():
            ry = rows[y]
            f = ry.pop(x)
            scale = f / diag
            rhs[y] -= scale * r
            for z, cz in row.items():
                if z != x:
                    ry[z] = ry.get(z, Fraction(0)) - scale * cz

    h: list = [None] * g.n
    for x, val in bvals.items():
        h[x] = Fraction(val)
    for x, coeffs, r in reversed(order):
        acc = r
        for y, cf in coeffs.items():
            acc -= cf * h[y]
        h[x] = acc
    return h


# ---------------------------------------------------------------- profiles


@dataclass
class HarmonicProfile:
    """Height, flow, and strength data for one solved instance.

    flow is stored per edge, signed along the edge's canonical dart
    (tail -> head as listed); dart_flow gives the antisymmetric view.
    """

    graph: PlanarGraph
    h: np.ndarray
    flow: np.ndarray
    eta: float
    pi: np.ndarray
    mode: str
    residual: float
    h_exact: list | None = None
    flow_exact: list | None = None
    eta_exact: Fraction | None = None
    pi_exact: list | None = None
    cauchy_gap: float | None = None
    extrapolated: bool = False

    @property
    def exact(self) -> bool:
        return self.h_exact is not None

    def dart_flow(self, d: int):
        f = self.flow[d >> 1]
        return f if (d & 1) == 0 else -f

    def dart_flow_exact(self, d: int) -> Fraction:
        f = self.flow_exact[d >> 1]
        return f if (d & 1) == 0 else -f

    def divergence_at(self, x: int):
        if self.exact:
            return sum((self.dart_flow_exact(d) for d in self.graph.out_darts(x)),
                       Fraction(0))
        return float(sum(self.dart_flow(d) for d in self.graph.out_darts(x)))


def compute_flow(g: PlanarGraph, h):
    """Per-edge flow c(xy)(h(x) - h(y)) along each edge's canonical dart."""
    if isinstance(h, np.ndarray):
        return g.conductance * (h[g.tail[0::2]] - h[g.head[0::2]])
    return [g.conductance_exact[e] * (h[g.tail[2 * e]] - h[g.head[2 * e]])
            for e in range(g.m)]


def _pi_exact(g: PlanarGraph) -> list:
    pi = [Fraction(0)] * g.n
    for e in range(g.m):
        c = g.conductance_exact[e]
        pi[int(g.tail[2 * e])] += c
        pi[int(g.head[2 * e])] += c
    return pi


def _pi_float(g: PlanarGraph) -> np.ndarray:
    pi = np.zeros(g.n)
    np.add.at(pi, g.tail[0::2], g.conductance)
    np.add.at(pi, g.head[0::2], g.conductance)
    return pi


def killed_profile(g: PlanarGraph, method: str = "direct",
                   tol: float = 1e-10, maxiter: int | None = None) -> HarmonicProfile:
    """Solve the killed problem: h = 1 at the root, 0 on the sinks."""
    if g.root is None:
        raise GraphFormatError("killed profile needs a root")
    if not g.sinks:
        raise GraphFormatError("killed profile needs a nonempty sink set")
    boundary = {g.root: 1}
    boundary.update({s: 0 for s in g.sinks})
    if method == "exact":
        h_exact = _solve_exact(g, {x: Fraction(v) for x, v in boundary.items()})
        flow_exact = compute_flow(g, h_exact)
        eta_exact = sum((flow_exact[d >> 1] if (d & 1) == 0 else -flow_exact[d >> 1]
                         for d in g.out_darts(g.root)), Fraction(0))
        return HarmonicProfile(
            graph=g, h=np.array([float(x) for x in h_exact]),
            flow=np.array([float(x) for x in flow_exact]),
            eta=float(eta_exact), pi=_pi_float(g), mode=MODE_KILLED,
            residual=0.0, h_exact=h_exact, flow_exact=flow_exact,
            eta_exact=eta_exact, pi_exact=_pi_exact(g))
    bidx = {x: float(v) for x, v in boundary.items()}
    _check_reachable(g, list(bidx))
    h, res = _solve_float(g, bidx, method, tol, maxiter)
    flow = compute_flow(g, h)
    prof = HarmonicProfile(graph=g, h=h, flow=flow, eta=0.0, pi=_pi_float(g),
                           mode=MODE_KILLED, residual=res)
    prof.eta = float(prof.divergence_at(g.root))
    return prof


def _aitken(s0: np.ndarray, s1: np.ndarray, s2: np.ndarray) -> np.ndarray:
    d1 = s1 - s0
    d2 = s2 - s1
    den = d2 - d1
    safe = np.abs(den) > 1e-14 * np.maximum(1.0, np.abs(s2))
    out = s2.copy()
    out[safe] = s2[safe] - d2[safe] * d2[safe] / den[safe]
    return np.clip(out, 0.0, 1.0)


def escape_profile(gen, depths=None, *, tol: float = 1e-6,
                   method: str = "direct", solver_tol: float = 1e-10,
                   extrapolate: bool = True,
                   stop_early: bool = True) -> HarmonicProfile:
    """Height function of an infinite graph via nested truncations.

    gen(depth) must return nested truncations: every vertex id of the
    shallowest graph present in all deeper ones.  Killed solves run at the
    given increasing depths until the sup change over the target vertices
    drops below tol; the profile lives on the shallowest graph.  A finite
    killed instance may be passed directly instead of a generator.
    """
    if isinstance(gen, PlanarGraph):
        return killed_profile(gen, method=method, tol=solver_tol)
    depths = list(depths or ())
    if len(depths) < 2 or any(b <= a for a, b in zip(depths, depths[1:])):
        raise GraphFormatError("depths must be an increasing list, length >= 2")

    g0 = gen(depths[0])
    solves: list[np.ndarray] = []
    gaps: list[float] = []
    for k, d in enumerate(depths):
        gd = g0 if k == 0 else gen(d)
        prof = killed_profile(gd, method=method, tol=solver_tol)
        if k == 0:
            h0 = prof.h
        else:
            try:
                idx = np.array([gd.vindex[v] for v in g0.vertex_ids])
            except KeyError as e:
                raise GraphFormatError(
                    f"truncations are not nested: missing {e.args[0]!r}")
            h0 = prof.h[idx]
        solves.append(h0)
        if k > 0:
            gaps.append(float(np.max(np.abs(solves[-1] - solves[-2]))))
            if stop_early and gaps[-1] < tol:
                break
    if not gaps or gaps[-1] >= tol:
        raise TransienceNotEstablished(
            f"sup change {gaps[-1] if gaps else float('inf'):g} has not "
            f"reached {tol:g}; the graph may be recurrent", gaps=gaps)

    extrapolated = extrapolate and len(solves) >= 3
    h = _aitken(*solves[-3:]) if extrapolated else solves[-1]
    flow = compute_flow(g0, h)
    prof = HarmonicProfile(graph=g0, h=h, flow=flow, eta=0.0,
                           pi=_pi_float(g0), mode=MODE_EXHAUSTION,
                           residual=solver_tol, cauchy_gap=gaps[-1],
                           extrapolated=extrapolated)
    prof.eta = float(prof.divergence_at(g0.root))
    return prof


def _with_conductances(g: PlanarGraph, cond_exact: list) -> PlanarGraph:
    edges = [(g.edge_ids[e], g.vertex_ids[int(g.tail[2 * e])],
              g.vertex_ids[int(g.head[2 * e])], cond_exact[e])
             for e in range(g.m)]
    return PlanarGraph(g.vertex_ids, edges, g.rotation_lists(),
                       root=None if g.root is None else g.vertex_ids[g.root],
                       sinks=[g.vertex_ids[s] for s in g.sinks],
                       kind=g.kind, provenance=g.provenance, validate=False)


def normalize_flow(p: HarmonicProfile) -> HarmonicProfile:
    """Rescale conductances by 1/eta so the root's total outflow is 1."""
    if p.exact:
        if p.eta_exact == 0:
            raise SolverError("eta = 0: no escape from the root")
        s = 1 / p.eta_exact
        cond = [c * s for c in p.graph.conductance_exact]
        g2 = _with_conductances(p.graph, cond)
        flow_exact = [f * s for f in p.flow_exact]
        return HarmonicProfile(
            graph=g2, h=p.h.copy(),
            flow=np.array([float(f) for f in flow_exact]),
            eta=1.0, pi=_pi_float(g2), mode=p.mode, residual=p.residual,
            h_exact=list(p.h_exact), flow_exact=flow_exact,
            eta_exact=Fraction(1), pi_exact=_pi_exact(g2),
            cauchy_gap=p.cauchy_gap, extrapolated=p.extrapolated)
    if p.eta <= 0:
        raise SolverError("eta = 0: no escape from the root")
    s = 1.0 / p.eta
    cond = [Fraction(float(c * s)) for c in p.graph.conductance]
    g2 = _with_conductances(p.graph, cond)
    return HarmonicProfile(
        graph=g2, h=p.h.copy(), flow=p.flow * s,
        eta=float(np.float64(p.eta) * s), pi=p.pi * s, mode=p.mode,
        residual=p.residual, cauchy_gap=p.cauchy_gap,
        extrapolated=p.extrapolated)


def divergence(p: HarmonicProfile, x) -> float:
    """Net outflow at a vertex: eta at the root, ~0 at interior vertices."""
    return p.divergence_at(_resolve(p.graph, x))


def dirichlet_energy(p: HarmonicProfile):
    """Sum of c(xy)(h(x) - h(y))^2 over edges."""
    if p.exact:
        g = p.graph
        return sum((p.flow_exact[e] * (p.h_exact[int(g.tail[2 * e])]
                                       - p.h_exact[int(g.head[2 * e])])
                    for e in range(g.m)), Fraction(0))
    dh = p.h[p.graph.tail[0::2]] - p.h[p.graph.head[0::2]]
    return float(np.dot(p.flow, dh))


# ----------------------------------------------------------- Green function


def green_function(g: PlanarGraph, method: str = "direct",
                   tol: float = 1e-10):
    """Expected visits G(o, y) of the killed walk, via a voltage solve.

    Solves L v = e_o with v = 0 on sinks; then G(o, y) = pi_y * v(y).
    Returns (G, v) as float arrays, or exact Fraction lists for
    method "exact".
    """
    if g.root is None or not g.sinks:
        raise GraphFormatError("green function needs a root and sinks")
    if method == "exact":
        v = _solve_exact(g, {s: Fraction(0) for s in g.sinks},
                         source={g.root: Fraction(1)})
        pi = _pi_exact(g)
        return [pi[x] * v[x] for x in range(g.n)], v
    bidx = {s: 0.0 for s in g.sinks}
    _check_reachable(g, list(bidx))
    n = g.n
    is_b = np.zeros(n, dtype=bool)
    for s in g.sinks:
        is_b[s] = True
    interior = np.flatnonzero(~is_b)
    pos = np.full(n, -1, dtype=np.int64)
    pos[interior] = np.arange(interior.size)
    u, w = g.tail[0::2], g.head[0::2]
    c = g.conductance
    pi = _pi_float(g)
    both = ~is_b[u] & ~is_b[w]
    rows = np.concatenate([pos[interior], pos[u[both]], pos[w[both]]])
    cols = np.concatenate([pos[interior], pos[w[both]], pos[u[both]]])
    data = np.concatenate([pi[interior], -c[both], -c[both]])
    A = sp.coo_matrix((data, (rows, cols)),
                      shape=(interior.size, interior.size)).tocsr()
    b = np.zeros(interior.size)
    b[pos[g.root]] = 1.0
    x = spl.spsolve(A, b)
    if not np.all(np.isfinite(x)):
        raise SolverError("singular system in green solve")
    res = float(np.linalg.norm(A @ x - b))
    if res > tol:
        raise SolverError(f"residual {res:g} exceeds tolerance {tol:g}")
    v = np.zeros(n)
    v[interior] = x
    return pi * v, v


# ------------------------------------------------------------------- io


def profile_to_json(p: HarmonicProfile) -> dict:
    g = p.graph
    return {
        "schema": PROFILE_SCHEMA,
        "mode": p.mode,
        "eta": p.eta,
        "residual": p.residual,
        "cauchy_gap": p.cauchy_gap,
        "extrapolated": p.extrapolated,
        "h": {str(g.vertex_ids[x]): float(p.h[x]) for x in range(g.n)},
        "flow": {str(g.edge_ids[e]): float(p.flow[e]) for e in range(g.m)},
        "pi": {str(g.vertex_ids[x]): float(p.pi[x]) for x in range(g.n)},
    }


def profile_from_json(g: PlanarGraph, data: dict) -> HarmonicProfile:
    if data.get("schema") != PROFILE_SCHEMA:
        raise GraphFormatError(f"expected schema {PROFILE_SCHEMA!r}")
    h = np.array([float(data["h"][str(v)]) for v in g.vertex_ids])
    flow = np.array([float(data["flow"][str(e)]) for e in g.edge_ids])
    pi = np.array([float(data["pi"][str(v)]) for v in g.vertex_ids])
    return HarmonicProfile(graph=g, h=h, flow=flow, eta=float(data["eta"]),
                           pi=pi, mode=data["mode"],
                           residual=float(data["residual"]),
                           cauchy_gap=data.get("cauchy_gap"),
                           extrapolated=bool(data.get("extrapolated", False)))
