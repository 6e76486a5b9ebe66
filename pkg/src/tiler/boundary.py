"""Zero-one harmonic functions defined by boundary arcs, their algebra,
and the layered-boundary audits.

A half-open arc set X on the circle induces a harmonic function
s(v) = P_v(walk exits into X), approximated by Dirichlet solves whose
boundary data is the indicator "the vertex's interval projects wholly
inside X" on successively deeper level sets.  Such functions
concentrate on {0, 1} along walk trajectories, which is what the
verification and drift audits measure.
"""
from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .arcs import ArcSet, circular_distance
from .errors import ArcEndpointError, GraphFormatError, TilingError
from .graph import PlanarGraph
from .harmonic import solve_dirichlet
from .walks import (WalkConfig, exit_distribution, observable_tail_stats,
                    tv_threshold, trajectory_limit, walk_tables)

SHARP_SCHEMA = "tiler-sharp/1"
AUDIT_SCHEMA = "tiler-audit/1"


def _as_arcs(x) -> ArcSet:
    if isinstance(x, ArcSet):
        return x
    out = ArcSet.empty()
    for a, b in x:
        raw = float(b) - float(a)
        if raw <= 0.0:
            raw %= 1.0
        if raw == 0.0:
            raise ValueError("arc with start == end is ambiguous")
        if raw >= 1.0:
            return ArcSet.full()
        out = out.union(ArcSet.from_start_width(float(a) % 1.0, raw))
    return out


def _interval_arc(iv) -> tuple:
    return iv.w_start % 1.0, iv.width


def _level_ids(g: PlanarGraph, level) -> tuple:
    out = []
    for v in level:
        vid = v if isinstance(v, str) else g.vertex_ids[int(v)]
        if vid not in g.vindex:
            raise GraphFormatError(f"unknown vertex {vid!r}")
        out.append(vid)
    if not out:
        raise GraphFormatError("empty level set")
    return tuple(out)


def _above_mask(g: PlanarGraph, level_idx: set) -> np.ndarray:
    """Vertices reachable from the root without entering the level set."""
    mask = np.zeros(g.n, dtype=bool)
    if g.root is None or g.root in level_idx:
        return mask
    mask[g.root] = True
    dq = deque([g.root])
    while dq:
        x = dq.popleft()
        for d in g.out_darts(x):
            y = int(g.head[d])
            if not mask[y] and y not in level_idx:
                mask[y] = True
                dq.append(y)
    return mask


def check_arc_endpoints(t, arcs: ArcSet, vertices=None,
                        tol: float = 1e-12) -> None:
    """Reject arc endpoints that nearly (but not exactly) coincide with a
    vertex-interval endpoint; containment would be float-unstable."""
    pts = []
    if vertices is None:
        ivs = t.vertex_intervals
    else:
        ivs = [t.interval(v) for v in vertices]
    for iv in ivs:
        pts.append(iv.w_start % 1.0)
        pts.append((iv.w_start + iv.width) % 1.0)
    for a in arcs.endpoints():
        a = float(a) % 1.0
        for p in pts:
            d = circular_distance(a, p)
            if 0.0 < d <= tol:
                raise ArcEndpointError(
                    f"arc endpoint {a} is within {tol} of interval endpoint "
                    f"{p}; perturb arc")


def boundary_indicator(t, level, arcs: ArcSet,
                       endpoint_tol: float = 1e-12) -> dict:
    """Indicator boundary data: 1 where the vertex interval projects
    wholly inside the arc set, else 0."""
    g = t.graph
    ids = _level_ids(g, level)
    check_arc_endpoints(t, arcs, ids, endpoint_tol)
    data = {}
    for vid in ids:
        iv = t.interval(vid)
        start, width = _interval_arc(iv)
        data[vid] = 1.0 if arcs.contains_arc(start, width) else 0.0
    return data


@dataclass
class ZeroOneHarmonic:
    """Harmonic [0, 1] function induced by a boundary arc set.

    values[v] approximates the probability that the walk from v exits
    into the defining arcs; the threshold 1/2 splits level sets into
    the F-sets used by the drift audits.
    """
    graph: PlanarGraph
    tiling: object
    arcs: ArcSet
    values: np.ndarray
    gap: np.ndarray | None
    levels: tuple
    converged: bool
    max_gap: float
    tol: float
    method: str = "direct"
    threshold: float = 0.5
    mc_check: dict | None = field(default=None, compare=False)

    def value(self, v) -> float:
        idx = self.graph.vindex[v] if isinstance(v, str) else int(v)
        return float(self.values[idx])

    def level_f_set(self, level, threshold: float | None = None) -> list:
        thr = self.threshold if threshold is None else threshold
        return [vid for vid in _level_ids(self.graph, level)
                if self.value(vid) > thr]

    def project(self, vertices) -> ArcSet:
        out = ArcSet.empty()
        for vid in vertices:
            iv = self.tiling.interval(vid)
            out = out.union(ArcSet.from_start_width(*_interval_arc(iv)))
        return out


def harmonic_from_arcs(t, arcs, levels=None, *, tol: float = 1e-3,
                       method: str = "direct", solver_tol: float = 1e-10,
                       endpoint_tol: float = 1e-12) -> ZeroOneHarmonic:
    """Solve for the arc-induced harmonic function, refining the
    boundary level until consecutive solves agree above the shallower
    level.  The deepest solve provides the values; the disagreement
    with the previous solve is recorded per vertex."""
    g = t.graph
    arcs = _as_arcs(arcs)
    if levels is None:
        if not g.sinks:
            raise GraphFormatError("no sinks and no explicit levels")
        levels = [[g.vertex_ids[v] for v in g.sinks]]
    levels = [_level_ids(g, lv) for lv in levels]
    prev = None
    values = None
    gap = None
    max_gap = math.inf
    for ids in levels:
        data = boundary_indicator(t, ids, arcs, endpoint_tol)
        values = np.asarray(
            solve_dirichlet(g, data, method=method, tol=solver_tol),
            dtype=np.float64)
        if prev is not None:
            above = _above_mask(g, {g.vindex[i] for i in prev_ids})
            gap = np.full(g.n, np.nan)
            gap[above] = np.abs(values[above] - prev[above])
            max_gap = float(np.nanmax(gap)) if above.any() else math.inf
        prev, prev_ids = values, ids
    converged = len(levels) >= 2 and max_gap < tol
    return ZeroOneHarmonic(graph=g, tiling=t, arcs=arcs, values=values,
                           gap=gap, levels=tuple(levels),
                           converged=converged,
                           max_gap=max_gap if gap is not None else math.inf,
                           tol=tol, method=method)


def extend_to_subdivision(s: ZeroOneHarmonic,
                          g2: PlanarGraph) -> ZeroOneHarmonic:
    """Carry s onto a subdivision of its graph; dummy vertices get the
    series-interpolated value of the defining solve, never a re-solve."""
    g = s.graph
    values = np.empty(g2.n, dtype=np.float64)
    for i, vid in enumerate(g2.vertex_ids):
        if vid in g.vindex:
            values[i] = s.values[g.vindex[vid]]
            continue
        info = g2.provenance.get(vid)
        if not info or "edge" not in info:
            raise GraphFormatError(
                f"vertex {vid!r} is not in the base graph and has no "
                "subdivision provenance")
        e = g.eindex[info["edge"]]
        u, v = int(g.tail[2 * e]), int(g.head[2 * e])
        frac = float(Fraction(info["t"]))
        values[i] = s.values[u] + frac * (s.values[v] - s.values[u])
    return ZeroOneHarmonic(graph=g2, tiling=s.tiling, arcs=s.arcs,
                           values=values, gap=None, levels=s.levels,
                           converged=s.converged, max_gap=s.max_gap,
                           tol=s.tol, method=s.method)


def harmonic_residual(s: ZeroOneHarmonic, boundary=None) -> float:
    """Max normalized violation of the mean-value property off the
    defining boundary."""
    g = s.graph
    fixed = set(_level_ids(g, boundary if boundary is not None
                           else s.levels[-1]))
    prep = walk_tables(g)
    worst = 0.0
    for v in range(g.n):
        if g.vertex_ids[v] in fixed:
            continue
        lo, hi = int(prep["indptr"][v]), int(prep["indptr"][v + 1])
        if hi == lo:
            continue
        ds = prep["darts"][lo:hi]
        c = g.conductance[ds >> 1]
        resid = float(np.dot(c, s.values[g.head[ds]] - s.values[v]) / c.sum())
        worst = max(worst, abs(resid))
    return worst


# ----------------------------------------------------------------- algebra

def combine_zero_one(parts, op: str, cfg: WalkConfig | None = None,
                     mc_tol: float = 0.02) -> ZeroOneHarmonic:
    """Combine arc-defined functions by set algebra on their arcs, then
    re-solve on the shared tiling.  With a walk config, cross-checks the
    root value against the tail-event frequency."""
    if isinstance(parts, ZeroOneHarmonic):
        parts = [parts]
    parts = list(parts)
    if not parts:
        raise ValueError("no parts to combine")
    base = parts[0]
    for p in parts[1:]:
        if p.tiling is not base.tiling or p.levels != base.levels:
            raise TilingError("parts live on different tilings or levels")
    if op == "complement":
        if len(parts) != 1:
            raise ValueError("complement takes exactly one part")
        arcs = base.arcs.complement()
    elif op == "union":
        arcs = ArcSet.empty()
        for p in parts:
            arcs = arcs.union(p.arcs)
    elif op == "intersection":
        arcs = ArcSet.full()
        for p in parts:
            arcs = arcs.intersection(p.arcs)
    else:
        raise ValueError(f"unknown combination {op!r}")
    out = harmonic_from_arcs(base.tiling, arcs, base.levels, tol=base.tol,
                             method=base.method)
    if cfg is not None:
        stats = observable_tail_stats(out.graph, out.values, cfg)
        n = max(stats.completed, 1)
        limit1 = sum(stats.limit_one.values()) / n
        root_val = float(out.values[out.graph.root])
        sigma = math.sqrt(max(limit1 * (1 - limit1), 1.0 / n) / n)
        tol_eff = max(mc_tol, 4 * sigma)
        out.mc_check = {"probe": out.graph.vertex_ids[out.graph.root],
                        "value": root_val, "limit_one": limit1,
                        "tolerance": tol_eff,
                        "ok": abs(limit1 - root_val) <= tol_eff}
    return out


# ------------------------------------------------------------ verification

@dataclass
class ProbeReport:
    probe: str
    value: float
    limit_one: float
    limit_zero: float
    middle: float
    tolerance: float
    censored: int

    @property
    def value_ok(self) -> bool:
        return abs(self.limit_one - self.value) <= self.tolerance

    def middle_ok(self, delta0: float = 0.01) -> bool:
        return self.middle <= delta0


@dataclass
class ZeroOneReport:
    probes: list
    delta0: float
    escape_bound: float
    escape_frac: float
    escape_sigma: float
    escape_probe: str | None
    alternation_tail: list  # (k, empirical, bound, sigma)

    @property
    def escape_ok(self) -> bool:
        if self.escape_probe is None:
            return True
        slack = self.escape_bound + 3 * self.escape_sigma
        return self.escape_frac <= slack

    @property
    def alternations_ok(self) -> bool:
        return all(emp <= bound + 3 * sig
                   for _, emp, bound, sig in self.alternation_tail)

    def all_ok(self) -> bool:
        return (all(p.value_ok and p.middle_ok(self.delta0)
                    for p in self.probes)
                and self.escape_ok and self.alternations_ok)


def verify_zero_one(s: ZeroOneHarmonic, cfg: WalkConfig, probes=None, *,
                    eps0: float = 0.05, delta0: float = 0.01,
                    k_run: int = 20, band_hi: float = 0.9,
                    band_lo: float = 0.1, escape_delta: float = 0.5,
                    value_tol: float = 0.02) -> ZeroOneReport:
    """Empirical zero-one behaviour of s along killed walks.

    Per probe z: the fraction of walks whose trailing s-values pin to 1
    estimates s(z); the middle zone stays below delta0.  Adds the
    escape bound (started above band_hi, ever below escape_delta) and
    the alternation-count tail bounds."""
    g = s.graph
    if probes is None:
        probes = [g.vertex_ids[g.root]]
    reports = []
    for z in probes:
        st = observable_tail_stats(g, s.values, cfg, thr_hi=1 - eps0,
                                   thr_lo=eps0, k_run=k_run, band_hi=band_hi,
                                   band_lo=band_lo, delta=escape_delta,
                                   start=z)
        n = max(st.completed, 1)
        ones = sum(st.limit_one.values()) / n
        zeros = sum(st.limit_zero.values()) / n
        sigma = math.sqrt(max(ones * (1 - ones), 1.0 / n) / n)
        reports.append(ProbeReport(
            probe=z if isinstance(z, str) else g.vertex_ids[int(z)],
            value=s.value(z), limit_one=ones, limit_zero=zeros,
            middle=1.0 - ones - zeros,
            tolerance=max(value_tol, 4 * sigma), censored=st.censored))
    # escape spot-check from the best vertex inside {s > band_hi}
    absorb = np.zeros(g.n, dtype=bool)
    if g.sinks:
        absorb[np.asarray(g.sinks, dtype=np.int64)] = True
    cand = [v for v in range(g.n) if s.values[v] > band_hi and not absorb[v]]
    esc_frac = esc_sig = 0.0
    esc_probe = None
    bound = (1 - band_hi) / escape_delta
    if cand:
        z = max(cand, key=lambda v: s.values[v])
        esc_probe = g.vertex_ids[z]
        st = observable_tail_stats(g, s.values, cfg, thr_hi=1 - eps0,
                                   thr_lo=eps0, k_run=k_run, band_hi=band_hi,
                                   band_lo=band_lo, delta=escape_delta,
                                   start=z)
        n = max(st.completed, 1)
        esc_frac = st.ever_below / n
        esc_sig = math.sqrt(max(esc_frac * (1 - esc_frac), 1.0 / n) / n)
    # alternation tails from the root
    st = observable_tail_stats(g, s.values, cfg, thr_hi=1 - eps0,
                               thr_lo=eps0, k_run=k_run, band_hi=band_hi,
                               band_lo=band_lo, delta=escape_delta)
    n = max(st.completed, 1)
    hist = st.alternation_hist
    tails = []
    for k in range(1, 5):
        emp = sum(hist[k:]) / n
        sig = math.sqrt(max(emp * (1 - emp), 1.0 / n) / n)
        tails.append((k, emp, (2 * band_lo) ** k, sig))
    return ZeroOneReport(probes=reports, delta0=delta0, escape_bound=bound,
                         escape_frac=esc_frac, escape_sigma=esc_sig,
                         escape_probe=esc_probe, alternation_tail=tails)


# ------------------------------------------------------------------- drift

@dataclass
class LevelSetDrift:
    level_m: tuple
    level_n: tuple
    f_m: tuple
    f_n: tuple
    symdiff_width: float
    x_symdiff_width: float
    impurity_mass: float


def level_set_drift(s: ZeroOneHarmonic, levels=None) -> list:
    """Projected symmetric-difference widths of thresholded level sets,
    for consecutive level pairs.

    F-sets use the fixed 1/2 threshold; the X-variant uses 1 - 2^-i for
    the i-th level.  Impurity classifies deeper vertices by whether
    their interval midpoint sits inside the shallower projection."""
    g = s.graph
    levels = [_level_ids(g, lv) for lv in
              (levels if levels is not None else s.levels)]
    rows = []
    for i in range(len(levels) - 1):
        lm, ln = levels[i], levels[i + 1]
        fm = s.level_f_set(lm)
        fn = s.level_f_set(ln)
        pm, pn = s.project(fm), s.project(fn)
        sym = float(pm.symmetric_difference(pn).length())
        xm = s.level_f_set(lm, 1 - 2.0 ** -(i + 1))
        xn = s.level_f_set(ln, 1 - 2.0 ** -(i + 2))
        xsym = float(s.project(xm).symmetric_difference(
            s.project(xn)).length())
        impurity = 0.0
        fn_set = set(fn)
        for vid in ln:
            iv = s.tiling.interval(vid)
            mid = (iv.w_start + 0.5 * iv.width) % 1.0
            if pm.contains(mid) != (vid in fn_set):
                impurity += iv.width
        rows.append(LevelSetDrift(level_m=lm, level_n=ln, f_m=tuple(fm),
                                  f_n=tuple(fn), symdiff_width=sym,
                                  x_symdiff_width=xsym,
                                  impurity_mass=impurity))
    return rows


# ------------------------------------------------------------- faithfulness

@dataclass
class FaithfulnessReport:
    estimate: float
    sigma: float
    x_estimate: ArcSet
    terminal_drift: float
    drift_converged: bool
    censored: int

    def ok(self, tol: float = 0.02) -> bool:
        return self.estimate <= tol + 3 * self.sigma


def boundary_event_match(s: ZeroOneHarmonic, cfg: WalkConfig, *,
                         eps0: float = 0.05, k_run: int = 20,
                         drift_tol: float = 0.05) -> FaithfulnessReport:
    """Estimate the symmetric difference between the tail event {s -> 1}
    and {walk exits into X}, with X recovered as the lim-inf of the
    projected F-sets."""
    g = s.graph
    projections = [s.project(s.level_f_set(lv)) for lv in s.levels]
    x_est = ArcSet.empty()
    suffix = ArcSet.full()
    for p in reversed(projections):
        suffix = suffix.intersection(p)
        x_est = x_est.union(suffix)
    rows = level_set_drift(s)
    terminal = rows[-1].symdiff_width if rows else math.inf
    st = observable_tail_stats(g, s.values, cfg, thr_hi=1 - eps0,
                               thr_lo=eps0, k_run=k_run)
    n = max(st.completed, 1)
    mism = 0
    for vid, c in st.finals.items():
        iv = s.tiling.interval(vid)
        mid = (iv.w_start + 0.5 * iv.width) % 1.0
        ones = st.limit_one.get(vid, 0)
        mism += (c - ones) if x_est.contains(mid) else ones
    est = mism / n
    sigma = math.sqrt(max(est * (1 - est), 1.0 / n) / n)
    return FaithfulnessReport(estimate=est, sigma=sigma, x_estimate=x_est,
                              terminal_drift=terminal,
                              drift_converged=terminal < drift_tol,
                              censored=st.censored)


# --------------------------------------------------------------- checklist

@dataclass
class ChecklistItem:
    name: str
    passed: bool | None
    value: float | None
    tolerance: float | None
    detail: str


@dataclass
class Checklist:
    items: list
    seed: int

    @property
    def all_passed(self) -> bool:
        return all(i.passed is True for i in self.items
                   if i.passed is not None) and \
            any(i.passed is not None for i in self.items)


def trajectory_item(t, cfg: WalkConfig, *, diameter_tol: float = 0.01,
                    censor_tol: float = 1e-3) -> ChecklistItem:
    traj = trajectory_limit(t, cfg)
    censor_frac = traj.censored / max(cfg.trials, 1)
    conv_ok = censor_frac <= censor_tol and \
        traj.mean_final_diameter <= diameter_tol
    return ChecklistItem(
        name="trajectory-convergence", passed=conv_ok,
        value=traj.mean_final_diameter, tolerance=diameter_tol,
        detail=f"censored fraction {censor_frac:.2e}, mean final interval "
               f"diameter {traj.mean_final_diameter:.3e}")


def layeredness_item(t, cfg: WalkConfig, *, level=None,
                     width_reference: dict | None = None,
                     tv_cap: float = 0.02) -> ChecklistItem:
    """Exit measure on a cut vs projected interval widths (TV distance).

    Pick a cut with at most ~trials/6400 atoms, otherwise the TV estimate
    drowns in multinomial noise before reaching the cap."""
    g = t.graph
    if level is None:
        cut = [g.vertex_ids[v] for v in g.sinks]
    else:
        cut = list(_level_ids(g, level))
    if width_reference is None:
        width_reference = {vid: t.interval(vid).width for vid in cut}
    ref_sum = math.fsum(width_reference.values())
    stats = exit_distribution(g, cut, cfg, reference=width_reference)
    thr = tv_threshold(len(cut), cfg.trials, tv_cap)
    # a cut's projected intervals tile the circle, so a reference that does
    # not sum to 1 cannot be the width measure no matter what the TV says
    lay_ok = abs(ref_sum - 1.0) <= 1e-9 and \
        stats.tv_vs_reference is not None and \
        stats.tv_vs_reference <= thr
    return ChecklistItem(
        name="layeredness", passed=lay_ok, value=stats.tv_vs_reference,
        tolerance=thr,
        detail=f"exit TV vs projected widths {stats.tv_vs_reference:.4f}, "
               f"reference mass {ref_sum:.9f}")


def drift_item(s: "ZeroOneHarmonic", name: str = "drift",
               drift_tol: float = 0.05) -> ChecklistItem:
    if len(s.levels) < 2:
        return ChecklistItem(name=name, passed=None, value=None,
                             tolerance=drift_tol, detail="insufficient levels")
    rows = level_set_drift(s)
    terminal = rows[-1].symdiff_width
    return ChecklistItem(
        name=name, passed=terminal < drift_tol, value=terminal,
        tolerance=drift_tol,
        detail=f"terminal projected symdiff width {terminal:.4f}")


def layered_boundary_checklist(t, functions, cfg: WalkConfig, *,
                               level=None,
                               width_reference: dict | None = None,
                               diameter_tol: float = 0.01,
                               tv_cap: float = 0.02,
                               drift_tol: float = 0.05,
                               censor_tol: float = 1e-3) -> Checklist:
    """Desk-scale audit of the layered-boundary hypotheses:
    (a) trajectory convergence, (b) exit measure on a cut = projected
    interval lengths, (c) level-set drift per supplied function.

    ``level`` names the vertex ids of the cut used for (b); default is the
    sinks.  See layeredness_item for the atom-count caveat."""
    items = [trajectory_item(t, cfg, diameter_tol=diameter_tol,
                             censor_tol=censor_tol),
             layeredness_item(t, cfg, level=level,
                              width_reference=width_reference, tv_cap=tv_cap)]
    if isinstance(functions, ZeroOneHarmonic):
        functions = [functions]
    for i, s in enumerate(functions):
        items.append(drift_item(s, name=f"drift[{i}]", drift_tol=drift_tol))
    return Checklist(items=items, seed=cfg.seed)


# ------------------------------------------------------------------ export

def sharp_to_json(s: ZeroOneHarmonic, probes=None) -> dict:
    g = s.graph
    if probes is None:
        probes = [g.vertex_ids[g.root]] if g.root is not None else []
    doc = {"schema": SHARP_SCHEMA,
           "arcs": s.arcs.to_json(),
           "threshold": s.threshold,
           "tolerance": s.tol,
           "converged": s.converged,
           "levels": [list(lv) for lv in s.levels],
           "probe_values": {p: s.value(p) for p in probes}}
    if s.gap is not None:
        doc["max_gap"] = s.max_gap
        doc["probe_gaps"] = {
            p: (None if math.isnan(gv) else gv)
            for p in probes
            for gv in [float(s.gap[g.vindex[p]])]}
    return doc


def audit_to_json(check: Checklist, cfg: WalkConfig | None = None) -> dict:
    doc = {"schema": AUDIT_SCHEMA, "seed": check.seed,
           "all_passed": check.all_passed,
           "items": [{"name": i.name, "passed": i.passed, "value": i.value,
                      "tolerance": i.tolerance, "detail": i.detail}
                     for i in check.items]}
    if cfg is not None:
        doc["config"] = cfg.echo()
    return doc
