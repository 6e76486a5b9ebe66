"""Random-walk statistics on conductance networks and their tilings.

All estimators run on per-trial splitmix64 streams keyed by (seed,
trial index), so results are reproducible, independent of the kernel
backend, and stats from disjoint trial ranges merge exactly.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .arcs import ArcSet, circular_distance
from .errors import GraphFormatError, MeridianEndpointError, TilingError
from .graph import PlanarGraph
from .kernels import ALT_CAP, get_backend
from .rng import Stream

STATS_SCHEMA = "tiler-stats/1"

# Fixed-point scale for height accumulators; keeps checkpoint sums in
# integers so backend parity and stats merging stay exact.
H_SCALE = 1 << 40


@dataclass(frozen=True)
class WalkConfig:
    """Trial-range and termination parameters shared by all estimators."""
    seed: int = 1
    trials: int = 10_000
    step_cap: int = 1_000_000
    kill: str = "sinks"  # "sinks" | "level" | "none"
    horizontal_sampling: bool = False
    trial_offset: int = 0

    def __post_init__(self):
        if not 0 <= self.seed < 2 ** 64:
            raise ValueError("seed must be a 64-bit unsigned integer")
        if self.trials <= 0 or self.step_cap <= 0 or self.trial_offset < 0:
            raise ValueError("trials, step_cap must be positive; offset >= 0")
        if self.kill not in ("sinks", "level", "none"):
            raise ValueError(f"unknown kill rule {self.kill!r}")

    def echo(self) -> dict:
        return {"seed": self.seed, "trials": self.trials,
                "step_cap": self.step_cap, "kill": self.kill,
                "horizontal_sampling": self.horizontal_sampling,
                "trial_offset": self.trial_offset}


def _as_mask(g: PlanarGraph, vertices) -> np.ndarray:
    mask = np.zeros(g.n, dtype=bool)
    for v in vertices:
        if isinstance(v, str):
            if v not in g.vindex:
                raise GraphFormatError(f"unknown vertex {v!r}")
            mask[g.vindex[v]] = True
        else:
            mask[int(v)] = True
    return mask


def _absorb_mask(g: PlanarGraph, level_mask: np.ndarray | None,
                 kill: str) -> np.ndarray:
    mask = np.zeros(g.n, dtype=bool)
    if level_mask is not None:
        mask |= level_mask
    if kill == "sinks" and g.sinks:
        mask[np.asarray(g.sinks, dtype=np.int64)] = True
    return mask


def walk_tables(g: PlanarGraph) -> dict:
    """Shared transition tables: rotation-order CSR plus per-vertex
    cumulative step probabilities.  Both kernel backends read the same
    arrays, which is what makes their dart choices bit-identical."""
    cached = getattr(g, "_walk_prep", None)
    if cached is not None:
        return cached
    indptr, darts = g.adjacency()
    cum = np.empty(2 * g.m, dtype=np.float64)
    maxdeg = 1
    for v in range(g.n):
        lo, hi = int(indptr[v]), int(indptr[v + 1])
        if hi > lo:
            c = g.conductance[darts[lo:hi] >> 1]
            cum[lo:hi] = np.cumsum(c) / c.sum()
            cum[hi - 1] = 1.0  # guard against < 1 rounding in the top slot
            maxdeg = max(maxdeg, hi - lo)
    cum2d = np.full((g.n, maxdeg), 2.0, dtype=np.float64)
    dart2d = np.zeros((g.n, maxdeg), dtype=np.int64)
    for v in range(g.n):
        lo, hi = int(indptr[v]), int(indptr[v + 1])
        deg = hi - lo
        if deg:
            cum2d[v, :deg] = cum[lo:hi]
            dart2d[v, :deg] = darts[lo:hi]
            dart2d[v, deg:] = darts[lo]
    prep = {"n": g.n, "indptr": indptr, "darts": darts, "cum": cum,
            "head": g.head, "cum2d": cum2d, "dart2d": dart2d}
    g._walk_prep = prep
    return prep


def _check_walkable(g: PlanarGraph, absorb: np.ndarray) -> int:
    if g.root is None:
        raise GraphFormatError("walks need a root vertex")
    deg0 = np.diff(walk_tables(g)["indptr"]) == 0
    stuck = deg0 & ~absorb
    if stuck.any():
        vid = g.vertex_ids[int(np.nonzero(stuck)[0][0])]
        raise GraphFormatError(
            f"vertex {vid!r} has no edges and is not absorbing")
    return g.root


def sample_step(g: PlanarGraph, x, stream: Stream) -> int:
    """One conductance-weighted step; returns the chosen outgoing dart."""
    v = g.vindex[x] if isinstance(x, str) else int(x)
    prep = walk_tables(g)
    lo, hi = int(prep["indptr"][v]), int(prep["indptr"][v + 1])
    if hi == lo:
        raise GraphFormatError(
            f"vertex {g.vertex_ids[v]!r} has no outgoing darts")
    u = stream.u01()
    k = lo
    while u >= prep["cum"][k]:
        k += 1
    return int(prep["darts"][k])


# ----------------------------------------------------------- exit statistics

@dataclass
class ExitStats:
    """Visit counts on a watched vertex set over completed trials.

    Censored trials (step cap reached before absorption) are reported
    separately and never folded into the counts.
    """
    kind: str
    counts: dict
    companion: dict | None
    completed: int
    censored: int
    seed: int
    step_cap: int
    ranges: tuple
    tv_vs_reference: float | None = None
    reference: dict | None = None
    steps_total: int = 0

    @property
    def trials(self) -> int:
        return sum(t for _, t in self.ranges)

    def frequencies(self) -> dict:
        if self.completed == 0:
            return {}
        return {k: v / self.completed for k, v in self.counts.items()}

    def merge(self, other: "ExitStats") -> "ExitStats":
        if (self.kind, self.seed, self.step_cap) != \
                (other.kind, other.seed, other.step_cap):
            raise ValueError("stats come from incompatible runs")
        spans = sorted(self.ranges + other.ranges)
        for (a, ta), (b, _) in zip(spans, spans[1:]):
            if a + ta > b:
                raise ValueError("trial ranges overlap; cannot merge")
        merged = [list(spans[0])]
        for b, tb in spans[1:]:
            if merged[-1][0] + merged[-1][1] == b:
                merged[-1][1] += tb
            else:
                merged.append([b, tb])
        counts = dict(self.counts)
        for k, v in other.counts.items():
            counts[k] = counts.get(k, 0) + v
        companion = None
        if self.companion is not None and other.companion is not None:
            companion = dict(self.companion)
            for k, v in other.companion.items():
                companion[k] = companion.get(k, 0) + v
        out = replace(self, counts=counts, companion=companion,
                      completed=self.completed + other.completed,
                      censored=self.censored + other.censored,
                      ranges=tuple(tuple(r) for r in merged),
                      steps_total=self.steps_total + other.steps_total)
        if out.reference is not None:
            out.tv_vs_reference = tv_distance(out.frequencies(), out.reference)
        return out


def tv_distance(p: dict, q: dict) -> float:
    # fsum: key-set iteration order varies across processes for str keys
    keys = set(p) | set(q)
    return 0.5 * math.fsum(abs(p.get(k, 0.0) - q.get(k, 0.0)) for k in keys)


def tv_threshold(atoms: int, trials: int, cap: float = 0.02) -> float:
    """Sampling-noise allowance for an empirical distribution on
    `atoms` outcomes from `trials` samples, capped."""
    return min(cap, 4.0 * math.sqrt(atoms / max(trials, 1)))


def _counts_dict(g: PlanarGraph, arr: np.ndarray) -> dict:
    return {g.vertex_ids[i]: int(c) for i, c in enumerate(arr) if c}


def _run_hit(g: PlanarGraph, absorb: np.ndarray, watch: np.ndarray,
             cfg: WalkConfig):
    root = _check_walkable(g, absorb)
    kern = get_backend()
    return kern.hit_walk(walk_tables(g), absorb, watch, root, cfg.seed,
                         cfg.trials, cfg.trial_offset, cfg.step_cap)


def exit_distribution(g: PlanarGraph, boundary, cfg: WalkConfig,
                      reference: dict | None = None) -> ExitStats:
    """First-hit distribution of the walk from the root on `boundary`.

    `boundary` should separate the root from the graph's sinks; with the
    default kill rule stray absorptions at sinks off the boundary end
    the trial and leave first/last unset for it.
    """
    watch = _as_mask(g, boundary)
    absorb = _absorb_mask(g, watch, cfg.kill)
    first, _last, completed, censored, steps = _run_hit(g, absorb, watch, cfg)
    stats = ExitStats(kind="first-hit", counts=_counts_dict(g, first),
                      companion=None, completed=completed, censored=censored,
                      seed=cfg.seed, step_cap=cfg.step_cap,
                      ranges=((cfg.trial_offset, cfg.trials),),
                      reference=dict(reference) if reference else None,
                      steps_total=steps)
    if reference:
        stats.tv_vs_reference = tv_distance(stats.frequencies(), reference)
    return stats


def last_visit_distribution(g: PlanarGraph, watched, absorbing,
                            cfg: WalkConfig,
                            reference: dict | None = None) -> ExitStats:
    """Distribution of the last `watched` vertex visited before the walk
    is absorbed on `absorbing`.  First-hit counts ride along in
    `companion`; with watched == absorbing the two agree exactly."""
    watch = _as_mask(g, watched)
    absorb = _absorb_mask(g, _as_mask(g, absorbing), cfg.kill)
    first, last, completed, censored, steps = _run_hit(g, absorb, watch, cfg)
    stats = ExitStats(kind="last-visit", counts=_counts_dict(g, last),
                      companion=_counts_dict(g, first), completed=completed,
                      censored=censored, seed=cfg.seed, step_cap=cfg.step_cap,
                      ranges=((cfg.trial_offset, cfg.trials),),
                      reference=dict(reference) if reference else None,
                      steps_total=steps)
    if reference:
        stats.tv_vs_reference = tv_distance(stats.frequencies(), reference)
    return stats


# ------------------------------------------------------------- dart net flux

@dataclass
class DartFlux:
    dart: str
    excursion_mean: float
    excursion_sigma: float
    total_mean: float
    total_sigma: float
    expected: float | None

    def excursion_ok(self, z: float = 4.0) -> bool:
        slack = z * max(self.excursion_sigma, 1e-15)
        return abs(self.excursion_mean) <= slack

    def total_ok(self, z: float = 4.0) -> bool:
        if self.expected is None:
            return True
        slack = z * max(self.total_sigma, 1e-15)
        return abs(self.total_mean - self.expected) <= slack


@dataclass
class FluxStats:
    darts: list
    completed: int
    censored: int
    seed: int
    step_cap: int
    ranges: tuple

    def all_ok(self, z: float = 4.0) -> bool:
        return all(d.excursion_ok(z) and d.total_ok(z) for d in self.darts)


def _mean_sigma(total: int, sq: int, n: int) -> tuple:
    if n == 0:
        return 0.0, 0.0
    mean = total / n
    if n == 1:
        return mean, 0.0
    var = max((sq - total * total / n) / (n - 1), 0.0)
    return mean, math.sqrt(var / n)


def interior_subwalk_flux(g: PlanarGraph, level, absorbing, darts,
                          cfg: WalkConfig, profile=None) -> FluxStats:
    """Net traversals of watched darts, split into complete excursions
    between visits to `level` versus whole-trial totals.

    Excursion nets estimate zero; whole-trial nets estimate the per-walk
    harmonic flow through the dart when a profile is supplied.
    """
    level_mask = _as_mask(g, level)
    absorb = _absorb_mask(g, _as_mask(g, absorbing), cfg.kill)
    root = _check_walkable(g, absorb)
    dart_idx = [g.parse_dart(d) if isinstance(d, str) else int(d)
                for d in darts]
    slot = np.full(2 * g.m, -1, dtype=np.int64)
    for i, d in enumerate(dart_idx):
        slot[d] = i
    kern = get_backend()
    exc_sum, exc_sq, tot_sum, tot_sq, completed, censored = kern.flux_walk(
        walk_tables(g), absorb, level_mask, slot, len(dart_idx), root,
        cfg.seed, cfg.trials, cfg.trial_offset, cfg.step_cap)
    eta = None
    if profile is not None:
        eta = profile.eta if profile.eta else 1.0
    out = []
    for i, d in enumerate(dart_idx):
        em, es = _mean_sigma(int(exc_sum[i]), int(exc_sq[i]), completed)
        tm, ts = _mean_sigma(int(tot_sum[i]), int(tot_sq[i]), completed)
        expected = None
        if profile is not None:
            expected = float(profile.dart_flow(d)) / eta
        out.append(DartFlux(dart=g.dart_id(d), excursion_mean=em,
                            excursion_sigma=es, total_mean=tm,
                            total_sigma=ts, expected=expected))
    return FluxStats(darts=out, completed=completed, censored=censored,
                     seed=cfg.seed, step_cap=cfg.step_cap,
                     ranges=((cfg.trial_offset, cfg.trials),))


# --------------------------------------------------------- meridian crossings

@dataclass
class MeridianReport:
    meridian: float
    total_mean: float
    total_sigma: float
    vertex_net: dict
    vertex_events: dict
    max_vertex_ratio: float

    def total_ok(self, z: float = 4.0) -> bool:
        return abs(self.total_mean) <= z * max(self.total_sigma, 1e-15)

    def vertices_ok(self, z: float = 4.0) -> bool:
        return self.max_vertex_ratio <= z


@dataclass
class MeridianStats:
    reports: list
    completed: int
    censored: int
    seed: int
    step_cap: int
    ranges: tuple

    def all_ok(self, z: float = 4.0) -> bool:
        return all(r.total_ok(z) and r.vertices_ok(z) for r in self.reports)


def _tiling_span_arrays(t):
    g = t.graph
    vert_a = np.zeros(g.n, dtype=np.float64)
    vert_w = np.zeros(g.n, dtype=np.float64)
    for v, iv in enumerate(t.vertex_intervals):
        vert_a[v] = iv.w_start % 1.0
        vert_w[v] = iv.width
    dart_rs = np.zeros(2 * g.m, dtype=np.float64)
    dart_rw = np.zeros(2 * g.m, dtype=np.float64)
    for e, r in enumerate(t.rectangles):
        dart_rs[2 * e] = dart_rs[2 * e + 1] = r.w_start % 1.0
        dart_rw[2 * e] = dart_rw[2 * e + 1] = r.width
    return vert_a, vert_w, dart_rs, dart_rw


def _tiling_endpoints(t) -> list:
    pts = []
    for r in t.rectangles:
        pts.append(r.w_start % 1.0)
        pts.append((r.w_start + r.width) % 1.0)
    for iv in t.vertex_intervals:
        pts.append(iv.w_start % 1.0)
        pts.append((iv.w_start + iv.width) % 1.0)
    return pts


def meridian_flux(t, meridians, cfg: WalkConfig,
                  endpoint_tol: float = 1e-12) -> MeridianStats:
    """Signed crossings of vertical lines {w = mu} by the walk under
    horizontal position sampling; every net count estimates zero."""
    g = t.graph
    for iv in t.vertex_intervals:
        if iv.fragmented:
            raise TilingError(
                f"vertex {iv.vertex_id!r} has a fragmented interval; "
                "meridian crossings are not defined")
    pts = _tiling_endpoints(t)
    mer = np.asarray([m % 1.0 for m in meridians], dtype=np.float64)
    for mu in mer:
        worst = min(circular_distance(float(mu), p) for p in pts)
        if worst <= endpoint_tol:
            raise MeridianEndpointError(
                f"meridian {float(mu)} touches a tiling endpoint; "
                "perturb meridian")
    vert_a, vert_w, dart_rs, dart_rw = _tiling_span_arrays(t)
    absorb = _absorb_mask(g, None, "sinks")
    root = _check_walkable(g, absorb)
    kern = get_backend()
    vnet, vev, tot_sum, tot_sq, completed, censored = kern.meridian_walk(
        walk_tables(g), absorb, vert_a, vert_w, dart_rs, dart_rw, mer, root,
        cfg.seed, cfg.trials, cfg.trial_offset, cfg.step_cap)
    reports = []
    for k in range(len(mer)):
        tm, ts = _mean_sigma(int(tot_sum[k]), int(tot_sq[k]), completed)
        ratio = 0.0
        for v in range(g.n):
            net, ev = int(vnet[k, v]), int(vev[k, v])
            if ev == 0:
                if net:
                    ratio = math.inf
                continue
            ratio = max(ratio, abs(net) / math.sqrt(ev))
        reports.append(MeridianReport(
            meridian=float(mer[k]), total_mean=tm, total_sigma=ts,
            vertex_net=_counts_dict(g, vnet[k]),
            vertex_events=_counts_dict(g, vev[k]),
            max_vertex_ratio=ratio))
    return MeridianStats(reports=reports, completed=completed,
                         censored=censored, seed=cfg.seed,
                         step_cap=cfg.step_cap,
                         ranges=((cfg.trial_offset, cfg.trials),))


# --------------------------------------------------------- trajectory limits

@dataclass
class ArcMass:
    start: float
    end: float
    mass: float
    expected: float

    @property
    def error(self) -> float:
        return abs(self.mass - self.expected)


@dataclass
class CheckpointRow:
    step: int
    mean_h: float
    max_h: float
    alive: int


@dataclass
class TrajectoryReport:
    finals: dict
    boundary_samples: dict
    mean_final_diameter: float
    arc_masses: list
    alternation_hist: list
    checkpoints: list
    completed: int
    censored: int
    seed: int
    step_cap: int
    ranges: tuple


def _pair_classes(t, pairs) -> np.ndarray:
    g = t.graph
    cls = np.zeros((len(pairs), g.n), dtype=np.int8)
    for p, (a, b) in enumerate(pairs):
        left = ArcSet.from_pairs([(a % 1.0, b % 1.0)])
        right = left.complement()
        for v, iv in enumerate(t.vertex_intervals):
            if left.contains_arc(iv.w_start % 1.0, iv.width):
                cls[p, v] = 1
            elif right.contains_arc(iv.w_start % 1.0, iv.width):
                cls[p, v] = 2
    return cls


def default_checkpoints(cap: int) -> list:
    steps, k = [], 1
    while k <= cap:
        steps.append(k)
        k *= 2
    return steps


def trajectory_limit(t, cfg: WalkConfig, arcs=(), meridian_pairs=(),
                     checkpoints=None) -> TrajectoryReport:
    """Where walks end up on the boundary circle: per-sink interval
    midpoints, empirical arc masses vs arc length, final interval
    diameters, strip alternation counts, and height checkpoints."""
    g = t.graph
    profile = t.profile
    hfix = np.asarray(
        [int(round(float(h) * H_SCALE)) for h in profile.h], dtype=np.int64)
    pair_cls = _pair_classes(t, list(meridian_pairs))
    if checkpoints is None:
        checkpoints = default_checkpoints(cfg.step_cap)
    chk = np.asarray(sorted(checkpoints), dtype=np.int64)
    if len(chk) and chk[-1] > cfg.step_cap:
        raise ValueError("checkpoints beyond the step cap are never reached")
    absorb = _absorb_mask(g, None, "sinks")
    root = _check_walkable(g, absorb)
    kern = get_backend()
    finals, alt_hist, chk_sum, chk_max, chk_alive, completed, censored = \
        kern.limit_walk(walk_tables(g), absorb, hfix, pair_cls, chk, root,
                        cfg.seed, cfg.trials, cfg.trial_offset, cfg.step_cap)
    counts = _counts_dict(g, finals)
    samples, diam_sum = {}, 0.0
    for vid, c in counts.items():
        iv = t.interval(vid)
        samples[vid] = (iv.w_start + 0.5 * iv.width) % 1.0
        diam_sum += c * iv.width
    mean_diam = diam_sum / completed if completed else 0.0
    masses = []
    for a, b in arcs:
        arc = ArcSet.from_pairs([(a % 1.0, b % 1.0)])
        mass = sum(c for vid, c in counts.items()
                   if arc.contains(samples[vid]))
        masses.append(ArcMass(start=a % 1.0, end=b % 1.0,
                              mass=mass / completed if completed else 0.0,
                              expected=float(arc.length())))
    rows = [CheckpointRow(step=int(chk[i]),
                          mean_h=chk_sum[i] / (cfg.trials * H_SCALE),
                          max_h=chk_max[i] / H_SCALE,
                          alive=int(chk_alive[i]))
            for i in range(len(chk))]
    return TrajectoryReport(
        finals=counts, boundary_samples=samples,
        mean_final_diameter=mean_diam, arc_masses=masses,
        alternation_hist=[[int(x) for x in row] for row in alt_hist],
        checkpoints=rows, completed=completed, censored=censored,
        seed=cfg.seed, step_cap=cfg.step_cap,
        ranges=((cfg.trial_offset, cfg.trials),))


# ------------------------------------------------- observable tail tracking

@dataclass
class TailStats:
    finals: dict
    limit_one: dict
    limit_zero: dict
    ever_below: int
    alternation_hist: list
    completed: int
    censored: int
    seed: int
    step_cap: int
    ranges: tuple

    @property
    def middle(self) -> int:
        ones = sum(self.limit_one.values())
        zeros = sum(self.limit_zero.values())
        return self.completed - ones - zeros


def observable_tail_stats(g: PlanarGraph, values, cfg: WalkConfig, *,
                          thr_hi: float = 0.95, thr_lo: float = 0.05,
                          k_run: int = 20, band_hi: float = 0.9,
                          band_lo: float = 0.1, delta: float = 0.5,
                          start=None, absorbing=None) -> TailStats:
    """Tail behaviour of a [0, 1] vertex observable along the killed
    walk: limit-1 / limit-0 classification by terminal runs, visits
    below `delta`, and band alternation counts."""
    s = np.asarray([float(v) for v in values], dtype=np.float64)
    if len(s) != g.n:
        raise ValueError("need one observable value per vertex")
    absorb = _absorb_mask(
        g, _as_mask(g, absorbing) if absorbing is not None else None,
        "sinks")
    root = _check_walkable(g, absorb)
    if start is not None:
        root = g.vindex[start] if isinstance(start, str) else int(start)
    kern = get_backend()
    finals, cnt1, cnt0, ever, alt_hist, completed, censored = \
        kern.svalue_walk(walk_tables(g), absorb, s, thr_hi, thr_lo, k_run,
                         band_hi, band_lo, delta, root, cfg.seed, cfg.trials,
                         cfg.trial_offset, cfg.step_cap)
    return TailStats(finals=_counts_dict(g, finals),
                     limit_one=_counts_dict(g, cnt1),
                     limit_zero=_counts_dict(g, cnt0),
                     ever_below=int(ever),
                     alternation_hist=[int(x) for x in alt_hist],
                     completed=completed, censored=censored, seed=cfg.seed,
                     step_cap=cfg.step_cap,
                     ranges=((cfg.trial_offset, cfg.trials),))


# ------------------------------------------------------------------- export

def stats_to_json(stats, cfg: WalkConfig | None = None) -> dict:
    doc = {"schema": STATS_SCHEMA}
    if cfg is not None:
        doc["config"] = cfg.echo()
    if isinstance(stats, ExitStats):
        doc["kind"] = stats.kind
        doc["counts"] = dict(sorted(stats.counts.items()))
        if stats.companion is not None:
            doc["companion_counts"] = dict(sorted(stats.companion.items()))
        doc["completed"] = stats.completed
        doc["censored"] = stats.censored
        doc["seed"] = stats.seed
        doc["ranges"] = [list(r) for r in stats.ranges]
        if stats.tv_vs_reference is not None:
            doc["tv_vs_reference"] = stats.tv_vs_reference
        return doc
    if isinstance(stats, FluxStats):
        doc["kind"] = "dart-flux"
        doc["darts"] = [{"dart": d.dart, "excursion_mean": d.excursion_mean,
                         "excursion_sigma": d.excursion_sigma,
                         "total_mean": d.total_mean,
                         "total_sigma": d.total_sigma,
                         "expected": d.expected} for d in stats.darts]
    elif isinstance(stats, MeridianStats):
        doc["kind"] = "meridian-flux"
        doc["meridians"] = [{"meridian": r.meridian,
                             "total_mean": r.total_mean,
                             "total_sigma": r.total_sigma,
                             "max_vertex_ratio": r.max_vertex_ratio,
                             "vertex_net": dict(sorted(r.vertex_net.items()))}
                            for r in stats.reports]
    elif isinstance(stats, TrajectoryReport):
        doc["kind"] = "trajectory-limit"
        doc["finals"] = dict(sorted(stats.finals.items()))
        doc["boundary_samples"] = dict(sorted(stats.boundary_samples.items()))
        doc["mean_final_diameter"] = stats.mean_final_diameter
        doc["arc_masses"] = [{"start": a.start, "end": a.end, "mass": a.mass,
                              "expected": a.expected} for a in stats.arc_masses]
        doc["alternation_hist"] = stats.alternation_hist
        doc["checkpoints"] = [{"step": r.step, "mean_h": r.mean_h,
                               "max_h": r.max_h, "alive": r.alive}
                              for r in stats.checkpoints]
    elif isinstance(stats, TailStats):
        doc["kind"] = "observable-tail"
        doc["finals"] = dict(sorted(stats.finals.items()))
        doc["limit_one"] = dict(sorted(stats.limit_one.items()))
        doc["limit_zero"] = dict(sorted(stats.limit_zero.items()))
        doc["ever_below"] = stats.ever_below
        doc["alternation_hist"] = stats.alternation_hist
    else:
        raise TypeError(f"cannot export {type(stats).__name__}")
    doc["completed"] = stats.completed
    doc["censored"] = stats.censored
    doc["seed"] = stats.seed
    doc["ranges"] = [list(r) for r in stats.ranges]
    return doc


def stats_to_csv(stats: ExitStats) -> str:
    lines = ["vertex,count,frequency"]
    freq = stats.frequencies()
    for k in sorted(stats.counts):
        lines.append(f"{k},{stats.counts[k]},{freq.get(k, 0.0):.9f}")
    return "\n".join(lines) + "\n"
