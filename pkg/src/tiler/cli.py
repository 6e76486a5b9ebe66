"""Command-line pipeline: build, solve, tile, simulate, audit, render.

Every artifact embeds its schema, the full command line that produced it,
the seed, and the tool version; `reproduce` re-runs that command from the
embedded echo and byte-compares the result.  Exit codes: 0 success,
1 input or solver error, 2 requested audit failed (or reproduction
mismatch).
"""
from __future__ import annotations

import argparse
import json
import re
import sys
from collections import deque
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import __version__
from .boundary import (Checklist, ChecklistItem, audit_to_json,
                       boundary_event_match, drift_item, harmonic_from_arcs,
                       layeredness_item, level_set_drift, sharp_to_json,
                       trajectory_item, verify_zero_one)
from .errors import ArcEndpointError, GraphFormatError, MeridianEndpointError
from .families import make_family
from .graph import build_graph, cut_at_level
from .harmonic import killed_profile
from .render import render_svg
from .tiling import audit_tiling, build_tiling, tile_killed, tiling_to_json
from .walks import (WalkConfig, exit_distribution, interior_subwalk_flux,
                    last_visit_distribution, meridian_flux, stats_to_csv,
                    stats_to_json, trajectory_limit)

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_AUDIT = 2

_SCHEMA_BASES = {"tiler-graph", "tiler-profile", "tiler-tiling",
                 "tiler-stats", "tiler-sharp", "tiler-audit",
                 "tiler-svg", "tiler-csv"}
_SVG_ECHO = re.compile(r"<\?tiler-run (\{.*\})\?>")
_CSV_ECHO = re.compile(r"^# tiler:run (\{.*\})$", re.MULTILINE)


class _Parser(argparse.ArgumentParser):
    """argparse exits 2 on bad usage; 2 is reserved for audit failures."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_ERROR, f"{self.prog}: error: {message}\n")


def _positive(text: str) -> float:
    val = float(text)
    if not val > 0:
        raise argparse.ArgumentTypeError(f"{text!r} is not positive")
    return val


def _parse_arcs(text: str) -> list:
    pairs = []
    for chunk in text.split(","):
        a, sep, b = chunk.partition(":")
        if not sep:
            raise GraphFormatError(
                f"bad arc {chunk!r}; expected start:end, e.g. 0:0.5")
        pairs.append((float(a), float(b)))
    return pairs


def _parse_depths(text: str) -> list:
    return [int(x) for x in text.split(",")]


# ------------------------------------------------------------------ sources

def _add_source(p) -> None:
    grp = p.add_mutually_exclusive_group(required=True)
    grp.add_argument("--input", type=Path,
                     help="graph description (tiler-graph/1 JSON)")
    grp.add_argument("--family", help="built-in family name")
    p.add_argument("--depth", type=int, help="tree depth / truncation")
    p.add_argument("--branching", type=int, help="children per tree vertex")
    p.add_argument("--perturb-seed", type=int, dest="perturb_seed",
                   help="conductance perturbation seed for tree families")
    p.add_argument("--conductance", type=float, help="uniform edge weight")
    p.add_argument("--p", type=int, help="face degree for --family hyperbolic")
    p.add_argument("--q", type=int, help="vertex degree for --family hyperbolic")
    p.add_argument("--layers", type=int, help="rings for --family hyperbolic")
    p.add_argument("--radius", type=int, help="radius for --family z2-half-disc")
    p.add_argument("--inner", type=int, help="inner vertices for --family path")


def _add_solver(p, audit_tol: float | None = None) -> None:
    if audit_tol is not None:
        p.add_argument("--tolerance", type=_positive, default=audit_tol,
                       help="geometric audit tolerance")
    p.add_argument("--solver-tol", type=_positive, default=1e-10,
                   dest="solver_tol", help="linear solver tolerance")
    p.add_argument("--path-tol", type=_positive, default=1e-9,
                   dest="path_tol", help="dual-width path-independence tolerance")
    p.add_argument("--method", default="direct",
                   help="Dirichlet solver: direct, cg, or exact")


def _add_walk(p, trials: int) -> None:
    p.add_argument("--seed", type=int, default=1, help="top-level RNG seed")
    p.add_argument("--trials", type=int, default=trials, help="walk count")
    p.add_argument("--step-cap", type=int, default=1_000_000, dest="step_cap",
                   help="per-walk step budget before censoring")


def _add_out(p) -> None:
    p.add_argument("--out", type=Path, help="output path (default: stdout)")


def _build_parser() -> _Parser:
    top = _Parser(prog="tiler", description=__doc__)
    top.add_argument("--version", action="version",
                     version=f"tiler {__version__}")
    sub = top.add_subparsers(dest="command", required=True,
                             parser_class=_Parser)

    p = sub.add_parser("tile", help="solve the network and emit the tiling")
    _add_source(p)
    _add_solver(p, audit_tol=1e-7)
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--render", type=Path, help="also write an SVG here")
    _add_out(p)

    p = sub.add_parser("verify", help="run audits and emit a report")
    _add_source(p)
    _add_solver(p, audit_tol=1e-7)
    for flag in ("all", "tiling", "walks", "flux", "meridian", "boundary"):
        p.add_argument(f"--{flag}", action="store_true")
    _add_walk(p, trials=100_000)
    p.add_argument("--tv-cap", type=_positive, default=0.02, dest="tv_cap")
    p.add_argument("--cut", type=float,
                   help="height of the exit-measure cut (default: automatic)")
    p.add_argument("--max-atoms", type=int, default=64, dest="max_atoms",
                   help="largest admissible exit-measure cut")
    p.add_argument("--meridian-count", type=int, default=3,
                   dest="meridian_count")
    p.add_argument("--dart-count", type=int, default=10, dest="dart_count")
    _add_out(p)

    p = sub.add_parser("walk", help="run walk statistics")
    _add_source(p)
    _add_solver(p)
    p.add_argument("--kind", choices=("exit", "last-visit", "trajectory"),
                   default="exit")
    _add_walk(p, trials=10_000)
    p.add_argument("--cut", type=float,
                   help="watch the level set at this height instead of sinks")
    p.add_argument("--arcs", help="trajectory arcs, start:end[,start:end...]")
    p.add_argument("--format", choices=("json", "csv"), default="json")
    _add_out(p)

    p = sub.add_parser("boundary", help="build a zero-one harmonic function")
    _add_source(p)
    _add_solver(p)
    p.add_argument("--arcs", required=True,
                   help="target arcs, start:end[,start:end...]")
    p.add_argument("--levels", help="comma-separated cut depths, e.g. 4,6,8")
    p.add_argument("--gap-tol", type=_positive, default=1e-3, dest="gap_tol",
                   help="level-stabilisation tolerance")
    p.add_argument("--verify", action="store_true", dest="verify_walks",
                   help="Monte-Carlo check of the limit behaviour")
    _add_walk(p, trials=20_000)
    _add_out(p)

    p = sub.add_parser("render", help="emit an SVG of the tiling")
    _add_source(p)
    _add_solver(p)
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--size", type=_positive, default=1000.0)
    p.add_argument("--no-fill", action="store_true", dest="no_fill")
    p.add_argument("--no-intervals", action="store_true", dest="no_intervals")
    _add_out(p)

    p = sub.add_parser("reproduce",
                       help="re-run a report from its embedded config")
    p.add_argument("report", type=Path)

    return top


# ---------------------------------------------------------------- plumbing

def _build_source_graph(ns):
    if ns.input is not None:
        try:
            data = json.loads(Path(ns.input).read_text(encoding="utf-8"))
        except OSError as exc:
            raise GraphFormatError(f"cannot read {ns.input}: {exc}")
        except json.JSONDecodeError as exc:
            raise GraphFormatError(f"{ns.input} is not valid JSON: {exc}")
        try:
            return build_graph(data)
        except KeyError as exc:
            raise GraphFormatError(
                f"{ns.input}: missing field {exc.args[0]!r}")
    params = {}
    for key in ("depth", "branching", "p", "q", "layers", "radius", "inner",
                "conductance"):
        val = getattr(ns, key, None)
        if val is not None:
            params[key] = val
    if getattr(ns, "perturb_seed", None) is not None:
        if ns.family == "perturbed-tree":
            params["seed"] = ns.perturb_seed
        else:
            params["perturb_seed"] = ns.perturb_seed
    try:
        return make_family(ns.family, **params)
    except TypeError as exc:
        raise GraphFormatError(f"family {ns.family!r}: {exc}")


def _canonical(doc: dict) -> str:
    return json.dumps(doc, sort_keys=True, indent=2) + "\n"


def _run_echo(argv, seed: int) -> dict:
    return {"argv": list(argv), "seed": seed,
            "tool": {"name": "tiler", "version": __version__}}


def _emit_json(doc: dict, argv, seed: int) -> str:
    doc = dict(doc)
    doc["run"] = _run_echo(argv, seed)
    return _canonical(doc)


def _emit_svg(svg: str, argv, seed: int) -> str:
    echo = json.dumps({"schema": "tiler-svg/1", **_run_echo(argv, seed)},
                      sort_keys=True)
    head, sep, rest = svg.partition("\n")
    return f"{head}{sep}<?tiler-run {echo}?>\n{rest}"


def _emit_csv(text: str, argv, seed: int) -> str:
    echo = json.dumps({"schema": "tiler-csv/1", **_run_echo(argv, seed)},
                      sort_keys=True)
    return f"# tiler:run {echo}\n{text}"


@dataclass
class _Artifacts:
    primary: str
    primary_kind: str  # json | csv | svg
    side_svg: str | None
    status: int


def _walk_config(ns) -> WalkConfig:
    return WalkConfig(seed=ns.seed, trials=ns.trials, step_cap=ns.step_cap)


def _bfs_depths(g) -> dict:
    depth = {g.root: 0}
    queue = deque([g.root])
    while queue:
        v = queue.popleft()
        for d in g.out_darts(v):
            u = int(g.head[d])
            if u not in depth:
                depth[u] = depth[v] + 1
                queue.append(u)
    out: dict = {}
    for v, dv in depth.items():
        out.setdefault(dv, []).append(v)
    return out


def _auto_cut_height(g, prof, max_atoms: int) -> float | None:
    """Deepest level crossed by at most max_atoms edges.

    Vertices of equal nominal height carry solver noise in the last bits,
    so only gaps clearly wider than that noise count as usable bands."""
    h = np.asarray(prof.h, dtype=np.float64)
    hu, hv = h[g.tail[0::2]], h[g.head[0::2]]
    lo, hi = np.minimum(hu, hv), np.maximum(hu, hv)
    levels = np.unique(h)
    for a, b in zip(levels[:-1], levels[1:]):
        if b - a <= 1e-7:
            continue
        mid = float((a + b) / 2.0)
        if np.min(np.abs(h - mid)) <= 1e-9:
            continue
        crossings = int(np.count_nonzero((lo < mid) & (hi > mid)))
        if 0 < crossings <= max_atoms:
            return mid
    return None


def _upper_tiling(g, prof, height: float, ns):
    cut = cut_at_level(g, prof.h, height)
    t_up = tile_killed(cut.upper, method=ns.method, tol=ns.path_tol,
                       solver_tol=ns.solver_tol)
    return cut, t_up


# ---------------------------------------------------------------- commands

def _cmd_tile(ns, argv) -> _Artifacts:
    g = _build_source_graph(ns)
    t = tile_killed(g, method=ns.method, tol=ns.path_tol,
                    solver_tol=ns.solver_tol)
    audit = audit_tiling(t, tol=ns.tolerance)
    doc = tiling_to_json(t, audit)
    doc["config"] = {"method": ns.method, "solver_tol": ns.solver_tol,
                     "path_tol": ns.path_tol, "tolerance": ns.tolerance}
    side = None
    if ns.render is not None:
        side = _emit_svg(render_svg(t), argv, ns.seed)
    status = EXIT_OK if audit.passed else EXIT_AUDIT
    return _Artifacts(_emit_json(doc, argv, ns.seed), "json", side, status)


def _cmd_render(ns, argv) -> _Artifacts:
    g = _build_source_graph(ns)
    t = tile_killed(g, method=ns.method, tol=ns.path_tol,
                    solver_tol=ns.solver_tol)
    svg = render_svg(t, size=ns.size, fill=not ns.no_fill,
                     intervals=not ns.no_intervals)
    return _Artifacts(_emit_svg(svg, argv, ns.seed), "svg", None, EXIT_OK)


def _cmd_walk(ns, argv) -> _Artifacts:
    g = _build_source_graph(ns)
    cfg = _walk_config(ns)
    if ns.kind == "trajectory":
        t = tile_killed(g, method=ns.method, tol=ns.path_tol,
                        solver_tol=ns.solver_tol)
        arcs = _parse_arcs(ns.arcs) if ns.arcs else ()
        stats = trajectory_limit(t, cfg, arcs=arcs)
    elif ns.cut is not None:
        prof = killed_profile(g, method=ns.method, tol=ns.solver_tol)
        cut, t_up = _upper_tiling(g, prof, ns.cut, ns)
        ref = {vid: t_up.interval(vid).width for vid in cut.boundary_ids}
        if ns.kind == "exit":
            stats = exit_distribution(cut.upper, cut.boundary_ids, cfg,
                                      reference=ref)
        else:
            sinks = [cut.graph.vertex_ids[s] for s in cut.graph.sinks]
            stats = last_visit_distribution(cut.graph, cut.boundary_ids,
                                            sinks, cfg, reference=ref)
    else:
        t = tile_killed(g, method=ns.method, tol=ns.path_tol,
                        solver_tol=ns.solver_tol)
        sinks = [g.vertex_ids[s] for s in g.sinks]
        ref = {vid: t.interval(vid).width for vid in sinks}
        if ns.kind == "exit":
            stats = exit_distribution(g, sinks, cfg, reference=ref)
        else:
            stats = last_visit_distribution(g, sinks, sinks, cfg,
                                            reference=ref)
    if ns.format == "csv":
        if ns.kind == "trajectory":
            raise GraphFormatError("trajectory statistics have no CSV form")
        return _Artifacts(_emit_csv(stats_to_csv(stats), argv, ns.seed),
                          "csv", None, EXIT_OK)
    doc = stats_to_json(stats, cfg)
    return _Artifacts(_emit_json(doc, argv, ns.seed), "json", None, EXIT_OK)


def _cmd_boundary(ns, argv) -> _Artifacts:
    g = _build_source_graph(ns)
    t = tile_killed(g, method=ns.method, tol=ns.path_tol,
                    solver_tol=ns.solver_tol)
    levels = None
    if ns.levels:
        depths = _bfs_depths(g)
        levels = []
        for d in _parse_depths(ns.levels):
            if d not in depths:
                raise GraphFormatError(f"no vertices at depth {d}")
            levels.append([g.vertex_ids[v] for v in depths[d]])
    s = harmonic_from_arcs(t, _parse_arcs(ns.arcs), levels=levels,
                           tol=ns.gap_tol, method=ns.method,
                           solver_tol=ns.solver_tol)
    doc = sharp_to_json(s)
    if len(s.levels) >= 2:
        doc["drift"] = [{"level_m": len(r.level_m), "level_n": len(r.level_n),
                         "symdiff_width": r.symdiff_width,
                         "impurity_mass": r.impurity_mass}
                        for r in level_set_drift(s)]
    status = EXIT_OK
    if ns.verify_walks:
        cfg = _walk_config(ns)
        rep = verify_zero_one(s, cfg)
        doc["verify"] = {
            "probes": [{"probe": p.probe, "value": p.value,
                        "limit_one": p.limit_one, "limit_zero": p.limit_zero,
                        "middle": p.middle, "ok": p.value_ok}
                       for p in rep.probes],
            "escape_frac": rep.escape_frac,
            "escape_bound": rep.escape_bound,
            "config": cfg.echo(),
            "ok": rep.all_ok(),
        }
        status = EXIT_OK if rep.all_ok() else EXIT_AUDIT
    return _Artifacts(_emit_json(doc, argv, ns.seed), "json", None, status)


def _verify_flux_item(g, prof, cfg, depths, rng, max_atoms, count):
    if g.m != g.n - 1:
        return ChecklistItem(
            name="interior-flux", passed=None, value=None, tolerance=4.0,
            detail="dart sampling is implemented for trees; use the API")
    cand = [d for d, vs in depths.items()
            if 0 < d and len(vs) <= max_atoms and d + 1 in depths]
    if not cand:
        return ChecklistItem(
            name="interior-flux", passed=None, value=None, tolerance=4.0,
            detail="no interior level small enough to watch")
    dl = max(cand)
    below = set(depths[dl + 1])
    darts = [d for v in depths[dl] for d in g.out_darts(v)
             if int(g.head[d]) in below]
    pick = rng.choice(len(darts), size=min(count, len(darts)), replace=False)
    watch = [g.dart_id(darts[i]) for i in sorted(pick.tolist())]
    level = [g.vertex_ids[v] for v in depths[dl]]
    sinks = [g.vertex_ids[s] for s in g.sinks]
    stats = interior_subwalk_flux(g, level, sinks, watch, cfg, profile=prof)
    worst = 0.0
    for d in stats.darts:
        worst = max(worst, abs(d.excursion_mean) / max(d.excursion_sigma,
                                                       1e-15))
        if d.expected is not None:
            worst = max(worst, abs(d.total_mean - d.expected)
                        / max(d.total_sigma, 1e-15))
    return ChecklistItem(
        name="interior-flux", passed=stats.all_ok(4.0), value=worst,
        tolerance=4.0,
        detail=f"{len(watch)} darts at depth {dl}, worst deviation "
               f"{worst:.2f} sigma")


def _verify_meridian_item(t, cfg, rng, count):
    stats = None
    for _ in range(50):
        mer = sorted(float(x) for x in rng.uniform(0.0, 1.0, size=count))
        try:
            stats = meridian_flux(t, mer, cfg)
            break
        except MeridianEndpointError:
            continue
    if stats is None:
        return ChecklistItem(
            name="meridian-crossings", passed=None, value=None, tolerance=4.0,
            detail="could not sample meridians clear of interval endpoints")
    worst = max((abs(r.total_mean) / max(r.total_sigma, 1e-15)
                 for r in stats.reports), default=0.0)
    ratio = max((r.max_vertex_ratio for r in stats.reports), default=0.0)
    return ChecklistItem(
        name="meridian-crossings", passed=stats.all_ok(4.0),
        value=worst, tolerance=4.0,
        detail=f"{count} meridians, worst total {worst:.2f} sigma, "
               f"worst vertex ratio {ratio:.2f}")


def _verify_boundary_items(g, t, cfg, depths):
    sink_depths = [d for d, vs in depths.items()
                   if any(v in set(g.sinks) for v in vs)]
    horizon = min(sink_depths) if sink_depths else max(depths)
    cand = sorted({max(1, horizon // 2), max(1, (3 * horizon) // 4), horizon})
    levels = [[g.vertex_ids[v] for v in depths[d]]
              for d in cand if d in depths]
    s = None
    for k in range(16):
        shift = k / 64.0
        try:
            s = harmonic_from_arcs(t, [(shift, (0.5 + shift) % 1.0)],
                                   levels=levels)
            break
        except ArcEndpointError:
            continue
    if s is None:
        return [ChecklistItem(
            name="zero-one-probes", passed=None, value=None, tolerance=None,
            detail="no test arc clears the interval endpoints")]
    items = [drift_item(s, name="level-set-drift")]
    rep = verify_zero_one(s, cfg)
    items.append(ChecklistItem(
        name="zero-one-probes", passed=rep.all_ok(), value=rep.escape_frac,
        tolerance=rep.escape_bound,
        detail=f"{len(rep.probes)} probes, escape fraction "
               f"{rep.escape_frac:.4f} (bound {rep.escape_bound:.2f})"))
    fr = boundary_event_match(s, cfg)
    items.append(ChecklistItem(
        name="faithfulness", passed=fr.ok(), value=fr.estimate, tolerance=0.02,
        detail=f"limit/event mismatch estimate {fr.estimate:.4f}"))
    return items


def _cmd_verify(ns, argv) -> _Artifacts:
    groups = {k for k in ("tiling", "walks", "flux", "meridian", "boundary")
              if getattr(ns, k)}
    if ns.all or not groups:
        groups = {"tiling", "walks", "flux", "meridian", "boundary"}
    g = _build_source_graph(ns)
    cfg = _walk_config(ns)
    rng = np.random.default_rng(ns.seed)
    prof = killed_profile(g, method=ns.method, tol=ns.solver_tol)
    t = build_tiling(prof, tol=ns.path_tol)
    depths = _bfs_depths(g)
    items = []
    if "tiling" in groups:
        audit = audit_tiling(t, tol=ns.tolerance)
        fails = audit.failures()
        items.append(ChecklistItem(
            name="tiling-identities", passed=audit.passed,
            value=audit.total_area, tolerance=ns.tolerance,
            detail=f"area {audit.total_area:.9f}; "
                   f"failures: {', '.join(fails) if fails else 'none'}"))
    if "walks" in groups:
        items.append(trajectory_item(t, cfg))
        if len(g.sinks) <= ns.max_atoms and ns.cut is None:
            items.append(layeredness_item(t, cfg, tv_cap=ns.tv_cap))
        else:
            height = ns.cut if ns.cut is not None else \
                _auto_cut_height(g, prof, ns.max_atoms)
            if height is None:
                items.append(ChecklistItem(
                    name="layeredness", passed=None, value=None,
                    tolerance=ns.tv_cap,
                    detail="no level coarse enough; supply --cut"))
            else:
                _, t_up = _upper_tiling(g, prof, height, ns)
                item = layeredness_item(t_up, cfg, tv_cap=ns.tv_cap)
                item.detail += f" (cut at height {height:.6g})"
                items.append(item)
    if "flux" in groups:
        items.append(_verify_flux_item(g, prof, cfg, depths, rng,
                                       ns.max_atoms, ns.dart_count))
    if "meridian" in groups:
        items.append(_verify_meridian_item(t, cfg, rng, ns.meridian_count))
    if "boundary" in groups:
        items.extend(_verify_boundary_items(g, t, cfg, depths))
    check = Checklist(items=items, seed=ns.seed)
    doc = audit_to_json(check, cfg)
    status = EXIT_OK if check.all_passed else EXIT_AUDIT
    return _Artifacts(_emit_json(doc, argv, ns.seed), "json", None, status)


_COMMANDS = {"tile": _cmd_tile, "verify": _cmd_verify, "walk": _cmd_walk,
             "boundary": _cmd_boundary, "render": _cmd_render}


# --------------------------------------------------------------- reproduce

def _extract_echo(raw: str) -> dict:
    if raw.startswith("{"):
        doc = json.loads(raw)
        echo = doc.get("run")
        if not isinstance(echo, dict) or "argv" not in echo:
            raise GraphFormatError("report carries no config echo")
        echo = dict(echo)
        echo.setdefault("schema", doc.get("schema"))
        echo["kind"] = "json"
        return echo
    match = _SVG_ECHO.search(raw) if raw.startswith("<") \
        else _CSV_ECHO.search(raw)
    if match is None:
        raise GraphFormatError("report carries no config echo")
    echo = json.loads(match.group(1))
    echo["kind"] = "svg" if raw.startswith("<") else "csv"
    return echo


def _check_schema(schema) -> None:
    if not isinstance(schema, str) or "/" not in schema:
        raise GraphFormatError(f"report has no usable schema tag: {schema!r}")
    base, _, version = schema.rpartition("/")
    if base not in _SCHEMA_BASES or version != "1":
        raise GraphFormatError(
            f"unsupported schema version {schema!r}; this tool reads /1")


def _cmd_reproduce(ns) -> int:
    try:
        raw = ns.report.read_text(encoding="utf-8")
    except OSError as exc:
        print(f"tiler: error: cannot read {ns.report}: {exc}",
              file=sys.stderr)
        return EXIT_ERROR
    try:
        echo = _extract_echo(raw)
        _check_schema(echo.get("schema"))
        run_argv = list(echo["argv"])
        if not run_argv or run_argv[0] not in _COMMANDS:
            raise GraphFormatError(
                f"embedded command {run_argv[:1]!r} is not reproducible")
        ns2 = _build_parser().parse_args(run_argv)
        arts = _COMMANDS[ns2.command](ns2, run_argv)
    except (ValueError, RuntimeError, KeyError) as exc:
        print(f"tiler: error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    candidates = {arts.primary_kind: arts.primary}
    if arts.side_svg is not None:
        candidates.setdefault("svg", arts.side_svg)
    fresh = candidates.get(echo["kind"])
    if fresh is None:
        print("tiler: error: embedded command does not produce "
              f"a {echo['kind']} artifact", file=sys.stderr)
        return EXIT_ERROR
    if fresh == raw:
        print(f"reproduced {ns.report}: byte-identical")
        return EXIT_OK
    old_lines, new_lines = raw.splitlines(), fresh.splitlines()
    for i in range(max(len(old_lines), len(new_lines))):
        a = old_lines[i] if i < len(old_lines) else "<missing>"
        b = new_lines[i] if i < len(new_lines) else "<missing>"
        if a != b:
            print(f"mismatch at line {i + 1}:\n  report: {a}\n  rerun:  {b}",
                  file=sys.stderr)
            break
    return EXIT_AUDIT


# -------------------------------------------------------------------- main

def _write(path: Path | None, text: str) -> None:
    if path is None:
        sys.stdout.write(text)
    else:
        path.write_text(text, encoding="utf-8")


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        ns = _build_parser().parse_args(argv)
    except SystemExit as exc:  # argparse --help/--version and usage errors
        return int(exc.code or 0)
    if ns.command == "reproduce":
        return _cmd_reproduce(ns)
    try:
        arts = _COMMANDS[ns.command](ns, argv)
    except (ValueError, RuntimeError, KeyError, OSError) as exc:
        print(f"tiler: error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    _write(ns.out, arts.primary)
    if arts.side_svg is not None:
        _write(ns.render, arts.side_svg)
    return arts.status


if __name__ == "__main__":
    sys.exit(main())
