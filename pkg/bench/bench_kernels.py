#!/usr/bin/env python3
"""Timing comparison of the walk kernels on both backends.

Run from the repository root:

    python3 bench/bench_kernels.py --depth 10 --trials 200000

Each kernel runs the same seeded workload under the numba and the numpy
backend; integer accumulators make the outputs bit-identical, so the
script doubles as a parity check.  A warmup pass keeps numba's one-time
compilation out of the timings.
"""
from __future__ import annotations

import argparse
import time

from tiler import families, tile_killed
from tiler.kernels import use_backend
from tiler.walks import (WalkConfig, exit_distribution,
                         interior_subwalk_flux, meridian_flux,
                         observable_tail_stats, trajectory_limit)


def _tree_level(g, depth: int) -> list:
    return [v for v in g.vertex_ids if v != "o" and len(v) == depth]


def _workloads(depth: int, cfg: WalkConfig, warm: WalkConfig) -> dict:
    g = families.bary_tree(depth)
    t = tile_killed(g)
    sinks = [g.vertex_ids[s] for s in g.sinks]
    mid = max(1, depth // 2)
    level = _tree_level(g, mid)
    # parent edges into the generation below the watched level
    darts = []
    below = set(_tree_level(g, mid + 1))
    for e, eid in enumerate(g.edge_ids):
        head = g.vertex_ids[g.head[2 * e]]
        if head in below and len(darts) < 10:
            darts.append(g.dart_id(2 * e))
    meridians = [0.1234567, 0.4143211, 0.7890123]
    h = t.profile.h

    def run(c: WalkConfig) -> dict:
        return {
            "first-hit": lambda: exit_distribution(g, sinks, c),
            "dart-flux": lambda: interior_subwalk_flux(
                g, level, sinks, darts, c, profile=t.profile),
            "meridian": lambda: meridian_flux(t, meridians, c),
            "trajectory": lambda: trajectory_limit(t, c, arcs=[(0.03, 0.47)]),
            "tail": lambda: observable_tail_stats(g, h, c),
        }

    return {"timed": run(cfg), "warm": run(warm)}


def _digest(result) -> tuple:
    """Order-stable integer summary of a kernel result for parity checks."""
    if hasattr(result, "counts"):
        return tuple(sorted(result.counts.items()))
    if hasattr(result, "darts"):
        return tuple((d.dart, d.excursion_mean, d.total_mean)
                     for d in result.darts)
    if hasattr(result, "reports"):
        return tuple((r.meridian, r.total_mean,
                      tuple(sorted(r.vertex_net.items())))
                     for r in result.reports)
    if hasattr(result, "finals") and hasattr(result, "checkpoints"):
        return (tuple(sorted(result.finals.items())),
                tuple((c.step, c.mean_h, c.alive) for c in result.checkpoints))
    return (tuple(sorted(result.finals.items())),
            tuple(sorted(result.limit_one.items())),
            tuple(result.alternation_hist))


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--depth", type=int, default=10)
    ap.add_argument("--trials", type=int, default=200_000)
    ap.add_argument("--seed", type=int, default=1)
    ap.add_argument("--repeat", type=int, default=3)
    ns = ap.parse_args()

    cfg = WalkConfig(seed=ns.seed, trials=ns.trials)
    warm = WalkConfig(seed=ns.seed, trials=256)
    loads = _workloads(ns.depth, cfg, warm)

    times: dict = {}
    digests: dict = {}
    for backend in ("numba", "numpy"):
        try:
            use_backend(backend)
        except Exception as exc:  # numba missing: report and skip
            print(f"{backend}: unavailable ({exc})")
            continue
        for name, fn in loads["warm"].items():
            fn()
        for name, fn in loads["timed"].items():
            best = float("inf")
            for _ in range(ns.repeat):
                t0 = time.perf_counter()
                out = fn()
                best = min(best, time.perf_counter() - t0)
            times[(backend, name)] = best
            digests[(backend, name)] = _digest(out)
    use_backend(None)

    names = ["first-hit", "dart-flux", "meridian", "trajectory", "tail"]
    print(f"\nbinary tree depth {ns.depth}, {ns.trials} trials, "
          f"best of {ns.repeat}")
    print(f"{'kernel':12s} {'numba':>10s} {'numpy':>10s} {'speedup':>9s} "
          f"{'identical':>10s}")
    for name in names:
        tb = times.get(("numba", name))
        tn = times.get(("numpy", name))
        same = "-"
        if tb is not None and tn is not None:
            same = str(digests[("numba", name)] == digests[("numpy", name)])
        ratio = f"{tn / tb:8.1f}x" if tb and tn else "        -"
        fmt = lambda v: f"{v:9.3f}s" if v is not None else "        -"
        print(f"{name:12s} {fmt(tb)} {fmt(tn)} {ratio} {same:>10s}")


if __name__ == "__main__":
    main()
