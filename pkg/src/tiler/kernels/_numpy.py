"""Vectorized random-walk kernels (pure numpy backend).

Every kernel consumes the per-trial splitmix64 streams in exactly the
same per-step order as the numba backend, and every accumulator is an
integer, so results are bit-identical across backends and across any
chunked / merged execution order.
"""
from __future__ import annotations

import numpy as np

_G = np.uint64(0x9E3779B97F4A7C15)
_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)
_INV53 = float(2.0 ** -53)

# Trials per vectorized chunk.  Integer accumulators make the split
# invisible in the outputs.
CHUNK = 1 << 14

ALT_CAP = 32


def _mix_vec(z: np.ndarray) -> np.ndarray:
    with np.errstate(over="ignore"):
        z = (z ^ (z >> np.uint64(30))) * _M1
        z = (z ^ (z >> np.uint64(27))) * _M2
        return z ^ (z >> np.uint64(31))


def _trial_states(seed: int, lo: int, hi: int) -> np.ndarray:
    t = np.arange(lo, hi, dtype=np.uint64)
    with np.errstate(over="ignore"):
        base = _mix_vec(t * _G + _G)
    return _mix_vec(base ^ np.uint64(seed & 0xFFFFFFFFFFFFFFFF))


def _draw(st: np.ndarray) -> np.ndarray:
    """Advance the streams in place and return uniforms in [0, 1)."""
    with np.errstate(over="ignore"):
        st += _G
    return (_mix_vec(st) >> np.uint64(11)).astype(np.float64) * _INV53


def _pick(prep: dict, pos: np.ndarray, u: np.ndarray) -> np.ndarray:
    # First transition slot whose cumulative weight exceeds u.
    rows = prep["cum2d"][pos]
    k = (u[:, None] < rows).argmax(axis=1)
    return prep["dart2d"][pos, k]


def hit_walk(prep: dict, absorb: np.ndarray, watch: np.ndarray, root: int,
             seed: int, trials: int, offset: int, cap: int):
    """First/last visit counts on `watch` for walks absorbed by `absorb`."""
    n = prep["n"]
    head = prep["head"]
    first_counts = np.zeros(n, dtype=np.int64)
    last_counts = np.zeros(n, dtype=np.int64)
    censored = 0
    steps_total = 0
    for lo in range(offset, offset + trials, CHUNK):
        hi = min(lo + CHUNK, offset + trials)
        m = hi - lo
        st = _trial_states(seed, lo, hi)
        pos = np.full(m, root, dtype=np.int64)
        mark = root if watch[root] else -1
        first = np.full(m, mark, dtype=np.int64)
        last = np.full(m, mark, dtype=np.int64)

        def retire(f: np.ndarray, l: np.ndarray) -> None:
            np.add.at(first_counts, f[f >= 0], 1)
            np.add.at(last_counts, l[l >= 0], 1)

        if absorb[root]:
            retire(first, last)
            continue
        for _ in range(cap):
            if pos.size == 0:
                break
            u = _draw(st)
            y = head[_pick(prep, pos, u)]
            steps_total += pos.size
            w = watch[y]
            if w.any():
                yn = y[w]
                fw = first[w]
                fw[fw < 0] = yn[fw < 0]
                first[w] = fw
                last[w] = yn
            pos = y
            stop = absorb[y]
            if stop.any():
                retire(first[stop], last[stop])
                keep = ~stop
                pos, st, first, last = pos[keep], st[keep], first[keep], last[keep]
        censored += int(pos.size)
    completed = trials - censored
    return first_counts, last_counts, completed, censored, steps_total


def flux_walk(prep: dict, absorb: np.ndarray, level: np.ndarray,
              slot: np.ndarray, nslots: int, root: int,
              seed: int, trials: int, offset: int, cap: int):
    """Net traversals of watched darts: level-to-level excursions and totals.

    slot maps each dart to a watched-dart index (sign split: slot[d] for
    the watched orientation, slot[d ^ 1] marks the reverse).  Excursion
    sums only cover complete segments between consecutive visits to
    `level`; the leg that ends in absorption is excluded.
    """
    head = prep["head"]
    exc_sum = np.zeros(nslots, dtype=np.int64)
    exc_sq = np.zeros(nslots, dtype=np.int64)
    tot_sum = np.zeros(nslots, dtype=np.int64)
    tot_sq = np.zeros(nslots, dtype=np.int64)
    censored = 0
    for lo in range(offset, offset + trials, CHUNK):
        hi = min(lo + CHUNK, offset + trials)
        m = hi - lo
        st = _trial_states(seed, lo, hi)
        pos = np.full(m, root, dtype=np.int64)
        seg = np.zeros((m, nslots), dtype=np.int64)
        exc = np.zeros((m, nslots), dtype=np.int64)
        tot = np.zeros((m, nslots), dtype=np.int64)
        seen = np.full(m, bool(level[root]))
        if absorb[root]:
            continue
        for _ in range(cap):
            if pos.size == 0:
                break
            u = _draw(st)
            d = _pick(prep, pos, u)
            y = head[d]
            s_fwd = slot[d]
            s_rev = slot[d ^ 1]
            hit_f = s_fwd >= 0
            hit_r = s_rev >= 0
            if hit_f.any():
                rows = np.nonzero(hit_f)[0]
                seg[rows, s_fwd[rows]] += 1
                tot[rows, s_fwd[rows]] += 1
            if hit_r.any():
                rows = np.nonzero(hit_r)[0]
                seg[rows, s_rev[rows]] -= 1
                tot[rows, s_rev[rows]] -= 1
            pos = y
            at_level = level[y] & ~absorb[y]
            if at_level.any():
                # the leg from the root to the first level visit is
                # not an excursion; discard it
                fold = at_level & seen
                exc[fold] += seg[fold]
                seg[at_level] = 0
                seen |= at_level
            stop = absorb[y]
            if stop.any():
                fin_exc = exc[stop]
                fin_tot = tot[stop]
                exc_sum += fin_exc.sum(axis=0)
                exc_sq += (fin_exc * fin_exc).sum(axis=0)
                tot_sum += fin_tot.sum(axis=0)
                tot_sq += (fin_tot * fin_tot).sum(axis=0)
                keep = ~stop
                pos, st, seen = pos[keep], st[keep], seen[keep]
                seg, exc, tot = seg[keep], exc[keep], tot[keep]
        censored += int(pos.size)
    completed = trials - censored
    return exc_sum, exc_sq, tot_sum, tot_sq, completed, censored


def meridian_walk(prep: dict, absorb: np.ndarray,
                  vert_a: np.ndarray, vert_w: np.ndarray,
                  dart_rs: np.ndarray, dart_rw: np.ndarray,
                  mer: np.ndarray, root: int,
                  seed: int, trials: int, offset: int, cap: int):
    """Signed meridian crossings under horizontal position sampling.

    Per step: draw the dart, draw q uniform on the crossed rectangle's
    span, count the crossing inside T(x); if the endpoint is not
    absorbing draw the new position uniform on T(y) and count there too.
    """
    head = prep["head"]
    n = prep["n"]
    nm = len(mer)
    vnet = np.zeros((nm, n), dtype=np.int64)
    vev = np.zeros((nm, n), dtype=np.int64)
    tot_sum = np.zeros(nm, dtype=np.int64)
    tot_sq = np.zeros(nm, dtype=np.int64)
    censored = 0

    def count(at: np.ndarray, frm: np.ndarray, to: np.ndarray,
              net_rows: np.ndarray) -> None:
        # Crossing test linearized at each interval's start.
        a = vert_a[at]
        wdt = vert_w[at]
        s = (frm - a) % 1.0
        t = (to - a) % 1.0
        for k in range(nm):
            mu = (mer[k] - a) % 1.0
            inside = mu < wdt
            up = inside & (s < mu) & (mu < t)
            dn = inside & (t < mu) & (mu < s)
            if up.any():
                np.add.at(vnet[k], at[up], 1)
                np.add.at(vev[k], at[up], 1)
                net_rows[up, k] += 1
            if dn.any():
                np.add.at(vnet[k], at[dn], -1)
                np.add.at(vev[k], at[dn], 1)
                net_rows[dn, k] -= 1

    for lo in range(offset, offset + trials, CHUNK):
        hi = min(lo + CHUNK, offset + trials)
        m = hi - lo
        st = _trial_states(seed, lo, hi)
        pos = np.full(m, root, dtype=np.int64)
        p = (vert_a[pos] + _draw(st) * vert_w[pos]) % 1.0
        net = np.zeros((m, nm), dtype=np.int64)
        if absorb[root]:
            continue
        for _ in range(cap):
            if pos.size == 0:
                break
            u = _draw(st)
            d = _pick(prep, pos, u)
            y = head[d]
            q = (dart_rs[d] + _draw(st) * dart_rw[d]) % 1.0
            count(pos, p, q, net)
            stop = absorb[y]
            live = ~stop
            if live.any():
                ylive = y[live]
                p2 = (vert_a[ylive] + _draw(st[live]) * vert_w[ylive]) % 1.0
                sub = net[live]
                count(ylive, q[live], p2, sub)
                net[live] = sub
                # st[live] above operated on a copy; re-advance the real rows.
                with np.errstate(over="ignore"):
                    st[live] += _G
                p_new = p.copy()
                p_new[live] = p2
                p = p_new
            pos = y
            if stop.any():
                fin = net[stop]
                tot_sum += fin.sum(axis=0)
                tot_sq += (fin * fin).sum(axis=0)
                keep = live
                pos, st, p, net = pos[keep], st[keep], p[keep], net[keep]
        censored += int(pos.size)
    completed = trials - censored
    return vnet, vev, tot_sum, tot_sq, completed, censored


def limit_walk(prep: dict, absorb: np.ndarray, hfix: np.ndarray,
               pair_cls: np.ndarray, checkpoints: np.ndarray, root: int,
               seed: int, trials: int, offset: int, cap: int):
    """Absorption vertex, strip alternation counts, checkpoint heights.

    Absorbed walks sit at their absorption vertex for later checkpoints.
    Alternation histograms only include completed trials; checkpoint
    sums cover every trial.
    """
    head = prep["head"]
    n = prep["n"]
    npair = pair_cls.shape[0]
    nchk = len(checkpoints)
    finals = np.zeros(n, dtype=np.int64)
    alt_hist = np.zeros((npair, ALT_CAP + 1), dtype=np.int64)
    chk_sum = np.zeros(nchk, dtype=np.int64)
    chk_max = np.zeros(nchk, dtype=np.int64)
    chk_alive = np.zeros(nchk, dtype=np.int64)
    censored = 0
    for lo in range(offset, offset + trials, CHUNK):
        hi = min(lo + CHUNK, offset + trials)
        m = hi - lo
        st = _trial_states(seed, lo, hi)
        pos = np.full(m, root, dtype=np.int64)
        dead = np.zeros(m, dtype=bool)
        alt = np.zeros((m, npair), dtype=np.int64)
        state = np.empty((m, npair), dtype=np.int8)
        for pidx in range(npair):
            state[:, pidx] = pair_cls[pidx, root]
        ci = 0
        if absorb[root]:
            dead[:] = True
        for step in range(1, cap + 1):
            live = np.nonzero(~dead)[0]
            if live.size:
                u = _draw(st[live])
                with np.errstate(over="ignore"):
                    st[live] += _G
                d = _pick(prep, pos[live], u)
                y = head[d]
                pos[live] = y
                for pidx in range(npair):
                    c = pair_cls[pidx, y]
                    prev = state[live, pidx]
                    flip = (c != 0) & (prev != 0) & (c != prev)
                    alt[live[flip], pidx] += 1
                    upd = c != 0
                    state[live[upd], pidx] = c[upd]
                just = absorb[y]
                if just.any():
                    dead[live[just]] = True
            while ci < nchk and checkpoints[ci] == step:
                hvals = hfix[pos]
                chk_sum[ci] += int(hvals.sum())
                chk_max[ci] = max(chk_max[ci], int(hvals.max()) if m else 0)
                chk_alive[ci] += int((~dead).sum())
                ci += 1
            if dead.all():
                # positions are frozen; later checkpoints see the same h
                hvals = hfix[pos]
                total = int(hvals.sum())
                frozen_max = int(hvals.max()) if m else 0
                while ci < nchk:
                    chk_sum[ci] += total
                    chk_max[ci] = max(chk_max[ci], frozen_max)
                    ci += 1
                break
        done = dead
        censored += int((~done).sum())
        fin = pos[done]
        np.add.at(finals, fin, 1)
        a = np.minimum(alt[done], ALT_CAP)
        for pidx in range(npair):
            np.add.at(alt_hist[pidx], a[:, pidx], 1)
    completed = trials - censored
    return finals, alt_hist, chk_sum, chk_max, chk_alive, completed, censored


def svalue_walk(prep: dict, absorb: np.ndarray, s: np.ndarray,
                thr_hi: float, thr_lo: float, k_run: int,
                band_hi: float, band_lo: float, delta: float, root: int,
                seed: int, trials: int, offset: int, cap: int):
    """Track tail behaviour of a [0, 1] vertex observable along the walk.

    A completed trial is classed 1 when its last k_run observations all
    exceed thr_hi (or it was absorbed while above), classed 0
    symmetrically below thr_lo, otherwise middle.
    """
    head = prep["head"]
    n = prep["n"]
    finals = np.zeros(n, dtype=np.int64)
    cnt1 = np.zeros(n, dtype=np.int64)
    cnt0 = np.zeros(n, dtype=np.int64)
    ever_below = 0
    alt_hist = np.zeros(ALT_CAP + 1, dtype=np.int64)
    censored = 0
    for lo in range(offset, offset + trials, CHUNK):
        hi = min(lo + CHUNK, offset + trials)
        m = hi - lo
        st = _trial_states(seed, lo, hi)
        pos = np.full(m, root, dtype=np.int64)
        runhi = np.zeros(m, dtype=np.int64)
        runlo = np.zeros(m, dtype=np.int64)
        alt = np.zeros(m, dtype=np.int64)
        band = np.zeros(m, dtype=np.int8)
        ever = np.zeros(m, dtype=bool)

        def observe(rows, v):
            sv = s[v]
            hi_m = sv > thr_hi
            lo_m = sv < thr_lo
            runhi[rows] = np.where(hi_m, runhi[rows] + 1, 0)
            runlo[rows] = np.where(lo_m, runlo[rows] + 1, 0)
            ever[rows] |= sv < delta
            c = np.zeros(len(v), dtype=np.int8)
            c[sv > band_hi] = 1
            c[sv < band_lo] = 2
            prev = band[rows]
            flip = (c != 0) & (prev != 0) & (c != prev)
            alt[rows[flip]] += 1
            upd = c != 0
            band[rows[upd]] = c[upd]

        observe(np.arange(m), pos)

        def retire(rows):
            nonlocal ever_below
            fin = pos[rows]
            np.add.at(finals, fin, 1)
            done_hi = (runhi[rows] >= k_run) | (s[fin] > thr_hi)
            done_lo = ~done_hi & ((runlo[rows] >= k_run) | (s[fin] < thr_lo))
            np.add.at(cnt1, fin[done_hi], 1)
            np.add.at(cnt0, fin[done_lo], 1)
            ever_below += int(ever[rows].sum())
            np.add.at(alt_hist, np.minimum(alt[rows], ALT_CAP), 1)

        if absorb[root]:
            retire(np.arange(m))
            continue
        for _ in range(cap):
            if pos.size == 0:
                break
            u = _draw(st)
            d = _pick(prep, pos, u)
            y = head[d]
            pos = y
            observe(np.arange(pos.size), y)
            stop = absorb[y]
            if stop.any():
                retire(np.nonzero(stop)[0])
                keep = ~stop
                pos, st = pos[keep], st[keep]
                runhi, runlo = runhi[keep], runlo[keep]
                alt, band, ever = alt[keep], band[keep], ever[keep]
        censored += int(pos.size)
    completed = trials - censored
    return finals, cnt1, cnt0, ever_below, alt_hist, completed, censored
