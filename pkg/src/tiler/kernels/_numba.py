"""Scalar per-trial random-walk kernels compiled with numba.

Draw order per trial matches the numpy backend step for step, and all
accumulators are integers, so outputs are bit-identical between the
two backends.
"""
from __future__ import annotations

import numpy as np
from numba import njit

_G = np.uint64(0x9E3779B97F4A7C15)
_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)
_INV53 = 2.0 ** -53
_U64 = np.uint64(0xFFFFFFFFFFFFFFFF)

ALT_CAP = 32


@njit(cache=True, inline="always")
def _mix(z):
    z = (z ^ (z >> np.uint64(30))) * _M1
    z = (z ^ (z >> np.uint64(27))) * _M2
    return z ^ (z >> np.uint64(31))


@njit(cache=True, inline="always")
def _init_state(seed, trial):
    base = _mix(np.uint64(trial) * _G + _G)
    return _mix(base ^ np.uint64(seed))


@njit(cache=True, inline="always")
def _u01(state):
    state = state + _G
    u = np.float64(_mix(state) >> np.uint64(11)) * _INV53
    return state, u


@njit(cache=True, inline="always")
def _step(indptr, darts, cum, x, u):
    k = indptr[x]
    while u >= cum[k]:
        k += 1
    return darts[k]


@njit(cache=True)
def _hit_walk(indptr, darts, cum, head, absorb, watch, root,
              seed, trials, offset, cap):
    n = len(absorb)
    first_counts = np.zeros(n, dtype=np.int64)
    last_counts = np.zeros(n, dtype=np.int64)
    censored = 0
    steps_total = 0
    for t in range(offset, offset + trials):
        state = _init_state(seed, t)
        x = root
        first = root if watch[root] else -1
        last = first
        done = absorb[root]
        if not done:
            for _ in range(cap):
                state, u = _u01(state)
                x = head[_step(indptr, darts, cum, x, u)]
                steps_total += 1
                if watch[x]:
                    if first < 0:
                        first = x
                    last = x
                if absorb[x]:
                    done = True
                    break
        if done:
            if first >= 0:
                first_counts[first] += 1
            if last >= 0:
                last_counts[last] += 1
        else:
            censored += 1
    return first_counts, last_counts, trials - censored, censored, steps_total


@njit(cache=True)
def _flux_walk(indptr, darts, cum, head, absorb, level, slot, nslots, root,
               seed, trials, offset, cap):
    exc_sum = np.zeros(nslots, dtype=np.int64)
    exc_sq = np.zeros(nslots, dtype=np.int64)
    tot_sum = np.zeros(nslots, dtype=np.int64)
    tot_sq = np.zeros(nslots, dtype=np.int64)
    seg = np.zeros(nslots, dtype=np.int64)
    exc = np.zeros(nslots, dtype=np.int64)
    tot = np.zeros(nslots, dtype=np.int64)
    censored = 0
    for t in range(offset, offset + trials):
        state = _init_state(seed, t)
        x = root
        for j in range(nslots):
            seg[j] = 0
            exc[j] = 0
            tot[j] = 0
        seen_level = level[root]
        done = absorb[root]
        if not done:
            for _ in range(cap):
                state, u = _u01(state)
                d = _step(indptr, darts, cum, x, u)
                y = head[d]
                sf = slot[d]
                if sf >= 0:
                    seg[sf] += 1
                    tot[sf] += 1
                sr = slot[d ^ 1]
                if sr >= 0:
                    seg[sr] -= 1
                    tot[sr] -= 1
                x = y
                if absorb[y]:
                    done = True
                    break
                if level[y]:
                    # the leg from the root to the first level visit is
                    # not an excursion; discard it
                    if seen_level:
                        for j in range(nslots):
                            exc[j] += seg[j]
                    seen_level = True
                    for j in range(nslots):
                        seg[j] = 0
        if done:
            for j in range(nslots):
                exc_sum[j] += exc[j]
                exc_sq[j] += exc[j] * exc[j]
                tot_sum[j] += tot[j]
                tot_sq[j] += tot[j] * tot[j]
        else:
            censored += 1
    return exc_sum, exc_sq, tot_sum, tot_sq, trials - censored, censored


@njit(cache=True, inline="always")
def _cross(a, w, frm, to, mu):
    m = (mu - a) % 1.0
    if m >= w:
        return 0
    s = (frm - a) % 1.0
    t = (to - a) % 1.0
    if s < m and m < t:
        return 1
    if t < m and m < s:
        return -1
    return 0


@njit(cache=True)
def _meridian_walk(indptr, darts, cum, head, absorb, vert_a, vert_w,
                   dart_rs, dart_rw, mer, root, seed, trials, offset, cap):
    n = len(absorb)
    nm = len(mer)
    vnet = np.zeros((nm, n), dtype=np.int64)
    vev = np.zeros((nm, n), dtype=np.int64)
    tot_sum = np.zeros(nm, dtype=np.int64)
    tot_sq = np.zeros(nm, dtype=np.int64)
    net = np.zeros(nm, dtype=np.int64)
    censored = 0
    for t in range(offset, offset + trials):
        state = _init_state(seed, t)
        x = root
        state, u = _u01(state)
        p = (vert_a[root] + u * vert_w[root]) % 1.0
        for k in range(nm):
            net[k] = 0
        done = absorb[root]
        if not done:
            for _ in range(cap):
                state, u = _u01(state)
                d = _step(indptr, darts, cum, x, u)
                y = head[d]
                state, u = _u01(state)
                q = (dart_rs[d] + u * dart_rw[d]) % 1.0
                for k in range(nm):
                    c = _cross(vert_a[x], vert_w[x], p, q, mer[k])
                    if c != 0:
                        vnet[k, x] += c
                        vev[k, x] += 1
                        net[k] += c
                if absorb[y]:
                    x = y
                    done = True
                    break
                state, u = _u01(state)
                p = (vert_a[y] + u * vert_w[y]) % 1.0
                for k in range(nm):
                    c = _cross(vert_a[y], vert_w[y], q, p, mer[k])
                    if c != 0:
                        vnet[k, y] += c
                        vev[k, y] += 1
                        net[k] += c
                x = y
        if done:
            for k in range(nm):
                tot_sum[k] += net[k]
                tot_sq[k] += net[k] * net[k]
        else:
            censored += 1
    return vnet, vev, tot_sum, tot_sq, trials - censored, censored


@njit(cache=True)
def _limit_walk(indptr, darts, cum, head, absorb, hfix, pair_cls,
                checkpoints, root, seed, trials, offset, cap):
    n = len(absorb)
    npair = pair_cls.shape[0]
    nchk = len(checkpoints)
    finals = np.zeros(n, dtype=np.int64)
    alt_hist = np.zeros((npair, ALT_CAP + 1), dtype=np.int64)
    chk_sum = np.zeros(nchk, dtype=np.int64)
    chk_max = np.zeros(nchk, dtype=np.int64)
    chk_alive = np.zeros(nchk, dtype=np.int64)
    alt = np.zeros(npair, dtype=np.int64)
    st8 = np.zeros(npair, dtype=np.int8)
    censored = 0
    for t in range(offset, offset + trials):
        state = _init_state(seed, t)
        x = root
        dead = absorb[root]
        for p in range(npair):
            alt[p] = 0
            st8[p] = pair_cls[p, root]
        ci = 0
        for step in range(1, cap + 1):
            if not dead:
                state, u = _u01(state)
                x = head[_step(indptr, darts, cum, x, u)]
                for p in range(npair):
                    c = pair_cls[p, x]
                    if c != 0:
                        if st8[p] != 0 and c != st8[p]:
                            alt[p] += 1
                        st8[p] = c
                if absorb[x]:
                    dead = True
            while ci < nchk and checkpoints[ci] == step:
                h = hfix[x]
                chk_sum[ci] += h
                if h > chk_max[ci]:
                    chk_max[ci] = h
                if not dead:
                    chk_alive[ci] += 1
                ci += 1
            if dead:
                # position is frozen; later checkpoints see the same h
                h = hfix[x]
                while ci < nchk:
                    chk_sum[ci] += h
                    if h > chk_max[ci]:
                        chk_max[ci] = h
                    ci += 1
                break
        if dead:
            finals[x] += 1
            for p in range(npair):
                a = alt[p]
                if a > ALT_CAP:
                    a = ALT_CAP
                alt_hist[p, a] += 1
        else:
            censored += 1
    return (finals, alt_hist, chk_sum, chk_max, chk_alive,
            trials - censored, censored)


@njit(cache=True)
def _svalue_walk(indptr, darts, cum, head, absorb, s, thr_hi, thr_lo, k_run,
                 band_hi, band_lo, delta, root, seed, trials, offset, cap):
    n = len(absorb)
    finals = np.zeros(n, dtype=np.int64)
    cnt1 = np.zeros(n, dtype=np.int64)
    cnt0 = np.zeros(n, dtype=np.int64)
    ever_below = 0
    alt_hist = np.zeros(ALT_CAP + 1, dtype=np.int64)
    censored = 0
    for t in range(offset, offset + trials):
        state = _init_state(seed, t)
        x = root
        runhi = 0
        runlo = 0
        alt = 0
        band = 0
        ever = False
        v = s[root]
        runhi = 1 if v > thr_hi else 0
        runlo = 1 if v < thr_lo else 0
        ever = v < delta
        if v > band_hi:
            band = 1
        elif v < band_lo:
            band = 2
        done = absorb[root]
        if not done:
            for _ in range(cap):
                state, u = _u01(state)
                x = head[_step(indptr, darts, cum, x, u)]
                v = s[x]
                runhi = runhi + 1 if v > thr_hi else 0
                runlo = runlo + 1 if v < thr_lo else 0
                if v < delta:
                    ever = True
                if v > band_hi:
                    if band == 2:
                        alt += 1
                    band = 1
                elif v < band_lo:
                    if band == 1:
                        alt += 1
                    band = 2
                if absorb[x]:
                    done = True
                    break
        if done:
            finals[x] += 1
            v = s[x]
            if runhi >= k_run or v > thr_hi:
                cnt1[x] += 1
            elif runlo >= k_run or v < thr_lo:
                cnt0[x] += 1
            if ever:
                ever_below += 1
            a = alt if alt < ALT_CAP else ALT_CAP
            alt_hist[a] += 1
        else:
            censored += 1
    return finals, cnt1, cnt0, ever_below, alt_hist, trials - censored, censored


def hit_walk(prep, absorb, watch, root, seed, trials, offset, cap):
    return _hit_walk(prep["indptr"], prep["darts"], prep["cum"], prep["head"],
                     absorb, watch, root, seed, trials, offset, cap)


def flux_walk(prep, absorb, level, slot, nslots, root,
              seed, trials, offset, cap):
    return _flux_walk(prep["indptr"], prep["darts"], prep["cum"],
                      prep["head"], absorb, level, slot, nslots, root,
                      seed, trials, offset, cap)


def meridian_walk(prep, absorb, vert_a, vert_w, dart_rs, dart_rw, mer, root,
                  seed, trials, offset, cap):
    return _meridian_walk(prep["indptr"], prep["darts"], prep["cum"],
                          prep["head"], absorb, vert_a, vert_w,
                          dart_rs, dart_rw, mer, root,
                          seed, trials, offset, cap)


def limit_walk(prep, absorb, hfix, pair_cls, checkpoints, root,
               seed, trials, offset, cap):
    return _limit_walk(prep["indptr"], prep["darts"], prep["cum"],
                       prep["head"], absorb, hfix, pair_cls, checkpoints,
                       root, seed, trials, offset, cap)


def svalue_walk(prep, absorb, s, thr_hi, thr_lo, k_run, band_hi, band_lo,
                delta, root, seed, trials, offset, cap):
    return _svalue_walk(prep["indptr"], prep["darts"], prep["cum"],
                        prep["head"], absorb, s, thr_hi, thr_lo, k_run,
                        band_hi, band_lo, delta, root, seed, trials,
                        offset, cap)
