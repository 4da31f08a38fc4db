"""Vectorised trajectory kernel: all live walkers advance one step per pass."""
import numpy as np

from .rng import uniforms


def walk(cum, last, starts, counters, stop, strict, cost, keys, max_steps, count_jumps):
    m = starts.shape[0]
    n = cum.shape[0]
    x = starts.astype(np.int64).copy()
    ctr = counters.astype(np.int64).copy()
    steps = np.zeros(m, dtype=np.int64)
    acc = np.zeros(m)
    end = np.full(m, -1, dtype=np.int64)
    counts = np.zeros((m if count_jumps else 0, n, n), dtype=np.int64)
    live = np.ones(m, dtype=bool)
    if not strict:
        done = stop[x]
        end[done] = x[done]
        live &= ~done
    idx = np.flatnonzero(live)
    if max_steps <= 0:
        idx = idx[:0]
    while idx.size:
        u = uniforms(keys[idx], ctr[idx])
        ctr[idx] += 1
        cx = x[idx]
        y = (cum[cx] <= u[:, None]).sum(axis=1)
        y = np.minimum(y, last[cx])
        acc[idx] += cost[cx, y]
        if count_jumps:
            np.add.at(counts, (idx, cx, y), 1)
        x[idx] = y
        steps[idx] += 1
        hit = stop[y]
        end[idx[hit]] = y[hit]
        idx = idx[~hit & (steps[idx] < max_steps)]
    return end, steps, acc, ctr, counts
