"""Numba kernel: one trajectory at a time, same stream as the numpy path."""
import numpy as np
from numba import njit

from .rng import GOLDEN, INV_2_53, MIX1, MIX2, ONE, S11, S27, S30, S31


@njit(cache=True, inline="always")
def _mix64(z):
    z = (z ^ (z >> S30)) * MIX1
    z = (z ^ (z >> S27)) * MIX2
    return z ^ (z >> S31)


@njit(cache=True, inline="always")
def _uniform(key, counter):
    z = _mix64(key + (np.uint64(counter) + ONE) * GOLDEN)
    return np.float64(z >> S11) * INV_2_53


@njit(cache=True)
def walk(cum, last, starts, counters, stop, strict, cost, keys, max_steps, count_jumps):
    m = starts.shape[0]
    n = cum.shape[0]
    end = np.full(m, -1, dtype=np.int64)
    steps = np.zeros(m, dtype=np.int64)
    acc = np.zeros(m)
    ctr_out = np.zeros(m, dtype=np.int64)
    counts = np.zeros((m if count_jumps else 0, n, n), dtype=np.int64)
    for j in range(m):
        x = starts[j]
        ctr = counters[j]
        key = keys[j]
        s = 0
        c = 0.0
        if not strict and stop[x]:
            end[j] = x
        else:
            while s < max_steps:
                u = _uniform(key, ctr)
                ctr += 1
                y = 0
                while y < last[x] and cum[x, y] <= u:
                    y += 1
                c += cost[x, y]
                if count_jumps:
                    counts[j, x, y] += 1
                x = y
                s += 1
                if stop[x]:
                    end[j] = x
                    break
        steps[j] = s
        acc[j] = c
        ctr_out[j] = ctr
    return end, steps, acc, ctr_out, counts
