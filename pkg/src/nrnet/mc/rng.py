"""Counter-based uniforms: one SplitMix64 stream per trajectory.

The uniform for trajectory ``j`` at draw ``t`` is a pure function of
``(seed, j, t)``, so results do not depend on execution order or on how the
trajectories are split into chunks.
"""
import numpy as np

GOLDEN = np.uint64(0x9E3779B97F4A7C15)
MIX1 = np.uint64(0xBF58476D1CE4E5B9)
MIX2 = np.uint64(0x94D049BB133111EB)
S30 = np.uint64(30)
S27 = np.uint64(27)
S31 = np.uint64(31)
S11 = np.uint64(11)
ONE = np.uint64(1)
INV_2_53 = 1.0 / 9007199254740992.0
MASK64 = (1 << 64) - 1


def mix64(z: np.ndarray) -> np.ndarray:
    z = (z ^ (z >> S30)) * MIX1
    z = (z ^ (z >> S27)) * MIX2
    return z ^ (z >> S31)


def trajectory_keys(seed: int, start: int, count: int) -> np.ndarray:
    """Stream keys for trajectories ``start .. start + count - 1``."""
    base = mix64(np.array([int(seed) & MASK64], dtype=np.uint64))[0]
    idx = np.arange(start, start + count, dtype=np.uint64)
    return mix64(base ^ ((idx + ONE) * GOLDEN))


def uniforms(keys: np.ndarray, counters: np.ndarray) -> np.ndarray:
    z = mix64(keys + (counters.astype(np.uint64) + ONE) * GOLDEN)
    return (z >> S11).astype(np.float64) * INV_2_53
