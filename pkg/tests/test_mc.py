import os
import subprocess
import sys

import numpy as np
import pytest

from nrnet.errors import SameVertex, SourceInTarget, TruncationExceeded
from nrnet.generators import random_chain
from nrnet.markov import MarkovChain
from nrnet.mc import (
    SimConfig,
    simulate_absorption,
    simulate_commute_cost,
    simulate_edge_counts,
    simulate_escape,
    z_score,
)
from nrnet.mc import oracle
from nrnet.mc.rng import trajectory_keys, uniforms
from nrnet.quantities import edge_flows, escape_probability

CYCLE = MarkovChain([[0.0, 0.7, 0.3], [0.3, 0.0, 0.7], [0.7, 0.3, 0.0]])
FLIP = MarkovChain([[0.0, 1.0], [1.0, 0.0]])


def test_uniforms_in_unit_interval_and_stable():
    keys = trajectory_keys(5, 0, 1000)
    u = uniforms(keys, np.zeros(1000, dtype=np.int64))
    assert np.all((u >= 0) & (u < 1))
    assert abs(u.mean() - 0.5) < 0.05
    # a slice of the keys equals the keys of the slice
    assert np.array_equal(trajectory_keys(5, 300, 10), keys[300:310])


@pytest.mark.parametrize("sim", ["absorption", "escape", "commute", "edges"])
def test_backends_bit_identical(sim):
    chain = random_chain(5, np.random.default_rng(1))
    out = {}
    for backend in ("numba", "numpy"):
        cfg = SimConfig(5000, seed=3, backend=backend)
        if sim == "absorption":
            out[backend] = tuple(simulate_absorption(chain, 2, [0], [4], cfg))
        elif sim == "escape":
            out[backend] = tuple(simulate_escape(chain, [0, 1], [4], cfg))
        elif sim == "commute":
            out[backend] = tuple(simulate_commute_cost(chain, 0, 4, None, cfg))
        else:
            est = simulate_edge_counts(chain, 0, [4], cfg)
            out[backend] = (est.net_mean.tobytes(), est.net_stderr.tobytes(), est.mean_jumps.tobytes())
    assert out["numba"] == out["numpy"]


def test_deterministic_and_chunk_independent(monkeypatch):
    cfg = SimConfig(3000, seed=9)
    a = simulate_absorption(CYCLE, 1, [0], [2], cfg)
    b = simulate_absorption(CYCLE, 1, [0], [2], cfg)
    assert a == b
    monkeypatch.setattr(oracle, "CHUNK", 7)
    c = simulate_absorption(CYCLE, 1, [0], [2], cfg)
    assert c == a


def test_seed_changes_estimate():
    a = simulate_absorption(CYCLE, 1, [0], [2], SimConfig(2000, seed=1))
    b = simulate_absorption(CYCLE, 1, [0], [2], SimConfig(2000, seed=2))
    assert a.estimate != b.estimate


def test_absorption_from_boundary():
    assert simulate_absorption(CYCLE, 0, [0], [2], SimConfig(100)).estimate == 1.0
    assert simulate_absorption(CYCLE, 2, [0], [2], SimConfig(100)).estimate == 0.0


def test_flip_commute_exact():
    est = simulate_commute_cost(FLIP, 0, 1, None, SimConfig(1000, seed=4))
    assert est.estimate == 2.0 and est.stderr == 0.0
    with pytest.raises(SameVertex):
        simulate_commute_cost(FLIP, 0, 0)


def test_escape_cycle():
    est = simulate_escape(CYCLE, [0], [2], SimConfig(100_000, seed=5))
    assert abs(z_score(est.estimate, est.stderr, 0.79)) <= 4


def test_escape_random_chain():
    chain = random_chain(6, np.random.default_rng(7))
    exact = escape_probability(chain, [0, 2], [5]).probability
    est = simulate_escape(chain, [0, 2], [5], SimConfig(100_000, seed=6))
    assert abs(z_score(est.estimate, est.stderr, exact)) <= 4


def test_edge_counts_per_trajectory_conservation():
    chain = random_chain(6, np.random.default_rng(8))
    B = [4, 5]
    est, counts = simulate_edge_counts(chain, 0, B, SimConfig(500, seed=1), per_trajectory=True)
    net = counts - counts.transpose(0, 2, 1)
    out_of_source = net[:, 0, :].sum(axis=1)
    assert np.all(out_of_source == 1)
    mask = np.zeros(6, dtype=bool)
    mask[B] = True
    into_b = net[:, ~mask][:, :, mask].sum(axis=(1, 2))
    assert np.all(into_b == 1)
    # nothing leaves B: the walk stops on arrival
    assert counts[:, mask, :].sum() == 0


def test_edge_counts_cycle():
    est = simulate_edge_counts(CYCLE, 0, [2], SimConfig(50_000, seed=2))
    flows = edge_flows(CYCLE, 0, [2]).net_flows
    for x, y in [(0, 1), (1, 2), (0, 2)]:
        assert abs(z_score(est.net_mean[x, y], est.net_stderr[x, y], flows[x, y])) <= 4


def test_edge_counts_source_in_target():
    with pytest.raises(SourceInTarget):
        simulate_edge_counts(CYCLE, 2, [2])


def test_stderr_scales_as_inverse_sqrt_n():
    small = simulate_absorption(CYCLE, 1, [0], [2], SimConfig(20_000, seed=3))
    large = simulate_absorption(CYCLE, 1, [0], [2], SimConfig(80_000, seed=3))
    assert small.stderr / large.stderr == pytest.approx(2.0, rel=0.05)


def test_truncation_exceeded():
    # a sticky chain that rarely leaves state 0
    chain = MarkovChain([[0.999, 0.001], [0.5, 0.5]])
    with pytest.raises(TruncationExceeded) as info:
        simulate_commute_cost(chain, 0, 1, None, SimConfig(100, max_steps=5))
    assert info.value.n_truncated > 0


def test_z_score_zero_variance():
    assert z_score(2.0, 0.0, 2.0) == 0.0
    assert z_score(2.0, 0.0, 2.5) == float("inf")


def test_env_flag_selects_numpy():
    env = dict(os.environ, NRNET_DISABLE_NUMBA="1")
    code = "from nrnet._accel import resolve_backend; print(resolve_backend())"
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "numpy"
