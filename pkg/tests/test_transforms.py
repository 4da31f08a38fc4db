import numpy as np
import pytest

from nrnet.errors import CenterNotIsolated, EndpointMismatch, InfeasibleDelta, MidVertexNotFree
from nrnet.generators import random_chain
from nrnet.network import Network, Unit, is_markovian
from nrnet.quantities import effective_resistance
from nrnet.transforms import (
    DeltaConfig,
    StarConfig,
    delta_to_star,
    delta_to_star_closed_form,
    equivalence_check,
    parallel_reduce,
    reduce_series_parallel,
    series_reduce,
    star_to_delta,
)


def test_series_reference_values():
    s = series_reduce(Unit(0, 2, 1.0, 2.0), Unit(2, 1, 1.0, 3.0), 2)
    assert (s.tail, s.head) == (0, 1)
    assert s.gain == pytest.approx(6.0)
    assert s.resistance == pytest.approx(13 / 7)


def test_parallel_reference_values():
    p = parallel_reduce(Unit(0, 1, 1.0, 2.0), Unit(0, 1, 3.0, 4.0))
    assert p.resistance == pytest.approx(0.75)
    assert p.gain == pytest.approx(7 / 3)


def test_plain_resistors_reduce_classically():
    s = series_reduce(Unit(0, 2, 1.0), Unit(2, 1, 2.0), 2)
    assert (s.resistance, s.gain) == (pytest.approx(3.0), pytest.approx(1.0))
    p = parallel_reduce(Unit(0, 1, 2.0), Unit(1, 0, 2.0))
    assert (p.resistance, p.gain) == (pytest.approx(1.0), pytest.approx(1.0))


def test_unit_star_to_delta():
    delta = star_to_delta(StarConfig(3, (0, 1, 2), 1.0, 1.0, 1.0, 1.0, 1.0, 1.0))
    assert (delta.s, delta.q, delta.r) == (3.0, 3.0, 3.0)
    assert delta.gain_product == pytest.approx(1.0)


def test_closed_form_matches_construction():
    rng = np.random.default_rng(0)
    for _ in range(50):
        star = StarConfig(3, (0, 1, 2), *rng.uniform(0.1, 5, 3), *np.exp(rng.uniform(-1, 1, 3)))
        delta = star_to_delta(star)
        for alpha in (0.5, 1.0, 2.0):
            st = delta_to_star(delta, alpha)
            s, q, r = delta_to_star_closed_form(delta, alpha)
            assert (st.s, st.q, st.r) == (pytest.approx(s), pytest.approx(q), pytest.approx(r))


def test_delta_to_star_rejects_bad_product():
    delta = DeltaConfig((0, 1, 2), 1.0, 1.0, 1.0, nu=2.0, mu=1.0, lam=1.0)
    with pytest.raises(InfeasibleDelta) as info:
        delta_to_star(delta)
    assert info.value.residual == pytest.approx(1.0)


def test_series_requires_shared_vertex():
    with pytest.raises(MidVertexNotFree):
        series_reduce(Unit(0, 1, 1.0), Unit(2, 3, 1.0), 1)


def test_parallel_requires_same_endpoints():
    with pytest.raises(EndpointMismatch):
        parallel_reduce(Unit(0, 1, 1.0), Unit(1, 2, 1.0))


def test_star_from_network():
    net = Network(4, [Unit(0, 3, 1.0, 2.0), Unit(3, 1, 2.0, 0.5), Unit(2, 3, 1.5)])
    star = StarConfig.from_network(net, 3)
    assert equivalence_check(net, Network(4, star.units()), [0, 1, 2])
    with pytest.raises(CenterNotIsolated):
        StarConfig.from_network(Network(3, [Unit(0, 1, 1.0), Unit(1, 2, 1.0)]), 1)


def test_equivalence_check_detects_difference():
    a = Network(2, [Unit(0, 1, 1.0)])
    b = Network(2, [Unit(0, 1, 1.1)])
    assert not equivalence_check(a, b, [0, 1])


def test_star_to_delta_preserves_markovian():
    # a Markovian star (from a chain) stays Markovian after conversion
    rng = np.random.default_rng(1)
    hits = 0
    for _ in range(200):
        chain = random_chain(4, rng, edge_prob=0.0, loop_prob=0.0)
        net = chain.network
        centers = [v for v in range(4) if len(net.incident(v)) == 3]
        if not centers:
            continue
        c = centers[0]
        star = StarConfig.from_network(net, c)
        delta_units = star_to_delta(star).units()
        keep = [v for v in range(4) if v != c]
        index = {v: k for k, v in enumerate(keep)}
        reduced = Network(3, [Unit(index[u.tail], index[u.head], u.resistance, u.gain) for u in delta_units])
        assert is_markovian(reduced)
        hits += 1
    assert hits > 10


def test_reduce_series_parallel_preserves_reff():
    rng = np.random.default_rng(2)
    for _ in range(20):
        chain = random_chain(6, rng, edge_prob=0.2)
        net = chain.network
        reduced, index = reduce_series_parallel(net, [0, 5])
        assert effective_resistance(reduced, [index[0]], [index[5]]) == pytest.approx(
            effective_resistance(net, [0], [5]), rel=1e-10
        )


def test_equal_gains_pass_through_parallel():
    p = parallel_reduce(Unit(0, 1, 2.0, 1.7), Unit(0, 1, 5.0, 1.7))
    assert p.gain == pytest.approx(1.7)
    assert p.resistance == pytest.approx(10 / 7)


def test_reduced_resistance_increasing_in_inputs():
    rng = np.random.default_rng(3)
    h = 1e-6
    for _ in range(50):
        r, q = rng.uniform(0.1, 5, 2)
        lam, mu = np.exp(rng.uniform(-1, 1, 2))
        ser = lambda r, q: series_reduce(Unit(0, 2, r, lam), Unit(2, 1, q, mu), 2).resistance
        par = lambda r, q: parallel_reduce(Unit(0, 1, r, lam), Unit(0, 1, q, mu)).resistance
        for f in (ser, par):
            assert f(r + h, q) > f(r, q)
            assert f(r, q + h) > f(r, q)
