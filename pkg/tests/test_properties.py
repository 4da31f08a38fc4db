"""Property-based checks on random networks and chains."""
import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st

from nrnet.generators import random_chain, random_disjoint_sets, random_network
from nrnet.markov import reverse, symmetrize
from nrnet.network import Unit, alternative_forms, primer_current, secunder_current, solve, unit_current
from nrnet.quantities import capacity, effective_resistance, escape_probability

seeds = st.integers(min_value=0, max_value=2**32 - 1)
sizes = st.integers(min_value=3, max_value=7)
positive = st.floats(min_value=1e-3, max_value=1e3)
gains = st.floats(min_value=1e-3, max_value=1e3)
volts = st.floats(min_value=-100, max_value=100)


@given(positive, gains, volts, volts)
def test_forms_agree(r, g, ut, uh):
    u = Unit(0, 1, r, g)
    primer, secunder = alternative_forms(u)
    i = unit_current(u, ut, uh)
    scale = max(1.0, abs(i), (abs(ut) + abs(uh)) * max(g, 1 / g) / r)
    assert abs(primer_current(primer, ut, uh) - i) <= 1e-12 * scale
    assert abs(secunder_current(secunder, ut, uh) - i) <= 1e-12 * scale


@settings(max_examples=40, deadline=None)
@given(seeds, sizes)
def test_solution_conserves_current(seed, n):
    rng = np.random.default_rng(seed)
    net = random_network(n, rng)
    bnd = {0: float(rng.uniform(-1, 1)), n - 1: float(rng.uniform(-1, 1))}
    sol = solve(net, bnd)
    assert abs(sol.external_currents.sum()) <= 1e-10


@settings(max_examples=40, deadline=None)
@given(seeds, sizes)
def test_capacity_symmetric_and_reversal_invariant(seed, n):
    rng = np.random.default_rng(seed)
    chain = random_chain(n, rng)
    A, B = random_disjoint_sets(n, rng)
    c1 = capacity(chain, A, B).electrical
    c2 = capacity(chain, B, A).electrical
    c3 = capacity(reverse(chain), A, B).electrical
    assert abs(c1 - c2) <= 1e-10 * max(1.0, c1)
    assert abs(c1 - c3) <= 1e-10 * max(1.0, c1)


@settings(max_examples=40, deadline=None)
@given(seeds, sizes)
def test_symmetrising_never_helps_escape(seed, n):
    rng = np.random.default_rng(seed)
    chain = random_chain(n, rng)
    A, B = random_disjoint_sets(n, rng)
    assert escape_probability(symmetrize(chain), A, B).probability <= \
        escape_probability(chain, A, B).probability + 1e-12


@settings(max_examples=30, deadline=None)
@given(seeds, sizes)
def test_effective_resistance_positive(seed, n):
    rng = np.random.default_rng(seed)
    chain = random_chain(n, rng)
    A, B = random_disjoint_sets(n, rng)
    assert effective_resistance(chain, A, B) > 0
