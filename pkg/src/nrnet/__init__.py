"""Electric networks of resistor-amplifier units for non-reversible Markov chains."""
from .errors import *  # noqa: F401,F403
from .markov import (
    MarkovChain,
    absorption_probabilities,
    chain_to_network,
    is_reversible,
    network_to_chain,
    reverse,
    stationary_distribution,
    symmetrize,
)
from .network import (
    BoundarySolution,
    Network,
    Unit,
    alternative_forms,
    check_markovian,
    scale_resistances,
    solve,
    solve_iterative,
    unit_current,
)
from .quantities import (
    capacity,
    capacity_symmetrized_form,
    commute_cost,
    dirichlet_check,
    edge_flows,
    effective_resistance,
    energy,
    escape_probability,
    hitting_cost,
    thomson_check,
)

__version__ = "0.1.0"
