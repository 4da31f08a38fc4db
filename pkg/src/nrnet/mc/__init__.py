"""Monte Carlo oracle (numba kernels with a pure-numpy fallback)."""
from .oracle import (
    EdgeCountEstimate,
    Estimate,
    SimConfig,
    simulate_absorption,
    simulate_commute_cost,
    simulate_edge_counts,
    simulate_escape,
    z_score,
)

__all__ = [
    "EdgeCountEstimate",
    "Estimate",
    "SimConfig",
    "simulate_absorption",
    "simulate_commute_cost",
    "simulate_edge_counts",
    "simulate_escape",
    "z_score",
]
