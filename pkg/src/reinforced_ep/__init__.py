"""Simulation and verification toolkit for linearly reinforced empirical processes."""

from .engine import (ClusterSnapshot, ReinforcementParams, SimonState, advance,
                     advance_to, cluster_arrays, cluster_values, init, run_to,
                     simulate, snapshot)
from .errors import (ConsistencyError, ParameterError, RegimeError,
                     ReinforcedEPError, StateError)

__version__ = "0.1.0"

__all__ = [
    "ClusterSnapshot", "ReinforcementParams", "SimonState", "advance", "advance_to",
    "cluster_arrays", "cluster_values", "init", "run_to", "simulate", "snapshot",
    "ConsistencyError", "ParameterError", "RegimeError", "ReinforcedEPError", "StateError",
]
