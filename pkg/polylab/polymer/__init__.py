from .polymer_dp import (
    PolymerState,
    init_state,
    advance,
    iterate_polymer,
    run_polymer,
    free_energy,
    endpoint_distribution,
    checkpoint_grid,
    DEFAULT_TAU_REL,
    DEFAULT_LEDGER_WARN,
)
from .path_oracle import (
    brute_force_endpoint,
    brute_force_log_Z,
    brute_force_pmf,
    shift_identity_check,
)
from .replicas import (
    ReplicaResults,
    run_replicas,
    scan_replicas,
    summarize_series,
    annealed_ratio,
)

__all__ = [
    "PolymerState",
    "init_state",
    "advance",
    "iterate_polymer",
    "run_polymer",
    "free_energy",
    "endpoint_distribution",
    "checkpoint_grid",
    "DEFAULT_TAU_REL",
    "DEFAULT_LEDGER_WARN",
    "brute_force_endpoint",
    "brute_force_log_Z",
    "brute_force_pmf",
    "shift_identity_check",
    "ReplicaResults",
    "run_replicas",
    "scan_replicas",
    "summarize_series",
    "annealed_ratio",
]
