from .update_map import (
    UpdateContext,
    EnvironmentRow,
    TranslatedRow,
    auto_alpha,
    apply_update,
)
from .energy_functions import (
    MomentCheck,
    energy_R,
    lifted_R,
    fourth_moment_check,
    inverse_moment_check,
)
from .endpoint_chain import (
    ChainTrajectory,
    run_chain,
    stationarity_gap,
    variational_gap,
    trajectory_energy,
)

__all__ = [
    "UpdateContext",
    "EnvironmentRow",
    "TranslatedRow",
    "auto_alpha",
    "apply_update",
    "MomentCheck",
    "energy_R",
    "lifted_R",
    "fourth_moment_check",
    "inverse_moment_check",
    "ChainTrajectory",
    "run_chain",
    "stationarity_gap",
    "variational_gap",
    "trajectory_energy",
]
