from .step_distribution import (
    StepDistribution,
    srw,
    power_law_1d,
    custom_walk,
    walk_from_config,
    entropy,
    max_step_prob,
    n_step_marginal,
)

__all__ = [
    "StepDistribution",
    "srw",
    "power_law_1d",
    "custom_walk",
    "walk_from_config",
    "entropy",
    "max_step_prob",
    "n_step_marginal",
]
