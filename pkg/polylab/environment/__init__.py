from .environment_laws import (
    EnvironmentLaw,
    gaussian,
    exponential,
    bernoulli,
    uniform,
    law_from_config,
    log_mgf,
    log_mgf_prime,
    beta_max,
    mean_eta,
    check_beta,
)
from .seeded_field import SeededField

__all__ = [
    "EnvironmentLaw",
    "gaussian",
    "exponential",
    "bernoulli",
    "uniform",
    "law_from_config",
    "log_mgf",
    "log_mgf_prime",
    "beta_max",
    "mean_eta",
    "check_beta",
    "SeededField",
]
