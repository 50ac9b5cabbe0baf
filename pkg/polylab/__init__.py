from importlib.metadata import version

__version__ = version("polylab")
__all__ = [
    "utils",
    "environment",
    "walk",
    "polymer",
    "pspm",
    "chain",
    "localization",
    "experiments",
    "EnvironmentLaw",
    "SeededField",
    "law_from_config",
    "log_mgf",
    "StepDistribution",
    "srw",
    "power_law_1d",
    "walk_from_config",
    "run_polymer",
    "free_energy",
    "endpoint_distribution",
    "run_replicas",
    "Pspm",
    "embed",
    "distance",
    "wasserstein",
    "UpdateContext",
    "apply_update",
    "run_chain",
    "energy_R",
    "atomic_mass",
    "geo_indicator",
    "localization_sufficient",
    "load_config",
]

from polylab import (
    utils,
    environment,
    walk,
    polymer,
    pspm,
    chain,
    localization,
    experiments,
)

from polylab.environment import EnvironmentLaw, SeededField, law_from_config, log_mgf

from polylab.walk import StepDistribution, srw, power_law_1d, walk_from_config

from polylab.polymer import run_polymer, free_energy, endpoint_distribution, run_replicas

from polylab.pspm import Pspm, embed, distance, wasserstein

from polylab.chain import UpdateContext, apply_update, run_chain, energy_R

from polylab.localization import atomic_mass, geo_indicator, localization_sufficient

from polylab.experiments import load_config
