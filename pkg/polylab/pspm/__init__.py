from .pspm import (
    Pspm,
    EmpiricalMeasure,
    embed,
    level_pmf,
    translate,
    truncate,
    canonical_form,
    recover_orbit,
)
from .isometry import (
    Isometry,
    identity_isometry,
    degree,
    compose,
    extend_isometry,
)
from .metric_functions import (
    d_alpha_phi,
    d_alpha_exact,
    optimal_isometry,
    d_alpha_upper,
    upper_isometry,
    equivalence_delta,
)
from .wasserstein import distance, distance_matrix, wasserstein

__all__ = [
    "Pspm",
    "EmpiricalMeasure",
    "embed",
    "level_pmf",
    "translate",
    "truncate",
    "canonical_form",
    "recover_orbit",
    "Isometry",
    "identity_isometry",
    "degree",
    "compose",
    "extend_isometry",
    "d_alpha_phi",
    "d_alpha_exact",
    "optimal_isometry",
    "d_alpha_upper",
    "upper_isometry",
    "equivalence_delta",
    "distance",
    "distance_matrix",
    "wasserstein",
]
