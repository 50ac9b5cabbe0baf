from .localization_functions import (
    GeoIndicator,
    SufficientCondition,
    LocalizationObserver,
    atom_set,
    atomic_mass,
    apa_average,
    geo_indicator,
    density_average,
    localization_sufficient,
    constant_schedule,
    decaying_schedule,
    schedule_from_config,
    localization_record,
    localization_series,
    localization_summary,
)

__all__ = [
    "GeoIndicator",
    "SufficientCondition",
    "LocalizationObserver",
    "atom_set",
    "atomic_mass",
    "apa_average",
    "geo_indicator",
    "density_average",
    "localization_sufficient",
    "constant_schedule",
    "decaying_schedule",
    "schedule_from_config",
    "localization_record",
    "localization_series",
    "localization_summary",
]
