"""
Experiment configuration, read from JSON files and validated into a frozen
ExperimentConfig. Every problem found is reported, each with the dotted path of the
offending key.
"""

# Standard Library Imports
from __future__ import annotations
import json
import math
import pathlib
from dataclasses import dataclass, field, replace
from typing import Any, Callable, Dict, List, Mapping, Optional, Tuple, Union

# External Imports
import numpy as np

# Local Imports
from polylab.chain import auto_alpha
from polylab.environment import EnvironmentLaw, beta_max, law_from_config
from polylab.localization import schedule_from_config
from polylab.polymer import DEFAULT_LEDGER_WARN, DEFAULT_TAU_REL
from polylab.utils._arguments import _parse_alpha
from polylab.utils.polylab_exceptions import ConfigValidationError
from polylab.walk import StepDistribution, walk_from_config

DEFAULT_EPS = (0.2, 0.05, 0.01, "decay")
DEFAULT_DELTA = 0.5
DEFAULT_K = 10
DEFAULT_OUTPUTS = "polylab_results"
DEFAULT_CHECKPOINTS = (250, 500, 1000)

TOP_LEVEL_KEYS = {
    "env",
    "walk",
    "beta",
    "n",
    "seeds",
    "alpha",
    "localization",
    "truncation",
    "chain",
    "outputs",
    "workers",
}


@dataclass(frozen=True)
class ChainSettings:
    """
    Settings of the endpoint chain diagnostics

    :param subsample: Atoms subsampled from the empirical measure
    :type subsample: int
    :param samples_per_atom: Updates sampled per subsampled atom by the
        stationarity gap
    :type samples_per_atom: int
    :param energy_samples: Environment rows per atom for the lifted energy
    :type energy_samples: int
    :param keep: Atoms are truncated to this many sites before distances
    :type keep: int
    :param checkpoints: Steps at which the stationarity gap is reported
    :type checkpoints: Tuple[int, ...]
    :param initial: Initial state, "delta" for the point mass at the origin or
        "zero" for the zero measure
    :type initial: str
    """

    subsample: int = 64
    samples_per_atom: int = 1
    energy_samples: int = 10_000
    keep: int = 32
    checkpoints: Tuple[int, ...] = DEFAULT_CHECKPOINTS
    initial: str = "delta"


@dataclass(frozen=True, eq=False)
class ExperimentConfig:
    """Validated experiment configuration"""

    law: EnvironmentLaw
    walk: StepDistribution
    betas: Tuple[float, ...]
    beta_grid: bool
    n: int
    num_seeds: int
    base_seed: int
    alpha: Union[float, str]
    eps_schedules: Tuple[Union[float, str], ...]
    delta: float
    K: int
    tau_rel: Optional[float]
    ledger_warn: float
    chain: ChainSettings
    outputs: pathlib.Path
    workers: Optional[int] = None
    raw: Mapping[str, Any] = field(default_factory=dict)

    @property
    def beta(self) -> float:
        """The inverse temperature of a single temperature experiment"""
        if len(self.betas) != 1:
            raise ConfigValidationError(
                "beta", f"must be a single value, but received a grid of {len(self.betas)}"
            )
        return self.betas[0]

    def alpha_for(self, beta: float) -> float:
        """Metric exponent used at inverse temperature beta"""
        if self.alpha == "auto":
            return auto_alpha(beta, self.law)
        return float(self.alpha)

    def schedules(self) -> Dict[str, np.ndarray]:
        """Threshold schedules by name, for steps 1..n"""
        return dict(schedule_from_config(entry, self.n) for entry in self.eps_schedules)


# region Loading
def load_config(path: Union[str, pathlib.Path]) -> ExperimentConfig:
    """
    Read and validate an experiment configuration file

    :param path: Path to a JSON configuration file
    :type path: Union[str, pathlib.Path]
    :return: Validated configuration
    :rtype: ExperimentConfig
    :raises ConfigValidationError: If the file can't be read or any key is invalid
    """
    path = pathlib.Path(path)
    try:
        with open(path, "r") as f:
            raw = json.load(f)
    except OSError as err:
        raise ConfigValidationError("config", f"could not read {path}: {err}") from err
    except json.JSONDecodeError as err:
        raise ConfigValidationError("config", f"{path} is not valid JSON: {err}") from err
    return validate_config(raw)


def validate_config(raw: Mapping[str, Any]) -> ExperimentConfig:
    """
    Validate a configuration mapping

    :param raw: Parsed configuration
    :type raw: Mapping[str, Any]
    :return: Validated configuration
    :rtype: ExperimentConfig
    :raises ConfigValidationError: Listing every problem found
    """
    if not isinstance(raw, Mapping):
        raise ConfigValidationError(
            "config", f"must be a JSON object, but received {type(raw).__name__}"
        )
    errors: List[Tuple[str, str]] = []

    def check(name: str, parser: Callable[[], Any], default: Any = None) -> Any:
        try:
            return parser()
        except ConfigValidationError as err:
            errors.extend(err.errors)
        except (TypeError, ValueError) as err:
            errors.append((name, str(err)))
        return default

    for key in raw:
        if key not in TOP_LEVEL_KEYS:
            errors.append((key, f"unknown key, expected one of {sorted(TOP_LEVEL_KEYS)}"))
    law = check("env", lambda: law_from_config(_required(raw, "env")))
    walk = check("walk", lambda: walk_from_config(_required(raw, "walk")))
    betas, beta_grid = check(
        "beta", lambda: _parse_betas(_required(raw, "beta")), (None, False)
    )
    n = check("n", lambda: _positive_int(_required(raw, "n"), "n"))
    num_seeds, base_seed = check(
        "seeds", lambda: _parse_seeds(raw.get("seeds", 1)), (None, None)
    )
    alpha = check("alpha", lambda: _parse_alpha(raw.get("alpha", "auto")))
    localization = check(
        "localization", lambda: _parse_localization(raw.get("localization", {}))
    )
    truncation = check("truncation", lambda: _parse_truncation(raw.get("truncation", {})))
    chain = check("chain", lambda: _parse_chain(raw.get("chain", {})))
    workers = check(
        "workers",
        lambda: None if raw.get("workers") is None else _positive_int(raw["workers"], "workers"),
    )
    outputs = raw.get("outputs", DEFAULT_OUTPUTS)
    if not isinstance(outputs, str) or not outputs:
        errors.append(("outputs", f"must be a directory path, but received {outputs!r}"))
    if law is not None and betas is not None:
        _check_temperatures(law, betas, alpha, errors)
    if errors:
        raise ConfigValidationError(errors[0][0], errors[0][1], errors=errors)
    eps_schedules, delta, K = localization
    tau_rel, ledger_warn = truncation
    return ExperimentConfig(
        law=law,
        walk=walk,
        betas=betas,
        beta_grid=beta_grid,
        n=n,
        num_seeds=num_seeds,
        base_seed=base_seed,
        alpha=alpha,
        eps_schedules=eps_schedules,
        delta=delta,
        K=K,
        tau_rel=tau_rel,
        ledger_warn=ledger_warn,
        chain=chain,
        outputs=pathlib.Path(outputs),
        workers=workers,
        raw=dict(raw),
    )


# endregion Loading

# region Parsers


def _required(raw: Mapping[str, Any], key: str) -> Any:
    if key not in raw:
        raise ConfigValidationError(key, "missing required key")
    return raw[key]


def _number(value: Any, name: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigValidationError(name, f"must be a number, but received {value!r}")
    if not math.isfinite(value):
        raise ConfigValidationError(name, f"must be finite, but received {value!r}")
    return float(value)


def _positive_int(value: Any, name: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int) or value < 1:
        raise ConfigValidationError(
            name, f"must be a positive integer, but received {value!r}"
        )
    return value


def _parse_betas(value: Any) -> Tuple[Tuple[float, ...], bool]:
    if isinstance(value, Mapping):
        for key in value:
            if key not in ("start", "stop", "count"):
                raise ConfigValidationError(
                    f"beta.{key}", "unknown key, expected start, stop, and count"
                )
        start = _number(_required_sub(value, "beta", "start"), "beta.start")
        stop = _number(_required_sub(value, "beta", "stop"), "beta.stop")
        count = _positive_int(_required_sub(value, "beta", "count"), "beta.count")
        if count > 1 and not stop > start:
            raise ConfigValidationError(
                "beta.stop", f"must be greater than start={start}, but received {stop}"
            )
        return tuple(float(b) for b in np.linspace(start, stop, count)), True
    return (_number(value, "beta"),), False


def _required_sub(value: Mapping[str, Any], prefix: str, key: str) -> Any:
    if key not in value:
        raise ConfigValidationError(f"{prefix}.{key}", "missing required key")
    return value[key]


def _parse_seeds(value: Any) -> Tuple[int, int]:
    if isinstance(value, Mapping):
        for key in value:
            if key not in ("count", "base"):
                raise ConfigValidationError(
                    f"seeds.{key}", "unknown key, expected count and base"
                )
        count = _positive_int(_required_sub(value, "seeds", "count"), "seeds.count")
        base = value.get("base", 0)
        if isinstance(base, bool) or not isinstance(base, int) or base < 0:
            raise ConfigValidationError(
                "seeds.base", f"must be a non-negative integer, but received {base!r}"
            )
        return count, base
    return _positive_int(value, "seeds"), 0


def _parse_localization(value: Any) -> Tuple[Tuple[Union[float, str], ...], float, int]:
    if not isinstance(value, Mapping):
        raise ConfigValidationError("localization", "must be a mapping")
    for key in value:
        if key not in ("eps", "delta", "K"):
            raise ConfigValidationError(
                f"localization.{key}", "unknown key, expected eps, delta, and K"
            )
    eps = value.get("eps", list(DEFAULT_EPS))
    if not isinstance(eps, list) or not eps:
        raise ConfigValidationError(
            "localization.eps", f"must be a non-empty list, but received {eps!r}"
        )
    for entry in eps:
        try:
            schedule_from_config(entry, 1)
        except ValueError as err:
            raise ConfigValidationError("localization.eps", str(err)) from err
    delta = _number(value.get("delta", DEFAULT_DELTA), "localization.delta")
    if not 0.0 < delta < 1.0:
        raise ConfigValidationError(
            "localization.delta", f"must be strictly between 0 and 1, but received {delta}"
        )
    K = value.get("K", DEFAULT_K)
    if isinstance(K, bool) or not isinstance(K, int) or K < 0:
        raise ConfigValidationError(
            "localization.K", f"must be a non-negative integer, but received {K!r}"
        )
    return tuple(eps), delta, K


def _parse_truncation(value: Any) -> Tuple[Optional[float], float]:
    if not isinstance(value, Mapping):
        raise ConfigValidationError("truncation", "must be a mapping")
    for key in value:
        if key not in ("tau_rel", "ledger_warn"):
            raise ConfigValidationError(
                f"truncation.{key}", "unknown key, expected tau_rel and ledger_warn"
            )
    tau_rel = value.get("tau_rel", DEFAULT_TAU_REL)
    if tau_rel is not None:
        tau_rel = _number(tau_rel, "truncation.tau_rel")
        if not 0.0 <= tau_rel < 1.0:
            raise ConfigValidationError(
                "truncation.tau_rel", f"must be in [0, 1), but received {tau_rel}"
            )
    ledger_warn = _number(
        value.get("ledger_warn", DEFAULT_LEDGER_WARN), "truncation.ledger_warn"
    )
    if ledger_warn < 0.0:
        raise ConfigValidationError(
            "truncation.ledger_warn", f"must be non-negative, but received {ledger_warn}"
        )
    return tau_rel or None, ledger_warn


def _parse_chain(value: Any) -> ChainSettings:
    if not isinstance(value, Mapping):
        raise ConfigValidationError("chain", "must be a mapping")
    settings = {}
    for key, given in value.items():
        if key in ("subsample", "samples_per_atom", "keep"):
            settings[key] = _positive_int(given, f"chain.{key}")
        elif key == "energy_samples":
            settings[key] = _positive_int(given, "chain.energy_samples")
            if settings[key] < 2:
                raise ConfigValidationError(
                    "chain.energy_samples", f"must be at least 2, but received {given}"
                )
        elif key == "checkpoints":
            if not isinstance(given, list):
                raise ConfigValidationError(
                    "chain.checkpoints", f"must be a list, but received {given!r}"
                )
            settings[key] = tuple(
                sorted(_positive_int(c, "chain.checkpoints") for c in given)
            )
        elif key == "initial":
            if given not in ("delta", "zero"):
                raise ConfigValidationError(
                    "chain.initial", f"must be 'delta' or 'zero', but received {given!r}"
                )
            settings[key] = given
        else:
            raise ConfigValidationError(f"chain.{key}", "unknown key")
    return replace(ChainSettings(), **settings)


def _check_temperatures(
    law: EnvironmentLaw,
    betas: Tuple[float, ...],
    alpha: Optional[Union[float, str]],
    errors: List[Tuple[str, str]],
):
    b_max = beta_max(law)
    outside = [b for b in betas if not 0.0 < b < b_max]
    if outside:
        errors.append(
            ("beta", f"values must be in (0, beta_max={b_max}), offending points {outside}")
        )
    if isinstance(alpha, float):
        too_large = [b for b in betas if 0.0 < b < b_max and not alpha * b < b_max]
        if too_large:
            errors.append(
                (
                    "alpha",
                    f"alpha * beta must be less than beta_max={b_max}, offending beta "
                    f"values {too_large}",
                )
            )


# endregion Parsers
