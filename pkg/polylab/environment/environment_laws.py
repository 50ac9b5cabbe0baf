"""
Laws of the i.i.d. disorder variables eta(i, x), together with their
log-moment generating functions lambda(t) = log E exp(t eta), derivatives,
admissible inverse temperature range, means, and (inverse) distribution functions.
"""

# Standard Library Imports
from __future__ import annotations
import math
from dataclasses import dataclass
from typing import Any, Dict, Mapping, Tuple

# External Imports
import numpy as np
from numpy.typing import ArrayLike
from scipy.special import logsumexp, ndtr, ndtri

# Local Imports
from polylab.utils._arguments import _parse_law_kind
from polylab.utils.polylab_exceptions import ConfigValidationError, DomainError

# Parameter names, in order, for each law kind
LAW_PARAMETERS: Dict[str, Tuple[str, ...]] = {
    "gaussian": ("mean", "sd"),
    "exponential": ("rate",),
    "bernoulli": ("p", "lo", "hi"),
    "uniform": ("lo", "hi"),
}

LAW_DEFAULTS: Dict[str, Dict[str, float]] = {
    "gaussian": {"mean": 0.0, "sd": 1.0},
    "exponential": {"rate": 1.0},
    "bernoulli": {"p": 0.5, "lo": -1.0, "hi": 1.0},
    "uniform": {"lo": -1.0, "hi": 1.0},
}

# Below this |s| the uniform log-mgf uses its Taylor expansion
_UNIFORM_SERIES_CUTOFF = 1e-6


# region Environment Law
@dataclass(frozen=True)
class EnvironmentLaw:
    """
    Law of the environment variables

    :param kind: One of gaussian, exponential, bernoulli, or uniform
    :type kind: str
    :param params: Parameters of the law, in the order given by LAW_PARAMETERS
        (gaussian: mean, sd; exponential: rate; bernoulli: p, lo, hi;
        uniform: lo, hi)
    :type params: Tuple[float, ...]

    .. note::

       Construct laws with :func:`gaussian`, :func:`exponential`,
       :func:`bernoulli`, :func:`uniform`, or :func:`law_from_config`, which
       all validate that the law is non-degenerate.
    """

    kind: str
    params: Tuple[float, ...]

    def __post_init__(self):
        if self.kind not in LAW_PARAMETERS:
            raise ValueError(
                f"Law kind must be one of {list(LAW_PARAMETERS)}, but received "
                f"{self.kind!r}"
            )
        if len(self.params) != len(LAW_PARAMETERS[self.kind]):
            raise ValueError(
                f"A {self.kind} law takes parameters {LAW_PARAMETERS[self.kind]}, "
                f"but received {self.params}"
            )
        object.__setattr__(self, "params", tuple(float(p) for p in self.params))
        _validate_params(self.kind, self.params)

    @property
    def param_dict(self) -> Dict[str, float]:
        return dict(zip(LAW_PARAMETERS[self.kind], self.params))

    def to_config(self) -> Dict[str, Any]:
        """Return the config mapping describing this law"""
        return {"kind": self.kind, **self.param_dict}

    def ppf(self, u: ArrayLike) -> np.ndarray:
        """
        Inverse cumulative distribution function

        :param u: Uniform values in (0, 1)
        :type u: ArrayLike
        :return: Quantiles of the law at u
        :rtype: np.ndarray
        """
        u = np.asarray(u, dtype=float)
        if self.kind == "gaussian":
            mean, sd = self.params
            return mean + sd * ndtri(u)
        if self.kind == "exponential":
            (rate,) = self.params
            return -np.log1p(-u) / rate
        if self.kind == "bernoulli":
            p, lo, hi = self.params
            return np.where(u > 1.0 - p, hi, lo)
        lo, hi = self.params
        return lo + (hi - lo) * u

    def cdf(self, x: ArrayLike) -> np.ndarray:
        """
        Cumulative distribution function

        :param x: Points to evaluate the distribution function at
        :type x: ArrayLike
        :return: P(eta <= x)
        :rtype: np.ndarray
        """
        x = np.asarray(x, dtype=float)
        if self.kind == "gaussian":
            mean, sd = self.params
            return ndtr((x - mean) / sd)
        if self.kind == "exponential":
            (rate,) = self.params
            return np.where(x > 0.0, -np.expm1(-rate * np.maximum(x, 0.0)), 0.0)
        if self.kind == "bernoulli":
            p, lo, hi = self.params
            return np.where(x >= hi, 1.0, np.where(x >= lo, 1.0 - p, 0.0))
        lo, hi = self.params
        return np.clip((x - lo) / (hi - lo), 0.0, 1.0)


def _validate_params(kind: str, params: Tuple[float, ...]):
    if not all(math.isfinite(p) for p in params):
        raise ValueError(f"Law parameters must be finite, but received {params}")
    if kind == "gaussian" and params[1] <= 0.0:
        raise ValueError(f"sd must be positive, but received {params[1]}")
    if kind == "exponential" and params[0] <= 0.0:
        raise ValueError(f"rate must be positive, but received {params[0]}")
    if kind == "bernoulli":
        p, lo, hi = params
        if not 0.0 < p < 1.0:
            raise ValueError(f"p must be strictly between 0 and 1, but received {p}")
        if not lo < hi:
            raise ValueError(f"lo must be less than hi, but received lo={lo}, hi={hi}")
    if kind == "uniform" and not params[0] < params[1]:
        raise ValueError(
            f"lo must be less than hi, but received lo={params[0]}, hi={params[1]}"
        )


# endregion Environment Law

# region Constructors


def gaussian(mean: float = 0.0, sd: float = 1.0) -> EnvironmentLaw:
    return EnvironmentLaw("gaussian", (mean, sd))


def exponential(rate: float = 1.0) -> EnvironmentLaw:
    return EnvironmentLaw("exponential", (rate,))


def bernoulli(p: float = 0.5, lo: float = -1.0, hi: float = 1.0) -> EnvironmentLaw:
    """Two point law, eta = hi with probability p and lo otherwise"""
    return EnvironmentLaw("bernoulli", (p, lo, hi))


def uniform(lo: float = -1.0, hi: float = 1.0) -> EnvironmentLaw:
    return EnvironmentLaw("uniform", (lo, hi))


def law_from_config(config: Mapping[str, Any]) -> EnvironmentLaw:
    """
    Create an environment law from a configuration mapping, such as
    ``{"kind": "exponential", "rate": 1.0}``

    :param config: Mapping with a ``kind`` key, and optionally the parameters of
        that kind (missing parameters take their defaults)
    :type config: Mapping[str, Any]
    :return: The environment law
    :rtype: EnvironmentLaw
    :raises ConfigValidationError: If the kind can't be parsed, a key is unknown, or
        the parameters describe a degenerate law
    """
    if not isinstance(config, Mapping):
        raise ConfigValidationError(
            "env", f"must be a mapping, but received {type(config).__name__}"
        )
    if "kind" not in config:
        raise ConfigValidationError("env.kind", "missing required key")
    try:
        kind = _parse_law_kind(config["kind"])
    except ValueError as err:
        raise ConfigValidationError("env.kind", str(err)) from err
    params = dict(LAW_DEFAULTS[kind])
    for key, value in config.items():
        if key == "kind":
            continue
        if key not in params:
            raise ConfigValidationError(
                f"env.{key}",
                f"unknown parameter for a {kind} law, expected one of "
                f"{list(LAW_PARAMETERS[kind])}",
            )
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ConfigValidationError(
                f"env.{key}", f"must be a number, but received {value!r}"
            )
        params[key] = float(value)
    try:
        return EnvironmentLaw(kind, tuple(params[k] for k in LAW_PARAMETERS[kind]))
    except ValueError as err:
        raise ConfigValidationError("env", str(err)) from err


# endregion Constructors

# region Moment Functions


def log_mgf(law: EnvironmentLaw, t: float) -> float:
    """
    Log-moment generating function lambda(t) = log E exp(t eta)

    :param law: Environment law
    :type law: EnvironmentLaw
    :param t: Argument of the log-mgf
    :type t: float
    :return: lambda(t), math.inf where the moment diverges
    :rtype: float

    .. note::

       Closed forms are, gaussian: t mean + sd^2 t^2/2; exponential(rate r):
       -log(1 - t/r) for t < r; bernoulli: log(p e^{t hi} + (1-p) e^{t lo});
       uniform: t lo + log((e^s - 1)/s) with s = t (hi - lo).
    """
    t = float(t)
    if t == 0.0:
        return 0.0
    if law.kind == "gaussian":
        mean, sd = law.params
        return t * mean + 0.5 * (sd * t) ** 2
    if law.kind == "exponential":
        (rate,) = law.params
        if t >= rate:
            return math.inf
        return -math.log1p(-t / rate)
    if law.kind == "bernoulli":
        p, lo, hi = law.params
        return float(
            logsumexp([t * hi, t * lo], b=[p, 1.0 - p]),
        )
    lo, hi = law.params
    return t * lo + _log_expm1_ratio(t * (hi - lo))


def log_mgf_prime(law: EnvironmentLaw, t: float) -> float:
    """
    Derivative of the log-moment generating function

    :param law: Environment law
    :type law: EnvironmentLaw
    :param t: Argument, must satisfy t < beta_max(law)
    :type t: float
    :return: lambda'(t)
    :rtype: float
    :raises DomainError: If t >= beta_max(law)
    """
    t = float(t)
    if t >= beta_max(law):
        raise DomainError(
            f"t must be less than beta_max={beta_max(law)} for a {law.kind} law, but "
            f"received {t}"
        )
    if law.kind == "gaussian":
        mean, sd = law.params
        return mean + sd**2 * t
    if law.kind == "exponential":
        (rate,) = law.params
        return 1.0 / (rate - t)
    if law.kind == "bernoulli":
        p, lo, hi = law.params
        lam = log_mgf(law, t)
        return hi * math.exp(math.log(p) + t * hi - lam) + lo * math.exp(
            math.log1p(-p) + t * lo - lam
        )
    lo, hi = law.params
    width = hi - lo
    s = t * width
    if abs(s) < _UNIFORM_SERIES_CUTOFF:
        return lo + width * (0.5 + s / 12.0)
    return lo + width * (1.0 / (-math.expm1(-s)) - 1.0 / s)


def beta_max(law: EnvironmentLaw) -> float:
    """
    Supremum of t >= 0 with lambda(t) and lambda(-t) both finite

    :param law: Environment law
    :type law: EnvironmentLaw
    :return: beta_max, math.inf when all exponential moments are finite
    :rtype: float
    """
    if law.kind == "exponential":
        return law.params[0]
    return math.inf


def mean_eta(law: EnvironmentLaw) -> float:
    """Expected value of the environment variable"""
    if law.kind == "gaussian":
        return law.params[0]
    if law.kind == "exponential":
        return 1.0 / law.params[0]
    if law.kind == "bernoulli":
        p, lo, hi = law.params
        return p * hi + (1.0 - p) * lo
    lo, hi = law.params
    return 0.5 * (lo + hi)


def check_beta(law: EnvironmentLaw, beta: float, name: str = "beta") -> float:
    """
    Check that 0 < beta < beta_max(law)

    :raises DomainError: If beta is outside the admissible range
    """
    beta = float(beta)
    b_max = beta_max(law)
    if not (0.0 < beta < b_max):
        raise DomainError(
            f"{name} must satisfy 0 < {name} < beta_max={b_max} for a {law.kind} "
            f"law, but received {beta}"
        )
    return beta


def _log_expm1_ratio(s: float) -> float:
    # log((e^s - 1)/s), with the removable singularity at 0
    if abs(s) < _UNIFORM_SERIES_CUTOFF:
        return s / 2.0 + s * s / 24.0
    if s > 0.0:
        return s + math.log(-math.expm1(-s)) - math.log(s)
    return math.log(-math.expm1(s)) - math.log(-s)


# endregion Moment Functions
