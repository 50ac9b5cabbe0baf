"""
Simple helper functions for parsing string arguments, such as the kind of an
environment law or reference walk given in a configuration file.
"""

# Standard Library Imports
from __future__ import annotations
import re
from typing import Dict, List, Union


def _parse_str_args_dict(arg: str, arg_dict: Dict[str, List[str]]) -> str:
    """
    Function to decide which group of arguments given as values in a dictionary the
    argument matches, returns the key for that group.

    :param arg: Argument to match, matched case-insensitively against the start of
        each alias
    :type arg: str
    :param arg_dict: Dictionary defining argument groups
    :type arg_dict: Dict[str, List[str]]
    :return: Key from the dictionary representing the group
    :rtype: str
    :raises ValueError: If no group, or more than one group, could be matched
    """
    if not isinstance(arg, str) or not arg:
        raise ValueError(f"Argument must be a non-empty string, but received {arg!r}")
    lowered = arg.strip().lower()
    # An exact alias match always wins over prefix matches
    exact = [
        key
        for key, arg_list in arg_dict.items()
        if lowered in (a.lower() for a in arg_list)
    ]
    if len(exact) == 1:
        return exact[0]
    arg_regex = re.compile(r"^" + re.escape(lowered), re.IGNORECASE)
    filtered_groups = [
        key
        for key, arg_list in arg_dict.items()
        if any(arg_regex.match(a) for a in arg_list)
    ]
    if len(filtered_groups) == 1:
        return filtered_groups[0]
    raise ValueError(
        f"Argument {arg!r} could not be matched to exactly one of "
        f"{list(arg_dict)}, candidates were {filtered_groups}"
    )


def _parse_law_kind(kind: str) -> str:
    """
    Parse an environment law kind to its canonical name

    :param kind: Kind string, e.g. "normal", "Gaussian", "exp"
    :type kind: str
    :return: One of gaussian, exponential, bernoulli, or uniform
    :rtype: str
    """
    return _parse_str_args_dict(
        kind,
        {
            "gaussian": ["gaussian", "normal", "gauss"],
            "exponential": ["exponential", "exp"],
            "bernoulli": ["bernoulli", "two-point", "two_point", "binary"],
            "uniform": ["uniform"],
        },
    )


def _parse_walk_kind(kind: str) -> str:
    """
    Parse a reference walk kind to its canonical name

    :param kind: Kind string, e.g. "srw", "simple", "power_law", "levy"
    :type kind: str
    :return: One of srw, power_law, or custom
    :rtype: str
    """
    return _parse_str_args_dict(
        kind,
        {
            "srw": ["srw", "simple", "simple-random-walk", "simple_random_walk"],
            "power_law": ["power_law", "power-law", "powerlaw", "levy", "long-range"],
            "custom": ["custom", "explicit", "table"],
        },
    )


def _parse_alpha(alpha: Union[str, float, int]) -> Union[str, float]:
    """
    Parse an alpha specification, either a number greater than 1 or "auto"

    :param alpha: Alpha specification
    :type alpha: Union[str, float, int]
    :return: "auto" or the alpha value as a float
    :rtype: Union[str, float]
    """
    if isinstance(alpha, bool):
        raise ValueError(f"alpha must be a number or 'auto', but received {alpha!r}")
    if isinstance(alpha, (int, float)):
        if alpha <= 1.0:
            raise ValueError(f"alpha must be greater than 1, but received {alpha}")
        return float(alpha)
    return _parse_str_args_dict(alpha, {"auto": ["auto", "automatic"]})
