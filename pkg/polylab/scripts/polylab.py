"""
Command line interface for running directed polymer experiments
"""

# Imports
# Standard Library Imports
from __future__ import annotations
import argparse
import json
import pathlib
import sys
from dataclasses import replace
from typing import List, Optional

# Local Imports
from polylab.experiments import (
    cmd_chain,
    cmd_dist,
    cmd_oracle,
    cmd_scan,
    cmd_simulate,
    load_config,
)
from polylab.experiments.config import ExperimentConfig
from polylab.experiments.oracle_suite import CORRUPTIBLE
from polylab.polymer.path_oracle import MAX_PATHS
from polylab.utils.polylab_exceptions import ConfigValidationError

EXIT_SUCCESS = 0
EXIT_RUNTIME = 1
EXIT_CONFIG = 2


# region Parse Arguments
def parse_args(arg_list: Optional[List[str]]) -> argparse.Namespace:
    """
    Parse Command line arguments

    :param arg_list: List of command line strings (defaults to reading from stdin)
    :type arg_list: list[str]|None
    :return: Parsed arguments
    :rtype: argparse.Namespace
    """
    toplevel_parser = argparse.ArgumentParser(
        prog="polylab",
        description="Simulate directed polymers in random environments, and study "
        "their endpoint distributions on the space of partitioned subprobability "
        "measures",
    )
    subparsers = toplevel_parser.add_subparsers(dest="command", required=True)

    # region Experiment Args
    for name, func, help_str in (
        (
            "simulate",
            run_simulate,
            "Run polymer replicas at a single inverse temperature, writing free "
            "energy and localization series",
        ),
        (
            "scan",
            run_scan,
            "Run polymer replicas over a grid of inverse temperatures, writing the "
            "free energy gap table",
        ),
        (
            "chain",
            run_chain_command,
            "Run the endpoint chain, writing trajectories and stationarity "
            "diagnostics",
        ),
    ):
        sub = subparsers.add_parser(name, help=help_str, description=help_str)
        sub.add_argument(
            "-c",
            "--config",
            dest="config_file",
            required=True,
            type=str,
            help="Path to the JSON experiment configuration",
        )
        sub.add_argument(
            "-o",
            "--outputs",
            dest="outputs",
            default=None,
            type=str,
            help="Output directory, overrides the 'outputs' key of the configuration",
        )
        sub.add_argument(
            "-p",
            "--processes",
            dest="processes",
            default=None,
            type=int,
            help="Number of worker processes, used when neither the POLYLAB_WORKERS "
            "environment variable nor the 'workers' configuration key is set",
        )
        sub.add_argument(
            "-v",
            "--verbose",
            dest="verbose",
            action="store_true",
            help="Print progress messages and display progress bars",
        )
        sub.set_defaults(func=func)
    # endregion Experiment Args

    # region Oracle Args
    oracle_parser = subparsers.add_parser(
        "oracle",
        help="Run the exact identity checks on small random instances",
        description="Run the exact identity checks on small random instances, exits "
        "with 1 if any check fails",
    )
    oracle_parser.add_argument(
        "-o",
        "--outputs",
        dest="outputs",
        default="polylab_oracle",
        type=str,
        help="Output directory for oracle.jsonl and the manifest",
    )
    oracle_parser.add_argument(
        "--cases", dest="cases", default=20, type=int, help="Instances per check"
    )
    oracle_parser.add_argument(
        "--max-n",
        dest="max_n",
        default=6,
        type=int,
        help="Largest number of polymer steps of an instance",
    )
    oracle_parser.add_argument(
        "--seed", dest="seed", default=0, type=int, help="Base seed of the instances"
    )
    oracle_parser.add_argument(
        "--max-paths",
        dest="max_paths",
        default=MAX_PATHS,
        type=int,
        help="Path enumeration guard, instances over it are skipped",
    )
    oracle_parser.add_argument(
        "--corrupt",
        dest="corrupt",
        default=None,
        choices=CORRUPTIBLE,
        help=argparse.SUPPRESS,
    )
    oracle_parser.add_argument(
        "-v",
        "--verbose",
        dest="verbose",
        action="store_true",
        help="Print the result of every check",
    )
    oracle_parser.set_defaults(func=run_oracle)
    # endregion Oracle Args

    # region Distance Args
    dist_parser = subparsers.add_parser(
        "dist",
        help="Distance between two Pspms stored as JSON",
        description="Print the exact alpha-distance, its heuristic upper bound, and "
        "the degree of the minimizing isometry as a JSON object, for two Pspms stored "
        'as JSON files of the form {"d": 1, "atoms": [[level, [x], mass], ...]}',
    )
    dist_parser.add_argument("f_file", type=str, help="Path to the first Pspm")
    dist_parser.add_argument("g_file", type=str, help="Path to the second Pspm")
    dist_parser.add_argument(
        "--alpha", dest="alpha", default=2.0, type=float, help="Exponent, above 1"
    )
    dist_parser.add_argument(
        "--exact",
        dest="exact",
        action="store_true",
        help="Require the exact distance (small supports only), by default it is "
        "computed whenever both supports are small enough",
    )
    dist_parser.add_argument(
        "--upper",
        dest="upper",
        action="store_true",
        help="Skip the exact distance and report only the heuristic upper bound",
    )
    dist_parser.add_argument(
        "-v", "--verbose", dest="verbose", action="store_true", help=argparse.SUPPRESS
    )
    dist_parser.set_defaults(func=run_dist)
    # endregion Distance Args
    return toplevel_parser.parse_args(arg_list)


# endregion Parse Arguments

# region Run Functions


def _load(args: argparse.Namespace) -> ExperimentConfig:
    if args.verbose:
        print(f"Reading configuration {args.config_file}", file=sys.stderr)
    config = load_config(args.config_file)
    if args.outputs is not None:
        config = _with_outputs(config, args.outputs)
    return config


def _with_outputs(config: ExperimentConfig, outputs: str) -> ExperimentConfig:
    return replace(config, outputs=pathlib.Path(outputs))


def run_simulate(args: argparse.Namespace) -> int:
    config = _load(args)
    cmd_simulate(config, args.processes, progress_bar=args.verbose, verbose=args.verbose)
    return EXIT_SUCCESS


def run_scan(args: argparse.Namespace) -> int:
    config = _load(args)
    cmd_scan(config, args.processes, progress_bar=args.verbose, verbose=args.verbose)
    return EXIT_SUCCESS


def run_chain_command(args: argparse.Namespace) -> int:
    config = _load(args)
    cmd_chain(config, args.processes, progress_bar=args.verbose, verbose=args.verbose)
    return EXIT_SUCCESS


def run_oracle(args: argparse.Namespace) -> int:
    records, code = cmd_oracle(
        args.outputs,
        cases=args.cases,
        max_n=args.max_n,
        seed=args.seed,
        max_paths=args.max_paths,
        corrupt=args.corrupt,
        verbose=args.verbose,
    )
    for record in records:
        if record["status"] == "fail":
            print(
                f"Check {record['check']} failed with residual {record['residual']:.3e}",
                file=sys.stderr,
            )
    return code


def run_dist(args: argparse.Namespace) -> int:
    exact = True if args.exact else (False if args.upper else None)
    print(json.dumps(cmd_dist(args.f_file, args.g_file, args.alpha, exact)))
    return EXIT_SUCCESS


# endregion Run Functions


# region Main function
def main_run(arg_list: Optional[List[str]] = None) -> None:
    """
    Function to run the command line interface, exits with 0 on success, 1 on a
    runtime failure (or a failed oracle check), and 2 on an invalid configuration

    :param arg_list: A list of arguments (defaults to reading the stdin)
    :type arg_list: list[str]|None
    :return: None
    :rtype: None
    """
    args = parse_args(arg_list)
    try:
        code = args.func(args)
    except ConfigValidationError as err:
        print(f"Invalid configuration: {err}", file=sys.stderr)
        sys.exit(EXIT_CONFIG)
    except Exception as err:
        print(f"{type(err).__name__}: {err}", file=sys.stderr)
        sys.exit(EXIT_RUNTIME)
    if code != EXIT_SUCCESS:
        sys.exit(code)


if __name__ == "__main__":
    main_run()


# endregion Main function
