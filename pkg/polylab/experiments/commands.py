"""
Experiment commands: each takes a validated configuration, runs the computation,
and writes its data files and a manifest into the output directory.
"""

# Standard Library Imports
from __future__ import annotations
import functools
import json
import math
import pathlib
import sys
from typing import Any, Dict, List, Optional, Tuple, Union

# External Imports
import numpy as np
import pandas as pd

# Local Imports
from polylab.chain import (
    UpdateContext,
    fourth_moment_check,
    run_chain,
    stationarity_gap,
    trajectory_energy,
)
from polylab.experiments.config import ExperimentConfig
from polylab.experiments.manifest import now, write_manifest
from polylab.experiments.oracle_suite import FAIL, run_oracle_suite
from polylab.localization import LocalizationObserver, localization_summary
from polylab.localization.localization_functions import (
    SERIES_COLUMNS as LOCALIZATION_COLUMNS,
)
from polylab.polymer import run_replicas, scan_replicas
from polylab.polymer.path_oracle import MAX_PATHS
from polylab.pspm import Pspm, degree, optimal_isometry, upper_isometry
from polylab.pspm.metric_functions import DEFAULT_SUPPORT_CAP
from polylab.utils._parallel import (
    CHAIN_FIELD_TAG,
    ENERGY_ROWS_TAG,
    UPDATE_ROWS_TAG,
    _derive_seed,
    _ordered_map,
    _resolve_processes,
)

SCAN_COLUMNS = ["beta", "lambda", "mean_F", "se", "gap", "lower_bound"]
# Adjacent gap decreases larger than this many combined standard errors are flagged
SCAN_SE_SLACK = 3.0


# region Simulate
def cmd_simulate(
    config: ExperimentConfig,
    processes: Optional[int] = None,
    progress_bar: bool = False,
    verbose: bool = False,
) -> List[pathlib.Path]:
    """
    Run polymer replicas at a single inverse temperature, with the localization
    statistics of every endpoint distribution

    :param config: Validated configuration with a single beta
    :type config: ExperimentConfig
    :param processes: Requested number of worker processes
    :type processes: Optional[int]
    :param progress_bar: Whether to display a progress bar
    :type progress_bar: bool
    :param verbose: Whether to print stage messages to stderr
    :type verbose: bool
    :return: Paths of the files written, manifest last
    :rtype: List[pathlib.Path]
    """
    started = now()
    beta = config.beta
    out_dir = _output_dir(config)
    _say(verbose, f"Running {config.num_seeds} replicas at beta={beta}, n={config.n}")
    schedules = config.schedules()
    results = run_replicas(
        walk=config.walk,
        law=config.law,
        beta=beta,
        n=config.n,
        num_seeds=config.num_seeds,
        base_seed=config.base_seed,
        tau_rel=config.tau_rel,
        ledger_warn=config.ledger_warn,
        observer=LocalizationObserver(schedules, config.delta, config.K),
        processes=_processes(config, processes),
        progress_bar=progress_bar,
    )
    summary = {
        **results.summary,
        "alpha": config.alpha_for(beta),
        "num_seeds": config.num_seeds,
        "walk_cutoff": config.walk.cutoff,
        "walk_tail_mass": config.walk.tail_mass,
    }
    observations = results.observations[["seed", "schedule"] + LOCALIZATION_COLUMNS]
    loc_summaries = [
        {
            "seed": int(seed),
            **localization_summary(
                group, beta, schedule, config.delta, config.K, exact=config.walk.d == 1
            ),
        }
        for (seed, schedule), group in observations.groupby(
            ["seed", "schedule"], sort=False
        )
    ]
    _say(verbose, f"Writing results to {out_dir}")
    files = [
        _write_csv(results.series, out_dir / "replicas.csv"),
        _write_jsonl([summary], out_dir / "summary.jsonl"),
        _write_csv(observations, out_dir / "localization.csv"),
        _write_jsonl(loc_summaries, out_dir / "localization_summary.jsonl"),
    ]
    seeds = results.series["seed"].unique().tolist()
    return files + [
        write_manifest(out_dir, "simulate", config.raw, files, seeds, started)
    ]


# endregion Simulate

# region Scan


def cmd_scan(
    config: ExperimentConfig,
    processes: Optional[int] = None,
    progress_bar: bool = False,
    verbose: bool = False,
) -> List[pathlib.Path]:
    """
    Run replicas over the inverse temperature grid and tabulate the gap
    lambda(beta) - mean F_n, which should be non-decreasing in beta

    :param config: Validated configuration, beta may be a single value or a grid
    :type config: ExperimentConfig
    :param processes: Requested number of worker processes
    :type processes: Optional[int]
    :param progress_bar: Whether to display a progress bar
    :type progress_bar: bool
    :param verbose: Whether to print stage messages to stderr
    :type verbose: bool
    :return: Paths of the files written, manifest last
    :rtype: List[pathlib.Path]
    """
    started = now()
    out_dir = _output_dir(config)
    _say(verbose, f"Scanning {len(config.betas)} inverse temperatures, n={config.n}")
    series, table = scan_replicas(
        walk=config.walk,
        law=config.law,
        betas=config.betas,
        n=config.n,
        num_seeds=config.num_seeds,
        base_seed=config.base_seed,
        tau_rel=config.tau_rel,
        ledger_warn=config.ledger_warn,
        processes=_processes(config, processes),
        progress_bar=progress_bar,
    )
    table = table[SCAN_COLUMNS]
    violations, significant = isotonic_violations(
        table["gap"].to_numpy(), table["se"].to_numpy()
    )
    summary = {
        "betas": [float(b) for b in table["beta"]],
        "n": config.n,
        "num_seeds": config.num_seeds,
        "violations": violations,
        "significant_violations": significant,
    }
    files = [
        _write_csv(table, out_dir / "scan.csv"),
        _write_json(summary, out_dir / "scan_summary.json"),
    ]
    seeds = series["seed"].unique().tolist()
    return files + [write_manifest(out_dir, "scan", config.raw, files, seeds, started)]


def isotonic_violations(gaps: np.ndarray, ses: np.ndarray) -> Tuple[int, int]:
    """
    Count the adjacent pairs where the gap decreases, and those where the decrease
    exceeds 3 combined standard errors

    :param gaps: Gap at each inverse temperature, in increasing beta order
    :type gaps: np.ndarray
    :param ses: Standard error at each inverse temperature
    :type ses: np.ndarray
    :return: Tuple of (violations, significant violations)
    :rtype: Tuple[int, int]
    """
    gaps = np.asarray(gaps, dtype=float)
    ses = np.nan_to_num(np.asarray(ses, dtype=float))
    drops = gaps[:-1] - gaps[1:]
    slack = SCAN_SE_SLACK * np.sqrt(ses[:-1] ** 2 + ses[1:] ** 2)
    return int(np.sum(drops > 0.0)), int(np.sum(drops > slack))


# endregion Scan

# region Oracle


def cmd_oracle(
    out_dir: Union[str, pathlib.Path],
    cases: int = 20,
    max_n: int = 6,
    seed: int = 0,
    max_paths: int = MAX_PATHS,
    corrupt: Optional[str] = None,
    verbose: bool = False,
) -> Tuple[List[Dict[str, Any]], int]:
    """
    Run the exact identity suite and write a pass/fail report

    :param out_dir: Output directory
    :type out_dir: Union[str, pathlib.Path]
    :param cases: Random instances per check
    :type cases: int
    :param max_n: Largest number of polymer steps
    :type max_n: int
    :param seed: Base seed of the instances
    :type seed: int
    :param max_paths: Path enumeration guard
    :type max_paths: int
    :param corrupt: Check to run on a corrupted field seed
    :type corrupt: Optional[str]
    :param verbose: Whether to print each result to stderr
    :type verbose: bool
    :return: Tuple of the report records and the exit code, 1 if any check failed
    :rtype: Tuple[List[Dict[str, Any]], int]
    """
    started = now()
    out_dir = pathlib.Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    results = run_oracle_suite(
        cases=cases, max_n=max_n, seed=seed, max_paths=max_paths, corrupt=corrupt
    )
    records = [r._asdict() for r in results]
    for r in records:
        _say(verbose, f"{r['check']}: {r['status']} (residual {r['residual']:.3e})")
    files = [_write_jsonl(records, out_dir / "oracle.jsonl")]
    echo = {
        "cases": cases,
        "max_n": max_n,
        "seed": seed,
        "max_paths": max_paths,
        "corrupt": corrupt,
    }
    write_manifest(out_dir, "oracle", echo, files, [seed], started)
    return records, int(any(r["status"] == FAIL for r in records))


# endregion Oracle

# region Chain


def cmd_chain(
    config: ExperimentConfig,
    processes: Optional[int] = None,
    progress_bar: bool = False,
    verbose: bool = False,
) -> List[pathlib.Path]:
    """
    Run one endpoint chain per seed, writing each trajectory and the stationarity,
    variational and fourth moment diagnostics

    :param config: Validated configuration with a single beta
    :type config: ExperimentConfig
    :param processes: Requested number of worker processes, chains run in parallel
    :type processes: Optional[int]
    :param progress_bar: Whether to display a progress bar
    :type progress_bar: bool
    :param verbose: Whether to print stage messages to stderr
    :type verbose: bool
    :return: Paths of the files written, manifest last
    :rtype: List[pathlib.Path]
    """
    started = now()
    beta = config.beta
    out_dir = _output_dir(config)
    ctx = UpdateContext(
        walk=config.walk,
        beta=beta,
        law=config.law,
        alpha=config.alpha_for(beta),
        tau_rel=config.tau_rel,
    )
    _say(verbose, f"Running {config.num_seeds} chains at beta={beta}, n={config.n}")
    results = _ordered_map(
        functools.partial(_chain_worker, ctx=ctx, config=config),
        range(config.num_seeds),
        processes=_processes(config, processes),
        progress_bar=progress_bar,
    )
    files = []
    diagnostics = []
    for index, (records, diag) in enumerate(results):
        files.append(_write_jsonl(records, out_dir / f"trajectory_seed{index}.jsonl"))
        diagnostics.append(diag)
    frame = pd.DataFrame(diagnostics)
    summary = {
        "beta": beta,
        "alpha": ctx.alpha,
        "n": config.n,
        "lambda": ctx.lam,
        "mean_F": float(frame["F_n"].mean()),
        "mean_R": float(frame["R_hat"].mean()),
        "mean_abs_R_minus_F": float(frame["R_minus_F"].abs().mean()),
        "mean_stationarity_gap": {
            str(c): float(np.mean([d["stationarity_gap"][str(c)] for d in diagnostics]))
            for c in _checkpoints(config)
        },
    }
    files.append(
        _write_json(
            {"summary": summary, "seeds": diagnostics}, out_dir / "chain_diagnostics.json"
        )
    )
    seeds = [d["seed"] for d in diagnostics]
    return files + [write_manifest(out_dir, "chain", config.raw, files, seeds, started)]


def _chain_worker(
    index: int, ctx: UpdateContext, config: ExperimentConfig
) -> Tuple[List[Dict[str, Any]], Dict[str, Any]]:
    settings = config.chain
    field_seed = _derive_seed(config.base_seed, CHAIN_FIELD_TAG, index)
    initial = Pspm.zero(ctx.walk.d) if settings.initial == "zero" else None
    trajectory = run_chain(ctx, config.n, field_seed, initial, config.ledger_warn)
    update_seed = _derive_seed(config.base_seed, UPDATE_ROWS_TAG, index)
    gaps = {
        str(c): stationarity_gap(
            trajectory,
            ctx,
            m=min(settings.subsample, c + 1),
            samples_per_atom=settings.samples_per_atom,
            keep=settings.keep,
            seed=update_seed,
            upto=c,
        )
        for c in _checkpoints(config)
    }
    f_n = trajectory.free_energy()
    r_hat, r_se = trajectory_energy(
        trajectory,
        ctx,
        settings.subsample,
        settings.energy_samples,
        _derive_seed(config.base_seed, ENERGY_ROWS_TAG, index),
    )
    final = trajectory.states[-1]
    fourth = None
    if len(final) and math.isclose(final.norm, 1.0, abs_tol=1e-12):
        fourth = fourth_moment_check(
            final, ctx, settings.energy_samples, _derive_seed(field_seed, ENERGY_ROWS_TAG, 0)
        )._asdict()
    diag = {
        "seed": field_seed,
        "F_n": f_n,
        "R_hat": r_hat,
        "R_se": r_se,
        "R_minus_F": r_hat - f_n,
        "lambda_minus_F": ctx.lam - f_n,
        "stationarity_gap": gaps,
        "fourth_moment": fourth,
        "dropped_mass": float(trajectory.dropped_mass.sum()),
    }
    return trajectory.to_records(), diag


def _checkpoints(config: ExperimentConfig) -> List[int]:
    # Checkpoints beyond the run are replaced by its final step
    return sorted({min(c, config.n) for c in config.chain.checkpoints})


# endregion Chain

# region Distance


def cmd_dist(
    f_path: Union[str, pathlib.Path],
    g_path: Union[str, pathlib.Path],
    alpha: float = 2.0,
    exact: Optional[bool] = None,
    support_cap: int = DEFAULT_SUPPORT_CAP,
) -> Dict[str, Optional[float]]:
    """
    Exact distance, heuristic upper bound, and degree of the minimizing isometry
    between two Pspms stored as JSON files

    :param f_path: Path of the first Pspm
    :type f_path: Union[str, pathlib.Path]
    :param g_path: Path of the second Pspm
    :type g_path: Union[str, pathlib.Path]
    :param alpha: Exponent, greater than 1
    :type alpha: float
    :param exact: True to require the exact distance, False to skip it, None to
        compute it whenever both supports are within support_cap
    :type exact: Optional[bool]
    :param support_cap: Support size cap of the exact distance
    :type support_cap: int
    :return: Dict with keys d_exact (None when skipped), d_upper, and
        degree_of_argmin, the degree of the exact minimizer when available and of
        the upper bound map otherwise (math.inf when every pair difference is
        preserved)
    :rtype: Dict[str, Optional[float]]
    :raises EnumerationSizeError: If exact is True and a support exceeds
        support_cap
    """
    f = _read_pspm(f_path)
    g = _read_pspm(g_path)
    d_upper, argmin = upper_isometry(f, g, alpha)
    if exact is None:
        exact = len(f) <= support_cap and len(g) <= support_cap
    d_exact = None
    if exact:
        d_exact, argmin = optimal_isometry(f, g, alpha, support_cap)
    return {
        "d_exact": None if d_exact is None else float(d_exact),
        "d_upper": float(d_upper),
        "degree_of_argmin": float(degree(argmin)),
    }


def _read_pspm(path: Union[str, pathlib.Path]) -> Pspm:
    with open(path, "r") as f:
        return Pspm.from_json(json.load(f))


# endregion Distance

# region Helper Functions


def _output_dir(config: ExperimentConfig) -> pathlib.Path:
    out_dir = pathlib.Path(config.outputs)
    out_dir.mkdir(parents=True, exist_ok=True)
    return out_dir


def _processes(config: ExperimentConfig, processes: Optional[int]) -> int:
    return _resolve_processes(config.workers if config.workers is not None else processes)


def _write_csv(frame: pd.DataFrame, path: pathlib.Path) -> pathlib.Path:
    frame.to_csv(path, index=False)
    return path


def _write_jsonl(records: List[Dict[str, Any]], path: pathlib.Path) -> pathlib.Path:
    pd.DataFrame(records).to_json(path, orient="records", lines=True, double_precision=15)
    return path


def _write_json(data: Dict[str, Any], path: pathlib.Path) -> pathlib.Path:
    with open(path, "w") as f:
        json.dump(data, f, indent=2)
    return path


def _say(verbose: bool, message: str):
    if verbose:
        print(message, file=sys.stderr)


# endregion Helper Functions
