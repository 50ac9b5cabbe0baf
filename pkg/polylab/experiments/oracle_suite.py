"""
Suite of exact identity checks on small random instances: dynamic program against
path enumeration, the time-space decomposition of the partition function, the
endpoint chain against the dynamic program, the axioms of the Pspm metric, and the
assignment solution of the Wasserstein distance.
"""

# Standard Library Imports
from __future__ import annotations
import itertools
from typing import Callable, Dict, List, NamedTuple, Optional, Sequence

# External Imports
import numpy as np

# Local Imports
from polylab.chain import UpdateContext, auto_alpha, run_chain
from polylab.environment import (
    EnvironmentLaw,
    SeededField,
    bernoulli,
    beta_max,
    exponential,
    gaussian,
    uniform,
)
from polylab.polymer import (
    brute_force_log_Z,
    brute_force_pmf,
    endpoint_distribution,
    run_polymer,
    shift_identity_check,
)
from polylab.polymer.path_oracle import MAX_PATHS, _check_guard
from polylab.pspm import (
    EmpiricalMeasure,
    Pspm,
    d_alpha_exact,
    distance_matrix,
    translate,
    wasserstein,
)
from polylab.utils._parallel import ORACLE_TAG, _derive_seed
from polylab.utils.polylab_exceptions import EnumerationSizeError
from polylab.walk import StepDistribution, custom_walk, srw

ORACLE_TOL = 1e-10
METRIC_TOL = 1e-12
CHECK_NAMES = (
    "path_sum",
    "endpoint_pmf",
    "shift_identity",
    "chain_dp",
    "metric_symmetry",
    "metric_triangle",
    "metric_orbit",
    "wasserstein_assignment",
)
# Checks whose second evaluation can be given a corrupted field seed
CORRUPTIBLE = ("path_sum", "endpoint_pmf", "chain_dp")

PASS = "pass"
FAIL = "fail"
SKIPPED = "skipped"


class OracleResult(NamedTuple):
    """Outcome of one check, the residual is the largest over its cases"""

    check: str
    status: str
    residual: float
    cases: int
    detail: str = ""


class OracleCase(NamedTuple):
    walk: StepDistribution
    law: EnvironmentLaw
    beta: float
    n: int
    seed: int


# region Suite
def run_oracle_suite(
    cases: int = 20,
    max_n: int = 6,
    seed: int = 0,
    max_paths: int = MAX_PATHS,
    corrupt: Optional[str] = None,
    checks: Optional[Sequence[str]] = None,
) -> List[OracleResult]:
    """
    Run the identity checks

    :param cases: Number of random instances per check
    :type cases: int
    :param max_n: Largest number of polymer steps of an instance
    :type max_n: int
    :param seed: Base seed of the instances
    :type seed: int
    :param max_paths: Path enumeration guard, checks whose instances exceed it are
        reported as skipped
    :type max_paths: int
    :param corrupt: Name of a check whose comparison side is run on a different
        field seed, so that it must fail
    :type corrupt: Optional[str]
    :param checks: Names of the checks to run, defaults to all
    :type checks: Optional[Sequence[str]]
    :return: One result per check
    :rtype: List[OracleResult]
    """
    if corrupt is not None and corrupt not in CORRUPTIBLE:
        raise ValueError(
            f"corrupt must be one of {list(CORRUPTIBLE)}, but received {corrupt!r}"
        )
    checks = list(CHECK_NAMES) if checks is None else list(checks)
    for name in checks:
        if name not in CHECK_NAMES:
            raise ValueError(f"Unknown check {name!r}, expected one of {list(CHECK_NAMES)}")
    if cases < 1 or max_n < 1:
        raise ValueError(
            f"cases and max_n must be at least 1, but received {cases} and {max_n}"
        )
    instances = [random_case(seed, k, max_n) for k in range(cases)]
    runners: Dict[str, Callable[[], OracleResult]] = {
        "path_sum": lambda: _path_sum(instances, max_paths, corrupt == "path_sum"),
        "endpoint_pmf": lambda: _endpoint_pmf(instances, max_paths, corrupt == "endpoint_pmf"),
        "shift_identity": lambda: _shift_identity(instances, seed, max_paths),
        "chain_dp": lambda: _chain_dp(instances, corrupt == "chain_dp"),
        "metric_symmetry": lambda: _metric_symmetry(seed, cases),
        "metric_triangle": lambda: _metric_triangle(seed, cases),
        "metric_orbit": lambda: _metric_orbit(seed, cases),
        "wasserstein_assignment": lambda: _wasserstein_assignment(seed, cases),
    }
    return [runners[name]() for name in checks]


def random_case(seed: int, index: int, max_n: int) -> OracleCase:
    """
    Random small instance: a one dimensional walk with at most 4 steps, a law with
    its default parameters, beta at most 0.8 beta_max, and 1 <= n <= max_n
    """
    rng = np.random.default_rng(_derive_seed(seed, ORACLE_TAG, index))
    if rng.random() < 0.5:
        walk = srw(1)
    else:
        size = int(rng.integers(2, 5))
        offsets = rng.choice(np.arange(-2, 3), size=size, replace=False)
        probs = rng.dirichlet(np.ones(size))
        walk = custom_walk([(int(z), float(q)) for z, q in zip(offsets, probs)])
    law = [gaussian(), exponential(), bernoulli(), uniform()][int(rng.integers(0, 4))]
    beta = float(rng.uniform(0.05, min(1.5, 0.8 * beta_max(law))))
    n = int(rng.integers(1, max_n + 1))
    field_seed = int(rng.integers(0, 2**62))
    return OracleCase(walk=walk, law=law, beta=beta, n=n, seed=field_seed)


def _result(name: str, residuals: List[float], tol: float, skipped: int) -> OracleResult:
    if not residuals:
        return OracleResult(name, SKIPPED, float("nan"), 0, f"{skipped} cases over guard")
    worst = float(max(residuals))
    detail = f"{skipped} cases over guard" if skipped else ""
    return OracleResult(name, PASS if worst < tol else FAIL, worst, len(residuals), detail)


# endregion Suite

# region Polymer Checks


def _comparison_field(case: OracleCase, corrupted: bool) -> SeededField:
    return SeededField(seed=case.seed + 1 if corrupted else case.seed, law=case.law)


def _path_sum(instances, max_paths: int, corrupted: bool) -> OracleResult:
    residuals, skipped = [], 0
    for case in instances:
        try:
            _check_guard(case.walk, case.n, max_paths)
        except EnumerationSizeError:
            skipped += 1
            continue
        field = SeededField(seed=case.seed, law=case.law)
        state = run_polymer(case.walk, field, case.beta, case.n, tau_rel=None)
        exact = brute_force_log_Z(
            case.walk, _comparison_field(case, corrupted), case.beta, case.n, max_paths
        )
        residuals.append(abs(state.log_Z - exact))
    return _result("path_sum", residuals, ORACLE_TOL, skipped)


def _endpoint_pmf(instances, max_paths: int, corrupted: bool) -> OracleResult:
    residuals, skipped = [], 0
    for case in instances:
        try:
            _check_guard(case.walk, case.n, max_paths)
        except EnumerationSizeError:
            skipped += 1
            continue
        field = SeededField(seed=case.seed, law=case.law)
        dp = endpoint_distribution(
            run_polymer(case.walk, field, case.beta, case.n, tau_rel=None)
        ).as_dict()
        exact = brute_force_pmf(
            case.walk, _comparison_field(case, corrupted), case.beta, case.n, max_paths
        ).as_dict()
        tv = 0.5 * sum(abs(dp.get(x, 0.0) - exact.get(x, 0.0)) for x in set(dp) | set(exact))
        residuals.append(tv)
    return _result("endpoint_pmf", residuals, METRIC_TOL, skipped)


def _shift_identity(instances, seed: int, max_paths: int) -> OracleResult:
    residuals, skipped = [], 0
    for index, case in enumerate(instances):
        rng = np.random.default_rng(_derive_seed(seed, ORACLE_TAG, len(instances) + index))
        k = int(rng.integers(0, case.n + 1))
        field = SeededField(seed=case.seed, law=case.law)
        try:
            residuals.append(
                shift_identity_check(case.walk, field, case.beta, case.n, k, max_paths)
            )
        except EnumerationSizeError:
            skipped += 1
    return _result("shift_identity", residuals, ORACLE_TOL, skipped)


def _chain_dp(instances, corrupted: bool) -> OracleResult:
    residuals = []
    for case in instances:
        field = SeededField(seed=case.seed, law=case.law)
        state = run_polymer(case.walk, field, case.beta, case.n, tau_rel=None)
        ctx = UpdateContext(
            walk=case.walk,
            beta=case.beta,
            law=case.law,
            alpha=auto_alpha(case.beta, case.law),
        )
        trajectory = run_chain(ctx, case.n, _comparison_field(case, corrupted).seed)
        residuals.append(abs(float(trajectory.log_ratios.sum()) - state.log_Z))
    return _result("chain_dp", residuals, ORACLE_TOL, 0)


# endregion Polymer Checks

# region Metric Checks


def random_pspm(rng: np.random.Generator, max_atoms: int = 6, max_levels: int = 2) -> Pspm:
    """Random one dimensional Pspm with at most max_atoms atoms"""
    size = int(rng.integers(0, max_atoms + 1))
    if size == 0:
        return Pspm.zero(1)
    points = set()
    while len(points) < size:
        points.add((int(rng.integers(1, max_levels + 1)), int(rng.integers(-4, 5))))
    masses = rng.dirichlet(np.ones(size)) * rng.uniform(0.3, 1.0)
    return Pspm.from_atoms([(lv, x, m) for (lv, x), m in zip(sorted(points), masses)])


def _metric_rng(seed: int, purpose: int) -> np.random.Generator:
    return np.random.default_rng(_derive_seed(seed, ORACLE_TAG, 10**6 + purpose))


def _metric_symmetry(seed: int, cases: int) -> OracleResult:
    rng = _metric_rng(seed, 0)
    residuals = []
    for _ in range(cases):
        f, g = random_pspm(rng), random_pspm(rng)
        residuals.append(abs(d_alpha_exact(f, g, 2.0) - d_alpha_exact(g, f, 2.0)))
    return _result("metric_symmetry", residuals, METRIC_TOL, 0)


def _metric_triangle(seed: int, cases: int) -> OracleResult:
    rng = _metric_rng(seed, 1)
    residuals = []
    for _ in range(cases):
        f, g, h = random_pspm(rng), random_pspm(rng), random_pspm(rng)
        excess = d_alpha_exact(f, h, 2.0) - d_alpha_exact(f, g, 2.0) - d_alpha_exact(g, h, 2.0)
        residuals.append(max(excess, 0.0))
    return _result("metric_triangle", residuals, METRIC_TOL, 0)


def _metric_orbit(seed: int, cases: int) -> OracleResult:
    rng = _metric_rng(seed, 2)
    residuals = []
    for _ in range(cases):
        f = random_pspm(rng)
        levels = f.level_set()
        targets = rng.permutation(np.arange(1, len(levels) + 3))[: len(levels)]
        level_map = {lv: int(t) for lv, t in zip(levels, targets)}
        offsets = {lv: [int(rng.integers(-5, 6))] for lv in levels}
        g = translate(f, offsets=offsets, level_map=level_map)
        residuals.append(d_alpha_exact(f, g, 2.0))
    return _result("metric_orbit", residuals, METRIC_TOL, 0)


def _wasserstein_assignment(seed: int, cases: int) -> OracleResult:
    rng = _metric_rng(seed, 3)
    residuals = []
    for _ in range(cases):
        mu = EmpiricalMeasure([random_pspm(rng, max_atoms=4) for _ in range(3)])
        nu = EmpiricalMeasure([random_pspm(rng, max_atoms=4) for _ in range(3)])
        cost = distance_matrix(mu.atoms, nu.atoms, 2.0, exact=True)
        brute = min(
            sum(cost[i, p[i]] for i in range(3)) / 3.0
            for p in itertools.permutations(range(3))
        )
        residuals.append(abs(wasserstein(mu, nu, 2.0, exact=True) - brute))
    return _result("wasserstein_assignment", residuals, METRIC_TOL, 0)


# endregion Metric Checks
