from .config import ExperimentConfig, ChainSettings, load_config, validate_config
from .manifest import RunManifest, write_manifest, verify_manifest, file_digest
from .oracle_suite import OracleResult, run_oracle_suite, CHECK_NAMES
from .commands import (
    cmd_simulate,
    cmd_scan,
    cmd_oracle,
    cmd_chain,
    cmd_dist,
    isotonic_violations,
)

__all__ = [
    "ExperimentConfig",
    "ChainSettings",
    "load_config",
    "validate_config",
    "RunManifest",
    "write_manifest",
    "verify_manifest",
    "file_digest",
    "OracleResult",
    "run_oracle_suite",
    "CHECK_NAMES",
    "cmd_simulate",
    "cmd_scan",
    "cmd_oracle",
    "cmd_chain",
    "cmd_dist",
    "isotonic_violations",
]
