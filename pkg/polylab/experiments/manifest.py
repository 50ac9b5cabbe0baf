"""
Run manifests: a JSON record written next to the outputs of every command, echoing
the configuration, the seeds, timings, and a SHA-256 digest of every output file.
"""

# Standard Library Imports
from __future__ import annotations
import datetime
import hashlib
import json
import pathlib
from dataclasses import asdict, dataclass, field
from importlib.metadata import PackageNotFoundError, version
from typing import Any, Dict, List, Mapping, Sequence, Union

MANIFEST_NAME = "manifest.json"
_READ_CHUNK = 2**20


@dataclass
class RunManifest:
    """
    Record of one command run

    :param command: Name of the command
    :type command: str
    :param config: Echo of the configuration
    :type config: Mapping[str, Any]
    :param version: Version of polylab that produced the outputs
    :type version: str
    :param seeds: Field seeds used by the run
    :type seeds: List[int]
    :param started: ISO 8601 start time (UTC)
    :type started: str
    :param wall_clock: Elapsed seconds
    :type wall_clock: float
    :param files: SHA-256 digest of each output file, keyed by file name
    :type files: Dict[str, str]
    """

    command: str
    config: Mapping[str, Any]
    version: str
    seeds: List[int] = field(default_factory=list)
    started: str = ""
    wall_clock: float = 0.0
    files: Dict[str, str] = field(default_factory=dict)


def file_digest(path: Union[str, pathlib.Path]) -> str:
    """SHA-256 hex digest of a file"""
    digest = hashlib.sha256()
    with open(path, "rb") as f:
        for chunk in iter(lambda: f.read(_READ_CHUNK), b""):
            digest.update(chunk)
    return digest.hexdigest()


def polylab_version() -> str:
    try:
        return version("polylab")
    except PackageNotFoundError:
        return "unknown"


def now() -> datetime.datetime:
    return datetime.datetime.now(datetime.timezone.utc)


def write_manifest(
    out_dir: Union[str, pathlib.Path],
    command: str,
    config: Mapping[str, Any],
    files: Sequence[pathlib.Path],
    seeds: Sequence[int] = (),
    started: datetime.datetime = None,
) -> pathlib.Path:
    """
    Write the manifest of a run into its output directory

    :param out_dir: Output directory
    :type out_dir: Union[str, pathlib.Path]
    :param command: Name of the command
    :type command: str
    :param config: Configuration echo
    :type config: Mapping[str, Any]
    :param files: Output files to digest
    :type files: Sequence[pathlib.Path]
    :param seeds: Field seeds used by the run
    :type seeds: Sequence[int]
    :param started: Start time of the run, defaults to now
    :type started: datetime.datetime
    :return: Path of the manifest
    :rtype: pathlib.Path
    """
    out_dir = pathlib.Path(out_dir)
    finished = now()
    started = finished if started is None else started
    manifest = RunManifest(
        command=command,
        config=dict(config),
        version=polylab_version(),
        seeds=[int(s) for s in seeds],
        started=started.isoformat(),
        wall_clock=(finished - started).total_seconds(),
        files={pathlib.Path(p).name: file_digest(p) for p in files},
    )
    path = out_dir / MANIFEST_NAME
    with open(path, "w") as f:
        json.dump(asdict(manifest), f, indent=2)
    return path


def verify_manifest(path: Union[str, pathlib.Path]) -> Dict[str, bool]:
    """
    Recompute the digests listed in a manifest

    :param path: Path of a manifest, or of the directory holding it
    :type path: Union[str, pathlib.Path]
    :return: Whether each listed file exists and matches its digest
    :rtype: Dict[str, bool]
    """
    path = pathlib.Path(path)
    if path.is_dir():
        path = path / MANIFEST_NAME
    with open(path, "r") as f:
        manifest = json.load(f)
    results = {}
    for name, digest in manifest["files"].items():
        target = path.parent / name
        results[name] = target.exists() and file_digest(target) == digest
    return results
