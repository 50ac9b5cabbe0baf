# Standard Library Imports
import json
import math
import os
import pathlib
import shutil
import unittest

# External Imports
import numpy as np
import pandas as pd

# Local Imports
from polylab.environment import gaussian
from polylab.experiments import (
    cmd_chain,
    cmd_dist,
    cmd_oracle,
    cmd_scan,
    cmd_simulate,
    isotonic_violations,
    validate_config,
    verify_manifest,
)
from polylab.polymer import run_replicas
from polylab.pspm import Pspm
from polylab.utils.polylab_exceptions import EnumerationSizeError
from polylab.walk import srw

# Setup BASE_PATH
BASE_PATH = pathlib.Path(__file__).parent.parent


class CommandTestCase(unittest.TestCase):
    tmp_name = "tmp_commands"

    @classmethod
    def setUpClass(cls):
        cls.tmp_path = BASE_PATH / cls.tmp_name
        os.mkdir(cls.tmp_path)

    @classmethod
    def tearDownClass(cls):
        shutil.rmtree(cls.tmp_path)

    def config(self, name: str, **changes):
        raw = {
            "env": {"kind": "gaussian"},
            "walk": {"kind": "srw", "d": 1},
            "beta": 1.0,
            "n": 4,
            "seeds": 2,
            "outputs": str(self.tmp_path / name),
            **changes,
        }
        return validate_config(raw)

    def assert_manifest(self, out_dir: pathlib.Path, files):
        checks = verify_manifest(out_dir)
        self.assertEqual(set(checks), {pathlib.Path(p).name for p in files})
        self.assertTrue(all(checks.values()))


class TestSimulate(CommandTestCase):
    tmp_name = "tmp_simulate"

    def test_simulate(self):
        config = self.config("run", localization={"eps": [0.2, "decay"]})
        files = cmd_simulate(config)
        names = [p.name for p in files]
        self.assertEqual(
            names,
            [
                "replicas.csv",
                "summary.jsonl",
                "localization.csv",
                "localization_summary.jsonl",
                "manifest.json",
            ],
        )
        self.assert_manifest(config.outputs, files[:-1])
        series = pd.read_csv(config.outputs / "replicas.csv")
        expected = run_replicas(srw(1), gaussian(), 1.0, 4, num_seeds=2).series
        self.assertTrue(np.allclose(series["logZ"], expected["logZ"]))
        localization = pd.read_csv(config.outputs / "localization.csv")
        self.assertEqual(len(localization), 2 * 4 * 2)
        self.assertEqual(set(localization["schedule"]), {"eps=0.2", "decay"})
        summaries = pd.read_json(
            config.outputs / "localization_summary.jsonl", lines=True
        )
        self.assertEqual(len(summaries), 4)
        self.assertTrue((summaries["n"] == 4).all())
        summary = pd.read_json(config.outputs / "summary.jsonl", lines=True)
        self.assertEqual(summary["num_seeds"].iloc[0], 2)
        self.assertEqual(summary["alpha"].iloc[0], 2.0)


class TestScan(CommandTestCase):
    tmp_name = "tmp_scan"

    def test_scan(self):
        config = self.config("scan", beta={"start": 0.5, "stop": 1.5, "count": 3})
        files = cmd_scan(config)
        self.assertEqual([p.name for p in files], ["scan.csv", "scan_summary.json", "manifest.json"])
        self.assert_manifest(config.outputs, files[:-1])
        table = pd.read_csv(config.outputs / "scan.csv")
        self.assertEqual(
            list(table.columns), ["beta", "lambda", "mean_F", "se", "gap", "lower_bound"]
        )
        self.assertTrue(np.allclose(table["beta"], [0.5, 1.0, 1.5]))
        self.assertTrue(np.allclose(table["lambda"], table["beta"] ** 2 / 2))
        with open(config.outputs / "scan_summary.json", "r") as f:
            summary = json.load(f)
        self.assertEqual(summary["n"], 4)
        self.assertLessEqual(summary["significant_violations"], summary["violations"])

    def test_isotonic_violations(self):
        gaps = np.array([0.1, 0.2, 0.15, 0.3])
        self.assertEqual(isotonic_violations(gaps, np.full(4, 0.01)), (1, 1))
        self.assertEqual(isotonic_violations(gaps, np.full(4, 0.02)), (1, 0))
        self.assertEqual(isotonic_violations(gaps, np.full(4, np.nan)), (1, 1))
        self.assertEqual(isotonic_violations(np.array([0.3]), np.array([0.1])), (0, 0))


class TestOracle(CommandTestCase):
    tmp_name = "tmp_oracle"

    def test_pass(self):
        out_dir = self.tmp_path / "pass"
        records, code = cmd_oracle(out_dir, cases=3, max_n=3)
        self.assertEqual(code, 0)
        self.assertEqual(len(records), 8)
        report = pd.read_json(out_dir / "oracle.jsonl", lines=True)
        self.assertEqual(list(report["check"]), [r["check"] for r in records])
        self.assertEqual(verify_manifest(out_dir), {"oracle.jsonl": True})

    def test_corrupt(self):
        records, code = cmd_oracle(
            self.tmp_path / "corrupt", cases=3, max_n=3, corrupt="chain_dp"
        )
        self.assertEqual(code, 1)
        statuses = {r["check"]: r["status"] for r in records}
        self.assertEqual(statuses["chain_dp"], "fail")
        self.assertEqual(statuses["path_sum"], "pass")


class TestChain(CommandTestCase):
    tmp_name = "tmp_chain"

    def test_chain(self):
        config = self.config(
            "chain",
            n=6,
            truncation={"tau_rel": None},
            chain={
                "subsample": 4,
                "energy_samples": 20,
                "keep": 6,
                "checkpoints": [2, 4, 100],
            },
        )
        files = cmd_chain(config)
        self.assertEqual(
            [p.name for p in files],
            [
                "trajectory_seed0.jsonl",
                "trajectory_seed1.jsonl",
                "chain_diagnostics.json",
                "manifest.json",
            ],
        )
        self.assert_manifest(config.outputs, files[:-1])
        trajectory = pd.read_json(config.outputs / "trajectory_seed0.jsonl", lines=True)
        self.assertEqual(list(trajectory["i"]), [1, 2, 3, 4, 5, 6])
        self.assertTrue(np.allclose(trajectory["norm"], 1.0))
        with open(config.outputs / "chain_diagnostics.json", "r") as f:
            diagnostics = json.load(f)
        summary = diagnostics["summary"]
        self.assertEqual(set(summary["mean_stationarity_gap"]), {"2", "4", "6"})
        self.assertEqual(summary["n"], 6)
        self.assertEqual(len(diagnostics["seeds"]), 2)
        first = diagnostics["seeds"][0]
        self.assertTrue(np.isclose(first["F_n"], trajectory["logRatio"].mean()))
        self.assertIsNotNone(first["fourth_moment"])
        self.assertEqual(first["dropped_mass"], 0.0)

    def test_zero_start(self):
        config = self.config(
            "zero",
            n=3,
            chain={"subsample": 2, "energy_samples": 10, "checkpoints": [3], "initial": "zero"},
        )
        cmd_chain(config)
        with open(config.outputs / "chain_diagnostics.json", "r") as f:
            summary = json.load(f)["summary"]
        self.assertTrue(np.isclose(summary["mean_F"], 0.5))
        self.assertEqual(summary["mean_stationarity_gap"], {"3": 0.0})


class TestDist(CommandTestCase):
    tmp_name = "tmp_dist"

    def write(self, name: str, f: Pspm) -> pathlib.Path:
        path = self.tmp_path / name
        with open(path, "w") as fh:
            json.dump(f.to_json(), fh)
        return path

    def test_dist(self):
        f = self.write("f.json", Pspm.from_atoms([(1, 0, 0.5), (1, 1, 0.5)]))
        g = self.write("g.json", Pspm.from_atoms([(1, 0, 0.5), (1, 2, 0.5)]))
        result = cmd_dist(f, g, alpha=2.0)
        self.assertEqual(set(result), {"d_exact", "d_upper", "degree_of_argmin"})
        self.assertTrue(np.isclose(result["d_exact"], 0.5))
        self.assertGreaterEqual(result["d_upper"], result["d_exact"] - 1e-12)
        # Matching both atoms (degree 1) and matching one atom tie at alpha=2
        self.assertIn(result["degree_of_argmin"], {1.0, math.inf})
        result = cmd_dist(f, g, alpha=3.0, exact=True)
        self.assertTrue(np.isclose(result["d_exact"], 0.25))
        self.assertEqual(result["degree_of_argmin"], math.inf)
        self_distance = cmd_dist(f, f)
        self.assertEqual(self_distance["d_exact"], 0.0)
        self.assertEqual(self_distance["degree_of_argmin"], math.inf)

    def test_upper_only(self):
        f = self.write("f.json", Pspm.from_atoms([(1, 0, 0.5), (1, 1, 0.5)]))
        g = self.write("g.json", Pspm.from_atoms([(1, 0, 0.5), (1, 2, 0.5)]))
        result = cmd_dist(f, g, alpha=3.0, exact=False)
        self.assertIsNone(result["d_exact"])
        self.assertGreaterEqual(result["d_upper"], 0.25 - 1e-12)
        self.assertGreaterEqual(result["degree_of_argmin"], 1.0)

    def test_large_supports(self):
        atoms = [(1, x, 0.1) for x in range(10)]
        f = self.write("big.json", Pspm.from_atoms(atoms))
        result = cmd_dist(f, f, alpha=2.0)
        self.assertIsNone(result["d_exact"])
        self.assertTrue(np.isclose(result["d_upper"], 0.0))
        with self.assertRaises(EnumerationSizeError):
            cmd_dist(f, f, alpha=2.0, exact=True)


if __name__ == "__main__":
    unittest.main()
