# Standard Library Imports
import datetime
import hashlib
import json
import os
import pathlib
import shutil
import unittest

# Local Imports
from polylab.experiments import file_digest, verify_manifest, write_manifest
from polylab.experiments.manifest import MANIFEST_NAME

# Setup BASE_PATH
BASE_PATH = pathlib.Path(__file__).parent.parent


class TestManifest(unittest.TestCase):
    @classmethod
    def setUpClass(cls):
        cls.tmp_path = BASE_PATH / "tmp_manifest"
        os.mkdir(cls.tmp_path)

    def tearDown(self):
        for filename in os.listdir(self.tmp_path):
            os.remove(self.tmp_path / filename)

    @classmethod
    def tearDownClass(cls):
        os.rmdir(cls.tmp_path)

    def write(self, name: str, text: str) -> pathlib.Path:
        path = self.tmp_path / name
        with open(path, "w") as f:
            f.write(text)
        return path

    def test_digest(self):
        path = self.write("a.csv", "x,y\n1,2\n")
        self.assertEqual(file_digest(path), hashlib.sha256(b"x,y\n1,2\n").hexdigest())

    def test_write_and_verify(self):
        files = [self.write("a.csv", "x\n1\n"), self.write("b.jsonl", '{"x": 1}\n')]
        started = datetime.datetime.now(datetime.timezone.utc)
        path = write_manifest(
            self.tmp_path, "simulate", {"n": 4}, files, seeds=[3, 5], started=started
        )
        self.assertEqual(path, self.tmp_path / MANIFEST_NAME)
        with open(path, "r") as f:
            manifest = json.load(f)
        self.assertEqual(manifest["command"], "simulate")
        self.assertEqual(manifest["config"], {"n": 4})
        self.assertEqual(manifest["seeds"], [3, 5])
        self.assertEqual(manifest["started"], started.isoformat())
        self.assertGreaterEqual(manifest["wall_clock"], 0.0)
        self.assertEqual(set(manifest["files"]), {"a.csv", "b.jsonl"})
        self.assertEqual(verify_manifest(self.tmp_path), {"a.csv": True, "b.jsonl": True})

    def test_detects_changes(self):
        files = [self.write("a.csv", "x\n1\n"), self.write("b.csv", "y\n2\n")]
        path = write_manifest(self.tmp_path, "scan", {}, files)
        self.write("a.csv", "x\n2\n")
        os.remove(self.tmp_path / "b.csv")
        self.assertEqual(verify_manifest(path), {"a.csv": False, "b.csv": False})

    def test_large_seeds(self):
        files = [self.write("a.csv", "x\n")]
        write_manifest(self.tmp_path, "chain", {}, files, seeds=[2**64 - 1])
        with open(self.tmp_path / MANIFEST_NAME, "r") as f:
            self.assertEqual(json.load(f)["seeds"], [2**64 - 1])


class TestNestedOutput(unittest.TestCase):
    def test_nested_directory(self):
        tmp_path = BASE_PATH / "tmp_manifest_tree"
        (tmp_path / "nested").mkdir(parents=True)
        try:
            path = tmp_path / "nested" / "a.csv"
            path.write_text("x\n")
            write_manifest(tmp_path / "nested", "oracle", {}, [path])
            self.assertEqual(verify_manifest(tmp_path / "nested"), {"a.csv": True})
        finally:
            shutil.rmtree(tmp_path)


if __name__ == "__main__":
    unittest.main()
