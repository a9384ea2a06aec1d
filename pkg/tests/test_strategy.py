"""
Test suite for the JSON and CSV output strategies.
"""
import csv
import io
import json
import os
import tempfile
import unittest
from fractions import Fraction

import numpy as np

from config import AppConfig, RunConfig
from strategy import CsvOutputStrategy, JsonOutputStrategy, create_output_strategy


class TestOutputStrategies(unittest.TestCase):
    """Test cases for document rendering."""

    def setUp(self):
        """Set up a result dictionary and configs."""
        self.app_config = AppConfig()
        self.result = {
            "result": {"spec": "4", "counts": [0, 2, 0, 9], "ratio": Fraction(1, 3),
                       "vector": np.array([1.5, 2.5])},
            "columns": ["n", "count"],
            "rows": [{"n": 1, "count": 0}, {"n": 2, "count": 2}, {"n": 3, "count": 0.1}],
        }

    def test_factory(self):
        """Test strategy selection by format."""
        json_run = RunConfig(subcommand="count", format="json")
        csv_run = RunConfig(subcommand="count", format="csv")
        self.assertIsInstance(create_output_strategy(json_run, self.app_config), JsonOutputStrategy)
        self.assertIsInstance(create_output_strategy(csv_run, self.app_config), CsvOutputStrategy)

    def test_json_document(self):
        """Test the versioned JSON document."""
        run = RunConfig(subcommand="count", degrees="4", n=3, seed=7)
        text = JsonOutputStrategy(run, self.app_config).write(self.result)
        self.assertTrue(text.endswith("\n"))
        document = json.loads(text)
        self.assertEqual(document["schema_version"], "1.0")
        self.assertEqual(document["command"], "count")
        self.assertEqual(document["seed"], 7)
        self.assertEqual(document["config"]["run"]["n"], 3)
        self.assertEqual(document["config"]["app"]["max_order_general"], 80)
        self.assertEqual(document["result"]["ratio"], "1/3")
        self.assertEqual(document["result"]["vector"], [1.5, 2.5])
        self.assertEqual(len(document["rows"]), 3)
        self.assertIn("generated_at", document)

    def test_json_keys_sorted(self):
        """Test that top-level keys come out sorted."""
        run = RunConfig(subcommand="count")
        document = json.loads(JsonOutputStrategy(run, self.app_config).render(self.result))
        self.assertEqual(list(document), sorted(document))

    def test_csv_document(self):
        """Test the CSV header, UNIX newlines and float cells."""
        run = RunConfig(subcommand="count", format="csv")
        text = CsvOutputStrategy(run, self.app_config).render(self.result)
        self.assertNotIn("\r", text)
        rows = list(csv.reader(io.StringIO(text)))
        self.assertEqual(rows[0], ["n", "count"])
        self.assertEqual(rows[2], ["2", "2"])
        self.assertEqual(rows[3], ["3", "0.1"])

    def test_write_to_file(self):
        """Test that --out writes the file and returns nothing."""
        with tempfile.TemporaryDirectory() as tmp:
            path = os.path.join(tmp, "out.json")
            run = RunConfig(subcommand="count", out=path)
            self.assertIsNone(JsonOutputStrategy(run, self.app_config).write(self.result))
            with open(path, encoding="utf-8") as f:
                self.assertEqual(json.load(f)["result"]["spec"], "4")


if __name__ == "__main__":
    unittest.main()
