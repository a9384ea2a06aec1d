"""
Test suite for application and run configuration.
"""
import os
import unittest
from unittest.mock import patch

from config import AppConfig, RunConfig
from mapdeg.errors import ConfigurationError


class TestAppConfig(unittest.TestCase):
    """Test cases for AppConfig."""

    def test_defaults(self):
        """Test the default guards."""
        config = AppConfig()
        self.assertEqual(config.max_order_bipartite, 400)
        self.assertEqual(config.max_order_general, 80)
        self.assertEqual(config.max_order_genus, 40)
        self.assertEqual(config.oracle_max_edges, 5)
        self.assertEqual(config.mp_dps, 30)

    def test_from_dict_ignores_unknown_keys(self):
        """Test that unknown keys are dropped."""
        config = AppConfig.from_dict({"threads": 4, "colour": "blue"})
        self.assertEqual(config.threads, 4)

    def test_from_dict_rejects_bad_values(self):
        """Test that constraint violations become ConfigurationError."""
        with self.assertRaises(ConfigurationError):
            AppConfig.from_dict({"threads": 0})
        with self.assertRaises(ConfigurationError):
            AppConfig.from_dict({"mp_dps": 10})

    @patch("config.load_dotenv")
    def test_from_env(self, mock_load):
        """Test MAPDEG_* overrides."""
        env = {"MAPDEG_MAX_ORDER": "25", "MAPDEG_THREADS": "3", "MAPDEG_MP_DPS": "40",
               "MAPDEG_LOG_LEVEL": "DEBUG"}
        with patch.dict(os.environ, env):
            config = AppConfig.from_env()
        mock_load.assert_called_once()
        self.assertEqual((config.max_order_bipartite, config.max_order_general, config.max_order_genus),
                         (25, 25, 25))
        self.assertEqual(config.threads, 3)
        self.assertEqual(config.mp_dps, 40)
        self.assertEqual(config.log_level, "DEBUG")

    @patch("config.load_dotenv")
    def test_from_env_invalid(self, mock_load):
        """Test that a malformed variable is a configuration error."""
        with patch.dict(os.environ, {"MAPDEG_THREADS": "many"}):
            with self.assertRaises(ConfigurationError):
                AppConfig.from_env()


class TestRunConfig(unittest.TestCase):
    """Test cases for RunConfig."""

    def test_defaults(self):
        """Test default format and genus."""
        run = RunConfig(subcommand="count", degrees="4", n=10)
        self.assertEqual(run.format, "json")
        self.assertEqual(run.genus, 1)
        self.assertIsNone(run.out)

    def test_format_is_checked(self):
        """Test that unknown formats are rejected."""
        with self.assertRaises(ValueError):
            RunConfig(subcommand="count", format="xml")


if __name__ == "__main__":
    unittest.main()
