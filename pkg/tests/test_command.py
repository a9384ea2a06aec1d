"""
Test suite for subcommand objects.
"""
import unittest
from unittest.mock import Mock

from command import CountCommand, GenusCountCommand, MomentsCommand, OracleCommand, SchemesCommand
from config import AppConfig
from mapdeg.degrees import parse_degree_spec
from mapdeg.enumerator import CountTable
from mapdeg.errors import SpecValidationError
from mapdeg.moments import MomentService
from service_factory import ServiceFactory


class TestCommands(unittest.TestCase):
    """Test cases for Command.execute() results."""

    def setUp(self):
        """Set up services from the default configuration."""
        self.config = AppConfig(oracle_max_edges=4)

    def test_count_rows(self):
        """Test count rows start at n = 1."""
        command = CountCommand(ServiceFactory.create_enumerator(self.config), parse_degree_spec("4"), 4)
        result = command.execute()
        self.assertEqual(result["result"]["counts"], [0, 2, 0, 9])
        self.assertEqual(result["result"]["dbar"], 2)
        self.assertEqual(result["rows"][1], {"n": 2, "count": 2})

    def test_genus_count_with_mock_counter(self):
        """Test that GenusCountCommand drops the n = 0 entry."""
        spec = parse_degree_spec("even")
        counter = Mock()
        counter.count.return_value = CountTable(spec=spec, counts=[0, 0, 0, 1, 15], genus=1)
        result = GenusCountCommand(counter, spec, 4).execute()
        counter.count.assert_called_once_with(spec, 4, 1)
        self.assertEqual(result["result"]["counts"], [0, 0, 1, 15])
        self.assertEqual(result["result"]["method"], "exact")

    def test_genus_count_keeps_quadrature_floats(self):
        """Test that quadrature counts are reported as floats with their method."""
        spec = parse_degree_spec("even")
        counter = Mock()
        counter.count.return_value = CountTable(spec=spec, counts=[0, 0.0, 0.0, 1.0000000002, 14.999999999],
                                                genus=1, method="quadrature")
        result = GenusCountCommand(counter, spec, 4).execute()
        self.assertEqual(result["result"]["method"], "quadrature")
        self.assertEqual(result["result"]["counts"][2:], [1.0000000002, 14.999999999])

    def test_moments_audits_all_maps(self):
        """Test that D = all moments carry audit findings and numeric direction rows."""
        spec = parse_degree_spec("all")
        report = MomentService(ServiceFactory.create_solver(self.config)).mu_sigma_allmaps(cutoff=3)
        moments = Mock()
        moments.mu_sigma_allmaps.return_value = report

        def audit(spec, closed, rows):
            closed.findings.append("sigma[1,1]: closed form 0.09722 vs numeric 0.125")
            return {d: 0.0 for d in rows}

        moments.audit_allmaps.side_effect = audit
        result = MomentsCommand(moments, spec, cutoff=3).execute()
        moments.audit_allmaps.assert_called_once_with(spec, report, [1, 2, 3])
        self.assertEqual(result["result"]["findings"], ["sigma[1,1]: closed form 0.09722 vs numeric 0.125"])
        self.assertEqual(result["result"]["degenerate_direction"], {"1": 0.0, "2": 0.0, "3": 0.0})
        self.assertEqual(len(result["rows"]), 3)

    def test_oracle_filtered(self):
        """Test the filtered oracle count for bipartite genus-1 quadrangulations."""
        oracle = ServiceFactory.create_oracle(self.config)
        result = OracleCommand(oracle, 4, genus=1, spec=parse_degree_spec("4")).execute()
        self.assertEqual(result["result"]["filtered"], 1)
        self.assertEqual(result["result"]["by_genus"], {"0": 378, "1": 307, "2": 21})

    def test_oracle_guard(self):
        """Test that OracleCommand enforces the configured size."""
        oracle = ServiceFactory.create_oracle(self.config)
        with self.assertRaises(SpecValidationError):
            OracleCommand(oracle, 5).execute()

    def test_schemes(self):
        """Test the genus-1 scheme listing."""
        result = SchemesCommand(1).execute()
        self.assertEqual(result["result"]["count"], 6)
        self.assertEqual(result["result"]["cubic_formula"], 1)
        self.assertEqual({row["colours"] for row in result["rows"]}, {"w", "b", "ww", "wb", "bw", "bb"})

    def test_factory_injects_guards(self):
        """Test that limits flow from AppConfig into the services."""
        config = AppConfig(max_order_genus=12, threads=2)
        counter = ServiceFactory.create_genus_counter(config)
        self.assertEqual(counter.max_order, 12)
        self.assertEqual(counter.threads, 2)
        self.assertEqual(ServiceFactory.create_series_engine(config).max_order_general, 80)


if __name__ == "__main__":
    unittest.main()
