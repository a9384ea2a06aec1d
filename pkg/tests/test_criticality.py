"""
Test suite for critical points, the q-Boltzmann check and tightness diagnostics.
"""
import math
import unittest

from mapdeg.criticality import CriticalSolver, bridge_sums, characteristic_value, convergence_margin
from mapdeg.degrees import parse_degree_spec
from mapdeg.errors import SpecValidationError


class TestBipartiteCritical(unittest.TestCase):
    """Test cases for the single-equation bipartite route."""

    def setUp(self):
        """Set up the solver."""
        self.solver = CriticalSolver()

    def test_all_even(self):
        """Test (R0, z0) = (3/16, 1/8) for all even degrees."""
        point = self.solver.solve(parse_degree_spec("even"))
        self.assertEqual(point.kind, "bipartite")
        self.assertAlmostEqual(point.R0, 0.1875, delta=1e-10)
        self.assertAlmostEqual(point.z0, 0.125, delta=1e-10)
        self.assertAlmostEqual(point.growth, 8.0, delta=1e-8)

    def test_quadrangulations(self):
        """Test z0 = sqrt(3)/6 for D = {4}."""
        point = self.solver.solve(parse_degree_spec("4"))
        self.assertAlmostEqual(point.z0, math.sqrt(3) / 6, delta=1e-10)
        self.assertEqual(point.dbar, 2)
        self.assertTrue(point.decimals["z0"].startswith("0.28867513459481"))

    def test_hexangulations(self):
        """Test z0 = 20^(2/3)/30 for D = {6}."""
        point = self.solver.solve(parse_degree_spec("6"))
        self.assertAlmostEqual(point.z0, 20 ** (2 / 3) / 30, delta=1e-10)

    def test_characteristic_is_one(self):
        """Test z0 F_R = 1 at the critical point."""
        point = self.solver.solve(parse_degree_spec("4,6"))
        self.assertAlmostEqual(point.characteristic, 1.0, delta=1e-12)

    def test_subcritical_R(self):
        """Test R(z) solves R = z(1 + Σ q C R^i) below z0."""
        spec = parse_degree_spec("4")
        z = 0.2
        R = self.solver.bipartite_R_at(spec, z)
        self.assertAlmostEqual(R, z * (1 + 3 * R * R), delta=1e-14)
        with self.assertRaises(SpecValidationError):
            self.solver.bipartite_R_at(spec, 0.5)


class TestGeneralCritical(unittest.TestCase):
    """Test cases for the path-following route."""

    def setUp(self):
        """Set up the solver and the D = all point."""
        self.solver = CriticalSolver()
        self.point = self.solver.solve(parse_degree_spec("all"))

    def test_all_maps(self):
        """Test (L0, R0, z0) = (1/6, 1/9, 1/12) with margin above 0.2."""
        self.assertEqual(self.point.kind, "general")
        self.assertAlmostEqual(self.point.L0, 1 / 6, delta=1e-8)
        self.assertAlmostEqual(self.point.R0, 1 / 9, delta=1e-8)
        self.assertAlmostEqual(self.point.z0, 1 / 12, delta=1e-8)
        self.assertGreater(self.point.margin, 0.2)
        self.assertAlmostEqual(self.point.margin, convergence_margin(1 / 6, 1 / 9), delta=1e-8)

    def test_characteristic_value(self):
        """Test that the characteristic equals 1 at (L0, R0, z0)."""
        sums = bridge_sums(parse_degree_spec("all"), self.point.L0, self.point.R0)
        self.assertAlmostEqual(characteristic_value(sums, self.point.z0), 1.0, delta=1e-8)

    def test_state(self):
        """Test the (L, R, z) state tuple."""
        L, R, z = self.point.state()
        self.assertEqual((L, R, z), (self.point.L0, self.point.R0, self.point.z0))

    def test_mixed_set_matches_oracle_growth(self):
        """Test D = {3, 4}: a finite set has no margin requirement and characteristic 1."""
        point = self.solver.solve(parse_degree_spec("3,4"))
        self.assertAlmostEqual(point.characteristic, 1.0, delta=1e-10)
        self.assertGreater(point.z0, 0.0)
        self.assertGreater(point.L0, 0.0)


class TestQBoltzmann(unittest.TestCase):
    """Test cases for weighted specs."""

    def setUp(self):
        """Set up the solver."""
        self.solver = CriticalSolver()

    def test_uniform_weights_reproduce_all_maps(self):
        """Test that q_i = 1 gives the D = all critical point."""
        report = self.solver.check_qboltzmann(parse_degree_spec("all", weights="uniform"))
        self.assertEqual(report.classification, "critical-ok")
        self.assertAlmostEqual(report.critical_point.z0, 1 / 12, delta=1e-10)

    def test_power_law(self):
        """Test that α = -1 is critical with a positive margin."""
        report = self.solver.check_qboltzmann(parse_degree_spec("all;weights=power:-1"))
        self.assertEqual(report.classification, "critical-ok")
        self.assertTrue(report.heuristic_critical)
        self.assertTrue(report.agrees_with_heuristic)
        self.assertGreater(report.critical_point.margin, 0.0)

    def test_rejected_spec(self):
        """Test that a bipartite-only failure is reported as rejected."""
        spec = parse_degree_spec("4")
        spec = spec.model_copy(update={"members": (2,)})
        report = self.solver.check_qboltzmann(spec)
        self.assertEqual(report.classification, "rejected")


class TestTightness(unittest.TestCase):
    """Test cases for the numeric tightness diagnostics."""

    def setUp(self):
        """Set up the solver."""
        self.solver = CriticalSolver()

    def test_all_even_passes(self):
        """Test summability and decay for all even degrees."""
        report = self.solver.tightness_diagnostics(parse_degree_spec("even"))
        self.assertTrue(report.passed)
        self.assertTrue(math.isfinite(report.sums["sum_F_x"]))

    def test_finite_set_has_no_tail(self):
        """Test that finite sets report zero tails."""
        report = self.solver.tightness_diagnostics(parse_degree_spec("4,6"))
        self.assertTrue(all(v == 0.0 for v in report.tail_bounds.values()))


if __name__ == "__main__":
    unittest.main()
