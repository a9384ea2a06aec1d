"""
Test suite for the cell, edge and vertex series of labelled mobiles.
"""
import unittest

from mapdeg.criticality import CriticalSolver
from mapdeg.degrees import parse_degree_spec
from mapdeg.errors import SpecValidationError
from mapdeg.genus.assembly import GenusCounter
from mapdeg.genus.cells import cell_coefficient, corner_cost, corner_polynomial, decay_rate_check
from mapdeg.genus.rings import ExactRing
from mapdeg.genus.schemes import BLACK, WHITE
from mapdeg.series import SeriesEngine


class TestCellCoefficients(unittest.TestCase):
    """Test cases for the closed-form coefficients."""

    def test_cell_coefficient(self):
        """Test a_{0,i} and the symmetry a_{m,i} = a_{m,-i}."""
        self.assertEqual([cell_coefficient(0, i) for i in (-1, 0, 1)], [1, 1, 1])
        self.assertEqual(cell_coefficient(0, 2), 0)
        for m in range(1, 5):
            for i in range(-m - 1, m + 2):
                self.assertEqual(cell_coefficient(m, i), cell_coefficient(m, -i))

    def test_corner_polynomial(self):
        """Test f_0 = 1 + 3y + 10y² + 35y³ and the corner cost."""
        self.assertEqual(corner_polynomial(0, 3), (1, 3, 10, 35))
        self.assertEqual(corner_cost(-3), 2)
        self.assertEqual(corner_cost(-1), 0)
        self.assertEqual(corner_cost(2), 0)


class TestCellBuilder(unittest.TestCase):
    """Test cases for CellSeries built on the exact ring."""

    def setUp(self):
        """Set up a counter and cell series for quadrangulations and all-even maps."""
        self.counter = GenusCounter(SeriesEngine())
        self.quads = self.counter.cells(parse_degree_spec("4"), 6, "exact")
        self.even = self.counter.cells(parse_degree_spec("even"), 6, "exact")

    def test_quadrangulation_cells(self):
        """Test P̃ = s^{-1} + 1 + s for D = {4}."""
        self.assertIsInstance(self.quads.ring, ExactRing)
        self.assertEqual(sorted(self.quads.P_tilde), [-1, 0, 1])
        self.assertTrue(all(v == 1 for v in self.quads.P_tilde.values()))

    def test_valuations(self):
        """Test that cells start at z² and G starts at 1."""
        self.assertEqual(self.even.valuations["G"][0], 0)
        self.assertEqual(self.even.valuations["G"][1], 2)
        self.assertGreaterEqual(min(self.even.valuations["P"].values()), 2)

    def test_edge_lookup(self):
        """Test the white-black index shift of the edge series."""
        self.assertEqual(self.even.edge_valuation(WHITE, BLACK, -1), 0)
        self.assertEqual(self.even.edge_valuation(BLACK, WHITE, 1), 0)
        self.assertEqual(self.even.min_edge_valuation(WHITE, BLACK), 0)
        self.assertGreaterEqual(self.even.min_edge_valuation(BLACK, BLACK), 1)

    def test_label_support(self):
        """Test that the label exponent at z^n stays within [-n, n]."""
        for name in ("G", "H", "K"):
            for n in range(self.even.order + 1):
                self.assertTrue(all(abs(k) <= n for k in self.even.support(name, n)), (name, n))

    def test_vertex_series_cache(self):
        """Test that vertex series are cached per sorted increment tuple."""
        builder = self.counter.builder
        first = builder.vertex_series(self.even, 3, [1, -1, 0])
        second = builder.vertex_series(self.even, 3, [0, 1, -1])
        self.assertIs(first, second)
        self.assertIn((3, (-1, 0, 1)), self.even.vertex_cache)

    def test_ring_order_mismatch(self):
        """Test that a ring of the wrong order is rejected."""
        with self.assertRaises(SpecValidationError):
            self.counter.builder.build(parse_degree_spec("4"), 5, ExactRing(4, 8, 64))

    def test_odd_degrees_rejected(self):
        """Test that odd members are rejected."""
        with self.assertRaises(SpecValidationError):
            self.counter.cells(parse_degree_spec("3"), 4)


class TestDecay(unittest.TestCase):
    """Test cases for the numeric decay of edge coefficients."""

    def setUp(self):
        """Set up the critical solver."""
        self.solver = CriticalSolver()

    def test_quadrangulations(self):
        """Test that the decay rate equals the root of P(s) = 1 for D = {4}."""
        spec = parse_degree_spec("4")
        z0 = self.solver.solve_bipartite_critical(spec).z0
        report = decay_rate_check(spec, 0.9 * z0, self.solver)
        self.assertTrue(report.passed)
        self.assertGreater(report.alpha, 0.0)
        self.assertLess(report.alpha, 1.0)
        self.assertLess(report.p_at_one, 1.0)

    def test_all_even(self):
        """Test the decay rate for all-even degrees."""
        spec = parse_degree_spec("even")
        z0 = self.solver.solve_bipartite_critical(spec).z0
        report = decay_rate_check(spec, 0.8 * z0, self.solver, tolerance=1e-2)
        self.assertTrue(report.passed)

    def test_rejects_z_outside_window(self):
        """Test that z must lie strictly between 0.5 z0 and 0.95 z0."""
        spec = parse_degree_spec("4")
        z0 = self.solver.solve_bipartite_critical(spec).z0
        for factor in (0.1, 0.5, 0.95, 0.99):
            with self.assertRaises(SpecValidationError):
                decay_rate_check(spec, factor * z0, self.solver)

    def test_rejects_odd(self):
        """Test that odd degree sets are rejected."""
        with self.assertRaises(SpecValidationError):
            decay_rate_check(parse_degree_spec("3"), 0.1, self.solver)


if __name__ == "__main__":
    unittest.main()
