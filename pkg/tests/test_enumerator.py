"""
Test suite for exact planar counts and finite-n moments.
"""
import unittest
from fractions import Fraction

from mapdeg.degrees import parse_degree_spec
from mapdeg.enumerator import CountTable, Enumerator, tutte_count
from mapdeg.errors import SpecValidationError
from mapdeg.genus.rotation import OracleFilter, RotationOracle
from mapdeg.series import SeriesEngine


class TestTutteCount(unittest.TestCase):
    """Test cases for the reference formula."""

    def test_first_values(self):
        """Test 2, 9, 54, 378, 2916."""
        self.assertEqual([tutte_count(n) for n in range(1, 6)], [2, 9, 54, 378, 2916])
        self.assertEqual(tutte_count(0), 1)


class TestEnumerator(unittest.TestCase):
    """Test cases for Enumerator.count_maps and the moment columns."""

    def setUp(self):
        """Set up an enumerator over a fresh engine."""
        self.enumerator = Enumerator(SeriesEngine())

    def test_all_maps_match_tutte(self):
        """Test D = all degrees against Tutte's formula for n <= 10."""
        table = self.enumerator.count_maps(parse_degree_spec("all"), 10)
        self.assertEqual(table.counts, [tutte_count(n) for n in range(11)])

    def test_quadrangulations(self):
        """Test D = {4}: counts at n = 2f are Tutte's M_f and vanish at odd n."""
        table = self.enumerator.count_maps(parse_degree_spec("4"), 10)
        for f in range(1, 6):
            self.assertEqual(table.counts[2 * f], tutte_count(f))
            self.assertEqual(table.counts[2 * f - 1], 0)

    def test_quadrangulations_against_oracle(self):
        """Test D = {4} against the rotation-system oracle for n <= 4."""
        spec = parse_degree_spec("4")
        table = self.enumerator.count_maps(spec, 4)
        oracle = RotationOracle(max_edges=4)
        for n in range(1, 5):
            self.assertEqual(table.counts[n], oracle.count(n, OracleFilter(genus=0, degrees=spec)))

    def test_mixed_set_against_oracle(self):
        """Test D = {3, 4} (general system) against the oracle."""
        spec = parse_degree_spec("3,4")
        table = self.enumerator.count_maps(spec, 4)
        oracle = RotationOracle(max_edges=4)
        for n in range(1, 5):
            self.assertEqual(table.counts[n], oracle.count(n, OracleFilter(genus=0, degrees=spec)))

    def test_nonzero_entries(self):
        """Test that nonzero() skips empty orders."""
        table = self.enumerator.count_maps(parse_degree_spec("4"), 4)
        self.assertEqual(table.nonzero(), [(2, 2), (4, 9)])

    def test_vertex_distribution(self):
        """Test the one-edge maps: a loop and a bridge."""
        self.assertEqual(self.enumerator.vertex_distribution(parse_degree_spec("all"), 1), {1: 1, 2: 1})

    def test_duality(self):
        """Test vertex/face exchangeability for D = all degrees."""
        self.assertTrue(self.enumerator.duality_check(6))

    def test_deterministic_moments(self):
        """Test that X^(4) = n/2 exactly on quadrangulations."""
        table = self.enumerator.exact_moments(parse_degree_spec("4"), 4, 4)
        self.assertEqual(table.moments[4][4], (Fraction(2), Fraction(4)))
        self.assertIsNone(table.moments[4][3])
        self.assertEqual(table.variance(4, 4), 0)

    def test_exact_handshake(self):
        """Test Σ d E[X_n^(d)] = 2n exactly on D = {3, 4}."""
        spec = parse_degree_spec("3,4")
        table = self.enumerator.exact_moment_columns(spec, 6, [3, 4])
        for n in range(1, 7):
            if not table.counts[n]:
                continue
            total = 3 * table.moments[3][n][0] + 4 * table.moments[4][n][0]
            self.assertEqual(total, 2 * n)

    def test_moment_degree_outside_set(self):
        """Test that moments of a degree outside D are rejected."""
        with self.assertRaises(SpecValidationError):
            self.enumerator.exact_moments(parse_degree_spec("4"), 4, 6)

    def test_mean_per_edge(self):
        """Test CountTable.mean_per_edge on a hand-built table."""
        table = CountTable(spec=parse_degree_spec("4"), counts=[1, 0, 2],
                           moments={4: [None, None, (Fraction(1), Fraction(1))]})
        self.assertEqual(table.mean_per_edge(4, 2), Fraction(1, 2))
        self.assertIsNone(table.mean_per_edge(4, 1))


if __name__ == "__main__":
    unittest.main()
