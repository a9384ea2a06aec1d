"""
Test suite for the rotation-system oracle.
"""
import unittest

from mapdeg.degrees import parse_degree_spec
from mapdeg.enumerator import tutte_count
from mapdeg.errors import SpecValidationError
from mapdeg.genus.rotation import OracleFilter, RotationMap, RotationOracle, cycles, oracle_count


class TestRotationMap(unittest.TestCase):
    """Test cases for single rotation systems."""

    def test_cycles(self):
        """Test cycle decomposition of an image list."""
        self.assertEqual(cycles([1, 0, 2]), [(0, 1), (2,)])

    def test_bridge_and_loop(self):
        """Test the two one-edge maps."""
        bridge = RotationMap.standard([0, 1])
        loop = RotationMap.standard([1, 0])
        self.assertEqual((len(bridge.vertices()), len(bridge.faces())), (2, 1))
        self.assertEqual((len(loop.vertices()), len(loop.faces())), (1, 2))
        self.assertEqual(bridge.genus(), 0)
        self.assertTrue(bridge.is_bipartite())
        self.assertFalse(loop.is_bipartite())

    def test_torus(self):
        """Test the one-vertex two-edge map with a single face."""
        torus = RotationMap.standard([2, 3, 1, 0])
        self.assertTrue(torus.is_connected())
        self.assertEqual(torus.genus(), 1)
        self.assertEqual(torus.face_degrees(), [4])


class TestRotationOracle(unittest.TestCase):
    """Test cases for the exhaustive counter."""

    def setUp(self):
        """Set up the oracle."""
        self.oracle = RotationOracle(max_edges=4)

    def test_planar_counts(self):
        """Test the planar oracle against Tutte's formula for n <= 4."""
        for n in range(1, 5):
            self.assertEqual(self.oracle.count(n, OracleFilter(genus=0)), tutte_count(n))

    def test_by_genus(self):
        """Test 10 = 9 + 1 maps with two edges and 74 = 54 + 20 with three."""
        self.assertEqual(self.oracle.count_by_genus(2), {0: 9, 1: 1})
        self.assertEqual(self.oracle.count_by_genus(3), {0: 54, 1: 20})

    def test_genus_one_small(self):
        """Test genus-1 counts at n = 1 and n = 2."""
        self.assertEqual(oracle_count(1, genus=1), 0)
        self.assertEqual(oracle_count(2, genus=1), 1)

    def test_bipartite_genus_one(self):
        """Test bipartite genus-1 counts 0, 0, 1, 15 and the D = {4} count."""
        flt = OracleFilter(genus=1, bipartite=True)
        self.assertEqual([self.oracle.count(n, flt) for n in range(1, 5)], [0, 0, 1, 15])
        quads = OracleFilter(genus=1, bipartite=True, degrees=parse_degree_spec("4"))
        self.assertEqual(self.oracle.count(4, quads), 1)

    def test_faces_even_is_weaker_than_bipartite(self):
        """Test that even faces do not imply bipartiteness in genus 1."""
        even = self.oracle.count(2, OracleFilter(genus=1, faces_even=True))
        bipartite = self.oracle.count(2, OracleFilter(genus=1, bipartite=True))
        self.assertEqual((even, bipartite), (1, 0))

    def test_size_guard(self):
        """Test that n outside [1, max_edges] is rejected."""
        with self.assertRaises(SpecValidationError):
            self.oracle.count(5)
        with self.assertRaises(SpecValidationError):
            self.oracle.count(0)
        with self.assertRaises(SpecValidationError):
            self.oracle.count_by_genus(5)


if __name__ == "__main__":
    unittest.main()
