"""
Test suite for the exact and quadrature series rings.
"""
import unittest
from fractions import Fraction

from mapdeg.genus.rings import ExactRing, QuadratureRing

POLYS = [[1], [0, 1], [0, 0, 2]]


class TestExactRing(unittest.TestCase):
    """Test cases for the packed integer ring."""

    def setUp(self):
        """Set up a ring truncated at z^3."""
        self.ring = ExactRing(order=3, t_slots=5, width=16)
        self.a = self.ring.from_tpolys(POLYS)

    def test_square(self):
        """Test (1 + tz + 2t²z²)² truncated at z^3."""
        square = self.ring.mul(self.a, self.a)
        self.assertEqual(self.ring.tpoly(square, 1), [0, 2])
        self.assertEqual(self.ring.tpoly(square, 2), [0, 0, 5])
        self.assertEqual(self.ring.tpoly(square, 3), [0, 0, 0, 4])

    def test_shift_and_valuation(self):
        """Test multiplication by z^k and the z-valuation."""
        self.assertEqual(self.ring.valuation(self.a), 0)
        shifted = self.ring.shift(self.a, 2)
        self.assertEqual(self.ring.valuation(shifted), 2)
        self.assertEqual(self.ring.tpoly(shifted, 3), [0, 1])
        self.assertIsNone(self.ring.valuation(self.ring.zero()))
        self.assertEqual(self.ring.valuation(self.ring.shift(self.a, 4)), None)

    def test_times_t(self):
        """Test multiplication by t."""
        self.assertEqual(self.ring.tpoly(self.ring.times_t(self.a), 2), [0, 0, 0, 2])

    def test_integrate(self):
        """Test n ∫ [z^n] dt over [0, 1]."""
        self.assertEqual(self.ring.integrate_t(self.a, 1), [0, Fraction(1, 2), Fraction(4, 3), 0])
        self.assertEqual(self.ring.integrate_t(self.a, 2)[2], Fraction(2, 3))

    def test_rejects_negative(self):
        """Test that negative coefficients cannot be packed."""
        with self.assertRaises(ValueError):
            self.ring.from_tpolys([[1, -1]])


class TestQuadratureRing(unittest.TestCase):
    """Test cases for the Gauss-Legendre ring."""

    def test_matches_exact_ring(self):
        """Test that quadrature integrals equal the exact ones for low t-degree."""
        exact = ExactRing(order=3, t_slots=6, width=16)
        quad = QuadratureRing(3)
        ea, qa = exact.from_tpolys(POLYS), quad.from_tpolys(POLYS)
        expected = exact.integrate_t(exact.mul(ea, exact.times_t(ea)), 1)
        got = quad.integrate_t(quad.mul(qa, quad.times_t(qa)), 1)
        for e, g in zip(expected, got):
            self.assertAlmostEqual(float(e), g, places=12)

    def test_shift_and_valuation(self):
        """Test shifting past the order gives zero."""
        quad = QuadratureRing(3)
        a = quad.from_tpolys(POLYS)
        self.assertEqual(quad.valuation(quad.shift(a, 1)), 1)
        self.assertIsNone(quad.valuation(quad.shift(a, 4)))
        self.assertEqual(quad.nodes_count, 4)


if __name__ == "__main__":
    unittest.main()
