"""
Test suite for growth fits and coefficient-ratio estimates.
"""
import math
import os
import unittest

from mapdeg.asymfit import AsymptoticFitter, FitResult
from mapdeg.criticality import CriticalPoint, CriticalSolver
from mapdeg.degrees import parse_degree_spec
from mapdeg.enumerator import CountTable, Enumerator, tutte_count
from mapdeg.errors import InsufficientDataError
from mapdeg.series import SeriesEngine

SLOW = os.getenv("MAPDEG_SLOW_TESTS") == "1"


class TestAsymptoticFitter(unittest.TestCase):
    """Test cases for AsymptoticFitter on Tutte's numbers."""

    def setUp(self):
        """Set up a fitter and the exact D = all table up to n = 60."""
        self.fitter = AsymptoticFitter()
        self.table = CountTable(spec=parse_degree_spec("all"), counts=[tutte_count(n) for n in range(61)])

    def test_exponent_and_growth(self):
        """Test β̂ = -5/2 and ρ̂ = 1/12 on all maps."""
        fit = self.fitter.fit_growth(self.table, correction=1.0, beta_expected=-2.5)
        self.assertAlmostEqual(fit.beta_hat, -2.5, delta=0.1)
        self.assertAlmostEqual(fit.rho_hat, 1 / 12, delta=5e-3 / 12)
        self.assertGreater(fit.c_hat, 0.0)
        self.assertEqual(fit.window[-1], 60)

    def test_window_stability(self):
        """Test that one more stride of window moves β̂ by less than 0.05."""
        self.assertLess(self.fitter.window_shift(self.table, correction=1.0), 0.05)

    def test_half_power_corrections(self):
        """Test that n^{-1/2} corrections do not bias β̂ when modelled."""
        counts = [0.0] + [0.05 * 8.0 ** n * (1 - 1.2 / math.sqrt(n) + 0.3 / n) for n in range(1, 41)]
        table = CountTable(spec=parse_degree_spec("even"), counts=counts, genus=1, method="quadrature")
        fit = self.fitter.fit_growth(table, correction=0.5, beta_expected=0.0, terms=4)
        self.assertAlmostEqual(fit.beta_hat, 0.0, delta=0.02)
        self.assertAlmostEqual(fit.rho_hat * 8, 1.0, delta=1e-4)
        self.assertAlmostEqual(fit.c_hat, 0.05, delta=5e-3)
        self.assertEqual(len(fit.corrections), 4)
        self.assertEqual(fit.window[-1], 40)
        self.assertLess(self.fitter.window_shift(table, correction=0.5, terms=4), 0.05)

    def test_comparison_with_critical_point(self):
        """Test the relative gap against the solver's z0."""
        fit = self.fitter.fit_growth(self.table)
        point = CriticalPoint(kind="general", z0=1 / 12, R0=1 / 9, L0=1 / 6)
        comparison = self.fitter.compare_with_critical(fit, point)
        self.assertTrue(comparison.passed)
        self.assertLess(comparison.gap, 5e-3)

    def test_failed_comparison(self):
        """Test that a distant z0 fails the comparison."""
        fit = FitResult(rho_hat=0.1, beta_hat=-2.5, c_hat=1.0, residual=0.0, stride=1,
                        window=(1, 2), beta_windows=(-2.5, -2.5))
        point = CriticalPoint(kind="general", z0=1 / 12, R0=1 / 9)
        self.assertFalse(self.fitter.compare_with_critical(fit, point).passed)

    def test_insufficient_data(self):
        """Test that fewer than 12 nonzero points are rejected."""
        table = CountTable(spec=parse_degree_spec("all"), counts=[tutte_count(n) for n in range(11)])
        with self.assertRaises(InsufficientDataError):
            self.fitter.fit_growth(table)

    def test_ratio_estimates(self):
        """Test that the extrapolated ratios approach 12."""
        estimates = AsymptoticFitter.ratio_estimates(self.table)
        n, last = estimates["extrapolated"][-1]
        self.assertEqual(n, 59)
        self.assertAlmostEqual(last, 12.0, delta=0.1)
        self.assertLess(estimates["ratios"][-1][1], 12.0)

    def test_scaled_rows(self):
        """Test that scaled counts settle near ĉ."""
        fit = self.fitter.fit_growth(self.table)
        rows = AsymptoticFitter.scaled_rows(self.table, fit)
        self.assertEqual(len(rows), 60)
        self.assertAlmostEqual(rows[-1]["scaled"] / fit.c_hat, 1.0, delta=0.01)
        self.assertEqual(rows[0]["count"], "2")


class TestFitOnEnumeratedCounts(unittest.TestCase):
    """Test cases fitting tables produced by the enumerator."""

    def setUp(self):
        """Set up enumerator, solver and fitter."""
        self.enumerator = Enumerator(SeriesEngine())
        self.solver = CriticalSolver()
        self.fitter = AsymptoticFitter()

    def test_quadrangulations_use_stride(self):
        """Test that the period d̄ = 2 is used as stride for D = {4}."""
        spec = parse_degree_spec("4")
        table = self.enumerator.count_maps(spec, 60)
        fit = self.fitter.fit_growth(table)
        self.assertEqual(fit.stride, 2)
        self.assertTrue(self.fitter.compare_with_critical(fit, self.solver.solve(spec)).passed)

    @unittest.skipUnless(SLOW, "set MAPDEG_SLOW_TESTS=1")
    def test_all_even_to_two_hundred(self):
        """Test β̂ = -5/2 for all even degrees with n <= 200."""
        spec = parse_degree_spec("even")
        table = self.enumerator.count_maps(spec, 200)
        fit = self.fitter.fit_growth(table, correction=1.0, beta_expected=-2.5)
        self.assertAlmostEqual(fit.beta_hat, -2.5, delta=0.1)
        self.assertTrue(self.fitter.compare_with_critical(fit, self.solver.solve(spec)).passed)


if __name__ == "__main__":
    unittest.main()
