# mapdeg/asymfit.py
"""
Fits of exact coefficient tables against c·ρ^{-n}·n^β.
"""
import logging
import math
from dataclasses import asdict, dataclass
from typing import Dict, List, Optional, Sequence, Tuple, Union

import mpmath
import numpy as np

from mapdeg.criticality import CriticalPoint
from mapdeg.enumerator import CountTable
from mapdeg.errors import InsufficientDataError

MIN_NONZERO = 12


@dataclass
class FitResult:
    rho_hat: float
    beta_hat: float
    c_hat: float
    residual: float
    stride: int
    window: Tuple[int, ...]
    beta_windows: Tuple[float, float]
    beta_expected: Optional[float] = None
    corrections: Tuple[float, ...] = ()

    @property
    def growth(self) -> float:
        return 1.0 / self.rho_hat

    def to_dict(self) -> Dict:
        return asdict(self)


@dataclass
class Comparison:
    gap: float
    threshold: float
    passed: bool
    rho_hat: float
    z0: float

    def to_dict(self) -> Dict:
        return asdict(self)


class AsymptoticFitter:
    """
    Least squares on log counts ≈ A + B n + β log n over the last `window`
    stride-spaced points, with β extrapolated from two shifted windows.

    `correction` is the exponent p of the leading correction n^{-p} to the
    local slope: 1 for planar tables, 1/2 for genus tables. With `terms` > 0
    the corrections n^{-p}, ..., n^{-terms p} join the least-squares basis
    and β̂ is read off that single fit, solved in mpmath.
    """

    def __init__(self, window: int = 10, threshold: float = 5e-3, mp_dps: int = 50):
        self.window = window
        self.threshold = threshold
        self.mp_dps = mp_dps
        self.logger = logging.getLogger(self.__class__.__name__)

    @staticmethod
    def _stride_counts(table: CountTable, stride: int) -> List[Tuple[int, Union[int, float]]]:
        points = [(n, c) for n, c in table.nonzero() if n % stride == 0]
        if len(points) < MIN_NONZERO:
            raise InsufficientDataError(
                f"need at least {MIN_NONZERO} nonzero stride-spaced counts, got {len(points)}"
            )
        return points

    def _points(self, table: CountTable, stride: int) -> List[Tuple[int, float]]:
        return [(n, _log(c)) for n, c in self._stride_counts(table, stride)]

    def _solve_corrected(self, points: Sequence[Tuple[int, Union[int, float]]], correction: float,
                         terms: int) -> Tuple[List[float], float]:
        """
        log counts ≈ A + B n + β log n + Σ_k κ_k n^{-k p} by least squares in
        mpmath; returns ([A, B, β, κ_1, ...], max relative residual).
        """
        with mpmath.workdps(self.mp_dps):
            p = mpmath.mpf(correction)

            def basis(n: int) -> List:
                x = mpmath.mpf(n)
                return [mpmath.mpf(1), x, mpmath.log(x)] + [x ** (-k * p) for k in range(1, terms + 1)]

            design = mpmath.matrix([basis(n) for n, _ in points])
            y = mpmath.matrix([mpmath.log(mpmath.mpf(c)) for _, c in points])
            solution = mpmath.qr_solve(design, y)[0]
            coeffs = [solution[i] for i in range(solution.rows)]
            residual = max(
                abs(mpmath.exp(mpmath.fsum(c * v for c, v in zip(coeffs, basis(n))) - y[i]) - 1)
                for i, (n, _) in enumerate(points)
            )
            return [float(c) for c in coeffs], float(residual)

    def _fit_corrected(self, table: CountTable, stride: int, correction: float, terms: int,
                       beta_expected: Optional[float]) -> FitResult:
        points = self._stride_counts(table, stride)
        size = min(max(self.window, terms + 6), len(points))
        shift = min(5, len(points) - size)
        late = points[-size:]
        early = points[len(points) - size - shift:len(points) - shift]
        coeffs, residual = self._solve_corrected(late, correction, terms)
        beta_early = self._solve_corrected(early, correction, terms)[0][2]
        a, b, beta = coeffs[:3]
        rho, c = math.exp(-b), math.exp(a)
        result = FitResult(
            rho_hat=rho, beta_hat=beta, c_hat=c, residual=residual, stride=stride,
            window=tuple(n for n, _ in late), beta_windows=(beta_early, beta),
            beta_expected=beta_expected, corrections=tuple(coeffs[3:]),
        )
        self.logger.info(f"Corrected fit ({terms} terms in n^-{correction:g}): 1/rho={1 / rho:.8g}, "
                         f"beta={beta:.5f}, c={c:.6g}, residual={residual:.2e}")
        return result

    @staticmethod
    def _solve(points: Sequence[Tuple[int, float]], beta: Optional[float] = None) -> np.ndarray:
        n = np.array([p[0] for p in points], dtype=float)
        y = np.array([p[1] for p in points])
        if beta is None:
            design = np.column_stack([np.ones_like(n), n, np.log(n)])
            return np.linalg.lstsq(design, y, rcond=None)[0]
        design = np.column_stack([np.ones_like(n), n])
        a, b = np.linalg.lstsq(design, y - beta * np.log(n), rcond=None)[0]
        return np.array([a, b, beta])

    def fit_growth(self, table: CountTable, stride: Optional[int] = None,
                   correction: float = 1.0, beta_expected: Optional[float] = None,
                   terms: int = 0) -> FitResult:
        """
        Fit (ρ̂, β̂, ĉ) on the top of the table.

        Raises:
            InsufficientDataError: if fewer than 12 nonzero entries are available
        """
        stride = stride or table.spec.dbar
        if terms > 0:
            return self._fit_corrected(table, stride, correction, terms, beta_expected)
        points = self._points(table, stride)
        size = min(self.window, len(points))
        shift = min(5, len(points) - size)
        late = points[-size:]
        early = points[len(points) - size - shift:len(points) - shift]
        beta_late = float(self._solve(late)[2])
        beta_early = float(self._solve(early)[2])
        n_late = np.mean([p[0] for p in late])
        n_early = np.mean([p[0] for p in early])
        # β(n̄) ≈ β + K n̄^{-p}
        x_late, x_early = n_late ** -correction, n_early ** -correction
        if x_early == x_late:
            beta = beta_late
        else:
            beta = (beta_late * x_early - beta_early * x_late) / (x_early - x_late)

        a, b, _ = self._solve(late, beta)
        rho = math.exp(-b)
        c = math.exp(a)
        residual = max(abs(math.exp(a + b * n + beta * math.log(n) - y) - 1.0) for n, y in late)
        result = FitResult(
            rho_hat=rho, beta_hat=float(beta), c_hat=c, residual=residual, stride=stride,
            window=tuple(p[0] for p in late), beta_windows=(beta_early, beta_late),
            beta_expected=beta_expected,
        )
        self.logger.info(f"Fit: 1/rho={1 / rho:.8g}, beta={beta:.5f}, c={c:.6g}, residual={residual:.2e}")
        return result

    def window_shift(self, table: CountTable, stride: Optional[int] = None, correction: float = 1.0,
                     terms: int = 0) -> float:
        """Absolute change of β̂ when the fit window grows by one stride."""
        base = self.fit_growth(table, stride, correction, terms=terms)
        wider = AsymptoticFitter(len(base.window) + 1, self.threshold, self.mp_dps)
        return abs(wider.fit_growth(table, stride, correction, terms=terms).beta_hat - base.beta_hat)

    def compare_with_critical(self, fit: FitResult, point: CriticalPoint) -> Comparison:
        gap = abs(fit.rho_hat - point.z0) / point.z0
        passed = gap < self.threshold
        if not passed:
            self.logger.warning(f"Fitted rho {fit.rho_hat:.8g} is {gap:.2e} away from z0 {point.z0:.8g}")
        return Comparison(gap=gap, threshold=self.threshold, passed=passed, rho_hat=fit.rho_hat, z0=point.z0)

    @staticmethod
    def ratio_estimates(table: CountTable, stride: Optional[int] = None) -> Dict[str, List]:
        """
        r_n = (counts[n+d̄]/counts[n])^{1/d̄} and its linear extrapolation in 1/n
        from consecutive pairs.
        """
        stride = stride or table.spec.dbar
        counts = table.counts
        ratios = []
        for n in range(stride, table.order - stride + 1, stride):
            if counts[n] and counts[n + stride]:
                ratios.append((n, (counts[n + stride] / counts[n]) ** (1.0 / stride)))
        extrapolated = [
            (n, (n * r - m * q) / (n - m))
            for (m, q), (n, r) in zip(ratios, ratios[1:])
        ]
        return {"ratios": ratios, "extrapolated": extrapolated}

    @staticmethod
    def scaled_rows(table: CountTable, fit: FitResult) -> List[Dict[str, float]]:
        """Rows (n, counts·ρ̂ⁿ·n^{-β̂}) for plotting elsewhere."""
        rows = []
        for n, count in table.nonzero():
            if n % fit.stride:
                continue
            scaled = math.exp(_log(count) + n * math.log(fit.rho_hat) - fit.beta_hat * math.log(n))
            rows.append({"n": n, "count": str(count), "scaled": scaled})
        return rows


def _log(value) -> float:
    """log of a (possibly huge) positive integer or float."""
    if isinstance(value, int) and value.bit_length() > 1000:
        shift = value.bit_length() - 900
        return math.log(value >> shift) + shift * math.log(2.0)
    return math.log(value)
