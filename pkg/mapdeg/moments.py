# mapdeg/moments.py
"""
Limit-law constants of the face-degree counts: μ_d with E X_n^(d) ~ μ_d n
and the covariance σ_{d1,d2} of the Gaussian limit.

Three routes are available and cross-checked:
  closed-form          explicit expressions at the critical point
  finite-difference    second differences of ρ(x) with Richardson extrapolation
  series-extrapolation exact finite-n moments extrapolated in 1/n
"""
import itertools
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from mapdeg.criticality import CriticalPoint, CriticalSolver, bipartite_sums, p_values, weight_value
from mapdeg.degrees import DegreeSpec
from mapdeg.enumerator import CountTable, Enumerator
from mapdeg.errors import SpecValidationError, StepSizeError
from mapdeg.kernel import binomial, trinomial

Pair = Tuple[int, int]


@dataclass
class MomentReport:
    spec: str
    degrees: List[int]
    mu: Dict[int, float]
    sigma: Dict[Pair, float]
    methods: Dict[str, str] = field(default_factory=dict)
    c_bip: Optional[float] = None
    handshake: Optional[float] = None
    vertex_mean: Optional[float] = None
    tail: Dict[str, float] = field(default_factory=dict)
    findings: List[str] = field(default_factory=list)

    def sigma_matrix(self, degrees: Optional[Sequence[int]] = None) -> np.ndarray:
        degrees = list(degrees or self.degrees)
        return np.array([[self.sigma[(a, b)] for b in degrees] for a in degrees])

    def to_dict(self) -> Dict:
        return {
            "spec": self.spec,
            "degrees": self.degrees,
            "mu": {str(d): v for d, v in self.mu.items()},
            "sigma": {f"{a},{b}": v for (a, b), v in self.sigma.items()},
            "methods": self.methods,
            "c_bip": self.c_bip,
            "handshake": self.handshake,
            "vertex_mean": self.vertex_mean,
            "tail": self.tail,
            "findings": self.findings,
        }


@lru_cache(maxsize=None)
def allmaps_constants(d: int) -> Tuple[Fraction, Fraction]:
    """
    (A_d, Ā_d) for D = all degrees:
    A_d = 6^-d Σ_m (d-1; d-2m-1, m, m) 4^m and Ā_d = 6^-d Σ_m (d-1; d-2m-2, m, m+1) 4^m.
    """
    if d < 1:
        return Fraction(0), Fraction(0)
    a = sum(trinomial(d - 1, d - 2 * m - 1, m, m) * 4 ** m for m in range(d // 2 + 1))
    abar = sum(trinomial(d - 1, d - 2 * m - 2, m, m + 1) * 4 ** m for m in range(d // 2 + 1))
    return Fraction(a, 6 ** d), Fraction(abar, 6 ** d)


def allmaps_mu(d: int) -> Fraction:
    a, abar = allmaps_constants(d)
    return a + 2 * abar


def allmaps_sigma(d1: int, d2: int) -> Fraction:
    """Covariance for D = all degrees, following the explicit formula term by term."""
    A1, B1 = allmaps_constants(d1)
    A2, B2 = allmaps_constants(d2)
    A1m, B1m = allmaps_constants(d1 - 1)
    A2m, B2m = allmaps_constants(d2 - 1)
    m1, m2 = allmaps_mu(d1), allmaps_mu(d2)
    m1m, m2m = allmaps_mu(d1 - 1), allmaps_mu(d2 - 1)
    return (m1 * (1 if d1 == d2 else 0)
            - Fraction(3, 2) * m1 * m2
            + Fraction(729, 4) * (d1 - 1) * (d2 - 1) * A1m * A2m
            + Fraction(9, 2) * ((B1 + (d1 - 1) * B1m) * B2 + (B2 + (d2 - 1) * B2m) * B1)
            - Fraction(1, 18) * (39 * B1 + (d1 - 1) * m1m) * (39 * B2 + (d2 - 1) * m2m)
            - Fraction(1, 2) * (m1 * A2 + m2 * A1)
            + Fraction(1, 12) * ((d2 - 1) * m1 * m2m + (d1 - 1) * m2 * m1m))


class MomentService:
    """
    Computes MomentReports. The critical solver is injected; the enumerator is
    only needed for the series-extrapolation route.
    """

    def __init__(self, solver: CriticalSolver, enumerator: Optional[Enumerator] = None,
                 fd_step: float = 1e-3, richardson_tolerance: float = 1e-4, threads: int = 1):
        self.solver = solver
        self.enumerator = enumerator
        self.fd_step = fd_step
        self.richardson_tolerance = richardson_tolerance
        self.threads = max(1, threads)
        self.logger = logging.getLogger(self.__class__.__name__)

    @staticmethod
    def report_degrees(spec: DegreeSpec, cutoff: int) -> List[int]:
        if spec.is_finite:
            return list(spec.members)
        return spec.degrees_up_to(cutoff)

    # ------------------------------------------------------------------
    # Bipartite closed form
    # ------------------------------------------------------------------

    def mu_sigma_bipartite(self, spec: DegreeSpec, point: Optional[CriticalPoint] = None,
                           cutoff: int = 12) -> MomentReport:
        """
        μ_{2j} = z0 q_{2j} C(2j-1, j) R0^{j-1},
        σ_{2j,2k} = μ_{2j} δ_{jk} - μ_{2j} μ_{2k} (1 + (j-1)(k-1) c), c = 1/(R0 F_RR).
        """
        spec.require_bipartite()
        point = point or self.solver.solve_bipartite_critical(spec)
        z0, R0 = point.z0, point.R0
        c = 1.0 / (R0 * point.derivs["F_RR"])
        degrees = self.report_degrees(spec, cutoff)

        def mu(d: int) -> float:
            j = d // 2
            return z0 * weight_value(spec, d) * binomial(2 * j - 1, j) * R0 ** (j - 1)

        mus = {d: mu(d) for d in degrees}
        sigma = {}
        for a, b in itertools.product(degrees, repeat=2):
            j, k = a // 2, b // 2
            sigma[(a, b)] = (mus[a] if a == b else 0.0) - mus[a] * mus[b] * (1 + (j - 1) * (k - 1) * c)
        sums = bipartite_sums(spec, R0, tol=self.solver.tail_tolerance)
        report = MomentReport(
            spec=spec.describe(), degrees=degrees, mu=mus, sigma=sigma, c_bip=c,
            handshake=2.0 * z0 * sums.s1,
            vertex_mean=z0 * sums.s0 / R0,
            tail={"z0": z0, "R0": R0, "c": c, "decay": 4.0 * R0},
        )
        report.methods.update({f"mu:{d}": "closed-form" for d in degrees})
        report.methods.update({f"sigma:{a},{b}": "closed-form" for a, b in sigma})
        return report

    def sigma_bipartite_derivatives(self, spec: DegreeSpec, point: CriticalPoint,
                                    degrees: Sequence[int]) -> Dict[Pair, float]:
        """
        The same covariance from the implicit-function expression in the
        partial derivatives of F(z, x, R) = z + z Σ x_{2i} q_{2i} C(2i-1, i) R^i.
        """
        z0, R0 = point.z0, point.R0
        F_z = R0 / z0
        F_RR = point.derivs["F_RR"]
        F_Rz = 1.0 / z0
        F_zz = 0.0

        def partials(d: int) -> Tuple[float, float, float]:
            j = d // 2
            base = weight_value(spec, d) * binomial(2 * j - 1, j)
            return z0 * base * R0 ** j, j * z0 * base * R0 ** (j - 1), base * R0 ** j

        out = {}
        for a, b in itertools.product(degrees, repeat=2):
            Fa, FRa, Fza = partials(a)
            Fb, FRb, Fzb = partials(b)
            inner = (F_z ** 2 * (F_RR * 0.0 - FRa * FRb)
                     - F_z * Fa * (F_RR * Fzb - F_Rz * FRb)
                     - F_z * Fb * (F_RR * Fza - F_Rz * FRa)
                     + Fa * Fb * (F_RR * F_zz - F_Rz ** 2))
            mu_a, mu_b = Fa / (z0 * F_z), Fb / (z0 * F_z)
            out[(a, b)] = mu_a * mu_b + (mu_a if a == b else 0.0) + inner / (z0 * F_z ** 3 * F_RR)
        return out

    def degenerate_rows(self, spec: DegreeSpec, report: MomentReport, rows: Sequence[int],
                        max_degree: int = 4000) -> Dict[int, float]:
        """Σ_{d2} d2 σ_{d1,d2} for the bipartite closed form, summed with a geometric tail."""
        z0, R0, c = report.tail["z0"], report.tail["R0"], report.c_bip
        out = {}
        for d1 in rows:
            j = d1 // 2
            mu1 = report.mu.get(d1) or z0 * weight_value(spec, d1) * binomial(2 * j - 1, j) * R0 ** (j - 1)
            total = d1 * mu1
            for d2 in spec.iter_degrees(2):
                if d2 > max_degree:
                    break
                k = d2 // 2
                mu2 = z0 * weight_value(spec, d2) * math.exp(_log_binomial(2 * k - 1, k) + (k - 1) * math.log(R0))
                term = d2 * mu1 * mu2 * (1 + (j - 1) * (k - 1) * c)
                total -= term
                if not spec.is_finite and abs(term) < 1e-18 and k > 10:
                    break
            out[d1] = total
        return out

    # ------------------------------------------------------------------
    # D = all degrees closed form
    # ------------------------------------------------------------------

    def mu_sigma_allmaps(self, cutoff: int = 12, tail_degree: int = 300) -> MomentReport:
        """μ_d = A_d + 2Ā_d and the explicit covariance for D = all degrees, exactly then as floats."""
        degrees = list(range(1, cutoff + 1))
        mus = {d: float(allmaps_mu(d)) for d in degrees}
        sigma = {(a, b): float(allmaps_sigma(a, b)) for a, b in itertools.product(degrees, repeat=2)}
        vertex_mean = sum(allmaps_mu(d) for d in range(1, tail_degree + 1))
        handshake = sum(d * allmaps_mu(d) for d in range(1, tail_degree + 1))
        report = MomentReport(
            spec="all", degrees=degrees, mu=mus, sigma=sigma,
            handshake=float(handshake), vertex_mean=float(vertex_mean),
            tail={"z0": 1 / 12, "R0": 1 / 9, "L0": 1 / 6, "decay": 5 / 6, "tail_degree": tail_degree},
        )
        report.methods.update({f"mu:{d}": "closed-form" for d in degrees})
        report.methods.update({f"sigma:{a},{b}": "closed-form" for a, b in sigma})
        return report

    @staticmethod
    def allmaps_degenerate_rows(rows: Sequence[int], top: int = 200) -> Dict[int, float]:
        """Σ_{d2 <= top} d2 σ_{d1,d2} from the D = all closed form."""
        return {d1: float(sum(d2 * allmaps_sigma(d1, d2) for d2 in range(1, top + 1))) for d1 in rows}

    def cross_check(self, closed: MomentReport, numeric: MomentReport, tolerance: float = 1e-4) -> List[str]:
        """
        Entries of `numeric` on which the closed form differs by more than
        `tolerance`. Each one is appended to closed.findings.
        """
        found = []
        for d in numeric.degrees:
            if abs(closed.mu[d] - numeric.mu[d]) > tolerance:
                found.append(f"mu[{d}]: closed form {closed.mu[d]:.10g} vs numeric {numeric.mu[d]:.10g}")
        for (a, b), value in sorted(numeric.sigma.items()):
            if a <= b and abs(closed.sigma[(a, b)] - value) > tolerance:
                found.append(f"sigma[{a},{b}]: closed form {closed.sigma[(a, b)]:.10g} vs numeric {value:.10g}")
        for message in found:
            self.logger.warning(f"{closed.spec}: {message}")
        closed.findings.extend(found)
        return found

    def audit_allmaps(self, spec: DegreeSpec, closed: MomentReport, rows: Sequence[int],
                      check_up_to: int = 3, tolerance: float = 1e-4) -> Dict[int, float]:
        """
        Confront the D = all closed form with the numeric route on d <= check_up_to
        and with the degenerate direction on `rows`. Discrepancies go to
        closed.findings; the returned direction rows are the numeric ones.
        """
        numeric = self.mu_sigma_numeric(spec, degrees=[d for d in closed.degrees if d <= check_up_to])
        self.cross_check(closed, numeric, tolerance)
        for d1, value in self.allmaps_degenerate_rows(rows).items():
            if abs(value) > tolerance:
                message = f"direction[{d1}]: closed form Σ d2 σ[{d1},d2] = {value:.6g}"
                self.logger.warning(f"{closed.spec}: {message}")
                closed.findings.append(message)
        direction = self.degenerate_rows_numeric(spec, numeric, rows)
        closed.methods.update({f"direction:{d}": "finite-difference" for d in rows})
        return direction

    # ------------------------------------------------------------------
    # Numeric route
    # ------------------------------------------------------------------

    def _mu_from_point(self, spec: DegreeSpec, point: CriticalPoint, degrees: Sequence[int]) -> Dict[int, float]:
        """
        μ_d = H_{x_d} / (ρ H_z) with H_x = G_x + G_L F_x / (1 - F_L). At a
        bipartite point F_L = 1 and the single equation gives H_z = R0 / z0,
        so μ_d = F_{x_d} / R0.
        """
        L0, R0, z0 = point.state()
        if point.kind == "bipartite":
            out = {}
            for d in degrees:
                j = d // 2
                log_term = _log_binomial(2 * j - 1, j) + (j - 1) * math.log(R0)
                out[d] = z0 * weight_value(spec, d) * math.exp(log_term)
            return out
        s = self.solver._sums(spec, L0, R0)
        F_L, G_L = z0 * s.f_L, z0 * s.g_L
        H_z = R0 / z0 + G_L * (L0 / z0) / (1.0 - F_L)
        P = p_values(L0, R0, max(degrees) + 1)
        out = {}
        for d in degrees:
            w = weight_value(spec, d)
            F_x = z0 * w * P[d - 1]
            G_x = 0.5 * z0 * w * (P[d] - L0 * P[d - 1])
            out[d] = (G_x + G_L * F_x / (1.0 - F_L)) / (z0 * H_z)
        return out

    def _handshake_numeric(self, spec: DegreeSpec, point: CriticalPoint) -> float:
        L0, R0, _ = point.state()
        if spec.is_finite:
            degrees = list(spec.members)
        else:
            decay = L0 + 2.0 * math.sqrt(R0)
            top = int(math.log(1e-18) / math.log(decay)) + 60
            degrees = spec.degrees_up_to(top)
        mus = self._mu_from_point(spec, point, degrees)
        return sum(d * m for d, m in mus.items())

    def _rho_function(self, spec: DegreeSpec, point: CriticalPoint) -> Callable[..., float]:
        state = point.state()

        def rho(factors: Dict[int, float], edge_scale: float = 1.0) -> float:
            perturbed = spec.perturbed(factors, edge_scale)
            if point.kind == "bipartite":
                return self.solver.bipartite_perturbed_z0(perturbed, point.R0)
            return self.solver.general_perturbed_state(perturbed, state)[2]
        return rho

    def _second_difference(self, rho: Callable[..., float], rho0: float, a: int, b: int, h: float) -> float:
        if a == b:
            return (rho({a: 1 + h}) - 2 * rho0 + rho({a: 1 - h})) / h ** 2
        return (rho({a: 1 + h, b: 1 + h}) - rho({a: 1 + h, b: 1 - h})
                - rho({a: 1 - h, b: 1 + h}) + rho({a: 1 - h, b: 1 - h})) / (4 * h ** 2)

    def _richardson(self, estimate: Callable[[float], float], scale: float, label: str) -> float:
        coarse, fine = estimate(self.fd_step), estimate(self.fd_step / 2)
        if abs(coarse - fine) > self.richardson_tolerance * max(abs(fine), 1e-6 * scale):
            raise StepSizeError(f"Richardson levels disagree for {label}: {coarse:.10g} vs {fine:.10g}")
        return (4 * fine - coarse) / 3

    def mu_sigma_numeric(self, spec: DegreeSpec, degrees: Optional[Sequence[int]] = None,
                         cutoff: int = 8, point: Optional[CriticalPoint] = None) -> MomentReport:
        """
        μ from the first-derivative formula and σ from central differences of
        ρ(x) at steps h and h/2:

            σ_{a,b} = μ_a μ_b + δ_{ab} μ_a - ρ_{x_a x_b} / ρ

        Raises:
            StepSizeError: when the two Richardson levels disagree
        """
        point = point or self.solver.solve(spec)
        degrees = list(degrees or self.report_degrees(spec, cutoff))
        for d in degrees:
            if not spec.contains(d):
                raise SpecValidationError(f"degree {d} is not in D = {spec.describe()}")
        rho0 = point.z0
        mus = self._mu_from_point(spec, point, degrees)
        rho = self._rho_function(spec, point)

        def entry(pair: Pair) -> float:
            a, b = pair
            second = self._richardson(lambda h: self._second_difference(rho, rho0, a, b, h), rho0,
                                      f"sigma[{a},{b}]")
            return mus[a] * mus[b] + (mus[a] if a == b else 0.0) - second / rho0

        pairs = [(a, b) for a, b in itertools.product(degrees, repeat=2) if a <= b]
        with ThreadPoolExecutor(max_workers=self.threads) as pool:
            values = list(pool.map(entry, pairs))
        sigma = {}
        for (a, b), value in zip(pairs, values):
            sigma[(a, b)] = sigma[(b, a)] = value

        report = MomentReport(
            spec=spec.describe(), degrees=degrees, mu=mus, sigma=sigma,
            handshake=self._handshake_numeric(spec, point),
            tail={"z0": point.z0, "R0": point.R0, "L0": point.L0 or 0.0, "fd_step": self.fd_step},
        )
        if point.kind == "bipartite":
            report.c_bip = 1.0 / (point.R0 * point.derivs["F_RR"])
        report.methods.update({f"mu:{d}": "closed-form" for d in degrees})
        report.methods.update({f"sigma:{a},{b}": "finite-difference" for a, b in sigma})
        self.logger.info(f"Numeric moments for {spec.describe()} on degrees {degrees}")
        return report

    def degenerate_rows_numeric(self, spec: DegreeSpec, report: MomentReport,
                                rows: Sequence[int], point: Optional[CriticalPoint] = None) -> Dict[int, float]:
        """
        Σ_{d2} d2 σ_{d1,d2} over ALL of D, from the mixed difference of ρ along
        x_d -> s^d x_d and x_{d1} -> (1+η) x_{d1}.
        """
        point = point or self.solver.solve(spec)
        rho = self._rho_function(spec, point)
        rho0 = point.z0
        mus = self._mu_from_point(spec, point, rows)
        out = {}
        for d1 in rows:
            def mixed(h: float, d1=d1) -> float:
                return (rho({d1: 1 + h}, 1 + h) - rho({d1: 1 - h}, 1 + h)
                        - rho({d1: 1 + h}, 1 - h) + rho({d1: 1 - h}, 1 - h)) / (4 * h ** 2)
            g_mixed = self._richardson(mixed, rho0, f"direction[{d1}]")
            out[d1] = mus[d1] * report.handshake - g_mixed / rho0
        return out

    # ------------------------------------------------------------------
    # Finite-n checks
    # ------------------------------------------------------------------

    def mu_series_extrapolation(self, spec: DegreeSpec, d: int, N: int,
                                table: Optional[CountTable] = None) -> float:
        """Richardson in 1/n on exact E[X_n]/n at n = N and N/2 (stride-aligned)."""
        if self.enumerator is None:
            raise SpecValidationError("series extrapolation needs an enumerator")
        stride = spec.dbar
        n_high = N - N % (2 * stride)
        n_low = n_high // 2
        table = table or self.enumerator.exact_moments(spec, n_high, d)
        high, low = table.mean_per_edge(d, n_high), table.mean_per_edge(d, n_low)
        if high is None or low is None:
            raise SpecValidationError(f"no maps at n = {n_low} or {n_high}")
        return float(2 * high - low)

    @staticmethod
    def finite_n_error_ratio(table: CountTable, d: int, mu: float, n: int) -> float:
        """|E[X_{2n}]/(2n) - μ| / |E[X_n]/n - μ|."""
        low, high = table.mean_per_edge(d, n), table.mean_per_edge(d, 2 * n)
        return abs(float(high) - mu) / abs(float(low) - mu)

    @staticmethod
    def min_principal_minor(report: MomentReport, max_degree: int = 12) -> float:
        degrees = [d for d in report.degrees if d <= max_degree]
        matrix = report.sigma_matrix(degrees)
        smallest = math.inf
        for size in range(1, len(degrees) + 1):
            for subset in itertools.combinations(range(len(degrees)), size):
                idx = np.ix_(subset, subset)
                smallest = min(smallest, float(np.linalg.det(matrix[idx])))
        return smallest


def _log_binomial(n: int, k: int) -> float:
    return math.lgamma(n + 1) - math.lgamma(k + 1) - math.lgamma(n - k + 1)
