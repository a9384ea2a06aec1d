# mapdeg/criticality.py
"""
Location of the dominant singularity ρ_D and the critical values.

Bipartite sets reduce to a single equation in R. General sets are solved by
path-following in z on the system L = F, R = G up to the point where the
Jacobian of the system becomes singular, i.e.

    G_L F_R / (1 - F_L) + G_R = 1.

The B-weighted sums are never evaluated from closed forms. With
P_j(L, R) = Σ_m B_{j-2m,m} L^{j-2m} R^m, which obeys

    (j+1) P_{j+1} = (2j+1) L P_j - j (L² - 4R) P_{j-1},

we have F = z Σ q_i P_{i-1}, G = z + (z/2) Σ q_i (P_i - L P_{i-1}) and
T = 1 + (1/2) Σ q_i (P_i + L P_{i-1}). Infinite sums stop at a certified
geometric tail.
"""
import logging
import math
from dataclasses import asdict, dataclass, field
from typing import Dict, List, Optional, Tuple

import mpmath
import numpy as np
from scipy import optimize

from mapdeg.degrees import DegreeSpec
from mapdeg.errors import NumericFailure, SpecValidationError, SubcriticalError

logger = logging.getLogger(__name__)

MAX_TERMS = 200_000


class OutsideConvergence(NumericFailure):
    """The evaluation point lies outside the convergence region of the sums."""


def weight_value(spec: DegreeSpec, degree: int, one=1.0):
    """q_degree in the number type of `one` (float or mpf)."""
    if not spec.contains(degree):
        return 0 * one
    if spec.weights.rule == "power":
        value = (one * degree) ** spec.weights.alpha
    else:
        value = one
    for scaled, factor in spec.scale:
        if scaled == degree:
            value = value * factor
    if spec.edge_scale != 1.0:
        value = value * spec.edge_scale ** degree
    return value


def _weight_growth(spec: DegreeSpec, degree: int, step: int = 1) -> float:
    """Upper bound on q_degree / q_{degree-step} for large degrees."""
    growth = spec.edge_scale ** step
    if spec.weights.rule == "power" and spec.weights.alpha > 0 and degree > step:
        growth *= (degree / (degree - step)) ** spec.weights.alpha
    return growth


def convergence_margin(L, R):
    """1 - (2L - L² + 4R); positive inside the region where every sum converges."""
    return 1 - (2 * L - L * L + 4 * R)


# ----------------------------------------------------------------------
# Bipartite sums
# ----------------------------------------------------------------------

@dataclass
class BipartiteSums:
    """S_k = Σ q_{2i} i^(k) C(2i-1, i) R^{i-k} (falling powers) and Φ = Σ q (i-1) C R^i."""
    phi: float
    s0: float
    s1: float
    s2: float
    s3: float
    terms: int


def bipartite_sums(spec: DegreeSpec, R, one=1.0, tol: float = 1e-14,
                   max_terms: int = MAX_TERMS) -> BipartiteSums:
    if R <= 0:
        zero = 0 * one
        return BipartiteSums(zero, zero, zero, zero, zero, 0)
    if not spec.is_finite and 4 * R * spec.edge_scale ** 2 >= 1:
        raise OutsideConvergence(f"R = {float(R):.6g} outside (0, 1/4)")
    phi = s0 = s1 = s2 = s3 = 0 * one
    base = R  # C(2i-1, i) R^i at i = 1
    last_top = None
    i = 1
    while True:
        w = weight_value(spec, 2 * i, one)
        if w:
            term = w * base
            phi += (i - 1) * term
            s0 += term
            s1 += i * term / R
            s2 += i * (i - 1) * term / (R * R)
            top = i * (i - 1) * (i - 2) * term / (R * R * R)
            s3 += top
            if not spec.is_finite and i > 3:
                ratio = 4 * float(R) * _weight_growth(spec, 2 * i, 2) * (1 + 3.0 / (i - 2))
                if last_top:
                    ratio = max(ratio, float(top / last_top))
                if ratio < 1 and float(top) * ratio / (1 - ratio) < tol * float(s3):
                    break
            last_top = top if top else last_top
        if spec.is_finite and 2 * i >= spec.max_degree:
            break
        if i > max_terms:
            raise NumericFailure(f"tail certificate not reached at R = {float(R):.6g}")
        base = base * R * (2 * (2 * i + 1)) / (i + 1)
        i += 1
    return BipartiteSums(phi, s0, s1, s2, s3, i)


# ----------------------------------------------------------------------
# General bridge sums
# ----------------------------------------------------------------------

@dataclass
class BridgeSums:
    """f, g, tau with F = z f, G = z + z g, T = 1 + tau, and their (L, R) partials."""
    f: float
    g: float
    tau: float
    f_L: float
    f_R: float
    g_L: float
    g_R: float
    f_LL: float
    f_LR: float
    f_RR: float
    g_LL: float
    g_LR: float
    g_RR: float
    terms: int


def p_values(L, R, jmax: int, one=1.0) -> List:
    """P_0 .. P_jmax at (L, R)."""
    values = [one, L * one]
    disc = L * L - 4 * R
    for j in range(1, jmax):
        values.append(((2 * j + 1) * L * values[j] - j * disc * values[j - 1]) / (j + 1))
    return values[:jmax + 1]


def bridge_sums(spec: DegreeSpec, L, R, one=1.0, tol: float = 1e-14,
                max_terms: int = MAX_TERMS) -> BridgeSums:
    """
    Weighted sums of P_j and their first and second partial derivatives.

    Raises:
        OutsideConvergence: if L + 2√R >= 1 for an infinite degree set
    """
    if L < 0 or R < 0:
        raise OutsideConvergence("negative L or R")
    decay = (float(L) + 2.0 * math.sqrt(float(R))) * spec.edge_scale
    if not spec.is_finite and decay >= 1.0:
        raise OutsideConvergence(f"decay rate {decay:.6g} >= 1")

    zero = 0 * one
    disc = L * L - 4 * R
    # index 0 holds P_{i-1}-family, index 1 holds P_i-family
    p0, p1 = one, L * one
    a0, a1 = zero, one            # ∂L
    b0, b1 = zero, zero           # ∂R
    aa0 = aa1 = ab0 = ab1 = bb0 = bb1 = zero

    f = g = tau = f_L = f_R = g_L = g_R = zero
    f_LL = f_LR = f_RR = g_LL = g_LR = g_RR = zero
    base_sum = top_sum = 0.0
    history: List[Tuple[float, float]] = []
    i = 1
    while True:
        w = weight_value(spec, i, one)
        if w:
            f += w * p0
            f_L += w * a0
            f_R += w * b0
            f_LL += w * aa0
            f_LR += w * ab0
            f_RR += w * bb0
            g += w * (p1 - L * p0) / 2
            tau += w * (p1 + L * p0) / 2
            g_L += w * (a1 - p0 - L * a0) / 2
            g_R += w * (b1 - L * b0) / 2
            g_LL += w * (aa1 - 2 * a0 - L * aa0) / 2
            g_LR += w * (ab1 - b0 - L * ab0) / 2
            g_RR += w * (bb1 - L * bb0) / 2
        if spec.is_finite:
            if i >= spec.max_degree:
                break
        else:
            wf = float(w)
            base_term = wf * (abs(float(p0)) + abs(float(p1)))
            top_term = wf * (abs(float(aa1)) + abs(float(ab1)) + abs(float(bb1))
                             + abs(float(a1)) + abs(float(b1)))
            base_sum += base_term
            top_sum += top_term
            history.append((base_term, top_term))
            if i > 8 and _tail_certified(history, decay / spec.edge_scale * _weight_growth(spec, i), base_sum, top_sum, tol):
                break
            if i > max_terms:
                raise NumericFailure(f"tail certificate not reached at (L, R) = ({float(L):.6g}, {float(R):.6g})")
        # advance the recurrence with j = i
        j = i
        p2 = ((2 * j + 1) * L * p1 - j * disc * p0) / (j + 1)
        a2 = ((2 * j + 1) * (p1 + L * a1) - j * (2 * L * p0 + disc * a0)) / (j + 1)
        b2 = ((2 * j + 1) * L * b1 - j * (-4 * p0 + disc * b0)) / (j + 1)
        aa2 = ((2 * j + 1) * (2 * a1 + L * aa1) - j * (2 * p0 + 4 * L * a0 + disc * aa0)) / (j + 1)
        ab2 = ((2 * j + 1) * (b1 + L * ab1) - j * (2 * L * b0 - 4 * a0 + disc * ab0)) / (j + 1)
        bb2 = ((2 * j + 1) * L * bb1 - j * (-8 * b0 + disc * bb0)) / (j + 1)
        p0, p1 = p1, p2
        a0, a1 = a1, a2
        b0, b1 = b1, b2
        aa0, aa1 = aa1, aa2
        ab0, ab1 = ab1, ab2
        bb0, bb1 = bb1, bb2
        i += 1
    return BridgeSums(f, g, tau, f_L, f_R, g_L, g_R, f_LL, f_LR, f_RR, g_LL, g_LR, g_RR, i)


def _tail_certified(history, asymptotic: float, base_sum: float, top_sum: float, tol: float) -> bool:
    """Geometric tail bound on both magnitude sequences, using two-step ratios."""
    (b2, t2), (b1, t1), (b0, t0) = history[-3], history[-2], history[-1]
    bounds = []
    for older, newer, total in ((b2, b0, base_sum), (t2, t0, top_sum)):
        ratio = asymptotic
        if older > 0:
            ratio = max(ratio, math.sqrt(newer / older))
        if ratio >= 1.0:
            return False
        bounds.append((newer, ratio, total))
    return all((newer + last) * ratio / (1 - ratio) <= tol * total
               for (newer, ratio, total), last in zip(bounds, (b1, t1)))


def characteristic_value(s: BridgeSums, z) -> float:
    """G_L F_R / (1 - F_L) + G_R."""
    F_L, F_R, G_L, G_R = z * s.f_L, z * s.f_R, z * s.g_L, z * s.g_R
    cross = G_L * F_R
    return G_R if cross == 0 else cross / (1 - F_L) + G_R


# ----------------------------------------------------------------------
# Reports
# ----------------------------------------------------------------------

@dataclass
class CriticalPoint:
    """
    Critical values (z0, R0[, L0]). `decimals` keeps the extended-precision
    strings; the float fields are rounded copies.
    """
    kind: str
    z0: float
    R0: float
    L0: Optional[float] = None
    margin: Optional[float] = None
    characteristic: float = 1.0
    dbar: int = 1
    derivs: Dict[str, float] = field(default_factory=dict)
    decimals: Dict[str, str] = field(default_factory=dict)

    @property
    def growth(self) -> float:
        return 1.0 / self.z0

    def state(self) -> Tuple[float, float, float]:
        return (self.L0 or 0.0, self.R0, self.z0)

    def to_dict(self) -> Dict:
        return asdict(self)


@dataclass
class QBoltzmannReport:
    classification: str
    alpha: Optional[float]
    heuristic_critical: Optional[bool]
    agrees_with_heuristic: Optional[bool]
    critical_point: Optional[CriticalPoint] = None
    message: str = ""


@dataclass
class TightnessReport:
    sums: Dict[str, float]
    tail_bounds: Dict[str, float]
    sequences: Dict[str, Dict[int, float]]
    passed: bool


class CriticalSolver:
    """
    Numerical solver for bipartite, general and weighted degree sets.

    Floats drive bracketing and path-following; the final polish runs in
    mpmath at `mp_dps` digits.
    """

    def __init__(self, mp_dps: int = 30, tail_tolerance: float = 1e-14, step_factor: float = 1.05):
        self.mp_dps = mp_dps
        self.tail_tolerance = tail_tolerance
        self.step_factor = step_factor
        self.logger = logging.getLogger(self.__class__.__name__)

    def _precision(self):
        """Context manager raising mpmath precision to `mp_dps` digits."""
        return mpmath.workdps(self.mp_dps)

    def solve(self, spec: DegreeSpec) -> CriticalPoint:
        if spec.is_bipartite:
            return self.solve_bipartite_critical(spec)
        return self.solve_general_critical(spec)

    # ------------------------------------------------------------------
    # Bipartite
    # ------------------------------------------------------------------

    def _phi(self, spec: DegreeSpec, R: float) -> float:
        return bipartite_sums(spec, R, tol=self.tail_tolerance).phi - 1.0

    def _bipartite_bracket(self, spec: DegreeSpec) -> float:
        if spec.is_finite:
            high = 1.0
            while self._phi(spec, high) <= 0:
                high *= 2.0
                if high > 1e12:
                    raise SubcriticalError("weighted sum never reaches 1")
            return high
        for k in range(1, 13):
            high = 0.25 / spec.edge_scale ** 2 * (1.0 - 2.0 ** -k)
            if self._phi(spec, high) > 0:
                return high
        raise SubcriticalError(
            f"Σ q_2i (i-1) C(2i-1,i) R^i stays below 1 on (0, 1/4) for {spec.describe()}"
        )

    def solve_bipartite_critical(self, spec: DegreeSpec) -> CriticalPoint:
        """
        R0 solves Σ q_{2i} (i-1) C(2i-1, i) R0^i = 1; z0 = 1 / Σ q_{2i} i C(2i-1, i) R0^{i-1}.

        Raises:
            SubcriticalError: if the left-hand side stays below 1 on its convergence interval
        """
        spec.require_bipartite()
        high = self._bipartite_bracket(spec)
        R_float = optimize.brentq(lambda r: self._phi(spec, r), 0.0, high, xtol=1e-15, rtol=4 * np.finfo(float).eps)
        with self._precision():
            return self._polish_bipartite(spec, R_float)

    def _polish_bipartite(self, spec: DegreeSpec, R_float: float) -> CriticalPoint:
        mp = mpmath.mp
        one = mp.mpf(1)
        R = mp.mpf(R_float)
        tol = mp.mpf(10) ** (-self.mp_dps)
        for _ in range(60):
            sums = bipartite_sums(spec, R, one=one, tol=float(tol))
            step = (sums.phi - 1) / _phi_prime(sums, R)
            R -= step
            if abs(step) < tol * R * 10:
                break
        else:
            raise NumericFailure("Newton polish of R0 did not converge")
        sums = bipartite_sums(spec, R, one=one, tol=float(tol))
        z0 = 1 / sums.s1
        margin = None if spec.is_finite else float(1 - 4 * R)
        derivs = {
            "F_z": float(R / z0),
            "F_R": float(z0 * sums.s1),
            "F_RR": float(z0 * sums.s2),
            "F_RRR": float(z0 * sums.s3),
        }
        point = CriticalPoint(
            kind="bipartite", z0=float(z0), R0=float(R), margin=margin, characteristic=float(z0 * sums.s1),
            dbar=spec.dbar, derivs=derivs,
            decimals={"z0": mp.nstr(z0, self.mp_dps), "R0": mp.nstr(R, self.mp_dps)},
        )
        self.logger.info(f"Bipartite critical point for {spec.describe()}: z0={point.z0:.15g}, R0={point.R0:.15g}")
        return point

    def bipartite_R_at(self, spec: DegreeSpec, z: float) -> float:
        """Subcritical solution R(z) of R = z(1 + Σ q C R^i) for 0 < z < z0."""
        def residual(r: float) -> float:
            return z * (1.0 + bipartite_sums(spec, r, tol=self.tail_tolerance).s0) - r
        cp = self.solve_bipartite_critical(spec)
        if not 0 < z < cp.z0:
            raise SpecValidationError(f"z = {z} is not in (0, z0 = {cp.z0})")
        return optimize.brentq(residual, 0.0, cp.R0, xtol=1e-16)

    def bipartite_perturbed_z0(self, spec: DegreeSpec, R_start: float) -> float:
        """z0 of a (weight-perturbed) bipartite spec by Newton from a nearby R0."""
        R = R_start
        for _ in range(50):
            sums = bipartite_sums(spec, R, tol=self.tail_tolerance)
            step = (sums.phi - 1.0) / _phi_prime(sums, R)
            R -= step
            if abs(step) < 1e-15 * R:
                break
        else:
            raise NumericFailure("perturbed bipartite Newton did not converge")
        return 1.0 / bipartite_sums(spec, R, tol=self.tail_tolerance).s1

    # ------------------------------------------------------------------
    # General
    # ------------------------------------------------------------------

    def _sums(self, spec: DegreeSpec, L, R, one=1.0) -> BridgeSums:
        tol = self.tail_tolerance if isinstance(one, float) else 10.0 ** (-self.mp_dps)
        return bridge_sums(spec, L, R, one=one, tol=tol)

    def solve_at_z(self, spec: DegreeSpec, z: float, L: float, R: float,
                   iterations: int = 40) -> Optional[Tuple[float, float, BridgeSums]]:
        """Inner Newton solve of L = F, R = G at fixed z; None when it fails."""
        for _ in range(iterations):
            try:
                s = self._sums(spec, L, R)
            except OutsideConvergence:
                return None
            e1 = L - z * s.f
            e2 = R - z - z * s.g
            j11, j12 = 1.0 - z * s.f_L, -z * s.f_R
            j21, j22 = -z * s.g_L, 1.0 - z * s.g_R
            det = j11 * j22 - j12 * j21
            if det <= 0 or not math.isfinite(det):
                return None
            dL = (-e1 * j22 + e2 * j12) / det
            dR = (-e2 * j11 + e1 * j21) / det
            L, R = L + dL, R + dR
            if L < 0 or R <= 0:
                return None
            if abs(dL) <= 1e-15 * max(L, 1e-300) and abs(dR) <= 1e-15 * R:
                break
        else:
            return None
        try:
            s = self._sums(spec, L, R)
        except OutsideConvergence:
            return None
        if not spec.is_finite and convergence_margin(L, R) <= 0:
            return None
        return L, R, s

    def _initial_state(self, spec: DegreeSpec, z: float) -> Tuple[float, float]:
        L, R = 0.0, z
        for _ in range(200):
            s = self._sums(spec, L, R)
            L, R = z * s.f, z + z * s.g
        return L, R

    def solve_general_critical(self, spec: DegreeSpec) -> CriticalPoint:
        """
        Path-following in z (×1.05, halving on failure) until the characteristic
        value reaches 1, bisection on the bracket, then Newton polish of the
        3×3 system (L, R, z) in extended precision.

        Raises:
            SubcriticalError: if the characteristic value never reaches 1 with positive margin
        """
        z = 1e-3
        L, R = self._initial_state(spec, z)
        factor = self.step_factor
        steps = 0
        z_high = None
        while factor - 1.0 > 1e-10:
            candidate = z * factor
            solved = self.solve_at_z(spec, candidate, L, R)
            if solved is not None and characteristic_value(solved[2], candidate) < 1.0:
                z, (L, R) = candidate, solved[:2]
                steps += 1
                if steps % 10 == 0:
                    chi = characteristic_value(solved[2], z)
                    self.logger.debug(f"Path step {steps}: z={z:.10g} L={L:.6g} R={R:.6g} chi={chi:.8f}")
                if not spec.is_finite and convergence_margin(L, R) < 1e-9:
                    raise SubcriticalError(f"margin vanishes before criticality for {spec.describe()}")
            else:
                z_high = candidate
                factor = 1.0 + (factor - 1.0) / 2.0
                self.logger.debug(f"Halving path step at z={z:.10g}")
            if steps > 20000:
                raise NumericFailure("path-following did not terminate")
        if z_high is None:
            raise SubcriticalError(f"no critical point found for {spec.describe()}")

        low, high = z, z_high
        for _ in range(60):
            mid = 0.5 * (low + high)
            solved = self.solve_at_z(spec, mid, L, R)
            if solved is not None and characteristic_value(solved[2], mid) < 1.0:
                low, (L, R) = mid, solved[:2]
            else:
                high = mid
            if high - low <= 1e-15 * high:
                break
        self.logger.info(f"Bracketed critical z in [{low:.12g}, {high:.12g}] after {steps} path steps")
        with self._precision():
            return self._polish_general(spec, L, R, low)

    def _polish_general(self, spec: DegreeSpec, L: float, R: float, z: float) -> CriticalPoint:
        mp = mpmath.mp
        one = mp.mpf(1)
        L, R, z = mp.mpf(L), mp.mpf(R), mp.mpf(z)
        even_only = spec.is_bipartite
        if even_only:
            L = mp.mpf(0)
        tol = mp.mpf(10) ** (-(self.mp_dps - 4))
        for _ in range(80):
            s = self._sums(spec, L, R, one=one)
            if even_only:
                # L vanishes identically; solve R = G, G_R = 1 in (R, z)
                e = mp.matrix([R - z - z * s.g, 1 - z * s.g_R])
                J = mp.matrix([[1 - z * s.g_R, -1 - s.g], [-z * s.g_RR, -s.g_R]])
                step = mp.lu_solve(J, -e)
                dR, dz = step[0], step[1]
                dL = mp.mpf(0)
            else:
                e = mp.matrix(_system(s, L, R, z))
                J = mp.matrix(_system_jacobian(s, L, R, z))
                step = mp.lu_solve(J, -e)
                dL, dR, dz = step[0], step[1], step[2]
            L, R, z = L + dL, R + dR, z + dz
            if max(abs(dL), abs(dR), abs(dz)) < tol * z:
                break
        else:
            raise NumericFailure("extended-precision polish of the critical system did not converge")

        s = self._sums(spec, L, R, one=one)
        chi = characteristic_value(s, z)
        margin = convergence_margin(L, R)
        if not spec.is_finite and margin <= 0:
            raise SubcriticalError(f"critical point outside the convergence region (margin {float(margin):.3g})")
        derivs = {
            "F_z": float(s.f), "F_L": float(z * s.f_L), "F_R": float(z * s.f_R),
            "G_z": float(1 + s.g), "G_L": float(z * s.g_L), "G_R": float(z * s.g_R),
            "F_LL": float(z * s.f_LL), "F_LR": float(z * s.f_LR), "F_RR": float(z * s.f_RR),
            "G_LL": float(z * s.g_LL), "G_LR": float(z * s.g_LR), "G_RR": float(z * s.g_RR),
            "T": float(1 + s.tau),
        }
        point = CriticalPoint(
            kind="general", z0=float(z), R0=float(R), L0=float(L), margin=float(margin),
            characteristic=float(chi), dbar=1, derivs=derivs,
            decimals={"z0": mp.nstr(z, self.mp_dps), "R0": mp.nstr(R, self.mp_dps),
                      "L0": mp.nstr(L, self.mp_dps), "margin": mp.nstr(margin, self.mp_dps)},
        )
        self.logger.info(f"General critical point for {spec.describe()}: z0={point.z0:.15g}, "
                         f"L0={point.L0:.15g}, R0={point.R0:.15g}, margin={point.margin:.6g}")
        return point

    def general_perturbed_state(self, spec: DegreeSpec, start: Tuple[float, float, float]) -> Tuple[float, float, float]:
        """Float Newton on the 3×3 critical system, warm-started at a nearby critical point."""
        L, R, z = start
        even_only = spec.is_bipartite
        for _ in range(50):
            s = self._sums(spec, L, R)
            if even_only:
                e = np.array([R - z - z * s.g, 1 - z * s.g_R])
                J = np.array([[1 - z * s.g_R, -1 - s.g], [-z * s.g_RR, -s.g_R]])
                dR, dz = np.linalg.solve(J, -e)
                dL = 0.0
            else:
                e = np.array(_system(s, L, R, z), dtype=float)
                J = np.array(_system_jacobian(s, L, R, z), dtype=float)
                dL, dR, dz = np.linalg.solve(J, -e)
            L, R, z = L + dL, R + dR, z + dz
            if max(abs(dL), abs(dR), abs(dz)) < 1e-15 * z:
                break
        else:
            raise NumericFailure("perturbed critical Newton did not converge")
        return float(L), float(R), float(z)

    # ------------------------------------------------------------------
    # Weighted specs and diagnostics
    # ------------------------------------------------------------------

    def check_qboltzmann(self, spec: DegreeSpec) -> QBoltzmannReport:
        """
        Classify a weighted spec as critical-ok, subcritical or rejected.

        The α >= -3/2 divergence argument is reported next to the numeric verdict.
        """
        alpha = spec.weights.alpha if spec.weights.rule == "power" else None
        heuristic = None if alpha is None else alpha >= -1.5
        try:
            point = self.solve(spec)
        except SpecValidationError as exc:
            return QBoltzmannReport("rejected", alpha, heuristic, None, message=str(exc))
        except SubcriticalError as exc:
            agrees = None if heuristic is None else not heuristic
            return QBoltzmannReport("subcritical", alpha, heuristic, agrees, message=str(exc))
        if point.margin is not None and point.margin <= 0:
            return QBoltzmannReport("subcritical", alpha, heuristic, heuristic is False, point)
        agrees = None if heuristic is None else heuristic
        if agrees is False:
            self.logger.warning(f"Numeric verdict critical-ok disagrees with the alpha heuristic (alpha={alpha})")
        return QBoltzmannReport("critical-ok", alpha, heuristic, agrees, point)

    def tightness_diagnostics(self, spec: DegreeSpec, point: Optional[CriticalPoint] = None,
                              sample: Tuple[int, ...] = (5, 10, 20, 40, 80)) -> TightnessReport:
        """
        Summability of the x_i-derivatives at the critical point, plus the
        decay of the sequences that have to be o(1) or O(1) in i.
        """
        point = point or self.solve(spec)
        degrees = self._diagnostic_degrees(spec)
        if point.kind == "bipartite":
            z0, R0 = point.z0, point.R0
            rows = {}
            for d in degrees:
                i = d // 2
                c = weight_value(spec, d) * math.comb(2 * i - 1, i)
                rows[d] = {
                    "F_x": z0 * c * R0 ** i,
                    "F_yx": z0 * i * c * R0 ** (i - 1),
                    "F_xx": 0.0,
                    "F_zx": c * R0 ** i,
                    "F_yyx": z0 * i * (i - 1) * c * R0 ** (i - 2),
                    "F_zyx": i * c * R0 ** (i - 1),
                    "F_yyyx": z0 * i * (i - 1) * (i - 2) * c * R0 ** (i - 3),
                }
            sums = {"sum_F_x": sum(r["F_x"] for r in rows.values()),
                    "sum_F_yx_sq": sum(r["F_yx"] ** 2 for r in rows.values()),
                    "sum_F_xx": 0.0}
            last = {"sum_F_x": "F_x", "sum_F_yx_sq": "F_yx", "sum_F_xx": "F_xx"}
            decay = 4.0 * R0
            o_small, o_bounded = ("F_zx", "F_yyx"), ("F_zyx", "F_yyyx")
        else:
            L0, R0, z0 = point.state()
            jmax = max(degrees) + 1
            P = p_values(L0, R0, jmax)
            G_L, F_L = point.derivs["G_L"], point.derivs["F_L"]
            rows = {}
            for d in degrees:
                w = weight_value(spec, d)
                F_x = z0 * w * P[d - 1]
                G_x = 0.5 * z0 * w * (P[d] - L0 * P[d - 1])
                rows[d] = {"F_x": F_x, "G_x": G_x, "H_x": G_x + G_L * F_x / (1 - F_L),
                           "F_zx": w * P[d - 1], "H_x_scaled": (G_x + G_L * F_x / (1 - F_L)) * d}
            sums = {"sum_H_x": sum(r["H_x"] for r in rows.values()),
                    "sum_F_x": sum(r["F_x"] for r in rows.values()),
                    "sum_H_x_sq": sum(r["H_x"] ** 2 for r in rows.values())}
            last = {"sum_H_x": "H_x", "sum_F_x": "F_x", "sum_H_x_sq": "H_x"}
            decay = L0 + 2.0 * math.sqrt(R0)
            o_small, o_bounded = ("F_zx",), ("H_x_scaled",)

        tail_bounds = {}
        top = max(rows)
        for name, column in last.items():
            if spec.is_finite:
                tail_bounds[name] = 0.0
            else:
                term = abs(rows[top][column]) ** (2 if name.endswith("_sq") else 1)
                ratio = decay ** (2 if name.endswith("_sq") else 1)
                tail_bounds[name] = term * ratio / (1 - ratio) if ratio < 1 else math.inf
        sequences = {key: {i: rows[i][key] for i in sample if i in rows} for key in (*o_small, *o_bounded)}

        passed = all(math.isfinite(v) for v in sums.values())
        passed &= all(bound <= 1e-12 * max(abs(sums[name]), 1e-300) or bound == 0.0
                      for name, bound in tail_bounds.items())
        for key in o_small:
            values = [abs(v) for v in sequences[key].values()]
            passed &= all(b <= a * (1 + 1e-12) for a, b in zip(values, values[1:]))
        for key in o_bounded:
            values = [abs(v) for v in sequences[key].values()]
            passed &= not values or max(values) < 1e6 * (values[0] + 1e-300)
        return TightnessReport(sums=sums, tail_bounds=tail_bounds, sequences=sequences, passed=bool(passed))

    @staticmethod
    def _diagnostic_degrees(spec: DegreeSpec) -> List[int]:
        if spec.is_finite:
            return list(spec.members)
        return spec.degrees_up_to(400)


def _phi_prime(sums: BipartiteSums, R):
    """dΦ/dR = Σ q (i-1) i C(2i-1, i) R^{i-1} = R S_2."""
    return R * sums.s2


def _system(s: BridgeSums, L, R, z):
    """Residuals of L = F, R = G and the vanishing Jacobian determinant."""
    det = (1 - z * s.f_L) * (1 - z * s.g_R) - z * z * s.f_R * s.g_L
    return [L - z * s.f, R - z - z * s.g, det]


def _system_jacobian(s: BridgeSums, L, R, z):
    a, b = 1 - z * s.f_L, 1 - z * s.g_R
    row3 = [
        -z * s.f_LL * b - z * s.g_LR * a - z * z * (s.f_LR * s.g_L + s.f_R * s.g_LL),
        -z * s.f_LR * b - z * s.g_RR * a - z * z * (s.f_RR * s.g_L + s.f_R * s.g_LR),
        -s.f_L * b - s.g_R * a - 2 * z * s.f_R * s.g_L,
    ]
    return [
        [a, -z * s.f_R, -s.f],
        [-z * s.g_L, b, -1 - s.g],
        row3,
    ]
