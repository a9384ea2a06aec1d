# mapdeg/genus/cells.py
"""
Cell, edge and vertex series of labelled genus-g mobiles (all-even degrees).

Laurent series in the label variable s are stored as dicts {exponent: ring
element}. With U = R/(tz):

    P  = t z² U² · P̃(s),   P̃_i = Σ_m x_{2(m+2)} a_{m,i} R^m
    G  = 1/(1 - P)
    H  = z · P̃ · G          (edge between two white vertices)
    K  = t z U² · G          (edge between two black vertices)

with a_{m,i} = Σ_{k+l=m} C(2k+i+1, k) C(2l-i+1, l).
"""
import logging
import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy import optimize, special

from mapdeg.criticality import CriticalSolver
from mapdeg.degrees import DegreeSpec
from mapdeg.errors import NumericFailure, SpecValidationError
from mapdeg.genus.rings import ExactRing, SeriesRing
from mapdeg.genus.schemes import BLACK, WHITE
from mapdeg.kernel import binomial
from mapdeg.series import SeriesEngine

logger = logging.getLogger(__name__)

Laurent = Dict[int, object]
INFINITE = 10 ** 9


@lru_cache(maxsize=None)
def cell_coefficient(m: int, i: int) -> int:
    """a_{m,i}: number of cells with m inner legs and increment i."""
    return sum(binomial(2 * k + i + 1, k) * binomial(2 * (m - k) - i + 1, m - k) for k in range(m + 1))


@lru_cache(maxsize=None)
def corner_polynomial(delta: int, order: int) -> Tuple[int, ...]:
    """f_δ(y) = Σ_i C(2i+δ+1, i) y^i truncated at y^order."""
    return tuple(binomial(2 * i + delta + 1, i) for i in range(order + 1))


def corner_cost(delta: int) -> int:
    """Lowest y-power of f_δ."""
    return max(0, -delta - 1)


def laurent_mul(ring: SeriesRing, a: Laurent, b: Laurent, valuations: Optional[Tuple[Dict, Dict]] = None) -> Laurent:
    """Product of two Laurent series in s, skipping pairs beyond the z-truncation."""
    va, vb = valuations or (valuation_table(ring, a), valuation_table(ring, b))
    out: Laurent = {}
    for i, x in a.items():
        for j, y in b.items():
            if va[i] + vb[j] > ring.order:
                continue
            product = ring.mul(x, y)
            out[i + j] = ring.add(out[i + j], product) if i + j in out else product
    return {k: v for k, v in out.items() if ring.valuation(v) is not None}


def valuation_table(ring: SeriesRing, a: Laurent) -> Dict[int, int]:
    table = {}
    for k, x in a.items():
        v = ring.valuation(x)
        table[k] = INFINITE if v is None else v
    return table


@dataclass
class CellSeries:
    """Truncated cell, edge and corner series for one degree set and one ring."""
    spec: DegreeSpec
    ring: SeriesRing
    order: int
    U: object
    R_powers: List
    P_tilde: Laurent
    P: Laurent
    G: Laurent
    H: Laurent
    K: Laurent
    valuations: Dict[str, Dict[int, int]] = field(default_factory=dict)
    vertex_cache: Dict[Tuple[int, Tuple[int, ...]], object] = field(default_factory=dict, repr=False)

    def __post_init__(self):
        for name in ("P", "G", "H", "K"):
            self.valuations[name] = valuation_table(self.ring, getattr(self, name))

    def edge(self, cu: str, cv: str, d: int):
        """Edge series for a dart at a cu-vertex reaching a cv-vertex with label difference d."""
        name, index = _edge_index(cu, cv, d)
        return getattr(self, name).get(index)

    def edge_valuation(self, cu: str, cv: str, d: int) -> int:
        name, index = _edge_index(cu, cv, d)
        return self.valuations[name].get(index, INFINITE)

    def min_edge_valuation(self, cu: str, cv: str) -> int:
        name, _ = _edge_index(cu, cv, 0)
        return min(self.valuations[name].values(), default=INFINITE)

    def support(self, name: str, n: int) -> List[int]:
        """s-exponents with a nonzero coefficient at z^n."""
        out = []
        for k, x in getattr(self, name).items():
            v = self.valuations[name][k]
            if v <= n and _has_order(self.ring, x, n):
                out.append(k)
        return sorted(out)


def _edge_index(cu: str, cv: str, d: int) -> Tuple[str, int]:
    if cu == WHITE and cv == BLACK:
        return "G", d + 1
    if cu == BLACK and cv == WHITE:
        return "G", d - 1
    if cu == WHITE:
        return "H", d
    return "K", d


def _has_order(ring: SeriesRing, x, n: int) -> bool:
    if isinstance(ring, ExactRing):
        return any(ring.tpoly(x, n))
    return bool(np.any(x[n] != 0.0))


class CellBuilder:
    """Builds CellSeries from the exact R of the bipartite equation."""

    def __init__(self, engine: SeriesEngine):
        self.engine = engine
        self.logger = logging.getLogger(self.__class__.__name__)

    def build(self, spec: DegreeSpec, N: int, ring: SeriesRing) -> CellSeries:
        """
        Args:
            spec: All-even degree set
            N: z-truncation order
            ring: Arithmetic strategy with ring.order == N

        Returns:
            CellSeries with P, G, H, K and the powers of R
        """
        spec.require_bipartite()
        if ring.order != N:
            raise SpecValidationError(f"ring order {ring.order} does not match N = {N}")
        R = self.engine.solve_R_bipartite(spec, N + 1)
        R_el = ring.from_tpolys(R.coeffs[:N + 1])
        # U = R/(tz): drop one z and one t
        U = ring.from_tpolys([tuple(R.poly(n + 1)[1:]) for n in range(N + 1)])

        R_powers = [ring.one()]
        for _ in range(N):
            R_powers.append(ring.mul(R_powers[-1], R_el))

        P_tilde: Laurent = {}
        for m in range(N):
            x = spec.exact_weight(2 * (m + 2))
            if not x:
                continue
            for i in range(-m - 1, m + 2):
                a = cell_coefficient(m, i)
                if a:
                    term = ring.scale(R_powers[m], a * x)
                    P_tilde[i] = ring.add(P_tilde[i], term) if i in P_tilde else term

        tz2U2 = ring.times_t(ring.shift(ring.mul(U, U), 2))
        P = {i: ring.mul(tz2U2, p) for i, p in P_tilde.items()}
        P = {i: p for i, p in P.items() if ring.valuation(p) is not None}

        G: Laurent = {0: ring.one()}
        if P:
            p_val = valuation_table(ring, P)
            for _ in range((N + 1) // 2):
                product = laurent_mul(ring, P, G, (p_val, valuation_table(ring, G)))
                product[0] = ring.add(product[0], ring.one()) if 0 in product else ring.one()
                G = product

        H = {k: ring.shift(v, 1) for k, v in laurent_mul(ring, P_tilde, G).items()} if P_tilde else {}
        H = {k: v for k, v in H.items() if ring.valuation(v) is not None}
        tzU2 = ring.times_t(ring.shift(ring.mul(U, U), 1))
        K = {k: ring.mul(tzU2, v) for k, v in G.items()}
        K = {k: v for k, v in K.items() if ring.valuation(v) is not None}

        self.logger.info(f"Cell series for {spec.describe()} to z^{N}: "
                         f"{len(P)} cell exponents, {len(G)} edge exponents ({ring.name} ring)")
        return CellSeries(spec=spec, ring=ring, order=N, U=U, R_powers=R_powers,
                          P_tilde=P_tilde, P=P, G=G, H=H, K=K)

    def vertex_series(self, cells: CellSeries, degree: int, deltas: Sequence[int]):
        """
        V(δ) = Σ_I [y^I](Π_k f_{δ_k}(y)) · x_{2(degree+I)} · R^I for a black
        scheme vertex whose consecutive corner labels differ by δ.
        """
        return _vertex_series(cells, degree, tuple(sorted(deltas)))


def _vertex_series(cells: CellSeries, degree: int, key: Tuple[int, ...]):
    if (degree, key) in cells.vertex_cache:
        return cells.vertex_cache[degree, key]
    ring, N = cells.ring, cells.order
    low = sum(corner_cost(delta) for delta in key)
    result = None
    if low <= N:
        product = [1] + [0] * (N - low)
        for delta in key:
            f = corner_polynomial(delta, N)[corner_cost(delta):]
            product = [sum(product[j] * f[k - j] for j in range(k + 1) if k - j < len(f))
                       for k in range(len(product))]
        for offset, c in enumerate(product):
            I = low + offset
            x = cells.spec.exact_weight(2 * (degree + I))
            if c and x:
                term = ring.scale(cells.R_powers[I], c * x)
                result = term if result is None else ring.add(result, term)
    cells.vertex_cache[degree, key] = result
    return result


# ----------------------------------------------------------------------
# Numeric decay of [s^Δ] 1/(1 - P) below the critical point
# ----------------------------------------------------------------------

@dataclass
class DecayReport:
    z: float
    z0: float
    R: float
    p_at_one: float
    alpha: float
    rate: float
    deltas_used: int
    tolerance: float
    passed: bool

    def to_dict(self) -> Dict:
        return dict(self.__dict__)


def _log_binomial_grid(n: np.ndarray, k: np.ndarray) -> np.ndarray:
    valid = (k >= 0) & (n >= k)
    out = np.full(np.broadcast(n, k).shape, -np.inf)
    nn, kk = np.broadcast_arrays(n, k)
    out[valid] = (special.gammaln(nn[valid] + 1) - special.gammaln(kk[valid] + 1)
                  - special.gammaln(nn[valid] - kk[valid] + 1))
    return out


def numeric_cell_coefficients(spec: DegreeSpec, R: float, tol: float = 1e-17,
                              max_m: int = 4000) -> Dict[int, float]:
    """Laurent coefficients of P at t = 1 for a numeric R (P = R²·P̃)."""
    p: Dict[int, float] = {}
    total = 0.0
    log_R = math.log(R)
    m = 0
    while m <= max_m:
        x = spec.weight(2 * (m + 2))
        if x:
            i = np.arange(-m - 1, m + 2)[None, :]
            k = np.arange(m + 1)[:, None]
            logs = (_log_binomial_grid(2 * k + i + 1, k) + _log_binomial_grid(2 * (m - k) - i + 1, m - k))
            row = np.exp(logs + (m + 2) * log_R).sum(axis=0) * x
            for idx, value in zip(range(-m - 1, m + 2), row):
                if value:
                    p[idx] = p.get(idx, 0.0) + float(value)
            block = float(row.sum())
            total += block
            if block < tol * total and m > 8:
                break
        if spec.is_finite and 2 * (m + 2) >= spec.max_degree:
            break
        m += 1
    else:
        raise NumericFailure(f"cell sum did not converge at R = {R:.6g}")
    return p


def decay_rate_check(spec: DegreeSpec, z: float, solver: Optional[CriticalSolver] = None,
                     points: int = 4096, tolerance: float = 1e-3) -> DecayReport:
    """
    Compare the geometric decay of [s^Δ] 1/(1 - P) with the root α in (0, 1)
    of P(s) = 1, at a numeric z below z0.

    Raises:
        SpecValidationError: if z is not in (0.5 z0, 0.95 z0)
        NumericFailure: if P(s) = 1 has no root in (0, 1)
    """
    spec.require_bipartite()
    solver = solver or CriticalSolver()
    z0 = solver.solve_bipartite_critical(spec).z0
    if not 0.5 * z0 < z < 0.95 * z0:
        raise SpecValidationError(f"z = {z} is not in (0.5 z0, 0.95 z0) with z0 = {z0:.12g}")
    R = solver.bipartite_R_at(spec, z)
    coeffs = numeric_cell_coefficients(spec, R)
    exps = np.array(sorted(coeffs))
    values = np.array([coeffs[i] for i in exps])

    def P(s: float) -> float:
        return float(np.sum(values * s ** exps.astype(float)))

    p_one = P(1.0)
    if p_one >= 1.0:
        raise NumericFailure(f"P(1) = {p_one:.6g} >= 1 at z = {z:.6g}")

    # coefficients of 1/(1 - P) on |s| = 1
    s = np.exp(2j * np.pi * np.arange(points) / points)
    Ps = np.zeros(points, dtype=complex)
    for i, value in zip(exps, values):
        Ps += value * s ** int(i)
    c = np.real(np.fft.fft(1.0 / (1.0 - Ps))) / points
    noise = 1e-9 * abs(c[0])
    usable = [d for d in range(1, points // 2) if c[d] > noise and c[d + 1] > noise]
    if len(usable) < 2:
        raise NumericFailure("edge coefficients fall below noise immediately")
    last = usable[-1]
    for previous, current in zip(usable, usable[1:]):
        if current != previous + 1:
            last = previous
            break
    rate = float(c[last + 1] / c[last])

    lo = 0.5
    while P(lo) <= 1.0:
        lo /= 2
        if lo < 1e-12:
            raise NumericFailure("P(s) = 1 has no root in (0, 1)")
    alpha = optimize.brentq(lambda x: P(x) - 1.0, lo, 1.0, xtol=1e-15)
    passed = abs(rate - alpha) < tolerance
    logger.info(f"Decay check at z={z:.6g}: rate={rate:.8f}, alpha={alpha:.8f}, passed={passed}")
    return DecayReport(z=z, z0=z0, R=R, p_at_one=p_one, alpha=float(alpha), rate=rate,
                       deltas_used=last + 1, tolerance=tolerance, passed=passed)
