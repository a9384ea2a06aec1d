# mapdeg/series.py
"""
Truncated power series in z whose coefficients are exact polynomials in the
vertex marker t, and the fixed-point solvers for the mobile equations.

Bipartite sets use Lagrange inversion of R = z(t + W(R)). The general system
for (L, R, T) is solved order by order on integers, with the t-polynomials
packed into a single integer (t = 2^B) so that every product is one big-int
multiplication.
"""
import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple, Union

from mapdeg.degrees import DegreeSpec
from mapdeg.errors import SpecValidationError
from mapdeg.kernel import binomial, motzkin_bridge, motzkin_firstdown, motzkin_plus

logger = logging.getLogger(__name__)


class Jet:
    """
    Truncated Taylor expansion c0 + c1·ε + c2·ε² in a single marker x_d = 1 + ε.

    Components are exact (int or Fraction). Mixes freely with plain numbers.
    """
    __slots__ = ("c",)

    def __init__(self, components: Sequence):
        self.c = tuple(components)

    @classmethod
    def marker(cls, weight, order: int) -> "Jet":
        """Jet of q·x_d at x_d = 1: q + q·ε."""
        return cls([weight, weight] + [0] * (order - 1))

    def _lift(self, other) -> Tuple:
        if isinstance(other, Jet):
            return other.c
        return (other,) + (0,) * (len(self.c) - 1)

    def __add__(self, other):
        o = self._lift(other)
        return Jet([a + b for a, b in zip(self.c, o)])

    __radd__ = __add__

    def __sub__(self, other):
        o = self._lift(other)
        return Jet([a - b for a, b in zip(self.c, o)])

    def __rsub__(self, other):
        o = self._lift(other)
        return Jet([b - a for a, b in zip(self.c, o)])

    def __mul__(self, other):
        if not isinstance(other, Jet):
            return Jet([a * other for a in self.c])
        n = len(self.c)
        o = other.c
        return Jet([sum(self.c[i] * o[k - i] for i in range(k + 1)) for k in range(n)])

    __rmul__ = __mul__

    def __floordiv__(self, other: int):
        return Jet([_exact_div(a, other) for a in self.c])

    def __truediv__(self, other):
        return Jet([Fraction(a) / other for a in self.c])

    def __eq__(self, other):
        return self.c == self._lift(other)

    def __hash__(self):
        return hash(self.c)

    def __bool__(self):
        return any(self.c)

    def __repr__(self):
        return f"Jet{self.c}"

    def bit_length(self) -> int:
        return max(int(a).bit_length() for a in self.c)

    @property
    def value(self):
        return self.c[0]


Coeff = Union[int, Fraction, Jet]
TPoly = Tuple[Coeff, ...]


def _exact_div(value: int, divisor: int) -> int:
    quotient, remainder = divmod(value, divisor)
    if remainder:
        raise ArithmeticError(f"{value} is not divisible by {divisor}")
    return quotient


def _normalize(value):
    if isinstance(value, Fraction) and value.denominator == 1:
        return value.numerator
    if isinstance(value, Jet):
        return Jet([_normalize(a) for a in value.c])
    return value


def _bits(value) -> int:
    return value.bit_length() if isinstance(value, Jet) else int(value).bit_length()


@dataclass(frozen=True)
class TruncSeries:
    """
    Series Σ_{n<=N} p_n(t) z^n, each p_n stored as a dense coefficient tuple
    in increasing powers of t (empty tuple for zero).
    """
    order: int
    coeffs: Tuple[TPoly, ...]
    jet_degree: Optional[int] = None

    def __post_init__(self):
        if len(self.coeffs) != self.order + 1:
            raise ValueError("coefficient count does not match the order")
        for n, poly in enumerate(self.coeffs):
            if len(poly) > n + 2:
                raise ValueError(f"t-degree exceeds {n + 1} at z^{n}")

    def poly(self, n: int) -> TPoly:
        return self.coeffs[n]

    def coefficient(self, n: int, k: int) -> Coeff:
        poly = self.coeffs[n]
        return poly[k] if k < len(poly) else 0

    def at_t_one(self) -> List[Coeff]:
        return [_normalize(sum(poly, 0)) for poly in self.coeffs]

    def values_at_one(self) -> List[int]:
        """Plain (non-jet) coefficients at t = 1."""
        return [v.value if isinstance(v, Jet) else v for v in self.at_t_one()]

    def truncate(self, order: int) -> "TruncSeries":
        return TruncSeries(order, self.coeffs[:order + 1], self.jet_degree)


def _trim(poly: List[Coeff]) -> TPoly:
    while poly and not poly[-1]:
        poly.pop()
    return tuple(_normalize(c) for c in poly)


def integrate_in_t(series: TruncSeries) -> TruncSeries:
    """Termwise antiderivative in t with zero constant term."""
    out = []
    for poly in series.coeffs:
        lifted = [0] + [Fraction(1, k + 1) * c if not isinstance(c, Jet) else c / (k + 1)
                        for k, c in enumerate(poly)]
        out.append(_trim(lifted))
    order = series.order
    # the antiderivative raises t-degree by one; keep within the stored bound
    for n, poly in enumerate(out):
        if len(poly) > n + 2:
            raise ValueError(f"integrated t-degree exceeds {n + 1} at z^{n}")
    return TruncSeries(order, tuple(out), series.jet_degree)


def evaluate_at_one(series: TruncSeries) -> List[int]:
    """
    Integer coefficients of a plain series at t = 1.

    Raises:
        ArithmeticError: if a coefficient is not an integer
    """
    out = []
    for n, value in enumerate(series.values_at_one()):
        if isinstance(value, Fraction):
            if value.denominator != 1:
                raise ArithmeticError(f"non-integral coefficient {value} at z^{n}")
            value = value.numerator
        out.append(int(value))
    return out


def pack(poly: Sequence[int], width: int) -> int:
    """Kronecker substitution t = 2^width for a polynomial with nonnegative coefficients."""
    value = 0
    for c in reversed(poly):
        value = (value << width) + c
    return value


def unpack(value: int, width: int) -> List[int]:
    mask = (1 << width) - 1
    out = []
    while value:
        out.append(value & mask)
        value >>= width
    return out


def _unpack_coeff(value: Coeff, width: int) -> List[Coeff]:
    if not isinstance(value, Jet):
        return unpack(value, width)
    parts = [unpack(c, width) for c in value.c]
    size = max(len(p) for p in parts)
    return [Jet([p[k] if k < len(p) else 0 for p in parts]) for k in range(size)]


def mul_trunc(a: List[Coeff], b: List[Coeff], order: int) -> List[Coeff]:
    """Product of two coefficient lists truncated at z^order, skipping leading zeros."""
    out: List[Coeff] = [0] * (order + 1)
    va = next((i for i, x in enumerate(a) if x), None)
    vb = next((i for i, x in enumerate(b) if x), None)
    if va is None or vb is None:
        return out
    for i in range(va, min(len(a), order + 1 - vb)):
        ai = a[i]
        if not ai:
            continue
        for j in range(vb, min(len(b), order + 1 - i)):
            bj = b[j]
            if bj:
                out[i + j] = out[i + j] + ai * bj
    return out


class SeriesEngine:
    """
    Solver for the bipartite equation and the general (L, R, T) system.

    Order guards are injected by the service factory.
    """

    def __init__(self, max_order_bipartite: int = 400, max_order_general: int = 80):
        self.max_order_bipartite = max_order_bipartite
        self.max_order_general = max_order_general
        self.logger = logging.getLogger(self.__class__.__name__)

    # ------------------------------------------------------------------
    # Weights
    # ------------------------------------------------------------------

    @staticmethod
    def _weight(spec: DegreeSpec, degree: int, jet: Optional[int], jet_order: int) -> Coeff:
        q = spec.exact_weight(degree)
        if jet is not None and degree == jet and q:
            return Jet.marker(q, jet_order)
        return q

    def _check_order(self, N: int, limit: int) -> None:
        if N < 1:
            raise SpecValidationError(f"order must be at least 1, got {N}")
        if N > limit:
            raise SpecValidationError(f"order {N} exceeds the configured maximum {limit}")

    # ------------------------------------------------------------------
    # Bipartite: R = tz + z Σ q_{2i} C(2i-1, i) R^i
    # ------------------------------------------------------------------

    def bipartite_power_table(self, spec: DegreeSpec, N: int, jet: Optional[int] = None,
                              jet_order: int = 2) -> List[List[Coeff]]:
        """
        Rows a[k][p] = [u^p] W(u)^k for k, p <= N, where W(u) = Σ q_{2i} C(2i-1,i) u^i.
        """
        W: List[Coeff] = [0] * (N + 1)
        for i in range(1, N + 1):
            if spec.contains(2 * i):
                W[i] = binomial(2 * i - 1, i) * self._weight(spec, 2 * i, jet, jet_order)
        one: Coeff = Jet([1] + [0] * jet_order) if jet is not None else 1
        rows = [[one] + [0] * N]
        for k in range(1, N + 1):
            rows.append(mul_trunc(rows[-1], W, N))
        return rows

    def solve_R_bipartite(self, spec: DegreeSpec, N: int, jet: Optional[int] = None,
                          jet_order: int = 2) -> TruncSeries:
        """
        Exact R truncated at z^N.

        Lagrange inversion gives [z^n]R = (1/n) Σ_k C(n,k) t^{n-k} [u^{n-1}] W^k,
        so coefficient n only uses rows of W-powers below n.

        Args:
            spec: All-even degree set
            N: Truncation order
            jet: Optional marked degree d for jets in x_d
            jet_order: 1 or 2

        Returns:
            TruncSeries for R
        """
        spec.require_bipartite()
        self._check_order(N, self.max_order_bipartite)
        rows = self.bipartite_power_table(spec, max(N - 1, 0), jet, jet_order)
        coeffs: List[TPoly] = [()]
        for n in range(1, N + 1):
            poly: List[Coeff] = [0] * (n + 1)
            for k in range(0, n):
                a = rows[k][n - 1]
                if a:
                    poly[n - k] = (binomial(n, k) * a) // n
            coeffs.append(_trim(poly))
        self.logger.debug(f"Solved bipartite R for {spec.describe()} up to z^{N}")
        return TruncSeries(N, tuple(coeffs), jet)

    def dmdt_bipartite(self, spec: DegreeSpec, N: int, jet: Optional[int] = None,
                       jet_order: int = 2) -> TruncSeries:
        """∂M/∂t = 2(R/z - t), truncated at z^N."""
        R = self.solve_R_bipartite(spec, N + 1, jet, jet_order)
        coeffs: List[TPoly] = [()]
        for n in range(1, N + 1):
            coeffs.append(tuple(2 * c for c in R.poly(n + 1)))
        return TruncSeries(N, tuple(coeffs), jet)

    # ------------------------------------------------------------------
    # General system
    # ------------------------------------------------------------------

    def _weight_tables(self, spec: DegreeSpec, size: int, jet: Optional[int], jet_order: int):
        """Sparse rows (m, c) for the F, G and T sums, keyed by ell."""
        cF: Dict[int, List[Tuple[int, Coeff]]] = {}
        cG: Dict[int, List[Tuple[int, Coeff]]] = {}
        cT: Dict[int, List[Tuple[int, Coeff]]] = {}
        for ell in range(size + 1):
            for m in range(size + 1):
                w = self._weight(spec, ell + 2 * m + 1, jet, jet_order)
                if w:
                    cF.setdefault(ell, []).append((m, w * motzkin_bridge(ell, m)))
                w = self._weight(spec, ell + 2 * m + 2, jet, jet_order)
                if w:
                    cG.setdefault(ell, []).append((m, w * motzkin_plus(ell, m)))
                if ell or m:
                    w = self._weight(spec, ell + 2 * m, jet, jet_order)
                    if w:
                        cT.setdefault(ell, []).append((m, w * motzkin_firstdown(ell, m)))
        return cF, cG, cT

    def _lrt_run(self, spec: DegreeSpec, N: int, t_value: int, jet: Optional[int], jet_order: int):
        """
        Order-by-order solution of

            L = z Σ q_{l+2m+1} B_{l,m} L^l R^m
            R = tz + z Σ q_{l+2m+2} B⁺_{l,m} L^l R^{m+1}
            T = 1 + Σ_{(l,m) != 0} q_{l+2m} B̄_{l,m} L^l R^m

        with t a plain integer. Returns coefficient lists of L, R (to N+1) and T (to N).
        """
        top = N + 1
        cF, cG, cT = self._weight_tables(spec, top, jet, jet_order)
        zero: Coeff = Jet([0] * (jet_order + 1)) if jet is not None else 0
        one: Coeff = Jet([1] + [0] * jet_order) if jet is not None else 1

        L: List[Coeff] = [zero] * (top + 1)
        R: List[Coeff] = [zero] * (top + 1)
        # PL[l][k] = [z^k] L^l, PR[m][k] = [z^k] R^m
        PL = [[one] + [zero] * top] + [[zero] * (top + 1) for _ in range(top)]
        PR = [[one] + [zero] * top] + [[zero] * (top + 1) for _ in range(top + 1)]
        # GX[l][k] = Σ_m c^X_{l,m} [z^k] R^{m(+1)}
        GF = {ell: [zero] * (top + 1) for ell in cF}
        GG = {ell: [zero] * (top + 1) for ell in cG}
        GT = {ell: [zero] * (top + 1) for ell in cT}

        def refresh_g(k: int) -> None:
            for table, source, shift in ((GF, cF, 0), (GG, cG, 1), (GT, cT, 0)):
                for ell, row in source.items():
                    acc = zero
                    for m, c in row:
                        if m + shift > k:
                            break
                        p = PR[m + shift][k]
                        if p:
                            acc = acc + c * p
                    table[ell][k] = acc

        def h(table, k: int) -> Coeff:
            acc = zero
            for ell, g in table.items():
                if ell > k:
                    continue
                pl = PL[ell]
                for j in range(ell, k + 1):
                    a = pl[j]
                    if a:
                        b = g[k - j]
                        if b:
                            acc = acc + a * b
            return acc

        refresh_g(0)
        T: List[Coeff] = [one] + [zero] * N
        for n in range(1, top + 1):
            L[n] = h(GF, n - 1)
            R[n] = h(GG, n - 1) + (t_value if n == 1 else 0)
            PL[1][n] = L[n]
            PR[1][n] = R[n]
            for ell in range(2, min(n, top) + 1):
                PL[ell][n] = sum((L[j] * PL[ell - 1][n - j] for j in range(1, n - ell + 2)
                                  if L[j] and PL[ell - 1][n - j]), zero)
            for m in range(2, min(n, top + 1) + 1):
                PR[m][n] = sum((R[j] * PR[m - 1][n - j] for j in range(1, n - m + 2)
                                if R[j] and PR[m - 1][n - j]), zero)
            refresh_g(n)
            if n <= N:
                T[n] = h(GT, n)
        return L, R, T

    def solve_LRT_general(self, spec: DegreeSpec, N: int, jet: Optional[int] = None,
                          jet_order: int = 2) -> Tuple[TruncSeries, TruncSeries, TruncSeries]:
        """
        Exact L, R, T truncated at z^N.

        A bounding run at t = 1 bounds every final coefficient; the packed run at
        t = 2^B then decodes uniquely.
        """
        L, R, T, _ = self._general(spec, N, jet, jet_order)
        return L, R, T

    def dmdt_general(self, spec: DegreeSpec, N: int, jet: Optional[int] = None,
                     jet_order: int = 2) -> TruncSeries:
        """∂M/∂t = R/z - t + T, truncated at z^N."""
        return self._general(spec, N, jet, jet_order)[3]

    def _general(self, spec: DegreeSpec, N: int, jet: Optional[int], jet_order: int):
        self._check_order(N, self.max_order_general)
        bound_L, bound_R, bound_T = self._lrt_run(spec, N, 1, jet, jet_order)
        bound_d = [bound_R[n + 1] + bound_T[n] - (1 if n == 0 else 0) for n in range(N + 1)]
        width = 1 + max(_bits(v) for v in (*bound_L, *bound_R, *bound_T, *bound_d))
        self.logger.debug(f"Packing t with slot width {width} bits for order {N}")

        t_packed = 1 << width
        L, R, T = self._lrt_run(spec, N, t_packed, jet, jet_order)
        dmdt = [R[n + 1] + T[n] - (t_packed if n == 0 else 0) for n in range(N + 1)]

        def decode(values: Sequence[Coeff]) -> TruncSeries:
            coeffs = [_trim(_unpack_coeff(values[n], width)) for n in range(N + 1)]
            return TruncSeries(N, tuple(coeffs), jet)

        self.logger.info(f"Solved general system for {spec.describe()} up to z^{N}")
        return decode(L), decode(R), decode(T), decode(dmdt)
