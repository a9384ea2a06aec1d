# mapdeg/enumerator.py
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple, Union

from mapdeg.degrees import DegreeSpec
from mapdeg.errors import SpecValidationError
from mapdeg.kernel import factorial
from mapdeg.series import Jet, SeriesEngine, TruncSeries, evaluate_at_one, integrate_in_t

MomentPair = Tuple[Fraction, Fraction]


def tutte_count(n: int) -> int:
    """Number of rooted planar maps with n edges: 2(2n)! 3^n / ((n+2)! n!)."""
    if n == 0:
        return 1
    return 2 * factorial(2 * n) * 3 ** n // (factorial(n + 2) * factorial(n))


@dataclass
class CountTable:
    """
    Rooted-map counts by edges. counts[0] = 1 stands for the vertex map.
    Counts are integers unless `method` is "quadrature", where they are floats.

    moments[d][n] holds (E[X_n^(d)], E[(X_n^(d))²]) or None where counts[n] = 0.
    """
    spec: DegreeSpec
    counts: List[Union[int, float]]
    genus: int = 0
    moments: Dict[int, List[Optional[MomentPair]]] = field(default_factory=dict)
    method: str = "exact"

    @property
    def order(self) -> int:
        return len(self.counts) - 1

    def nonzero(self) -> List[Tuple[int, Union[int, float]]]:
        return [(n, c) for n, c in enumerate(self.counts) if n > 0 and c > 0]

    def mean_per_edge(self, d: int, n: int) -> Optional[Fraction]:
        entry = self.moments.get(d, [None] * (n + 1))[n]
        return None if entry is None else entry[0] / n

    def variance(self, d: int, n: int) -> Optional[Fraction]:
        entry = self.moments[d][n]
        if entry is None:
            return None
        return entry[1] - entry[0] ** 2


class Enumerator:
    """
    Exact genus-0 counts M_{D,n} and exact finite-n degree moments.

    Face valencies are restricted to D (black vertices of the mobiles).
    All-even sets go through the bipartite equation, everything else through
    the general (L, R, T) system.
    """

    def __init__(self, engine: SeriesEngine, threads: int = 1):
        self.engine = engine
        self.threads = max(1, threads)
        self.logger = logging.getLogger(self.__class__.__name__)

    def dmdt(self, spec: DegreeSpec, N: int, jet: Optional[int] = None) -> TruncSeries:
        if spec.is_bipartite:
            return self.engine.dmdt_bipartite(spec, N, jet)
        return self.engine.dmdt_general(spec, N, jet)

    def map_series(self, spec: DegreeSpec, N: int, jet: Optional[int] = None) -> TruncSeries:
        """M as a series in z with t-polynomial coefficients (t marks vertices)."""
        return integrate_in_t(self.dmdt(spec, N, jet))

    def count_maps(self, spec: DegreeSpec, N: int) -> CountTable:
        """
        Exact rooted-map counts for n = 0..N.

        Args:
            spec: Allowed face valencies
            N: Largest number of edges

        Returns:
            CountTable with counts[0] = 1
        """
        counts = [1] + evaluate_at_one(self.map_series(spec, N))[1:]
        self.logger.info(f"Counted maps for {spec.describe()} up to n = {N}")
        return CountTable(spec=spec, counts=counts)

    def _moment_column(self, spec: DegreeSpec, N: int, d: int) -> List[Optional[MomentPair]]:
        series = self.map_series(spec, N, jet=d)
        column: List[Optional[MomentPair]] = [None]
        for n, value in enumerate(series.at_t_one()):
            if n == 0:
                continue
            jet = value if isinstance(value, Jet) else Jet([value, 0, 0])
            total, first, second = (Fraction(c) for c in jet.c)
            if total == 0:
                column.append(None)
                continue
            column.append((first / total, (2 * second + first) / total))
        return column

    def exact_moments(self, spec: DegreeSpec, N: int, d: int,
                      table: Optional[CountTable] = None) -> CountTable:
        """
        Exact E[X_n^(d)] and E[(X_n^(d))²] under the uniform (q-weighted)
        distribution, from an order-2 jet in x_d.
        """
        return self.exact_moment_columns(spec, N, [d], table)

    def exact_moment_columns(self, spec: DegreeSpec, N: int, degrees: Sequence[int],
                             table: Optional[CountTable] = None) -> CountTable:
        for d in degrees:
            if not spec.contains(d):
                raise SpecValidationError(f"degree {d} is not in D = {spec.describe()}")
        table = table or self.count_maps(spec, N)
        with ThreadPoolExecutor(max_workers=self.threads) as pool:
            columns = list(pool.map(lambda d: self._moment_column(spec, N, d), degrees))
        for d, column in zip(degrees, columns):
            table.moments[d] = column
        return table

    def vertex_distribution(self, spec: DegreeSpec, n: int) -> Dict[int, int]:
        """Counts of maps with n edges by number of vertices."""
        poly = self.map_series(spec, n).poly(n)
        return {k: int(c) for k, c in enumerate(poly) if c}

    def duality_check(self, N: int) -> bool:
        """For D = all degrees, vertex and face counts are exchangeable at every n."""
        spec = DegreeSpec(kind="all")
        series = self.map_series(spec, N)
        for n in range(1, N + 1):
            poly = dict(enumerate(series.poly(n)))
            if any(poly.get(v, 0) != poly.get(n + 2 - v, 0) for v in range(1, n + 2)):
                self.logger.warning(f"Vertex/face symmetry fails at n = {n}")
                return False
        return True
