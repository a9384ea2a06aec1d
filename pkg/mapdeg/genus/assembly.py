# mapdeg/genus/assembly.py
"""
Labelled-scheme sums and genus-1 counts.

For a rooted coloured scheme S with edge set E, white vertices V○ and white
corners C○,

    Φ_S = z^{|E|} t^{|V○|} U^{|C○|} Σ_labellings Π_e E_e Π_black V_v

and [z^n] Q_S = (n/|E|) [z^n] Φ_S. Summing Q_S over all rooted coloured
schemes gives ∂M/∂t; the counts are ∫_0^1 ∂M/∂t dt. No further factor is
applied: with this normalization the assembled counts agree with the
rotation-system oracle (see calibrate_normalization).

Labels are fixed up to translation by setting the corner label of the root
dart to 0. A white vertex carries one label. A black vertex carries one
label per dart h, the label of the corner following h in the rotation.
"""
import itertools
import logging
import math
from collections import deque
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass
from fractions import Fraction
from typing import Dict, Iterator, List, NamedTuple, Optional, Sequence, Tuple

from mapdeg.asymfit import AsymptoticFitter, Comparison, FitResult
from mapdeg.criticality import CriticalSolver
from mapdeg.degrees import DegreeSpec
from mapdeg.enumerator import CountTable, tutte_count
from mapdeg.errors import NumericFailure, SpecValidationError
from mapdeg.genus.cells import INFINITE, CellBuilder, CellSeries, corner_cost
from mapdeg.genus.rings import ExactRing, QuadratureRing, SeriesRing
from mapdeg.genus.rotation import OracleFilter, RotationOracle
from mapdeg.genus.schemes import WHITE, Scheme, enumerate_schemes
from mapdeg.series import SeriesEngine, TruncSeries, evaluate_at_one, integrate_in_t

logger = logging.getLogger(__name__)

EXACT_RING_LIMIT = 12
GENUS_FIT_TERMS = 4


class VertexConfig(NamedTuple):
    offsets: Tuple[int, ...]
    weight: object
    valuation: int


def delta_tuples(degree: int, budget: int) -> Iterator[Tuple[int, ...]]:
    """Label increments around a black vertex: Σδ = 0 and Σ max(0, -δ-1) <= budget."""
    if budget < 0:
        return
    high = budget + degree

    def extend(prefix: List[int], total: int, cost: int):
        if len(prefix) == degree - 1:
            last = -total
            if last <= high and cost + corner_cost(last) <= budget:
                yield tuple(prefix) + (last,)
            return
        for delta in range(-(budget - cost) - 1, high + 1):
            prefix.append(delta)
            yield from extend(prefix, total + delta, cost + corner_cost(delta))
            prefix.pop()

    yield from extend([], 0, 0)


def offsets_from_deltas(deltas: Sequence[int]) -> Tuple[int, ...]:
    out = [0]
    for delta in deltas[:-1]:
        out.append(out[-1] + delta)
    return tuple(out)


class SchemeAssembler:
    """Label sums of one scheme against one CellSeries."""

    def __init__(self, cells: CellSeries, builder: CellBuilder):
        self.cells = cells
        self.builder = builder
        self.ring = cells.ring
        self.logger = logging.getLogger(self.__class__.__name__)

    def _split_edges(self, scheme: Scheme):
        loops: Dict[int, List[Tuple[int, int]]] = {k: [] for k in range(scheme.vertex_count)}
        cross: List[Tuple[int, int]] = []
        for h, ah in scheme.edges():
            a, b = scheme.vertex_of[h], scheme.vertex_of[ah]
            if a == b:
                loops[a].append((h, ah))
            else:
                cross.append((h, ah) if a == 0 else (ah, h))
        return loops, cross

    def _floor(self, scheme: Scheme, h: int, ah: int) -> int:
        return self.cells.min_edge_valuation(scheme.colour(scheme.vertex_of[h]),
                                             scheme.colour(scheme.vertex_of[ah]))

    def _configs(self, scheme: Scheme, k: int, loops: List[Tuple[int, int]], allowed: int,
                 loop_floor: int) -> List[VertexConfig]:
        """Vertex weights (corner series times loop edges) with valuation <= allowed."""
        ring, cells = self.ring, self.cells
        colour = scheme.colour(k)
        degree = scheme.degree(k)
        pos = scheme.position
        if colour == WHITE:
            candidates = [(0,) * degree]
        else:
            candidates = [offsets_from_deltas(d) for d in delta_tuples(degree, allowed - loop_floor)]
        out = []
        for offsets in candidates:
            diffs = [offsets[pos[ah]] - offsets[pos[h]] for h, ah in loops]
            loop_val = sum(cells.edge_valuation(colour, colour, d) for d in diffs)
            if colour == WHITE:
                weight, low = ring.one(), 0
            else:
                deltas = [offsets[(j + 1) % degree] - offsets[j] for j in range(degree)]
                low = sum(corner_cost(d) for d in deltas)
                if low + loop_val > allowed:
                    continue
                weight = self.builder.vertex_series(cells, degree, deltas)
                if weight is None:
                    continue
            if low + loop_val > allowed:
                continue
            for d in diffs:
                weight = ring.mul(weight, cells.edge(colour, colour, d))
            valuation = ring.valuation(weight)
            if valuation is not None and valuation <= allowed:
                out.append(VertexConfig(offsets, weight, valuation))
        out.sort(key=lambda c: c.valuation)
        return out

    def _transfer(self, key: Tuple[int, ...], colours: List[Tuple[str, str]], budget: int):
        """Σ_b Π_e E_e(b + key_e) over the edges joining the two vertices."""
        ring, cells = self.ring, self.cells
        span = cells.order + 2
        total = None
        for b in range(-span - max(key), span - min(key) + 1):
            val = sum(cells.edge_valuation(cu, cv, b + kk) for (cu, cv), kk in zip(colours, key))
            if val > budget:
                continue
            term = None
            for (cu, cv), kk in zip(colours, key):
                factor = cells.edge(cu, cv, b + kk)
                term = factor if term is None else ring.mul(term, factor)
            total = term if total is None else ring.add(total, term)
        if total is None:
            return None, INFINITE
        valuation = ring.valuation(total)
        return total, INFINITE if valuation is None else valuation

    def phi(self, scheme: Scheme):
        """Φ_S truncated at the cell order."""
        ring, cells = self.ring, self.cells
        N = cells.order
        if scheme.vertex_count > 2:
            raise SpecValidationError("label sums are implemented for schemes with at most two vertices")
        budget = N - scheme.edge_count
        if budget < 0:
            return ring.zero()
        loops, cross = self._split_edges(scheme)
        loop_floors = {k: sum(self._floor(scheme, h, ah) for h, ah in loops[k]) for k in loops}
        cross_floor = sum(self._floor(scheme, h0, h1) for h0, h1 in cross)
        edge_floor = cross_floor + sum(loop_floors.values())
        if edge_floor > budget:
            return ring.zero()

        configs = [
            self._configs(scheme, k, loops[k], budget - edge_floor + loop_floors[k], loop_floors[k])
            for k in range(scheme.vertex_count)
        ]
        if scheme.vertex_count == 1:
            inner = None
            for c in configs[0]:
                inner = c.weight if inner is None else ring.add(inner, c.weight)
        else:
            inner = self._two_vertex_sum(scheme, configs, cross, budget, cross_floor)
        if inner is None:
            return ring.zero()

        whites = scheme.white_vertices()
        prefactor = ring.times_t(ring.shift(ring.power(cells.U, scheme.white_corners()), scheme.edge_count),
                                 len(whites))
        return ring.mul(prefactor, inner)

    def _two_vertex_sum(self, scheme: Scheme, configs: List[List[VertexConfig]],
                        cross: List[Tuple[int, int]], budget: int, cross_floor: int):
        ring = self.ring
        pos = scheme.position
        colours = [(scheme.colour(0), scheme.colour(1))] * len(cross)
        first, second = configs
        if not first or not second:
            return None
        transfers: Dict[Tuple[int, ...], Tuple[object, int]] = {}
        total = None
        for c0 in first:
            if c0.valuation + second[0].valuation + cross_floor > budget:
                break
            inner = None
            for c1 in second:
                if c0.valuation + c1.valuation + cross_floor > budget:
                    break
                kappa = [c1.offsets[pos[h1]] - c0.offsets[pos[h0]] for h0, h1 in cross]
                key = tuple(k - kappa[0] for k in kappa)
                if key not in transfers:
                    transfers[key] = self._transfer(key, colours, budget)
                transfer, t_val = transfers[key]
                if transfer is None or c0.valuation + c1.valuation + t_val > budget:
                    continue
                term = ring.mul(c1.weight, transfer)
                inner = term if inner is None else ring.add(inner, term)
            if inner is not None:
                term = ring.mul(c0.weight, inner)
                total = term if total is None else ring.add(total, term)
        self.logger.debug(f"{len(first)}x{len(second)} vertex configurations, {len(transfers)} transfer keys")
        return total


# ----------------------------------------------------------------------
# Labellings and cycle checks
# ----------------------------------------------------------------------

def iter_labellings(scheme: Scheme, spread: int) -> Iterator[Tuple[int, ...]]:
    """
    Extremity labels l[h] for every dart, with l[root] = 0 and all labels in
    [-spread, spread]. White vertices share one label across their darts.
    """
    slots: List[List[int]] = []
    for k, cycle in enumerate(scheme.vertices):
        if scheme.colour(k) == WHITE:
            slots.append(list(cycle))
        else:
            slots.extend([d] for d in cycle)
    root_slot = next(i for i, s in enumerate(slots) if 0 in s)
    free = [i for i in range(len(slots)) if i != root_slot]
    for values in itertools.product(range(-spread, spread + 1), repeat=len(free)):
        labels = [0] * len(scheme.alpha)
        for i, value in zip(free, values):
            for d in slots[i]:
                labels[d] = value
        yield tuple(labels)


def fundamental_cycles(scheme: Scheme) -> List[List[int]]:
    """One closed walk (list of traversed darts) per edge outside a BFS spanning tree."""
    parent: Dict[int, Optional[int]] = {0: None}
    queue = deque([0])
    tree = set()
    while queue:
        v = queue.popleft()
        for h in scheme.vertices[v]:
            w = scheme.vertex_of[scheme.alpha[h]]
            if w not in parent:
                parent[w] = h
                tree.add(min(h, scheme.alpha[h]))
                queue.append(w)

    def path_from_root(v: int) -> List[int]:
        darts = []
        while parent[v] is not None:
            h = parent[v]
            darts.append(h)
            v = scheme.vertex_of[h]
        return darts[::-1]

    walks = []
    for h, ah in scheme.edges():
        if h in tree:
            continue
        back = [scheme.alpha[d] for d in reversed(path_from_root(scheme.vertex_of[ah]))]
        walks.append(path_from_root(scheme.vertex_of[h]) + [h] + back)
    return walks


def cycle_variation(scheme: Scheme, labels: Sequence[int], walk: Sequence[int]) -> int:
    """
    Sum of the label increments along a closed walk: edge increments
    l(αh) - l(h) plus the corner-to-corner variation inside each vertex.

    Raises:
        SpecValidationError: if the walk is not closed
    """
    total = 0
    for j, h in enumerate(walk):
        ah = scheme.alpha[h]
        nxt = walk[(j + 1) % len(walk)]
        if scheme.vertex_of[ah] != scheme.vertex_of[nxt]:
            raise SpecValidationError(f"walk breaks between darts {h} and {nxt}")
        total += labels[ah] - labels[h]
        total += labels[nxt] - labels[ah]
    return total


# ----------------------------------------------------------------------
# Counting service
# ----------------------------------------------------------------------

@dataclass
class NormalizationReport:
    spec: str
    orders: List[int]
    assembled: List[int]
    oracle: List[int]
    ratios: List[Optional[str]]
    constant: bool
    factor: Optional[str]

    def to_dict(self) -> Dict:
        return asdict(self)


class GenusCounter:
    """
    Genus-1 counts of rooted bipartite maps with face degrees in D, assembled
    from the scheme sums.
    """

    def __init__(self, engine: SeriesEngine, solver: Optional[CriticalSolver] = None,
                 fitter: Optional[AsymptoticFitter] = None, oracle: Optional[RotationOracle] = None,
                 max_order: int = 40, threads: int = 1):
        self.engine = engine
        self.solver = solver or CriticalSolver()
        self.fitter = fitter or AsymptoticFitter()
        self.oracle = oracle or RotationOracle()
        self.builder = CellBuilder(engine)
        self.max_order = max_order
        self.threads = max(1, threads)
        self._oracle_checked = False
        self.logger = logging.getLogger(self.__class__.__name__)

    # ------------------------------------------------------------------
    # Rings
    # ------------------------------------------------------------------

    def make_ring(self, spec: DegreeSpec, N: int, kind: str = "auto") -> SeriesRing:
        """Exact ring for small orders, quadrature ring otherwise (kind: auto|exact|quadrature)."""
        if kind == "auto":
            kind = "exact" if N <= EXACT_RING_LIMIT else "quadrature"
        if kind == "quadrature":
            return QuadratureRing(N)
        if kind != "exact":
            raise SpecValidationError(f"unknown ring '{kind}'")
        w_max = max((spec.exact_weight(d) for d in range(2, 2 * N + 6, 2)), default=1)
        width = N * (6 + math.ceil(math.log2(w_max + 1))) + 64
        return ExactRing(N, N + 3, width)

    def cells(self, spec: DegreeSpec, N: int, kind: str = "auto") -> CellSeries:
        self._check(spec, N)
        return self.builder.build(spec, N, self.make_ring(spec, N, kind))

    def _check(self, spec: DegreeSpec, N: int) -> None:
        spec.require_bipartite()
        if N < 1:
            raise SpecValidationError(f"order must be at least 1, got {N}")
        if N > self.max_order:
            raise SpecValidationError(f"order {N} exceeds the configured genus maximum {self.max_order}")

    # ------------------------------------------------------------------
    # Assembly
    # ------------------------------------------------------------------

    def _weighted_total(self, cells: CellSeries, schemes: Sequence[Scheme]):
        """Σ_S (L/|E_S|) Φ_S with L the lcm of the edge counts; returns (total, L)."""
        ring = cells.ring
        lcm = 1
        for scheme in schemes:
            lcm = lcm * scheme.edge_count // math.gcd(lcm, scheme.edge_count)
        assembler = SchemeAssembler(cells, self.builder)
        with ThreadPoolExecutor(max_workers=self.threads) as pool:
            parts = list(pool.map(assembler.phi, schemes))
        total = ring.zero()
        for scheme, part in zip(schemes, parts):
            total = ring.add(total, ring.scale(part, lcm // scheme.edge_count))
        return total, lcm

    def scheme_dmdt(self, scheme: Scheme, cells: CellSeries) -> TruncSeries:
        """Q_S as exact t-polynomials (exact ring only)."""
        if not isinstance(cells.ring, ExactRing):
            raise SpecValidationError("exact Q_S series need the exact ring")
        phi = SchemeAssembler(cells, self.builder).phi(scheme)
        return _series(cells.ring, phi, scheme.edge_count)

    def dmdt(self, spec: DegreeSpec, N: int, genus: int = 1) -> TruncSeries:
        """∂M/∂t of the genus-g series, exact."""
        self._require_genus(genus)
        cells = self.cells(spec, N, "exact")
        total, lcm = self._weighted_total(cells, enumerate_schemes(genus))
        return _series(cells.ring, total, lcm)

    def count(self, spec: DegreeSpec, N: int, genus: int = 1, ring: str = "auto") -> CountTable:
        """
        Counts of rooted genus-g bipartite maps with n <= N edges. The
        quadrature ring yields floats and tags the table "quadrature".

        Raises:
            SpecValidationError: if genus is not 1 or N exceeds the guard
            NumericFailure: if the oracle gate fails or exact counts are not integral
        """
        self._require_genus(genus)
        self.validate_oracle()
        cells = self.cells(spec, N, ring)
        schemes = enumerate_schemes(genus)
        self.logger.info(f"Assembling {len(schemes)} coloured genus-{genus} schemes to order {N}")
        total, lcm = self._weighted_total(cells, schemes)
        if isinstance(cells.ring, ExactRing):
            try:
                counts = evaluate_at_one(integrate_in_t(_series(cells.ring, total, lcm)))
            except ArithmeticError as exc:
                raise NumericFailure(f"genus counts are not integral: {exc}") from exc
            method = "exact"
        else:
            # float results; orders off the period d̄ and entries below one half are empty
            counts = [float(value) if abs(value) >= 0.5 and n % spec.dbar == 0 else 0.0
                      for n, value in enumerate(cells.ring.integrate_t(total, lcm))]
            method = "quadrature"
        counts[0] = 0
        return CountTable(spec=spec, counts=counts, genus=genus, method=method)

    @staticmethod
    def _require_genus(genus: int) -> None:
        if genus != 1:
            raise SpecValidationError(f"full counts are available for genus 1 only, got {genus}")

    # ------------------------------------------------------------------
    # Checks
    # ------------------------------------------------------------------

    def validate_oracle(self, max_n: int = 4) -> None:
        """Planar oracle counts must equal Tutte's formula before any genus result is reported."""
        if self._oracle_checked:
            return
        for n in range(1, min(max_n, self.oracle.max_edges) + 1):
            brute = self.oracle.count(n, OracleFilter(genus=0))
            if brute != tutte_count(n):
                raise NumericFailure(f"oracle gate failed at n={n}: {brute} != {tutte_count(n)}")
        self._oracle_checked = True
        self.logger.info("Oracle gate passed")

    def calibrate_normalization(self, spec: DegreeSpec, max_n: int = 4, genus: int = 1) -> NormalizationReport:
        """Ratio of assembled counts to oracle counts for n <= max_n."""
        table = self.count(spec, max_n, genus, ring="exact")
        degrees = spec if spec.is_finite else None
        orders, assembled, brute, ratios = [], [], [], []
        for n in range(1, max_n + 1):
            expected = self.oracle.count(n, OracleFilter(genus=genus, bipartite=True, degrees=degrees))
            orders.append(n)
            assembled.append(table.counts[n])
            brute.append(expected)
            if expected:
                ratios.append(str(Fraction(table.counts[n], expected)))
            elif table.counts[n]:
                ratios.append("inf")
            else:
                ratios.append(None)
        distinct = {r for r in ratios if r is not None}
        constant = len(distinct) <= 1 and "inf" not in distinct
        factor = next(iter(distinct)) if constant and distinct else None
        if factor not in (None, "1"):
            self.logger.warning(f"Assembled counts differ from the oracle by a factor {factor}")
        if not constant:
            self.logger.warning(f"Assembled/oracle ratios are not constant: {ratios}")
        return NormalizationReport(spec=spec.describe(), orders=orders, assembled=assembled,
                                   oracle=brute, ratios=ratios, constant=constant, factor=factor)

    def exponent_check(self, spec: DegreeSpec, N: int, genus: int = 1, table: Optional[CountTable] = None,
                       terms: int = GENUS_FIT_TERMS) -> Tuple[FitResult, Comparison]:
        """
        Fit c·ρ^{-n}·n^β to the genus counts on the period-d̄ subsequence, with
        `terms` corrections in powers of n^{-1/2}; β should be 5(g-1)/2 and ρ
        the planar z0.
        """
        table = table or self.count(spec, N, genus)
        fit = self.fitter.fit_growth(table, stride=spec.dbar, correction=0.5, beta_expected=2.5 * (genus - 1),
                                     terms=terms)
        comparison = self.fitter.compare_with_critical(fit, self.solver.solve(spec))
        return fit, comparison


def _series(ring: ExactRing, value: int, denominator: int) -> TruncSeries:
    coeffs = []
    for poly in ring.scaled_tpolys(value, denominator):
        while poly and not poly[-1]:
            poly.pop()
        coeffs.append(tuple(int(c) if c.denominator == 1 else c for c in poly))
    return TruncSeries(ring.order, tuple(coeffs))


def assemble_QS(scheme: Scheme, spec: DegreeSpec, N: int, engine: Optional[SeriesEngine] = None) -> TruncSeries:
    """Exact Q_S for one rooted coloured scheme, truncated at z^N."""
    if not spec.is_bipartite:
        raise SpecValidationError(f"'{spec.describe()}' has odd members; genus series need all-even D")
    if spec.is_finite and spec.max_degree < 4:
        # degree-2 faces alone build no cells
        return TruncSeries(N, ((),) * (N + 1))
    counter = GenusCounter(engine or SeriesEngine(), max_order=max(N, 1))
    return counter.scheme_dmdt(scheme, counter.cells(spec, N, "exact"))
