# mapdeg/sampler.py
"""
Uniform random rooted bipartite mobiles with a fixed number of edges.

A mobile rooted at a white vertex is a plane tree: the white vertex has an
ordered list of black children, and a black vertex of degree 2i has i - 1
white children and i legs arranged among its 2i - 1 free slots. With one z
per vertex this gives R = z + z Σ q_{2i} C(2i-1, i) R^{i-1} R, i.e. the
simply generated form R = z (1 + Σ φ_i R^i) with φ_i = q_{2i} C(2i-1, i).
Mobiles with n edges have n + 1 vertices.
"""
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy import stats

from mapdeg.criticality import CriticalSolver, weight_value
from mapdeg.degrees import DegreeSpec
from mapdeg.errors import SpecValidationError
from mapdeg.kernel import binomial

RNG_ALGORITHM = "PCG64"
LEG, EDGE = "L", "E"


@dataclass
class BlackNode:
    degree: int
    word: str                      # slots after the parent edge, LEG or EDGE
    children: List["WhiteNode"] = field(default_factory=list)

    def canonical(self) -> Tuple:
        return ("b", self.word, tuple(c.canonical() for c in self.children))


@dataclass
class WhiteNode:
    children: List[BlackNode] = field(default_factory=list)

    def canonical(self) -> Tuple:
        return ("w", tuple(c.canonical() for c in self.children))


@dataclass
class Mobile:
    root: WhiteNode
    n: int

    def canonical(self) -> Tuple:
        return self.root.canonical()

    def _walk(self):
        stack = [self.root]
        while stack:
            white = stack.pop()
            yield white
            for black in white.children:
                yield black
                stack.extend(black.children)

    def black_nodes(self) -> List[BlackNode]:
        return [node for node in self._walk() if isinstance(node, BlackNode)]

    def white_count(self) -> int:
        return sum(1 for node in self._walk() if isinstance(node, WhiteNode))

    def degree_counts(self) -> Dict[int, int]:
        counts: Dict[int, int] = {}
        for black in self.black_nodes():
            counts[black.degree] = counts.get(black.degree, 0) + 1
        return counts

    def handshake(self) -> Tuple[int, int]:
        """(Σ black degrees, edges + legs); both equal 2n."""
        blacks = self.black_nodes()
        edges = sum(1 + len(b.children) for b in blacks)
        legs = sum(b.word.count(LEG) for b in blacks)
        return sum(b.degree for b in blacks), edges + legs


@dataclass
class SampleStats:
    n: int
    reps: int
    seed: int
    d: int
    rng: str
    mean: Dict[int, float]
    variance: Dict[int, float]
    skewness: Optional[float]
    excess_kurtosis: Optional[float]
    degenerate: bool

    def to_dict(self) -> Dict:
        data = asdict(self)
        data["mean"] = {str(k): v for k, v in self.mean.items()}
        data["variance"] = {str(k): v for k, v in self.variance.items()}
        return data


def replicate_generators(seed: int, reps: int) -> List[np.random.Generator]:
    """One PCG64 stream per replicate, spawned from SeedSequence(seed)."""
    return [np.random.Generator(np.random.PCG64(child)) for child in np.random.SeedSequence(seed).spawn(reps)]


def _randbelow(rng: np.random.Generator, bound: int) -> int:
    """Uniform integer in [0, bound) for arbitrarily large bound."""
    if bound <= 0:
        raise ValueError("bound must be positive")
    bits = bound.bit_length()
    nbytes = (bits + 7) // 8
    while True:
        value = int.from_bytes(rng.bytes(nbytes), "little") >> (8 * nbytes - bits)
        if value < bound:
            return value


def _pick(rng: np.random.Generator, weights: Sequence[int]) -> int:
    target = _randbelow(rng, sum(weights))
    for index, w in enumerate(weights):
        if target < w:
            return index
        target -= w
    raise AssertionError("weights exhausted")


class CountTables:
    """
    powers[j][m] = [z^m] R^j at t = 1 for j, m <= size (exact integers).
    powers[1] is the R-object count by weight.
    """

    def __init__(self, spec: DegreeSpec, size: int):
        self.spec = spec
        self.size = size
        self.phi = [0] * (size + 1)
        for i in range(1, size + 1):
            if spec.contains(2 * i):
                self.phi[i] = spec.exact_weight(2 * i) * binomial(2 * i - 1, i)
        powers = [[1] + [0] * size] + [[0] * (size + 1) for _ in range(size)]
        R = powers[1]
        for m in range(1, size + 1):
            R[m] = (1 if m == 1 else 0) + sum(self.phi[i] * powers[i][m - 1] for i in range(1, m))
            for j in range(2, m + 1):
                powers[j][m] = sum(R[a] * powers[j - 1][m - a] for a in range(1, m - j + 2))
        self.powers = powers

    @property
    def counts(self) -> List[int]:
        return self.powers[1]


class MobileSampler:
    """
    Recursive-method sampler over exact count tables, plus a fast sampler
    of the black-degree histogram alone.
    """

    def __init__(self, max_n: int = 2000, memory_limit: int = 512 * 2 ** 20, threads: int = 1,
                 solver: Optional[CriticalSolver] = None):
        self.max_n = max_n
        self.memory_limit = memory_limit
        self.threads = max(1, threads)
        self.solver = solver or CriticalSolver()
        self.logger = logging.getLogger(self.__class__.__name__)
        self._tables: Dict[Tuple[str, int], CountTables] = {}

    def _check(self, spec: DegreeSpec, n: int, slack: int = 0) -> None:
        spec.require_bipartite()
        if n < 1:
            raise SpecValidationError(f"n must be at least 1, got {n}")
        if n > self.max_n + slack:
            raise SpecValidationError(f"n = {n} exceeds the sampler limit {self.max_n}")

    def build_count_dp(self, spec: DegreeSpec, n: int) -> CountTables:
        """
        Exact R-object counts for weights up to n.

        Raises:
            SpecValidationError: if the table would exceed the memory limit
        """
        # weights run one above edge counts
        self._check(spec, n, slack=1)
        estimate = (n + 1) ** 2 // 2 * (3 * n // 8 + 28)
        if estimate > self.memory_limit:
            raise SpecValidationError(
                f"count tables for n = {n} need about {estimate / 2 ** 20:.0f} MiB "
                f"(limit {self.memory_limit / 2 ** 20:.0f} MiB)"
            )
        key = (spec.describe(), n)
        if key not in self._tables:
            self._tables[key] = CountTables(spec, n)
            self.logger.debug(f"Built count tables for {spec.describe()} up to weight {n}")
        return self._tables[key]

    def sample_mobile(self, spec: DegreeSpec, n: int, rng: np.random.Generator) -> Mobile:
        """
        Uniform rooted mobile with n edges (weight n + 1).

        Raises:
            SpecValidationError: if no mobile has n edges
        """
        self._check(spec, n)
        tables = self.build_count_dp(spec, n + 1)
        if tables.counts[n + 1] == 0:
            raise SpecValidationError(f"no mobile with {n} edges for D = {spec.describe()}")
        root = WhiteNode()
        pending = [(root, n + 1)]
        while pending:
            white, m = pending.pop()
            # peel black children off the white vertex until only the leaf is left
            while m > 1:
                choices = [i for i in range(1, m) if tables.phi[i] and tables.powers[i][m - 1]]
                i = choices[_pick(rng, [tables.phi[i] * tables.powers[i][m - 1] for i in choices])]
                parts = self._split(tables, m - 1, i, rng)
                word = self._arrangement(i, rng)
                black = BlackNode(degree=2 * i, word=word)
                for size in parts[:-1]:
                    child = WhiteNode()
                    black.children.append(child)
                    pending.append((child, size))
                white.children.append(black)
                m = parts[-1]
        return Mobile(root=root, n=n)

    @staticmethod
    def _split(tables: CountTables, total: int, parts: int, rng: np.random.Generator) -> List[int]:
        sizes = []
        for k in range(parts, 1, -1):
            options = list(range(1, total - k + 2))
            first = options[_pick(rng, [tables.counts[a] * tables.powers[k - 1][total - a] for a in options])]
            sizes.append(first)
            total -= first
        sizes.append(total)
        return sizes

    @staticmethod
    def _arrangement(i: int, rng: np.random.Generator) -> str:
        """Uniform placement of i - 1 edges among the 2i - 1 free slots."""
        slots = rng.permutation(2 * i - 1)[: i - 1]
        word = [LEG] * (2 * i - 1)
        for s in slots:
            word[s] = EDGE
        return "".join(word)

    # ------------------------------------------------------------------
    # Histogram sampler
    # ------------------------------------------------------------------

    def offspring_law(self, spec: DegreeSpec, n: int) -> np.ndarray:
        """
        P(k) ∝ φ_k R0^k on k = 0..n. Conditioned on Σ k = n over n + 1 i.i.d.
        draws this is the outdegree multiset of a uniform weight-(n+1) object.
        """
        R0 = self.solver.solve_bipartite_critical(spec).R0
        law = np.zeros(n + 1)
        law[0] = 1.0
        log_r = math.log(R0)
        for k in range(1, n + 1):
            if spec.contains(2 * k):
                law[k] = math.exp(math.log(weight_value(spec, 2 * k)) + _log_binomial(2 * k - 1, k) + k * log_r)
        return law / law.sum()

    def sample_degree_counts(self, spec: DegreeSpec, n: int, rng: np.random.Generator,
                             law: Optional[np.ndarray] = None, batch: int = 32) -> Dict[int, int]:
        """Black-degree histogram of a uniform mobile with n edges, by rejection on the outdegree sum."""
        self._check(spec, n)
        if n % spec.dbar:
            raise SpecValidationError(f"no mobile with {n} edges for D = {spec.describe()}")
        law = self.offspring_law(spec, n) if law is None else law
        for _ in range(100000):
            draws = rng.choice(n + 1, size=(batch, n + 1), p=law)
            hits = np.flatnonzero(draws.sum(axis=1) == n)
            if hits.size:
                counts = np.bincount(draws[hits[0]], minlength=n + 1)
                return {2 * k: int(counts[k]) for k in range(1, n + 1) if counts[k]}
        raise SpecValidationError(f"rejection sampler did not accept at n = {n}")

    def clt_harness(self, spec: DegreeSpec, n: int, reps: int, d: int, seed: int) -> SampleStats:
        """
        Standardized skewness and excess kurtosis of X^(d) over reps replicates.
        A variance below 1e-12 is flagged as degenerate.
        """
        if reps < 1:
            raise SpecValidationError("reps must be at least 1")
        if not spec.contains(d):
            raise SpecValidationError(f"degree {d} is not in D = {spec.describe()}")
        self._check(spec, n)
        law = self.offspring_law(spec, n)
        generators = replicate_generators(seed, reps)
        with ThreadPoolExecutor(max_workers=self.threads) as pool:
            histograms = list(pool.map(lambda g: self.sample_degree_counts(spec, n, g, law), generators))
        degrees = sorted({k for h in histograms for k in h} | {d})
        matrix = np.array([[h.get(k, 0) for k in degrees] for h in histograms], dtype=float)
        mean = dict(zip(degrees, matrix.mean(axis=0).tolist()))
        variance = dict(zip(degrees, matrix.var(axis=0).tolist()))
        column = matrix[:, degrees.index(d)]
        degenerate = float(column.var()) < 1e-12
        skewness = kurt = None
        if degenerate:
            self.logger.warning(f"X^({d}) has zero variance at n = {n}; limit law is degenerate")
        else:
            skewness = float(stats.skew(column))
            kurt = float(stats.kurtosis(column, fisher=True))
        self.logger.info(f"CLT harness: n={n}, reps={reps}, d={d}, mean/n={mean[d] / n:.6f}")
        return SampleStats(n=n, reps=reps, seed=seed, d=d, rng=RNG_ALGORITHM, mean=mean, variance=variance,
                           skewness=skewness, excess_kurtosis=kurt, degenerate=degenerate)

    def sample_histograms(self, spec: DegreeSpec, n: int, reps: int, seed: int) -> List[Dict[int, int]]:
        """Per-sample histograms from the recursive sampler (for CSV export)."""
        return [self.sample_mobile(spec, n, g).degree_counts() for g in replicate_generators(seed, reps)]


def _log_binomial(n: int, k: int) -> float:
    return math.lgamma(n + 1) - math.lgamma(k + 1) - math.lgamma(n - k + 1)
