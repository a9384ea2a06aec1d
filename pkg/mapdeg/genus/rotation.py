# mapdeg/genus/rotation.py
"""
Rotation systems on darts 0..2n-1 with the edge pairing fixed to d <-> d^1.

The brute-force oracle enumerates every vertex rotation σ, keeps those that
generate a transitive group with the pairing α, and divides by the
centralizer of α acting on root-stable relabellings.
"""
import itertools
import logging
import math
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

from mapdeg.degrees import DegreeSpec
from mapdeg.errors import SpecValidationError

logger = logging.getLogger(__name__)


def cycles(perm: Sequence[int]) -> List[Tuple[int, ...]]:
    """Cycles of a permutation given as an image list, each starting at its smallest element."""
    seen = [False] * len(perm)
    out = []
    for start in range(len(perm)):
        if seen[start]:
            continue
        cycle = []
        d = start
        while not seen[d]:
            seen[d] = True
            cycle.append(d)
            d = perm[d]
        out.append(tuple(cycle))
    return out


def compose(outer: Sequence[int], inner: Sequence[int]) -> Tuple[int, ...]:
    """(outer ∘ inner)(d) = outer[inner[d]]."""
    return tuple(outer[d] for d in inner)


@dataclass(frozen=True)
class RotationMap:
    sigma: Tuple[int, ...]
    alpha: Tuple[int, ...]
    root: int = 0

    @classmethod
    def standard(cls, sigma: Sequence[int]) -> "RotationMap":
        return cls(tuple(sigma), tuple(d ^ 1 for d in range(len(sigma))))

    @property
    def edges(self) -> int:
        return len(self.alpha) // 2

    @property
    def phi(self) -> Tuple[int, ...]:
        return compose(self.sigma, self.alpha)

    def vertices(self) -> List[Tuple[int, ...]]:
        return cycles(self.sigma)

    def faces(self) -> List[Tuple[int, ...]]:
        return cycles(self.phi)

    def is_connected(self) -> bool:
        return is_transitive(self.sigma, self.alpha)

    def genus(self) -> int:
        chi = len(self.vertices()) - self.edges + len(self.faces())
        if chi % 2 or chi > 2:
            raise ValueError(f"Euler characteristic {chi} is not 2 - 2g")
        return (2 - chi) // 2

    def face_degrees(self) -> List[int]:
        return sorted(len(f) for f in self.faces())

    def is_bipartite(self) -> bool:
        return _two_colourable(self.sigma, self.alpha)


def is_transitive(sigma: Sequence[int], alpha: Sequence[int]) -> bool:
    size = len(sigma)
    seen = {0}
    stack = [0]
    while stack:
        d = stack.pop()
        for e in (sigma[d], alpha[d]):
            if e not in seen:
                seen.add(e)
                stack.append(e)
    return len(seen) == size


def _vertex_index(sigma: Sequence[int]) -> List[int]:
    index = [0] * len(sigma)
    for k, cycle in enumerate(cycles(sigma)):
        for d in cycle:
            index[d] = k
    return index


def _two_colourable(sigma: Sequence[int], alpha: Sequence[int]) -> bool:
    vertex = _vertex_index(sigma)
    colour: Dict[int, int] = {vertex[0]: 0}
    stack = [vertex[0]]
    adjacency: Dict[int, List[int]] = {}
    for d in range(len(sigma)):
        adjacency.setdefault(vertex[d], []).append(vertex[alpha[d]])
    while stack:
        v = stack.pop()
        for w in adjacency[v]:
            if w not in colour:
                colour[w] = 1 - colour[v]
                stack.append(w)
            elif colour[w] == colour[v]:
                return False
    return True


@dataclass(frozen=True)
class OracleFilter:
    """Which rooted maps the oracle keeps."""
    genus: Optional[int] = None
    bipartite: bool = False
    faces_even: bool = False
    degrees: Optional[DegreeSpec] = None

    def accepts(self, sigma: Sequence[int], alpha: Sequence[int], n: int) -> bool:
        faces = cycles(compose(sigma, alpha))
        if self.genus is not None:
            chi = len(cycles(sigma)) - n + len(faces)
            if chi != 2 - 2 * self.genus:
                return False
        if self.faces_even and any(len(f) % 2 for f in faces):
            return False
        if self.degrees is not None and not all(self.degrees.contains(len(f)) for f in faces):
            return False
        if self.bipartite and not _two_colourable(sigma, alpha):
            return False
        return True


class RotationOracle:
    """Exhaustive counter of rooted maps with at most `max_edges` edges."""

    def __init__(self, max_edges: int = 5):
        self.max_edges = max_edges
        self.logger = logging.getLogger(self.__class__.__name__)

    def count(self, n: int, flt: OracleFilter = OracleFilter()) -> int:
        """
        Number of rooted maps with n edges accepted by the filter.

        Raises:
            SpecValidationError: if n exceeds the size guard
        """
        if n < 1:
            raise SpecValidationError(f"n must be at least 1, got {n}")
        if n > self.max_edges:
            raise SpecValidationError(f"oracle is limited to n <= {self.max_edges}, got {n}")
        alpha = tuple(d ^ 1 for d in range(2 * n))
        labelled = 0
        for sigma in itertools.permutations(range(2 * n)):
            if is_transitive(sigma, alpha) and flt.accepts(sigma, alpha, n):
                labelled += 1
        # |centralizer of α| / 2n = 2^{n-1} (n-1)!
        norm = 2 ** (n - 1) * math.factorial(n - 1)
        if labelled % norm:
            raise ArithmeticError(f"{labelled} labelled maps not divisible by {norm}")
        self.logger.debug(f"Oracle n={n} filter={flt}: {labelled // norm}")
        return labelled // norm

    def count_by_genus(self, n: int) -> Dict[int, int]:
        alpha = tuple(d ^ 1 for d in range(2 * n))
        totals: Dict[int, int] = {}
        if n > self.max_edges:
            raise SpecValidationError(f"oracle is limited to n <= {self.max_edges}, got {n}")
        for sigma in itertools.permutations(range(2 * n)):
            if not is_transitive(sigma, alpha):
                continue
            g = (2 - len(cycles(sigma)) + n - len(cycles(compose(sigma, alpha)))) // 2
            totals[g] = totals.get(g, 0) + 1
        norm = 2 ** (n - 1) * math.factorial(n - 1)
        return {g: c // norm for g, c in sorted(totals.items())}


def oracle_count(n: int, genus: Optional[int] = None, bipartite: bool = False,
                 faces_even: bool = False, degrees: Optional[DegreeSpec] = None,
                 max_edges: int = 5) -> int:
    return RotationOracle(max_edges).count(n, OracleFilter(genus, bipartite, faces_even, degrees))
