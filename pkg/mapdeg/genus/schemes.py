# mapdeg/genus/schemes.py
"""
Rooted one-faced maps of genus g with minimum degree 3 and their black/white
colourings.

With the face fixed to φ(d) = d + 1 (mod 2e) and the root at dart 0, rooted
one-faced maps are in bijection with perfect matchings α of the 2e darts;
the vertex rotation is σ(d) = α(d) + 1.
"""
import itertools
import logging
import math
from dataclasses import dataclass
from functools import cached_property
from typing import Dict, List, Tuple

from mapdeg.errors import SpecValidationError
from mapdeg.genus.rotation import cycles

logger = logging.getLogger(__name__)

WHITE, BLACK = "w", "b"
MAX_SCHEME_GENUS = 2


@dataclass(frozen=True)
class Scheme:
    genus: int
    alpha: Tuple[int, ...]
    colours: Tuple[str, ...] = ()

    @cached_property
    def sigma(self) -> Tuple[int, ...]:
        size = len(self.alpha)
        return tuple((self.alpha[d] + 1) % size for d in range(size))

    @cached_property
    def vertices(self) -> Tuple[Tuple[int, ...], ...]:
        """Dart cycles of σ; the root vertex (holding dart 0) comes first."""
        return tuple(cycles(self.sigma))

    @cached_property
    def vertex_of(self) -> Tuple[int, ...]:
        index = [0] * len(self.alpha)
        for k, cycle in enumerate(self.vertices):
            for d in cycle:
                index[d] = k
        return tuple(index)

    @cached_property
    def position(self) -> Tuple[int, ...]:
        """Index of each dart within its vertex cycle."""
        pos = [0] * len(self.alpha)
        for cycle in self.vertices:
            for k, d in enumerate(cycle):
                pos[d] = k
        return tuple(pos)

    @property
    def edge_count(self) -> int:
        return len(self.alpha) // 2

    @property
    def vertex_count(self) -> int:
        return len(self.vertices)

    def edges(self) -> List[Tuple[int, int]]:
        return [(d, self.alpha[d]) for d in range(len(self.alpha)) if d < self.alpha[d]]

    def degree(self, v: int) -> int:
        return len(self.vertices[v])

    def colour(self, v: int) -> str:
        return self.colours[v]

    def white_vertices(self) -> List[int]:
        return [v for v in range(self.vertex_count) if self.colours[v] == WHITE]

    def white_corners(self) -> int:
        return sum(self.degree(v) for v in self.white_vertices())

    def with_colours(self, colours: Tuple[str, ...]) -> "Scheme":
        return Scheme(self.genus, self.alpha, colours)

    def swapped(self) -> "Scheme":
        return self.with_colours(tuple(BLACK if c == WHITE else WHITE for c in self.colours))

    def to_dict(self) -> Dict:
        return {
            "genus": self.genus,
            "alpha": list(self.alpha),
            "sigma": list(self.sigma),
            "vertices": [list(c) for c in self.vertices],
            "colours": list(self.colours),
            "edges": self.edge_count,
        }


def cubic_scheme_count(g: int) -> int:
    """Rooted cubic one-faced maps of genus g: 2(6g-3)! / (12^g g! (3g-2)!)."""
    if g < 1:
        return 0
    return 2 * math.factorial(6 * g - 3) // (12 ** g * math.factorial(g) * math.factorial(3 * g - 2))


def _matchings(e: int, vertices: int):
    """Matchings of 2e darts whose rotation has `vertices` cycles, all of length >= 3."""
    size = 2 * e
    alpha = [-1] * size

    def closed_cycle(start: int):
        """Length of the σ-cycle through start if fully defined, else None."""
        d, length = start, 0
        while True:
            if alpha[d] < 0:
                return None
            d = (alpha[d] + 1) % size
            length += 1
            if d == start:
                return length

    def search(closed: int):
        try:
            a = alpha.index(-1)
        except ValueError:
            if closed == vertices:
                yield tuple(alpha)
            return
        for b in range(a + 1, size):
            if alpha[b] >= 0 or b == a + 1 or (a == 0 and b == size - 1):
                continue
            alpha[a], alpha[b] = b, a
            new_closed = closed
            ok = True
            seen = set()
            for start in (a, b):
                length = closed_cycle(start)
                if length is None:
                    continue
                key = _cycle_key(alpha, start, size)
                if key in seen:
                    continue
                seen.add(key)
                if length < 3:
                    ok = False
                    break
                new_closed += 1
            if ok and new_closed <= vertices:
                yield from search(new_closed)
            alpha[a] = alpha[b] = -1

    yield from search(0)


def _cycle_key(alpha: List[int], start: int, size: int) -> int:
    d, smallest = start, start
    while True:
        d = (alpha[d] + 1) % size
        smallest = min(smallest, d)
        if d == start:
            return smallest


def enumerate_uncoloured(g: int) -> List[Scheme]:
    if g < 0 or g > MAX_SCHEME_GENUS:
        raise SpecValidationError(f"schemes are enumerated for genus 0..{MAX_SCHEME_GENUS}, got {g}")
    out = []
    for v in range(1, 4 * g - 1):
        e = v + 2 * g - 1
        found = [Scheme(g, alpha) for alpha in _matchings(e, v)]
        logger.info(f"Genus {g}: {len(found)} rooted schemes with {v} vertices and {e} edges")
        out.extend(found)
    return out


def enumerate_schemes(g: int) -> List[Scheme]:
    """All rooted genus-g schemes with every black/white vertex colouring."""
    out = []
    for scheme in enumerate_uncoloured(g):
        for colours in itertools.product((WHITE, BLACK), repeat=scheme.vertex_count):
            out.append(scheme.with_colours(colours))
    return out
