# mapdeg/degrees.py
"""
Degree sets D with optional per-degree weights q_i, and the text grammar used
on the command line:

    "4" | "3,4,6" | "all" | "even" | "even-geq:K"   optionally followed by
    ";weights=power:ALPHA" | ";weights=uniform" | ";weights=indicator"
"""
import math
import re
from functools import reduce
from typing import Dict, Iterator, List, Literal, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, model_validator

from mapdeg.errors import SpecValidationError

SpecKind = Literal["finite", "all", "all-even"]


class WeightRule(BaseModel):
    """Weight sequence q_i applied on top of the degree set."""
    model_config = ConfigDict(frozen=True)

    rule: Literal["uniform", "indicator", "power"] = "uniform"
    alpha: float = 0.0

    def value(self, degree: int) -> float:
        if self.rule == "power":
            return float(degree) ** self.alpha
        return 1.0

    def exact_value(self, degree: int) -> int:
        if self.rule != "power":
            return 1
        if self.alpha < 0 or self.alpha != int(self.alpha):
            raise SpecValidationError(
                f"exact counting needs nonnegative integer weights, got power:{self.alpha:g}"
            )
        return degree ** int(self.alpha)

    def describe(self) -> str:
        return f"power:{self.alpha:g}" if self.rule == "power" else self.rule


class DegreeSpec(BaseModel):
    """
    The set D of allowed face valencies together with its weights.

    `scale` multiplies individual weights and is only used for numerical
    perturbation of the critical point. `edge_scale` = s replaces q_d by q_d·s^d
    for every degree at once.
    """
    model_config = ConfigDict(frozen=True)

    kind: SpecKind
    members: Tuple[int, ...] = ()
    min_degree: int = 1
    weights: WeightRule = Field(default_factory=WeightRule)
    scale: Tuple[Tuple[int, float], ...] = ()
    edge_scale: float = 1.0
    text: str = ""

    @model_validator(mode="after")
    def _check_invariants(self) -> "DegreeSpec":
        if self.kind == "finite":
            if not self.members:
                raise SpecValidationError("degree set is empty")
            if any(d < 1 for d in self.members):
                raise SpecValidationError("degrees must be positive integers")
            if tuple(sorted(set(self.members))) != self.members:
                raise SpecValidationError("members must be sorted and distinct")
            if set(self.members) <= {1, 2}:
                raise SpecValidationError("D must not be contained in {1, 2}")
        if self.kind == "all-even" and self.min_degree < 1:
            raise SpecValidationError("even-geq bound must be positive")
        return self

    # ------------------------------------------------------------------
    # Membership and weights
    # ------------------------------------------------------------------

    def contains(self, degree: int) -> bool:
        if degree < 1:
            return False
        if self.kind == "finite":
            return degree in self.members
        if self.kind == "all-even":
            return degree % 2 == 0 and degree >= self.min_degree
        return degree >= self.min_degree

    def weight(self, degree: int) -> float:
        """Numeric weight q_i (0 outside D)."""
        if not self.contains(degree):
            return 0.0
        value = self.weights.value(degree)
        for scaled, factor in self.scale:
            if scaled == degree:
                value *= factor
        if self.edge_scale != 1.0:
            value *= self.edge_scale ** degree
        return value

    def exact_weight(self, degree: int) -> int:
        """Integer weight for the exact paths."""
        if not self.contains(degree):
            return 0
        if self.scale or self.edge_scale != 1.0:
            raise SpecValidationError("perturbed specs are numeric only")
        return self.weights.exact_value(degree)

    @property
    def is_finite(self) -> bool:
        return self.kind == "finite"

    @property
    def is_bipartite(self) -> bool:
        if self.kind == "finite":
            return all(d % 2 == 0 for d in self.members)
        return self.kind == "all-even"

    @property
    def max_degree(self) -> Optional[int]:
        return self.members[-1] if self.is_finite else None

    @property
    def dbar(self) -> int:
        """Period d̄ = gcd{i : 2i in D} for bipartite sets, 1 otherwise."""
        if self.kind == "finite" and self.is_bipartite:
            return reduce(math.gcd, (d // 2 for d in self.members))
        return 1

    def degrees_up_to(self, bound: int) -> List[int]:
        if self.is_finite:
            return [d for d in self.members if d <= bound]
        return [d for d in range(1, bound + 1) if self.contains(d)]

    def iter_degrees(self, start: int = 1) -> Iterator[int]:
        """All members from `start` upwards (infinite for infinite D)."""
        if self.is_finite:
            yield from (d for d in self.members if d >= start)
            return
        d = max(start, 1)
        while True:
            if self.contains(d):
                yield d
            d += 1

    def perturbed(self, factors: Dict[int, float], edge_scale: float = 1.0) -> "DegreeSpec":
        """Copy with q_d multiplied by factors[d] (and by edge_scale^d)."""
        merged = dict(self.scale)
        for degree, factor in factors.items():
            merged[degree] = merged.get(degree, 1.0) * factor
        return self.model_copy(update={"scale": tuple(sorted(merged.items())),
                                       "edge_scale": self.edge_scale * edge_scale})

    def require_bipartite(self) -> None:
        if not self.is_bipartite:
            raise SpecValidationError(f"'{self.describe()}' has odd members; bipartite path needs all-even D")
        if self.kind == "finite" and self.members == (2,):
            raise SpecValidationError("D = {2} is excluded for bipartite maps")

    def describe(self) -> str:
        if self.text:
            return self.text
        if self.kind == "finite":
            base = ",".join(str(d) for d in self.members)
        elif self.kind == "all":
            base = "all"
        else:
            base = "even" if self.min_degree <= 2 else f"even-geq:{self.min_degree}"
        if self.weights.rule != "uniform":
            base += f";weights={self.weights.describe()}"
        return base


_WEIGHT_PATTERN = re.compile(r"^(uniform|indicator|power:(-?\d+(\.\d+)?))$")


def parse_weight_rule(text: str, offset: int = 0) -> WeightRule:
    text = text.strip()
    match = _WEIGHT_PATTERN.match(text)
    if not match:
        raise SpecValidationError(f"unrecognised weight rule '{text}'", position=offset)
    if text.startswith("power:"):
        return WeightRule(rule="power", alpha=float(match.group(2)))
    return WeightRule(rule=text)


def parse_degree_spec(text: str, weights: Optional[str] = None) -> DegreeSpec:
    """
    Parse the degree grammar into a DegreeSpec.

    Args:
        text: Degree set text, e.g. "3,4" or "even;weights=power:-1"
        weights: Optional weight rule given separately (the --weights flag)

    Returns:
        Normalized DegreeSpec

    Raises:
        SpecValidationError: on syntax errors (with position) or invalid sets
    """
    raw = text
    rule = WeightRule()
    body = text
    marker = re.search(r"[;,]\s*weights=", text)
    if marker:
        body = text[:marker.start()]
        rule = parse_weight_rule(text[marker.end():], offset=marker.end())
    if weights:
        rule = parse_weight_rule(weights)

    body = body.strip()
    if not body:
        raise SpecValidationError("empty degree set", position=0)
    if body == "all":
        return DegreeSpec(kind="all", weights=rule, text=raw)
    if body == "even":
        return DegreeSpec(kind="all-even", min_degree=2, weights=rule, text=raw)
    if body.startswith("even-geq:"):
        bound_text = body[len("even-geq:"):]
        if not bound_text.isdigit():
            raise SpecValidationError(f"bad bound '{bound_text}'", position=len("even-geq:"))
        return DegreeSpec(kind="all-even", min_degree=max(2, int(bound_text)), weights=rule, text=raw)

    members = []
    position = 0
    for token in body.split(","):
        stripped = token.strip()
        if not stripped.isdigit():
            raise SpecValidationError(f"expected a positive integer, got '{stripped}'", position=position)
        members.append(int(stripped))
        position += len(token) + 1
    return DegreeSpec(kind="finite", members=tuple(sorted(set(members))), weights=rule, text=raw)
