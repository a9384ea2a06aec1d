# mapdeg/kernel.py
"""
Exact arithmetic primitives and the Motzkin path coefficients.

B_{l,m} counts arrangements of l zero-steps, m up-steps and m down-steps,
B⁺_{l,m} the arrangements ending one level higher, and B̄_{l,m} the
bridges whose first step is not an up-step.
"""
import math
import threading
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Tuple

from mapdeg.errors import SpecValidationError

_FACTORIALS: List[int] = [1]
_FACTORIAL_LOCK = threading.Lock()


def factorial(n: int) -> int:
    """Memoized factorial; the table only ever grows."""
    if n < len(_FACTORIALS):
        return _FACTORIALS[n]
    with _FACTORIAL_LOCK:
        while len(_FACTORIALS) <= n:
            _FACTORIALS.append(_FACTORIALS[-1] * len(_FACTORIALS))
    return _FACTORIALS[n]


def binomial(n: int, k: int) -> int:
    """
    Binomial coefficient with the convention C(n, k) = 0 outside 0 <= k <= n.

    Negative n also yields 0, which is what the cell and vertex series need.
    """
    if n < 0 or k < 0 or k > n:
        return 0
    return math.comb(n, k)


def trinomial(n: int, a: int, b: int, c: int) -> int:
    """Multinomial n!/(a! b! c!), zero unless a + b + c = n with all parts nonnegative."""
    if min(a, b, c) < 0 or a + b + c != n:
        return 0
    return factorial(n) // (factorial(a) * factorial(b) * factorial(c))


def motzkin_bridge(ell: int, m: int) -> int:
    """B_{l,m} = (l+2m)! / (l! m! m!)."""
    if ell < 0 or m < 0:
        return 0
    return trinomial(ell + 2 * m, ell, m, m)


def motzkin_plus(ell: int, m: int) -> int:
    """B⁺_{l,m} = (l+2m+1)! / (l! m! (m+1)!)."""
    if ell < 0 or m < 0:
        return 0
    return trinomial(ell + 2 * m + 1, ell, m, m + 1)


def motzkin_firstdown(ell: int, m: int) -> int:
    """
    B̄_{l,m}, evaluated both as B_{l-1,m} + B⁺_{l,m-1} and as
    ((l+m)/(l+2m)) B_{l,m}.

    Raises:
        SpecValidationError: for (l, m) = (0, 0), where the ratio is undefined
        ArithmeticError: if the two evaluations disagree
    """
    if ell < 0 or m < 0:
        return 0
    if ell == 0 and m == 0:
        raise SpecValidationError("motzkin_firstdown is undefined at (0, 0)")
    by_first_step = motzkin_bridge(ell - 1, m) + motzkin_plus(ell, m - 1)
    by_ratio = Fraction((ell + m) * motzkin_bridge(ell, m), ell + 2 * m)
    if by_ratio != by_first_step:
        raise ArithmeticError(f"B-bar identity failed at ({ell}, {m})")
    return by_first_step


@dataclass(frozen=True)
class MotzkinCoeff:
    """One coefficient of a Motzkin generating function, indexed by its step counts."""
    ell: int
    m: int
    value: int

    def __post_init__(self):
        if self.value < 0:
            raise ValueError("Motzkin coefficients are nonnegative")


BivariateTable = Dict[Tuple[int, int], int]


def _mul(a: BivariateTable, b: BivariateTable, max_weight: int) -> BivariateTable:
    out: BivariateTable = {}
    for (i1, j1), v1 in a.items():
        for (i2, j2), v2 in b.items():
            if i1 + i2 + 2 * (j1 + j2) > max_weight:
                continue
            key = (i1 + i2, j1 + j2)
            out[key] = out.get(key, 0) + v1 * v2
    return out


def _add(*tables: BivariateTable) -> BivariateTable:
    out: BivariateTable = {}
    for table in tables:
        for key, value in table.items():
            out[key] = out.get(key, 0) + value
    return {k: v for k, v in out.items() if v}


def motzkin_series_oracle(max_weight: int) -> Dict[str, BivariateTable]:
    """
    Coefficients of E, B, B⁺ and B̄ obtained only by iterating their
    defining recursions as formal series in (t, u).

    A monomial t^l u^m has weight l + 2m; everything above max_weight is dropped.

    Args:
        max_weight: Largest retained weight (at most 24)

    Returns:
        Dictionary with keys "E", "B", "B+", "Bbar", each mapping (l, m) to the coefficient
    """
    if max_weight > 24:
        raise SpecValidationError(f"motzkin_series_oracle supports weights up to 24, got {max_weight}")
    one: BivariateTable = {(0, 0): 1}
    t: BivariateTable = {(1, 0): 1}
    u: BivariateTable = {(0, 1): 1}

    excursions: BivariateTable = dict(one)
    for _ in range(max_weight + 1):
        excursions = _add(one, _mul(t, excursions, max_weight),
                          _mul(u, _mul(excursions, excursions, max_weight), max_weight))

    # B = 1 + (t + 2uE) B
    step = _add(t, _mul({(0, 1): 2}, excursions, max_weight))
    bridges: BivariateTable = dict(one)
    for _ in range(max_weight + 1):
        bridges = _add(one, _mul(step, bridges, max_weight))

    plus = _mul(excursions, bridges, max_weight)
    firstdown = _add(_mul(t, bridges, max_weight), _mul(u, plus, max_weight))
    return {"E": excursions, "B": bridges, "B+": plus, "Bbar": firstdown}


def motzkin_closed_forms(t: float, u: float) -> Tuple[float, float, float, float]:
    """
    Real values of E, B, B⁺, B̄ from their closed forms.

    Valid inside the convergence region t + 2√u < 1.
    """
    disc = (1.0 - t) ** 2 - 4.0 * u
    if t >= 1.0 or disc <= 0.0:
        raise ValueError(f"(t, u) = ({t}, {u}) lies outside the convergence region")
    root = math.sqrt(disc)
    excursions = (1.0 - t - root) / (2.0 * u) if u > 0 else 1.0 / (1.0 - t)
    bridges = 1.0 / root
    plus = excursions * bridges
    return excursions, bridges, plus, t * bridges + u * plus


def bridge_decay_root(t: float, u: float) -> float:
    """
    Positive root h of 1 - 2th + t²h² - 4uh² = 0 closest to zero.

    Sums weighted by B_{l,m} t^l u^m with l + 2m = i behave like h^{-i}.
    """
    if t < 0 or u < 0 or (t == 0 and u == 0):
        raise ValueError("bridge_decay_root needs t, u >= 0, not both zero")
    return 1.0 / (t + 2.0 * math.sqrt(u))
