# mapdeg/genus/rings.py
"""
Arithmetic for z-series whose coefficients depend on t.

ExactRing packs both variables into one integer (t = 2^B, z = 2^{B·T}), so a
truncated product is a single big-int multiplication followed by a mask.
QuadratureRing stores the values at Gauss-Legendre nodes of [0, 1]; the
t-integral of a coefficient is then exact for degree <= 2Q - 1.
"""
import logging
from abc import ABC, abstractmethod
from fractions import Fraction
from typing import List, Optional, Sequence

import numpy as np
from scipy import special

from mapdeg.series import pack, unpack


class SeriesRing(ABC):
    """Strategy interface: series truncated at z^order with t-dependent coefficients."""

    name = "abstract"

    def __init__(self, order: int):
        self.order = order
        self.logger = logging.getLogger(self.__class__.__name__)

    @abstractmethod
    def zero(self):
        pass

    @abstractmethod
    def one(self):
        pass

    @abstractmethod
    def from_tpolys(self, polys: Sequence[Sequence[int]]):
        """Series from integer t-polynomials p_0, p_1, ... (coefficient of z^n)."""

    @abstractmethod
    def mul(self, a, b):
        pass

    @abstractmethod
    def scale(self, a, factor: int):
        pass

    @abstractmethod
    def shift(self, a, k: int):
        """Multiply by z^k."""

    @abstractmethod
    def times_t(self, a, k: int = 1):
        """Multiply by t^k."""

    @abstractmethod
    def valuation(self, a) -> Optional[int]:
        """Lowest z-order with a nonzero coefficient, None for zero."""

    @abstractmethod
    def integrate_t(self, a, denominator: int) -> List:
        """∫_0^1 (n · [z^n] a / denominator) dt for n = 0..order."""

    def add(self, a, b):
        return a + b

    def power(self, a, k: int):
        result = self.one()
        for _ in range(k):
            result = self.mul(result, a)
        return result


class ExactRing(SeriesRing):
    """Exact integer arithmetic; coefficients must be nonnegative."""

    name = "exact"

    def __init__(self, order: int, t_slots: int, width: int):
        super().__init__(order)
        self.t_slots = t_slots
        self.width = width
        self.z_width = t_slots * width
        self.mask = (1 << (self.z_width * (order + 1))) - 1

    def zero(self):
        return 0

    def one(self):
        return 1

    def from_tpolys(self, polys: Sequence[Sequence[int]]) -> int:
        value = 0
        for n, poly in enumerate(polys[:self.order + 1]):
            if len(poly) > self.t_slots:
                raise ValueError(f"t-degree {len(poly) - 1} does not fit {self.t_slots} slots")
            if any(c < 0 for c in poly):
                raise ValueError("packed coefficients must be nonnegative")
            value |= pack(poly, self.width) << (n * self.z_width)
        return value

    def mul(self, a: int, b: int) -> int:
        return (a * b) & self.mask

    def scale(self, a: int, factor: int) -> int:
        return a * factor

    def shift(self, a: int, k: int) -> int:
        return (a << (k * self.z_width)) & self.mask

    def times_t(self, a: int, k: int = 1) -> int:
        return a << (k * self.width)

    def valuation(self, a: int) -> Optional[int]:
        if not a:
            return None
        return ((a & -a).bit_length() - 1) // self.z_width

    def tpoly(self, a: int, n: int) -> List[int]:
        slot = (a >> (n * self.z_width)) & ((1 << self.z_width) - 1)
        return unpack(slot, self.width)

    def scaled_tpolys(self, a: int, denominator: int) -> List[List[Fraction]]:
        """n · [z^n] a / denominator as exact t-polynomials."""
        return [[Fraction(n * c, denominator) for c in self.tpoly(a, n)] for n in range(self.order + 1)]

    def integrate_t(self, a: int, denominator: int) -> List[Fraction]:
        return [sum((c / (k + 1) for k, c in enumerate(poly)), Fraction(0))
                for poly in self.scaled_tpolys(a, denominator)]


class QuadratureRing(SeriesRing):
    """Floating-point values at Q Gauss-Legendre nodes in t; arrays of shape (order + 1, Q)."""

    name = "quadrature"

    def __init__(self, order: int, nodes: Optional[int] = None):
        super().__init__(order)
        self.nodes_count = nodes or order // 2 + 3
        x, w = special.roots_legendre(self.nodes_count)
        self.nodes = (x + 1.0) / 2.0
        self.weights = w / 2.0

    def zero(self) -> np.ndarray:
        return np.zeros((self.order + 1, self.nodes_count))

    def one(self) -> np.ndarray:
        out = self.zero()
        out[0] = 1.0
        return out

    def from_tpolys(self, polys: Sequence[Sequence[int]]) -> np.ndarray:
        out = self.zero()
        for n, poly in enumerate(polys[:self.order + 1]):
            value = np.zeros(self.nodes_count)
            for c in reversed(poly):
                value = value * self.nodes + float(c)
            out[n] = value
        return out

    def mul(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        out = self.zero()
        va, vb = self.valuation(a), self.valuation(b)
        if va is None or vb is None:
            return out
        top = self.order + 1
        for k in range(va, top - vb):
            row = a[k]
            if row.any():
                out[k:] += row * b[:top - k]
        return out

    def scale(self, a: np.ndarray, factor) -> np.ndarray:
        return a * float(factor)

    def shift(self, a: np.ndarray, k: int) -> np.ndarray:
        out = self.zero()
        if k <= self.order:
            out[k:] = a[:self.order + 1 - k]
        return out

    def times_t(self, a: np.ndarray, k: int = 1) -> np.ndarray:
        return a * self.nodes ** k

    def valuation(self, a: np.ndarray) -> Optional[int]:
        rows = np.flatnonzero(np.any(a != 0.0, axis=1))
        return int(rows[0]) if rows.size else None

    def integrate_t(self, a: np.ndarray, denominator: int) -> List[float]:
        totals = a @ self.weights
        return [float(n * totals[n] / denominator) for n in range(self.order + 1)]
