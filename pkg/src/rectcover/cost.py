from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import lcm
from numbers import Rational

from .geometry import Rect


def _as_fraction(v) -> Fraction:
    if isinstance(v, float):
        # 0.1 should mean 1/10, not the nearest double
        return Fraction(repr(v))
    if isinstance(v, (str, int, Rational)):
        return Fraction(v)
    raise TypeError(f"cannot interpret {v!r} as a rational number")


@dataclass(frozen=True)
class CostParams:
    """Rectangle cost ``alpha + beta * area`` (creation cost plus area cost)."""

    alpha: Fraction
    beta: Fraction

    def __init__(self, alpha=1, beta=0):
        a, b = _as_fraction(alpha), _as_fraction(beta)
        if a < 0 or b < 0:
            raise ValueError("alpha and beta must be non-negative")
        if a == 0 and b == 0:
            raise ValueError("alpha and beta cannot both be zero")
        object.__setattr__(self, "alpha", a)
        object.__setattr__(self, "beta", b)

    def cost(self, r: Rect) -> Fraction:
        return self.alpha + self.beta * r.area

    def cost_of_area(self, area: int) -> Fraction:
        return self.alpha + self.beta * area

    def scaled(self) -> tuple[int, int, int]:
        """``(a, b, d)`` with ``alpha = a/d`` and ``beta = b/d``, all integers."""
        d = lcm(self.alpha.denominator, self.beta.denominator)
        return int(self.alpha * d), int(self.beta * d), d

    def __str__(self) -> str:
        return f"alpha={self.alpha}, beta={self.beta}"


def rect_cost(r: Rect, params: CostParams) -> Fraction:
    return params.cost(r)
