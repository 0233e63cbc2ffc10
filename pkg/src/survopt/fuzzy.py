"""Trapezoidal fuzzy numbers with componentwise arithmetic and graded-mean defuzzification."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence, Union

from .errors import DegenerateInputError

Number = Union[int, float]


@dataclass(frozen=True)
class TrapezoidalFuzzy:
    """Quadruple (c, a, b, d): support [c, d] and core [a, b] when canonical.

    Ordering is not enforced, so quadruples written in other orders can be
    carried through arithmetic and defuzzification unchanged. Only
    :meth:`membership` requires ``c <= a <= b <= d``. A triangle is the
    case ``a == b``.
    """

    c: float
    a: float
    b: float
    d: float

    @classmethod
    def crisp(cls, x: float) -> "TrapezoidalFuzzy":
        return cls(x, x, x, x)

    @classmethod
    def from_seq(cls, values: Sequence[float]) -> "TrapezoidalFuzzy":
        if len(values) != 4:
            raise DegenerateInputError(f"fuzzy number needs 4 components, got {len(values)}")
        return cls(*(float(v) for v in values))

    def as_tuple(self) -> tuple[float, float, float, float]:
        return (self.c, self.a, self.b, self.d)

    @property
    def is_canonical(self) -> bool:
        return self.c <= self.a <= self.b <= self.d

    def graded_mean(self) -> float:
        return graded_mean(self)

    def membership(self, x: float) -> float:
        return membership(x, self)

    def __add__(self, other: "TrapezoidalFuzzy | Number") -> "TrapezoidalFuzzy":
        return fuzzy_add(self, _lift(other))

    __radd__ = __add__

    def __sub__(self, other: "TrapezoidalFuzzy | Number") -> "TrapezoidalFuzzy":
        return fuzzy_sub(self, _lift(other))

    def __rsub__(self, other: Number) -> "TrapezoidalFuzzy":
        return fuzzy_sub(_lift(other), self)

    def __mul__(self, other: "TrapezoidalFuzzy | Number") -> "TrapezoidalFuzzy":
        return fuzzy_mul(self, _lift(other))

    __rmul__ = __mul__

    def __truediv__(self, other: "TrapezoidalFuzzy | Number") -> "TrapezoidalFuzzy":
        return fuzzy_div(self, _lift(other))

    def __neg__(self) -> "TrapezoidalFuzzy":
        return fuzzy_neg(self)


def _lift(x: "TrapezoidalFuzzy | Number") -> TrapezoidalFuzzy:
    return x if isinstance(x, TrapezoidalFuzzy) else TrapezoidalFuzzy.crisp(float(x))


def fuzzy_add(A: TrapezoidalFuzzy, B: TrapezoidalFuzzy) -> TrapezoidalFuzzy:
    return TrapezoidalFuzzy(A.c + B.c, A.a + B.a, A.b + B.b, A.d + B.d)


def fuzzy_neg(A: TrapezoidalFuzzy) -> TrapezoidalFuzzy:
    """Image of A under x -> -x: (-d, -b, -a, -c)."""
    return TrapezoidalFuzzy(-A.d, -A.b, -A.a, -A.c)


def fuzzy_sub(A: TrapezoidalFuzzy, B: TrapezoidalFuzzy) -> TrapezoidalFuzzy:
    return TrapezoidalFuzzy(A.c - B.d, A.a - B.b, A.b - B.a, A.d - B.c)


def fuzzy_mul(A: TrapezoidalFuzzy, B: TrapezoidalFuzzy) -> TrapezoidalFuzzy:
    return TrapezoidalFuzzy(A.c * B.c, A.a * B.a, A.b * B.b, A.d * B.d)


def fuzzy_div(A: TrapezoidalFuzzy, B: TrapezoidalFuzzy) -> TrapezoidalFuzzy:
    """Componentwise quotient (c1/d2, a1/b2, b1/a2, d1/c2); B must be positive."""
    if min(B.as_tuple()) <= 0:
        raise DegenerateInputError("fuzzy division by zero-touching number")
    return TrapezoidalFuzzy(A.c / B.d, A.a / B.b, A.b / B.a, A.d / B.c)


def graded_mean(t: TrapezoidalFuzzy) -> float:
    """Graded mean integration representation (c + 2a + 2b + d) / 6."""
    return (t.c + 2 * t.a + 2 * t.b + t.d) / 6


def membership(x: float, t: TrapezoidalFuzzy) -> float:
    """Piecewise-linear membership degree of x in a canonical trapezoid."""
    if not t.is_canonical:
        raise DegenerateInputError("non-canonical fuzzy number")
    if x < t.c or x > t.d:
        return 0.0
    if x < t.a:
        return (x - t.c) / (t.a - t.c)
    if x <= t.b:
        return 1.0
    return (t.d - x) / (t.d - t.b)


def left_inverse(h: float, t: TrapezoidalFuzzy) -> float:
    """Left h-level point L^-1(h) = c + (a - c) h."""
    return t.c + (t.a - t.c) * h


def right_inverse(h: float, t: TrapezoidalFuzzy) -> float:
    """Right h-level point R^-1(h) = d - (d - b) h."""
    return t.d - (t.d - t.b) * h
