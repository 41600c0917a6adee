"""Exact arithmetic and metric geometry on the circle R/2Z and its powers.

Points of the circle are stored as canonical rational representatives in
[0, 2).  The metric is ``min(d, 2 - d)`` where ``d`` is the representative of
the difference, so the diameter is exactly 1 and the metric is invariant
under translation.  Tuples of circle points form the alphabet of the sequence
spaces in :mod:`mdkit.shiftspace`; their metric is the coordinatewise max.

Everything here is an exact rational computation: no floats, no tolerances.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence


def frac_to_str(value: Fraction | int) -> str:
    """Serialize a rational as ``"p/q"`` with q > 0 and gcd(|p|, q) = 1."""
    f = Fraction(value)
    return f"{f.numerator}/{f.denominator}"


def frac_from_str(text: str) -> Fraction:
    """Parse ``"p/q"``; a bare integer string is accepted as ``p/1``."""
    return Fraction(str(text).strip())


def reduce_mod2(value: Fraction | int) -> Fraction:
    """The unique representative of ``value`` modulo 2 lying in [0, 2)."""
    f = Fraction(value)
    return f - 2 * math.floor(f / 2)


@dataclass(frozen=True)
class TorusElem:
    """A point of R/2Z, held as its canonical representative in [0, 2)."""

    value: Fraction

    def __post_init__(self) -> None:
        object.__setattr__(self, "value", reduce_mod2(self.value))

    def __add__(self, other: "TorusElem") -> "TorusElem":
        return TorusElem(self.value + other.value)

    def __sub__(self, other: "TorusElem") -> "TorusElem":
        return TorusElem(self.value - other.value)

    def __neg__(self) -> "TorusElem":
        return TorusElem(-self.value)

    def __repr__(self) -> str:
        return f"TorusElem({self.value!s})"

    def to_json(self) -> str:
        return frac_to_str(self.value)

    @classmethod
    def from_json(cls, text: str) -> "TorusElem":
        return cls(frac_from_str(text))


def torus_reduce(value: Fraction | int) -> TorusElem:
    """Canonicalize any rational into its circle representative in [0, 2)."""
    return TorusElem(Fraction(value))


def circle_dist(x: TorusElem, y: TorusElem) -> Fraction:
    """Circle metric: ``min(d, 2 - d)`` for ``d = (x - y) mod 2``; in [0, 1]."""
    d = reduce_mod2(x.value - y.value)
    return min(d, 2 - d)


@dataclass(frozen=True)
class TorusVec:
    """An element of the N-fold power of the circle (the sequence alphabet).

    Coordinates may be given as :class:`TorusElem`, ``Fraction`` or ``int``;
    they are canonicalized on construction.  The group operations act
    coordinatewise and require equal dimension.
    """

    coords: tuple[TorusElem, ...]

    def __post_init__(self) -> None:
        coords = tuple(
            c if isinstance(c, TorusElem) else TorusElem(Fraction(c))
            for c in self.coords
        )
        if not coords:
            raise ValueError("alphabet dimension must be positive")
        object.__setattr__(self, "coords", coords)

    @property
    def dim(self) -> int:
        return len(self.coords)

    @classmethod
    def of(cls, *values: Fraction | int | TorusElem) -> "TorusVec":
        return cls(tuple(values))

    @classmethod
    def zero(cls, dim: int) -> "TorusVec":
        return cls((Fraction(0),) * dim)

    @classmethod
    def constant(cls, value: Fraction | int, dim: int) -> "TorusVec":
        return cls((Fraction(value),) * dim)

    def _require_same_dim(self, other: "TorusVec") -> None:
        if self.dim != other.dim:
            raise ValueError("alphabet dimension mismatch")

    def __add__(self, other: "TorusVec") -> "TorusVec":
        self._require_same_dim(other)
        return TorusVec(tuple(a + b for a, b in zip(self.coords, other.coords)))

    def __sub__(self, other: "TorusVec") -> "TorusVec":
        self._require_same_dim(other)
        return TorusVec(tuple(a - b for a, b in zip(self.coords, other.coords)))

    def __neg__(self) -> "TorusVec":
        return TorusVec(tuple(-a for a in self.coords))

    def __repr__(self) -> str:
        inner = ", ".join(str(c.value) for c in self.coords)
        return f"TorusVec({inner})"

    def to_json(self) -> list[str]:
        return [c.to_json() for c in self.coords]

    @classmethod
    def from_json(cls, data: Sequence[str]) -> "TorusVec":
        return cls(tuple(TorusElem.from_json(c) for c in data))


def max_circle_dist(x: TorusVec, y: TorusVec) -> Fraction:
    """Alphabet metric: the max of coordinatewise circle distances; in [0, 1]."""
    x._require_same_dim(y)
    return max(circle_dist(a, b) for a, b in zip(x.coords, y.coords))


def vec_sum(vectors: Iterable[TorusVec]) -> TorusVec:
    """Group sum of one or more alphabet vectors."""
    it = iter(vectors)
    try:
        total = next(it)
    except StopIteration:
        raise ValueError("vec_sum requires at least one vector") from None
    for v in it:
        total = total + v
    return total
