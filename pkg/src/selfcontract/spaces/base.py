"""Abstract geodesic-space interface plus the Point/Direction containers.

Every concrete space works on small immutable payloads (tuples); the
space object owns the coordinate conventions, canonicalization, distance
and geodesic formulas, and the direction (geodesic germ) calculus.
"""
from __future__ import annotations

import math
from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import Any, Iterable

from ..errors import GeometryError, SpaceMismatchError

DEFAULT_TOLERANCE = 1e-9


@dataclass(frozen=True)
class Point:
    """A position tagged with the space it lives in."""

    space: "Space"
    data: tuple

    def __repr__(self) -> str:  # pragma: no cover - debugging aid
        return f"Point({self.space.describe()}, {self.data!r})"


@dataclass(frozen=True)
class Direction:
    """A geodesic germ at a basepoint (unit speed where that makes sense)."""

    space: "Space"
    base: Point
    data: tuple

    def __repr__(self) -> str:  # pragma: no cover - debugging aid
        return f"Direction(base={self.base.data!r}, {self.data!r})"


class Space(ABC):
    """A geodesic metric space with an angle calculus on geodesic germs.

    Concrete subclasses implement the underscored payload-level methods;
    the public methods validate ownership and wrap payloads in Point /
    Direction containers.
    """

    kind: str = "abstract"

    def __init__(self, tolerance: float = DEFAULT_TOLERANCE):
        if tolerance <= 0:
            raise GeometryError("tolerance must be positive")
        self.tolerance = float(tolerance)

    # -- payload-level interface ------------------------------------------

    @abstractmethod
    def _check(self, data: tuple) -> None:
        """Raise GeometryError if the payload violates coordinate constraints."""

    @abstractmethod
    def _canonical(self, data: tuple) -> tuple:
        """Return the unique representative of the payload."""

    @abstractmethod
    def _dist(self, a: tuple, b: tuple) -> float:
        ...

    @abstractmethod
    def _geodesic(self, a: tuple, b: tuple, s: float) -> tuple:
        ...

    @abstractmethod
    def _log(self, a: tuple, b: tuple) -> tuple[tuple, float]:
        """Direction payload of the germ of the geodesic a -> b, plus d(a,b)."""

    @abstractmethod
    def _angle(self, base: tuple, d1: tuple, d2: tuple) -> float:
        """Angle in [0, pi] between two direction payloads at `base`."""

    @abstractmethod
    def _random_point(self, rng, scale: float = 1.0) -> tuple:
        ...

    @abstractmethod
    def _to_json(self) -> dict:
        ...

    @abstractmethod
    def _point_json(self, data: tuple) -> list:
        ...

    @abstractmethod
    def _point_from_json(self, obj: list) -> tuple:
        ...

    # -- public API ---------------------------------------------------------

    def point(self, *data: Any) -> Point:
        payload = tuple(data) if len(data) != 1 else _as_payload(data[0])
        self._check(payload)
        return Point(self, self._canonical(payload))

    def own(self, p: Point) -> tuple:
        if p.space is not self and p.space != self:
            raise SpaceMismatchError(
                f"point from {p.space.describe()} used in {self.describe()}"
            )
        return p.data

    def distance(self, p: Point, q: Point) -> float:
        return self._dist(self.own(p), self.own(q))

    def geodesic_point(self, p: Point, q: Point, s: float) -> Point:
        if not 0.0 <= s <= 1.0:
            raise GeometryError(f"geodesic parameter {s} outside [0, 1]")
        return Point(self, self._canonical(self._geodesic(self.own(p), self.own(q), s)))

    def log_direction(self, p: Point, q: Point) -> tuple[Direction, float]:
        a, b = self.own(p), self.own(q)
        if self._dist(a, b) <= self.tolerance:
            raise GeometryError("log_direction undefined for coincident points")
        d, r = self._log(a, b)
        return Direction(self, Point(self, self._canonical(a)), d), r

    def direction_angle(self, d1: Direction, d2: Direction) -> float:
        if d1.space != self or d2.space != self:
            raise SpaceMismatchError("direction from another space")
        if self._dist(d1.base.data, d2.base.data) > self.tolerance:
            raise SpaceMismatchError("directions based at different points")
        return self._angle(d1.base.data, d1.data, d2.data)

    def same_point(self, p: Point, q: Point) -> bool:
        return self.distance(p, q) <= self.tolerance

    def random_point(self, rng, scale: float = 1.0) -> Point:
        return Point(self, self._canonical(self._random_point(rng, scale)))

    def describe(self) -> str:
        return self.kind

    # Spaces compare by descriptor so deserialized handles interoperate.
    def __eq__(self, other: object) -> bool:
        return isinstance(other, Space) and self._to_json() == other._to_json()

    def __hash__(self) -> int:
        return hash(repr(sorted(self._to_json().items(), key=lambda kv: kv[0])))


def _as_payload(value: Any) -> tuple:
    if isinstance(value, tuple):
        return value
    if isinstance(value, (list,)):
        return tuple(value)
    return (value,)


def clamp_cos(c: float) -> float:
    """Clamp an arccos argument into [-1, 1] against float noise."""
    return max(-1.0, min(1.0, c))


def check_all_same_space(points: Iterable[Point]) -> Space:
    space = None
    for p in points:
        if space is None:
            space = p.space
        elif p.space != space:
            raise SpaceMismatchError("points from different spaces")
    if space is None:
        raise GeometryError("empty point collection")
    return space


def vec_norm(v: tuple) -> float:
    return math.sqrt(math.fsum(x * x for x in v))


def vec_sub(a: tuple, b: tuple) -> tuple:
    return tuple(x - y for x, y in zip(a, b))


def vec_add(a: tuple, b: tuple) -> tuple:
    return tuple(x + y for x, y in zip(a, b))


def vec_scale(c: float, v: tuple) -> tuple:
    return tuple(c * x for x in v)


def vec_dot(a: tuple, b: tuple) -> float:
    return math.fsum(x * y for x, y in zip(a, b))
