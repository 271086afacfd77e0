"""Euclidean space R^n with the standard inner-product geometry."""
from __future__ import annotations

import math

from ..errors import GeometryError
from .base import Space, clamp_cos, vec_add, vec_dot, vec_norm, vec_scale, vec_sub


class EuclideanSpace(Space):
    kind = "euclidean"

    def __init__(self, dim: int, tolerance: float = 1e-9):
        super().__init__(tolerance)
        if dim < 1:
            raise GeometryError("dimension must be >= 1")
        self.dim = int(dim)

    def describe(self) -> str:
        return f"euclidean:{self.dim}"

    def _check(self, data: tuple) -> None:
        if len(data) != self.dim:
            raise GeometryError(f"expected {self.dim} coordinates, got {len(data)}")
        if not all(math.isfinite(float(x)) for x in data):
            raise GeometryError("non-finite coordinate")

    def _canonical(self, data: tuple) -> tuple:
        return tuple(float(x) for x in data)

    def _dist(self, a: tuple, b: tuple) -> float:
        return vec_norm(vec_sub(a, b))

    def _geodesic(self, a: tuple, b: tuple, s: float) -> tuple:
        return tuple((1.0 - s) * x + s * y for x, y in zip(a, b))

    def _log(self, a: tuple, b: tuple) -> tuple[tuple, float]:
        diff = vec_sub(b, a)
        r = vec_norm(diff)
        return vec_scale(1.0 / r, diff), r

    def _angle(self, base: tuple, d1: tuple, d2: tuple) -> float:
        return math.acos(clamp_cos(vec_dot(d1, d2)))

    def _random_point(self, rng, scale: float = 1.0) -> tuple:
        return tuple(float(x) for x in rng.uniform(-scale, scale, self.dim))

    def random_direction(self, rng, base=None) -> tuple:
        v = rng.normal(size=self.dim)
        n = float(math.sqrt(float((v * v).sum())))
        if n == 0.0:
            v = [1.0] + [0.0] * (self.dim - 1)
            return tuple(v)
        return tuple(float(x) / n for x in v)

    def unit(self, v: tuple) -> tuple:
        n = vec_norm(v)
        if n <= 0:
            raise GeometryError("zero vector has no direction")
        return vec_scale(1.0 / n, v)

    # tangent-vector helpers used by the cone machinery
    def dir_to_vector(self, d: tuple) -> tuple:
        return d

    def vector_to_dir(self, base: tuple, v: tuple) -> tuple:
        return self.unit(v)

    def translate(self, p: tuple, v: tuple, t: float) -> tuple:
        return vec_add(p, vec_scale(t, v))

    def _to_json(self) -> dict:
        return {"kind": self.kind, "dim": self.dim, "tolerance": self.tolerance}

    def _point_json(self, data: tuple) -> list:
        return list(data)

    def _point_from_json(self, obj: list) -> tuple:
        return tuple(float(x) for x in obj)
