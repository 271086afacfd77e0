"""Hyperbolic plane in the hyperboloid model.

Points sit on the upper sheet { x : <x,x> = -1, x0 > 0 } of the Minkowski
quadric with signature (-,+,+).  Closed-form geodesics and angles make
this the smooth negatively-curved test bed; no ODE integration anywhere.
"""
from __future__ import annotations

import math

from ..errors import GeometryError
from .base import Space, clamp_cos


def mdot(a: tuple, b: tuple) -> float:
    """Minkowski inner product, timelike coordinate first."""
    return a[1] * b[1] + a[2] * b[2] - a[0] * b[0]


class HyperbolicPlane(Space):
    kind = "hyperbolic2"

    def describe(self) -> str:
        return "hyperbolic2"

    def _check(self, data: tuple) -> None:
        if len(data) != 3:
            raise GeometryError("hyperboloid points have 3 coordinates")
        if data[0] <= 0:
            raise GeometryError("point not on the upper sheet")
        if abs(mdot(data, data) + 1.0) > 1e-6:
            raise GeometryError("point not on the hyperboloid <x,x> = -1")

    def _canonical(self, data: tuple) -> tuple:
        # re-project onto the sheet to stop drift from accumulating
        x = tuple(float(v) for v in data)
        n = math.sqrt(-mdot(x, x))
        return (x[0] / n, x[1] / n, x[2] / n)

    def _dist(self, a: tuple, b: tuple) -> float:
        # 2*asinh(|a-b|_M / 2) is stable for nearby points, unlike acosh(-<a,b>)
        diff = (a[0] - b[0], a[1] - b[1], a[2] - b[2])
        q = mdot(diff, diff)
        if q <= 0.0:
            return 0.0
        return 2.0 * math.asinh(0.5 * math.sqrt(q))

    def _tangent_toward(self, a: tuple, b: tuple) -> tuple[tuple, float]:
        d = self._dist(a, b)
        if d == 0.0:
            raise GeometryError("no tangent between coincident points")
        ch, sh = math.cosh(d), math.sinh(d)
        u = tuple((b[i] - ch * a[i]) / sh for i in range(3))
        return u, d

    def _geodesic(self, a: tuple, b: tuple, s: float) -> tuple:
        if s == 0.0:
            return a
        if s == 1.0:
            return b
        if self._dist(a, b) == 0.0:
            return a
        u, d = self._tangent_toward(a, b)
        t = s * d
        ch, sh = math.cosh(t), math.sinh(t)
        return self._canonical(tuple(ch * a[i] + sh * u[i] for i in range(3)))

    def _log(self, a: tuple, b: tuple) -> tuple[tuple, float]:
        u, d = self._tangent_toward(a, b)
        return u, d

    def _angle(self, base: tuple, d1: tuple, d2: tuple) -> float:
        # the Minkowski form is Riemannian on tangent planes of the sheet
        return math.acos(clamp_cos(mdot(d1, d2)))

    def exp(self, p: tuple, v: tuple, t: float) -> tuple:
        """Exponential map: walk distance t from payload p along unit tangent v."""
        ch, sh = math.cosh(t), math.sinh(t)
        return self._canonical(tuple(ch * p[i] + sh * v[i] for i in range(3)))

    def origin(self) -> tuple:
        return (1.0, 0.0, 0.0)

    def tangent_basis(self, p: tuple) -> tuple[tuple, tuple]:
        """Orthonormal tangent basis at p (Minkowski-orthogonal to p)."""
        for seed in ((0.0, 1.0, 0.0), (0.0, 0.0, 1.0)):
            e1 = self._project_tangent(p, seed)
            n = math.sqrt(max(mdot(e1, e1), 0.0))
            if n > 1e-8:
                e1 = tuple(x / n for x in e1)
                break
        e2 = self._project_tangent(p, (0.0, -e1[2], e1[1]))
        # fallback via Gram-Schmidt when the cheap rotation degenerates
        if math.sqrt(max(mdot(e2, e2), 0.0)) < 1e-8:
            e2 = self._project_tangent(p, (0.0, 0.0, 1.0))
            c = mdot(e2, e1)
            e2 = tuple(e2[i] - c * e1[i] for i in range(3))
        n2 = math.sqrt(mdot(e2, e2))
        e2 = tuple(x / n2 for x in e2)
        return e1, e2

    def _project_tangent(self, p: tuple, v: tuple) -> tuple:
        c = mdot(p, v)
        return tuple(v[i] + c * p[i] for i in range(3))

    def _random_point(self, rng, scale: float = 1.0) -> tuple:
        theta = float(rng.uniform(0.0, 2.0 * math.pi))
        r = float(rng.uniform(0.0, scale))
        o = self.origin()
        e1, e2 = self.tangent_basis(o)
        v = tuple(math.cos(theta) * e1[i] + math.sin(theta) * e2[i] for i in range(3))
        return self.exp(o, v, r)

    def random_direction(self, rng, base: tuple) -> tuple:
        theta = float(rng.uniform(0.0, 2.0 * math.pi))
        e1, e2 = self.tangent_basis(base)
        return tuple(math.cos(theta) * e1[i] + math.sin(theta) * e2[i] for i in range(3))

    def _to_json(self) -> dict:
        return {"kind": self.kind, "tolerance": self.tolerance}

    def _point_json(self, data: tuple) -> list:
        return list(data)

    def _point_from_json(self, obj: list) -> tuple:
        return tuple(float(x) for x in obj)
