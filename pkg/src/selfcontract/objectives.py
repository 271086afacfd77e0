"""Objective functions with declared convexity classes, plus probes.

The catalog provides the stock of test objectives used by the gradient
curve machinery and the CLI: squared and plain distances, the cubic
pathology, piecewise-monotone 1-d shapes, distances to convex sets, and
maxima of convex functions.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import GeometryError, UnsupportedSpaceError
from .spaces.base import Point, Space
from .spaces.book import BookSpace
from .spaces.euclidean import EuclideanSpace
from .spaces.tree import SpiderSpace, TreeSpace

QUASICONVEX = "quasiconvex"
CONVEX = "convex"
LAMBDA_CONVEX = "lambda"


@dataclass(frozen=True)
class BoxDomain:
    """Axis-aligned box restriction for Euclidean objectives."""

    bounds: tuple[tuple[float, float], ...]

    def contains(self, data: tuple, tol: float = 1e-12) -> bool:
        return all(lo - tol <= x <= hi + tol for x, (lo, hi) in zip(data, self.bounds))

    def clip(self, data: tuple) -> tuple:
        return tuple(min(max(x, lo), hi) for x, (lo, hi) in zip(data, self.bounds))


@dataclass(frozen=True)
class ObjectiveFn:
    """An evaluatable real function on a space with convexity metadata."""

    name: str
    space: Space
    fn: Callable[[Point], float]
    convexity: str = QUASICONVEX
    lam: float | None = None
    lower_bound: float | None = None
    domain: BoxDomain | None = None
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.convexity not in (QUASICONVEX, CONVEX, LAMBDA_CONVEX):
            raise GeometryError(f"unknown convexity class {self.convexity!r}")
        if self.convexity == LAMBDA_CONVEX and self.lam is None:
            raise GeometryError("lambda-convex objectives need lam")
        if self.domain is not None and not isinstance(self.space, EuclideanSpace):
            raise UnsupportedSpaceError("box domains only restrict Euclidean spaces")

    def __call__(self, p: Point) -> float:
        self.space.own(p)
        if self.domain is not None and not self.domain.contains(p.data):
            raise GeometryError(f"point {p.data} outside the objective domain")
        return float(self.fn(p))

    def in_domain(self, p: Point) -> bool:
        return self.domain is None or self.domain.contains(p.data)

    @property
    def is_convex(self) -> bool:
        return self.convexity == CONVEX or (
            self.convexity == LAMBDA_CONVEX and (self.lam or 0.0) >= 0.0
        )


def _require_point_param(space: Space, params: dict, key: str) -> Point:
    value = params.get(key)
    if isinstance(value, Point):
        return value
    if value is None:
        raise GeometryError(f"objective needs parameter {key!r}")
    return space.point(tuple(value) if isinstance(value, (list, tuple)) else value)


def builtin_objectives(space: Space) -> dict[str, Callable[..., ObjectiveFn]]:
    """Catalog of objective factories available on this space.

    Each factory takes keyword parameters and returns an ObjectiveFn.
    """
    catalog: dict[str, Callable[..., ObjectiveFn]] = {}

    def half_sq_dist(**params) -> ObjectiveFn:
        p = _require_point_param(space, params, "target")
        return ObjectiveFn(
            name="half_sq_dist", space=space,
            fn=lambda z: 0.5 * space.distance(z, p) ** 2,
            convexity=LAMBDA_CONVEX, lam=1.0, lower_bound=0.0,
            params={"target": space._point_json(p.data)},
        )

    def dist(**params) -> ObjectiveFn:
        p = _require_point_param(space, params, "target")
        return ObjectiveFn(
            name="dist", space=space,
            fn=lambda z: space.distance(z, p),
            convexity=CONVEX, lower_bound=0.0,
            params={"target": space._point_json(p.data)},
        )

    def max_two_dists(**params) -> ObjectiveFn:
        p = _require_point_param(space, params, "target")
        q = _require_point_param(space, params, "other")
        return ObjectiveFn(
            name="max_two_dists", space=space,
            fn=lambda z: max(space.distance(z, p), space.distance(z, q)),
            convexity=CONVEX, lower_bound=0.0,
            params={"target": space._point_json(p.data),
                    "other": space._point_json(q.data)},
        )

    catalog["half_sq_dist"] = half_sq_dist
    catalog["dist"] = dist
    catalog["max_two_dists"] = max_two_dists

    if isinstance(space, EuclideanSpace) and space.dim == 1:

        def neg_cube(**params) -> ObjectiveFn:
            return ObjectiveFn(
                name="neg_cube", space=space,
                fn=lambda z: -z.data[0] ** 3,
                convexity=QUASICONVEX, lower_bound=None, params={},
            )

        def neg_cube_unit(**params) -> ObjectiveFn:
            return ObjectiveFn(
                name="neg_cube_unit", space=space,
                fn=lambda z: -z.data[0] ** 3,
                convexity=QUASICONVEX, lower_bound=-1.0,
                domain=BoxDomain(((0.0, 1.0),)), params={},
            )

        def sqrt_abs(**params) -> ObjectiveFn:
            c = float(params.get("center", 0.0))
            return ObjectiveFn(
                name="sqrt_abs", space=space,
                fn=lambda z: math.sqrt(abs(z.data[0] - c)),
                convexity=QUASICONVEX, lower_bound=0.0, params={"center": c},
            )

        def ripple_vee(**params) -> ObjectiveFn:
            # strictly increasing in |z|, so quasi-convex but far from convex
            return ObjectiveFn(
                name="ripple_vee", space=space,
                fn=lambda z: abs(z.data[0]) + 0.5 * math.sin(abs(z.data[0])),
                convexity=QUASICONVEX, lower_bound=0.0, params={},
            )

        catalog["neg_cube"] = neg_cube
        catalog["neg_cube_unit"] = neg_cube_unit
        catalog["sqrt_abs"] = sqrt_abs
        catalog["ripple_vee"] = ripple_vee

    if isinstance(space, SpiderSpace):

        def dist_to_leg_segment(**params) -> ObjectiveFn:
            leg = int(params.get("leg", 1))
            lo = float(params.get("lo", 0.0))
            hi = float(params.get("hi", space.leg_lengths[leg - 1]))
            if not 0.0 <= lo <= hi <= space.leg_lengths[leg - 1]:
                raise GeometryError("need 0 <= lo <= hi <= leg length")

            def f(z: Point) -> float:
                zl, zr = z.data
                if zl == leg:
                    return max(lo - zr, 0.0, zr - hi)
                return zr + lo  # to the segment through the center

            return ObjectiveFn(
                name="dist_to_leg_segment", space=space, fn=f,
                convexity=CONVEX, lower_bound=0.0,
                params={"leg": leg, "lo": lo, "hi": hi},
            )

        catalog["dist_to_leg_segment"] = dist_to_leg_segment

    if isinstance(space, TreeSpace):

        def dist_to_edge_segment(**params) -> ObjectiveFn:
            edge = int(params.get("edge", 0))
            u, v, length = space.edges[edge]
            lo = float(params.get("lo", 0.0))
            hi = float(params.get("hi", length))
            if not 0.0 <= lo <= hi <= length:
                raise GeometryError("need 0 <= lo <= hi <= edge length")
            rep_u = space._vertex_rep[u]
            rep_v = space._vertex_rep[v]

            def f(z: Point) -> float:
                ze, zo = z.data
                if ze == edge:
                    return max(lo - zo, 0.0, zo - hi)
                dpu = space._dist(z.data, rep_u)
                dpv = space._dist(z.data, rep_v)
                return min(dpu + lo, dpv + (length - hi))

            return ObjectiveFn(
                name="dist_to_edge_segment", space=space, fn=f,
                convexity=CONVEX, lower_bound=0.0,
                params={"edge": edge, "lo": lo, "hi": hi},
            )

        catalog["dist_to_edge_segment"] = dist_to_edge_segment

    if isinstance(space, BookSpace):

        def dist_to_spine_segment(**params) -> ObjectiveFn:
            a0 = float(params.get("lo", -1.0))
            a1 = float(params.get("hi", 1.0))
            if a1 < a0:
                raise GeometryError("need lo <= hi")

            def f(z: Point) -> float:
                _, a, b = z.data
                da = max(a0 - a, 0.0, a - a1)
                return math.hypot(da, b)

            return ObjectiveFn(
                name="dist_to_spine_segment", space=space, fn=f,
                convexity=CONVEX, lower_bound=0.0,
                params={"lo": a0, "hi": a1},
            )

        catalog["dist_to_spine_segment"] = dist_to_spine_segment

    return catalog


def make_objective(space: Space, name: str, **params) -> ObjectiveFn:
    catalog = builtin_objectives(space)
    if name not in catalog:
        raise GeometryError(
            f"unknown objective {name!r} on {space.describe()}; "
            f"available: {sorted(catalog)}"
        )
    return catalog[name](**params)


@dataclass(frozen=True)
class ConvexityProbeReport:
    n_checked: int
    max_violation: float
    witness: dict | None
    lambda_max_violation: float | None = None

    @property
    def ok(self) -> bool:
        return self.max_violation <= 1e-9


def _domain_sample(objective: ObjectiveFn, rng, scale: float) -> Point:
    space = objective.space
    if objective.domain is not None:
        data = tuple(
            float(rng.uniform(lo, hi)) for lo, hi in objective.domain.bounds
        )
        return space.point(data)
    return space.random_point(rng, scale)


def quasiconvexity_probe(objective: ObjectiveFn, n_samples: int = 1000,
                         seed: int = 0, scale: float = 2.0) -> ConvexityProbeReport:
    """Sample geodesic chords and report the worst quasi-convexity violation.

    Also reports the lambda-convexity violation when that class is
    declared.  Violations beyond 1e-9 mean the declared class is wrong.
    """
    rng = np.random.default_rng(seed)
    space = objective.space
    worst = -math.inf
    witness = None
    worst_lam = -math.inf if objective.convexity == LAMBDA_CONVEX else None
    for _ in range(n_samples):
        x = _domain_sample(objective, rng, scale)
        y = _domain_sample(objective, rng, scale)
        s = float(rng.uniform(0.0, 1.0))
        mid = space.geodesic_point(x, y, s)
        if objective.domain is not None and not objective.domain.contains(mid.data):
            continue
        fx, fy, fm = objective(x), objective(y), objective(mid)
        viol = fm - max(fx, fy)
        if viol > worst:
            worst = viol
            witness = {
                "x": space._point_json(x.data),
                "y": space._point_json(y.data),
                "s": s,
                "violation": viol,
            }
        if worst_lam is not None:
            lam = objective.lam or 0.0
            d = space.distance(x, y)
            bound = (1 - s) * fx + s * fy - 0.5 * lam * (1 - s) * s * d * d
            worst_lam = max(worst_lam, fm - bound)
    return ConvexityProbeReport(
        n_checked=n_samples,
        max_violation=worst if worst > -math.inf else 0.0,
        witness=witness,
        lambda_max_violation=worst_lam if worst_lam not in (None, -math.inf) else None,
    )
