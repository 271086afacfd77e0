"""Moreau-Yosida approximation, resolvent steps, and gradient curves.

The resolvent minimizes f(z) + d(x,z)^2 / (2 tau) globally.  Because f
is only quasi-convex, the composite may have several basins; the solver
therefore exploits per-space structure: exhaustive per-edge line search
on trees and spiders, expanding-window multi-start grids with
deterministic pattern refinement on Euclidean/hyperbolic spaces, and
per-sheet plus spine solves on books.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import GeometryError, SolverError, UnsupportedSpaceError
from .metric import Curve, GEODESIC, make_curve
from .objectives import LAMBDA_CONVEX, ObjectiveFn
from .spaces.base import Point, Space
from .spaces.book import BookSpace
from .spaces.euclidean import EuclideanSpace
from .spaces.hyperbolic import HyperbolicPlane
from .spaces.tree import SpiderSpace, TreeSpace

UNIQUE = "unique"
MULTIPLE_TIES = "multiple_ties"
EMPTY = "empty"
UNBOUNDED = "unbounded"

_INVPHI = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class SolverConfig:
    grid_1d: int = 128
    grid_2d: int = 24
    refine_tol: float = 1e-13
    tie_value: float = 1e-6
    dedupe_dist: float = 1e-6
    start_radius: float = 2.0
    max_radius: float = 1e6
    unbounded_value: float = -1e12


DEFAULT_SOLVER = SolverConfig()


@dataclass(frozen=True)
class ResolventResult:
    minimizers: tuple[Point, ...]
    value: float
    status: str

    @property
    def point(self) -> Point:
        if not self.minimizers:
            raise SolverError(f"resolvent has no minimizer (status {self.status})")
        return self.minimizers[0]


def _parabolic_polish(fn, x: float, h: float, lo: float, hi: float,
                      rounds: int = 3) -> tuple[float, float]:
    """Refine a smooth interior minimum by successive parabola fits.

    Value-only descent stalls at sqrt(machine eps) in position; fitting
    a parabola through three nearby samples recovers the vertex to near
    full precision when the function is locally quadratic.
    """
    best_x, best_f = x, fn(x)
    for _ in range(rounds):
        xl, xr = max(best_x - h, lo), min(best_x + h, hi)
        if xr - xl <= 0:
            break
        xm = 0.5 * (xl + xr)
        fl, fm, fr = fn(xl), fn(xm), fn(xr)
        denom = fl - 2.0 * fm + fr
        if denom <= 0:
            h *= 0.25
            continue
        v = xm + 0.5 * (xr - xl) / 2.0 * (fl - fr) / denom
        v = min(max(v, lo), hi)
        fv = fn(v)
        if fv <= best_f:
            best_x, best_f = v, fv
        h *= 0.125
    return best_x, best_f


def _golden_min(fn, a: float, b: float, tol: float) -> tuple[float, float]:
    """Golden-section minimum of fn over [a, b] (assumed unimodal there)."""
    lo0, hi0 = a, b
    c = b - _INVPHI * (b - a)
    d = a + _INVPHI * (b - a)
    fc, fd = fn(c), fn(d)
    while b - a > tol:
        if fc <= fd:
            b, d, fd = d, c, fc
            c = b - _INVPHI * (b - a)
            fc = fn(c)
        else:
            a, c, fc = c, d, fd
            d = a + _INVPHI * (b - a)
            fd = fn(d)
    xs = [(fn(a), a), (fc, c), (fd, d), (fn(b), b)]
    fx, x = min(xs, key=lambda t: t[0])
    if lo0 < x < hi0:
        h_fit = max(1e-5 * max(1.0, abs(x)), 2.0 * (b - a))
        px, pf = _parabolic_polish(fn, x, h_fit, lo0, hi0)
        if pf <= fx:
            return px, pf
    return x, fx


def _line_minima(fn, lo: float, hi: float, grid: int, tol: float
                 ) -> list[tuple[float, float]]:
    """All local-basin minima of fn over [lo, hi] found on a grid + refine."""
    if hi <= lo:
        v = fn(lo)
        return [(lo, v)]
    xs = [lo + (hi - lo) * i / grid for i in range(grid + 1)]
    vs = [fn(x) for x in xs]
    out: list[tuple[float, float]] = []
    for i in range(grid + 1):
        left = vs[i - 1] if i > 0 else math.inf
        right = vs[i + 1] if i < grid else math.inf
        if vs[i] <= left and vs[i] <= right:
            a = xs[max(i - 1, 0)]
            b = xs[min(i + 1, grid)]
            out.append(_golden_min(fn, a, b, tol * max(1.0, hi - lo)))
    return out


def _pattern_refine(fn, start: list[float], step: float, lo=None, hi=None,
                    tol: float = 1e-13) -> tuple[list[float], float]:
    """Deterministic compass search; coordinates clipped to [lo, hi] boxes.

    Finishes with coordinate-wise parabola fits, which sharpen smooth
    interior minima past the sqrt(eps) stall of pure value descent.
    """
    x = list(start)
    fx = fn(x)
    n = len(x)
    h = step
    floor = max(tol * max(1.0, step), 1e-9)
    while h > floor:
        improved = False
        for i in range(n):
            for sgn in (1.0, -1.0):
                cand = list(x)
                cand[i] = cand[i] + sgn * h
                if lo is not None:
                    cand[i] = max(cand[i], lo[i])
                if hi is not None:
                    cand[i] = min(cand[i], hi[i])
                fc = fn(cand)
                if fc < fx - 1e-18:
                    x, fx = cand, fc
                    improved = True
        if not improved:
            h *= 0.5
    for _sweep in range(2):
        for i in range(n):
            li = lo[i] if lo is not None else x[i] - 1.0
            hi_i = hi[i] if hi is not None else x[i] + 1.0
            if not li < x[i] < hi_i:
                continue

            def axis_fn(t, i=i):
                cand = list(x)
                cand[i] = t
                return fn(cand)

            h_fit = 1e-5 * max(1.0, abs(x[i]))
            t, ft = _parabolic_polish(axis_fn, x[i], h_fit, li, hi_i)
            if ft <= fx:
                x[i], fx = t, ft
    return x, fx


class _Composite:
    """f(z) + d(x,z)^2/(2 tau) with an evaluation counter."""

    def __init__(self, objective: ObjectiveFn, space: Space, x: Point, tau: float):
        self.objective = objective
        self.space = space
        self.x = x
        self.tau = tau
        self.evals = 0

    def at_point(self, p: Point) -> float:
        self.evals += 1
        d = self.space.distance(self.x, p)
        return self.objective(p) + d * d / (2.0 * self.tau)


def _grid_scores(eval_coords, los, his, cfg: SolverConfig
                 ) -> tuple[list[tuple[float, tuple]], float]:
    """Score a full grid over the box; returns sorted (value, coords) + cell."""
    n = len(los)
    cells = cfg.grid_1d if n == 1 else cfg.grid_2d
    axes = [
        [lo + (hi - lo) * i / cells for i in range(cells + 1)]
        for lo, hi in zip(los, his)
    ]
    if n == 1:
        coords_list = [(x,) for x in axes[0]]
    elif n == 2:
        coords_list = [(x, y) for x in axes[0] for y in axes[1]]
    else:
        raise UnsupportedSpaceError("grid solver supports 1 or 2 coordinates")
    scored = sorted(((eval_coords(list(c)), c) for c in coords_list),
                    key=lambda t: t[0])
    cell = max((hi - lo) / cells for lo, hi in zip(los, his))
    return scored, cell


def _refine_top(eval_coords, scored, cell, los, his, cfg: SolverConfig,
                keep: int = 4) -> list[tuple[list[float], float]]:
    out = []
    for v0, c0 in scored[:keep]:
        c, v = _pattern_refine(eval_coords, list(c0), cell, los, his, cfg.refine_tol)
        out.append((c, v))
    out.sort(key=lambda t: t[1])
    return out


def _on_boundary(coords, los, his, radius: float) -> bool:
    eps = 1e-12 * max(1.0, radius)
    return any(
        x - lo < eps or hi - x < eps for x, lo, hi in zip(coords, los, his)
    )


def _solve_euclidean(comp: _Composite, cfg: SolverConfig
                     ) -> tuple[str, list[tuple[Point, float]]]:
    space: EuclideanSpace = comp.space
    obj = comp.objective
    if space.dim > 2:
        raise UnsupportedSpaceError(
            "resolvent solver covers Euclidean dimensions 1 and 2"
        )

    def eval_coords(coords) -> float:
        return comp.at_point(space.point(tuple(coords)))

    def pack(cands):
        return [(space.point(tuple(c)), v) for c, v in cands]

    if obj.domain is not None:
        los = [b[0] for b in obj.domain.bounds]
        his = [b[1] for b in obj.domain.bounds]
        scored, cell = _grid_scores(eval_coords, los, his, cfg)
        return "ok", pack(_refine_top(eval_coords, scored, cell, los, his, cfg))

    center = list(comp.x.data)
    radius = cfg.start_radius * max(1.0, math.sqrt(comp.tau))
    while True:
        los = [c - radius for c in center]
        his = [c + radius for c in center]
        scored, cell = _grid_scores(eval_coords, los, his, cfg)
        best_v, best_c = scored[0]
        if best_v < cfg.unbounded_value:
            return UNBOUNDED, []
        if not _on_boundary(best_c, los, his, radius):
            return "ok", pack(_refine_top(eval_coords, scored, cell, los, his, cfg))
        if radius > cfg.max_radius:
            return UNBOUNDED, []
        radius *= 4.0


def _solve_hyperbolic(comp: _Composite, cfg: SolverConfig
                      ) -> tuple[str, list[tuple[Point, float]]]:
    space: HyperbolicPlane = comp.space
    base = comp.x.data
    e1, e2 = space.tangent_basis(base)

    def to_point(coords) -> Point:
        v1, v2 = coords
        r = math.hypot(v1, v2)
        if r == 0.0:
            return Point(space, base)
        u = tuple((v1 * e1[i] + v2 * e2[i]) / r for i in range(3))
        return Point(space, space.exp(base, u, r))

    def eval_coords(coords) -> float:
        return comp.at_point(to_point(coords))

    radius = cfg.start_radius * max(1.0, math.sqrt(comp.tau))
    while True:
        los, his = [-radius] * 2, [radius] * 2
        scored, cell = _grid_scores(eval_coords, los, his, cfg)
        best_v, best_c = scored[0]
        if best_v < cfg.unbounded_value:
            return UNBOUNDED, []
        if not _on_boundary(best_c, los, his, radius):
            cands = _refine_top(eval_coords, scored, cell, los, his, cfg)
            return "ok", [(to_point(c), v) for c, v in cands]
        if radius > cfg.max_radius:
            return UNBOUNDED, []
        radius *= 4.0


def _solve_spider(comp: _Composite, cfg: SolverConfig
                  ) -> tuple[str, list[tuple[Point, float]]]:
    space: SpiderSpace = comp.space
    out: list[tuple[Point, float]] = []
    center = space.center()
    out.append((center, comp.at_point(center)))
    for leg in range(1, space.k + 1):
        length = space.leg_lengths[leg - 1]

        def fn(t, leg=leg):
            return comp.at_point(space.point((leg, t)))

        for t, v in _line_minima(fn, 0.0, length, cfg.grid_1d, cfg.refine_tol):
            out.append((space.point((leg, t)), v))
    out.sort(key=lambda t: t[1])
    return "ok", out


def _solve_tree(comp: _Composite, cfg: SolverConfig
                ) -> tuple[str, list[tuple[Point, float]]]:
    space: TreeSpace = comp.space
    out: list[tuple[Point, float]] = []
    for ei, (_, _, length) in enumerate(space.edges):

        def fn(t, ei=ei):
            return comp.at_point(space.point((ei, t)))

        for t, v in _line_minima(fn, 0.0, length, cfg.grid_1d, cfg.refine_tol):
            out.append((space.point((ei, t)), v))
    out.sort(key=lambda t: t[1])
    return "ok", out


def _solve_book(comp: _Composite, cfg: SolverConfig
                ) -> tuple[str, list[tuple[Point, float]]]:
    space: BookSpace = comp.space
    xa = comp.x.data[1]
    radius = cfg.start_radius * max(1.0, math.sqrt(comp.tau), abs(comp.x.data[2]))
    while True:
        out: list[tuple[Point, float]] = []

        def spine_fn(a):
            return comp.at_point(space.point((0, a, 0.0)))

        for a, v in _line_minima(spine_fn, xa - radius, xa + radius,
                                 cfg.grid_1d, cfg.refine_tol):
            out.append((space.point((0, a, 0.0)), v))
        for sheet in range(1, space.k + 1):

            def eval_coords(coords, sheet=sheet):
                a, b = coords
                return comp.at_point(space.point((sheet, a, max(b, 0.0))))

            los = [xa - radius, 0.0]
            his = [xa + radius, radius]
            scored, cell = _grid_scores(eval_coords, los, his, cfg)
            for c, v in _refine_top(eval_coords, scored, cell, los, his, cfg):
                out.append((space.point((sheet, c[0], max(c[1], 0.0))), v))
        out.sort(key=lambda t: t[1])
        best_val = out[0][1]
        if best_val < cfg.unbounded_value:
            return UNBOUNDED, []
        pa, pb = out[0][0].data[1], out[0][0].data[2]
        if abs(pa - xa) < radius * (1 - 1e-9) and pb < radius * (1 - 1e-9):
            return "ok", out
        if radius > cfg.max_radius:
            return UNBOUNDED, []
        radius *= 4.0


_SOLVERS = {
    EuclideanSpace: _solve_euclidean,
    HyperbolicPlane: _solve_hyperbolic,
    SpiderSpace: _solve_spider,
    TreeSpace: _solve_tree,
    BookSpace: _solve_book,
}


def _solve(objective: ObjectiveFn, space: Space, x: Point, tau: float,
           cfg: SolverConfig) -> tuple[str, list[tuple[Point, float]], int]:
    comp = _Composite(objective, space, x, tau)
    for cls, solver in _SOLVERS.items():
        if isinstance(space, cls):
            status, cands = solver(comp, cfg)
            return status, cands, comp.evals
    raise UnsupportedSpaceError(f"no resolvent solver for {space.describe()}")


def _check_inputs(objective: ObjectiveFn, space: Space, x: Point, tau: float):
    if tau <= 0:
        raise GeometryError("tau must be positive")
    space.own(x)
    if objective.space != space:
        raise GeometryError("objective lives on a different space")
    if (objective.convexity == LAMBDA_CONVEX and objective.lam is not None
            and objective.lam < 0 and tau >= 1.0 / (-objective.lam)):
        raise GeometryError(
            f"step {tau} too large for {objective.lam}-convex objective; "
            f"need tau < {1.0 / (-objective.lam)}"
        )
    if not objective.in_domain(x):
        raise GeometryError("base point outside the objective domain")


def moreau_yosida(objective: ObjectiveFn, space: Space, x: Point, tau: float,
                  cfg: SolverConfig = DEFAULT_SOLVER) -> float:
    """inf_z f(z) + d(x,z)^2/(2 tau); -inf when divergence is detected."""
    _check_inputs(objective, space, x, tau)
    status, cands, _ = _solve(objective, space, x, tau, cfg)
    if status == UNBOUNDED:
        return -math.inf
    return cands[0][1]


def resolvent(objective: ObjectiveFn, space: Space, x: Point, tau: float,
              cfg: SolverConfig = DEFAULT_SOLVER) -> ResolventResult:
    """All global minimizers of the proximal subproblem, deduplicated.

    Ties within cfg.tie_value of the optimum are all reported; the
    minimizer list is sorted nearest-to-x first (then by coordinates) so
    that downstream tie-breaking is deterministic.
    """
    _check_inputs(objective, space, x, tau)
    status, cands, _ = _solve(objective, space, x, tau, cfg)
    if status == UNBOUNDED:
        return ResolventResult((), -math.inf, UNBOUNDED)
    if not cands:
        return ResolventResult((), math.inf, EMPTY)
    best = cands[0][1]
    kept: list[Point] = []
    for p, v in cands:
        if v > best + cfg.tie_value:
            break
        if all(space.distance(p, q) > cfg.dedupe_dist for q in kept):
            kept.append(p)
    kept.sort(key=lambda p: (space.distance(x, p), space._point_json(p.data)))
    status = UNIQUE if len(kept) == 1 else MULTIPLE_TIES
    return ResolventResult(tuple(kept), best, status)


@dataclass(frozen=True)
class GradientCurveRun:
    """A discrete proximal trajectory plus bookkeeping.

    Times are cumulative step sizes: t_0 = 0 and t_k = tau_1 + ... +
    tau_k, which is also the reparametrization used by the geodesic
    interpolation.
    """

    space: Space
    objective: ObjectiveFn
    tau_schedule: tuple[float, ...]
    points: tuple[Point, ...]
    values: tuple[float, ...]
    diagnostic: str | None = None

    @property
    def times(self) -> list[float]:
        ts = [0.0]
        for tau in self.tau_schedule[: len(self.points) - 1]:
            ts.append(ts[-1] + tau)
        return ts

    def discrete_curve(self) -> Curve:
        return make_curve(self.points, self.times, mode="discrete")

    def interpolated_curve(self) -> Curve:
        return make_curve(self.points, self.times, mode=GEODESIC)


def discrete_gradient_curve(objective: ObjectiveFn, space: Space, x0: Point,
                            tau_schedule, cfg: SolverConfig = DEFAULT_SOLVER
                            ) -> GradientCurveRun:
    """Iterate the resolvent along the step schedule.

    The 'arbitrary choice' in the recursion is pinned to the minimizer
    nearest the previous point (coordinates break remaining ties).  An
    empty or unbounded resolvent aborts with the prefix and a diagnostic.
    """
    taus = tuple(float(t) for t in tau_schedule)
    if any(t <= 0 for t in taus):
        raise GeometryError("step sizes must be positive")
    points = [x0]
    values = [objective(x0)]
    diagnostic = None
    for k, tau in enumerate(taus):
        res = resolvent(objective, space, points[-1], tau, cfg)
        if not res.minimizers:
            diagnostic = (
                f"resolvent {res.status} at step {k + 1}; returning prefix"
            )
            break
        nxt = res.point
        points.append(nxt)
        values.append(objective(nxt))
        if values[-1] > values[-2] + 1e-9:
            raise SolverError(
                f"objective increased along the run at step {k + 1}: "
                f"{values[-2]} -> {values[-1]}"
            )
    return GradientCurveRun(
        space=space, objective=objective, tau_schedule=taus,
        points=tuple(points), values=tuple(values), diagnostic=diagnostic,
    )


def geodesic_interpolation(space: Space, run: GradientCurveRun) -> Curve:
    """Piecewise-geodesic extension of a discrete run (its continuous curve)."""
    if run.space != space:
        raise GeometryError("run belongs to a different space")
    return run.interpolated_curve()
