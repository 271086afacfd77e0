"""Decision procedures and residual checks for self-contracted curves.

The defining inequality says distances to any later point are
non-increasing in time.  Checking it over all sample triples reduces to
a running minimum per endpoint, so curves up to the exhaustive cap are
checked over *every* triple in quadratic time; longer curves fall back
to stratified subsampling.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .errors import GeometryError
from .metric import Curve, GEODESIC, comparison_angle, make_curve
from .objectives import ObjectiveFn
from .proximal import GradientCurveRun
from .spaces.base import Point, Space

VIOLATION_TOL = 1e-9


@dataclass(frozen=True)
class SamplingConfig:
    max_exhaustive: int = 1000
    densify_levels: int = 3
    seed: int = 0
    tolerance: float = VIOLATION_TOL


DEFAULT_SAMPLING = SamplingConfig()


@dataclass(frozen=True)
class ViolationReport:
    check: str
    max_violation: float
    n_checked: int
    tolerance: float
    witness: dict | None = None
    informational: bool = False

    @property
    def passed(self) -> bool:
        return self.max_violation <= self.tolerance

    def to_json(self) -> dict:
        return {
            "check": self.check,
            "passed": self.passed,
            "max_violation": self.max_violation,
            "n_checked": self.n_checked,
            "tolerance": self.tolerance,
            "witness": self.witness,
            "informational": self.informational,
        }


def _effective_samples(curve: Curve, cfg: SamplingConfig
                       ) -> list[tuple[float, Point]]:
    """Curve samples, densified along geodesic segments, capped for runtime."""
    work = curve.densified(cfg.densify_levels) if curve.mode == GEODESIC else curve
    samples = list(work.samples)
    n = len(samples)
    if n <= cfg.max_exhaustive:
        return samples
    rng = np.random.default_rng(cfg.seed)
    keep = {0, n - 1}
    strata = np.linspace(0, n - 1, cfg.max_exhaustive - 2)
    jitter = rng.uniform(-0.5, 0.5, len(strata))
    for s, j in zip(strata, jitter):
        keep.add(int(round(min(max(s + j, 0), n - 1))))
    return [samples[i] for i in sorted(keep)]


def is_self_contracted(space: Space, curve: Curve,
                       cfg: SamplingConfig = DEFAULT_SAMPLING) -> ViolationReport:
    """Check d(xi(t2), xi(t3)) <= d(xi(t1), xi(t3)) over sampled triples.

    The reported violation is the exact maximum over all triples of the
    effective sample set (running-minimum reduction per t3).
    """
    samples = _effective_samples(curve, cfg)
    n = len(samples)
    worst = 0.0
    witness = None
    n_checked = 0
    for k in range(1, n):
        tk, pk = samples[k]
        run_min = math.inf
        run_min_t = None
        for i in range(k):
            ti, pi = samples[i]
            d = space.distance(pi, pk)
            n_checked += 1
            viol = d - run_min
            if viol > worst:
                worst = viol
                witness = {
                    "t1": run_min_t, "t2": ti, "t3": tk,
                    "d_t1_t3": run_min, "d_t2_t3": d,
                    "p3": space._point_json(pk.data),
                }
            if d < run_min:
                run_min, run_min_t = d, ti
    return ViolationReport(
        check="self_contracted", max_violation=worst, n_checked=n_checked,
        tolerance=cfg.tolerance, witness=witness,
    )


def tail_monotonicity(space: Space, curve: Curve, T: float,
                      cfg: SamplingConfig = DEFAULT_SAMPLING) -> ViolationReport:
    """t -> d(xi(t), xi(T)) must be non-increasing for t <= T."""
    times = curve.times
    if not any(abs(t - T) <= 1e-12 for t in times):
        raise GeometryError(f"T={T} is not a sample time")
    target = curve.point_at(T)
    worst = 0.0
    witness = None
    run_min = math.inf
    run_min_t = None
    n_checked = 0
    for t, p in curve.samples:
        if t > T + 1e-12:
            break
        d = space.distance(p, target)
        n_checked += 1
        if d - run_min > worst:
            worst = d - run_min
            witness = {"t1": run_min_t, "t2": t, "T": T,
                       "d_t1_T": run_min, "d_t2_T": d}
        if d < run_min:
            run_min, run_min_t = d, t
    return ViolationReport(
        check="tail_monotonicity", max_violation=worst, n_checked=n_checked,
        tolerance=cfg.tolerance, witness=witness,
    )


def stationarity_check(space: Space, curve: Curve,
                       cfg: SamplingConfig = DEFAULT_SAMPLING) -> ViolationReport:
    """Revisiting a point forces the curve to have stayed there in between."""
    samples = list(curve.samples)
    n = len(samples)
    worst = 0.0
    witness = None
    n_checked = 0
    for i in range(n):
        ti, pi = samples[i]
        for j in range(i + 2, n):
            tj, pj = samples[j]
            if space.distance(pi, pj) > space.tolerance:
                continue
            for k in range(i + 1, j):
                tk, pk = samples[k]
                dev = space.distance(pi, pk)
                n_checked += 1
                if dev > worst:
                    worst = dev
                    witness = {"t1": ti, "t2": tk, "t3": tj,
                               "deviation": dev}
    return ViolationReport(
        check="stationarity", max_violation=worst, n_checked=max(n_checked, 1),
        tolerance=max(cfg.tolerance, space.tolerance), witness=witness,
    )


def reparam_preserves(space: Space, curve: Curve, phi: Callable[[float], float],
                      n_grid: int = 64,
                      cfg: SamplingConfig = DEFAULT_SAMPLING) -> ViolationReport:
    """Self-contractedness of t -> xi(phi(t)) for non-decreasing phi.

    phi need not be continuous or injective, but decreasing anywhere on
    the probe grid is an error.
    """
    t0, t1 = curve.times[0], curve.times[-1]
    grid = [t0 + (t1 - t0) * i / max(n_grid - 1, 1) for i in range(n_grid)]
    values = [float(phi(t)) for t in grid]
    if any(b < a - 1e-12 for a, b in zip(values, values[1:])):
        raise GeometryError("phi must be non-decreasing")
    pts = [curve.point_at(min(max(v, t0), t1)) for v in values]
    reparam = make_curve(pts, grid, mode="discrete")
    inner = is_self_contracted(space, reparam, cfg)
    return ViolationReport(
        check="reparam_preserves", max_violation=inner.max_violation,
        n_checked=inner.n_checked, tolerance=inner.tolerance,
        witness=inner.witness,
    )


def angle_estimate_check(space: Space, curve: Curve, tau: float,
                         t1: float, t2: float) -> float:
    """Angle at xi(tau) between the germs toward xi(t1) and xi(t2).

    For self-contracted curves this must be < pi/2.  Triples whose later
    points coincide with xi(tau) have no angle and raise.
    """
    if not (t1 > tau and t2 > tau):
        raise GeometryError("need t1, t2 > tau")
    base = curve.point_at(tau)
    p1 = curve.point_at(t1)
    p2 = curve.point_at(t2)
    if space.same_point(base, p1) or space.same_point(base, p2):
        raise GeometryError("degenerate triple: later point equals xi(tau)")
    d1, _ = space.log_direction(base, p1)
    d2, _ = space.log_direction(base, p2)
    return space.direction_angle(d1, d2)


def angle_estimate_sweep(space: Space, curve: Curve,
                         limit: float = math.pi / 2.0, tol: float = 1e-6,
                         cfg: SamplingConfig = DEFAULT_SAMPLING
                         ) -> ViolationReport:
    """Max angle-estimate excess over all admissible sampled triples."""
    samples = _effective_samples(curve, cfg)
    n = len(samples)
    worst = -math.inf
    witness = None
    n_checked = 0
    for i in range(n):
        ti, base = samples[i]
        germs = []
        for j in range(i + 1, n):
            tj, pj = samples[j]
            if space.same_point(base, pj):
                continue
            germs.append((tj, space.log_direction(base, pj)[0]))
        for a in range(len(germs)):
            for b in range(a, len(germs)):
                ang = space.direction_angle(germs[a][1], germs[b][1])
                n_checked += 1
                if ang - limit > worst:
                    worst = ang - limit
                    witness = {"tau": ti, "t1": germs[a][0], "t2": germs[b][0],
                               "angle": ang}
    return ViolationReport(
        check="angle_estimate", max_violation=worst if n_checked else 0.0,
        n_checked=max(n_checked, 1), tolerance=tol, witness=witness,
    )


def ball_confinement_check(space: Space, curve: Curve, x: Point, r: float,
                           cfg: SamplingConfig = DEFAULT_SAMPLING
                           ) -> ViolationReport:
    """Between two visits to B(x, r) the curve must stay in B(x, 3r)."""
    if r <= 0:
        raise GeometryError("radius must be positive")
    samples = list(curve.samples)
    dists = [space.distance(x, p) for _, p in samples]
    inside = [d <= r for d in dists]
    n = len(samples)
    before = [False] * n
    after = [False] * n
    seen = False
    for i in range(n):
        before[i] = seen
        seen = seen or inside[i]
    seen = False
    for i in range(n - 1, -1, -1):
        after[i] = seen
        seen = seen or inside[i]
    worst = 0.0
    witness = None
    n_checked = 0
    for i in range(n):
        if before[i] and after[i]:
            n_checked += 1
            excess = dists[i] - 3.0 * r
            if excess > worst:
                worst = excess
                witness = {"t": samples[i][0], "d_to_center": dists[i],
                           "allowed": 3.0 * r}
    return ViolationReport(
        check="ball_confinement", max_violation=worst,
        n_checked=max(n_checked, 1), tolerance=cfg.tolerance, witness=witness,
    )


def tail_halving_check(space: Space, curve: Curve,
                       cfg: SamplingConfig = DEFAULT_SAMPLING) -> ViolationReport:
    """d(xi(t), xi(tau)) >= d(xi(T), xi(tau)) / 2 for tau < T <= t.

    A consequence of self-contractedness used by the projection
    decrease arguments.
    """
    samples = _effective_samples(curve, cfg)
    n = len(samples)
    worst = 0.0
    witness = None
    n_checked = 0
    for i in range(n):
        ti, pi = samples[i]
        dists = [space.distance(pi, samples[j][1]) for j in range(i + 1, n)]
        if not dists:
            continue
        suffix_min = list(dists)
        for j in range(len(dists) - 2, -1, -1):
            suffix_min[j] = min(suffix_min[j], suffix_min[j + 1])
        for j, dT in enumerate(dists):
            n_checked += 1
            viol = dT / 2.0 - suffix_min[j]
            if viol > worst:
                worst = viol
                witness = {"tau": ti, "T": samples[i + 1 + j][0],
                           "d_T_tau": dT, "min_later": suffix_min[j]}
    return ViolationReport(
        check="tail_halving", max_violation=worst, n_checked=max(n_checked, 1),
        tolerance=cfg.tolerance, witness=witness,
    )


def cosine_identity_residual(space: Space, x: Point, p: Point, q: Point) -> float:
    """Projection identity via comparison angles: exact in Euclidean spaces.

    Returns d(x,q) cos A~[p x q] + d(p,q) cos A~[x p q] - d(x,p).
    """
    dxq = space.distance(x, q)
    dpq = space.distance(p, q)
    dxp = space.distance(x, p)
    ang_x = comparison_angle(space, x, p, q)
    ang_p = comparison_angle(space, p, x, q)
    return dxq * math.cos(ang_x) + dpq * math.cos(ang_p) - dxp


def evi_residual(space: Space, objective: ObjectiveFn, curve: Curve,
                 t: float, y: Point, h: float) -> float:
    """Forward-difference residual of the evolution variational inequality.

    [d^2(xi(t+h), y) - d^2(xi(t), y)] / (2h) + f(xi(t)) - f(y); for
    gradient curves of convex f this is <= 0 as h shrinks.  Refused for
    objectives not declared convex, where the inequality has no content.
    """
    if h <= 0:
        raise GeometryError("h must be positive")
    if not objective.is_convex:
        raise GeometryError("EVI residuals apply to convex objectives only")
    p0 = curve.point_at(t)
    p1 = curve.point_at(t + h)
    d1 = space.distance(p1, y)
    d0 = space.distance(p0, y)
    return (d1 * d1 - d0 * d0) / (2.0 * h) + objective(p0) - objective(y)


def contraction_check(space: Space, objective: ObjectiveFn,
                      run1: GradientCurveRun, run2: GradientCurveRun,
                      tol: float = 1e-6) -> ViolationReport:
    """Inter-run distances at matched steps must be non-increasing.

    Asserted for convex objectives; for merely quasi-convex ones the
    report is informational (the property can genuinely fail).
    """
    if run1.tau_schedule != run2.tau_schedule:
        raise GeometryError("runs must share the step schedule")
    n = min(len(run1.points), len(run2.points))
    worst = 0.0
    witness = None
    run_min = math.inf
    run_min_k = None
    for k in range(n):
        d = space.distance(run1.points[k], run2.points[k])
        if d - run_min > worst:
            worst = d - run_min
            witness = {"k_earlier": run_min_k, "k": k,
                       "d_earlier": run_min, "d": d}
        if d < run_min:
            run_min, run_min_k = d, k
    return ViolationReport(
        check="contraction", max_violation=worst, n_checked=n,
        tolerance=tol, witness=witness,
        informational=not objective.is_convex,
    )


CHECKS: dict[str, Callable] = {
    "self_contracted": is_self_contracted,
    "stationarity": stationarity_check,
    "tail_halving": tail_halving_check,
    "angle_estimate": angle_estimate_sweep,
}


def run_checks(space: Space, curve: Curve, names: Sequence[str],
               cfg: SamplingConfig = DEFAULT_SAMPLING) -> list[ViolationReport]:
    reports = []
    for name in names:
        if name not in CHECKS:
            raise GeometryError(
                f"unknown check {name!r}; available: {sorted(CHECKS)}"
            )
        if name == "angle_estimate":
            reports.append(angle_estimate_sweep(space, curve, cfg=cfg))
        else:
            reports.append(CHECKS[name](space, curve, cfg))
    return reports
