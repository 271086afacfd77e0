"""Space-agnostic metric primitives: curves, lengths, angles, CAT(0) tests.

Everything here is defined against the abstract space interface; the
per-space formulas live in the `spaces` subpackage.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import GeometryError
from .spaces.base import Point, Space, check_all_same_space, clamp_cos

DISCRETE = "discrete"
GEODESIC = "geodesic"


@dataclass(frozen=True)
class Curve:
    """Time-stamped point samples with an interpolation mode.

    `discrete` curves are pure jump curves (the trajectory is the sample
    set); `geodesic` curves stand for the piecewise-geodesic
    interpolation through the samples.
    """

    samples: tuple[tuple[float, Point], ...]
    mode: str = DISCRETE
    domain_end: float = math.inf

    def __post_init__(self):
        if not self.samples:
            raise GeometryError("curve needs at least one sample")
        if self.mode not in (DISCRETE, GEODESIC):
            raise GeometryError(f"unknown curve mode {self.mode!r}")
        times = [t for t, _ in self.samples]
        if any(t2 <= t1 for t1, t2 in zip(times, times[1:])):
            raise GeometryError("sample times must be strictly increasing")
        check_all_same_space(p for _, p in self.samples)
        if self.domain_end <= times[-1]:
            raise GeometryError("domain end must exceed the last sample time")

    @property
    def space(self) -> Space:
        return self.samples[0][1].space

    @property
    def times(self) -> list[float]:
        return [t for t, _ in self.samples]

    @property
    def points(self) -> list[Point]:
        return [p for _, p in self.samples]

    def __len__(self) -> int:
        return len(self.samples)

    def tail_points(self, t: float) -> list[Point]:
        """Samples of the tail {xi(s) : s >= t}."""
        return [p for s, p in self.samples if s >= t - 1e-15]

    def point_at(self, t: float) -> Point:
        """Evaluate the curve at time t (step function or geodesic pieces)."""
        samples = self.samples
        if t <= samples[0][0]:
            return samples[0][1]
        for (t0, p0), (t1, p1) in zip(samples, samples[1:]):
            if t < t1:
                if self.mode == DISCRETE:
                    return p0
                s = (t - t0) / (t1 - t0)
                return self.space.geodesic_point(p0, p1, s)
        return samples[-1][1]

    def densified(self, levels: int = 3) -> "Curve":
        """Insert geodesic midpoints `levels` times (geodesic mode only)."""
        if self.mode != GEODESIC or levels <= 0 or len(self.samples) < 2:
            return self
        space = self.space
        samples = list(self.samples)
        for _ in range(levels):
            out: list[tuple[float, Point]] = []
            for (t0, p0), (t1, p1) in zip(samples, samples[1:]):
                out.append((t0, p0))
                out.append((0.5 * (t0 + t1), space.geodesic_point(p0, p1, 0.5)))
            out.append(samples[-1])
            samples = out
        return Curve(tuple(samples), mode=GEODESIC, domain_end=self.domain_end)


def make_curve(points: Sequence[Point], times: Sequence[float] | None = None,
               mode: str = DISCRETE, domain_end: float | None = None) -> Curve:
    pts = list(points)
    if times is None:
        times = [float(i) for i in range(len(pts))]
    if domain_end is None:
        domain_end = times[-1] + 1.0 if times else 1.0
    return Curve(tuple(zip([float(t) for t in times], pts)), mode=mode,
                 domain_end=float(domain_end))


def distance(space: Space, p: Point, q: Point) -> float:
    return space.distance(p, q)


def geodesic_point(space: Space, x: Point, y: Point, s: float) -> Point:
    return space.geodesic_point(x, y, s)


@dataclass(frozen=True)
class Geodesic:
    """The minimal geodesic x -> y as a callable, s in [0, 1] at constant speed."""

    x: Point
    y: Point

    def __call__(self, s: float) -> Point:
        return self.x.space.geodesic_point(self.x, self.y, s)

    @property
    def length(self) -> float:
        return self.x.space.distance(self.x, self.y)


def curve_length(curve: Curve) -> float:
    """Polygonal length over consecutive samples.

    This matches the sup-over-partitions length: jumps of a discrete
    curve are charged their chord distance, and geodesic pieces add
    exactly, so refinement never changes the geodesic-mode value.
    """
    space = curve.space
    pts = curve.points
    return math.fsum(space.distance(a, b) for a, b in zip(pts, pts[1:]))


def diameter(points: Sequence[Point]) -> float:
    pts = list(points)
    space = check_all_same_space(pts)
    best = 0.0
    for i in range(len(pts)):
        for j in range(i + 1, len(pts)):
            d = space.distance(pts[i], pts[j])
            if d > best:
                best = d
    return best


def comparison_angle(space: Space, x: Point, y: Point, z: Point) -> float:
    """Angle at the x-vertex of the Euclidean triangle with the same sides."""
    dxy = space.distance(x, y)
    dxz = space.distance(x, z)
    if dxy <= space.tolerance or dxz <= space.tolerance:
        raise GeometryError("comparison angle needs y, z distinct from x")
    dyz = space.distance(y, z)
    c = (dxy * dxy + dxz * dxz - dyz * dyz) / (2.0 * dxy * dxz)
    return math.acos(clamp_cos(c))


DEFAULT_SHRINK_SCHEDULE = tuple(0.5 ** j for j in range(1, 9))


def upper_angle(space: Space, x: Point, y: Point, z: Point,
                schedule: Sequence[float] = DEFAULT_SHRINK_SCHEDULE,
                monotone_tol: float = 1e-7) -> float:
    """Limit of comparison angles along shrinking geodesic parameters.

    The comparison angle between gamma_xy(s) and gamma_xz(s) is monotone
    non-increasing as s decreases; that monotonicity is asserted at the
    sampled stages and a closed form (the direction angle) is returned
    as the limit.  y == z (within tolerance) gives 0 by convention.
    """
    if space.same_point(y, z):
        return 0.0
    if space.same_point(x, y) or space.same_point(x, z):
        raise GeometryError("upper angle needs y, z distinct from x")
    stages = sorted(set(float(s) for s in schedule), reverse=True)
    if any(not 0.0 < s <= 1.0 for s in stages):
        raise GeometryError("shrink schedule must lie in (0, 1]")
    prev = None
    for s in stages:
        ys = space.geodesic_point(x, y, s)
        zs = space.geodesic_point(x, z, s)
        ang = comparison_angle(space, x, ys, zs)
        if prev is not None and ang > prev + monotone_tol:
            raise GeometryError(
                f"comparison angles not monotone along shrink schedule "
                f"({ang} > {prev} at s={s})"
            )
        prev = ang
    d1, _ = space.log_direction(x, y)
    d2, _ = space.log_direction(x, z)
    limit = space.direction_angle(d1, d2)
    if prev is not None and limit > prev + monotone_tol:
        raise GeometryError("direction angle exceeds the comparison stages")
    return limit


def cat0_inequality_residual(space: Space, x: Point, y: Point, z: Point,
                             s: float) -> float:
    """Slack of the quadrilateral (2-convexity) comparison inequality.

    Returns (1-s) d^2(x,y) + s d^2(x,z) - (1-s) s d^2(y,z) - d^2(x, m(s))
    with m the geodesic from y to z; nonnegative (within tolerance) iff
    the triangle is no fatter than its Euclidean comparison triangle.
    """
    if not 0.0 <= s <= 1.0:
        raise GeometryError("s must lie in [0, 1]")
    m = space.geodesic_point(y, z, s)
    dxy = space.distance(x, y)
    dxz = space.distance(x, z)
    dyz = space.distance(y, z)
    dxm = space.distance(x, m)
    return (1 - s) * dxy * dxy + s * dxz * dxz - (1 - s) * s * dyz * dyz - dxm * dxm


@dataclass(frozen=True)
class FourPointResult:
    ok: bool
    witness_diagonal: float | None
    margin: float
    detail: str = ""


def _hinge_gap(d_wx, d_xy, d_yz, d_zw, d_xz, delta):
    """max ||x~ - z~|| over hinge configs minus d_xz, for diagonal delta.

    w~ = (0,0), y~ = (delta,0); x~ above the axis, z~ below (opposite
    sides maximize the second diagonal).  Vectorized over delta.
    """
    delta = np.asarray(delta, dtype=float)
    with np.errstate(invalid="ignore", divide="ignore"):
        px = np.where(delta > 0, (delta**2 + d_wx**2 - d_xy**2) / (2 * delta), 0.0)
        hx = np.sqrt(np.maximum(d_wx**2 - px**2, 0.0))
        pz = np.where(delta > 0, (delta**2 + d_zw**2 - d_yz**2) / (2 * delta), 0.0)
        hz = np.sqrt(np.maximum(d_zw**2 - pz**2, 0.0))
        diag = np.hypot(px - pz, hx + hz)
        # delta == 0 collapses w~ = y~: x~ and z~ sit on opposite rays
        diag = np.where(delta > 0, diag, d_wx + d_zw)
    return diag - d_xz


def four_point_subembed(d_wx: float, d_xy: float, d_yz: float, d_zw: float,
                        d_wy: float, d_xz: float,
                        grid: int = 10_000, refine_steps: int = 60,
                        coarse: int = 64) -> FourPointResult:
    """Decide the planar sub-embedding property for one metric quadruple.

    Looks for a planar quadrilateral with the four side lengths exact
    and both diagonals at least as long as the given ones, by sweeping
    the embedded w-y diagonal and hinging the two comparison triangles
    on opposite sides.  A coarse sweep accepts early; otherwise the full
    grid plus golden-section refinement around the best bracket decides.
    """
    sides = (d_wx, d_xy, d_yz, d_zw, d_wy, d_xz)
    if any(d < 0 or not math.isfinite(d) for d in sides):
        raise GeometryError("distances must be nonnegative and finite")
    scale = max(sides) or 1.0
    tol = 1e-9 * scale
    for a, b, c, face in (
        (d_wx, d_xy, d_wy, "wxy"),
        (d_zw, d_yz, d_wy, "wyz"),
    ):
        if a + b < c - tol or abs(a - b) > c + tol:
            raise GeometryError(f"triangle inequality violated on face {face}")
    lo = d_wy
    hi = min(d_wx + d_xy, d_zw + d_yz)
    if hi < lo:
        hi = lo

    def gap(ds):
        return _hinge_gap(d_wx, d_xy, d_yz, d_zw, d_xz, ds)

    for n in (coarse, grid):
        deltas = np.linspace(lo, hi, n + 1)
        gaps = gap(deltas)
        k = int(np.argmax(gaps))
        if gaps[k] >= -tol:
            return FourPointResult(True, float(deltas[k]), float(gaps[k]))
        if n == coarse:
            continue
        # golden-section maximization around the best grid bracket
        a = deltas[max(k - 1, 0)]
        b = deltas[min(k + 1, n)]
        invphi = (math.sqrt(5.0) - 1.0) / 2.0
        c = b - invphi * (b - a)
        d = a + invphi * (b - a)
        fc = float(gap(c))
        fd = float(gap(d))
        for _ in range(refine_steps):
            if fc >= fd:
                b, d, fd = d, c, fc
                c = b - invphi * (b - a)
                fc = float(gap(c))
            else:
                a, c, fc = c, d, fd
                d = a + invphi * (b - a)
                fd = float(gap(d))
        best = max(fc, fd, float(gaps[k]))
        arg = c if fc >= fd else d
        if best >= -tol:
            return FourPointResult(True, float(arg), float(best))
        return FourPointResult(False, None, float(best),
                               detail="no diagonal admits both long diagonals")
    raise AssertionError("unreachable")
