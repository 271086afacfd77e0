"""Projections, mean width, directional decrease, and bound audits.

The rectifiability audits measure a curve (length, diameter, mean
width), assemble the advertised constants, and check the length bound
in the only direction that is claimed: L <= constant * size.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .cones import RadiusConstants, direction_cover_center, radius_constants
from .errors import GeometryError, UnsupportedSpaceError
from .measures import (
    NeighborhoodRegion,
    estimate_condition_constants,
    hausdorff_measure_neighborhood,
)
from .metric import Curve, GEODESIC, curve_length, diameter, make_curve
from .objectives import make_objective
from .proximal import DEFAULT_SOLVER, discrete_gradient_curve
from .spaces.base import Direction, Point, Space
from .spaces.book import BookSpace
from .spaces.euclidean import EuclideanSpace
from .spaces.hyperbolic import HyperbolicPlane
from .spaces.tree import SpiderSpace, TreeSpace

BOOK_BOUND_CONSTANT = 54.0 * math.sqrt(2.0) * math.pi


def projection_extent(space: Space, basepoint: Point, direction: Direction,
                      points: Sequence[Point], inflate: float = 0.0
                      ) -> tuple[float, float]:
    """[min, max] of r cos(angle(direction, germ-to-p)) over the points.

    The basepoint itself projects to 0.  `inflate` widens the interval
    by that radius on both sides (projection of a neighborhood).
    """
    pts = list(points)
    if not pts:
        raise GeometryError("need at least one point")
    lo = math.inf
    hi = -math.inf
    for p in pts:
        if space.same_point(basepoint, p):
            value = 0.0
        else:
            germ, r = space.log_direction(basepoint, p)
            value = r * math.cos(space.direction_angle(direction, germ))
        lo = min(lo, value)
        hi = max(hi, value)
    return lo - inflate, hi + inflate


@dataclass(frozen=True)
class WidthReport:
    width: float
    n_directions: int
    seed: int | None
    stderr: float
    method: str

    def to_json(self) -> dict:
        return {
            "width": self.width,
            "n_directions": self.n_directions,
            "seed": self.seed,
            "stderr": self.stderr,
            "method": self.method,
        }


def _euclidean_width_samples(points: list[Point], dirs: np.ndarray,
                             inflate: float) -> np.ndarray:
    arr = np.array([p.data for p in points], dtype=float)
    dots = dirs @ arr.T
    return dots.max(axis=1) - dots.min(axis=1) + 2.0 * inflate


def mean_width(space: Space, points: Sequence[Point], n_dirs: int = 4096,
               seed: int = 0, basepoint_region: NeighborhoodRegion | None = None,
               inflate: float = 0.0, method: str = "auto") -> WidthReport:
    """Average projected extent of a point set over directions.

    Euclidean spaces average over directions of the sphere (Monte Carlo,
    or exact angular quadrature on the plane).  Other spaces average
    over sampled (basepoint, direction) pairs, with basepoints drawn
    from `basepoint_region` (default: unit neighborhood of the points).
    """
    pts = list(points)
    if not pts:
        raise GeometryError("need at least one point")
    if n_dirs < 1:
        raise GeometryError("n_dirs must be >= 1")
    if isinstance(space, EuclideanSpace):
        if method == "auto":
            method = "quadrature" if space.dim == 2 else "mc"
        if method == "quadrature":
            if space.dim != 2:
                raise UnsupportedSpaceError("angular quadrature needs the plane")
            return _plane_quadrature_width(pts, inflate)
        rng = np.random.default_rng(seed)
        vecs = rng.normal(size=(n_dirs, space.dim))
        vecs /= np.linalg.norm(vecs, axis=1, keepdims=True)
        widths = _euclidean_width_samples(pts, vecs, inflate)
        return WidthReport(
            width=float(widths.mean()), n_directions=n_dirs, seed=seed,
            stderr=float(widths.std(ddof=1) / math.sqrt(n_dirs)) if n_dirs > 1 else 0.0,
            method="mc",
        )
    region = basepoint_region or NeighborhoodRegion(tuple(pts), 1.0)
    rng = np.random.default_rng(seed)
    samples = []
    for _ in range(n_dirs):
        base = _sample_region_point(space, region, rng)
        germ = _sample_direction(space, base, rng)
        d = Direction(space, base, germ)
        lo, hi = projection_extent(space, base, d, pts, inflate)
        samples.append(hi - lo)
    arr = np.array(samples)
    return WidthReport(
        width=float(arr.mean()), n_directions=n_dirs, seed=seed,
        stderr=float(arr.std(ddof=1) / math.sqrt(n_dirs)) if n_dirs > 1 else 0.0,
        method="mc_basepoints",
    )


def _plane_quadrature_width(pts: list[Point], inflate: float) -> WidthReport:
    arr = np.array([p.data for p in pts], dtype=float)
    prev = None
    n = 64  # symmetric sets can alias coarser grids
    width = 0.0
    while n <= 2 ** 14:
        thetas = np.arange(n) * (math.pi / n)
        dirs = np.stack([np.cos(thetas), np.sin(thetas)], axis=1)
        dots = dirs @ arr.T
        widths = dots.max(axis=1) - dots.min(axis=1) + 2.0 * inflate
        width = float(widths.mean())
        if prev is not None and abs(width - prev) < 5e-8:
            break
        prev = width
        n *= 2
    return WidthReport(width=width, n_directions=n, seed=None, stderr=0.0,
                       method="quadrature")


def _sample_region_point(space: Space, region: NeighborhoodRegion, rng) -> Point:
    idx = int(rng.integers(0, len(region.points)))
    anchor = region.points[idx]
    target = space.random_point(rng, scale=max(region.radius * 2.0, 1.0))
    d = space.distance(anchor, target)
    if d == 0.0:
        return anchor
    step = float(rng.uniform(0.0, region.radius))
    return space.geodesic_point(anchor, target, min(1.0, step / d))


def _sample_direction(space: Space, base: Point, rng) -> tuple:
    if isinstance(space, (TreeSpace, SpiderSpace)):
        germs = space.directions_at(base.data)
        return germs[int(rng.integers(0, len(germs)))]
    if isinstance(space, (EuclideanSpace, HyperbolicPlane, BookSpace)):
        return space.random_direction(rng, base.data)
    raise UnsupportedSpaceError(f"no direction sampler on {space.describe()}")


def curve_trajectory_points(curve: Curve, densify_levels: int = 3) -> list[Point]:
    """Sample points standing in for the trajectory (densified if geodesic)."""
    work = curve.densified(densify_levels) if curve.mode == GEODESIC else curve
    return work.points


def tail_cover_direction(space: Space, curve: Curve, tau: float,
                         densify_levels: int = 3
                         ) -> tuple[Direction, float, int]:
    """Covering direction of the tail germs at xi(tau)."""
    base = curve.point_at(tau)
    work = curve.densified(densify_levels) if curve.mode == GEODESIC else curve
    germs = []
    for t, p in work.samples:
        if t <= tau + 1e-15 or space.same_point(base, p):
            continue
        germs.append(space.log_direction(base, p)[0])
    if not germs:
        raise GeometryError("no tail directions at this time")
    return direction_cover_center(space, base, germs)


def directional_decrease_residual(space: Space, curve: Curve, tau: float,
                                  T: float, direction: Direction,
                                  decrease_rate: float,
                                  densify_levels: int = 3) -> float:
    """Projected-extent decrease residual between the tails at tau and T.

    Returns |Pi(Xi(T))| - |Pi(Xi(tau))| + decrease_rate * d(xi(tau),
    xi(T)), which is <= 0 for self-contracted curves when the direction
    is (a small perturbation of) the tail covering direction and the
    rate matches the space's constants.
    """
    if T <= tau:
        raise GeometryError("need tau < T")
    p_tau = curve.point_at(tau)
    p_T = curve.point_at(T)
    d = space.distance(p_tau, p_T)
    if d <= space.tolerance:
        return 0.0
    work = curve.densified(densify_levels) if curve.mode == GEODESIC else curve
    tail_tau = work.tail_points(tau)
    tail_T = work.tail_points(T)
    base = direction.base
    lo1, hi1 = projection_extent(space, base, direction, tail_tau)
    lo2, hi2 = projection_extent(space, base, direction, tail_T)
    return (hi2 - lo2) - (hi1 - lo1) + decrease_rate * d


@dataclass(frozen=True)
class BoundReport:
    bound_name: str
    space_desc: str
    length: float
    diam: float
    width: float | None
    constants: dict
    bound: float
    ratio: float
    seed: int | None = None
    tolerance: float = 1e-9
    notes: tuple[str, ...] = ()

    @property
    def passed(self) -> bool:
        return self.ratio <= 1.0 + self.tolerance

    def to_json(self) -> dict:
        return {
            "bound": self.bound_name,
            "space": self.space_desc,
            "length": self.length,
            "diam": self.diam,
            "width": self.width,
            "constants": self.constants,
            "bound_value": self.bound,
            "ratio": self.ratio,
            "passed": self.passed,
            "seed": self.seed,
            "tolerance": self.tolerance,
            "notes": list(self.notes),
        }


def euclidean_constants(n: int) -> dict:
    """Explicit constants of the Euclidean length bound in dimension n.

    eps_n = 1/(2 * 3^(n+1)); a_n is the measure of the chordal eps_n-cap
    on the unit sphere (an angular cap of radius 2 asin(eps_n/2)); and
    C_n = A(S^(n-1)) / (a_n eps_n).
    """
    if n < 1:
        raise GeometryError("dimension must be >= 1")
    rc = radius_constants(n)
    eps = rc.eps
    cap_angle = 2.0 * math.asin(eps / 2.0)
    sphere = 2.0 * math.pi ** (n / 2.0) / math.gamma(n / 2.0)
    if n == 1:
        a_n = 1.0  # S^0 carries counting measure; the cap holds one point
    elif n == 2:
        a_n = 4.0 * math.asin(eps / 2.0)
    elif n == 3:
        a_n = 2.0 * math.pi * (1.0 - math.cos(cap_angle))
    else:
        lower_sphere = 2.0 * math.pi ** ((n - 1) / 2.0) / math.gamma((n - 1) / 2.0)
        steps = 2048
        h = cap_angle / steps
        acc = 0.0
        for i in range(steps + 1):
            t = i * h
            w = 1 if i in (0, steps) else (4 if i % 2 else 2)
            acc += w * math.sin(t) ** (n - 2)
        a_n = lower_sphere * acc * h / 3.0
    return {
        "n": n,
        "eps": eps,
        "cap_angle": cap_angle,
        "a_n": a_n,
        "sphere_area": sphere,
        "C_n": sphere / (a_n * eps),
    }


def euclidean_length_bound(curve: Curve, n_dirs: int = 4096, seed: int = 0,
                           max_dim: int = 4, method: str = "auto") -> BoundReport:
    """Audit L <= C_n * W(Xi(0)) for a curve in R^n."""
    space = curve.space
    if not isinstance(space, EuclideanSpace):
        raise UnsupportedSpaceError("this bound audits Euclidean curves")
    if space.dim > max_dim:
        raise UnsupportedSpaceError(
            f"constants blow up combinatorially; n <= {max_dim} supported"
        )
    consts = euclidean_constants(space.dim)
    pts = curve_trajectory_points(curve)
    report = mean_width(space, pts, n_dirs=n_dirs, seed=seed, method=method)
    L = curve_length(curve)
    diam = diameter(pts)
    bound = consts["C_n"] * report.width
    ratio = L / bound if bound > 0 else (0.0 if L == 0.0 else math.inf)
    return BoundReport(
        bound_name="euclidean", space_desc=space.describe(),
        length=L, diam=diam, width=report.width,
        constants={**consts, "width_method": report.method,
                   "width_stderr": report.stderr},
        bound=bound, ratio=ratio, seed=seed,
    )


def tree_length_bound(space: Space, curve: Curve) -> BoundReport:
    """Audit L <= 6 * max_degree * H1(Omega) * diam for tree/spider curves.

    Omega is the closed 1-neighborhood of the sampled trajectory.
    """
    if not isinstance(space, (TreeSpace, SpiderSpace)):
        raise UnsupportedSpaceError("this bound audits tree or spider curves")
    if curve.space != space:
        raise GeometryError("curve lives on a different space")
    pts = curve_trajectory_points(curve)
    lam = space.max_degree
    h1 = hausdorff_measure_neighborhood(space, pts, 1.0, 1)
    L = curve_length(curve)
    diam = diameter(pts)
    bound = 6.0 * lam * h1 * diam
    ratio = L / bound if bound > 0 else (0.0 if L == 0.0 else math.inf)
    return BoundReport(
        bound_name="tree", space_desc=space.describe(),
        length=L, diam=diam, width=None,
        constants={"max_degree": lam, "h1_neighborhood": h1, "sigma": 1.0},
        bound=bound, ratio=ratio,
    )


def book_length_bound(space: Space, curve: Curve) -> BoundReport:
    """Audit L <= 54*sqrt(2)*pi * k * H2(Omega) * diam for book curves."""
    if not isinstance(space, BookSpace):
        raise UnsupportedSpaceError("this bound audits book curves")
    if curve.space != space:
        raise GeometryError("curve lives on a different space")
    pts = curve_trajectory_points(curve)
    h2 = hausdorff_measure_neighborhood(space, pts, 1.0, 2)
    L = curve_length(curve)
    diam = diameter(pts)
    bound = BOOK_BOUND_CONSTANT * space.k * h2 * diam
    ratio = L / bound if bound > 0 else (0.0 if L == 0.0 else math.inf)
    return BoundReport(
        bound_name="book", space_desc=space.describe(),
        length=L, diam=diam, width=None,
        constants={"C": BOOK_BOUND_CONSTANT, "k": space.k,
                   "h2_neighborhood": h2, "sigma": 1.0},
        bound=bound, ratio=ratio,
    )


def generic_cat0_bound(space: Space, curve: Curve, constants: RadiusConstants,
                       region: NeighborhoodRegion) -> BoundReport:
    """Audit the generic bound L <= (2/(a b eps)) * diam(Xi(0)).

    The sigma-neighborhood of the trajectory must sit inside the region
    the constants were estimated on; otherwise no bound is claimed.
    """
    if constants.a is None or constants.b is None or constants.sigma is None:
        raise GeometryError("constants must carry a, b and sigma")
    pts = curve_trajectory_points(curve)
    if not region.contains_neighborhood(pts, constants.sigma):
        raise GeometryError(
            "sigma-neighborhood of the trajectory is not inside the region; "
            "no bound claimed"
        )
    L = curve_length(curve)
    diam = diameter(pts)
    factor = 2.0 / (constants.a * constants.b * constants.eps_bold)
    bound = factor * diam
    ratio = L / bound if bound > 0 else (0.0 if L == 0.0 else math.inf)
    return BoundReport(
        bound_name="generic_cat0", space_desc=space.describe(),
        length=L, diam=diam, width=None,
        constants={"m": constants.m, "eps": constants.eps_bold,
                   "a": constants.a, "b": constants.b,
                   "sigma": constants.sigma, "factor": factor},
        bound=bound, ratio=ratio, notes=constants.notes,
    )


def generic_bound_for_curve(space: Space, curve: Curve, sigma: float = 1.0
                            ) -> BoundReport:
    """Estimate condition constants on the sigma-neighborhood and audit."""
    pts = curve_trajectory_points(curve)
    region = NeighborhoodRegion(tuple(pts), sigma)
    constants = estimate_condition_constants(space, region, sigma=sigma)
    return generic_cat0_bound(space, curve, constants, region)


def unrectifiable_witness(k: int) -> tuple[Curve, BoundReport]:
    """Jump curve through the orthonormal basis of R^k.

    Pairwise distances are all sqrt(2), so the curve is self-contracted
    with length sqrt(2) (k-1) while its diameter stays sqrt(2): the
    length-to-diameter ratio grows linearly in the dimension.
    """
    from .verify import is_self_contracted

    if k < 2:
        raise GeometryError("need k >= 2")
    space = EuclideanSpace(k)
    pts = [
        space.point(tuple(1.0 if j == i else 0.0 for j in range(k)))
        for i in range(k)
    ]
    curve = make_curve(pts, mode="discrete")
    check = is_self_contracted(space, curve)
    if not check.passed:
        raise GeometryError("witness curve failed its own verification")
    L = curve_length(curve)
    diam = diameter(pts)
    predicted = math.sqrt(2.0) * (k - 1)
    report = BoundReport(
        bound_name="orthonormal_witness", space_desc=space.describe(),
        length=L, diam=diam, width=None,
        constants={"k": k, "predicted_length": predicted,
                   "ratio_L_diam": L / diam},
        bound=predicted, ratio=L / predicted if predicted > 0 else 0.0,
    )
    return curve, report


def spider_jump_curve(k: int, radius: float = 1.0) -> Curve:
    """Jump curve visiting the tip of each leg of the unit k-spider."""
    if k < 2:
        raise GeometryError("need k >= 2")
    space = SpiderSpace(k, max(radius, 1.0))
    pts = [space.point((leg, radius)) for leg in range(1, k + 1)]
    return make_curve(pts, mode="discrete")


def book_spine_jump_curve(k: int, height: float = 1.0) -> Curve:
    """Jump curve visiting (i, 0, height) in each sheet of the k-book."""
    if k < 2:
        raise GeometryError("need k >= 2")
    space = BookSpace(k)
    pts = [space.point((sheet, 0.0, height)) for sheet in range(1, k + 1)]
    return make_curve(pts, mode="discrete")


def random_tree(seed: int, max_edges: int = 20, max_degree: int = 6,
                length_range: tuple[float, float] = (0.3, 2.0)) -> TreeSpace:
    """Random tree with bounded degree (test-input generator)."""
    rng = np.random.default_rng(seed)
    n_edges = int(rng.integers(2, max_edges + 1))
    names = [f"v{i}" for i in range(n_edges + 1)]
    degree = {names[0]: 0}
    edges = []
    for i in range(1, n_edges + 1):
        candidates = [v for v in names[:i] if degree[v] < max_degree]
        parent = candidates[int(rng.integers(0, len(candidates)))]
        length = float(rng.uniform(*length_range))
        edges.append((parent, names[i], length))
        degree[parent] += 1
        degree[names[i]] = 1
    return TreeSpace(names, edges)


def random_self_contracted(space: Space, n_steps: int, seed: int,
                           mode: str = "rejection", scale: float = 1.5,
                           objective_name: str | None = None) -> Curve:
    """Generate a curve that is self-contracted at its own samples.

    mode="rejection" proposes shrinking random steps and accepts only
    moves that keep every distance-to-new-point non-increasing; mode
    ="gradient" runs a proximal trajectory of a catalog objective.
    Generation stalls return the (shorter) accepted prefix.
    """
    if n_steps < 1:
        raise GeometryError("n_steps must be >= 1")
    rng = np.random.default_rng(seed)
    if mode == "gradient":
        name = objective_name or "half_sq_dist"
        target = space.random_point(rng, scale)
        objective = make_objective(space, name, target=target, other=space.random_point(rng, scale))
        start = space.random_point(rng, scale)
        taus = [0.5] * max(n_steps - 1, 1)
        run = discrete_gradient_curve(objective, space, start, taus, DEFAULT_SOLVER)
        return run.discrete_curve()
    if mode != "rejection":
        raise GeometryError("mode must be 'rejection' or 'gradient'")
    accepted = [space.random_point(rng, scale)]
    step = scale * 0.6
    stalls = 0
    while len(accepted) < n_steps and stalls < 400:
        target = space.random_point(rng, scale)
        d = space.distance(accepted[-1], target)
        if d <= 0.0:
            stalls += 1
            continue
        q = space.geodesic_point(accepted[-1], target, min(1.0, step / d))
        dists = [space.distance(p, q) for p in accepted]
        if all(b <= a for a, b in zip(dists, dists[1:])):
            accepted.append(q)
            step *= 0.9
            stalls = 0
        else:
            stalls += 1
            if stalls % 40 == 0:
                step *= 0.6
    return make_curve(accepted, mode="discrete")
