"""Self-contractedness checks and their consequence checks."""
import math

import numpy as np
import pytest

import selfcontract as sc
from selfcontract.errors import GeometryError
from selfcontract.objectives import make_objective
from selfcontract.proximal import discrete_gradient_curve
from selfcontract.verify import (
    angle_estimate_check,
    angle_estimate_sweep,
    ball_confinement_check,
    contraction_check,
    cosine_identity_residual,
    evi_residual,
    is_self_contracted,
    reparam_preserves,
    stationarity_check,
    tail_halving_check,
    tail_monotonicity,
)
from selfcontract.widths import unrectifiable_witness


def segment_curve(plane, n=8, length=2.0):
    pts = [plane.point((length * i / (n - 1), 0.0)) for i in range(n)]
    return sc.make_curve(pts, mode="discrete")


def failing_curve(plane):
    pts = [plane.point((x, 0.0)) for x in (0.0, 3.0, 1.0)]
    return sc.make_curve(pts, mode="discrete")


def test_segment_passes(plane):
    rep = is_self_contracted(plane, segment_curve(plane))
    assert rep.passed and rep.max_violation == 0.0


def test_backtracking_fails_with_violation_one(plane):
    rep = is_self_contracted(plane, failing_curve(plane))
    assert not rep.passed
    # d(xi(t2), xi(t3)) = 2 > d(xi(t1), xi(t3)) = 1
    assert rep.max_violation == pytest.approx(1.0)
    assert rep.witness["t1"] == 0.0 and rep.witness["t2"] == 1.0


def test_orthonormal_jump_curve_passes():
    for k in (2, 5, 9):
        curve, _ = unrectifiable_witness(k)
        rep = is_self_contracted(curve.space, curve)
        assert rep.passed and rep.max_violation == 0.0


def test_long_curve_stratified_subsampling(plane):
    """Above the exhaustive cap the checker subsamples but stays exact on
    planted violations near the ends."""
    from selfcontract.verify import SamplingConfig

    n = 1500
    pts = [plane.point((1.0 / (i + 1.0), 0.0)) for i in range(n)]
    curve = sc.make_curve(pts)
    cfg = SamplingConfig(max_exhaustive=400, seed=5)
    rep = is_self_contracted(plane, curve, cfg)
    assert rep.passed
    assert rep.n_checked <= 400 * 399 // 2
    # plant a violation at the tail
    bad = sc.make_curve(pts[:-1] + [plane.point((2.0, 0.0))])
    rep = is_self_contracted(plane, bad, cfg)
    assert not rep.passed


def test_geodesic_mode_samples_within_segments(plane):
    # a geodesic-interpolated V-shape fails even though the 3 raw samples
    # are consistent at their own times
    pts = [plane.point(p) for p in ((0.0, 0.0), (2.0, 0.0), (1.0, 0.9))]
    curve = sc.make_curve(pts, mode="geodesic")
    rep = is_self_contracted(plane, curve)
    assert not rep.passed


def test_tail_monotonicity(plane):
    space = sc.EuclideanSpace(1)
    f = make_objective(space, "half_sq_dist", target=(0.0,))
    run = discrete_gradient_curve(f, space, space.point((1.0,)), [1.0] * 5)
    curve = run.discrete_curve()
    rep = tail_monotonicity(space, curve, curve.times[-1])
    assert rep.passed
    bad = failing_curve(plane)
    rep = tail_monotonicity(plane, bad, 2.0)
    assert not rep.passed
    single = sc.make_curve([plane.point((0.0, 0.0))])
    assert tail_monotonicity(plane, single, 0.0).passed
    with pytest.raises(GeometryError):
        tail_monotonicity(plane, bad, 17.0)


def test_stationarity(plane):
    p0 = plane.point((0.0, 0.0))
    revisit = sc.make_curve([p0, plane.point((1.0, 0.0)), p0])
    rep = stationarity_check(plane, revisit)
    assert not rep.passed and rep.max_violation == pytest.approx(1.0)
    injective = segment_curve(plane)
    assert stationarity_check(plane, injective).passed
    constant = sc.make_curve([p0, p0, p0], times=[0.0, 1.0, 2.0])
    assert stationarity_check(plane, constant).passed


def test_reparam_preserves(plane):
    curve = segment_curve(plane)
    t1 = curve.times[-1]
    assert reparam_preserves(plane, curve, lambda t: t * t / t1).passed
    # step function: neither continuous nor injective
    assert reparam_preserves(
        plane, curve, lambda t: 0.0 if t < t1 / 2 else t1
    ).passed
    with pytest.raises(GeometryError):
        reparam_preserves(plane, curve, lambda t: -t)


def test_reparam_preserves_random_monotone_maps(plane, rng):
    """100 random piecewise-linear non-decreasing maps keep the property."""
    curve = sc.random_self_contracted(plane, 10, seed=321)
    t0, t1 = curve.times[0], curve.times[-1]
    for _ in range(100):
        knots = np.sort(rng.uniform(t0, t1, 5))
        values = np.sort(rng.uniform(t0, t1, 5))

        def phi(t, knots=knots, values=values):
            return float(np.interp(t, knots, values))

        assert reparam_preserves(plane, curve, phi).passed


def test_angle_estimate_examples(plane):
    curve = segment_curve(plane)
    # collinear forward directions
    ang = angle_estimate_check(plane, curve, curve.times[0], curve.times[2],
                               curve.times[4])
    assert ang == pytest.approx(0.0, abs=1e-12)
    # the angle check is necessary, not sufficient: the failing curve
    # still has angle 0 at tau=0
    bad = failing_curve(plane)
    ang = angle_estimate_check(plane, bad, 0.0, 1.0, 2.0)
    assert ang == pytest.approx(0.0, abs=1e-12)
    assert not is_self_contracted(plane, bad).passed
    with pytest.raises(GeometryError):
        angle_estimate_check(plane, curve, 1.0, 0.5, 2.0)


def test_angle_estimate_spider_jump():
    from selfcontract.widths import spider_jump_curve

    curve = spider_jump_curve(4)
    space = curve.space
    # at a visited tip, all later tips lie through the single inward germ
    ang = angle_estimate_check(space, curve, 0.0, 1.0, 2.0)
    assert ang == 0.0
    rep = angle_estimate_sweep(space, curve)
    assert rep.passed  # every angle below pi/2


def test_ball_confinement(plane, rng):
    inside = segment_curve(plane, length=0.5)
    rep = ball_confinement_check(plane, inside, plane.point((0.0, 0.0)), 1.0)
    assert rep.passed
    # synthetic excursion: starts and ends near x, wanders past 3r
    pts = [plane.point(p) for p in ((0.0, 0.0), (5.0, 0.0), (0.5, 0.0))]
    curve = sc.make_curve(pts)
    rep = ball_confinement_check(plane, curve, plane.point((0.0, 0.0)), 1.0)
    assert not rep.passed
    assert rep.max_violation == pytest.approx(2.0)
    # random self-contracted curves always confine: 100 random (x, r)
    for trial in range(10):
        cur = sc.random_self_contracted(plane, 12, seed=500 + trial)
        for _ in range(10):
            x = plane.random_point(rng, 2.0)
            r = float(rng.uniform(0.2, 1.5))
            assert ball_confinement_check(plane, cur, x, r).passed


def test_tail_halving_on_self_contracted(plane):
    for trial in range(15):
        cur = sc.random_self_contracted(plane, 12, seed=900 + trial)
        assert tail_halving_check(plane, cur).passed


def test_cosine_identity_euclidean(plane, rng):
    for _ in range(200):
        x, p, q = (plane.random_point(rng, 2.0) for _ in range(3))
        if plane.same_point(x, p) or plane.same_point(x, q) or plane.same_point(p, q):
            continue
        assert abs(cosine_identity_residual(plane, x, p, q)) <= 1e-7


def test_cosine_identity_all_spaces(rng):
    """With comparison angles the projection identity is exact in every
    metric space (it is a statement about one Euclidean triangle)."""
    spaces = [sc.SpiderSpace(4), sc.BookSpace(3), sc.HyperbolicPlane()]
    for space in spaces:
        count = 0
        while count < 60:
            x, p, q = (space.random_point(rng, 1.5) for _ in range(3))
            if (space.same_point(x, p) or space.same_point(x, q)
                    or space.same_point(p, q)):
                continue
            assert abs(cosine_identity_residual(space, x, p, q)) <= 1e-7
            count += 1


def test_metric_angle_projection_inequality_hyperbolic(rng):
    """With metric angles the projection sum dominates the side: angles
    never exceed their comparison angles in nonpositive curvature."""
    hyp = sc.HyperbolicPlane()
    count = 0
    while count < 80:
        x, p, q = (hyp.random_point(rng, 1.5) for _ in range(3))
        if (hyp.same_point(x, p) or hyp.same_point(x, q)
                or hyp.same_point(p, q)):
            continue
        ang_x = hyp.direction_angle(hyp.log_direction(x, p)[0],
                                    hyp.log_direction(x, q)[0])
        ang_p = hyp.direction_angle(hyp.log_direction(p, x)[0],
                                    hyp.log_direction(p, q)[0])
        lhs = (hyp.distance(x, q) * math.cos(ang_x)
               + hyp.distance(p, q) * math.cos(ang_p))
        assert lhs >= hyp.distance(x, p) - 1e-7
        count += 1


def test_evi_residual_exact_flow(plane):
    """Exact gradient flow of x^2/2 is e^{-t}; EVI residual stays <= 0."""
    space = sc.EuclideanSpace(1)
    f = make_objective(space, "half_sq_dist", target=(0.0,))
    times = [0.1 * i for i in range(40)]
    pts = [space.point((math.exp(-t),)) for t in times]
    flow = sc.make_curve(pts, times=times, mode="geodesic")
    y = space.point((0.0,))
    for t in (0.0, 0.5, 1.5):
        assert evi_residual(space, f, flow, t, y, 1e-4) <= 1e-6
    # y = xi(t): residual = d^2(xi(t+h), xi(t))/(2h) >= 0, about speed^2 h/2
    t, h = 0.5, 1e-3
    res = evi_residual(space, f, flow, t, flow.point_at(t), h)
    speed = math.exp(-t)
    assert 0.0 <= res <= speed * speed * h
    with pytest.raises(GeometryError):
        evi_residual(space, make_objective(space, "neg_cube"), flow, 0.0, y, h)


def test_evi_residual_fine_proximal_run(plane):
    """Small-step proximal runs of a convex objective keep the forward
    EVI residual near or below zero (informational diagnostic)."""
    f = make_objective(plane, "half_sq_dist", target=(0.0, 0.0))
    run = discrete_gradient_curve(f, plane, plane.point((1.0, 0.4)),
                                  [0.02] * 30)
    curve = run.interpolated_curve()
    y = plane.point((0.2, -0.1))
    times = curve.times
    for t in (times[2], times[10], times[20]):
        res = evi_residual(plane, f, curve, t, y, 0.02)
        assert res <= 0.05


def test_contraction_half_sq_dist(plane):
    f = make_objective(plane, "half_sq_dist", target=(0.0, 0.0))
    r1 = discrete_gradient_curve(f, plane, plane.point((1.0, 0.5)), [0.5] * 6)
    r2 = discrete_gradient_curve(f, plane, plane.point((-0.5, 1.0)), [0.5] * 6)
    rep = contraction_check(plane, f, r1, r2)
    assert rep.passed and not rep.informational
    # identical starts keep distance zero
    r3 = discrete_gradient_curve(f, plane, plane.point((1.0, 0.5)), [0.5] * 6)
    rep = contraction_check(plane, f, r1, r3)
    assert rep.passed and rep.max_violation == 0.0
    # mismatched schedules are an input error
    r4 = discrete_gradient_curve(f, plane, plane.point((0.0, 1.0)), [0.4] * 6)
    with pytest.raises(GeometryError):
        contraction_check(plane, f, r1, r4)


def test_contraction_informational_for_quasiconvex():
    space = sc.EuclideanSpace(1)
    f = make_objective(space, "ripple_vee")
    r1 = discrete_gradient_curve(f, space, space.point((3.0,)), [0.5] * 4)
    r2 = discrete_gradient_curve(f, space, space.point((-2.0,)), [0.5] * 4)
    rep = contraction_check(space, f, r1, r2)
    assert rep.informational


def test_gradient_runs_self_contracted_both_modes(rng):
    """Resolvent runs are self-contracted, discrete and interpolated."""
    spaces = [sc.EuclideanSpace(2), sc.SpiderSpace(3), sc.BookSpace(2),
              sc.HyperbolicPlane()]
    for i, space in enumerate(spaces):
        f = make_objective(space, "dist", target=space.random_point(rng, 1.0))
        run = discrete_gradient_curve(f, space, space.random_point(rng, 1.0),
                                      [0.6] * 6)
        assert is_self_contracted(space, run.discrete_curve()).passed
        assert is_self_contracted(space, run.interpolated_curve()).passed
        assert angle_estimate_sweep(space, run.discrete_curve()).passed
