"""Moreau-Yosida values, resolvent sets, and gradient-curve runs."""
import math

import numpy as np
import pytest

import selfcontract as sc
from selfcontract.errors import GeometryError
from selfcontract.objectives import ObjectiveFn, make_objective
from selfcontract.proximal import (
    MULTIPLE_TIES,
    UNBOUNDED,
    UNIQUE,
    discrete_gradient_curve,
    geodesic_interpolation,
    moreau_yosida,
    resolvent,
)


def line():
    return sc.EuclideanSpace(1)


def test_neg_cube_unit_interval_ties():
    """argmin of -z^3 + z^2 over [0,1] is exactly {0, 1}."""
    space = line()
    f = make_objective(space, "neg_cube_unit")
    res = resolvent(f, space, space.point((0.0,)), 0.5)
    assert res.status == MULTIPLE_TIES
    locs = sorted(p.data[0] for p in res.minimizers)
    assert locs[0] == pytest.approx(0.0, abs=1e-9)
    assert locs[1] == pytest.approx(1.0, abs=1e-9)
    assert res.value == pytest.approx(0.0, abs=1e-12)


def test_neg_cube_unbounded_on_line():
    space = line()
    f = make_objective(space, "neg_cube")
    res = resolvent(f, space, space.point((0.0,)), 0.5)
    assert res.status == UNBOUNDED
    assert not res.minimizers
    assert moreau_yosida(f, space, space.point((0.0,)), 0.5) == -math.inf


def test_moreau_value_half_sq_dist(plane):
    """min over z of |z-p|^2/2 + |z|^2/2 at tau=1 equals 1/4 (p unit)."""
    f = make_objective(plane, "half_sq_dist", target=(1.0, 0.0))
    value = moreau_yosida(f, plane, plane.point((0.0, 0.0)), 1.0)
    assert value == pytest.approx(0.25, abs=1e-10)


def test_moreau_constant_objective(plane):
    f = ObjectiveFn(name="const", space=plane, fn=lambda p: 3.5,
                    convexity="convex", lower_bound=3.5)
    assert moreau_yosida(f, plane, plane.point((0.2, -0.3)), 2.0) == pytest.approx(3.5, abs=1e-10)
    res = resolvent(f, plane, plane.point((0.2, -0.3)), 2.0)
    assert res.status == UNIQUE
    assert plane.distance(res.point, plane.point((0.2, -0.3))) <= 1e-6


def test_resolvent_half_sq_dist_geodesic_point(plane, spider3, book2):
    """prox of d(.,p)^2/2 with step tau lands at gamma_{x p}(tau/(1+tau))."""
    rng = np.random.default_rng(8)
    for space in (plane, spider3, book2):
        for _ in range(5):
            p = space.random_point(rng, 1.2)
            x = space.random_point(rng, 1.2)
            if space.same_point(p, x):
                continue
            tau = float(rng.uniform(0.3, 2.0))
            f = make_objective(space, "half_sq_dist", target=p)
            res = resolvent(f, space, x, tau)
            expected = space.geodesic_point(x, p, tau / (1.0 + tau))
            assert space.distance(res.point, expected) <= 1e-8


def test_resolvent_vs_grid_oracle_sweep():
    """No point of a dense domain sweep beats the reported minimizer."""
    space = line()
    rng = np.random.default_rng(4)
    for name in ("sqrt_abs", "ripple_vee", "neg_cube_unit"):
        f = make_objective(space, name)
        x = space.point((float(rng.uniform(-0.5, 1.5)),))
        if f.domain is not None and not f.domain.contains(x.data):
            x = space.point((0.3,))
        tau = 0.7
        res = resolvent(f, space, x, tau)
        lo, hi = (f.domain.bounds[0] if f.domain is not None else (-8.0, 8.0))
        zs = np.linspace(lo, hi, 100_001)
        vals = [f(space.point((float(z),))) + (float(z) - x.data[0]) ** 2 / (2 * tau)
                for z in zs]
        assert res.value <= min(vals) + 1e-9


def test_spider_resolvent_vs_leg_sweep_oracle():
    """Dense per-leg sweeps never beat the spider resolvent value."""
    spider = sc.SpiderSpace(4, 2.0)
    rng = np.random.default_rng(21)
    for trial in range(6):
        f = make_objective(spider, "max_two_dists",
                           target=spider.random_point(rng, 1.5),
                           other=spider.random_point(rng, 1.5))
        x = spider.random_point(rng, 1.5)
        tau = float(rng.uniform(0.3, 1.5))
        res = resolvent(f, spider, x, tau)
        best = math.inf
        for leg in range(1, 5):
            for t in np.linspace(0.0, 2.0, 10_001):
                z = spider.point((leg, float(t)))
                best = min(best, f(z) + spider.distance(x, z) ** 2 / (2 * tau))
        assert res.value <= best + 1e-9


def test_gradient_run_halving(plane):
    """x^2/2 with tau = 1 halves the point at every step."""
    space = line()
    f = make_objective(space, "half_sq_dist", target=(0.0,))
    run = discrete_gradient_curve(f, space, space.point((1.0,)), [1.0] * 5)
    got = [p.data[0] for p in run.points]
    assert got == pytest.approx([2.0 ** -k for k in range(6)], abs=1e-9)
    assert run.times == pytest.approx([0.0, 1.0, 2.0, 3.0, 4.0, 5.0])


def test_gradient_run_zero_steps(plane):
    f = make_objective(plane, "dist", target=(1.0, 1.0))
    run = discrete_gradient_curve(f, plane, plane.point((0.0, 0.0)), [])
    assert len(run.points) == 1


def test_gradient_run_spider_through_center(spider3):
    """dist to a tip from another leg walks monotonically through the center."""
    f = make_objective(spider3, "dist", target=(1, 1.0))
    run = discrete_gradient_curve(f, spider3, spider3.point((2, 1.0)), [0.5] * 5)
    values = list(run.values)
    assert all(b <= a + 1e-12 for a, b in zip(values, values[1:]))
    # strictly decreasing until the target is reached
    assert values[0] == pytest.approx(2.0)
    assert values[-1] == pytest.approx(0.0, abs=1e-9)
    legs = [p.data[0] for p in run.points]
    assert legs[0] == 2 and legs[-1] == 1


def test_gradient_run_aborts_on_unbounded():
    space = line()
    f = make_objective(space, "neg_cube")
    run = discrete_gradient_curve(f, space, space.point((0.0,)), [0.5] * 3)
    assert len(run.points) == 1
    assert run.diagnostic is not None and "unbounded" in run.diagnostic


def test_lambda_step_guard(plane):
    f = ObjectiveFn(name="concaveish", space=plane,
                    fn=lambda p: -0.25 * (p.data[0] ** 2 + p.data[1] ** 2),
                    convexity="lambda", lam=-0.5)
    with pytest.raises(GeometryError):
        resolvent(f, plane, plane.point((0.1, 0.1)), 3.0)
    # steps under 1/(-lambda) are allowed
    res = resolvent(f, plane, plane.point((0.1, 0.1)), 1.0)
    assert res.minimizers


def test_geodesic_interpolation(plane):
    space = line()
    f = make_objective(space, "half_sq_dist", target=(0.0,))
    run = discrete_gradient_curve(f, space, space.point((1.0,)), [1.0] * 4)
    curve = geodesic_interpolation(space, run)
    assert curve.mode == "geodesic"
    # midpoint of the first step sits at 0.75
    assert curve.point_at(0.5).data[0] == pytest.approx(0.75, abs=1e-9)
    two_pt = geodesic_interpolation(
        plane, discrete_gradient_curve(
            make_objective(plane, "dist", target=(2.0, 0.0)),
            plane, plane.point((0.0, 0.0)), [0.5]))
    assert two_pt.point_at(0.25).data[1] == pytest.approx(0.0, abs=1e-9)


def test_tie_break_determinism():
    space = line()
    f = make_objective(space, "neg_cube_unit")
    runs = [discrete_gradient_curve(f, space, space.point((0.0,)), [0.5] * 2)
            for _ in range(2)]
    assert [p.data for p in runs[0].points] == [p.data for p in runs[1].points]
    # nearest-to-x tie break picks 0 over 1 at the first step
    assert runs[0].points[1].data[0] == pytest.approx(0.0, abs=1e-9)


def test_invalid_tau(plane):
    f = make_objective(plane, "dist", target=(1.0, 0.0))
    with pytest.raises(GeometryError):
        resolvent(f, plane, plane.point((0.0, 0.0)), 0.0)
    with pytest.raises(GeometryError):
        discrete_gradient_curve(f, plane, plane.point((0.0, 0.0)), [0.5, -1.0])
