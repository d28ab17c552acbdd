"""Pointwise velocity evaluation against analytic and quadrature oracles.

Main oracles: the rotating Rankine disk (rigid interior rotation at rate
1/2, clockwise for positive strength), the point-vortex far field, exact
symmetry cancellations (wall condition, odd twin on the axis), the direct
algebraic definition of the image-kernel split, and scipy quadrature for
the corner majorant of the bad velocity parts.
"""

import math

import numpy as np
import pytest
from scipy import integrate

from gsqg import contour, kernel, make_multiplier, velocity
from gsqg.contour import ContourSystem
from gsqg.errors import (
    ProximityError,
    SingularEvaluationError,
    ToleranceUnattainableError,
    ValidationError,
)
from gsqg.velocity import (
    RegionSet,
    disk_region,
    kernel_split,
    rect_region,
    split_velocities,
    triangle_region,
    velocity_area,
    velocity_contour,
)

INV_2PI = 0.15915494309189533577


@pytest.fixture(scope="module")
def euler_table():
    return kernel.build_table(make_multiplier("euler"), 5e-4, 24.0, 64,
                              tol=1e-12)


@pytest.fixture(scope="module")
def sqg_table():
    return kernel.build_table(make_multiplier("alpha_sqg", alpha=0.25),
                              1e-5, 8.0, 96, tol=1e-10)


@pytest.fixture(scope="module")
def qgsw_table():
    return kernel.build_table(make_multiplier("qgsw", eps=2.0), 1e-3, 2.0,
                              96, tol=1e-9)


def unit_disk():
    return RegionSet((disk_region((0.0, 0.0), 1.0, 1.0),))


# ---------------------------------------------------------------------------
# region validation
# ---------------------------------------------------------------------------


def test_overlapping_components_rejected():
    with pytest.raises(ValidationError):
        RegionSet((rect_region(0.0, 1.0, 0.0, 1.0),
                   rect_region(0.5, 1.5, 0.5, 1.5)))
    with pytest.raises(ValidationError):
        RegionSet((disk_region((0.0, 0.0), 1.0),
                   rect_region(-0.1, 0.1, -0.1, 0.1)))
    # disjoint mix is fine
    RegionSet((rect_region(0.0, 1.0, 0.0, 1.0),
               triangle_region([(2.0, 0.0), (3.0, 0.0), (2.0, 1.0)]),
               disk_region((5.0, 0.0), 0.5)))


def test_mirror_requires_positive_quadrant():
    with pytest.raises(ValidationError):
        RegionSet((rect_region(-0.5, 0.5, 0.0, 1.0),), mirror_odd=True)
    RegionSet((rect_region(0.1, 0.5, 0.0, 1.0),), mirror_odd=True)


def test_degenerate_components_rejected():
    with pytest.raises(ValidationError):
        rect_region(1.0, 1.0, 0.0, 1.0)
    with pytest.raises(ValidationError):
        triangle_region([(0.0, 0.0), (1.0, 0.0), (2.0, 0.0)])
    with pytest.raises(ValidationError):
        disk_region((0.0, 0.0), 0.0)


# ---------------------------------------------------------------------------
# velocity_area oracles
# ---------------------------------------------------------------------------


def test_rankine_disk_boundary_and_interior(euler_table):
    theta = unit_disk()
    # positive scalar rotates the disk clockwise: u = (x2/2, -x1/2)
    res = velocity_area(np.array([1.0, 0.0]), theta, euler_table)
    assert res.u == pytest.approx([0.0, -0.5], abs=2e-5)
    res = velocity_area(np.array([0.3, 0.0]), theta, euler_table)
    assert res.u == pytest.approx([0.0, -0.15], abs=2e-5)
    res = velocity_area(np.array([0.2, 0.4]), theta, euler_table)
    assert res.u == pytest.approx([0.2, -0.1], abs=2e-5)
    assert res.error_estimate < 1e-4


def test_rankine_exterior_is_point_vortex(euler_table):
    theta = unit_disk()
    for x in (np.array([2.0, 0.0]), np.array([0.0, -3.0]),
              np.array([2.5, 1.5])):
        res = velocity_area(x, theta, euler_table)
        r2 = float(x @ x)
        expected = np.array([x[1], -x[0]]) * (0.5 / r2)
        assert res.u == pytest.approx(expected, rel=1e-4, abs=1e-6)


def test_wall_condition_exact(sqg_table):
    theta = RegionSet((rect_region(0.2, 0.6, 0.1, 0.5),))
    res = velocity_area(np.array([0.8, 0.0]), theta, sqg_table,
                        domain="half_plane")
    assert abs(res.u[1]) <= 1e-8 * max(abs(res.u[0]), 1e-30)
    assert abs(res.u[0]) > 1e-4


def test_odd_twin_axis_symmetry(sqg_table):
    # scalar odd in x1 makes u1 odd (zero on the axis) and u2 even
    theta = RegionSet((rect_region(0.1, 0.4, 0.2, 0.5),), mirror_odd=True)
    res = velocity_area(np.array([0.0, 0.3]), theta, sqg_table)
    assert np.isfinite(res.u).all()
    assert abs(res.u[0]) <= 1e-12 * max(abs(res.u[1]), 1e-30)
    left = velocity_area(np.array([-0.2, 0.35]), theta, sqg_table)
    right = velocity_area(np.array([0.2, 0.35]), theta, sqg_table)
    assert left.u[0] == -right.u[0]
    assert left.u[1] == right.u[1]


def test_homogeneity_exact(sqg_table):
    x = np.array([0.45, 0.25])
    base = RegionSet((rect_region(0.1, 0.4, 0.1, 0.4, weight=1.0),))
    double = RegionSet((rect_region(0.1, 0.4, 0.1, 0.4, weight=2.0),))
    u1 = velocity_area(x, base, sqg_table).u
    u2 = velocity_area(x, double, sqg_table).u
    assert u2[0] == 2.0 * u1[0] and u2[1] == 2.0 * u1[1]


def test_triangle_component(euler_table):
    # triangle + its odd mirror straddling nothing: compare against the
    # half-rectangle decomposition (two triangles tile the rectangle)
    rect = RegionSet((rect_region(0.2, 0.6, 0.2, 0.6),))
    tris = RegionSet((
        triangle_region([(0.2, 0.2), (0.6, 0.2), (0.6, 0.6)]),
        triangle_region([(0.2, 0.2), (0.6, 0.6), (0.2, 0.6)]),
    ))
    x = np.array([0.9, 0.1])
    u_rect = velocity_area(x, rect, euler_table).u
    u_tris = velocity_area(x, tris, euler_table).u
    assert u_tris == pytest.approx(u_rect, rel=1e-5, abs=1e-8)


def test_budget_exhaustion_carries_best_estimate(euler_table):
    theta = unit_disk()
    with pytest.raises(ToleranceUnattainableError) as exc:
        velocity_area(np.array([0.2, 0.1]), theta, euler_table, tol=1e-13,
                      max_cells=8)
    assert exc.value.best_estimate is not None
    assert np.isfinite(exc.value.best_estimate).all()


def test_error_estimate_is_honest(sqg_table):
    theta = RegionSet((rect_region(0.1, 0.5, 0.1, 0.5),))
    x = np.array([0.3, 0.3])
    coarse = velocity_area(x, theta, sqg_table, tol=1e-4)
    fine = velocity_area(x, theta, sqg_table, tol=1e-9)
    drift = float(np.max(np.abs(coarse.u - fine.u)))
    assert drift <= 5.0 * max(coarse.error_estimate, 1e-9)


# ---------------------------------------------------------------------------
# velocity_contour vs velocity_area
# ---------------------------------------------------------------------------


def _probe_ring():
    angles = np.linspace(0.0, 2 * math.pi, 12, endpoint=False) + 0.13
    radii = np.tile([1.5, 2.5, 4.0], 4)
    return np.stack([radii * np.cos(angles), radii * np.sin(angles)], axis=1)


def test_contour_matches_area_euler(euler_table):
    system = ContourSystem(
        patches=(contour.init_shape("circle", {"radius": 1.0}, 256),),
        domain="whole_plane")
    theta = unit_disk()
    for x in _probe_ring():
        uc = velocity_contour(x, system, euler_table)
        ua = velocity_area(x, theta, euler_table).u
        assert uc == pytest.approx(ua, rel=1e-4, abs=1e-7)


def test_contour_matches_area_alpha_sqg(sqg_table):
    system = ContourSystem(
        patches=(contour.init_shape("circle", {"radius": 0.5,
                                               "center": (0.0, 2.0)}, 256),),
        domain="whole_plane")
    theta = RegionSet((disk_region((0.0, 2.0), 0.5),))
    for x in _probe_ring() * 0.6 + np.array([0.0, 2.0]):
        uc = velocity_contour(x, system, sqg_table)
        ua = velocity_area(x, theta, sqg_table).u
        assert uc == pytest.approx(ua, rel=1e-3, abs=1e-7)


def test_far_field_circulation(euler_table):
    system = ContourSystem(
        patches=(contour.init_shape("circle", {"radius": 1.0}, 256),),
        domain="whole_plane")
    x = np.array([10.0, 0.0])
    u = velocity_contour(x, system, euler_table)
    # circulation pi (strength times area), clockwise
    speed_ref = math.pi / (2 * math.pi * 10.0)
    assert np.hypot(*u) == pytest.approx(speed_ref, rel=1e-2)
    assert u[1] < 0 and abs(u[0]) < 0.01 * speed_ref


def test_contour_proximity_guard(euler_table):
    system = ContourSystem(
        patches=(contour.init_shape("circle", {"radius": 1.0}, 64),),
        domain="whole_plane")
    with pytest.raises(ProximityError):
        velocity_contour(np.array([1.01, 0.0]), system, euler_table)


# ---------------------------------------------------------------------------
# kernel split
# ---------------------------------------------------------------------------


def _split_oracle(x, y, g):
    """Direct evaluation of the eight image-kernel terms."""
    x1, x2 = x
    y1, y2 = y
    d1 = math.hypot(x1 - y1, x2 - y2)
    d2 = math.hypot(x1 + y1, x2 - y2)
    d3 = math.hypot(x1 + y1, x2 + y2)
    d4 = math.hypot(x1 - y1, x2 + y2)
    k11 = (y2 - x2) / d1 ** 2 * g(d1)
    k12 = (y2 - x2) / d2 ** 2 * g(d2)
    k13 = (y2 + x2) / d3 ** 2 * g(d3)
    k14 = (y2 + x2) / d4 ** 2 * g(d4)
    k21 = (y1 - x1) / d1 ** 2 * g(d1)
    k22 = (y1 + x1) / d2 ** 2 * g(d2)
    k23 = (y1 + x1) / d3 ** 2 * g(d3)
    k24 = (y1 - x1) / d4 ** 2 * g(d4)
    return (k11, k12, k13, k14, k21, k22, k23, k24)


def test_kernel_split_matches_direct_formula(euler_table):
    x, y = (0.3, 0.2), (0.1, 0.4)
    ks = kernel_split(x, y, euler_table)
    ref = _split_oracle(x, y, lambda d: INV_2PI)
    got = (ks.k11, ks.k12, ks.k13, ks.k14, ks.k21, ks.k22, ks.k23, ks.k24)
    assert got == pytest.approx(ref, rel=1e-9)
    assert ks.k1 == pytest.approx(ks.k11 - ks.k12 - ks.k13 + ks.k14,
                                  rel=1e-12)
    assert ks.k2 == pytest.approx(ks.k21 + ks.k22 - ks.k23 - ks.k24,
                                  rel=1e-12)


def test_kernel_split_singular_pairs(euler_table):
    with pytest.raises(SingularEvaluationError):
        kernel_split((0.3, 0.2), (0.3, 0.2), euler_table)


def test_kernel_split_wall_degeneracy(euler_table):
    # as y2 -> 0 the image distances pair up (d4 -> d1, d2 -> d3) and both
    # combined kernels cancel to zero
    x = (0.3, 0.2)
    ks = kernel_split(x, (0.15, 1e-9), euler_table)
    scale = abs(ks.k11) + abs(ks.k13)
    assert abs(ks.k1) <= 1e-7 * scale
    assert abs(ks.k2) <= 1e-7 * scale


@pytest.mark.parametrize("table_name", ["euler", "alpha", "qgsw"])
def test_sign_predicates_hold(table_name, euler_table, sqg_table, qgsw_table):
    table = {"euler": euler_table, "alpha": sqg_table,
             "qgsw": qgsw_table}[table_name]
    c0 = 1.0
    rng = np.random.default_rng(20260815)
    checked = 0
    while checked < 10_000:
        pts = rng.uniform(0.005, 0.45, size=(4,))
        x, y = (pts[0], pts[1]), (pts[2], pts[3])
        if math.hypot(x[0] + y[0], x[1] + y[1]) > c0:
            continue
        if math.hypot(x[0] - y[0], x[1] - y[1]) < 2e-3:
            continue
        ks = kernel_split(x, y, table)
        slack = 1e-12 * (abs(ks.k11) + abs(ks.k12) + abs(ks.k13)
                         + abs(ks.k14) + 1e-300)
        assert ks.k1 >= ks.k11 - ks.k12 - slack
        assert math.copysign(1.0, y[1] - x[1]) * (ks.k11 - ks.k12) >= -slack
        assert ks.k2 >= ks.k21 - ks.k24 - slack
        assert math.copysign(1.0, y[0] - x[0]) * (ks.k21 - ks.k24) >= -slack
        assert ks.direct_pair_dominates_k1(slack)
        assert ks.k1_pair_sign_ok(slack)
        assert ks.direct_pair_dominates_k2(slack)
        assert ks.k2_pair_sign_ok(slack)
        checked += 1


# ---------------------------------------------------------------------------
# split velocities and corner majorant
# ---------------------------------------------------------------------------


def _corner_majorant_oracle(x1, x2):
    """2 * int_0^{x1} int_0^{x2} s2/(s1^2+s2^2) G ds2 ds1 via nested quad.

    Uses the analytic power-law radial profile for alpha = 0.25 so the
    oracle is independent of the kernel table machinery.
    """

    def g_exact(rho):
        return kernel.closed_form_G("alpha_sqg", {"alpha": 0.25}, rho)

    def inner(s1):
        val, _ = integrate.quad(
            lambda s2: s2 / (s1 * s1 + s2 * s2) * g_exact(math.hypot(s1, s2)),
            0.0, x2, epsabs=1e-12, epsrel=1e-11, limit=200)
        return val

    val, _ = integrate.quad(inner, 0.0, x1, epsabs=1e-11, epsrel=1e-10,
                            limit=200)
    return 2.0 * val


def test_corner_majorant_against_scipy(sqg_table):
    for x1, x2 in [(0.08, 0.12), (0.2, 0.2), (0.03, 0.24)]:
        ours = velocity.bad_part_majorant(sqg_table, x1, x2)
        ref1 = _corner_majorant_oracle(x1, x2)
        ref2 = _corner_majorant_oracle(x2, x1)
        assert ours[0] == pytest.approx(ref1, rel=1e-6)
        assert ours[1] == pytest.approx(ref2, rel=1e-6)


def test_bad_parts_obey_corner_bounds(sqg_table):
    theta = RegionSet((rect_region(0.05, 0.45, 0.05, 0.45),),
                      mirror_odd=True)
    for x in (np.array([0.08, 0.12]), np.array([0.2, 0.2]),
              np.array([0.02, 0.24]), np.array([0.24, 0.03])):
        sv = split_velocities(x, theta, sqg_table)
        b1, b2 = velocity.bad_part_majorant(sqg_table, x[0], x[1])
        assert sv.u1_bad <= b1 + 1e-8
        assert sv.u2_bad >= -b2 - 1e-8


def test_split_sum_matches_area_velocity(sqg_table):
    theta = RegionSet((rect_region(0.05, 0.45, 0.05, 0.45),),
                      mirror_odd=True)
    for x in (np.array([0.08, 0.12]), np.array([0.3, 0.2])):
        sv = split_velocities(x, theta, sqg_table)
        res = velocity_area(x, theta, sqg_table, domain="half_plane")
        assert sv.u1_bad + sv.u1_good == pytest.approx(
            res.u[0], abs=2e-6, rel=1e-5)
        assert sv.u2_bad + sv.u2_good == pytest.approx(
            res.u[1], abs=2e-6, rel=1e-5)


# ---------------------------------------------------------------------------
# Hoelder modulus
# ---------------------------------------------------------------------------


def test_hoelder_modulus_scaling(sqg_table):
    # ratios |u(x)-u(z)|/|x-z|^{1-alpha} must not inflate as the pair
    # separation shrinks; a worse true exponent would blow the small-scale
    # ratios up by (scale ratio)^(difference)
    alpha = 0.25
    theta = RegionSet((rect_region(0.1, 0.4, 0.1, 0.4),), mirror_odd=True)
    rng = np.random.default_rng(314159)
    n = 60
    bases = rng.uniform(0.05, 0.45, size=(n, 2))
    unit = rng.normal(size=(n, 2))
    unit /= np.linalg.norm(unit, axis=1, keepdims=True)
    u_base = [velocity_area(b, theta, sqg_table, domain="half_plane",
                            tol=1e-8).u for b in bases]

    def max_ratio(delta):
        worst = 0.0
        for b, e, ub in zip(bases, unit, u_base):
            uz = velocity_area(b + delta * e, theta, sqg_table,
                               domain="half_plane", tol=1e-8).u
            worst = max(worst,
                        float(np.linalg.norm(ub - uz)) / delta ** (1 - alpha))
        return worst

    big, small = max_ratio(1e-2), max_ratio(1e-4)
    assert small <= 2.0 * big
