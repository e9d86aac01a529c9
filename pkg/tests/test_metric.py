import cmath
import math

import pytest

from app.core.errors import DomainError
from app.core.metric import (
    BallCurve,
    ball_poly_eval,
    ball_poly_eval_at,
    ball_poly_scale,
    check_radial_monotonicity,
    level_set,
    s_blocked_exterior,
    s_disk,
    s_disk_oracle,
)


def test_closed_form_values(tol):
    origin = s_disk(0, 0.5, tol)
    assert origin.result == pytest.approx(1 / 3, abs=1e-15)
    assert origin.method == "closed_form_case1"
    assert origin.witness == 1

    antipodal = s_disk(0.4, -0.4, tol)
    assert antipodal.result == pytest.approx(0.4, abs=1e-15)
    assert antipodal.method == "closed_form_case2"

    same = s_disk(0.3j, 0.3j, tol)
    assert same.result == 0.0
    assert abs(same.witness - 1j) <= 1e-15


def test_quartic_route_matches_closed_form(tol):
    """With the shortcuts disabled the quartic gives the same value"""
    assert s_disk(0, 0.5, tol, use_closed_forms=False).result == pytest.approx(1 / 3, abs=1e-12)
    assert s_disk(0.4, -0.4, tol, use_closed_forms=False).result == pytest.approx(0.4, abs=1e-12)


def test_triple_root_pair_value(tol):
    query = s_disk(0.5 + 0.5j, 0.5 - 0.5j, tol)
    assert query.method == "quartic"
    assert query.result == pytest.approx(1 / math.sqrt(2), abs=1e-9)
    assert abs(query.witness - 1) <= 1e-9


def test_s_disk_domain(tol):
    with pytest.raises(DomainError, match="open unit disk"):
        s_disk(0.5, 1.0, tol)
    with pytest.raises(DomainError, match="invalid input"):
        s_disk(float("nan"), 0.5, tol)


def test_oracle_known_values():
    assert s_disk_oracle(0, 0.5, 100000) == pytest.approx(1 / 3, abs=1e-10)
    assert s_disk_oracle(0.4, -0.4, 100000) == pytest.approx(0.4, abs=1e-10)
    assert s_disk_oracle(0.2j, 0.2j, 1000) == 0.0
    with pytest.raises(DomainError, match="at least 1000"):
        s_disk_oracle(0, 0.5, 999)


FOUR_ROOT_PAIR_VALUE = 0.7883908247110833


def test_four_root_pair_regression_value(tol, fig2_pair):
    """Recorded brute-force value for the four-reflection-point pair"""
    assert s_disk(*fig2_pair, tol).result == pytest.approx(FOUR_ROOT_PAIR_VALUE, abs=1e-8)
    assert s_disk_oracle(*fig2_pair, 100000) == pytest.approx(FOUR_ROOT_PAIR_VALUE, abs=1e-8)


def test_oracle_agrees_with_quartic(tol, fig2_pair, rng):
    z1, z2 = fig2_pair
    assert abs(s_disk(z1, z2, tol).result - s_disk_oracle(z1, z2, 100000)) <= 1e-8

    for _ in range(10):
        a = cmath.rect(rng.uniform(0.05, 0.95), rng.uniform(0, 2 * math.pi))
        b = cmath.rect(rng.uniform(0.05, 0.95), rng.uniform(0, 2 * math.pi))
        assert abs(s_disk(a, b, tol).result - s_disk_oracle(a, b, 100000)) <= 1e-8


def test_blocked_exterior():
    assert s_blocked_exterior(2, -2) == 1.0
    assert s_blocked_exterior(1.5j, -3j) == 1.0
    with pytest.raises(DomainError):
        s_blocked_exterior(2, 2j)
    with pytest.raises(DomainError):
        s_blocked_exterior(0.5, -2)


def test_ball_curve_validation():
    BallCurve(0.0, 0.0)
    with pytest.raises(DomainError):
        BallCurve(1.0, 0.5)
    with pytest.raises(DomainError):
        BallCurve(0.5, -0.1)


def test_ball_curve_at_zero_center():
    """For c = 0 the level s = t is the circle of radius 2t / (1 + t)"""
    curve = BallCurve(0.0, 0.5)
    for theta in (0.0, 1.0, 2.5, 4.0):
        w = cmath.rect(2 / 3, theta)
        assert abs(ball_poly_eval(curve, w)) <= 1e-12 * ball_poly_scale(curve, w)
    off = cmath.rect(0.5, 1.0)
    assert abs(ball_poly_eval(curve, off)) > 1e-6 * ball_poly_scale(curve, off)


def test_ball_curve_zero_radius():
    """At t = 0 only the center and the origin survive"""
    curve = BallCurve(0.4, 0.0)
    assert ball_poly_eval(curve, 0.4) == 0.0
    assert ball_poly_eval(curve, 0.0) == 0.0
    assert ball_poly_eval(curve, 0.2 + 0.1j) != 0.0


def test_ball_curve_rotation():
    w = 0.3 - 0.45j
    rotated = ball_poly_eval_at(0.3j, 0.5, w * 1j)
    direct = ball_poly_eval(BallCurve(0.3, 0.5), w)
    assert rotated == pytest.approx(direct, rel=1e-9, abs=1e-15)


def test_level_set_zero_center(tol):
    layer = level_set(0, 0.5, 360, tol)
    assert layer.skipped == 0
    assert len(layer.points) == 360
    for point in layer.points:
        assert abs(abs(point.w) - 2 / 3) <= 1e-10
        assert point.b_residual <= 1e-6


def test_level_set_lies_on_ball_curve(tol):
    layer = level_set(0.3, 0.1, 72, tol)
    assert layer.skipped == 0
    for point in layer.points:
        assert abs(point.s_residual) <= 1e-9
        assert point.b_residual <= 1e-6
        assert abs(point.w) < 1


def test_level_set_arguments(tol):
    with pytest.raises(DomainError):
        level_set(1.0, 0.5, 36, tol)
    with pytest.raises(DomainError):
        level_set(0.2, 0.0, 36, tol)
    with pytest.raises(DomainError):
        level_set(0.2, 0.5, 4, tol)


def test_level_set_with_workers(tol):
    serial = level_set(0.5, 0.3, 16, tol)
    threaded = level_set(0.5, 0.3, 16, tol, workers=4)
    assert [p.w for p in serial.points] == [p.w for p in threaded.points]


def test_radial_monotonicity(tol):
    assert check_radial_monotonicity(0.3, 1.0, 16, tol) == []
    assert check_radial_monotonicity(0.0, 2.0, 8, tol) == []
    layer = level_set(0.3, 0.4, 8, tol, check_monotonic=True, monotonic_samples=8)
    assert layer.monotonicity_violations == 0
