import cmath
import math

from hypothesis import assume, given
from hypothesis import strategies as st

from app.core.metric import s_disk
from app.core.numerics import solve_polynomial
from app.core.reflect import (
    build_quartic,
    check_reflection,
    ellipse_radius,
    focal_sum,
    segment_meets_disk,
    solve_exterior,
    solve_interior,
)
from app.models.schemas import ReflectionCheck, Tolerances

TOL = Tolerances()
angles = st.floats(min_value=0.0, max_value=2 * math.pi, exclude_max=True)


@st.composite
def interior_points(draw):
    r = draw(st.floats(min_value=0.01, max_value=0.99))
    return cmath.rect(r, draw(angles))


@st.composite
def exterior_points(draw):
    r = draw(st.floats(min_value=1.05, max_value=3.0))
    return cmath.rect(r, draw(angles))


@given(interior_points(), interior_points())
def test_metric_is_symmetric_and_bounded(z1, z2):
    forward = s_disk(z1, z2, TOL).result
    assert abs(forward - s_disk(z2, z1, TOL).result) <= 1e-12
    assert 0.0 <= forward < 1.0


@given(interior_points(), interior_points())
def test_minimizer_reflects(z1, z2):
    solution = solve_interior(z1, z2, TOL)
    assert abs(abs(solution.u) - 1.0) <= 1e-9
    assert check_reflection(z1, z2, solution.u, TOL) == ReflectionCheck.EQUAL
    assert abs(ellipse_radius(z1, z2, solution.u, TOL) - solution.path_length) <= 1e-9


@given(interior_points(), interior_points())
def test_at_least_two_unimodular_roots(z1, z2):
    roots = solve_polynomial(build_quartic(z1, z2).poly, TOL)
    assert roots.count_unimodular >= 2
    assert roots.count_unimodular in (2, 3, 4)


@given(interior_points(), interior_points(), angles)
def test_rotation_preserves_path_length(z1, z2, phi):
    turn = cmath.exp(1j * phi)
    base = solve_interior(z1, z2, TOL)
    turned = solve_interior(turn * z1, turn * z2, TOL)
    assert abs(base.path_length - turned.path_length) <= 1e-9
    assert abs(focal_sum(turn * z1, turn * z2, turn * base.u) - turned.path_length) <= 1e-9


@given(interior_points(), interior_points())
def test_conjugation_preserves_path_length(z1, z2):
    base = solve_interior(z1, z2, TOL)
    mirrored = solve_interior(z1.conjugate(), z2.conjugate(), TOL)
    assert abs(base.path_length - mirrored.path_length) <= 1e-9


@given(exterior_points(), exterior_points())
def test_clear_exterior_pairs_have_four_roots(z1, z2):
    assume(abs(z1 - z2) > 1e-3)
    assume(abs(segment_meets_disk(z1, z2).closest_point) >= 1.05)
    solution = solve_exterior(z1, z2, TOL)
    assert solution.roots.count_unimodular == 4
    assert check_reflection(z1, z2, solution.u, TOL) == ReflectionCheck.EQUAL
