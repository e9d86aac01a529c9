import cmath
import math

import pytest

from app.core.conic import (
    anchor_points,
    build_conic,
    circumcenter,
    circumcenter_with_origin,
    conic_circle_intersections,
    conic_residual,
    g_function,
    hausdorff_distance,
    line_pair_intersection_count,
    normalize,
    orthocenter,
    orthocenter_origin_triangle,
)
from app.core.errors import DomainError
from app.core.numerics import solve_polynomial
from app.core.reflect import build_quartic
from app.models.schemas import ConicKind


def _unimodular(z1, z2, tol):
    roots = solve_polynomial(build_quartic(z1, z2).poly, tol)
    return [r.value for r in roots.unimodular_roots]


def test_conic_kinds():
    assert build_conic(0.5 + 0.5j, 0.5).kind == ConicKind.EQUILATERAL_HYPERBOLA
    # equal moduli or collinear with the center
    assert build_conic(0.5j, 0.5).kind == ConicKind.LINE_PAIR
    assert build_conic(0.25, 0.5).kind == ConicKind.LINE_PAIR
    assert build_conic(0.25, 0.5).hyperbola_constant == 0.0


def test_near_degenerate_hyperbola_is_flagged():
    model = build_conic(0.5, 0.3 + 1e-8j)
    assert model.kind == ConicKind.EQUILATERAL_HYPERBOLA
    assert model.ill_conditioned


def test_normalization_places_pair_symmetrically():
    z1, z2 = 0.3 - 0.6j, -0.5 + 0.1j
    norm = normalize(z1, z2)
    assert 0 <= norm.alpha <= math.pi / 2
    a, b = norm.forward(z1), norm.forward(z2)
    assert a.conjugate() / abs(a) == pytest.approx(b / abs(b), abs=1e-12)
    assert abs(norm.inverse(a) - z1) <= 1e-12


def test_anchor_points_lie_on_conic():
    z1, z2 = 0.3 - 0.6j, -0.5 + 0.1j
    model = build_conic(z1, z2)
    for w in anchor_points(z1, z2):
        assert conic_residual(model, w) <= 1e-12


def test_hyperbola_vertices_lie_on_conic():
    model = build_conic(0.5 + 0.5j, 0.5)
    assert len(model.vertices) == 2
    assert model.vertex_distance == pytest.approx(math.sqrt(2 * abs(model.hyperbola_constant)))
    for w in model.vertices:
        assert conic_residual(model, w) <= 1e-9


def test_degenerate_conic():
    with pytest.raises(DomainError, match="degenerates to a line"):
        build_conic(0, 0.5)
    with pytest.raises(DomainError, match="invalid input"):
        build_conic(float("inf"), 0.5)


def test_intersections_match_quartic_interior(tol, fig3_pair):
    points = conic_circle_intersections(*fig3_pair, tol)
    assert len(points) == 2
    assert hausdorff_distance(points, _unimodular(*fig3_pair, tol)) <= 1e-9


def test_intersections_match_quartic_exterior(tol):
    """Equal moduli put one intersection on the seam at t = pi"""
    points = conic_circle_intersections(2, 2j, tol)
    assert len(points) == 4
    assert hausdorff_distance(points, _unimodular(2, 2j, tol)) <= 1e-9


def test_intersections_match_quartic_four_roots(tol, fig2_pair):
    points = conic_circle_intersections(*fig2_pair, tol)
    assert len(points) == 4
    assert hausdorff_distance(points, _unimodular(*fig2_pair, tol)) <= 1e-9


@pytest.mark.parametrize("z1,z2,expected", [
    (0.5 * cmath.exp(-0.3j), 0.5 * cmath.exp(0.3j), 2),
    (0.5 * cmath.exp(-1.2j), 0.5 * cmath.exp(1.2j), 4),
    (0.8 * cmath.exp(-0.3j), 0.8 * cmath.exp(0.3j), 2),
    (0.8 * cmath.exp(-1.0j), 0.8 * cmath.exp(1.0j), 4),
    (2 * cmath.exp(-0.3j), 2 * cmath.exp(0.3j), 4),
    (3 * cmath.exp(-1.2j), 3 * cmath.exp(1.2j), 4),
    (0.5, 0.5j, 2),
    (0.9, 0.3, 2),
    (0.9, -0.3, 2),
    (2, 3, 4),
])
def test_line_pair_intersections_on_the_seam(tol, z1, z2, expected):
    """Line-pair conics pass through t = +-pi, where g vanishes up to rounding"""
    assert build_conic(z1, z2).kind == ConicKind.LINE_PAIR
    points = conic_circle_intersections(z1, z2, tol)
    assert len(points) == expected
    assert hausdorff_distance(points, _unimodular(z1, z2, tol)) <= 1e-8


def test_g_endpoint_identity():
    z1, z2 = 0.6 + 0.2j, -0.1 + 0.4j
    g, alpha, _ = g_function(z1, z2)
    expected = (abs(z1) - abs(z2)) * math.sin(alpha)
    assert g(math.pi) == pytest.approx(expected, abs=1e-12)
    assert g(-math.pi) == pytest.approx(expected, abs=1e-12)
    assert g(0.0) == pytest.approx(-expected, abs=1e-12)


def test_line_pair_counts():
    assert line_pair_intersection_count(0.5j, 0.5) == 2
    assert line_pair_intersection_count(2, 2j) == 4
    assert line_pair_intersection_count(0.5 + 0.5j, 0.5) is None


def test_circumcenter():
    assert abs(circumcenter(0, 2, 2j) - (1 + 1j)) <= 1e-12
    assert abs(circumcenter_with_origin(2, 2j) - (1 + 1j)) <= 1e-12
    with pytest.raises(DomainError, match="collinear"):
        circumcenter(0, 1, 2)
    with pytest.raises(DomainError, match="collinear"):
        circumcenter_with_origin(0.5, -0.25)


def test_orthocenter():
    # right angle at the origin
    assert abs(orthocenter(0, 2, 2j)) <= 1e-12
    a, b, c = 0.1 + 0.2j, 1.3 - 0.4j, -0.6 + 0.9j
    h = orthocenter(a, b, c)
    assert abs(((h - c) * (b - a).conjugate()).real) <= 1e-12
    assert abs(((h - a) * (c - b).conjugate()).real) <= 1e-12


def test_origin_triangle_orthocenter_lies_on_conic():
    z1, z2 = 0.5 + 0.2j, -0.3 + 0.6j
    h0 = orthocenter_origin_triangle(z1, z2)
    direct = orthocenter(0j, 1 / z1.conjugate(), 1 / z2.conjugate())
    assert abs(h0 - direct) <= 1e-10 * max(1.0, abs(direct))
    assert conic_residual(build_conic(z1, z2), h0) <= 1e-10
    with pytest.raises(DomainError, match="collinear"):
        orthocenter_origin_triangle(0.5, 0.25)


def test_hausdorff_distance():
    assert hausdorff_distance([], []) == 0.0
    assert hausdorff_distance([1], []) == math.inf
    assert hausdorff_distance([0, 1], [1j]) == pytest.approx(math.sqrt(2))
