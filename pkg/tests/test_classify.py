import math

import pytest

from app.core.classify import (
    assign_pattern,
    cohn_test,
    off_circle_pairing_error,
    predict_count,
    profile_roots,
    second_derivative_test,
    sharpness_pair,
    sharpness_scan,
    triple_root_locus,
)
from app.core.errors import DomainError
from app.core.numerics import Polynomial, cluster_roots, solve_polynomial
from app.core.reflect import build_quartic
from app.models.schemas import Prediction, RootPattern


def test_predict_count():
    assert predict_count(0.9, -0.89) == Prediction.FOUR
    assert predict_count(0.1, 0.1j) == Prediction.TWO
    assert predict_count(0.5 + 0.5j, 0.5 - 0.5j) == Prediction.INDETERMINATE


def test_profile_four_roots(tol):
    profile = profile_roots(0.9, -0.89, tol)
    assert profile.prediction == Prediction.FOUR
    assert profile.count_unimodular == 4
    assert profile.pattern == RootPattern.FOUR_SIMPLE
    assert profile.consistent


def test_profile_two_roots(tol):
    profile = profile_roots(0.1, 0.1j, tol)
    assert profile.prediction == Prediction.TWO
    assert profile.count_unimodular == 2
    assert profile.pattern == RootPattern.TWO_SIMPLE_TWO_OFF
    assert profile.consistent
    assert not profile.second_derivative_in_disk


def test_profile_triple_root(tol):
    profile = profile_roots(0.5 + 0.5j, 0.5 - 0.5j, tol)
    assert profile.pattern == RootPattern.TRIPLE_PLUS_SIMPLE
    assert profile.ratio_lo == pytest.approx(2.0)
    assert profile.second_derivative_in_disk


def test_profile_cubic(tol):
    profile = profile_roots(0, 0.5, tol)
    assert profile.pattern == RootPattern.CUBIC
    assert profile.ratio_lo is None
    assert profile.count_unimodular == 2


def test_assign_pattern_flags_excluded_combinations(tol):
    # two unimodular double roots never come out of a reflection quartic
    roots = cluster_roots([1, 1, -1, -1], tol)
    assert assign_pattern(roots) == RootPattern.DEGENERATE
    assert assign_pattern(cluster_roots([1, 1j, -1, -1j], tol)) == RootPattern.FOUR_SIMPLE
    assert assign_pattern(cluster_roots([1, 1, 1j, -1j], tol)) == RootPattern.DOUBLE_PLUS_TWO_SIMPLE
    assert assign_pattern(cluster_roots([1, 2], tol)) == RootPattern.DEGENERATE


def test_second_derivative_test():
    assert second_derivative_test(0.9, -0.89)
    assert not second_derivative_test(0.1, 0.1j)
    assert not second_derivative_test(0, 0.5)
    assert second_derivative_test(0.3, -0.3)


@pytest.mark.parametrize("param", [-0.9, -0.5, 0.2, 0.4])
def test_real_triple_root_branch(tol, param):
    z1, z2 = triple_root_locus(param, "real")
    assert z1 == param
    assert z2 == pytest.approx(param / (2 * param - 1))
    profile = profile_roots(z1, z2, tol)
    assert profile.pattern == RootPattern.TRIPLE_PLUS_SIMPLE
    assert profile.ratio_lo == pytest.approx(2.0, abs=1e-9)


@pytest.mark.parametrize("param", [0.5, 1.5, 2.5, 4.0])
def test_conjugate_triple_root_branch(tol, param):
    z1, z2 = triple_root_locus(param, "conjugate")
    assert z2 == z1.conjugate()
    assert abs(z1 - 0.5) == pytest.approx(0.5)
    roots = solve_polynomial(build_quartic(z1, z2).poly, tol)
    triple = [r for r in roots.roots if r.multiplicity == 3]
    assert len(triple) == 1
    assert abs(triple[0].value - 1) <= 1e-6


def test_triple_root_locus_errors():
    with pytest.raises(DomainError):
        triple_root_locus(0.0, "real")
    with pytest.raises(DomainError):
        triple_root_locus(0.5, "real")
    with pytest.raises(DomainError):
        triple_root_locus(math.pi, "conjugate")
    with pytest.raises(DomainError, match="unknown locus branch"):
        triple_root_locus(0.2, "imaginary")


def test_cohn_test(tol):
    assert cohn_test(build_quartic(0.9, -0.89), tol)
    assert not cohn_test(build_quartic(0.1, 0.1j), tol)
    assert cohn_test(Polynomial.from_coeffs([-1, 0, 0, 0, 1]), tol)
    with pytest.raises(DomainError, match="Cohn criterion needs a quartic"):
        cohn_test(build_quartic(0, 0.5), tol)


def test_sharpness_ratios(tol):
    rows = sharpness_scan([0.5, 0.1, 0.01], tol)
    for row in rows:
        assert row.count == 4
        assert row.ratio == pytest.approx(2 * math.cos(row.t / 2) / (1 + row.t), abs=1e-12)
        assert row.ratio < 2
    assert rows[-1].ratio > 1.98
    assert [row.ratio for row in rows] == sorted(row.ratio for row in rows)


def test_sharpness_rotation_invariance(tol):
    straight = sharpness_scan([0.2], tol)[0]
    turned = sharpness_scan([0.2], tol, alpha=1.3)[0]
    assert turned.ratio == pytest.approx(straight.ratio, abs=1e-12)
    assert turned.count == straight.count
    z1, z2 = sharpness_pair(0.2, 1.3)
    assert abs(z1) == pytest.approx(1.2)
    assert abs(z2) == pytest.approx(1.2)


def test_sharpness_rejects_nonpositive(tol):
    with pytest.raises(DomainError, match="must be positive"):
        sharpness_scan([0.1, 0.0], tol)


def test_off_circle_roots_pair_under_inversion(tol):
    roots = solve_polynomial(build_quartic(0.1, 0.1j).poly, tol)
    assert off_circle_pairing_error(roots) <= 1e-9
    assert off_circle_pairing_error(solve_polynomial(build_quartic(0.9, -0.89).poly, tol)) is None
