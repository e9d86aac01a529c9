"""Counting and classifying the unimodular roots of the reflection quartic."""
import cmath
import math
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np
import structlog

from app.core.errors import DomainError
from app.core.numerics import Polynomial, solve_polynomial
from app.core.reflect import AlhazenQuartic, build_quartic
from app.models.schemas import (
    Prediction,
    RootPattern,
    RootProfile,
    RootSet,
    SharpnessRow,
    Tolerances,
)

logger = structlog.get_logger()

REAL_BRANCH_UPPER = math.sqrt(2.0) - 1.0
LOCUS_EPS = 1e-12
SAMPLE_RADIUS = 2.0
BOUNDARY_GAP = 1e-3


def predict_count(z1: complex, z2: complex) -> Prediction:
    """Four when |z1+z2| < |z1 z2|, two when |z1+z2| > 2|z1 z2|, otherwise undecided"""
    total = abs(z1 + z2)
    product = abs(z1 * z2)
    if total < product:
        return Prediction.FOUR
    if total > 2.0 * product:
        return Prediction.TWO
    return Prediction.INDETERMINATE


def assign_pattern(roots: RootSet) -> RootPattern:
    if roots.degree == 3:
        return RootPattern.CUBIC
    if roots.degree != 4:
        return RootPattern.DEGENERATE
    on_circle = sorted(r.multiplicity for r in roots.unimodular_roots)
    off_circle = sum(r.multiplicity for r in roots.off_circle_roots)
    if on_circle == [1, 1, 1, 1]:
        return RootPattern.FOUR_SIMPLE
    if on_circle == [1, 1] and off_circle == 2:
        return RootPattern.TWO_SIMPLE_TWO_OFF
    if on_circle == [1, 1, 2]:
        return RootPattern.DOUBLE_PLUS_TWO_SIMPLE
    if on_circle == [1, 3]:
        return RootPattern.TRIPLE_PLUS_SIMPLE
    return RootPattern.DEGENERATE


def second_derivative_test(z1: complex, z2: complex) -> bool:
    """Whether both zeros of P'' (0 and conj(z1+z2) / (2 conj(z1 z2))) lie in the closed disk"""
    z1, z2 = complex(z1), complex(z2)
    product = abs(z1 * z2)
    if product == 0:
        return abs(z1 + z2) == 0
    return abs(z1 + z2) <= 2.0 * product


def profile_roots(z1: complex, z2: complex, tol: Tolerances) -> RootProfile:
    z1, z2 = complex(z1), complex(z2)
    quartic = build_quartic(z1, z2)
    roots = solve_polynomial(quartic.poly, tol)
    pattern = assign_pattern(roots)
    count = roots.count_unimodular
    prediction = predict_count(z1, z2)
    product = abs(z1 * z2)
    ratio_lo = abs(z1 + z2) / product if product > 0 else None

    if prediction == Prediction.FOUR:
        consistent = count == 4
    elif prediction == Prediction.TWO:
        consistent = count == 2
    else:
        consistent = True

    if pattern == RootPattern.DEGENERATE:
        logger.warning("Excluded root pattern observed", z1=str(z1), z2=str(z2),
                       multiplicities=[(r.multiplicity, r.unimodular) for r in roots.roots])
    if not consistent:
        logger.warning("Observed count disagrees with prediction", z1=str(z1), z2=str(z2),
                       prediction=prediction.value, observed=count)

    return RootProfile(
        z1=z1,
        z2=z2,
        count_unimodular=count,
        pattern=pattern,
        ratio_lo=ratio_lo,
        prediction=prediction,
        consistent=consistent,
        second_derivative_in_disk=second_derivative_test(z1, z2),
        roots=roots,
    )


def triple_root_locus(param: float, branch: str = "real") -> Tuple[complex, complex]:
    """Pairs whose quartic is proportional to (u - 1)^3 (u + 1).

    real branch: z1 = t, z2 = t / (2t - 1) for -1 < t < sqrt(2) - 1, t != 0;
    conjugate branch: z1 = 1/2 + exp(i param)/2 on the circle |z - 1/2| = 1/2, z2 = conj(z1).
    """
    param = float(param)
    if not math.isfinite(param):
        raise DomainError("invalid input")
    if branch == "real":
        if not (-1.0 < param < REAL_BRANCH_UPPER) or param == 0.0:
            raise DomainError(f"real branch parameter must lie in (-1, {REAL_BRANCH_UPPER:.12f}) and differ from 0")
        return complex(param), complex(param / (2.0 * param - 1.0))
    if branch == "conjugate":
        z1 = 0.5 + 0.5 * cmath.exp(1j * param)
        if abs(z1) <= LOCUS_EPS or abs(z1 - 1.0) <= LOCUS_EPS:
            raise DomainError("conjugate branch excludes z1 = 0 and z1 = 1")
        return z1, z1.conjugate()
    raise DomainError(f"unknown locus branch: {branch}")


def is_self_inversive(poly: Polynomial, eps: float = 1e-12) -> bool:
    """Coefficients equal a unimodular multiple of the reversed conjugate coefficients"""
    coeffs = poly.coeffs
    reversed_conj = [c.conjugate() for c in reversed(coeffs)]
    pivot = max(range(len(coeffs)), key=lambda k: abs(coeffs[k]))
    if reversed_conj[pivot] == 0:
        return False
    factor = coeffs[pivot] / reversed_conj[pivot]
    if abs(abs(factor) - 1.0) > eps:
        return False
    scale = poly.scale
    return all(abs(c - factor * r) <= eps * scale for c, r in zip(coeffs, reversed_conj))


def cohn_test(q: Union[AlhazenQuartic, Polynomial], tol: Tolerances) -> bool:
    """All roots unimodular iff self-inversive with every zero of P' in the closed disk"""
    poly = q.poly if isinstance(q, AlhazenQuartic) else q
    if poly.effective_degree(tol.degeneracy_eps) != 4:
        raise DomainError("degenerate degree: Cohn criterion needs a quartic")
    poly = poly.trimmed(tol.degeneracy_eps)
    if not is_self_inversive(poly):
        return False
    critical = solve_polynomial(poly.derivative(), tol)
    return all(abs(r.value) <= 1.0 + tol.unimodular_eps for r in critical.roots)


def sharpness_pair(t: float, alpha: float = 0.0) -> Tuple[complex, complex]:
    radius = 1.0 + t
    return radius * cmath.exp(1j * alpha), radius * cmath.exp(1j * (alpha + t))


def sharpness_scan(t_values: Sequence[float], tol: Tolerances, alpha: float = 0.0) -> List[SharpnessRow]:
    """Exterior pairs whose ratio tends to 2 from below while four roots persist"""
    rows: List[SharpnessRow] = []
    for t in t_values:
        t = float(t)
        if not t > 0.0:
            raise DomainError("sharpness parameter t must be positive")
        z1, z2 = sharpness_pair(t, alpha)
        profile = profile_roots(z1, z2, tol)
        rows.append(SharpnessRow(t=t, ratio=abs(z1 + z2) / abs(z1 * z2), count=profile.count_unimodular))
    return rows


def sample_pairs(rng: np.random.Generator, n: int, radius: float = SAMPLE_RADIUS,
                 gap: float = BOUNDARY_GAP) -> List[Tuple[complex, complex]]:
    """Uniform pairs on the disk of the given radius, avoiding a band of width gap around |z| = 1"""
    pairs: List[Tuple[complex, complex]] = []
    while len(pairs) < n:
        pts = sample_points(rng, 2, radius, gap)
        pairs.append((pts[0], pts[1]))
    return pairs


def sample_points(rng: np.random.Generator, n: int, radius: float = SAMPLE_RADIUS,
                  gap: float = BOUNDARY_GAP, inner: float = 0.0) -> List[complex]:
    points: List[complex] = []
    while len(points) < n:
        r = math.sqrt(inner * inner + (radius * radius - inner * inner) * rng.random())
        if abs(r - 1.0) < gap / 2.0:
            continue
        theta = 2.0 * math.pi * rng.random()
        points.append(complex(r * math.cos(theta), r * math.sin(theta)))
    return points


def off_circle_pairing_error(roots: RootSet) -> Optional[float]:
    """Largest distance from an off-circle root's inversion 1/conj(v) to the nearest root"""
    off = [r.value for r in roots.off_circle_roots if r.value != 0]
    if not off:
        return None
    values = [r.value for r in roots.roots]
    return max(min(abs(1.0 / v.conjugate() - w) for w in values) / max(1.0, abs(1.0 / v)) for v in off)
