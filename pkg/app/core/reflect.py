"""Reflection in the unit circle through the self-inversive quartic

    conj(z1 z2) u^4 - conj(z1 + z2) u^3 + (z1 + z2) u - z1 z2 = 0,

whose unimodular roots contain every point of the circle where the angle of
incidence from z1 equals the angle of reflection towards z2.
"""
import cmath
import math
from dataclasses import dataclass
from typing import List, Optional, Tuple

import structlog

from app.core.errors import DomainError, NumericalFailure
from app.core.numerics import Polynomial, is_finite, solve_polynomial, solve_quadratic
from app.models.schemas import (
    ClosedForm,
    FocalSum,
    ProblemKind,
    ReflectionCheck,
    ReflectionSolution,
    RootSet,
    SegmentTest,
    Tolerances,
)

logger = structlog.get_logger()

# relative band inside which two focal sums count as a tie
TIE_EPS = 1e-9
# relative tolerance for recognising the special configurations
CLOSED_FORM_EPS = 1e-12


@dataclass(frozen=True)
class AlhazenQuartic:
    z1: complex
    z2: complex
    poly: Polynomial

    @property
    def coeffs(self) -> Tuple[complex, ...]:
        return self.poly.coeffs

    def is_self_inversive(self, eps: float = 1e-15) -> bool:
        c = self.poly.coeffs
        scale = max(self.poly.scale, 1.0)
        return (abs(c[0].conjugate() + c[4]) <= eps * scale
                and abs(c[1].conjugate() + c[3]) <= eps * scale
                and c[2] == 0)


def _require_finite(*points: complex):
    for z in points:
        if not is_finite(complex(z)):
            raise DomainError("invalid input")


def build_quartic(z1: complex, z2: complex) -> AlhazenQuartic:
    """Quartic whose unimodular roots are the candidate reflection points"""
    z1, z2 = complex(z1), complex(z2)
    _require_finite(z1, z2)
    if z1 == 0 and z2 == 0:
        raise DomainError("degenerate: both foci at center")
    coeffs = (
        -z1 * z2,
        z1 + z2,
        0j,
        -(z1.conjugate() + z2.conjugate()),
        z1.conjugate() * z2.conjugate(),
    )
    return AlhazenQuartic(z1=z1, z2=z2, poly=Polynomial(coeffs))


def oriented_angle(z: complex, u: complex, w: complex) -> float:
    """Oriented angle at u from the ray towards z to the ray towards w, in (-pi, pi]"""
    z, u, w = complex(z), complex(u), complex(w)
    if u == z or u == w:
        raise DomainError("undefined angle")
    angle = cmath.phase((w - u) / (z - u))
    if angle <= -math.pi:
        angle = math.pi
    return angle


def reflection_residuals(z1: complex, z2: complex, u: complex) -> Tuple[float, float, float]:
    """Relative residual of the cubic identity, the signed inequality value and its scale.

    The cubic identity is conj(z1 z2) u^2 - conj(z1+z2) conj(u) u^2
    + (z1+z2) conj(u)^2 u - z1 z2 conj(u)^2 = 0; the inequality quantity is
    2 |u|^4 - conj(z1+z2) u^2 conj(u) - (z1+z2) conj(u)^2 u
    + conj(z1 z2) u^2 + z1 z2 conj(u)^2, which is real.
    """
    uc = u.conjugate()
    s, p = z1 + z2, z1 * z2
    sc, pc = s.conjugate(), p.conjugate()
    terms = (pc * u * u, -sc * uc * u * u, s * uc * uc * u, -p * uc * uc)
    scale = sum(abs(t) for t in terms)
    identity = abs(sum(terms)) / scale if scale > 0 else 0.0

    ineq_terms = (2.0 * u * u * uc * uc, -sc * u * u * uc, -s * uc * uc * u, pc * u * u, p * uc * uc)
    ineq_scale = sum(abs(t) for t in ineq_terms)
    return identity, sum(ineq_terms).real, ineq_scale


def check_reflection(z1: complex, z2: complex, u: complex, tol: Tolerances) -> ReflectionCheck:
    """Whether u reflects z1 to z2 (Equal), reflects with reversed orientation (Antipodal), or neither"""
    z1, z2, u = complex(z1), complex(z2), complex(u)
    _require_finite(z1, z2, u)
    if u == 0 or u == z1 or u == z2:
        raise DomainError("reflection point must differ from 0, z1 and z2")
    identity, value, scale = reflection_residuals(z1, z2, u)
    if identity > tol.residual_eps:
        return ReflectionCheck.NEITHER
    if value > tol.residual_eps * scale:
        return ReflectionCheck.EQUAL
    if value < -tol.residual_eps * scale:
        return ReflectionCheck.ANTIPODAL
    return ReflectionCheck.NEITHER


def ellipse_radius(z1: complex, z2: complex, u: complex, tol: Optional[Tolerances] = None) -> float:
    """Radius |2 - conj(u) z1 - u conj(z2)| of the ellipse with foci z1, z2 tangent at u"""
    tol = tol or Tolerances()
    u = complex(u)
    if abs(abs(u) - 1.0) > tol.unimodular_eps:
        raise DomainError("ellipse radius requires a unimodular point")
    return abs(2.0 - u.conjugate() * z1 - u * complex(z2).conjugate())


def focal_sum(z1: complex, z2: complex, u: complex) -> float:
    return abs(z1 - u) + abs(z2 - u)


def canonical_point(points: List[complex]) -> complex:
    """Largest real part, then largest imaginary part, comparing within TIE_EPS"""
    best_re = max(w.real for w in points)
    leaders = [w for w in points if best_re - w.real <= TIE_EPS]
    return max(leaders, key=lambda w: w.imag)


def _select(z1: complex, z2: complex, candidates: List[complex]) -> Tuple[List[complex], complex, float, complex, float]:
    sums = [(w, focal_sum(z1, z2, w)) for w in candidates]
    low = min(s for _, s in sums)
    high = max(s for _, s in sums)
    minimizers = [w for w, s in sums if s - low <= TIE_EPS * (1.0 + low)]
    maximizers = [w for w, s in sums if high - s <= TIE_EPS * (1.0 + high)]
    minimizers.sort(key=lambda w: cmath.phase(w))
    return minimizers, canonical_point(minimizers), low, canonical_point(maximizers), high


def _solve(z1: complex, z2: complex, kind: ProblemKind, tol: Tolerances) -> ReflectionSolution:
    quartic = build_quartic(z1, z2)
    roots: RootSet = solve_polynomial(quartic.poly, tol)
    unimodular = roots.unimodular_roots
    if roots.count_unimodular < 2:
        raise NumericalFailure("numerical failure: fewer than two unimodular roots")
    # project onto the circle; the flag already bounds the radial error by unimodular_eps
    candidates = [r.value / abs(r.value) for r in unimodular]
    minimizers, u, low, maximizer, high = _select(z1, z2, candidates)
    metric_value = abs(z1 - z2) / low if kind == ProblemKind.INTERIOR else None
    logger.debug("Reflection solved", kind=kind.value, u=str(u), path_length=low,
                 unimodular=len(unimodular))
    return ReflectionSolution(
        kind=kind,
        z1=z1,
        z2=z2,
        u=u,
        path_length=low,
        ellipse_radius=ellipse_radius(z1, z2, u, tol),
        all_minimizers=minimizers,
        maximizer=maximizer,
        maximal_path_length=high,
        metric_value=metric_value,
        focal_sums=[FocalSum(u=w, path_length=focal_sum(z1, z2, w)) for w in candidates],
        roots=roots,
    )


def solve_interior(z1: complex, z2: complex, tol: Tolerances) -> ReflectionSolution:
    """Shortest reflected path between two points of the open unit disk"""
    z1, z2 = complex(z1), complex(z2)
    _require_finite(z1, z2)
    if abs(z1) >= 1.0 or abs(z2) >= 1.0:
        raise DomainError("points must lie in the open unit disk")
    return _solve(z1, z2, ProblemKind.INTERIOR, tol)


def segment_meets_disk(z1: complex, z2: complex) -> SegmentTest:
    """Whether the closed segment [z1, z2] meets the closed unit disk, plus the line distance"""
    z1, z2 = complex(z1), complex(z2)
    _require_finite(z1, z2)
    if z1 == z2:
        raise DomainError("segment endpoints coincide")
    delta = z2 - z1
    line_distance = abs(z1.conjugate() * z2 - z1 * z2.conjugate()) / (2.0 * abs(delta))
    t = -(z1 * delta.conjugate()).real / abs(delta) ** 2
    t = min(1.0, max(0.0, t))
    closest = z1 + t * delta
    return SegmentTest(blocked=abs(closest) <= 1.0, line_distance=line_distance, closest_point=closest)


def classify_problem(z1: complex, z2: complex) -> Optional[ProblemKind]:
    """Interior, exterior or blocked exterior; None for mixed or boundary pairs"""
    z1, z2 = complex(z1), complex(z2)
    if abs(z1) < 1.0 and abs(z2) < 1.0:
        return ProblemKind.INTERIOR
    if abs(z1) > 1.0 and abs(z2) > 1.0:
        if z1 == z2 or not segment_meets_disk(z1, z2).blocked:
            return ProblemKind.EXTERIOR
        return ProblemKind.EXTERIOR_BLOCKED
    return None


def solve_exterior(z1: complex, z2: complex, tol: Tolerances) -> ReflectionSolution:
    """Shortest reflected path between two exterior points whose segment misses the mirror"""
    z1, z2 = complex(z1), complex(z2)
    _require_finite(z1, z2)
    if abs(z1) <= 1.0 or abs(z2) <= 1.0:
        raise DomainError("points must lie outside the closed unit disk")
    if z1 != z2 and segment_meets_disk(z1, z2).blocked:
        raise DomainError("segment crosses mirror: direct path exists")
    solution = _solve(z1, z2, ProblemKind.EXTERIOR, tol)
    distinct = len(solution.roots.unimodular_roots)
    if distinct != 4:
        logger.warning("Exterior pair without four distinct unimodular roots",
                       z1=str(z1), z2=str(z2), distinct=distinct)
        solution = solution.model_copy(update={"count_mismatch": True})
    return solution


def _close(a: complex, b: complex, scale: float) -> bool:
    return abs(a - b) <= CLOSED_FORM_EPS * scale


def closed_form(z1: complex, z2: complex) -> Optional[ClosedForm]:
    """Explicit roots (and metric value where known) for the special configurations"""
    z1, z2 = complex(z1), complex(z2)
    _require_finite(z1, z2)
    scale = max(1.0, abs(z1), abs(z2))
    zero1, zero2 = _close(z1, 0, scale), _close(z2, 0, scale)
    if zero1 and zero2:
        return None

    if zero1 or zero2:
        z = z2 if zero1 else z1
        direction = z / abs(z)
        s_value = abs(z) / (2.0 - abs(z)) if abs(z) < 1.0 else None
        return ClosedForm(case=1, roots=[0j, direction, -direction], s_value=s_value)

    if _close(z1 + z2, 0, scale):
        direction = z1 / abs(z1)
        s_value = abs(z1) if abs(z1) < 1.0 else None
        return ClosedForm(case=2, roots=[direction, -direction, 1j * direction, -1j * direction],
                          s_value=s_value, extra_unimodular=True)

    if _close(z1, z2, scale):
        z = z1
        r = abs(z)
        direction = z / r
        inv = 1.0 / z.conjugate()
        if abs(r - 1.0) <= CLOSED_FORM_EPS:
            extra, on_circle = [inv, inv], True
        elif r < 1.0:
            root = math.sqrt(1.0 - r * r)
            extra, on_circle = [inv * (1.0 + root), inv * (1.0 - root)], False
        else:
            root = math.sqrt(r * r - 1.0)
            extra, on_circle = [inv * (1.0 + 1j * root), inv * (1.0 - 1j * root)], True
        return ClosedForm(case=3, roots=[direction, -direction] + extra,
                          s_value=0.0 if r < 1.0 else None, extra_unimodular=on_circle)

    if abs(abs(z1) - abs(z2)) <= CLOSED_FORM_EPS * scale:
        rho = abs(z1)
        theta1, theta2 = cmath.phase(z1), cmath.phase(z2)
        half = _wrap(theta2 - theta1) / 2.0
        rotation = cmath.exp(1j * (theta1 + half))
        k = math.cos(half) / rho
        # u^2 - 2 k u + 1 has roots k +- sqrt(k^2 - 1); unimodular once k <= 1
        if k > 1.0:
            root = math.sqrt(k * k - 1.0)
            pair = [complex(k + root), complex(k - root)]
        else:
            root = math.sqrt(max(0.0, 1.0 - k * k))
            pair = [complex(k, root), complex(k, -root)]
        roots = [rotation, -rotation] + [rotation * v for v in pair]
        return ClosedForm(case=4, roots=roots, extra_unimodular=k <= 1.0)

    if abs((z1 * z2.conjugate()).imag) <= CLOSED_FORM_EPS * abs(z1) * abs(z2):
        z = z2
        t = (z1 * z2.conjugate()).real / abs(z2) ** 2
        direction = z / abs(z)
        r1, r2 = solve_quadratic(t * z, -(1.0 + t), t * z.conjugate())
        on_circle = abs(z) >= abs((1.0 + t) / (2.0 * t)) * (1.0 - CLOSED_FORM_EPS)
        return ClosedForm(case=5, roots=[direction, -direction, r1, r2], extra_unimodular=on_circle)

    return None


def _wrap(angle: float) -> float:
    """Reduce an angle to (-pi, pi]"""
    wrapped = math.remainder(angle, 2.0 * math.pi)
    if wrapped <= -math.pi:
        wrapped += 2.0 * math.pi
    return wrapped
