"""Geometric route to the reflection points.

Under inversion in the unit circle the locus of points seeing z1 and z2 under
equal angles maps to the conic Im(conj(z1 z2) u (1/conj(z1) + 1/conj(z2) - u)) = 0,
which meets the unit circle exactly at the unimodular roots of the quartic.
"""
import cmath
import math
from typing import Callable, List, Optional, Tuple

import numpy as np
import structlog
from scipy import optimize

from app.core.errors import DomainError
from app.core.numerics import is_finite
from app.models.schemas import (
    ConicKind,
    ConicModel,
    Line,
    Normalization,
    QuadraticForm,
    Tolerances,
)

logger = structlog.get_logger()

LINE_PAIR_EPS = 1e-10
ILL_CONDITIONED_EPS = 1e-6
COLLINEAR_EPS = 1e-14
SCAN_POINTS = 4096
BISECT_XTOL = 1e-13
TANGENCY_EPS = 1e-12
ZERO_EPS = 1e-14


def _require_nonzero(z1: complex, z2: complex):
    if not (is_finite(z1) and is_finite(z2)):
        raise DomainError("invalid input")
    if z1 == 0 or z2 == 0:
        raise DomainError("conic degenerates to a line")


def _wrap(angle: float) -> float:
    wrapped = math.remainder(angle, 2.0 * math.pi)
    if wrapped <= -math.pi:
        wrapped += 2.0 * math.pi
    return wrapped


def normalize(z1: complex, z2: complex) -> Normalization:
    """Rotation (and optional reflection) taking the pair to arg z2 = -arg z1 = alpha in [0, pi/2]"""
    theta1 = cmath.phase(z1)
    half = _wrap(cmath.phase(z2) - theta1) / 2.0
    return Normalization(rotation=theta1 + half, conjugated=half < 0.0, alpha=abs(half))


def quadratic_form(z1: complex, z2: complex) -> QuadraticForm:
    """Coefficients of Im(b u - a u^2) with a = conj(z1 z2), b = conj(z1 + z2)"""
    a = (z1 * z2).conjugate()
    b = (z1 + z2).conjugate()
    return QuadraticForm(a=-a.imag, b=-2.0 * a.real, c=a.imag, d=b.imag, e=b.real, f=0.0)


def build_conic(z1: complex, z2: complex) -> ConicModel:
    z1, z2 = complex(z1), complex(z2)
    _require_nonzero(z1, z2)
    r1, r2 = abs(z1), abs(z2)
    product = r1 * r2
    norm = normalize(z1, z2)
    alpha = norm.alpha

    center = (1.0 / z1.conjugate() + 1.0 / z2.conjugate()) / 2.0
    modulus_gap = abs(r1 - r2) / max(r1, r2)
    angular_gap = abs((z1 * z2.conjugate()).imag) / product
    is_pair = modulus_gap <= LINE_PAIR_EPS or angular_gap <= LINE_PAIR_EPS
    kind = ConicKind.LINE_PAIR if is_pair else ConicKind.EQUILATERAL_HYPERBOLA

    # normalized frame: (X - x0)(Y - y0) = K
    x0 = (r1 + r2) * math.cos(alpha) / (2.0 * product)
    y0 = (r1 - r2) * math.sin(alpha) / (2.0 * product)
    constant = (r1 * r1 - r2 * r2) * math.sin(2.0 * alpha) / (8.0 * product * product)
    if is_pair:
        constant = 0.0

    axis = norm.inverse(1.0 + 0j) - norm.inverse(0j)
    lines = [
        Line(point=center, direction=axis),
        Line(point=center, direction=norm.inverse(1j) - norm.inverse(0j)),
    ]

    line_distances = None
    vertex_distance = None
    vertices: List[complex] = []
    ill_conditioned = False
    if is_pair:
        line_distances = (abs(y0), abs(x0))
    else:
        vertex_distance = math.sqrt(2.0 * abs(constant))
        offset = math.sqrt(abs(constant))
        diagonal = complex(offset, offset if constant > 0 else -offset)
        local_center = complex(x0, y0)
        vertices = [norm.inverse(local_center + diagonal), norm.inverse(local_center - diagonal)]
        ill_conditioned = min(modulus_gap, angular_gap) <= ILL_CONDITIONED_EPS
        if ill_conditioned:
            logger.warning("Near-degenerate hyperbola", z1=str(z1), z2=str(z2),
                           modulus_gap=modulus_gap, angular_gap=angular_gap)

    return ConicModel(
        z1=z1,
        z2=z2,
        form=quadratic_form(z1, z2),
        center=center,
        kind=kind,
        lines_or_asymptotes=lines,
        line_distances=line_distances,
        vertex_distance=vertex_distance,
        hyperbola_constant=constant,
        vertices=vertices,
        normalization=norm,
        ill_conditioned=ill_conditioned,
    )


def conic_residual(model: ConicModel, w: complex) -> float:
    """|f(w)| relative to the term scale at w"""
    scale = model.form.scale(w)
    value = abs(model.form.evaluate(w))
    return value / scale if scale > 0 else value


def anchor_points(z1: complex, z2: complex) -> List[complex]:
    """Four points every such conic passes through"""
    a, b = 1.0 / complex(z1).conjugate(), 1.0 / complex(z2).conjugate()
    return [0j, a, b, a + b]


def circumcenter(a: complex, b: complex, c: complex) -> complex:
    a, b, c = complex(a), complex(b), complex(c)
    numerator = np.array([
        [abs(a) ** 2, a, 1.0],
        [abs(b) ** 2, b, 1.0],
        [abs(c) ** 2, c, 1.0],
    ], dtype=complex)
    denominator = np.array([
        [a.conjugate(), a, 1.0],
        [b.conjugate(), b, 1.0],
        [c.conjugate(), c, 1.0],
    ], dtype=complex)
    det = complex(np.linalg.det(denominator))
    size = max(abs(b - a), abs(c - a), abs(c - b))
    if size == 0 or abs(det) <= COLLINEAR_EPS * size * size:
        raise DomainError("collinear vertices")
    return complex(np.linalg.det(numerator)) / det


def circumcenter_with_origin(z1: complex, z2: complex) -> complex:
    """Circumcenter of the triangle 0, z1, z2 in closed form"""
    z1, z2 = complex(z1), complex(z2)
    denom = z1 * z2.conjugate() - z1.conjugate() * z2
    if abs(denom) <= COLLINEAR_EPS * abs(z1) * abs(z2) or denom == 0:
        raise DomainError("collinear vertices")
    return z1 * z2 * (z2.conjugate() - z1.conjugate()) / denom


def orthocenter(a: complex, b: complex, c: complex) -> complex:
    """Orthocenter from the vertex sum minus twice the circumcenter"""
    return complex(a) + complex(b) + complex(c) - 2.0 * circumcenter(a, b, c)


def orthocenter_origin_triangle(z1: complex, z2: complex) -> complex:
    """Orthocenter of the triangle 0, 1/conj(z1), 1/conj(z2)"""
    z1, z2 = complex(z1), complex(z2)
    _require_nonzero(z1, z2)
    cross = z1 * z2.conjugate() - z1.conjugate() * z2
    if abs(cross) <= COLLINEAR_EPS * abs(z1) * abs(z2):
        raise DomainError("collinear configuration: 0, 1/conj(z1), 1/conj(z2) lie on a line")
    dot = z1 * z2.conjugate() + z1.conjugate() * z2
    return (z2.conjugate() - z1.conjugate()) / (z1.conjugate() * z2.conjugate()) * dot / cross


def g_function(z1: complex, z2: complex) -> Tuple[Callable[[float], float], float, Normalization]:
    """Trigonometric equation whose zeros t give the intersections exp(i t) in the normalized frame"""
    z1, z2 = complex(z1), complex(z2)
    _require_nonzero(z1, z2)
    norm = normalize(z1, z2)
    r1, r2 = abs(z1), abs(z2)
    product = r1 * r2
    alpha = norm.alpha

    def g(t: float) -> float:
        return product * math.sin(2.0 * t) - r1 * math.sin(t + alpha) - r2 * math.sin(t - alpha)

    return g, alpha, norm


def _breakpoints(alpha: float) -> List[float]:
    return [-math.pi, alpha - math.pi, -alpha, 0.0, alpha, math.pi - alpha, math.pi]


def conic_circle_intersections(z1: complex, z2: complex, tol: Tolerances) -> List[complex]:
    """Points where the conic meets the unit circle, isolated by sign changes of g"""
    g, alpha, norm = g_function(z1, z2)
    scale = abs(z1) * abs(z2) + abs(z1) + abs(z2)
    floor = ZERO_EPS * scale

    # g is 2pi-periodic; values within rounding of zero count as exact zeros so
    # that g(-pi) and g(pi) agree in sign on the seam
    def periodic(t: float) -> float:
        value = g(t - 2.0 * math.pi if t > math.pi else t)
        return 0.0 if abs(value) <= floor else value

    samples = np.linspace(-math.pi, math.pi, SCAN_POINTS + 1).tolist() + _breakpoints(alpha)
    grid = sorted({t for t in samples if t < math.pi})
    n = len(grid)
    grid.append(grid[0] + 2.0 * math.pi)
    values = [periodic(t) for t in grid]

    roots: List[float] = []
    for k in range(n):
        left, right = values[k], values[k + 1]
        if left == 0.0:
            roots.append(grid[k])
        elif left * right < 0.0:
            roots.append(optimize.bisect(periodic, grid[k], grid[k + 1], xtol=BISECT_XTOL))

    # even-multiplicity contacts leave no sign change; look for near-zero local minima of |g|
    for k in range(n):
        before, here, after = values[k - 1] if k else values[n - 1], values[k], values[k + 1]
        if (abs(here) <= abs(before) and abs(here) <= abs(after)
                and before * here > 0 and here * after > 0):
            low = grid[k - 1] if k else grid[n - 1] - 2.0 * math.pi
            found = optimize.minimize_scalar(lambda t: abs(g(t)), bounds=(low, grid[k + 1]),
                                             method="bounded", options={"xatol": BISECT_XTOL})
            if found.success and found.fun <= TANGENCY_EPS * scale:
                roots.append(float(found.x))

    points: List[complex] = []
    for t in roots:
        w = norm.inverse(cmath.exp(1j * t))
        if all(abs(w - q) > tol.cluster_eps for q in points):
            points.append(w)
    points.sort(key=cmath.phase)
    if len(points) == 3:
        logger.warning("Odd intersection count; one contact is tangential", z1=str(z1), z2=str(z2))
    return points


def line_pair_intersection_count(z1: complex, z2: complex, tol: Optional[Tolerances] = None) -> Optional[int]:
    """Distinct circle points on a degenerate (line-pair) conic; None for hyperbolas"""
    tol = tol or Tolerances()
    model = build_conic(z1, z2)
    if model.kind != ConicKind.LINE_PAIR:
        return None
    r1, r2 = abs(model.z1), abs(model.z2)
    product = r1 * r2
    alpha = model.normalization.alpha
    x0 = (r1 + r2) * math.cos(alpha) / (2.0 * product)
    y0 = (r1 - r2) * math.sin(alpha) / (2.0 * product)
    points: List[complex] = []
    if abs(y0) <= 1.0:
        x = math.sqrt(1.0 - y0 * y0)
        points += [complex(x, y0), complex(-x, y0)]
    if abs(x0) <= 1.0:
        y = math.sqrt(1.0 - x0 * x0)
        points += [complex(x0, y), complex(x0, -y)]
    distinct: List[complex] = []
    for w in points:
        if all(abs(w - q) > tol.cluster_eps for q in distinct):
            distinct.append(w)
    return len(distinct)


def hausdorff_distance(first: List[complex], second: List[complex]) -> float:
    if not first and not second:
        return 0.0
    if not first or not second:
        return math.inf
    forward = max(min(abs(a - b) for b in second) for a in first)
    backward = max(min(abs(a - b) for a in first) for b in second)
    return max(forward, backward)
