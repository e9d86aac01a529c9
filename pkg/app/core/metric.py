"""Triangular ratio metric of the unit disk.

s(z1, z2) = |z1 - z2| / min over |u| = 1 of (|z1 - u| + |z2 - u|); the minimum is
attained at a unimodular root of the reflection quartic.
"""
import cmath
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import List, Optional, Tuple

import numpy as np
import structlog
from scipy import optimize

from app.core.errors import DomainError, NumericalFailure
from app.core.numerics import is_finite
from app.core.reflect import canonical_point, segment_meets_disk, solve_interior
from app.models.schemas import LevelSet, LevelSetPoint, MetricQuery, Tolerances
from app.utils.monitoring import record_skipped_angles

logger = structlog.get_logger()

MIN_ORACLE_GRID = 1000
LEVEL_SET_XTOL = 1e-12
MONOTONE_SLACK = 1e-12


def _require_interior(*points: complex):
    for z in points:
        if not is_finite(z):
            raise DomainError("invalid input")
        if abs(z) >= 1.0:
            raise DomainError("points must lie in the open unit disk")


def s_disk(z1: complex, z2: complex, tol: Tolerances, use_closed_forms: bool = True) -> MetricQuery:
    """Metric value with the boundary point that realises it"""
    z1, z2 = complex(z1), complex(z2)
    _require_interior(z1, z2)

    if use_closed_forms:
        if z1 == z2:
            witness = z1 / abs(z1) if z1 != 0 else 1 + 0j
            return MetricQuery(z1=z1, z2=z2, result=0.0, witness=witness, method="coincident")
        if z1 == 0 or z2 == 0:
            z = z2 if z1 == 0 else z1
            r = abs(z)
            return MetricQuery(z1=z1, z2=z2, result=r / (2.0 - r), witness=z / r, method="closed_form_case1")
        if z1 + z2 == 0:
            direction = z1 / abs(z1)
            return MetricQuery(z1=z1, z2=z2, result=abs(z1), witness=canonical_point([direction, -direction]),
                               method="closed_form_case2")

    solution = solve_interior(z1, z2, tol)
    value = min(1.0, abs(z1 - z2) / solution.path_length)
    return MetricQuery(z1=z1, z2=z2, result=value, witness=solution.u, method="quartic")


def s_disk_oracle(z1: complex, z2: complex, n: int) -> float:
    """Brute-force value: dense circle grid, then golden-section refinement of the best bracket"""
    z1, z2 = complex(z1), complex(z2)
    _require_interior(z1, z2)
    if n < MIN_ORACLE_GRID:
        raise DomainError(f"oracle grid needs at least {MIN_ORACLE_GRID} points")
    if z1 == z2:
        return 0.0

    # angles live in [2pi, 4pi) so the relative golden tolerance maps to an absolute width
    step = 2.0 * math.pi / n
    theta = 2.0 * math.pi + step * np.arange(n)
    circle = np.exp(1j * theta)
    sums = np.abs(z1 - circle) + np.abs(z2 - circle)
    k = int(np.argmin(sums))
    grid_best = float(sums[k])

    def path(t: float) -> float:
        u = cmath.exp(1j * t)
        return abs(z1 - u) + abs(z2 - u)

    middle = float(theta[k])
    try:
        t_best = optimize.golden(path, brack=(middle - step, middle, middle + step),
                                 tol=1e-14 / (2.0 * abs(middle)))
        best = min(path(t_best), grid_best)
    except ValueError:
        # flat bracket: the grid value is already at the minimum
        best = grid_best
    return abs(z1 - z2) / best


def s_blocked_exterior(z1: complex, z2: complex) -> float:
    """Straight-path value 1 for exterior pairs whose segment meets the mirror"""
    z1, z2 = complex(z1), complex(z2)
    if abs(z1) <= 1.0 or abs(z2) <= 1.0 or z1 == z2 or not segment_meets_disk(z1, z2).blocked:
        raise DomainError("straight-path value applies only to exterior pairs whose segment meets the mirror")
    return 1.0


@dataclass(frozen=True)
class BallCurve:
    """Algebraic curve containing the boundary of the ball of radius t about c > 0."""

    c: float
    t: float

    def __post_init__(self):
        if not (0.0 <= self.c < 1.0) or not (0.0 <= self.t < 1.0):
            raise DomainError("ball curve needs 0 <= c < 1 and 0 <= t < 1")


def ball_poly_terms(curve: BallCurve, w: complex) -> Tuple[complex, ...]:
    """The five t-power terms of B_{c,t}(w), highest power first"""
    c, t = curve.c, curve.t
    W = complex(w)
    V = W.conjugate()
    p = W * V
    s = W + V
    sq = W * W + V * V
    cw, cv = c - W, c - V

    g = (V * c - 1.0) * (W * c - 1.0)
    t8 = g * ((c * c + p - 2.0) ** 2 - 4.0 * g) ** 2 * t ** 8

    inner6 = (
        4.0 * p * c ** 8
        - 3.0 * s * c ** 7
        - 2.0 * (2.0 * p * p + 2.0 * p - 1.0) * c ** 6
        - s * (13.0 * p + 2.0) * c ** 5
        - 2.0 * (2.0 * p ** 3 - 36.0 * p * p - 10.0 * W * W - 27.0 * p - 10.0 * V * V - 4.0) * c ** 4
        - s * (13.0 * p * p + 92.0 * p + 32.0) * c ** 3
        + 2.0 * (p * (2.0 * p ** 3 - 2.0 * p * p + 27.0 * p + 48.0) + 2.0 * (5.0 * p + 2.0) * sq) * c ** 2
        - p * s * (3.0 * p * p + 2.0 * p + 32.0) * c
        + 2.0 * p * p * (p + 4.0)
    )
    t6 = -cw * cv * inner6 * t ** 6

    inner4 = (
        6.0 * p * c ** 6
        - 3.0 * s * c ** 5
        + (4.0 * p * p + 16.0 * p + 1.0) * c ** 4
        - 2.0 * s * (13.0 * p + 5.0) * c ** 3
        + (6.0 * p ** 3 + 16.0 * p * p + W * W + 52.0 * p + V * V) * c ** 2
        - p * s * (3.0 * p + 10.0) * c
        + p * p
    )
    t4 = cw ** 2 * cv ** 2 * inner4 * t ** 4

    t2 = -c * cw ** 3 * cv ** 3 * (4.0 * p * c * (c * c + p + 3.0) - (c * c + p) * s) * t ** 2

    t0 = c * c * p * cw ** 4 * cv ** 4
    return (t8, t6, t4, t2, t0)


def ball_poly_scale(curve: BallCurve, w: complex) -> float:
    """Local term scale: sum of the moduli of the t-power terms"""
    return sum(abs(term) for term in ball_poly_terms(curve, w))


def ball_poly_eval(curve: BallCurve, w: complex) -> float:
    """Real value of B_{c,t}(w)"""
    terms = ball_poly_terms(curve, w)
    value = sum(terms)
    scale = sum(abs(term) for term in terms)
    if abs(value.imag) > 1e-9 * (1.0 + scale):
        raise NumericalFailure(f"ball polynomial not real at w={w}: imaginary part {value.imag:.3e}")
    return value.real


def ball_poly_eval_at(center: complex, t: float, w: complex) -> float:
    """B for an arbitrary center, rotating the center onto the positive real axis"""
    center, w = complex(center), complex(w)
    if center == 0:
        return ball_poly_eval(BallCurve(0.0, t), w)
    rotation = cmath.exp(-1j * cmath.phase(center))
    return ball_poly_eval(BallCurve(abs(center), t), w * rotation)


def _ray_limit(c: float, theta: float) -> float:
    """Distance from c to the unit circle along direction theta"""
    b = c * math.cos(theta)
    return -b + math.sqrt(b * b + 1.0 - c * c)


def check_radial_monotonicity(c: float, theta: float, samples: int, tol: Tolerances) -> List[float]:
    """Radii along the ray at which s(c, .) decreases by more than the slack"""
    limit = _ray_limit(c, theta) * (1.0 - 1e-12)
    direction = cmath.exp(1j * theta)
    violations: List[float] = []
    previous = 0.0
    for k in range(1, samples + 1):
        rho = limit * k / samples
        value = s_disk(c, c + rho * direction, tol).result
        if value < previous - MONOTONE_SLACK:
            violations.append(rho)
        previous = max(previous, value)
    return violations


def _trace_ray(c: float, t: float, theta: float, tol: Tolerances) -> Optional[LevelSetPoint]:
    direction = cmath.exp(1j * theta)
    limit = _ray_limit(c, theta) * (1.0 - 1e-12)

    def gap(rho: float) -> float:
        return s_disk(c, c + rho * direction, tol).result - t

    if gap(limit) < 0.0:
        return None
    rho = optimize.bisect(gap, 0.0, limit, xtol=LEVEL_SET_XTOL)
    w = c + rho * direction
    curve = BallCurve(c, t)
    scale = ball_poly_scale(curve, w)
    b_residual = abs(ball_poly_eval(curve, w)) / scale if scale > 0 else 0.0
    return LevelSetPoint(theta=theta, w=w, s_residual=gap(rho), b_residual=b_residual)


def level_set(c: float, t: float, n_angles: int, tol: Tolerances, workers: int = 1,
              check_monotonic: bool = False, monotonic_samples: int = 32) -> LevelSet:
    """Trace {w : s(c, w) = t} by radial bisection from c"""
    c, t = float(c), float(t)
    if not (0.0 <= c < 1.0):
        raise DomainError("level set center must satisfy 0 <= c < 1")
    if not (0.0 < t < 1.0):
        raise DomainError("level must satisfy 0 < t < 1")
    if n_angles < 8:
        raise DomainError("level set needs at least 8 angles")

    angles = [2.0 * math.pi * k / n_angles for k in range(n_angles)]
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            traced = list(pool.map(lambda th: _trace_ray(c, t, th, tol), angles))
    else:
        traced = [_trace_ray(c, t, th, tol) for th in angles]

    points = [p for p in traced if p is not None]
    skipped = len(traced) - len(points)
    if skipped:
        record_skipped_angles(skipped)
        logger.warning("Level set angles skipped", c=c, t=t, skipped=skipped)

    violations = 0
    if check_monotonic:
        for theta in angles:
            if check_radial_monotonicity(c, theta, monotonic_samples, tol):
                violations += 1
        if violations:
            logger.warning("Radial monotonicity violated", c=c, t=t, rays=violations)

    return LevelSet(c=c, t=t, n_angles=n_angles, points=points, skipped=skipped,
                    monotonicity_violations=violations)
