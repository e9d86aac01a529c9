"""Polynomial root finding for degree <= 4 with multiplicity clustering.

Every solve is a pure function of its inputs: fixed starting points, fixed
iteration caps and no randomness, so identical inputs give identical bits.
"""
import cmath
import math
import sys
from dataclasses import dataclass
from typing import Iterable, List, Optional, Sequence, Tuple

import structlog

from app.core.errors import DomainError
from app.models.schemas import Root, RootSet, Tolerances
from app.utils.monitoring import record_polynomial_solve, record_residual_warning

logger = structlog.get_logger()

MAX_DEGREE = 4
ABERTH_MAX_ITER = 200
NEWTON_POLISH_STEPS = 3
START_ANGLE_OFFSET = 0.4
MACHINE_EPS = sys.float_info.epsilon


def is_finite(z: complex) -> bool:
    return math.isfinite(z.real) and math.isfinite(z.imag)


@dataclass(frozen=True)
class Polynomial:
    """Complex polynomial, coefficients ordered from degree 0 upward."""

    coeffs: Tuple[complex, ...]

    @classmethod
    def from_coeffs(cls, coeffs: Iterable) -> "Polynomial":
        values = tuple(complex(c) for c in coeffs)
        if not values:
            values = (0j,)
        return cls(values)

    @classmethod
    def from_roots(cls, roots: Sequence[complex], leading: complex = 1.0) -> "Polynomial":
        """Expand leading * prod(u - r)"""
        coeffs: List[complex] = [complex(leading)]
        for r in roots:
            shifted = [0j] + coeffs
            for k in range(len(coeffs)):
                shifted[k] -= r * coeffs[k]
            coeffs = shifted
        return cls(tuple(coeffs))

    @property
    def scale(self) -> float:
        return max(abs(c) for c in self.coeffs)

    def is_finite(self) -> bool:
        return all(is_finite(c) for c in self.coeffs)

    def effective_degree(self, degeneracy_eps: float = 1e-14) -> int:
        scale = self.scale
        if scale == 0.0:
            return 0
        for k in range(len(self.coeffs) - 1, -1, -1):
            if abs(self.coeffs[k]) > degeneracy_eps * scale:
                return k
        return 0

    def trimmed(self, degeneracy_eps: float = 1e-14) -> "Polynomial":
        return Polynomial(self.coeffs[:self.effective_degree(degeneracy_eps) + 1])

    def __call__(self, x: complex) -> complex:
        return horner(self.coeffs, x)

    def derivative(self, order: int = 1) -> "Polynomial":
        coeffs = list(self.coeffs)
        for _ in range(order):
            coeffs = [k * coeffs[k] for k in range(1, len(coeffs))] or [0j]
        return Polynomial(tuple(coeffs))

    def term_scale(self, x: complex) -> float:
        """Sum of |c_k| |x|^k, the natural size of a residual at x"""
        ax = abs(x)
        total = 0.0
        power = 1.0
        for c in self.coeffs:
            total += abs(c) * power
            power *= ax
        return total


def horner(coeffs: Sequence[complex], x: complex) -> complex:
    acc = 0j
    for c in reversed(coeffs):
        acc = acc * x + c
    return acc


def horner_with_derivative(coeffs: Sequence[complex], x: complex) -> Tuple[complex, complex]:
    p = 0j
    dp = 0j
    for c in reversed(coeffs):
        dp = dp * x + p
        p = p * x + c
    return p, dp


def solve_quadratic(c0: complex, c1: complex, c2: complex) -> Tuple[complex, complex]:
    """Roots of c2 u^2 + c1 u + c0 without cancellation between b and the root of the discriminant"""
    disc = cmath.sqrt(c1 * c1 - 4.0 * c2 * c0)
    if (c1.conjugate() * disc).real < 0.0:
        disc = -disc
    q = -0.5 * (c1 + disc)
    if q == 0:
        return 0j, 0j
    return q / c2, c0 / q


def aberth_roots(coeffs: Sequence[complex], max_iter: int = ABERTH_MAX_ITER) -> Tuple[List[complex], int]:
    """Simultaneous Aberth/Ehrlich iteration from a fixed circle of starting points.

    Returns the approximations and the number of sweeps used.
    """
    n = len(coeffs) - 1
    lead = coeffs[-1]
    monic = [c / lead for c in coeffs]
    radius = 1.0 + max(abs(c) for c in monic[:-1])
    z = [radius * cmath.exp(1j * (2.0 * math.pi * k / n + START_ANGLE_OFFSET)) for k in range(n)]

    sweeps = 0
    for sweeps in range(1, max_iter + 1):
        converged = True
        updated = list(z)
        for i in range(n):
            p, dp = horner_with_derivative(monic, z[i])
            if p == 0:
                continue
            repulsion = 0j
            for j in range(n):
                if j != i and z[i] != z[j]:
                    repulsion += 1.0 / (z[i] - z[j])
            denom = dp - p * repulsion
            if denom == 0:
                step = 1e-8 * (1.0 + abs(z[i]))
            else:
                step = p / denom
            updated[i] = z[i] - step
            if abs(step) > 4.0 * MACHINE_EPS * (1.0 + abs(z[i])):
                converged = False
        z = updated
        if converged:
            break
    return z, sweeps


def newton_polish(coeffs: Sequence[complex], x: complex, steps: int = NEWTON_POLISH_STEPS) -> complex:
    """Newton steps, each accepted only if it lowers |p|"""
    p, dp = horner_with_derivative(coeffs, x)
    for _ in range(steps):
        if p == 0 or dp == 0:
            break
        candidate = x - p / dp
        p_new, dp_new = horner_with_derivative(coeffs, candidate)
        if abs(p_new) >= abs(p):
            break
        x, p, dp = candidate, p_new, dp_new
    return x


def _is_unimodular(value: complex, tol: Tolerances) -> bool:
    return abs(abs(value) - 1.0) <= tol.unimodular_eps


def _sort_key(root: Root) -> Tuple[float, float]:
    return (cmath.phase(root.value), abs(root.value))


def cluster_roots(raw: Sequence[complex], tol: Tolerances, poly: Optional[Polynomial] = None) -> RootSet:
    """Single-linkage merge of approximations lying within cluster_eps of one another.

    A merged cluster of size m is replaced by its centroid, re-polished by Newton on
    the (m-1)-th derivative (where the root is simple) when the polynomial is supplied.
    """
    if not raw:
        raise DomainError("empty root list")
    points = [complex(x) for x in raw]
    groups = _single_linkage(points, tol.cluster_eps)

    roots: List[Root] = []
    for members in groups:
        multiplicity = len(members)
        value = sum(points[k] for k in members) / multiplicity
        if poly is not None and multiplicity > 1:
            value = polish_multiple(poly, value, multiplicity)
        roots.append(Root(value=value, multiplicity=multiplicity, unimodular=_is_unimodular(value, tol)))
    return RootSet(roots=sorted(roots, key=_sort_key))


def _single_linkage(points: Sequence[complex], radius: float) -> List[List[int]]:
    parent = list(range(len(points)))

    def find(k: int) -> int:
        while parent[k] != k:
            parent[k] = parent[parent[k]]
            k = parent[k]
        return k

    for i in range(len(points)):
        for j in range(i + 1, len(points)):
            if abs(points[i] - points[j]) <= radius:
                ri, rj = find(i), find(j)
                if ri != rj:
                    parent[max(ri, rj)] = min(ri, rj)

    groups = {}
    for k in range(len(points)):
        groups.setdefault(find(k), []).append(k)
    return [groups[key] for key in sorted(groups)]


def certify_multiplicity(roots: RootSet, p: Polynomial, tol: Tolerances) -> RootSet:
    """Merge groups of total multiplicity >= 3 that are certified by derivative residuals.

    A root of multiplicity m is perturbed by O(eps^(1/m)), so a genuine triple root
    comes back as three points about 1e-5 apart. Such a group is merged when P and its
    first m-1 derivatives all nearly vanish at the weighted centroid.
    """
    entries = roots.roots
    if len(entries) < 2:
        return roots
    values = [r.value for r in entries]
    groups = _single_linkage(values, tol.multiplicity_eps)

    merged: List[Root] = []
    changed = False
    for members in groups:
        multiplicity = sum(entries[k].multiplicity for k in members)
        if len(members) == 1 or multiplicity < 3:
            merged.extend(entries[k] for k in members)
            continue
        centroid = sum(entries[k].value * entries[k].multiplicity for k in members) / multiplicity
        if _derivatives_vanish(p, centroid, multiplicity, tol.certify_eps):
            centroid = polish_multiple(p, centroid, multiplicity)
            merged.append(Root(value=centroid, multiplicity=multiplicity, unimodular=_is_unimodular(centroid, tol)))
            changed = True
            logger.debug("Certified multiple root", value=str(centroid), multiplicity=multiplicity)
        else:
            merged.extend(entries[k] for k in members)
    if not changed:
        return roots
    return RootSet(roots=sorted(merged, key=_sort_key))


def _derivatives_vanish(p: Polynomial, x: complex, multiplicity: int, certify_eps: float) -> bool:
    current = p
    for _ in range(multiplicity):
        scale = current.term_scale(x)
        if scale > 0 and abs(current(x)) > certify_eps * scale:
            return False
        current = current.derivative()
    return True


def relative_residual(p: Polynomial, x: complex, order: int = 0) -> float:
    """|P^(order)(x)| relative to the term scale of that derivative at x"""
    q = p.derivative(order) if order else p
    scale = q.term_scale(x)
    if scale == 0:
        return 0.0
    return abs(q(x)) / scale


def solve_polynomial(p: Polynomial, tol: Tolerances) -> RootSet:
    """All roots of a polynomial of effective degree 1..4, with multiplicity"""
    if not p.is_finite():
        raise DomainError("invalid input")
    degree = p.effective_degree(tol.degeneracy_eps)
    if degree == 0:
        raise DomainError("constant polynomial")
    if degree > MAX_DEGREE:
        raise DomainError(f"degree {degree} exceeds the supported maximum of {MAX_DEGREE}")

    trimmed = Polynomial(p.coeffs[:degree + 1])
    cutoff = tol.degeneracy_eps * trimmed.scale

    # low-order coefficients below the cutoff contribute exact zero roots
    zeros = 0
    while zeros < degree and abs(trimmed.coeffs[zeros]) <= cutoff:
        zeros += 1
    reduced = list(trimmed.coeffs[zeros:])
    raw: List[complex] = [0j] * zeros

    iterations = 0
    remaining = len(reduced) - 1
    if remaining == 1:
        raw.append(-reduced[0] / reduced[1])
    elif remaining == 2:
        r1, r2 = solve_quadratic(reduced[0], reduced[1], reduced[2])
        raw.extend(newton_polish(reduced, r) for r in (r1, r2))
    elif remaining >= 3:
        approx, iterations = aberth_roots(reduced)
        raw.extend(newton_polish(reduced, r) for r in approx)

    record_polynomial_solve(degree, iterations)
    result = cluster_roots(raw, tol, poly=trimmed)
    result = certify_multiplicity(result, trimmed, tol)
    _check_residuals(trimmed, result, tol)
    return result


def _check_residuals(p: Polynomial, roots: RootSet, tol: Tolerances):
    degree = len(p.coeffs) - 1
    for root in roots.roots:
        bound = tol.root_eps * p.scale * max(1.0, abs(root.value)) ** degree
        if abs(p(root.value)) > bound:
            record_residual_warning()
            logger.warning("Root residual above target", value=str(root.value),
                           residual=abs(p(root.value)), bound=bound)


def polish_multiple(p: Polynomial, x: complex, multiplicity: int) -> complex:
    """Polish an m-fold root as a simple root of P^(m-1)"""
    if multiplicity <= 1:
        return newton_polish(p.coeffs, x)
    return newton_polish(p.derivative(multiplicity - 1).coeffs, x, steps=2 * NEWTON_POLISH_STEPS)
