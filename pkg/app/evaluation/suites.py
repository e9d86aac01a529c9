"""Invariant sweeps behind ``selftest``.

Each suite draws from its own numpy SeedSequence child so results do not depend on
which suites run or in what order; the large sweeps are split into shards, each
with a spawned seed, and evaluated on a thread pool.
"""
import cmath
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
import structlog

from app.core.classify import (
    off_circle_pairing_error,
    profile_roots,
    sample_pairs,
    sample_points,
    triple_root_locus,
)
from app.core.conic import (
    anchor_points,
    build_conic,
    circumcenter,
    conic_circle_intersections,
    conic_residual,
    g_function,
    hausdorff_distance,
    orthocenter,
    orthocenter_origin_triangle,
)
from app.core.errors import AlhazenError
from app.core.metric import (
    BallCurve,
    ball_poly_eval,
    ball_poly_scale,
    check_radial_monotonicity,
    level_set,
    s_disk,
    s_disk_oracle,
)
from app.core.numerics import Polynomial, aberth_roots, newton_polish, relative_residual, solve_polynomial, solve_quadratic
from app.core.reflect import (
    build_quartic,
    check_reflection,
    classify_problem,
    focal_sum,
    reflection_residuals,
    solve_exterior,
    solve_interior,
)
from app.models.schemas import (
    Prediction,
    ProblemKind,
    ReflectionCheck,
    RootPattern,
    SelftestReport,
    SuiteResult,
    Tolerances,
)
from app.services.svg_renderer import render_level_sets_svg, render_reflection_svg
from app.utils.monitoring import record_suite_metrics

logger = structlog.get_logger()

MAX_DETAILS = 10
SHARD_SIZE = 5000
FIGURE_CENTER = 0.3
FIGURE_LEVELS = (0.1, 0.2, 0.3, 0.4, 0.6)
GAP = 1e-3


@dataclass
class Tally:
    checked: int = 0
    failures: int = 0
    details: List[str] = field(default_factory=list)

    def check(self, ok: bool, message: str = ""):
        self.checked += 1
        if not ok:
            self.fail(message)

    def fail(self, message: str):
        self.failures += 1
        if len(self.details) < MAX_DETAILS:
            self.details.append(message)

    def merge(self, other: "Tally"):
        self.checked += other.checked
        self.failures += other.failures
        room = MAX_DETAILS - len(self.details)
        self.details.extend(other.details[:max(0, room)])


@dataclass
class SuiteContext:
    seed_sequence: np.random.SeedSequence
    tol: Tolerances
    quick: bool
    workers: int
    oracle_grid: int

    def rng(self) -> np.random.Generator:
        return np.random.default_rng(self.seed_sequence)

    def size(self, full: int) -> int:
        return max(1, full // 10) if self.quick else full


def run_sharded(ctx: SuiteContext, total: int, shard: Callable[[np.random.Generator, int], Tally]) -> Tally:
    """Split a sweep into shards with spawned seeds; the merged tally is order-independent"""
    count = max(1, math.ceil(total / SHARD_SIZE))
    sizes = [total // count + (1 if k < total % count else 0) for k in range(count)]
    children = ctx.seed_sequence.spawn(count)
    jobs = [(np.random.default_rng(child), n) for child, n in zip(children, sizes)]
    with ThreadPoolExecutor(max_workers=max(1, ctx.workers)) as pool:
        parts = list(pool.map(lambda job: shard(*job), jobs))
    tally = Tally()
    for part in parts:
        tally.merge(part)
    return tally


def _fmt(*points: complex) -> str:
    return ", ".join(f"{z.real:.6g}{z.imag:+.6g}i" for z in points)


def _interior_pair(rng: np.random.Generator) -> Tuple[complex, complex]:
    z1, z2 = sample_points(rng, 2, radius=1.0, gap=GAP)
    return z1, z2


def _exterior_pair(rng: np.random.Generator) -> Tuple[complex, complex]:
    while True:
        z1, z2 = sample_points(rng, 2, radius=2.0, gap=GAP, inner=1.0 + GAP / 2.0)
        if classify_problem(z1, z2) == ProblemKind.EXTERIOR:
            return z1, z2


def suite_closed_forms(ctx: SuiteContext) -> Tally:
    """Origin and antipodal pairs through the quartic against their formulas"""
    tally = Tally()
    rng = ctx.rng()
    for z in sample_points(rng, ctx.size(1000), radius=1.0, gap=GAP):
        r = abs(z)
        origin = s_disk(0j, z, ctx.tol, use_closed_forms=False).result
        tally.check(abs(origin - r / (2.0 - r)) <= 1e-12, f"s(0, z) off for z={_fmt(z)}: {origin!r}")
        antipodal = s_disk(z, -z, ctx.tol, use_closed_forms=False).result
        tally.check(abs(antipodal - r) <= 1e-12, f"s(z, -z) off for z={_fmt(z)}: {antipodal!r}")
    return tally


def suite_oracle_equivalence(ctx: SuiteContext) -> Tally:
    tally = Tally()
    rng = ctx.rng()
    for _ in range(ctx.size(500)):
        z1, z2 = _interior_pair(rng)
        value = s_disk(z1, z2, ctx.tol).result
        oracle = s_disk_oracle(z1, z2, ctx.oracle_grid)
        tally.check(abs(value - oracle) <= 1e-8, f"oracle gap {abs(value - oracle):.3e} at {_fmt(z1, z2)}")
    return tally


def suite_unimodular_lower_bound(ctx: SuiteContext) -> Tally:
    """At least two unimodular roots, and an even number of them"""
    def shard(rng: np.random.Generator, n: int) -> Tally:
        tally = Tally()
        for z1, z2 in sample_pairs(rng, n):
            count = solve_polynomial(build_quartic(z1, z2).poly, ctx.tol).count_unimodular
            tally.check(count >= 2 and count % 2 == 0, f"{count} unimodular roots at {_fmt(z1, z2)}")
        return tally

    return run_sharded(ctx, ctx.size(10_000), shard)


def _reflection_ok(z1: complex, z2: complex, u: complex, tol: Tolerances) -> bool:
    identity, _, _ = reflection_residuals(z1, z2, u)
    return identity <= 1e-9 and check_reflection(z1, z2, u, tol) == ReflectionCheck.EQUAL


def suite_reflection_law(ctx: SuiteContext) -> Tally:
    tally = Tally()
    rng = ctx.rng()
    for _ in range(ctx.size(10_000)):
        z1, z2 = _interior_pair(rng)
        solution = solve_interior(z1, z2, ctx.tol)
        tally.check(_reflection_ok(z1, z2, solution.u, ctx.tol), f"interior reflection fails at {_fmt(z1, z2)}")
        tally.check(abs(solution.ellipse_radius - solution.path_length) <= 1e-9,
                    f"ellipse radius {solution.ellipse_radius!r} != path {solution.path_length!r} at {_fmt(z1, z2)}")
    for _ in range(ctx.size(1000)):
        z1, z2 = _exterior_pair(rng)
        solution = solve_exterior(z1, z2, ctx.tol)
        tally.check(_reflection_ok(z1, z2, solution.u, ctx.tol), f"exterior reflection fails at {_fmt(z1, z2)}")
    return tally


def suite_exterior_four_roots(ctx: SuiteContext) -> Tally:
    """Four distinct unimodular roots, matched by four conic-circle intersections"""
    tally = Tally()
    rng = ctx.rng()
    for _ in range(ctx.size(1000)):
        z1, z2 = _exterior_pair(rng)
        roots = solve_polynomial(build_quartic(z1, z2).poly, ctx.tol)
        unimodular = [r.value for r in roots.unimodular_roots if r.multiplicity == 1]
        tally.check(len(unimodular) == 4, f"{len(unimodular)} simple unimodular roots at {_fmt(z1, z2)}")
        points = conic_circle_intersections(z1, z2, ctx.tol)
        tally.check(len(points) == 4, f"{len(points)} conic intersections at {_fmt(z1, z2)}")
        gap = hausdorff_distance(points, unimodular)
        tally.check(gap <= 1e-9, f"conic and quartic differ by {gap:.3e} at {_fmt(z1, z2)}")
    return tally


def _regime_pairs(rng: np.random.Generator, n: int, wanted: Prediction) -> List[Tuple[complex, complex]]:
    pairs: List[Tuple[complex, complex]] = []
    while len(pairs) < n:
        for z1, z2 in sample_pairs(rng, 256):
            if abs(z1 * z2) > 0 and _prediction(z1, z2) == wanted:
                pairs.append((z1, z2))
    return pairs[:n]


def _prediction(z1: complex, z2: complex) -> Prediction:
    total, product = abs(z1 + z2), abs(z1 * z2)
    if total < product:
        return Prediction.FOUR
    if total > 2.0 * product:
        return Prediction.TWO
    return Prediction.INDETERMINATE


def _necessary_bounds(tally: Tally, profile):
    ratio = profile.ratio_lo
    if ratio is None:
        return
    if profile.pattern == RootPattern.FOUR_SIMPLE:
        tally.check(ratio < 2.0 + 1e-9, f"four simple roots with ratio {ratio!r} at {_fmt(profile.z1, profile.z2)}")
    if profile.pattern == RootPattern.TWO_SIMPLE_TWO_OFF:
        tally.check(ratio > 1.0 - 1e-9, f"two simple roots with ratio {ratio!r} at {_fmt(profile.z1, profile.z2)}")
    if profile.pattern == RootPattern.DOUBLE_PLUS_TWO_SIMPLE:
        tally.check(1.0 - 1e-9 <= ratio <= 2.0 + 1e-9,
                    f"double root with ratio {ratio!r} at {_fmt(profile.z1, profile.z2)}")


def suite_count_regimes(ctx: SuiteContext) -> Tally:
    """Predicted counts in both decided regimes, plus the necessary bounds on every profile"""
    tally = Tally()
    rng = ctx.rng()
    for wanted in (Prediction.FOUR, Prediction.TWO):
        for z1, z2 in _regime_pairs(rng, ctx.size(10_000), wanted):
            profile = profile_roots(z1, z2, ctx.tol)
            tally.check(profile.consistent,
                        f"predicted {wanted.value}, observed {profile.count_unimodular} at {_fmt(z1, z2)}")
            _necessary_bounds(tally, profile)
    return tally


def suite_multiplicity_exclusions(ctx: SuiteContext) -> Tally:
    """No excluded multiplicity patterns; off-circle roots pair up under inversion"""
    def shard(rng: np.random.Generator, n: int) -> Tally:
        tally = Tally()
        for z1, z2 in sample_pairs(rng, n):
            profile = profile_roots(z1, z2, ctx.tol)
            tally.check(profile.pattern != RootPattern.DEGENERATE,
                        f"excluded pattern {[(r.multiplicity, r.unimodular) for r in profile.roots.roots]} "
                        f"at {_fmt(z1, z2)}")
            error = off_circle_pairing_error(profile.roots)
            if error is not None:
                tally.check(error <= 1e-9, f"unpaired off-circle root ({error:.3e}) at {_fmt(z1, z2)}")
            _necessary_bounds(tally, profile)
        return tally

    return run_sharded(ctx, ctx.size(100_000), shard)


def _locus_parameters(rng: np.random.Generator, n: int, branch: str) -> List[float]:
    values: List[float] = []
    while len(values) < n:
        if branch == "real":
            t = float(rng.uniform(-0.99, 0.40))
            if abs(t) >= 0.01:
                values.append(t)
        else:
            angle = float(rng.uniform(0.1, 2.0 * math.pi - 0.1))
            if abs(angle - math.pi) >= 0.1:
                values.append(angle)
    return values


def suite_triple_root_locus(ctx: SuiteContext) -> Tally:
    tally = Tally()
    rng = ctx.rng()
    for branch in ("real", "conjugate"):
        for param in _locus_parameters(rng, ctx.size(100), branch):
            z1, z2 = triple_root_locus(param, branch)
            quartic = build_quartic(z1, z2)
            profile = profile_roots(z1, z2, ctx.tol)
            label = f"{branch} branch at {param!r}"
            tally.check(profile.pattern == RootPattern.TRIPLE_PLUS_SIMPLE, f"{label}: pattern {profile.pattern.value}")
            triple = [r.value for r in profile.roots.roots if r.multiplicity == 3]
            simple = [r.value for r in profile.roots.roots if r.multiplicity == 1]
            if triple and simple:
                tally.check(abs(triple[0] - 1.0) <= 1e-6 and abs(simple[0] + 1.0) <= 1e-9,
                            f"{label}: roots {_fmt(triple[0], simple[0])}")
            worst = max(relative_residual(quartic.poly, 1.0 + 0j, order) for order in range(3))
            tally.check(worst <= ctx.tol.certify_eps, f"{label}: derivative residual {worst:.3e}")
            tally.check(abs(profile.ratio_lo - 2.0) <= 1e-9, f"{label}: ratio {profile.ratio_lo!r}")
    return tally


def suite_off_circle_regression(ctx: SuiteContext) -> Tally:
    tally = Tally()
    for k in range(1, 6):
        z1, z2 = complex(0.5, 0.1 * k), 0.5 + 0j
        roots = solve_polynomial(build_quartic(z1, z2).poly, ctx.tol)
        off = sum(r.multiplicity for r in roots.off_circle_roots)
        tally.check(roots.count_unimodular == 2 and off == 2,
                    f"k={k}: {roots.count_unimodular} unimodular, {off} off-circle")
    return tally


def suite_ball_curve(ctx: SuiteContext) -> Tally:
    """Printed specializations on a grid, then every traced level-set point on the curve"""
    tally = Tally()
    rng = ctx.rng()
    params = np.linspace(0.05, 0.95, 20)
    points = sample_points(rng, 20, radius=1.0, gap=GAP)
    for value in params:
        value = float(value)
        for w in points:
            p = abs(w) ** 2
            at_zero_t = BallCurve(value, 0.0)
            expected = p * value * value * abs(value - w) ** 8
            got = ball_poly_eval(at_zero_t, w)
            tally.check(abs(got - expected) <= 1e-10 * ball_poly_scale(at_zero_t, w),
                        f"B(c={value:.3f}, t=0) at {_fmt(w)}: {got!r} vs {expected!r}")
            at_zero_c = BallCurve(0.0, value)
            t = value
            expected = p * p * t ** 4 * ((t - 1.0) ** 2 * p - 4.0 * t * t) * ((t + 1.0) ** 2 * p - 4.0 * t * t)
            got = ball_poly_eval(at_zero_c, w)
            tally.check(abs(got - expected) <= 1e-10 * ball_poly_scale(at_zero_c, w),
                        f"B(c=0, t={t:.3f}) at {_fmt(w)}: {got!r} vs {expected!r}")

    n_angles = ctx.size(720)
    for t in FIGURE_LEVELS:
        layer = level_set(FIGURE_CENTER, t, max(8, n_angles), ctx.tol, workers=ctx.workers)
        for point in layer.points:
            tally.check(point.b_residual <= 1e-6, f"t={t}: B residual {point.b_residual:.3e} at {_fmt(point.w)}")
        tally.check(layer.skipped == 0, f"t={t}: {layer.skipped} angles skipped")
    return tally


def _triangle(rng: np.random.Generator) -> Tuple[complex, complex, complex]:
    while True:
        a, b, c = sample_points(rng, 3, radius=2.0, gap=0.0)
        size = max(abs(b - a), abs(c - a), abs(c - b))
        if abs(((b - a).conjugate() * (c - a)).imag) > 1e-3 * size * size:
            return a, b, c


def suite_sylvester_orthocenter(ctx: SuiteContext) -> Tally:
    """Orthocenter identity on random triangles; the origin-triangle orthocenter lies on the conic"""
    tally = Tally()
    rng = ctx.rng()
    for _ in range(ctx.size(1000)):
        a, b, c = _triangle(rng)
        size = max(abs(b - a), abs(c - a), abs(c - b))
        h = orthocenter(a, b, c)
        scale = max(1.0, abs(a), abs(b), abs(c), abs(h))
        altitude_ab = ((h - c) * (b - a).conjugate()).real
        altitude_bc = ((h - a) * (c - b).conjugate()).real
        tally.check(abs(altitude_ab) + abs(altitude_bc) <= 1e-10 * scale * size,
                    f"orthocenter off the altitudes for {_fmt(a, b, c)}")
        center = circumcenter(a, b, c)
        radii = [abs(center - v) for v in (a, b, c)]
        tally.check(max(radii) - min(radii) <= 1e-10 * scale, f"circumcenter not equidistant for {_fmt(a, b, c)}")

        z1, z2 = a, b
        if min(abs(z1), abs(z2)) < 0.05 or abs((z1 * z2.conjugate()).imag) <= 1e-3 * abs(z1) * abs(z2):
            continue
        model = build_conic(z1, z2)
        h0 = orthocenter_origin_triangle(z1, z2)
        direct = orthocenter(0j, 1.0 / z1.conjugate(), 1.0 / z2.conjugate())
        tally.check(abs(h0 - direct) <= 1e-10 * max(1.0, abs(direct)), f"orthocenter forms disagree for {_fmt(z1, z2)}")
        worst = max(conic_residual(model, w) for w in anchor_points(z1, z2) + [h0])
        tally.check(worst <= 1e-10, f"conic residual {worst:.3e} for {_fmt(z1, z2)}")
    return tally


def suite_conic_identities(ctx: SuiteContext) -> Tally:
    """Endpoint identity of g, central symmetry and quartic agreement for interior pairs"""
    tally = Tally()
    rng = ctx.rng()
    for _ in range(ctx.size(1000)):
        z1, z2 = _interior_pair(rng)
        if min(abs(z1), abs(z2)) < 0.05:
            continue
        g, alpha, _ = g_function(z1, z2)
        expected = (abs(z1) - abs(z2)) * math.sin(alpha)
        scale = abs(z1) * abs(z2) + abs(z1) + abs(z2)
        tally.check(max(abs(g(math.pi) - expected), abs(g(-math.pi) - expected), abs(g(0.0) + expected))
                    <= 1e-12 * scale, f"g endpoint identity fails at {_fmt(z1, z2)}")

        model = build_conic(z1, z2)
        points = conic_circle_intersections(z1, z2, ctx.tol)
        mirrored = [2.0 * model.center - w for w in points]
        worst = max([conic_residual(model, w) for w in mirrored] or [0.0])
        tally.check(worst <= 1e-9, f"central symmetry residual {worst:.3e} at {_fmt(z1, z2)}")

        roots = solve_polynomial(build_quartic(z1, z2).poly, ctx.tol)
        unimodular = [r.value for r in roots.unimodular_roots]
        if all(r.multiplicity == 1 for r in roots.unimodular_roots):
            gap = hausdorff_distance(points, unimodular)
            tally.check(gap <= 1e-9, f"conic and quartic differ by {gap:.3e} at {_fmt(z1, z2)}")
    return tally


def suite_metric_axioms(ctx: SuiteContext) -> Tally:
    tally = Tally()
    rng = ctx.rng()
    for _ in range(ctx.size(10_000)):
        a, b, c = sample_points(rng, 3, radius=1.0, gap=GAP)
        ab = s_disk(a, b, ctx.tol).result
        ba = s_disk(b, a, ctx.tol).result
        bc = s_disk(b, c, ctx.tol).result
        ac = s_disk(a, c, ctx.tol).result
        tally.check(abs(ab - ba) <= 1e-12, f"asymmetric at {_fmt(a, b)}")
        tally.check(ac <= ab + bc + 1e-12, f"triangle inequality fails at {_fmt(a, b, c)}")
        tally.check(ab > 0.0 and s_disk(a, a, ctx.tol).result == 0.0, f"identity of indiscernibles at {_fmt(a, b)}")
    return tally


def suite_radial_monotonicity(ctx: SuiteContext) -> Tally:
    tally = Tally()
    rng = ctx.rng()
    samples = ctx.size(1000)
    for _ in range(ctx.size(100)):
        c = float(rng.uniform(0.0, 0.95))
        theta = float(rng.uniform(0.0, 2.0 * math.pi))
        violations = check_radial_monotonicity(c, theta, samples, ctx.tol)
        tally.check(not violations, f"s decreases along ray c={c:.6f}, theta={theta:.6f} at radii {violations[:3]}")
    return tally


def _matches_tie_set(z1: complex, z2: complex, w: complex, minimizers: Sequence[complex], path: float) -> bool:
    nearest = min(abs(w - m) for m in minimizers)
    return nearest <= 1e-9 or focal_sum(z1, z2, w) - path <= 1e-12 * (1.0 + path)


def suite_equivariance(ctx: SuiteContext) -> Tally:
    """Rotation, conjugation and swap behaviour of the interior solution"""
    tally = Tally()
    rng = ctx.rng()
    for _ in range(ctx.size(1000)):
        z1, z2 = _interior_pair(rng)
        base = solve_interior(z1, z2, ctx.tol)
        rotation = cmath.exp(1j * float(rng.uniform(0.0, 2.0 * math.pi)))
        rotated = solve_interior(rotation * z1, rotation * z2, ctx.tol)
        tally.check(abs(rotated.path_length - base.path_length) <= 1e-9
                    and _matches_tie_set(rotation * z1, rotation * z2, rotation * base.u,
                                         rotated.all_minimizers, rotated.path_length),
                    f"rotation breaks the solution at {_fmt(z1, z2)}")
        mirrored = solve_interior(z1.conjugate(), z2.conjugate(), ctx.tol)
        tally.check(_matches_tie_set(z1.conjugate(), z2.conjugate(), base.u.conjugate(),
                                     mirrored.all_minimizers, mirrored.path_length),
                    f"conjugation breaks the solution at {_fmt(z1, z2)}")
        swapped = solve_interior(z2, z1, ctx.tol)
        tally.check(abs(swapped.path_length - base.path_length) <= 1e-12, f"swap changes the path at {_fmt(z1, z2)}")
    return tally


def suite_polynomial_reconstruction(ctx: SuiteContext) -> Tally:
    """Roots re-expanded with multiplicity reproduce random quartics; solves are repeatable"""
    tally = Tally()
    rng = ctx.rng()
    for _ in range(ctx.size(1000)):
        parts = rng.uniform(-1.0, 1.0, size=(5, 2))
        poly = Polynomial.from_coeffs(complex(x, y) for x, y in parts)
        roots = solve_polynomial(poly, ctx.tol)
        rebuilt = Polynomial.from_roots(roots.values(), leading=poly.coeffs[-1])
        error = max(abs(a - b) for a, b in zip(poly.coeffs, rebuilt.coeffs)) / poly.scale
        tally.check(error <= 1e-8, f"reconstruction error {error:.3e}")
        tally.check(solve_polynomial(poly, ctx.tol) == roots, "repeated solve differs")
    return tally


def suite_quadratic_paths(ctx: SuiteContext) -> Tally:
    """Closed-form quadratic roots against the simultaneous iteration"""
    tally = Tally()
    rng = ctx.rng()
    for _ in range(ctx.size(1000)):
        parts = rng.uniform(-1.0, 1.0, size=(3, 2))
        c0, c1, c2 = (complex(x, y) for x, y in parts)
        closed = solve_quadratic(c0, c1, c2)
        iterative, _ = aberth_roots([c0, c1, c2])
        iterative = [newton_polish([c0, c1, c2], r) for r in iterative]
        worst = max(min(abs(r - s) for s in iterative) / max(1.0, abs(r)) for r in closed)
        tally.check(worst <= 1e-12, f"quadratic paths differ by {worst:.3e}")
    return tally


FIGURE_PAIRS = (
    (0.5 + 0.5j, -0.8j),
    (0.5 + 0.5j, 0.5 + 0j),
    (0.3 + 0.2j, -0.4 + 0.1j),
)


def suite_svg_determinism(ctx: SuiteContext) -> Tally:
    tally = Tally()
    for z1, z2 in FIGURE_PAIRS:
        first = render_reflection_svg(solve_interior(z1, z2, ctx.tol))
        second = render_reflection_svg(solve_interior(z1, z2, ctx.tol))
        tally.check(first == second, f"reflection diagram differs between runs for {_fmt(z1, z2)}")
    first = render_reflection_svg(solve_exterior(2.0, 2.0j, ctx.tol))
    second = render_reflection_svg(solve_exterior(2.0, 2.0j, ctx.tol))
    tally.check(first == second, "exterior diagram differs between runs")

    n_angles = 72
    layers = [level_set(FIGURE_CENTER, t, n_angles, ctx.tol) for t in FIGURE_LEVELS]
    parallel = [level_set(FIGURE_CENTER, t, n_angles, ctx.tol, workers=max(2, ctx.workers)) for t in FIGURE_LEVELS]
    tally.check(render_level_sets_svg(layers) == render_level_sets_svg(parallel),
                "level-set diagram depends on the worker count")
    return tally


SUITES: Dict[str, Callable[[SuiteContext], Tally]] = {
    "closed_forms": suite_closed_forms,
    "oracle_equivalence": suite_oracle_equivalence,
    "unimodular_lower_bound": suite_unimodular_lower_bound,
    "reflection_law": suite_reflection_law,
    "exterior_four_roots": suite_exterior_four_roots,
    "count_regimes": suite_count_regimes,
    "multiplicity_exclusions": suite_multiplicity_exclusions,
    "triple_root_locus": suite_triple_root_locus,
    "off_circle_regression": suite_off_circle_regression,
    "ball_curve": suite_ball_curve,
    "sylvester_orthocenter": suite_sylvester_orthocenter,
    "conic_identities": suite_conic_identities,
    "metric_axioms": suite_metric_axioms,
    "radial_monotonicity": suite_radial_monotonicity,
    "equivariance": suite_equivariance,
    "polynomial_reconstruction": suite_polynomial_reconstruction,
    "quadratic_paths": suite_quadratic_paths,
    "svg_determinism": suite_svg_determinism,
}


class InvariantHarness:
    """Runs the named suites and collects a report"""

    def __init__(self, tol: Tolerances, seed: int, quick: bool = False, workers: int = 4,
                 oracle_grid: int = 1_000_000):
        self.tol = tol
        self.seed = seed
        self.quick = quick
        self.workers = workers
        self.oracle_grid = oracle_grid

    def _context(self, name: str) -> SuiteContext:
        index = list(SUITES).index(name)
        return SuiteContext(
            seed_sequence=np.random.SeedSequence(self.seed, spawn_key=(index,)),
            tol=self.tol,
            quick=self.quick,
            workers=self.workers,
            oracle_grid=self.oracle_grid,
        )

    def run_suite(self, name: str) -> SuiteResult:
        start = time.perf_counter()
        try:
            tally = SUITES[name](self._context(name))
        except AlhazenError as e:
            # a raised error inside a sweep is itself a failed invariant
            tally = Tally()
            tally.fail(f"{type(e).__name__}: {e.detail}")
        seconds = time.perf_counter() - start
        record_suite_metrics(name, tally.checked, tally.failures)
        result = SuiteResult(name=name, checked=tally.checked, failures=tally.failures,
                             details=tally.details, seconds=seconds)
        log = logger.info if result.passed else logger.warning
        log("Suite finished", suite=name, checked=tally.checked, failures=tally.failures, seconds=round(seconds, 3))
        return result

    def run(self, names: Optional[Sequence[str]] = None) -> SelftestReport:
        selected = list(names) if names else list(SUITES)
        results = [self.run_suite(name) for name in selected]
        return SelftestReport(seed=self.seed, quick=self.quick, suites=results)
