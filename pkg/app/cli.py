"""Command-line surface: reflect, metric, levelset, classify, conic, sharpness, selftest.

Exit codes: 0 success, 1 unexpected failure, 2 domain error, 3 verification
mismatch or numerical failure, 4 parse error.
"""
import argparse
import re
import sys
from typing import Callable, Dict, List, Optional, Sequence

import structlog
from pydantic import ValidationError

from app.core.classify import cohn_test, profile_roots, sharpness_scan
from app.core.config import settings
from app.core.conic import (
    build_conic,
    conic_circle_intersections,
    hausdorff_distance,
    line_pair_intersection_count,
)
from app.core.errors import AlhazenError, DomainError, ParseError, VerificationMismatch
from app.core.metric import level_set, s_blocked_exterior, s_disk, s_disk_oracle
from app.core.numerics import solve_polynomial
from app.core.reflect import (
    build_quartic,
    classify_problem,
    closed_form,
    segment_meets_disk,
    solve_exterior,
    solve_interior,
)
from app.evaluation.suites import SUITES, InvariantHarness
from app.models.schemas import (
    ConicReport,
    MetricQuery,
    OutputFormat,
    ProblemKind,
    RunConfig,
    Tolerances,
)
from app.services.export import (
    format_complex,
    format_real,
    render_csv,
    render_json,
    render_text,
    write_output,
)
from app.services.svg_renderer import render_level_sets_svg, render_reflection_svg
from app.utils.monitoring import configure_logging, record_error_metrics, render_metrics, timed_command

logger = structlog.get_logger()

ORACLE_TOLERANCE = 1e-8
DEFAULT_LEVEL_ANGLES = 360
SVG_COMMANDS = ("reflect", "levelset")

_NUM = r"(?:\d+(?:\.\d*)?|\.\d+)(?:[eE][+-]?\d+)?"
_IMAGINARY = re.compile(rf"^([+-]?)({_NUM})?[ij]$")
_GENERAL = re.compile(rf"^([+-]?{_NUM})(?:([+-])({_NUM})?[ij])?$")


def parse_complex(text: str) -> complex:
    """Parse "a", "a+bi", "a-bi", "bi", "-i" and friends; "j" is accepted for "i"."""
    literal = text.strip().replace(" ", "")
    match = _IMAGINARY.match(literal)
    if match:
        sign, magnitude = match.groups()
        value = float(magnitude) if magnitude else 1.0
        return complex(0.0, -value if sign == "-" else value)
    match = _GENERAL.match(literal)
    if match:
        real, sign, magnitude = match.groups()
        if sign is None:
            return complex(float(real), 0.0)
        imag = float(magnitude) if magnitude else 1.0
        return complex(float(real), -imag if sign == "-" else imag)
    raise ParseError(f"not a complex literal: {text!r}")


def parse_real(text: str) -> float:
    try:
        return float(text.strip())
    except ValueError:
        raise ParseError(f"not a real number: {text!r}")


def parse_real_list(text: str) -> List[float]:
    values = [parse_real(part) for part in text.split(",") if part.strip()]
    if not values:
        raise ParseError(f"empty list: {text!r}")
    return values


def _looks_complex(token: str) -> bool:
    literal = token.strip()
    return bool(_IMAGINARY.match(literal) or _GENERAL.match(literal))


def preprocess_argv(argv: Sequence[str]) -> List[str]:
    """Shield negative literals such as "-0.8i" from option parsing"""
    return [f" {token}" if token.startswith("-") and _looks_complex(token) else token for token in argv]


class ArgumentParser(argparse.ArgumentParser):
    def error(self, message: str):
        raise ParseError(message)


def build_parser() -> argparse.ArgumentParser:
    common = ArgumentParser(add_help=False)
    common.add_argument("--format", choices=[f.value for f in OutputFormat], default=None,
                        help="Output format (default: text, csv for sharpness)")
    common.add_argument("--out", default=None, help="Write output to this file instead of stdout")
    common.add_argument("--tol-unimodular", type=float, default=None, help="Override UNIMODULAR_EPS")

    parser = ArgumentParser(prog="alhazen", description="Reflection in the unit circle and the triangular ratio metric")
    commands = parser.add_subparsers(dest="command", required=True, parser_class=ArgumentParser)

    reflect = commands.add_parser("reflect", parents=[common], help="Reflection points for a pair")
    reflect.add_argument("z1", type=str)
    reflect.add_argument("z2", type=str)
    reflect.add_argument("--kind", choices=["interior", "exterior"], default=None,
                         help="Problem kind (default: inferred from the moduli)")

    metric = commands.add_parser("metric", parents=[common], help="Triangular ratio metric of the unit disk")
    metric.add_argument("z1", type=str)
    metric.add_argument("z2", type=str)
    metric.add_argument("--check", action="store_true", help="Compare with the brute-force oracle")
    metric.add_argument("--n", type=int, default=None, help="Oracle grid size")

    levelset = commands.add_parser("levelset", parents=[common], help="Trace metric balls around a real center")
    levelset.add_argument("c", type=str)
    levelset.add_argument("t", type=str, help="Comma-separated levels")
    levelset.add_argument("--n", type=int, default=DEFAULT_LEVEL_ANGLES, help="Number of ray angles")
    levelset.add_argument("--check", action="store_true", help="Also check radial monotonicity on every ray")

    classify = commands.add_parser("classify", parents=[common], help="Unimodular root profile")
    classify.add_argument("z1", type=str)
    classify.add_argument("z2", type=str)

    conic = commands.add_parser("conic", parents=[common], help="Conic route to the reflection points")
    conic.add_argument("z1", type=str)
    conic.add_argument("z2", type=str)

    sharpness = commands.add_parser("sharpness", parents=[common], help="Ratio scan approaching the bound 2")
    sharpness.add_argument("t", type=str, help="Comma-separated positive parameters")
    sharpness.add_argument("--alpha", type=float, default=0.0)

    selftest = commands.add_parser("selftest", parents=[common], help="Run the invariant suites")
    selftest.add_argument("--seed", type=int, default=settings.default_seed)
    selftest.add_argument("--quick", action="store_true", help="Divide sample sizes by 10")
    selftest.add_argument("--metrics", action="store_true", help="Print prometheus counters to stderr")
    selftest.add_argument("--suite", action="append", choices=list(SUITES), default=None,
                          help="Run only the named suite (repeatable)")
    return parser


def build_run_config(args: argparse.Namespace) -> RunConfig:
    fmt = args.format or (OutputFormat.CSV.value if args.command == "sharpness" else OutputFormat.TEXT.value)
    if fmt == OutputFormat.SVG.value and args.command not in SVG_COMMANDS:
        raise ParseError("svg output is only available for reflect and levelset")
    return RunConfig(
        tolerances=Tolerances.from_settings(unimodular_eps=args.tol_unimodular),
        output_format=OutputFormat(fmt),
        seed=getattr(args, "seed", settings.default_seed),
        output_path=args.out,
        n=getattr(args, "n", None),
        check=getattr(args, "check", False),
        quick=getattr(args, "quick", False),
    )


def _pair(args: argparse.Namespace):
    return parse_complex(args.z1), parse_complex(args.z2)


@timed_command("reflect")
def cmd_reflect(args: argparse.Namespace, config: RunConfig) -> int:
    z1, z2 = _pair(args)
    kind = ProblemKind(args.kind) if args.kind else classify_problem(z1, z2)
    if kind == ProblemKind.INTERIOR:
        solution = solve_interior(z1, z2, config.tolerances)
    elif kind == ProblemKind.EXTERIOR:
        solution = solve_exterior(z1, z2, config.tolerances)
    elif kind == ProblemKind.EXTERIOR_BLOCKED:
        raise DomainError("segment crosses mirror: direct path exists")
    else:
        raise DomainError("points must lie both inside or both outside the unit circle")
    logger.info("Reflection computed", kind=solution.kind.value, u=str(solution.u))

    fmt = config.output_format
    if fmt == OutputFormat.SVG:
        text = render_reflection_svg(solution)
    elif fmt == OutputFormat.JSON:
        text = render_json("reflect", {"solution": solution, "closed_form": closed_form(z1, z2)})
    elif fmt == OutputFormat.CSV:
        minimizers = solution.all_minimizers
        rows = []
        for root in solution.roots.roots:
            on_circle = root.value / abs(root.value) if root.unimodular else None
            is_min = on_circle is not None and any(abs(on_circle - m) <= 1e-12 for m in minimizers)
            focal = abs(z1 - root.value) + abs(z2 - root.value)
            rows.append([root.value.real, root.value.imag, root.multiplicity, root.unimodular, focal, is_min])
        text = render_csv(["re", "im", "multiplicity", "unimodular", "focal_sum", "minimizer"], rows)
    else:
        lines = [
            f"kind: {solution.kind.value}",
            f"u: {format_complex(solution.u)}",
            f"path_length: {format_real(solution.path_length)}",
            f"ellipse_radius: {format_real(solution.ellipse_radius)}",
        ]
        if solution.metric_value is not None:
            lines.append(f"s: {format_real(solution.metric_value)}")
        lines.append("roots:")
        for root in solution.roots.roots:
            flag = "unimodular" if root.unimodular else "off-circle"
            lines.append(f"  {format_complex(root.value)}  x{root.multiplicity}  {flag}")
        lines.append("minimizers: " + ", ".join(format_complex(m) for m in solution.all_minimizers))
        if solution.count_mismatch:
            lines.append("warning: expected four distinct unimodular roots")
        text = render_text(lines)
    write_output(text, config.output_path)
    return 0


@timed_command("metric")
def cmd_metric(args: argparse.Namespace, config: RunConfig) -> int:
    z1, z2 = _pair(args)
    if classify_problem(z1, z2) == ProblemKind.EXTERIOR_BLOCKED:
        query = MetricQuery(z1=z1, z2=z2, result=s_blocked_exterior(z1, z2),
                            witness=segment_meets_disk(z1, z2).closest_point, method="straight_path")
    else:
        query = s_disk(z1, z2, config.tolerances)

    mismatch = None
    if config.check and query.method != "straight_path":
        oracle = s_disk_oracle(z1, z2, config.n or settings.oracle_grid_size)
        query = query.model_copy(update={"oracle": oracle})
        if abs(oracle - query.result) > ORACLE_TOLERANCE:
            mismatch = abs(oracle - query.result)

    fmt = config.output_format
    if fmt == OutputFormat.JSON:
        text = render_json("metric", {"query": query})
    elif fmt == OutputFormat.CSV:
        text = render_csv(
            ["z1_re", "z1_im", "z2_re", "z2_im", "s", "witness_re", "witness_im", "method", "oracle"],
            [[z1.real, z1.imag, z2.real, z2.imag, query.result, query.witness.real, query.witness.imag,
              query.method, "" if query.oracle is None else query.oracle]],
        )
    else:
        lines = [format_real(query.result), f"witness: {format_complex(query.witness)}", f"method: {query.method}"]
        if query.oracle is not None:
            lines.append(f"oracle: {format_real(query.oracle)}")
        text = render_text(lines)
    write_output(text, config.output_path)

    if mismatch is not None:
        raise VerificationMismatch(f"oracle disagrees with the quartic value by {mismatch:.3e}")
    return 0


@timed_command("levelset")
def cmd_levelset(args: argparse.Namespace, config: RunConfig) -> int:
    c = parse_real(args.c)
    levels = parse_real_list(args.t)
    n_angles = config.n or DEFAULT_LEVEL_ANGLES
    layers = [
        level_set(c, t, n_angles, config.tolerances, workers=settings.level_set_workers,
                  check_monotonic=config.check)
        for t in levels
    ]

    fmt = config.output_format
    if fmt == OutputFormat.SVG:
        text = render_level_sets_svg(layers)
    elif fmt == OutputFormat.JSON:
        text = render_json("levelset", {"c": c, "layers": layers})
    elif fmt == OutputFormat.CSV:
        header = ["theta", "re", "im", "s_residual", "B_residual"]
        text = "".join(
            render_csv(header, ([p.theta, p.w.real, p.w.imag, p.s_residual, p.b_residual] for p in layer.points),
                       comment=f"t={layer.t!r}")
            for layer in layers
        )
    else:
        lines = []
        for layer in layers:
            worst = max((p.b_residual for p in layer.points), default=0.0)
            lines.append(f"t={layer.t!r} points={len(layer.points)} skipped={layer.skipped} "
                         f"max_B_residual={worst:.3e} monotonicity_violations={layer.monotonicity_violations}")
        text = render_text(lines)
    write_output(text, config.output_path)
    return 0


@timed_command("classify")
def cmd_classify(args: argparse.Namespace, config: RunConfig) -> int:
    z1, z2 = _pair(args)
    profile = profile_roots(z1, z2, config.tolerances)
    try:
        cohn = cohn_test(build_quartic(z1, z2), config.tolerances)
    except DomainError:
        cohn = None

    fmt = config.output_format
    if fmt == OutputFormat.JSON:
        text = render_json("classify", {"profile": profile, "cohn": cohn})
    elif fmt == OutputFormat.CSV:
        text = render_csv(
            ["count_unimodular", "pattern", "ratio_lo", "prediction", "consistent", "cohn"],
            [[profile.count_unimodular, profile.pattern, "" if profile.ratio_lo is None else profile.ratio_lo,
              profile.prediction, profile.consistent, "" if cohn is None else cohn]],
        )
    else:
        ratio = "undefined" if profile.ratio_lo is None else format_real(profile.ratio_lo)
        lines = [
            f"count_unimodular: {profile.count_unimodular}",
            f"pattern: {profile.pattern.value}",
            f"ratio_lo: {ratio}",
            f"prediction: {profile.prediction.value}",
            f"consistent: {str(profile.consistent).lower()}",
            f"cohn: {'n/a' if cohn is None else str(cohn).lower()}",
        ]
        text = render_text(lines)
    write_output(text, config.output_path)
    return 0


@timed_command("conic")
def cmd_conic(args: argparse.Namespace, config: RunConfig) -> int:
    z1, z2 = _pair(args)
    model = build_conic(z1, z2)
    intersections = conic_circle_intersections(z1, z2, config.tolerances)
    roots = solve_polynomial(build_quartic(z1, z2).poly, config.tolerances)
    unimodular = [r.value for r in roots.unimodular_roots]
    report = ConicReport(
        conic=model,
        intersections=intersections,
        quartic_unimodular=unimodular,
        hausdorff_distance=hausdorff_distance(intersections, unimodular),
        predicted_count=line_pair_intersection_count(z1, z2, config.tolerances),
        note="odd count: one contact is tangential" if len(intersections) == 3 else None,
    )

    fmt = config.output_format
    if fmt == OutputFormat.JSON:
        text = render_json("conic", {"report": report})
    elif fmt == OutputFormat.CSV:
        text = render_csv(["re", "im"], ([w.real, w.imag] for w in intersections))
    else:
        lines = [
            f"kind: {model.kind.value}",
            f"center: {format_complex(model.center)}",
            f"ill_conditioned: {str(model.ill_conditioned).lower()}",
            f"intersections: {len(intersections)}",
        ]
        lines += [f"  {format_complex(w)}" for w in intersections]
        lines.append(f"hausdorff_to_quartic: {report.hausdorff_distance:.3e}")
        if report.predicted_count is not None:
            lines.append(f"predicted_count: {report.predicted_count}")
        if report.note:
            lines.append(f"note: {report.note}")
        text = render_text(lines)
    write_output(text, config.output_path)
    return 0


@timed_command("sharpness")
def cmd_sharpness(args: argparse.Namespace, config: RunConfig) -> int:
    rows = sharpness_scan(parse_real_list(args.t), config.tolerances, alpha=args.alpha)
    fmt = config.output_format
    if fmt == OutputFormat.JSON:
        text = render_json("sharpness", {"alpha": args.alpha, "rows": rows})
    elif fmt == OutputFormat.CSV:
        text = render_csv(["t", "ratio", "count"], ([row.t, row.ratio, row.count] for row in rows))
    else:
        text = render_text([f"t={row.t!r} ratio={format_real(row.ratio)} count={row.count}" for row in rows])
    write_output(text, config.output_path)
    return 0


@timed_command("selftest")
def cmd_selftest(args: argparse.Namespace, config: RunConfig) -> int:
    harness = InvariantHarness(
        tol=config.tolerances,
        seed=config.seed,
        quick=config.quick,
        workers=settings.selftest_workers,
        oracle_grid=settings.oracle_grid_size,
    )
    report = harness.run(args.suite)

    fmt = config.output_format
    if fmt == OutputFormat.JSON:
        text = render_json("selftest", {"report": report, "passed": report.passed})
    elif fmt == OutputFormat.CSV:
        text = render_csv(["suite", "checked", "failures", "seconds"],
                          ([s.name, s.checked, s.failures, round(s.seconds, 3)] for s in report.suites))
    else:
        lines = []
        for suite in report.suites:
            status = "PASS" if suite.passed else "FAIL"
            lines.append(f"{status} {suite.name}: {suite.checked} checks, {suite.failures} failures, "
                         f"{suite.seconds:.2f}s")
            lines += [f"    {detail}" for detail in suite.details]
        lines.append(f"seed={report.seed} quick={str(report.quick).lower()} "
                     f"result={'PASS' if report.passed else 'FAIL'}")
        text = render_text(lines)
    write_output(text, config.output_path)

    if args.metrics:
        sys.stderr.write(render_metrics())
    if not report.passed:
        failed = [s.name for s in report.suites if not s.passed]
        raise VerificationMismatch(f"invariant suites failed: {', '.join(failed)}")
    return 0


COMMANDS: Dict[str, Callable[[argparse.Namespace, RunConfig], int]] = {
    "reflect": cmd_reflect,
    "metric": cmd_metric,
    "levelset": cmd_levelset,
    "classify": cmd_classify,
    "conic": cmd_conic,
    "sharpness": cmd_sharpness,
    "selftest": cmd_selftest,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    configure_logging(settings.log_level, settings.log_format)
    argv = list(sys.argv[1:] if argv is None else argv)
    command = "cli"
    try:
        args = build_parser().parse_args(preprocess_argv(argv))
        command = args.command
        config = build_run_config(args)
        return COMMANDS[command](args, config)
    except AlhazenError as e:
        record_error_metrics(type(e).__name__, command)
        logger.info("Command failed", command=command, error=e.detail, exit_code=e.exit_code)
        sys.stderr.write(f"error: {e.detail}\n")
        return e.exit_code
    except ValidationError as e:
        record_error_metrics("ValidationError", command)
        logger.info("Invalid configuration", command=command, error=str(e))
        sys.stderr.write(f"error: invalid configuration: {e.errors()[0]['msg']}\n")
        return ParseError.exit_code
    except SystemExit as e:
        # --help
        return int(e.code or 0)
    except Exception as e:
        record_error_metrics(type(e).__name__, command)
        logger.exception("Unexpected failure", command=command)
        sys.stderr.write(f"error: {e}\n")
        return 1
