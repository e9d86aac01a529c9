import cmath
import json
import math
import re
from enum import Enum
from pathlib import Path

import numpy as np
import pytest

from app.core.metric import level_set
from app.core.reflect import solve_exterior, solve_interior
from app.evaluation.suites import MAX_DETAILS, InvariantHarness, SuiteContext, Tally, run_sharded
from app.models.schemas import RootPattern
from app.services.export import (
    complex_from_payload,
    format_complex,
    format_real,
    render_csv,
    render_json,
    to_payload,
    write_output,
)
from app.services.svg_renderer import render_level_sets_svg, render_reflection_svg

GOLDEN = Path(__file__).parent / "golden"


def test_to_payload_handles_complex_enums_and_infinities():
    payload = to_payload({"u": 1 - 2j, "pattern": RootPattern.CUBIC, "gap": float("inf"), "roots": (0.5j,)})
    assert payload == {"u": {"re": 1.0, "im": -2.0}, "pattern": "Cubic", "gap": None,
                       "roots": [{"re": 0.0, "im": 0.5}]}
    assert complex_from_payload(payload["u"]) == 1 - 2j


def test_render_json_header(tol):
    document = json.loads(render_json("reflect", {"solution": solve_interior(0.4, -0.4, tol)}))
    assert document["schema_version"] == 1
    assert document["command"] == "reflect"
    assert document["solution"]["kind"] == "interior"
    assert document["solution"]["roots"]["roots"][0]["multiplicity"] == 1


def test_render_csv():
    class Flavor(Enum):
        PLAIN = "plain"

    text = render_csv(["a", "b", "c", "d"], [[0.1, True, Flavor.PLAIN, 3]], comment="t=0.5")
    assert text == "# t=0.5\na,b,c,d\n0.1,true,plain,3\n"


def test_text_formatting():
    assert format_real(1 / 3) == "0.333333333333"
    assert format_complex(0.5 - 0.25j) == "0.500000000000-0.250000000000i"
    assert format_complex(complex(0.0, -1.0), digits=2) == "0.00-1.00i"


def test_write_output_to_file(tmp_path, capsys):
    target = tmp_path / "out" / "diagram.svg"
    write_output("<svg/>\n", str(target))
    assert target.read_text() == "<svg/>\n"
    assert capsys.readouterr().out == ""

    write_output("hello\n")
    assert capsys.readouterr().out == "hello\n"


def test_reflection_svg_is_byte_stable(tol, fig2_pair, tmp_path):
    first, second = tmp_path / "a.svg", tmp_path / "b.svg"
    write_output(render_reflection_svg(solve_interior(*fig2_pair, tol)), str(first))
    write_output(render_reflection_svg(solve_interior(*fig2_pair, tol)), str(second))
    assert first.read_bytes() == second.read_bytes()

    text = first.read_text()
    assert 'width="800" height="800"' in text
    assert '<circle cx="400.000" cy="400.000" r="360.000"' in text
    assert "<ellipse" in text
    assert "-0.000" not in text


def test_reflection_svg_matches_golden(tol):
    """Antipodal pair rotated by pi/8: roots at the four rotated axis points, u = exp(i pi/8)"""
    z1 = cmath.rect(0.4, math.pi / 8)
    rendered = render_reflection_svg(solve_interior(z1, -z1, tol))
    assert rendered.encode() == (GOLDEN / "reflect_antipodal_pair.svg").read_bytes()


def test_level_set_svg_matches_golden(tol):
    """Level 1/2 around the origin is the circle of radius 2/3"""
    rendered = render_level_sets_svg([level_set(0.0, 0.5, 8, tol)])
    assert rendered.encode() == (GOLDEN / "levelset_origin.svg").read_bytes()


def test_exterior_svg_widens_view_box(tol):
    text = render_reflection_svg(solve_exterior(2, 2j, tol))
    low, size = re.search(r'viewBox="(\S+) \S+ (\S+) \S+"', text).groups()
    assert float(size) > 2 * 360
    assert float(low) < 0
    assert "<ellipse" not in text


def test_level_set_svg(tol):
    layers = [level_set(0.3, t, 16, tol) for t in (0.2, 0.4)]
    text = render_level_sets_svg(layers)
    assert text.count("<polyline") == 2
    assert text == render_level_sets_svg(layers)


def test_tally_caps_details():
    tally = Tally()
    for k in range(MAX_DETAILS + 5):
        tally.check(False, f"failure {k}")
    tally.check(True)
    assert tally.checked == MAX_DETAILS + 6
    assert tally.failures == MAX_DETAILS + 5
    assert len(tally.details) == MAX_DETAILS

    other = Tally()
    other.fail("late")
    tally.merge(other)
    assert tally.failures == MAX_DETAILS + 6
    assert len(tally.details) == MAX_DETAILS


def _context(tol, workers, quick=False):
    return SuiteContext(seed_sequence=np.random.SeedSequence(11), tol=tol, quick=quick,
                        workers=workers, oracle_grid=1000)


def test_sharded_sweep_ignores_worker_count(tol):
    def shard(rng, n):
        tally = Tally()
        for value in rng.random(n):
            tally.check(value < 0.9, f"{value!r}")
        return tally

    serial = run_sharded(_context(tol, 1), 12_000, shard)
    threaded = run_sharded(_context(tol, 4), 12_000, shard)
    assert serial.checked == 12_000
    assert (serial.failures, serial.details) == (threaded.failures, threaded.details)


def test_quick_mode_divides_sizes(tol):
    assert _context(tol, 1).size(1000) == 1000
    assert _context(tol, 1, quick=True).size(1000) == 100
    assert _context(tol, 1, quick=True).size(5) == 1


def test_harness_runs_selected_suites(tol):
    harness = InvariantHarness(tol=tol, seed=3, quick=True, workers=2, oracle_grid=20_000)
    report = harness.run(["off_circle_regression", "closed_forms"])
    assert [s.name for s in report.suites] == ["off_circle_regression", "closed_forms"]
    assert report.passed
    assert report.suites[0].checked == 5


def test_harness_reports_raised_errors_as_failures(tol, monkeypatch):
    import app.evaluation.suites as suites
    from app.core.errors import NumericalFailure

    def broken(ctx):
        raise NumericalFailure("no convergence")

    monkeypatch.setitem(suites.SUITES, "closed_forms", broken)
    result = InvariantHarness(tol=tol, seed=1, quick=True).run_suite("closed_forms")
    assert not result.passed
    assert result.details == ["NumericalFailure: no convergence"]


@pytest.mark.parametrize("seed", [0, 5])
def test_suite_streams_do_not_depend_on_selection(tol, seed):
    harness = InvariantHarness(tol=tol, seed=seed, quick=True)
    alone = harness._context("ball_curve").rng().random(3)
    again = harness._context("ball_curve").rng().random(3)
    other = harness._context("closed_forms").rng().random(3)
    assert np.array_equal(alone, again)
    assert not np.array_equal(alone, other)
