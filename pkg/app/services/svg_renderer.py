"""Deterministic SVG diagrams: mirror circle, foci, reflection points and level sets.

The canvas is 800x800 with the unit circle drawn at radius 360 around (400, 400);
coordinates are printed with a fixed number of decimals so output is byte-stable.
"""
import math
from typing import Iterable, List, Sequence

from app.models.schemas import LevelSet, ReflectionSolution

CANVAS = 800
ORIGIN = 400.0
UNIT = 360.0
DECIMALS = 3
PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#e377c2", "#17becf")


def _num(value: float) -> str:
    text = f"{value:.{DECIMALS}f}"
    return "0.000" if text == "-0.000" else text


def to_canvas(w: complex) -> tuple:
    return ORIGIN + UNIT * w.real, ORIGIN - UNIT * w.imag


class SvgCanvas:
    def __init__(self, extent: float = 1.0):
        # points outside the unit disk widen the view box; the circle keeps its radius
        self.half = UNIT * max(1.0, extent) * 1.1
        self.elements: List[str] = []

    def circle(self, center: complex, radius: float, stroke: str = "#000000", fill: str = "none",
               width: float = 1.5):
        x, y = to_canvas(center)
        self.elements.append(
            f'<circle cx="{_num(x)}" cy="{_num(y)}" r="{_num(radius)}" '
            f'stroke="{stroke}" stroke-width="{_num(width)}" fill="{fill}"/>'
        )

    def dot(self, w: complex, color: str, radius: float = 4.0):
        self.circle(w, radius, stroke=color, fill=color, width=1.0)

    def label(self, w: complex, text: str, color: str = "#000000"):
        x, y = to_canvas(w)
        self.elements.append(
            f'<text x="{_num(x + 6)}" y="{_num(y - 6)}" font-family="sans-serif" font-size="14" '
            f'fill="{color}">{text}</text>'
        )

    def polyline(self, points: Sequence[complex], color: str, closed: bool = False, width: float = 1.5):
        coords = [to_canvas(w) for w in points]
        if closed and coords:
            coords.append(coords[0])
        path = " ".join(f"{_num(x)},{_num(y)}" for x, y in coords)
        self.elements.append(
            f'<polyline points="{path}" stroke="{color}" stroke-width="{_num(width)}" fill="none"/>'
        )

    def ellipse(self, center: complex, semi_major: float, semi_minor: float, angle: float, color: str):
        x, y = to_canvas(center)
        degrees = -math.degrees(angle)
        self.elements.append(
            f'<ellipse cx="{_num(x)}" cy="{_num(y)}" rx="{_num(UNIT * semi_major)}" ry="{_num(UNIT * semi_minor)}" '
            f'transform="rotate({_num(degrees)} {_num(x)} {_num(y)})" stroke="{color}" '
            f'stroke-width="1.5" fill="none" stroke-dasharray="6 4"/>'
        )

    def render(self) -> str:
        low = _num(ORIGIN - self.half)
        size = _num(2.0 * self.half)
        header = (
            f'<svg xmlns="http://www.w3.org/2000/svg" width="{CANVAS}" height="{CANVAS}" '
            f'viewBox="{low} {low} {size} {size}">'
        )
        background = (f'<rect x="{low}" y="{low}" width="{size}" height="{size}" fill="#ffffff"/>')
        return "\n".join([header, background] + self.elements + ["</svg>"]) + "\n"


def _extent(points: Iterable[complex]) -> float:
    return max([1.0] + [abs(w) for w in points])


def render_reflection_svg(solution: ReflectionSolution) -> str:
    """Circle, foci, all quartic roots, the reflected path and, for interior pairs, the tangent ellipse"""
    roots = [r.value for r in solution.roots.roots]
    visible_roots = [w for w in roots if abs(w) <= 4.0]
    canvas = SvgCanvas(_extent([solution.z1, solution.z2] + visible_roots))
    canvas.circle(0j, UNIT)
    canvas.dot(0j, "#000000", radius=2.0)

    if solution.kind.value == "interior":
        semi_major = solution.path_length / 2.0
        focal = abs(solution.z1 - solution.z2) / 2.0
        semi_minor = math.sqrt(max(0.0, semi_major * semi_major - focal * focal))
        axis = solution.z2 - solution.z1
        angle = math.atan2(axis.imag, axis.real) if axis != 0 else 0.0
        canvas.ellipse((solution.z1 + solution.z2) / 2.0, semi_major, semi_minor, angle, PALETTE[2])

    canvas.polyline([solution.z1, solution.u, solution.z2], PALETTE[1])
    for w in visible_roots:
        color = PALETTE[0] if abs(abs(w) - 1.0) <= 1e-9 else PALETTE[4]
        canvas.dot(w, color, radius=4.0)
    canvas.dot(solution.u, PALETTE[1], radius=6.0)
    canvas.dot(solution.z1, "#000000")
    canvas.dot(solution.z2, "#000000")
    canvas.label(solution.z1, "z1")
    canvas.label(solution.z2, "z2")
    canvas.label(solution.u, "u", PALETTE[1])
    return canvas.render()


def render_level_sets_svg(level_sets: Sequence[LevelSet]) -> str:
    """One closed polyline per level around the common center"""
    canvas = SvgCanvas()
    canvas.circle(0j, UNIT)
    for index, layer in enumerate(level_sets):
        points = [p.w for p in layer.points]
        color = PALETTE[index % len(PALETTE)]
        closed = layer.skipped == 0
        canvas.polyline(points, color, closed=closed)
    if level_sets:
        canvas.dot(complex(level_sets[0].c), "#000000", radius=3.0)
    return canvas.render()
