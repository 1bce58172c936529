"""Deterministic SVG figures of disk, body, trajectories and pentagrams.

Byte-stable output: every coordinate is formatted to 12 significant
digits with a '.' decimal separator, so identical inputs produce
identical files.
"""

from __future__ import annotations

from .circlemap import TangentMap
from .geometry import IdealPoint

VIEW_BOX = "-1.1 -1.1 2.2 2.2"
CIRCLE_STROKE = 0.005


def fmt(x: float) -> str:
    """Locale-independent 12-significant-digit float formatting."""
    s = f"{x:.12g}"
    return "0" if s == "-0" else s


class SvgCanvas:
    """Minimal element collector rendered into one <svg> string."""

    def __init__(self):
        self.elements: list[str] = []

    def circle(self, cx: float, cy: float, r: float, stroke: str,
               width: float, fill: str = "none") -> None:
        self.elements.append(
            f'<circle cx="{fmt(cx)}" cy="{fmt(cy)}" r="{fmt(r)}" '
            f'fill="{fill}" stroke="{stroke}" stroke-width="{fmt(width)}"/>'
        )

    def dot(self, cx: float, cy: float, r: float, fill: str) -> None:
        self.elements.append(
            f'<circle cx="{fmt(cx)}" cy="{fmt(cy)}" r="{fmt(r)}" fill="{fill}"/>'
        )

    def polygon(self, pts, stroke: str, width: float) -> None:
        coords = " ".join(f"{fmt(x)},{fmt(y)}" for x, y in pts)
        self.elements.append(
            f'<polygon points="{coords}" fill="none" stroke="{stroke}" '
            f'stroke-width="{fmt(width)}"/>'
        )

    def path(self, pts, stroke: str, width: float) -> None:
        if len(pts) < 2:
            return
        d = "M " + " L ".join(f"{fmt(x)} {fmt(y)}" for x, y in pts)
        self.elements.append(
            f'<path d="{d}" fill="none" stroke="{stroke}" '
            f'stroke-width="{fmt(width)}"/>'
        )

    def render(self) -> str:
        body = "\n    ".join(self.elements)
        return (
            f'<svg xmlns="http://www.w3.org/2000/svg" viewBox="{VIEW_BOX}">\n'
            f'  <g transform="scale(1,-1)">\n'
            f"    {body}\n"
            f"  </g>\n"
            f"</svg>\n"
        )


def figure_svg(
    tmap: TangentMap,
    steps: int,
    start: IdealPoint,
    orbits=(),
) -> str:
    """Unit circle, body, breakpoints, a trajectory and closing orbits."""
    canvas = SvgCanvas()
    canvas.circle(0.0, 0.0, 1.0, "black", CIRCLE_STROKE)

    verts = [p.xy for p in tmap.body.vertices]
    if len(verts) == 1:
        canvas.dot(verts[0][0], verts[0][1], 0.012, "steelblue")
    elif len(verts) == 2:
        canvas.path(verts, "steelblue", 0.008)
    else:
        canvas.polygon(verts, "steelblue", 0.008)

    if steps > 0:
        traj = [p.xy for p in tmap.orbit(start, steps)]
        canvas.path(traj, "gray", 0.004)

    for u, _ in tmap.breakpoints:
        x, y = u.xy
        canvas.dot(x, y, 0.01, "darkorange")

    for pent in orbits:
        pts = [p.xy for p in pent.points]
        canvas.polygon(pts, "crimson", 0.006)

    return canvas.render()
