"""The bar-billiard circle map of a convex body inside the unit circle.

For a boundary point v, the map sends v to the first counterclockwise
boundary point w such that the chord vw supports the body.  For a point
body this is the chord through the point; for a segment or a convex
polygon the supporting vertex switches at finitely many breakpoints,
namely the ideal endpoints of the edge lines.  Between breakpoints the
map coincides with the chord map of the active vertex, which makes the
breakpoint table the whole story: evaluation, one-sided derivatives and
the lift all read from it.
"""

from __future__ import annotations

import math
from bisect import bisect_right
from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidBody, IterationBudgetExceeded
from .geometry import (
    TWO_PI,
    DiskPoint,
    IdealPoint,
    Triangle,
    ccw_gap,
    wrap_turns,
)

#: angles this close to a breakpoint (in turns) snap onto it (left-closed arcs)
SNAP = 1e-12

#: hard cap on orbit/estimate iteration counts
ITERATION_BUDGET = 10_000_000


@dataclass(frozen=True)
class ConvexBody:
    """A point, a segment, or a strictly convex CCW polygon in the disk."""

    kind: str
    vertices: tuple[DiskPoint, ...]

    def __post_init__(self):
        if self.kind not in ("point", "segment", "polygon"):
            raise InvalidBody(f"unknown body kind {self.kind!r}")
        n = len(self.vertices)
        if self.kind == "point" and n != 1:
            raise InvalidBody("point body needs exactly one vertex")
        if self.kind == "segment":
            if n != 2:
                raise InvalidBody("segment body needs exactly two vertices")
            if self.vertices[0].euclid_to(self.vertices[1]) <= 1e-12:
                raise InvalidBody("segment endpoints coincide")
        if self.kind == "polygon":
            if n < 3:
                raise InvalidBody("polygon body needs at least three vertices")
            object.__setattr__(self, "vertices", _ccw_convex(self.vertices))

    @classmethod
    def point(cls, p: DiskPoint) -> "ConvexBody":
        return cls("point", (p,))

    @classmethod
    def segment(cls, p: DiskPoint, q: DiskPoint) -> "ConvexBody":
        return cls("segment", (p, q))

    @classmethod
    def polygon(cls, vertices) -> "ConvexBody":
        return cls("polygon", tuple(vertices))

    @classmethod
    def triangle(cls, tri: Triangle) -> "ConvexBody":
        return cls("polygon", tri.vertices)


def _ccw_convex(vertices: tuple[DiskPoint, ...]) -> tuple[DiskPoint, ...]:
    """Validate strict convexity; flip CW input to CCW."""
    n = len(vertices)
    area2 = 0.0
    for i in range(n):
        a, b = vertices[i], vertices[(i + 1) % n]
        area2 += a.x * b.y - a.y * b.x
    if area2 < 0.0:
        vertices = vertices[::-1]
    for i in range(n):
        a = vertices[i]
        b = vertices[(i + 1) % n]
        c = vertices[(i + 2) % n]
        cross = (b.x - a.x) * (c.y - b.y) - (b.y - a.y) * (c.x - b.x)
        if cross <= 1e-12:
            raise InvalidBody("polygon is not strictly convex in CCW order")
    return vertices


@dataclass(frozen=True)
class OneSidedDerivative:
    """Left and right derivatives of the map at a boundary point."""

    left: float
    right: float


def _second_intersection_xy(vx: float, vy: float, px: float, py: float):
    """Other intersection of the circle with the line through v and p.

    v is on the circle and already a root of the chord quadratic, so the
    second root comes out of the factored form without cancellation.
    """
    dx, dy = px - vx, py - vy
    dd = dx * dx + dy * dy
    s = -2.0 * (vx * dx + vy * dy) / dd
    wx, wy = vx + s * dx, vy + s * dy
    norm = math.hypot(wx, wy)
    return wx / norm, wy / norm


def second_intersection(v: IdealPoint, p: DiskPoint) -> IdealPoint:
    """Chord map of a single interior point: v across p to the boundary."""
    vx, vy = v.xy
    wx, wy = _second_intersection_xy(vx, vy, p.x, p.y)
    return IdealPoint.from_xy(wx, wy)


@dataclass(frozen=True)
class TangentMap:
    """Evaluable bar-billiard map: body plus its breakpoint table.

    ``breakpoints`` lists (ideal point, active vertex index) sorted by
    angle; the vertex is the tangency on the left-closed arc starting at
    that breakpoint.  A point body has an empty table.
    """

    body: ConvexBody
    breakpoints: tuple[tuple[IdealPoint, int], ...]
    _bp_angles: tuple[float, ...] = field(repr=False)
    _verts: tuple[tuple[float, float], ...] = field(repr=False)
    _active: tuple[int, ...] = field(repr=False)

    # --- scalar fast path -------------------------------------------------

    def active_vertex_index(self, angle: float) -> int:
        """Index of the tangency vertex for the arc containing the angle."""
        if not self._bp_angles:
            return 0
        i = bisect_right(self._bp_angles, (angle + SNAP) % 1.0) - 1
        return self._active[i]  # i == -1 wraps to the last arc

    def eval_angle(self, a: float) -> float:
        """Image angle (turns in [0,1)) of the boundary point at angle a."""
        px, py = self._verts[self.active_vertex_index(a)]
        t = TWO_PI * a
        wx, wy = _second_intersection_xy(math.cos(t), math.sin(t), px, py)
        return wrap_turns(math.atan2(wy, wx) / TWO_PI)

    def gap_angle(self, a: float) -> float:
        """CCW winding gap from a to its image, in (0, 1) turns."""
        return ccw_gap(a, self.eval_angle(a))

    # --- vectorized grid path ---------------------------------------------

    def eval_angles(self, angles: np.ndarray) -> np.ndarray:
        """Vectorized :meth:`eval_angle` over an array of angles."""
        a = np.asarray(angles, dtype=float) % 1.0
        if self._bp_angles:
            idx = np.searchsorted(self._bp_angles, (a + SNAP) % 1.0, side="right") - 1
            active = np.take(self._active, idx)  # -1 wraps to the last arc
        else:
            active = np.zeros(a.shape, dtype=int)
        verts = np.asarray(self._verts)
        px = verts[active, 0]
        py = verts[active, 1]
        t = TWO_PI * a
        vx, vy = np.cos(t), np.sin(t)
        dx, dy = px - vx, py - vy
        s = -2.0 * (vx * dx + vy * dy) / (dx * dx + dy * dy)
        return np.arctan2(vy + s * dy, vx + s * dx) / TWO_PI % 1.0

    def gap_angles(self, angles: np.ndarray) -> np.ndarray:
        g = (self.eval_angles(angles) - np.asarray(angles) % 1.0) % 1.0
        return np.where(g == 0.0, 1.0, g)

    # --- public operations --------------------------------------------------

    def evaluate(self, v: IdealPoint) -> IdealPoint:
        return IdealPoint(self.eval_angle(v.angle))

    def derivative(self, v: IdealPoint) -> OneSidedDerivative:
        """One-sided derivatives |A w|/|v A| for the active vertices at v."""
        a = v.angle
        if not self._bp_angles:
            i_right = i_left = 0
        else:
            k = bisect_right(self._bp_angles, (a + SNAP) % 1.0) - 1
            i_right = self._active[k]
            at_break = (
                min(
                    abs(a - self._bp_angles[k]) % 1.0,
                    1.0 - abs(a - self._bp_angles[k]) % 1.0,
                )
                <= SNAP
            )
            i_left = self._active[k - 1] if at_break else i_right
        return OneSidedDerivative(
            left=self._vertex_derivative(a, i_left),
            right=self._vertex_derivative(a, i_right),
        )

    def _vertex_derivative(self, a: float, vert_index: int) -> float:
        px, py = self._verts[vert_index]
        t = TWO_PI * a
        vx, vy = math.cos(t), math.sin(t)
        wx, wy = _second_intersection_xy(vx, vy, px, py)
        return math.hypot(wx - px, wy - py) / math.hypot(vx - px, vy - py)

    def lift(self, x: float) -> float:
        """Lift F with F(x+1) = F(x)+1 and F(x)-x in (0, 1)."""
        return x + self.gap_angle(x % 1.0)

    def lift_iter(self, x: float, n: int) -> float:
        """n-fold lift F^n(x), accumulating the winding gap per step."""
        if n < 0 or n > ITERATION_BUDGET:
            raise IterationBudgetExceeded(f"lift iteration count {n} out of budget")
        a = x % 1.0
        total = 0.0
        for _ in range(n):
            g = self.gap_angle(a)
            total += g
            a = (a + g) % 1.0
        return x + total

    def orbit(self, v: IdealPoint, n: int) -> list[IdealPoint]:
        """Iterates [v, map(v), ..., map^n(v)]."""
        if n < 0 or n > ITERATION_BUDGET:
            raise IterationBudgetExceeded(f"orbit length {n} out of budget")
        pts = [v]
        a = v.angle
        for _ in range(n):
            a = self.eval_angle(a)
            pts.append(IdealPoint(a))
        return pts


def lift_eval(tmap: TangentMap, x: float) -> float:
    return tmap.lift(x)


def evaluate(tmap: TangentMap, v: IdealPoint) -> IdealPoint:
    return tmap.evaluate(v)


def derivative(tmap: TangentMap, v: IdealPoint) -> OneSidedDerivative:
    return tmap.derivative(v)


def orbit(tmap: TangentMap, v: IdealPoint, n: int) -> list[IdealPoint]:
    return tmap.orbit(v, n)


def _edge_breakpoint(a: DiskPoint, b: DiskPoint) -> IdealPoint:
    """Ideal endpoint of the line ab nearer to a (behind a, away from b)."""
    dx, dy = b.x - a.x, b.y - a.y
    dd = dx * dx + dy * dy
    bb = a.x * dx + a.y * dy
    cc = a.x * a.x + a.y * a.y - 1.0
    disc = math.sqrt(bb * bb - dd * cc)
    qq = -(bb + math.copysign(disc, bb)) if bb != 0.0 else disc
    s1, s2 = qq / dd, cc / qq
    s_neg = min(s1, s2)
    return IdealPoint.from_xy(a.x + s_neg * dx, a.y + s_neg * dy)


def build_tangent_map(body: ConvexBody) -> TangentMap:
    """Breakpoint table of the map: one breakpoint per supporting edge.

    For the edge from vertex i to vertex i+1 the breakpoint is the ideal
    endpoint nearer vertex i, and the arc it opens is served by vertex
    i+1.  A segment is handled as a 2-gon with both edge orientations.
    """
    verts = tuple(p.xy for p in body.vertices)
    if body.kind == "point":
        return TangentMap(body, (), (), verts, ())

    if body.kind == "segment":
        cyc = [0, 1]
    else:
        cyc = list(range(len(body.vertices)))

    entries = []
    n = len(cyc)
    for j in range(n):
        i, k = cyc[j], cyc[(j + 1) % n]
        u = _edge_breakpoint(body.vertices[i], body.vertices[k])
        entries.append((u.angle, u, k))
    entries.sort(key=lambda e: e[0])
    for (a1, _, _), (a2, _, _) in zip(entries, entries[1:]):
        if a2 - a1 <= SNAP:
            raise InvalidBody("breakpoints collide; body is numerically degenerate")
    return TangentMap(
        body,
        tuple((u, k) for _, u, k in entries),
        tuple(a for a, _, _ in entries),
        verts,
        tuple(k for _, _, k in entries),
    )
