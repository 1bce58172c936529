"""Period-5 orbit machinery and distance-condition checkers.

A triangle whose apex sits at hyperbolic distance between the two
thresholds (the order-2 threshold and half the order-1 threshold of the
base) has rotation number 2/5, and its boundary orbits close into a
pentagram winding twice around the circle.  This module builds the
explicit closing orbits of the canonical families, detects period-5
orbits of arbitrary triangles, counts chord incidences, and evaluates
all the distance conditions that decide 1/3, 2/5, above or below.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.optimize import brentq

from .search import golden_min
from .circlemap import (
    ConvexBody,
    TangentMap,
    build_tangent_map,
    second_intersection,
)
from .errors import (
    DegenerateU,
    NotInArc,
    NoWitness,
    OutOfRange,
    PointOnLine,
    PreconditionFailed,
)
from .geometry import (
    TWO_PI,
    Chord,
    DiskPoint,
    IdealPoint,
    Triangle,
    angular_distance,
    ccw_gap,
    chord_through,
    delta_n,
    foot_and_delta,
    hyp_distance,
    wrap_turns,
)
from .rotation import (
    MERGE_TOL,
    RotationResult,
    classify_rho,
    scan_winding_zeros,
)

LOG3 = math.log(3.0)
LOG9 = math.log(9.0)

#: closure and incidence tolerance for periodic orbits
CLOSURE_TOL = 1e-9


@dataclass(frozen=True)
class Pentagram:
    """A period-5 boundary orbit in traversal order, with its 5 chords."""

    points: tuple[IdealPoint, ...]
    edges: tuple[Chord, ...]

    @classmethod
    def build(cls, tmap: TangentMap, points) -> "Pentagram":
        """Validate the orbit against the map and wire up the edges.

        The map must send each point to the next within the closure
        tolerance, and sorted-by-angle positions must advance by 2 mod 5.
        """
        pts = tuple(points)
        if len(pts) != 5:
            raise PreconditionFailed("a pentagram needs exactly five points")
        for i in range(5):
            img = tmap.eval_angle(pts[i].angle)
            if angular_distance(img, pts[(i + 1) % 5].angle) > CLOSURE_TOL:
                raise PreconditionFailed(
                    f"orbit does not close: step {i} misses by "
                    f"{angular_distance(img, pts[(i + 1) % 5].angle):.3e}"
                )
        angles = [p.angle for p in pts]
        rank = {i: r for r, i in enumerate(sorted(range(5), key=lambda i: angles[i]))}
        for i in range(5):
            if rank[(i + 1) % 5] != (rank[i] + 2) % 5:
                raise PreconditionFailed("orbit does not advance by 2 mod 5")
        edges = tuple(Chord(pts[i], pts[(i + 1) % 5]) for i in range(5))
        return cls(pts, edges)

    @classmethod
    def from_seed(cls, tmap: TangentMap, seed: IdealPoint) -> "Pentagram":
        a = seed.angle
        pts = [seed]
        for _ in range(4):
            a = tmap.eval_angle(a)
            pts.append(IdealPoint(a))
        return cls.build(tmap, pts)


@dataclass(frozen=True)
class OrbitSet:
    """All period-5 orbits found for one map, plus the raw zero count."""

    orbits: tuple[Pentagram, ...]
    zero_count: int


@dataclass(frozen=True)
class TauResult:
    """Chord-incidence count for the 2n-fold segment map."""

    n: int
    count: int
    roots: tuple[IdealPoint, ...]


@dataclass(frozen=True)
class LabelingReport:
    """Distance data for one choice of base pair (i, j) and apex k."""

    pair: tuple[int, int]
    apex: int
    d_base: float
    delta: float
    delta1: float
    delta2: float
    half_delta1: float
    sandwich: bool
    orientation: str  # "inner_to_half" | "half_to_inner"
    one_third: bool
    strict_inside: bool
    isosceles: bool
    isosceles_above: bool
    isosceles_below: bool


@dataclass(frozen=True)
class ConditionReport:
    """Per-labeling distance conditions and their aggregate verdicts."""

    labelings: tuple[LabelingReport, LabelingReport, LabelingReport]
    one_third: bool
    two_fifths_sandwich: bool
    all_strictly_inside: bool
    isosceles_above: bool
    isosceles_below: bool


@dataclass(frozen=True)
class ConjectureVerdict:
    """Condition vs certified rotation number for one triangle."""

    condition: bool
    rho_verdict: str  # "equals" | "above" | "below" | "uncertified"
    consistent: bool
    report: ConditionReport
    rotation: RotationResult


def triangle_map(tri: Triangle) -> TangentMap:
    return build_tangent_map(ConvexBody.triangle(tri))


def standard_pentagram(t: float) -> tuple[Triangle, Pentagram]:
    """Canonical closing configuration at half the order-1 threshold.

    The triangle is (0, t), (0, -t), ((t-1)/(t+1), 0); its apex distance
    equals half the order-1 threshold of the base, and the five closed
    -form boundary points form a pentagram through the triangle sides.
    """
    if not 0.0 < t < 1.0:
        raise OutOfRange(f"parameter must satisfy 0 < t < 1, got {t}")
    p = DiskPoint(0.0, t)
    q = DiskPoint(0.0, -t)
    r = DiskPoint((t - 1.0) / (t + 1.0), 0.0)
    tri = Triangle(p, q, r)
    tmap = triangle_map(tri)
    den = t * t + 1.0
    pts = [
        IdealPoint.from_xy(1.0, 0.0),
        IdealPoint.from_xy((t * t - 1.0) / den, 2.0 * t / den),
        IdealPoint.from_xy(0.0, -1.0),
        IdealPoint.from_xy(0.0, 1.0),
        IdealPoint.from_xy((t * t - 1.0) / den, -2.0 * t / den),
    ]
    return tri, Pentagram.build(tmap, pts)


def ellipse_contact_xs(t: float, v: float) -> tuple[float, float, float, float, float]:
    """Closed-form abscissas of the five contact points (apex on the left).

    Only the first coordinates are trustworthy in closed form; the
    ordinates are reconstructed geometrically instead.
    """
    s = math.sqrt(1.0 - v * v)
    t2 = t * t
    t4 = t2 * t2
    return (
        s * (t2 - 1.0) / (2.0 * v * t - t2 - 1.0),
        -s,
        -s * (t2 - 1.0) / (2.0 * v * t + t2 + 1.0),
        -s * (t4 - 2.0 * t2 + 1.0) / (4.0 * v * t * t2 + t4 + 4.0 * v * t + 6.0 * t2 + 1.0),
        s * (t4 - 2.0 * t2 + 1.0) / (4.0 * v * t * t2 - t4 + 4.0 * v * t - 6.0 * t2 - 1.0),
    )


def ellipse_pentagram(t: float, v: float, side: str = "left") -> tuple[Triangle, Pentagram]:
    """Closing configuration with the apex on the order-2 threshold ellipse.

    The apex is placed at height v on the ellipse of points whose
    distance to the vertical base equals the order-2 threshold; the five
    boundary points are built by successive chord crossings through the
    base vertices and verified to close under the actual map.
    """
    if not 0.0 < t < 1.0:
        raise OutOfRange(f"parameter must satisfy 0 < t < 1, got {t}")
    if abs(v) > t:
        raise OutOfRange(f"apex height must satisfy |v| <= t, got {v}")
    if side not in ("left", "right"):
        raise OutOfRange(f"side must be 'left' or 'right', got {side!r}")
    s = math.sqrt(1.0 - v * v)
    t2 = t * t
    u_mag = s * (1.0 - t2) * (1.0 - t2) / (t2 * t2 + 6.0 * t2 + 1.0)
    if u_mag <= 1e-15:
        raise DegenerateU("ellipse abscissa collapsed to zero")
    mirror = side == "right"

    p = DiskPoint(0.0, t)
    q = DiskPoint(0.0, -t)
    a2 = IdealPoint.from_xy(-s, v)
    a1 = second_intersection(a2, p)
    a3 = second_intersection(a2, q)
    a4 = second_intersection(a3, p)
    a5 = second_intersection(a1, q)
    pts = [a1, a2, a3, a4, a5]

    for x_pt, x_formula in zip(pts, ellipse_contact_xs(t, v)):
        if abs(x_pt.x - x_formula) > 1e-9:
            raise RuntimeError(
                f"contact-point abscissa disagrees with its closed form: "
                f"{x_pt.x} vs {x_formula}"
            )

    if mirror:
        pts = [IdealPoint(wrap_turns(0.5 - a.angle)) for a in pts]
    r = DiskPoint(u_mag if mirror else -u_mag, v)
    tri = Triangle(p, q, r)
    tmap = triangle_map(tri)

    # follow the actual map through the constructed points to fix the order
    start = pts[1]  # the horizontal-chord point (-s, v), mirrored if needed
    seq = [start]
    a = start.angle
    for _ in range(4):
        a = tmap.eval_angle(a)
        match = min(pts, key=lambda pt: angular_distance(pt.angle, a))
        if angular_distance(match.angle, a) > 1e-7:
            raise RuntimeError("constructed points are not an orbit of the map")
        seq.append(match)
    return tri, Pentagram.build(tmap, seq)


def detect_period5(tmap: TangentMap, grid: int = 8192) -> OrbitSet:
    """Find every period-5, winding-2 boundary orbit of a triangle map."""
    if tmap.body.kind != "polygon" or len(tmap.body.vertices) != 3:
        raise PreconditionFailed("period-5 detection applies to triangle bodies")
    scan = scan_winding_zeros(tmap, 2, 5, grid=grid, keep_tangencies=True)
    zeros = sorted(x for x, _, _ in scan.roots)
    # corner zeros of semi-stable orbits carry a float-noise window wider
    # than the scan's merge width; collapse again at the orbit tolerance
    deduped: list[float] = []
    for z in zeros:
        if deduped and z - deduped[-1] <= 1e-7:
            continue
        deduped.append(z)
    if len(deduped) > 1 and deduped[0] + 1.0 - deduped[-1] <= 1e-7:
        deduped.pop()
    zeros = deduped
    remaining = list(zeros)
    orbits = []
    while remaining:
        x0 = remaining.pop(0)
        angles = [x0]
        a = x0
        for _ in range(4):
            a = tmap.eval_angle(a)
            angles.append(a)
            remaining = [z for z in remaining if angular_distance(z, a) > 1e-7]
        orbits.append(Pentagram.from_seed(tmap, IdealPoint(x0)))
    return OrbitSet(orbits=tuple(orbits), zero_count=len(zeros))


def _segment_chord_gap(p1: DiskPoint, p2: DiskPoint, pt: DiskPoint):
    ch = chord_through(p1, p2)
    dx, dy = p2.x - p1.x, p2.y - p1.y
    cross = dx * (pt.y - p1.y) - dy * (pt.x - p1.x)
    dist = abs(cross) / math.hypot(dx, dy)
    return ch, dist


def tau_n(p1: DiskPoint, p2: DiskPoint, pt: DiskPoint, n: int, grid: int = 4096) -> TauResult:
    """Count boundary points w whose chord to the 2n-fold image covers pt.

    The count is 0, 1 or 2 according to whether the distance from pt to
    the base line is below, at, or above the order-2n... order-n
    threshold of the pair; the tangent case is detected within a 1e-9
    band on the chord distance.
    """
    if n < 1:
        raise OutOfRange(f"fold order must be a positive integer, got {n}")
    ch, line_dist = _segment_chord_gap(p1, p2, pt)
    if line_dist <= 1e-12:
        raise PointOnLine("query point lies on the base line")
    tmap = build_tangent_map(ConvexBody.segment(p1, p2))

    def h(w_angle: float) -> float:
        ta = TWO_PI * w_angle
        ax, ay = math.cos(ta), math.sin(ta)
        b_angle = w_angle
        for _ in range(2 * n):
            b_angle = tmap.eval_angle(b_angle)
        tb = TWO_PI * b_angle
        bx, by = math.cos(tb), math.sin(tb)
        ex, ey = bx - ax, by - ay
        return (ex * (pt.y - ay) - ey * (pt.x - ax)) / math.hypot(ex, ey)

    roots: list[tuple[float, float]] = []  # (angle, |h|)
    for start, end in ((ch.a.angle, ch.b.angle), (ch.b.angle, ch.a.angle)):
        span = ccw_gap(start, end)
        # uniform samples plus geometric tails: roots can crowd the ideal
        # endpoints when the query point sits far from the base line
        tails = np.array([10.0 ** -j for j in range(4, 12)])
        rel = np.unique(
            np.concatenate(
                [(np.arange(grid, dtype=float) + 0.5) / grid, tails, 1.0 - tails]
            )
        )
        n_rel = len(rel)
        thetas = (start + rel * span) % 1.0
        hs = np.array([h(th) for th in thetas])
        for i in range(n_rel - 1):
            if hs[i] == 0.0:
                roots.append((thetas[i], 0.0))
            elif hs[i] * hs[i + 1] < 0.0:
                lo = start + rel[i] * span
                hi = start + rel[i + 1] * span
                x_root = brentq(lambda u: h(u % 1.0), lo, hi, xtol=1e-13)
                roots.append((x_root % 1.0, abs(h(x_root % 1.0))))
        # tangency scan on interior |h| minima
        absh = np.abs(hs)
        interior = (absh <= np.roll(absh, 1)) & (absh <= np.roll(absh, -1))
        interior[0] = interior[-1] = False
        for i in np.nonzero(interior)[0]:
            lo = start + rel[max(0, i - 1)] * span
            hi = start + rel[min(n_rel - 1, i + 1)] * span
            x_e, f_e = golden_min(lambda u: abs(h(u % 1.0)), lo, hi, xtol=1e-13)
            if f_e <= 1e-9:
                roots.append((x_e % 1.0, f_e))

    roots.sort(key=lambda r: r[0])
    merged: list[tuple[float, float]] = []
    for r in roots:
        if merged and abs(r[0] - merged[-1][0]) <= MERGE_TOL:
            continue
        merged.append(r)
    if len(merged) > 1 and (merged[0][0] + 1.0 - merged[-1][0]) <= MERGE_TOL:
        merged.pop()
    return TauResult(
        n=n,
        count=len(merged),
        roots=tuple(IdealPoint(x) for x, _ in merged),
    )


def condition_report(tri: Triangle) -> ConditionReport:
    """Evaluate every distance condition for all three vertex labelings."""
    verts = tri.vertices
    labelings = []
    for i, j, k in ((0, 1, 2), (1, 2, 0), (2, 0, 1)):
        base = hyp_distance(verts[i], verts[j])
        side_ik = hyp_distance(verts[i], verts[k])
        side_jk = hyp_distance(verts[j], verts[k])
        _, delta = foot_and_delta(verts[i], verts[j], verts[k])
        d1 = delta_n(base, 1)
        d2 = delta_n(base, 2)
        half1 = 0.5 * d1
        lo, hi = min(d2, half1), max(d2, half1)
        iso = abs(side_ik - side_jk) <= 1e-9
        labelings.append(
            LabelingReport(
                pair=(i, j),
                apex=k,
                d_base=base,
                delta=delta,
                delta1=d1,
                delta2=d2,
                half_delta1=half1,
                sandwich=(lo - 1e-9 <= delta <= hi + 1e-9),
                orientation="inner_to_half" if d2 <= half1 else "half_to_inner",
                one_third=(delta >= d1 - 1e-9),
                strict_inside=(delta < d2),
                isosceles=iso,
                isosceles_above=(iso and base > LOG3 and delta < d2),
                isosceles_below=(iso and base > LOG9 and delta > half1),
            )
        )
    labelings = tuple(labelings)
    return ConditionReport(
        labelings=labelings,
        one_third=any(l.one_third for l in labelings),
        two_fifths_sandwich=any(l.sandwich for l in labelings),
        all_strictly_inside=all(l.strict_inside for l in labelings),
        isosceles_above=any(l.isosceles_above for l in labelings),
        isosceles_below=any(l.isosceles_below for l in labelings),
    )


def edge_incidence(pent: Pentagram, c: DiskPoint) -> int:
    """Number of pentagram edges whose supporting line passes through c."""
    count = 0
    for edge in pent.edges:
        ax, ay = edge.a.xy
        bx, by = edge.b.xy
        ex, ey = bx - ax, by - ay
        dist = abs(ex * (c.y - ay) - ey * (c.x - ax)) / math.hypot(ex, ey)
        if dist <= CLOSURE_TOL:
            count += 1
    return count


def ideal_chain(t: float) -> list[IdealPoint]:
    """Six-step boundary chain of the canonical triangle's base-line ideals.

    The chain starts from the ideal points of the apex-to-bottom side,
    adds the auxiliary point across the top vertex, and then follows the
    map three more steps.  Defined for 0.8 < t < 1.
    """
    if not 0.8 < t < 1.0:
        raise OutOfRange(f"chain requires 0.8 < t < 1, got {t}")
    p = DiskPoint(0.0, t)
    q = DiskPoint(0.0, -t)
    r = DiskPoint((t - 1.0) / (t + 1.0), 0.0)
    tmap = triangle_map(Triangle(p, q, r))
    ch = chord_through(q, r)
    u3, u2 = ch.a, ch.b  # nearer the bottom vertex; the upper-left one
    u1 = second_intersection(u2, p)
    chain = [u1, u2, u3]
    a = u3.angle
    for _ in range(3):
        a = tmap.eval_angle(a)
        chain.append(IdealPoint(a))
    return chain


def orbit_derivative_product(t: float) -> float:
    """Product of the five point-map derivatives along the ideal chain.

    Stays below 1 on 0.8 < t < 1, which makes the fifth iterate a
    contraction off the closing orbit.
    """
    chain = ideal_chain(t)
    p = DiskPoint(0.0, t)
    q = DiskPoint(0.0, -t)
    r = DiskPoint((t - 1.0) / (t + 1.0), 0.0)

    def dist(dp: DiskPoint, ip: IdealPoint) -> float:
        x, y = ip.xy
        return math.hypot(dp.x - x, dp.y - y)

    u1, u2, u3, u4, u5, u6 = chain
    return (
        (dist(p, u2) / dist(p, u1))
        * (dist(r, u3) / dist(r, u2))
        * (dist(p, u4) / dist(p, u3))
        * (dist(r, u5) / dist(r, u4))
        * (dist(q, u6) / dist(q, u5))
    )


def contraction_check(t: float, v: IdealPoint) -> bool:
    """True when the fifth iterate pulls v back toward the gap's left end.

    v must lie strictly between two consecutive closing points; the gap's
    left endpoint is the closing point a with v in arc(a, next).
    """
    if not 0.8 < t < 1.0:
        raise OutOfRange(f"contraction regime requires 0.8 < t < 1, got {t}")
    tri, pent = standard_pentagram(t)
    tmap = triangle_map(tri)
    a_angles = sorted(pt.angle for pt in pent.points)
    for ang in a_angles:
        if angular_distance(v.angle, ang) <= 1e-12:
            raise NotInArc("point coincides with a closing orbit point")
    below = [ang for ang in a_angles if ang <= v.angle]
    left = below[-1] if below else a_angles[-1]
    w = v.angle
    for _ in range(5):
        w = tmap.eval_angle(w)
    return 0.0 < ccw_gap(left, w) < ccw_gap(left, v.angle)


def _line_intersection(a1, b1, a2, b2) -> Optional[tuple[float, float]]:
    d1x, d1y = b1[0] - a1[0], b1[1] - a1[1]
    d2x, d2y = b2[0] - a2[0], b2[1] - a2[1]
    det = d1x * d2y - d1y * d2x
    if abs(det) < 1e-14:
        return None
    s = ((a2[0] - a1[0]) * d2y - (a2[1] - a1[1]) * d2x) / det
    return (a1[0] + s * d1x, a1[1] + s * d1y)


def pentagram_witness(p: DiskPoint, q: DiskPoint, r: DiskPoint) -> IdealPoint:
    """Boundary point whose two-tangent chord construction recovers r.

    Only defined when the apex distance equals half the order-1
    threshold of the base; the witness generates the closing pentagram.
    Found by a bounded 1-D search over the witness angle.
    """
    base = hyp_distance(p, q)
    _, delta = foot_and_delta(p, q, r)
    if abs(delta - 0.5 * delta_n(base, 1)) > 1e-8:
        raise PreconditionFailed(
            "apex distance must equal half the order-1 threshold of the base"
        )
    ch = chord_through(p, q)
    v1, v2 = ch.a.xy, ch.b.xy
    excluded = (ch.a.angle, ch.b.angle)

    def objective(w_angle: float) -> float:
        wa = wrap_turns(w_angle)
        if min(angular_distance(wa, e) for e in excluded) < 1e-7:
            return 10.0
        w = IdealPoint(wa)
        w1 = second_intersection(w, p)
        w2 = second_intersection(w, q)
        x = _line_intersection(v1, w2.xy, v2, w1.xy)
        if x is None:
            return 10.0
        return math.hypot(x[0] - r.x, x[1] - r.y)

    coarse = 720
    grid = np.arange(coarse) / coarse
    vals = np.array([objective(a) for a in grid])
    order = np.argsort(vals, kind="stable")[:3]
    best: Optional[tuple[float, float]] = None
    for i in order:
        lo = grid[i] - 1.0 / coarse
        hi = grid[i] + 1.0 / coarse
        x_w, f_w = golden_min(objective, lo, hi, xtol=1e-12)
        if best is None or f_w < best[1]:
            best = (x_w, f_w)
    if best is None or best[1] > 1e-8:
        raise NoWitness("no boundary witness reproduces the apex within tolerance")
    return IdealPoint(wrap_turns(best[0]))


def conjecture_check(
    tri: Triangle,
    n: int = 100_000,
    q_max: int = 64,
    grid: int = 4096,
) -> ConjectureVerdict:
    """Compare the sandwich condition with the certified rotation number."""
    report = condition_report(tri)
    rotation = classify_rho(triangle_map(tri), n=n, q_max=q_max, grid=grid)
    cert = rotation.certificate
    if cert is not None:
        if (cert.p, cert.q) == (2, 5):
            verdict = "equals"
        else:
            verdict = "below" if cert.p * 5 < cert.q * 2 else "above"
    elif rotation.comparison is not None and (rotation.comparison.p, rotation.comparison.q) == (2, 5):
        verdict = "below" if rotation.comparison.relation == "less" else "above"
    else:
        verdict = "uncertified"
    condition = report.two_fifths_sandwich
    consistent = verdict != "uncertified" and condition == (verdict == "equals")
    return ConjectureVerdict(
        condition=condition,
        rho_verdict=verdict,
        consistent=consistent,
        report=report,
        rotation=rotation,
    )
