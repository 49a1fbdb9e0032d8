"""Exact planar primitives for convex polygons.

Combinatorial predicates (orientation, containment, tangency, clipping) run on
``gmpy2.mpq`` rationals and are exact.  Metric quantities (lengths, width,
diameter, fatness) are returned as floats.
"""
from __future__ import annotations

import math
from enum import IntEnum
from fractions import Fraction
from functools import cached_property
from typing import Iterable, NamedTuple, Sequence

from gmpy2 import mpq

from .errors import (
    BodiesIntersect,
    DegeneratePolygon,
    NonPositiveFatness,
    PointInsideBody,
    PointNotOnBoundary,
)

ZERO = mpq(0)
ONE = mpq(1)
HALF = mpq(1, 2)


def Q(value) -> mpq:
    """Convert ints, Fractions, floats (exactly) and "num/den" strings to mpq."""
    if isinstance(value, mpq):
        return value
    if isinstance(value, (int, Fraction)):
        return mpq(value)
    if isinstance(value, float):
        if not math.isfinite(value):
            raise ValueError(f"non-finite coordinate {value!r}")
        return mpq(value)
    if isinstance(value, str):
        return mpq(value.strip())
    return mpq(value)


class Point(NamedTuple):
    x: mpq
    y: mpq

    def __add__(self, other):  # type: ignore[override]
        return Point(self.x + other[0], self.y + other[1])

    def __sub__(self, other):
        return Point(self.x - other[0], self.y - other[1])

    def scale(self, k) -> "Point":
        return Point(self.x * k, self.y * k)

    def to_float(self) -> tuple[float, float]:
        return (float(self.x), float(self.y))


def pt(x, y) -> Point:
    return Point(Q(x), Q(y))


class Segment(NamedTuple):
    a: Point
    b: Point


class Orientation(IntEnum):
    CW = -1
    COLLINEAR = 0
    CCW = 1


def cross(ax, ay, bx, by):
    return ax * by - ay * bx


def orient(p, q, r):
    """Signed doubled area of (p, q, r); exact when the inputs are rationals."""
    return (q[0] - p[0]) * (r[1] - p[1]) - (q[1] - p[1]) * (r[0] - p[0])


def orientation(p, q, r) -> Orientation:
    v = orient(p, q, r)
    if v > 0:
        return Orientation.CCW
    if v < 0:
        return Orientation.CW
    return Orientation.COLLINEAR


def sign(v) -> int:
    return (v > 0) - (v < 0)


def dist(p, q) -> float:
    return math.hypot(float(p[0] - q[0]), float(p[1] - q[1]))


def dist2(p, q):
    dx = p[0] - q[0]
    dy = p[1] - q[1]
    return dx * dx + dy * dy


def polyline_length(points: Sequence, closed: bool = False) -> float:
    total = 0.0
    for a, b in zip(points, points[1:]):
        total += dist(a, b)
    if closed and len(points) > 1:
        total += dist(points[-1], points[0])
    return total


def signed_area2(points: Sequence):
    s = 0
    n = len(points)
    for i in range(n):
        a = points[i]
        b = points[(i + 1) % n]
        s += a[0] * b[1] - a[1] * b[0]
    return s


def on_segment(p, a, b) -> bool:
    """Closed-segment membership, exact."""
    if orient(a, b, p) != 0:
        return False
    return (min(a[0], b[0]) <= p[0] <= max(a[0], b[0])
            and min(a[1], b[1]) <= p[1] <= max(a[1], b[1]))


def segment_intersection(a, b, c, d):
    """Intersection of closed segments ab and cd.

    Returns None, a single Point, or a (Point, Point) pair for collinear
    overlaps.
    """
    d1 = orient(c, d, a)
    d2 = orient(c, d, b)
    d3 = orient(a, b, c)
    d4 = orient(a, b, d)
    if d1 == 0 and d2 == 0:
        # collinear
        key = 0 if a[0] != b[0] else 1
        lo1, hi1 = sorted((a, b), key=lambda p: p[key])
        lo2, hi2 = sorted((c, d), key=lambda p: p[key])
        lo = lo1 if lo1[key] >= lo2[key] else lo2
        hi = hi1 if hi1[key] <= hi2[key] else hi2
        if lo[key] > hi[key]:
            return None
        if lo == hi or lo[key] == hi[key]:
            return Point(*lo)
        return (Point(*lo), Point(*hi))
    if ((d1 > 0 and d2 > 0) or (d1 < 0 and d2 < 0)
            or (d3 > 0 and d4 > 0) or (d3 < 0 and d4 < 0)):
        return None
    denom = d1 - d2
    t = d1 / denom
    return Point(a[0] + (b[0] - a[0]) * t, a[1] + (b[1] - a[1]) * t)


def line_intersection(p1, p2, p3, p4):
    """Intersection of the infinite lines p1p2 and p3p4 (None if parallel)."""
    d = cross(p2[0] - p1[0], p2[1] - p1[1], p4[0] - p3[0], p4[1] - p3[1])
    if d == 0:
        return None
    t = cross(p3[0] - p1[0], p3[1] - p1[1], p4[0] - p3[0], p4[1] - p3[1]) / d
    return Point(p1[0] + (p2[0] - p1[0]) * t, p1[1] + (p2[1] - p1[1]) * t)


class ConvexPolygon:
    """Strictly convex polygon with CCW vertices and no collinear triples."""

    __slots__ = ("vertices", "__dict__")

    def __init__(self, vertices: Iterable):
        vs = tuple(Point(Q(v[0]), Q(v[1])) for v in vertices)
        n = len(vs)
        if n < 3:
            raise DegeneratePolygon("a convex polygon needs at least 3 vertices")
        if len(set(vs)) != n:
            raise DegeneratePolygon("repeated vertex")
        for i in range(n):
            if orient(vs[i], vs[(i + 1) % n], vs[(i + 2) % n]) <= 0:
                raise DegeneratePolygon(
                    f"vertices not in strictly convex CCW position at index {(i + 1) % n}")
        # consecutive left turns plus positive total area may still wind twice
        for i in range(n):
            a, b = vs[i], vs[(i + 1) % n]
            for k in range(n):
                if k != i and k != (i + 1) % n and orient(a, b, vs[k]) <= 0:
                    raise DegeneratePolygon("vertex list is not a simple convex polygon")
        self.vertices = vs

    @classmethod
    def hull(cls, points: Iterable) -> "ConvexPolygon":
        """Convex hull (collinear points dropped) as a ConvexPolygon."""
        pts = sorted({Point(Q(p[0]), Q(p[1])) for p in points})
        if len(pts) < 3:
            raise DegeneratePolygon("hull of fewer than 3 distinct points")
        lower: list[Point] = []
        for p in pts:
            while len(lower) >= 2 and orient(lower[-2], lower[-1], p) <= 0:
                lower.pop()
            lower.append(p)
        upper: list[Point] = []
        for p in reversed(pts):
            while len(upper) >= 2 and orient(upper[-2], upper[-1], p) <= 0:
                upper.pop()
            upper.append(p)
        return cls(lower[:-1] + upper[:-1])

    def __len__(self):
        return len(self.vertices)

    def __iter__(self):
        return iter(self.vertices)

    def __eq__(self, other):
        return isinstance(other, ConvexPolygon) and self.vertices == other.vertices

    def __hash__(self):
        return hash(self.vertices)

    def __repr__(self):
        inner = ", ".join(f"({v.x}, {v.y})" for v in self.vertices)
        return f"ConvexPolygon([{inner}])"

    def edges(self):
        vs = self.vertices
        n = len(vs)
        return [(vs[i], vs[(i + 1) % n]) for i in range(n)]

    def translate(self, dx, dy) -> "ConvexPolygon":
        dx, dy = Q(dx), Q(dy)
        return ConvexPolygon([(v.x + dx, v.y + dy) for v in self.vertices])

    def map(self, fn) -> "ConvexPolygon":
        """Apply an orientation-preserving affine map given as fn(Point)->Point."""
        return ConvexPolygon([fn(v) for v in self.vertices])

    @cached_property
    def bbox(self):
        xs = [v.x for v in self.vertices]
        ys = [v.y for v in self.vertices]
        return (min(xs), min(ys), max(xs), max(ys))

    @cached_property
    def perimeter(self) -> float:
        return polyline_length(self.vertices, closed=True)

    @cached_property
    def centroid(self) -> Point:
        # vertex average: exact and strictly interior for a convex polygon
        n = len(self.vertices)
        return Point(sum(v.x for v in self.vertices) / n, sum(v.y for v in self.vertices) / n)

    @cached_property
    def float_vertices(self) -> list[tuple[float, float]]:
        return [v.to_float() for v in self.vertices]

    @cached_property
    def metrics(self) -> tuple[float, float, float]:
        return width_diameter(self)

    # -- exact point location -------------------------------------------
    def locate(self, p) -> int:
        """+1 strictly inside, 0 on the boundary, -1 strictly outside."""
        vs = self.vertices
        n = len(vs)
        on_edge = False
        for i in range(n):
            o = orient(vs[i], vs[(i + 1) % n], p)
            if o < 0:
                return -1
            if o == 0:
                on_edge = True
        return 0 if on_edge else 1

    def contains(self, p) -> bool:
        return self.locate(p) >= 0

    def contains_interior(self, p) -> bool:
        return self.locate(p) > 0

    def on_boundary(self, p) -> bool:
        return self.locate(p) == 0

    def boundary_edge_of(self, p) -> int:
        """Index k with p on edge (v_k, v_{k+1}), p != v_{k+1}; raises if off the boundary."""
        vs = self.vertices
        n = len(vs)
        if self.locate(p) != 0:
            raise PointNotOnBoundary(f"point {tuple(p)} is not on the polygon boundary")
        for k in range(n):
            a, b = vs[k], vs[(k + 1) % n]
            if p != b and on_segment(p, a, b):
                return k
        raise PointNotOnBoundary(f"point {tuple(p)} is not on the polygon boundary")


# ---------------------------------------------------------------------------
# tangents


def tangent_points(p, C: ConvexPolygon) -> tuple[Point, Point]:
    """Return (left, right) tangent vertices of C seen from exterior point p.

    The CCW angular interval from ``right`` to ``left`` subtends C.  When p is
    collinear with an edge, the nearer endpoint of that edge is returned.
    """
    if C.locate(p) >= 0:
        raise PointInsideBody(f"point {tuple(p)} lies in the polygon")
    vs = C.vertices
    n = len(vs)
    right = left = None
    # p is outside a convex polygon, so the supporting property is local
    for i in range(n):
        v = vs[i]
        o1 = orient(p, v, vs[i - 1])
        o2 = orient(p, v, vs[(i + 1) % n])
        if o1 >= 0 and o2 >= 0 and (right is None or dist2(p, v) < dist2(p, right)):
            right = v
        if o1 <= 0 and o2 <= 0 and (left is None or dist2(p, v) < dist2(p, left)):
            left = v
    assert right is not None and left is not None
    return left, right


def polygons_disjoint(A: ConvexPolygon, B: ConvexPolygon) -> bool:
    """True iff A and B are at positive distance (strict separating axis)."""
    for P, R in ((A, B), (B, A)):
        for a, b in P.edges():
            if all(orient(a, b, v) < 0 for v in R.vertices):
                return True
    return False


class TangentLine(NamedTuple):
    kind: str  # "outer" or "inner"
    a: Point   # touch point on the first polygon
    b: Point   # touch point on the second polygon


def _supports(C: ConvexPolygon, a, b) -> int:
    """Side (+1 left, -1 right) on which C lies w.r.t. line ab, 0 if it crosses."""
    s = 0
    for v in C.vertices:
        o = sign(orient(a, b, v))
        if o == 0:
            continue
        if s == 0:
            s = o
        elif o != s:
            return 0
    return s


def line_key(a, b):
    """Canonical (A, B, C) for the line A x + B y = C through a and b."""
    A = b[1] - a[1]
    B = a[0] - b[0]
    Cc = A * a[0] + B * a[1]
    k = A if A != 0 else B
    return (A / k, B / k, Cc / k)


def common_tangents(C1: ConvexPolygon, C2: ConvexPolygon) -> list[TangentLine]:
    """The two outer and two inner common tangents of disjoint C1, C2."""
    if not polygons_disjoint(C1, C2):
        raise BodiesIntersect("common tangents need disjoint polygons")
    found: dict = {}
    for u in C1.vertices:
        for v in tangent_points(u, C2):
            s1 = _supports(C1, u, v)
            if s1 == 0:
                continue
            s2 = _supports(C2, u, v)
            key = line_key(u, v)
            if key in found:
                continue
            found[key] = TangentLine("outer" if s1 == s2 else "inner", u, v)
    lines = sorted(found.values(), key=lambda t: (t.kind != "outer", t.a, t.b))
    if len(lines) != 4 or sum(t.kind == "outer" for t in lines) != 2:
        raise AssertionError(f"expected 2 outer + 2 inner tangents, got {lines}")
    return lines


# ---------------------------------------------------------------------------
# metrics


def width_diameter(C: ConvexPolygon) -> tuple[float, float, float]:
    """(width, diameter, fatness) with width from edge-aligned calipers."""
    vs = C.vertices
    D2 = max(dist2(a, b) for i, a in enumerate(vs) for b in vs[i + 1:])
    D = math.sqrt(float(D2))
    w = math.inf
    for a, b in C.edges():
        far = max(abs(orient(a, b, v)) for v in vs)
        w = min(w, float(far) / dist(a, b))
    return w, D, w / D


def dilation_upper_bound(lam: float) -> float:
    """Upper bound on the geometric dilation of a lam-fat convex curve."""
    if lam <= 0:
        raise NonPositiveFatness(f"fatness must be positive, got {lam}")
    if lam > 1 + 1e-12:
        raise ValueError(f"fatness cannot exceed 1, got {lam}")
    return min(math.pi / lam, 2.0 * (1.0 / lam + 1.0))


def boundary_geodesic(C: ConvexPolygon, p, q) -> tuple[list[Point], float]:
    """Shorter boundary arc from p to q (CCW on an exact tie)."""
    p = Point(Q(p[0]), Q(p[1]))
    q = Point(Q(q[0]), Q(q[1]))
    kp = C.boundary_edge_of(p)
    kq = C.boundary_edge_of(q)
    if p == q:
        return [p], 0.0
    vs = C.vertices
    n = len(vs)

    def ccw_arc(s, ks, t, kt):
        a = vs[ks]
        e = vs[(ks + 1) % n] - a
        if ks == kt and (t - a)[0] * e[0] + (t - a)[1] * e[1] >= (s - a)[0] * e[0] + (s - a)[1] * e[1]:
            return [s, t]
        arc = [s]
        k = (ks + 1) % n
        while True:
            if vs[k] != arc[-1]:
                arc.append(vs[k])
            if k == kt:
                break
            k = (k + 1) % n
        if t != arc[-1]:
            arc.append(t)
        return arc

    fwd = ccw_arc(p, kp, q, kq)
    back = ccw_arc(q, kq, p, kp)[::-1]
    lf = polyline_length(fwd)
    lb = polyline_length(back)
    if lb < lf and not math.isclose(lf, lb, rel_tol=1e-12, abs_tol=0.0):
        return back, lb
    return fwd, lf


# ---------------------------------------------------------------------------
# segment / ray versus convex polygon


def clip_line(C: ConvexPolygon, p, d, t_lo=None, t_hi=None):
    """Parameter range [t0, t1] of {p + t d} inside closed C, or None.

    ``t_lo``/``t_hi`` restrict the parameter (None = unbounded).
    """
    vs = C.vertices
    n = len(vs)
    lo, hi = t_lo, t_hi
    for i in range(n):
        a = vs[i]
        b = vs[(i + 1) % n]
        ex = b[0] - a[0]
        ey = b[1] - a[1]
        num = ex * (p[1] - a[1]) - ey * (p[0] - a[0])   # cross(e, p - a)
        den = ex * d[1] - ey * d[0]                     # cross(e, d)
        # inside iff num + t * den >= 0
        if den == 0:
            if num < 0:
                return None
            continue
        t = -num / den
        if den > 0:
            if lo is None or t > lo:
                lo = t
        else:
            if hi is None or t < hi:
                hi = t
        if lo is not None and hi is not None and lo > hi:
            return None
    return lo, hi


def segment_interior_chord(C: ConvexPolygon, a, b):
    """(t0, t1) with 0<=t0<t1<=1 if segment ab meets the open interior of C."""
    d = (b[0] - a[0], b[1] - a[1])
    r = clip_line(C, a, d, ZERO, ONE)
    if r is None:
        return None
    t0, t1 = r
    if t0 >= t1:
        return None
    tm = (t0 + t1) / 2
    m = (a[0] + d[0] * tm, a[1] + d[1] * tm)
    if C.locate(m) <= 0:
        return None  # runs along the boundary only
    return t0, t1


def segment_hits_interior(C: ConvexPolygon, a, b) -> bool:
    return segment_interior_chord(C, a, b) is not None


def ray_entry(C: ConvexPolygon, p, d):
    """Smallest t >= 0 with p + t d in C, or None."""
    r = clip_line(C, p, d, ZERO, None)
    if r is None:
        return None
    lo, hi = r
    if hi is not None and lo > hi:
        return None
    return lo
