"""External watchman routes for a single convex polygon.

From a point p outside a convex polygon, edge k (v_k -> v_{k+1}) is seen in
full exactly when p lies in the closed outer half-plane of that edge, and not
at all otherwise.  A route segment meets a half-plane iff one of its
endpoints does, so coverage is decided exactly from the route vertices.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Optional

from gmpy2 import mpq

from .errors import InvalidParameters, RouteIntersectsInterior
from .geom import (ConvexPolygon, Point, Q, dist, orient, polyline_length,
                   segment_hits_interior)

SQRT3_INV = mpq(Fraction(1 / math.sqrt(3)).limit_denominator(10 ** 13))


class RouteKind(str, enum.Enum):
    PERIMETER = "PERIMETER"
    DOUBLED_CHAIN = "DOUBLED_CHAIN"


@dataclass(frozen=True)
class WatchmanRoute:
    kind: RouteKind
    polyline: tuple          # closed tour, or the open chain when doubled
    length: float
    doubled: bool = False
    arc: tuple = ()          # (i, j) vertex indices of the wrapped arc

    @property
    def chain_length(self) -> float:
        return polyline_length(self.polyline) if self.doubled else self.length

    def closed_polyline(self) -> list:
        if not self.doubled:
            return list(self.polyline)
        return list(self.polyline) + list(self.polyline[-2:0:-1])


# ---------------------------------------------------------------------------
# coverage


def visible_edges(p, P: ConvexPolygon) -> frozenset:
    """Edges of P fully visible from p (p in the closed exterior of P)."""
    if P.locate(p) > 0:
        raise RouteIntersectsInterior(f"viewpoint {tuple(p)} is inside the polygon")
    vs = P.vertices
    n = len(vs)
    return frozenset(k for k in range(n) if orient(vs[k], vs[(k + 1) % n], p) <= 0)


def visible_arc(p, P: ConvexPolygon):
    """Visible boundary part from p as (start, end) in edge-index units, CCW.

    The arc runs from the right tangent vertex to the left one; ``end`` may
    exceed n when the arc wraps past vertex 0.
    """
    ks = visible_edges(p, P)
    n = len(P)
    if len(ks) == n:
        return (0, n)
    start = next(k for k in range(n) if k in ks and (k - 1) % n not in ks)
    m = 0
    while (start + m) % n in ks:
        m += 1
    return (start, start + m)


def _union_covers(arcs, n) -> bool:
    covered = [False] * n
    for a, b in arcs:
        for k in range(a, b):
            covered[k % n] = True
    return all(covered)


def coverage_check(route: WatchmanRoute, P: ConvexPolygon, samples: int = 64) -> bool:
    """True iff every boundary point of P is seen from some route point."""
    pts = route.closed_polyline()
    m = len(pts)
    for k in range(m if m > 1 else 0):
        a, b = pts[k], pts[(k + 1) % m]
        if a != b and segment_hits_interior(P, a, b):
            raise RouteIntersectsInterior(f"route edge {k} enters the polygon")
    view = list(pts)
    if samples > 0 and m > 1:
        for k in range(m):
            a, b = pts[k], pts[(k + 1) % m]
            for s in range(1, samples):
                t = mpq(s, samples)
                view.append(Point(a[0] + (b[0] - a[0]) * t, a[1] + (b[1] - a[1]) * t))
    n = len(P)
    return _union_covers([visible_arc(p, P) for p in view], n)


# ---------------------------------------------------------------------------
# route types


def perimeter_route(P: ConvexPolygon) -> WatchmanRoute:
    return WatchmanRoute(RouteKind.PERIMETER, tuple(P.vertices), P.perimeter)


def _outer_halfplane(P, k):
    """(a, b, c) with a x + b y >= c the closed outer side of edge k."""
    vs = P.vertices
    u, v = vs[k], vs[(k + 1) % len(vs)]
    a = v[1] - u[1]
    b = u[0] - v[0]
    return a, b, a * u[0] + b * u[1]


def _project(p, hps):
    """Exact nearest point to p in the intersection of closed half-planes."""
    def feasible(q):
        return all(a * q[0] + b * q[1] >= c for a, b, c in hps)

    if feasible(p):
        return p
    best = None
    cands = []
    for a, b, c in hps:
        t = (c - a * p[0] - b * p[1]) / (a * a + b * b)
        cands.append(Point(p[0] + a * t, p[1] + b * t))
    for (a1, b1, c1), (a2, b2, c2) in combinations(hps, 2):
        det = a1 * b2 - a2 * b1
        if det != 0:
            cands.append(Point((c1 * b2 - c2 * b1) / det, (a1 * c2 - a2 * c1) / det))
    for q in cands:
        if feasible(q):
            d = (q[0] - p[0]) ** 2 + (q[1] - p[1]) ** 2
            if best is None or d < best[0]:
                best = (d, q)
    return None if best is None else best[1]


def _arc(P, i, j):
    vs = P.vertices
    n = len(vs)
    out = [vs[i]]
    k = i
    while k != j:
        k = (k + 1) % n
        out.append(vs[k])
    return out


def doubled_chain_route(P: ConvexPolygon, i: int, j: int) -> Optional[WatchmanRoute]:
    """Best doubled chain wrapping the CCW arc from vertex i to vertex j.

    ``i == j`` gives an empty arc (two legs meeting at a vertex).  Edges not
    seen from the arc are split between the two legs; each leg runs straight
    to the nearest point that sees its edges.  Returns None when no split
    admits legs that stay outside P.
    """
    vs = P.vertices
    n = len(vs)
    i %= n
    j %= n
    arc = _arc(P, i, j)
    seen = set()
    for p in arc:
        seen |= visible_edges(p, P)
    # uncovered edges in CCW order after the arc end, so a prefix goes to the end leg
    todo = [(j + k) % n for k in range(n) if (j + k) % n not in seen]
    best = None
    for cut in range(len(todo) + 1):
        to_end, to_start = todo[:cut], todo[cut:]
        legs = []
        for anchor, edges in ((arc[0], to_start), (arc[-1], to_end)):
            if not edges:
                legs.append(anchor)
                continue
            q = _project(anchor, [_outer_halfplane(P, k) for k in edges])
            if q is None or (q != anchor and segment_hits_interior(P, anchor, q)):
                legs.append(None)
                break
            legs.append(q)
        if len(legs) < 2 or None in legs:
            continue
        chain = [legs[0]] + arc + [legs[1]]
        chain = [p for k, p in enumerate(chain) if k == 0 or p != chain[k - 1]]
        L = polyline_length(chain)
        if best is None or L < best[0] - 1e-15:
            best = (L, chain)
    if best is None:
        return None
    L, chain = best
    return WatchmanRoute(RouteKind.DOUBLED_CHAIN, tuple(chain), 2.0 * L, True, (i, j))


def best_external_watchman(P: ConvexPolygon) -> WatchmanRoute:
    """Shortest route among the perimeter and every doubled chain (candidate search)."""
    best = perimeter_route(P)
    n = len(P)
    for i in range(n):
        for j in range(n):
            r = doubled_chain_route(P, i, j)
            # vertex viewpoints already decide coverage exactly
            if r is None or not coverage_check(r, P, samples=0):
                continue
            if r.length < best.length and not math.isclose(r.length, best.length, rel_tol=1e-12):
                best = r
    return best


# ---------------------------------------------------------------------------
# obtuse counterexamples


def _angles_obtuse(vs) -> bool:
    n = len(vs)
    for k in range(n):
        a, v, b = vs[k - 1], vs[k], vs[(k + 1) % n]
        if (a[0] - v[0]) * (b[0] - v[0]) + (a[1] - v[1]) * (b[1] - v[1]) >= 0:
            return False
    return True


def interior_angles(P: ConvexPolygon) -> list:
    vs = P.float_vertices
    n = len(vs)
    out = []
    for k in range(n):
        a, v, b = vs[k - 1], vs[k], vs[(k + 1) % n]
        u = (a[0] - v[0], a[1] - v[1])
        w = (b[0] - v[0], b[1] - v[1])
        out.append(math.degrees(math.atan2(abs(u[0] * w[1] - u[1] * w[0]), u[0] * w[0] + u[1] * w[1])))
    return out


def _shave(vs, k, t):
    """Cut vertex k by the segment joining the points at fraction t along both incident edges."""
    n = len(vs)
    a, v, b = vs[k - 1], vs[k], vs[(k + 1) % n]
    p = Point(v[0] + (a[0] - v[0]) * t, v[1] + (a[1] - v[1]) * t)
    q = Point(v[0] + (b[0] - v[0]) * t, v[1] + (b[1] - v[1]) * t)
    return vs[:k] + [p, q] + vs[k + 1:]


def _cut_isosceles(vs, k, leg):
    """Cut vertex k with equal (rationally approximated) legs of length ``leg``."""
    n = len(vs)
    a, v, b = vs[k - 1], vs[k], vs[(k + 1) % n]
    ta = mpq(Fraction(leg / dist(a, v)).limit_denominator(10 ** 12))
    tb = mpq(Fraction(leg / dist(b, v)).limit_denominator(10 ** 12))
    p = Point(v[0] + (a[0] - v[0]) * ta, v[1] + (a[1] - v[1]) * ta)
    q = Point(v[0] + (b[0] - v[0]) * tb, v[1] + (b[1] - v[1]) * tb)
    return vs[:k] + [p, q] + vs[k + 1:]


def make_theorem5_polygon(n: int, eps) -> ConvexPolygon:
    """All-obtuse convex n-gon whose perimeter is not the shortest watchman route.

    n = 5 is the slightly shortened-base pentagon; n = 7 cuts nearly
    isosceles right triangles off both base corners; other n repeatedly shave
    the lowest base corners.
    """
    if n < 5:
        raise InvalidParameters("every triangle or convex quadrilateral has a non-obtuse angle")
    e = Q(Fraction(eps).limit_denominator(10 ** 12)) if isinstance(eps, float) else Q(eps)
    bound = (2 - math.sqrt(3)) / (3 * math.sqrt(3))
    if not (0 < e) or float(e) >= bound:
        raise InvalidParameters(f"eps must lie in (0, {bound:.6f}), got {float(e)}")
    half = 1 - e * e
    vs = [Point(-half, Q(0)), Point(half, Q(0)), Point(Q(1), e),
          Point(Q(0), e + SQRT3_INV), Point(Q(-1), e)]
    if n == 7:
        leg = float(e) / 2
        vs = _cut_isosceles(vs, 1, leg)          # right base corner
        vs = _cut_isosceles(vs, 0, leg)          # left base corner
    elif n > 5:
        while len(vs) < n:
            # shave the base vertex with the smallest angle, leftmost on ties
            P = ConvexPolygon(vs)
            ang = interior_angles(P)
            low = [k for k, v in enumerate(vs) if v[1] < e]
            k = min(low, key=lambda k: (ang[k], vs[k][0]))
            vs = _shave(vs, k, mpq(1, 3))
    P = ConvexPolygon(vs)
    if not _angles_obtuse(P.vertices):
        raise AssertionError("constructed polygon has a non-obtuse angle")
    return P
