"""Touring regions: a witness heuristic for TSPN plus a small exact oracle.

Witnesses (touch points) are exact rational points that lie in their closed
region; lengths are floats.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from gmpy2 import mpq

from . import kernels
from .errors import EmptyRegionSet, TooManyRegions
from .geom import Point, Q, dist, polyline_length, segment_intersection
from .visibility import PolygonWithHoles, region_arrays

REL_TOL = 1e-7
MAX_ROUNDS = 200
DENOM = 1 << 40


@dataclass(frozen=True)
class RegionSet:
    regions: tuple
    box: tuple

    def __post_init__(self):
        object.__setattr__(self, "regions", tuple(self.regions))
        object.__setattr__(self, "box", tuple(Q(v) for v in self.box))

    def __len__(self):
        return len(self.regions)


@dataclass
class Tour:
    vertices: list                      # closed, stored without repeating the start
    length: float
    witness: dict                       # region index -> Point on the tour
    order: list = field(default_factory=list)
    provenance: list = field(default_factory=list)   # "tspn" / "detour" per vertex
    detour_log: list = field(default_factory=list)   # (obstacle, chord, boundary path)
    detour_rounds: int = 0

    def float_vertices(self):
        return [(float(v[0]), float(v[1])) for v in self.vertices]


def region_from_convex(C) -> PolygonWithHoles:
    return PolygonWithHoles(tuple(C.vertices), ())


def _tour_from_order(order, pts) -> Tour:
    verts = []
    prov = []
    for i in order:
        p = pts[i]
        if not verts or verts[-1] != p:
            verts.append(p)
            prov.append("tspn")
    if len(verts) > 1 and verts[-1] == verts[0]:
        verts.pop()
        prov.pop()
    return Tour(verts, polyline_length(verts, closed=True) if len(verts) > 1 else 0.0,
                {i: pts[i] for i in order}, list(order), prov)


def tour_is_valid(T: Tour, rs: RegionSet) -> bool:
    vs = set(T.vertices)
    for i, R in enumerate(rs.regions):
        w = T.witness.get(i)
        if w is None or w not in vs or not R.contains(w):
            return False
    return True


# ---------------------------------------------------------------------------
# common point detection


def _ring_edges(R: PolygonWithHoles):
    for r in R.rings:
        n = len(r)
        for k in range(n):
            yield r[k], r[(k + 1) % n]


def common_point(rs: RegionSet) -> Optional[Point]:
    """Exact: a point in every region, or None.

    The lexicographically smallest point of a nonempty intersection is a
    region vertex or a crossing of two region edges, so those candidates are
    complete.
    """
    regs = rs.regions
    if not regs:
        raise EmptyRegionSet("no regions")
    cands = set()
    for R in regs:
        for r in R.rings:
            cands.update(r)
    edges = [(k, a, b) for k, R in enumerate(regs) for a, b in _ring_edges(R)]
    if len(regs) > 1 and edges:
        E = np.array([(float(a[0]), float(a[1]), float(b[0]), float(b[1])) for _, a, b in edges])
        owner = np.array([k for k, _, _ in edges])
        lo = np.minimum(E[:, :2], E[:, 2:])
        hi = np.maximum(E[:, :2], E[:, 2:])
        slack = 1e-9 * (1 + np.abs(E).max())
        for i in range(len(edges)):
            m = ((owner > owner[i]) & (lo[:, 0] <= hi[i, 0] + slack) & (hi[:, 0] >= lo[i, 0] - slack)
                 & (lo[:, 1] <= hi[i, 1] + slack) & (hi[:, 1] >= lo[i, 1] - slack))
            for j in np.nonzero(m)[0]:
                r = segment_intersection(edges[i][1], edges[i][2], edges[int(j)][1], edges[int(j)][2])
                if r is None:
                    continue
                if isinstance(r, Point):
                    cands.add(r)
                else:
                    cands.update(r)
    for c in sorted(cands):
        if all(R.contains(c) for R in regs):
            return c
    return None


# ---------------------------------------------------------------------------
# witnesses


def _exact_on_edge(a, b, t: float) -> Point:
    t = min(max(t, 0.0), 1.0)
    tq = mpq(round(t * DENOM), DENOM)
    return Point(a[0] + (b[0] - a[0]) * tq, a[1] + (b[1] - a[1]) * tq)


def deepest_point(R: PolygonWithHoles, grid: int = 48) -> Point:
    """Free-most grid point of R by clearance to its boundary (exact membership)."""
    pts, offs, segs = region_arrays(R)
    x0, y0, x1, y1 = (float(v) for v in R.bbox)
    for g in (grid, 4 * grid):
        xs = x0 + (np.arange(g) + 0.5) * (x1 - x0) / g
        ys = y0 + (np.arange(g) + 0.5) * (y1 - y0) / g
        P = np.stack(np.meshgrid(xs, ys), axis=-1).reshape(-1, 2)
        inside = kernels.points_in_rings(pts, offs, P)
        if not inside.any():
            continue
        P = P[inside]
        d = kernels.dist_to_segments(segs, P)
        for k in np.argsort(-d, kind="stable")[:8]:
            c = Point(mpq(round(P[k, 0] * DENOM), DENOM), mpq(round(P[k, 1] * DENOM), DENOM))
            if R.contains(c):
                return c
    return min(R.outer)


def _nn_order(pts) -> list:
    n = len(pts)
    left = list(range(1, n))
    order = [0]
    while left:
        cur = pts[order[-1]]
        k = min(left, key=lambda j: (math.hypot(pts[j][0] - cur[0], pts[j][1] - cur[1]), j))
        order.append(k)
        left.remove(k)
    return order


def two_opt(order, pts) -> list:
    """2-opt on float points; the first element stays in place."""
    order = list(order)
    n = len(order)

    def d(i, j):
        a, b = pts[order[i % n]], pts[order[j % n]]
        return math.hypot(a[0] - b[0], a[1] - b[1])

    improved = True
    while improved and n > 3:
        improved = False
        for i in range(n - 1):
            for j in range(i + 2, n if i > 0 else n - 1):
                delta = d(i, i + 1) + d(j, j + 1) - d(i, j) - d(i + 1, j + 1)
                if delta > 1e-12:
                    order[i + 1:j + 1] = order[i + 1:j + 1][::-1]
                    improved = True
    return order


# ---------------------------------------------------------------------------
# touch-point refinement


class _RegionCache:
    def __init__(self, R: PolygonWithHoles):
        self.R = R
        self.edges = list(_ring_edges(R))
        self.E = np.array([(float(a[0]), float(a[1]), float(b[0]), float(b[1])) for a, b in self.edges])


def _best_on_edges(E, a, b):
    """For each edge, the float minimiser t of |a x| + |x b| and its value."""
    px, py = E[:, 0], E[:, 1]
    dx, dy = E[:, 2] - px, E[:, 3] - py
    L2 = dx * dx + dy * dy
    # signed side of a and b w.r.t. each edge line
    sa = dx * (a[1] - py) - dy * (a[0] - px)
    sb = dx * (b[1] - py) - dy * (b[0] - px)
    # reflect b across the line when a and b are on the same side
    same = sa * sb > 0
    bx = np.where(same, b[0] - 2 * sb / L2 * (-dy), b[0])
    by = np.where(same, b[1] - 2 * sb / L2 * dx, b[1])
    # intersection of line a->b' with the edge line, as parameter along the edge
    ex, ey = bx - a[0], by - a[1]
    den = dx * ey - dy * ex
    with np.errstate(divide="ignore", invalid="ignore"):
        t = ((a[0] - px) * ey - (a[1] - py) * ex) / den
    t = np.where(np.isfinite(t), t, 0.0)
    t = np.clip(t, 0.0, 1.0)
    # convexity along the edge: also test both endpoints, keep the best
    cands = np.stack([t, np.zeros_like(t), np.ones_like(t)])
    xs = px + cands * dx
    ys = py + cands * dy
    f = np.hypot(xs - a[0], ys - a[1]) + np.hypot(xs - b[0], ys - b[1])
    k = f.argmin(axis=0)
    idx = np.arange(len(t))
    return cands[k, idx], f[k, idx]


def _best_point(cache: _RegionCache, a: Point, b: Point) -> Point:
    if cache.R.contains(a):
        return a
    if cache.R.contains(b):
        return b
    af = (float(a[0]), float(a[1]))
    bf = (float(b[0]), float(b[1]))
    t, f = _best_on_edges(cache.E, af, bf)
    k = int(f.argmin())
    e0, e1 = cache.edges[k]
    return _exact_on_edge(e0, e1, float(t[k]))


def _cycle_length(pts, order) -> float:
    n = len(order)
    if n < 2:
        return 0.0
    return sum(dist(pts[order[i]], pts[order[(i + 1) % n]]) for i in range(n))


def refine_touch_points(order, rs: RegionSet, T: Tour, tol: float = REL_TOL,
                        max_rounds: int = MAX_ROUNDS) -> Tour:
    """Move each witness to its best point given its two tour neighbours."""
    n = len(order)
    pts = dict(T.witness)
    if n < 2:
        return _tour_from_order(order, pts)
    caches = {i: _RegionCache(rs.regions[i]) for i in order}
    length = _cycle_length(pts, order)
    history = [length]
    for _ in range(max_rounds):
        start = length
        for k, i in enumerate(order):
            a = pts[order[k - 1]]
            b = pts[order[(k + 1) % n]]
            old = pts[i]
            new = _best_point(caches[i], a, b)
            if new == old:
                continue
            gain = dist(a, old) + dist(old, b) - dist(a, new) - dist(new, b)
            if gain > 0:
                pts[i] = new
                length -= gain
        length = _cycle_length(pts, order)
        if length > history[-1] + 1e-12 * max(1.0, history[-1]):
            raise AssertionError("touch-point refinement increased the tour length")
        history.append(length)
        if start - length < tol * max(length, 1e-300):
            break
    out = _tour_from_order(order, pts)
    return out


# ---------------------------------------------------------------------------
# entry points


def tspn_tour(rs: RegionSet, check_common: bool = True) -> Tour:
    """Witness heuristic; ``check_common=False`` skips zero detection when the
    caller already knows the regions have no common point."""
    if len(rs.regions) == 0:
        raise EmptyRegionSet("no regions")
    c = common_point(rs) if check_common else None
    if c is not None:
        return Tour([c], 0.0, {i: c for i in range(len(rs))}, list(range(len(rs))), ["tspn"])
    wit = [deepest_point(R) for R in rs.regions]
    fl = [p.to_float() for p in wit]
    order = two_opt(_nn_order(fl), fl)
    T0 = _tour_from_order(order, dict(enumerate(wit)))
    return refine_touch_points(order, rs, T0)


def _farthest_sample(points, k: int, seed_point=None):
    if len(points) <= k:
        return list(points)
    fl = np.array([p.to_float() for p in points])
    chosen = [0 if seed_point is None else points.index(seed_point)]
    d = np.hypot(*(fl - fl[chosen[0]]).T)
    while len(chosen) < k:
        j = int(d.argmax())
        chosen.append(j)
        d = np.minimum(d, np.hypot(*(fl - fl[j]).T))
    return [points[j] for j in chosen]


def region_candidates(R: PolygonWithHoles, cap: int) -> list:
    deep = deepest_point(R)
    pts = [deep]
    seen = {deep}
    for r in R.rings:
        n = len(r)
        for k in range(n):
            a, b = r[k], r[(k + 1) % n]
            for p in (a, Point((a[0] + b[0]) / 2, (a[1] + b[1]) / 2)):
                if p not in seen:
                    seen.add(p)
                    pts.append(p)
    return _farthest_sample(pts, cap, deep)


def distance_matrix(points) -> np.ndarray:
    fl = np.array([p.to_float() for p in points])
    return np.hypot(fl[:, None, 0] - fl[None, :, 0], fl[:, None, 1] - fl[None, :, 1])


def gtsp_tour(groups_pts):
    """Best closed tour picking one point per group; returns (order, picks)."""
    flat = []
    groups = []
    for g in groups_pts:
        groups.append(list(range(len(flat), len(flat) + len(g))))
        flat.extend(g)
    cost, seq = kernels.gtsp_held_karp(distance_matrix(flat), groups)
    owner = {c: k for k, g in enumerate(groups) for c in g}
    order = [owner[c] for c in seq]
    picks = {owner[c]: flat[c] for c in seq}
    return order, picks, cost


def exact_small_tspn(rs: RegionSet, candidates_per_region: int = 12) -> Tour:
    n = len(rs.regions)
    if n == 0:
        raise EmptyRegionSet("no regions")
    if n > 9:
        raise TooManyRegions(f"exact oracle supports at most 9 regions, got {n}")
    c = common_point(rs)
    if c is not None:
        return Tour([c], 0.0, {i: c for i in range(n)}, list(range(n)), ["tspn"])
    cand = [region_candidates(R, candidates_per_region) for R in rs.regions]
    order, picks, _ = gtsp_tour(cand)
    T0 = _tour_from_order(order, picks)
    return refine_touch_points(order, rs, T0)
