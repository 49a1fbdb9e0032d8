"""Disk packings (as inscribed regular polygons) and routes through them.

``maximal_disk_packing`` drops unit disks greedily at random centres, then
closes any gap a 0.25-pitch sweep still finds, so the sweep certifies
maximality.  ``strip_traversal_route`` sweeps 4-high horizontal strips in a
zig-zag, either walking around every obstacle (watchman mode) or only
touching it (neighbourhood mode).  ``sparse_lattice`` is the tiny-disk grid
used to contrast watching with touring.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
from gmpy2 import mpq

from ..geom import ConvexPolygon, Point, Q, dist, polyline_length
from ..orp import ObservationRoute, detour_transform, validate_observation_route
from ..tspn import RegionSet, Tour, region_from_convex, tspn_tour
from ..visibility import Instance

GRID = 1024          # centres are multiples of 1/GRID
REJECT_LIMIT = 10_000
SWEEP_PITCH = mpq(1, 4)
POLY_RADIUS = 0.99


def regular_polygon(c, r: float, k: int, phase: float = 0.0) -> ConvexPolygon:
    """Regular k-gon inscribed in the circle (c, r), rational vertices."""
    vs = []
    for t in range(k):
        a = phase + 2 * math.pi * t / k
        vs.append(Point(c[0] + mpq(Fraction(r * math.cos(a)).limit_denominator(1 << 24)),
                        c[1] + mpq(Fraction(r * math.sin(a)).limit_denominator(1 << 24))))
    return ConvexPolygon(vs)


@dataclass
class Packing:
    side: mpq
    centres: list
    instance: Instance
    greedy_count: int
    sweep_added: int
    certified: bool
    seed: int
    kgon: int

    @property
    def n(self) -> int:
        return len(self.centres)


def _fits(c, centres) -> bool:
    return all((c[0] - d[0]) ** 2 + (c[1] - d[1]) ** 2 >= 4 for d in centres)


def _sweep_points(side):
    pts = []
    x = Q(1)
    while x <= side - 1:
        y = Q(1)
        while y <= side - 1:
            pts.append(Point(x, y))
            y += SWEEP_PITCH
        x += SWEEP_PITCH
    return pts


def _free_sweep_points(side, centres):
    pts = _sweep_points(side)
    if not centres:
        return pts
    P = np.array([p.to_float() for p in pts])
    C = np.array([c.to_float() for c in centres])
    d2 = ((P[:, None, :] - C[None, :, :]) ** 2).sum(axis=2).min(axis=1)
    # float prefilter with margin, exact decision near the threshold
    return [p for p, v in zip(pts, d2) if v > 4 - 1e-6 and _fits(p, centres)]


def disk_packing(side, kgon: int = 8, seed: int = 42) -> Packing:
    side = Q(side)
    if side < 10 or kgon < 8:
        raise ValueError("need side >= 10 and kgon >= 8")
    rng = np.random.default_rng(seed)
    centres: list = []
    fl = np.empty((0, 2))
    fails = 0
    span = int((side - 2) * GRID)
    while fails < REJECT_LIMIT:
        ix, iy = rng.integers(0, span + 1, size=2)
        c = Point(1 + mpq(int(ix), GRID), 1 + mpq(int(iy), GRID))
        cf = np.array(c.to_float())
        if len(fl) and ((fl - cf) ** 2).sum(axis=1).min() < 4 - 1e-9:
            fails += 1
            continue
        if not _fits(c, centres):
            fails += 1
            continue
        centres.append(c)
        fl = np.vstack([fl, cf])
        fails = 0
    greedy = len(centres)
    added = 0
    while True:
        free = _free_sweep_points(side, centres)
        if not free:
            break
        centres.append(free[0])
        added += 1
    certified = not _free_sweep_points(side, centres)
    obs = tuple(regular_polygon(c, POLY_RADIUS, kgon) for c in centres)
    inst = Instance((Q(0), Q(0), side, side), obs)
    return Packing(side, centres, inst, greedy, added, certified, seed, kgon)


def maximal_disk_packing(side, kgon: int = 8, seed: int = 42) -> Instance:
    return disk_packing(side, kgon, seed).instance


# ---------------------------------------------------------------------------
# strip traversal


def _box_return(p, box):
    """Path from p (on or inside the box) along the box boundary to the lower-left corner."""
    x0, y0, x1, y1 = box
    # drop to the nearer vertical side, then walk the shorter way round
    side = x0 if p[0] - x0 <= x1 - p[0] else x1
    q = Point(side, p[1])
    down = [q, Point(side, y0), Point(x0, y0)] if side == x1 else [q, Point(x0, y0)]
    up = [q, Point(side, y1), Point(x0, y1), Point(x0, y0)] if side == x1 else [q, Point(x0, y0)]
    return down if polyline_length([p] + down) <= polyline_length([p] + up) else up


def strip_traversal_route(inst: Instance, mode: str = "ewrp", strip: int = 4) -> Tour:
    """Zig-zag route through horizontal strips of the box.

    ``mode="ewrp"`` walks once around every obstacle, ``mode="tspn"`` only
    touches its nearest vertex.  Straight legs that cross obstacles are
    replaced by boundary detours.
    """
    if mode not in ("ewrp", "tspn"):
        raise ValueError(f"unknown mode {mode!r}")
    x0, y0, x1, y1 = inst.box
    rows = max(1, math.ceil(float((y1 - y0) / strip)))
    by_strip = {t: [] for t in range(rows)}
    for k, C in enumerate(inst.obstacles):
        t = min(rows - 1, int((C.centroid[1] - y0) // strip))
        by_strip[t].append(k)
    verts = [Point(x0, y0)]
    witness = {}
    for t in range(rows):
        ymid = min(y0 + strip * t + Q(strip) / 2, y1)
        forward = t % 2 == 0
        start, end = (x0, x1) if forward else (x1, x0)
        verts.append(Point(start, ymid))
        ks = sorted(by_strip[t], key=lambda k: inst.obstacles[k].centroid[0], reverse=not forward)
        for k in ks:
            C = inst.obstacles[k]
            vs = C.vertices
            s = min(range(len(vs)), key=lambda i: dist(vs[i], verts[-1]))
            witness[k] = vs[s]
            if mode == "ewrp":
                verts.extend(vs[(s + i) % len(vs)] for i in range(len(vs) + 1))
            else:
                verts.append(vs[s])
        verts.append(Point(end, ymid))
    verts.extend(_box_return(verts[-1], inst.box))
    clean = [v for i, v in enumerate(verts) if i == 0 or v != verts[i - 1]]
    while len(clean) > 1 and clean[-1] == clean[0]:
        clean.pop()
    T = Tour(clean, polyline_length(clean, closed=True), witness, list(range(len(clean))),
             ["tspn"] * len(clean))
    return detour_transform(T, inst)


def circles_every_obstacle(T: Tour, inst: Instance) -> bool:
    """True iff every obstacle edge is traversed by the tour (exact), which
    makes the tour an external watchman route."""
    n = len(T.vertices)
    used = {frozenset((T.vertices[k], T.vertices[(k + 1) % n])) for k in range(n)}
    return all(frozenset(e) in used for C in inst.obstacles for e in C.edges())


def as_observation_route(T: Tour, inst: Instance) -> ObservationRoute:
    lam = min(C.metrics[2] for C in inst.obstacles) if inst.n else 1.0
    return ObservationRoute(T, dict(T.witness), list(T.detour_log), T.detour_rounds, lam)


def touch_route(inst: Instance) -> tuple:
    """Neighbourhood tour of the obstacles, then detoured into an observation route.

    Returns (tspn tour, observation route).  A witness that ends up strictly
    inside its obstacle is moved to a detour vertex on that obstacle.
    """
    rs = RegionSet([region_from_convex(C) for C in inst.obstacles], inst.box)
    T = tspn_tour(rs, check_common=inst.n < 2)
    D = detour_transform(T, inst)
    wit = dict(D.witness)
    for i, w in wit.items():
        C = inst.obstacles[i]
        if C.locate(w) > 0:
            wit[i] = next(v for v in D.vertices if C.locate(v) == 0)
    D.witness = wit
    return T, as_observation_route(D, inst)


# ---------------------------------------------------------------------------
# sparse lattice


def sparse_lattice(q: int, radius=None, kgon: int = 8) -> Instance:
    """q x q tiny polygons at the lattice points (a, b) / (q + 1), 1 <= a, b <= q."""
    r = 1 / (20 * (q + 1) ** 2) if radius is None else float(radius)
    obs = []
    for a in range(1, q + 1):
        for b in range(1, q + 1):
            obs.append(regular_polygon(Point(mpq(a, q + 1), mpq(b, q + 1)), r, kgon, math.pi / kgon))
    return Instance((Q(0), Q(0), Q(1), Q(1)), tuple(obs))


def hull_route(inst: Instance, offset=mpq(1, 100)) -> Tour:
    """Axis-parallel loop hugging the bounding box of the obstacles."""
    xs = [v[0] for C in inst.obstacles for v in C.vertices]
    ys = [v[1] for C in inst.obstacles for v in C.vertices]
    x0, y0 = min(xs) - offset, min(ys) - offset
    x1, y1 = max(xs) + offset, max(ys) + offset
    vs = [Point(x0, y0), Point(x1, y0), Point(x1, y1), Point(x0, y1)]
    return Tour(vs, polyline_length(vs, closed=True), {}, [0, 1, 2, 3], ["tspn"] * 4)


def boundary_coverage(route_pts, inst: Instance, per_edge: int = 8, route_samples: int = 400) -> float:
    """Fraction of sampled obstacle boundary points seen from sampled route points.

    A boundary point on edge e is seen from p when p is strictly on the
    outer side of e and the segment misses every other obstacle interior.
    """
    R = np.array([(float(a[0]), float(a[1])) for a in route_pts])
    closed = np.vstack([R, R[:1]])
    seg_len = np.hypot(*np.diff(closed, axis=0).T)
    total = seg_len.sum()
    ts = np.linspace(0, total, route_samples, endpoint=False)
    cum = np.concatenate([[0], np.cumsum(seg_len)])
    idx = np.clip(np.searchsorted(cum, ts, side="right") - 1, 0, len(R) - 1)
    frac = (ts - cum[idx]) / np.where(seg_len[idx] > 0, seg_len[idx], 1)
    P = closed[idx] + (closed[idx + 1] - closed[idx]) * frac[:, None]
    polys = [np.array(C.float_vertices) for C in inst.obstacles]
    seen_total, count = 0, 0
    for k, V in enumerate(polys):
        m = len(V)
        for e in range(m):
            a, b = V[e], V[(e + 1) % m]
            nrm = np.array([b[1] - a[1], a[0] - b[0]])
            for s in range(1, per_edge + 1):
                q = a + (b - a) * s / (per_edge + 1)
                ok = (P - q) @ nrm > 1e-12
                for j, W in enumerate(polys):
                    if j == k or not ok.any():
                        continue
                    ok &= ~_segments_hit_convex(q, P, W)
                count += 1
                seen_total += bool(ok.any())
    return seen_total / count if count else 1.0


def _segments_hit_convex(q, P, W) -> np.ndarray:
    """For segments q->P[i], whether each meets the interior of convex W (CCW)."""
    d = P - q
    t0 = np.zeros(len(P))
    t1 = np.ones(len(P))
    m = len(W)
    for e in range(m):
        a, b = W[e], W[(e + 1) % m]
        # inside: cross(b - a, x - a) > 0
        ex, ey = b[0] - a[0], b[1] - a[1]
        f0 = ex * (q[1] - a[1]) - ey * (q[0] - a[0])
        fd = ex * d[:, 1] - ey * d[:, 0]
        with np.errstate(divide="ignore", invalid="ignore"):
            t = -f0 / fd
        pos = fd > 0
        neg = fd < 0
        t0 = np.where(pos, np.maximum(t0, t), t0)
        t1 = np.where(neg, np.minimum(t1, t), t1)
        dead = (fd == 0) & (f0 <= 0)
        t0 = np.where(dead, 2.0, t0)
    return t1 - t0 > 1e-12


@dataclass
class SparseReport:
    q: int
    n: int
    hull_length: float
    coverage: float
    tspn_length: float
    tspn_lower: float


def sparse_report(q: int) -> SparseReport:
    from ..tspn import exact_small_tspn
    inst = sparse_lattice(q)
    H = hull_route(inst)
    cov = boundary_coverage(H.vertices, inst)
    rs = RegionSet([region_from_convex(C) for C in inst.obstacles], inst.box)
    T = exact_small_tspn(rs) if inst.n <= 9 else tspn_tour(rs, check_common=False)
    # every leg joins two different polygons, each pair at least `gap` apart
    gap = 1 / (q + 1) - 2 * max(dist(C.centroid, v) for C in inst.obstacles for v in C.vertices)
    lower = inst.n * gap if inst.n > 1 else 0.0
    return SparseReport(q, inst.n, H.length, cov, T.length, lower)
