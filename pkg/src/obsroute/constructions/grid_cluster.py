"""Grid-and-cluster family built from integer points.

Large squares fill the minimal bounding rectangle of the points and leave
narrow corridors of width w along every integer line.  Each point carries a
cluster of 25 small squares whose central square cannot be seen from outside
the cluster hull, so an observation tour has to enter every cluster.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from gmpy2 import mpq

from ..errors import ClusterNotHiding, PointsNotInGrid
from ..geom import ConvexPolygon, Point, Q, common_tangents, dist, line_intersection
from ..orp import ObservationRoute, detour_transform, validate_observation_route
from ..tspn import Tour
from ..visibility import Instance, sees, sees_many

# cluster layout in units of the small side s: gap g between the inner 3x3
# block, and a staggered outer ring of 16 squares covering the corridor mouths
GAP = mpq(1, 4)
PITCH = 1 + GAP
RING = 3 * PITCH / 2 + 1 + GAP


def cluster_offsets() -> list:
    """Centres of the 25 unit squares of a cluster; index 0 is the centre."""
    out = [Point(Q(0), Q(0))]
    out += [Point(i * PITCH, j * PITCH) for i in (-1, 0, 1) for j in (-1, 0, 1) if (i, j) != (0, 0)]
    half = [PITCH / 2, 3 * PITCH / 2, -PITCH / 2, -3 * PITCH / 2]
    for t in sorted(half):
        out += [Point(t, RING), Point(t, -RING), Point(RING, t), Point(-RING, t)]
    return out


def _square_at(c, side) -> ConvexPolygon:
    h = side / 2
    return ConvexPolygon([Point(c[0] - h, c[1] - h), Point(c[0] + h, c[1] - h),
                          Point(c[0] + h, c[1] + h), Point(c[0] - h, c[1] + h)])


def cluster_squares(ref, s) -> list:
    return [_square_at(Point(ref[0] + o[0] * s, ref[1] + o[1] * s), s) for o in cluster_offsets()]


def cluster_hull(ref, s) -> ConvexPolygon:
    return ConvexPolygon.hull([v for C in cluster_squares(ref, s) for v in C.vertices])


@dataclass
class ReductionArtifacts:
    instance: Instance
    reference_points: dict
    parameters: dict
    clusters: dict = field(default_factory=dict)     # cluster -> obstacle indices, centre first


def grid_cluster_instance(S, verify: bool = True, samples: int = 10_000, seed: int = 42) -> ReductionArtifacts:
    pts = []
    for p in S:
        if len(p) != 2 or any(int(c) != c or c < 0 for c in p):
            raise PointsNotInGrid(f"not a nonnegative integer point: {p}")
        pts.append((int(p[0]), int(p[1])))
    if not pts or len(set(pts)) != len(pts):
        raise PointsNotInGrid("point set must be nonempty and without repeats")
    n = len(pts)
    # a degenerate rectangle still gets one row or column of large squares
    a = max(1, max(x for x, _ in pts))
    b = max(1, max(y for _, y in pts))
    w = mpq(1, 10 * max(a, b) * n)
    s = w / 100
    obs = []
    for i in range(a):
        for j in range(b):
            obs.append(ConvexPolygon([Point(i + w / 2, j + w / 2), Point(i + 1 - w / 2, j + w / 2),
                                      Point(i + 1 - w / 2, j + 1 - w / 2), Point(i + w / 2, j + 1 - w / 2)]))
    refs, clusters = {}, {}
    for c, (x, y) in enumerate(pts):
        ref = Point(Q(x), Q(y))
        refs[c] = ref
        start = len(obs)
        obs.extend(cluster_squares(ref, s))
        clusters[c] = list(range(start, len(obs)))
    box = (-w / 2, -w / 2, a + w / 2, b + w / 2)
    inst = Instance(box, tuple(obs))
    art = ReductionArtifacts(inst, refs, {"w": w, "s": s, "a": a, "b": b, "n": n,
                                          "large": a * b, "seed": seed}, clusters)
    if verify:
        rep = verify_hidden_centres(art, samples=samples, seed=seed)
        if not rep["hidden"]:
            raise ClusterNotHiding(f"central square visible from outside the hull: {rep['leaks'][:3]}")
    return art


# ---------------------------------------------------------------------------
# hidden-centre verification


def _local_instance():
    """The canonical cluster (unit small side) alone in a box of radius 12."""
    sq = cluster_squares(Point(Q(0), Q(0)), Q(1))
    R = Q(12)
    return Instance((-R, -R, R, R), tuple(sq))


@lru_cache(maxsize=None)
def local_tangent_vertex_check() -> tuple:
    """Exact check at the vertices of the cluster's tangent-line arrangement.

    Lines are the common tangents of the centre with every other square and
    of every pair of inner squares.  Returns (points checked, leaks).
    """
    inst = _local_instance()
    C = inst.obstacles
    H = cluster_hull(Point(Q(0), Q(0)), Q(1))
    lines = []
    pairs = [(0, k) for k in range(1, 25)] + list(itertools.combinations(range(1, 9), 2))
    for i, j in pairs:
        for t in common_tangents(C[i], C[j]):
            lines.append((t.a, t.b))
    x0, y0, x1, y1 = inst.box
    pts = set()
    for (p1, p2), (p3, p4) in itertools.combinations(lines, 2):
        q = line_intersection(p1, p2, p3, p4)
        if q is None or not (x0 <= q[0] <= x1 and y0 <= q[1] <= y1):
            continue
        if H.locate(q) >= 0:
            continue
        pts.add(q)
    leaks = [q for q in sorted(pts) if sees(q, 0, inst)]
    return len(pts), tuple(leaks)


def _exterior_samples(ref, s, box, count, rng):
    """Samples outside the cluster hull: half on a ring hugging the hull,
    half spread through the corridor neighbourhood."""
    H = cluster_hull(ref, s)
    hv = np.array(H.float_vertices)
    cx, cy = float(ref[0]), float(ref[1])
    r_hull = float(np.max(np.hypot(hv[:, 0] - cx, hv[:, 1] - cy)))
    x0, y0, x1, y1 = (float(v) for v in box)
    out = []
    while len(out) < count:
        k = count - len(out)
        ang = rng.uniform(0, 2 * math.pi, k)
        rad = np.where(np.arange(k) % 2 == 0, rng.uniform(r_hull * 0.7, r_hull * 1.6, k),
                       rng.uniform(r_hull * 0.7, r_hull * 12, k))
        P = np.column_stack([cx + rad * np.cos(ang), cy + rad * np.sin(ang)])
        keep = (P[:, 0] > x0) & (P[:, 0] < x1) & (P[:, 1] > y0) & (P[:, 1] < y1)
        for p in P[keep]:
            if not _float_in_convex(p, hv):
                out.append(p)
    return np.array(out[:count])


def _float_in_convex(p, hv) -> bool:
    n = len(hv)
    for k in range(n):
        a, b = hv[k], hv[(k + 1) % n]
        if (b[0] - a[0]) * (p[1] - a[1]) - (b[1] - a[1]) * (p[0] - a[0]) < 0:
            return False
    return True


def verify_hidden_centres(art: ReductionArtifacts, samples: int = 10_000, seed: int = 42) -> dict:
    """Central squares must be unseen from every sampled point outside their hull.

    Sampled points are classified with the float kernel against the full
    instance; any positive is re-checked exactly.  The tangent-line vertex
    check is exact and runs once on the canonical cluster, which suffices
    because clusters are translates and extra obstacles only block more.
    """
    inst = art.instance
    s = art.parameters["s"]
    rng = np.random.default_rng(seed)
    leaks = []
    checked = 0
    for c, ref in art.reference_points.items():
        centre = art.clusters[c][0]
        P = _exterior_samples(ref, s, inst.box, samples, rng)
        codes = sees_many(P, centre, inst)
        checked += len(P)
        for p, code in zip(P, codes):
            if code == 1:
                q = Point(Q(float(p[0])), Q(float(p[1])))
                if sees(q, centre, inst):
                    leaks.append((c, q))
    nvert, vleaks = local_tangent_vertex_check()
    leaks += [("local", q) for q in vleaks]
    return {"hidden": not leaks, "samples": checked, "tangent_vertices": nvert, "leaks": leaks}


# ---------------------------------------------------------------------------
# observation tour through the clusters


@lru_cache(maxsize=None)
def local_observation_points(step=mpq(1, 8)) -> tuple:
    """Few points (canonical frame) that together see all 25 squares.

    Candidates on a grid inside the cluster box are labelled with the float
    kernel, a greedy cover is taken, and every choice is confirmed exactly.
    """
    inst = _local_instance()
    R = RING + 1
    ticks = []
    t = -R
    while t <= R:
        ticks.append(t)
        t += step
    cands = [Point(x, y) for x in ticks for y in ticks]
    P = np.array([c.to_float() for c in cands])
    seen = np.array([sees_many(P, i, inst) == 1 for i in range(inst.n)])  # (25, N)
    todo = set(range(inst.n))
    chosen = []
    while todo:
        rows = sorted(todo)
        gain = seen[rows].sum(axis=0)
        k = int(np.argmax(gain))
        if gain[k] == 0:
            raise ClusterNotHiding("no candidate sees the remaining squares")
        p = cands[k]
        got = {i for i in rows if seen[i, k] and sees(p, i, inst)}
        seen[:, k] = False
        if got:
            chosen.append((p, tuple(sorted(got))))
            todo -= got
    return tuple(chosen)


def rectilinear_tsp(points) -> tuple:
    """Optimal closed L1 tour by enumeration (first point fixed)."""
    pts = list(points)
    if len(pts) <= 1:
        return 0, list(range(len(pts)))
    best = None
    for perm in itertools.permutations(range(1, len(pts))):
        order = (0,) + perm
        L = sum(abs(pts[order[k]][0] - pts[order[k - 1]][0]) + abs(pts[order[k]][1] - pts[order[k - 1]][1])
                for k in range(len(order)))
        if best is None or L < best[0]:
            best = (L, list(order))
    return best


def cluster_observation_route(art: ReductionArtifacts) -> ObservationRoute:
    """Observation route that enters every cluster in rectilinear-TSP order.

    Inside a cluster the tour strings together the local observation points;
    between clusters it turns at an offset corridor crossing.  Large squares
    not seen from the tour get a short spur to a corridor crossing next to
    one of their corners.  Obstacle crossings are removed by boundary detours.
    """
    inst = art.instance
    s, w = art.parameters["s"], art.parameters["w"]
    refs = [art.reference_points[c] for c in sorted(art.reference_points)]
    _, order = rectilinear_tsp(refs)
    local = local_observation_points()
    verts, witness = [], {}
    for pos, c in enumerate(order):
        ref = refs[c]
        for p, got in local:
            q = Point(ref[0] + p[0] * s, ref[1] + p[1] * s)
            verts.append(q)
            for i in got:
                witness[art.clusters[c][i]] = q
        nxt = refs[order[(pos + 1) % len(order)]]
        if nxt[0] != ref[0] and nxt[1] != ref[1]:
            verts.append(Point(nxt[0] + w / 4, ref[1] + w / 4))
    T = Tour(verts, 0.0, witness, list(range(len(verts))), ["tspn"] * len(verts))
    T = detour_transform(T, inst)
    verts = list(T.vertices)
    large = [k for k in range(art.parameters["large"]) if k not in witness]
    probes = _grid_crossings(verts)
    for k in large:
        hit = next((v for v in probes if inst.is_free(v) and sees(v, k, inst)), None)
        if hit is not None:
            witness[k] = hit
            continue
        C = inst.obstacles[k]
        corner = min(C.vertices, key=lambda v: min(dist(v, u) for u in verts))
        spur = Point(Q(round(corner[0])) + (w / 4 if corner[0] > round(corner[0]) else -w / 4),
                     Q(round(corner[1])) + (w / 4 if corner[1] > round(corner[1]) else -w / 4))
        j = min(range(len(verts)), key=lambda t: dist(verts[t], spur))
        verts[j + 1:j + 1] = [spur, verts[j]]
        witness[k] = spur
    L = sum(dist(verts[k], verts[(k + 1) % len(verts)]) for k in range(len(verts)))
    T = Tour(verts, L, witness, list(T.order), ["tspn"] * len(verts), T.detour_log, T.detour_rounds)
    T = detour_transform(T, inst)
    lam = min(C.metrics[2] for C in inst.obstacles)
    return ObservationRoute(T, dict(T.witness), list(T.detour_log), T.detour_rounds, lam)


def _grid_crossings(verts) -> list:
    """Tour vertices plus the points where tour edges cross integer lines."""
    out = list(verts)
    n = len(verts)
    for k in range(n):
        a, b = verts[k], verts[(k + 1) % n]
        for ax in (0, 1):
            lo, hi = sorted((a[ax], b[ax]))
            for t in range(math.ceil(lo), math.floor(hi) + 1):
                if a[ax] == b[ax]:
                    continue
                u = (t - a[ax]) / (b[ax] - a[ax])
                out.append(Point(a[0] + (b[0] - a[0]) * u, a[1] + (b[1] - a[1]) * u))
    return out


def hull_lower_bound(art: ReductionArtifacts) -> float:
    """Any observation tour enters every cluster hull, so it is at least twice
    the largest distance between two hulls."""
    s = art.parameters["s"]
    hulls = [cluster_hull(r, s).float_vertices for r in art.reference_points.values()]
    best = 0.0
    for A, B in itertools.combinations(hulls, 2):
        best = max(best, 2 * _convex_distance(A, B))
    return best


def _convex_distance(A, B) -> float:
    def pd(p, a, b):
        dx, dy = b[0] - a[0], b[1] - a[1]
        L = dx * dx + dy * dy
        t = 0.0 if L == 0 else min(1.0, max(0.0, ((p[0] - a[0]) * dx + (p[1] - a[1]) * dy) / L))
        return math.hypot(a[0] + t * dx - p[0], a[1] + t * dy - p[1])
    ea = [(A[k], A[(k + 1) % len(A)]) for k in range(len(A))]
    eb = [(B[k], B[(k + 1) % len(B)]) for k in range(len(B))]
    return min(min(pd(p, *e) for p in A for e in eb), min(pd(p, *e) for p in B for e in ea))


@dataclass
class BookkeepingReport:
    rectilinear_opt: int
    route_length: float
    lower_bound: float
    valid: bool
    hidden: bool

    @property
    def delta(self) -> float:
        return self.route_length - self.rectilinear_opt


def reduction_bookkeeping(S, samples: int = 10_000, seed: int = 42) -> BookkeepingReport:
    art = grid_cluster_instance(S, verify=False)
    hid = verify_hidden_centres(art, samples=samples, seed=seed)
    route = cluster_observation_route(art)
    rep = validate_observation_route(route, art.instance)
    opt, _ = rectilinear_tsp(list(art.reference_points.values()))
    return BookkeepingReport(int(opt), route.length, hull_lower_bound(art), rep.valid, hid["hidden"])
