"""Convex-polygon family encoding a set system.

Each membership j in S_i becomes a thin corridor from p_i = (0, i) to
q_j = (M, j): a slab around the line plus a wedge opening towards a point
just above q_j.  The obstacles are the convex cells left between corridors,
a tiny square Q_j in every wedge end, two unit squares and a long rectangle
on the left.  A final axis scaling makes the left-side excursions cost about
one unit each, so tours of length k + 1/2 correspond to covers of size k.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

from gmpy2 import mpq

from ..errors import InvalidSetSystem
from ..geom import ConvexPolygon, Point, Q, polyline_length
from ..orp import ObservationRoute, validate_observation_route
from ..tspn import Tour
from ..visibility import Instance, sees
from .grid_cluster import ReductionArtifacts

MAX_CORRIDORS = 12


@dataclass(frozen=True)
class SetSystem:
    n: int
    sets: tuple

    def __post_init__(self):
        object.__setattr__(self, "sets", tuple(frozenset(int(x) for x in S) for S in self.sets))

    @property
    def m(self) -> int:
        return len(self.sets)

    def validate(self) -> None:
        if self.n < 1 or not self.sets:
            raise InvalidSetSystem("need at least one element and one set")
        U = set(range(1, self.n + 1))
        for i, S in enumerate(self.sets, 1):
            if not S:
                raise InvalidSetSystem(f"set {i} is empty")
            if not S <= U:
                raise InvalidSetSystem(f"set {i} has elements outside 1..{self.n}")
        if set().union(*self.sets) != U:
            raise InvalidSetSystem("some element lies in no set")

    def covers(self, chosen) -> bool:
        return set().union(*(self.sets[i - 1] for i in chosen)) == set(range(1, self.n + 1))

    @classmethod
    def parse(cls, n: int, text: str) -> "SetSystem":
        """``"1,2;2"`` -> S_1 = {1, 2}, S_2 = {2}."""
        sets = []
        for part in text.split(";"):
            part = part.strip()
            sets.append(frozenset(int(x) for x in part.split(",") if x.strip()) if part else frozenset())
        return cls(n, tuple(sets))


def polynomial_bound(m: int, n: int) -> int:
    """Recorded bound on |numerator| and denominator of every coordinate."""
    M = max(12 * m, n + 1)
    return (2 * M) ** 16


def _clip(poly, a, b, c):
    """Part of a convex polygon with a x + b y <= c."""
    out = []
    k = len(poly)
    for i in range(k):
        P, R = poly[i], poly[(i + 1) % k]
        fp = a * P[0] + b * P[1] - c
        fr = a * R[0] + b * R[1] - c
        if fp <= 0:
            out.append(P)
        if (fp < 0 < fr) or (fr < 0 < fp):
            t = fp / (fp - fr)
            out.append(Point(P[0] + (R[0] - P[0]) * t, P[1] + (R[1] - P[1]) * t))
    clean = []
    for v in out:
        if not clean or clean[-1] != v:
            clean.append(v)
    while len(clean) > 1 and clean[0] == clean[-1]:
        clean.pop()
    return clean


def _area2(poly):
    return sum(poly[i][0] * poly[(i + 1) % len(poly)][1] - poly[(i + 1) % len(poly)][0] * poly[i][1]
               for i in range(len(poly)))


def _rect(x0, y0, x1, y1):
    return [Point(Q(x0), Q(y0)), Point(Q(x1), Q(y0)), Point(Q(x1), Q(y1)), Point(Q(x0), Q(y1))]


def setcover_instance(ss: SetSystem) -> ReductionArtifacts:
    ss.validate()
    n, m = ss.n, ss.m
    M = Q(max(12 * m, n + 1))
    h = M ** -8 / 2                     # vertical half-thickness of a slab
    rise = M ** -4
    corridors = [(i, j) for i, S in enumerate(ss.sets, 1) for j in sorted(S)]
    if len(corridors) > MAX_CORRIDORS:
        raise InvalidSetSystem(f"at most {MAX_CORRIDORS} memberships supported, got {len(corridors)}")
    B1 = _rect(-M ** -2, -M, 2 * M, 2 * M)
    # pre-transform cells: for each corridor either below the slab or above
    # both the slab and the wedge.  y = i + (j - i) x / M is the corridor line.
    cells = []
    for side in itertools.product((0, 1), repeat=len(corridors)):
        poly = B1
        for (i, j), up in zip(corridors, side):
            sl = (j - i) / M
            if up:
                poly = _clip(poly, sl, Q(-1), -i - h)                      # y >= line + h
                poly = poly and _clip(poly, (j - i + rise) / M, Q(-1), Q(-i))  # above the wedge
            else:
                poly = _clip(poly, -sl, Q(1), i - h)                       # y <= line - h
            if len(poly) < 3:
                break
        if len(poly) >= 3 and _area2(poly) > 0:
            cells.append((side, poly))
    F1 = [poly for _, poly in cells]
    Qs = {}
    for j in range(1, n + 1):
        cy = j + rise / 2
        Qs[j] = _rect(M - h, cy - h, M + h, cy + h)
    C1 = _rect(-mpq(3, 2), -mpq(3, 2), -mpq(1, 2), -mpq(1, 2))
    C2 = _rect(-mpq(3, 2), M + mpq(1, 2), -mpq(1, 2), M + mpq(3, 2))
    B2 = _rect(-M, 0, -M ** -2 - M ** -4, M)

    def T(p):
        return Point(M * M * p[0] / 2, p[1] / (24 * M))

    polys = F1 + [Qs[j] for j in range(1, n + 1)] + [C1, C2, B2]
    obs = tuple(ConvexPolygon([T(v) for v in poly]) for poly in polys)
    lo = T(Point(-M - 1, -M - 1))
    hi = T(Point(2 * M + 1, 2 * M + 1))
    inst = Instance((lo[0], lo[1], hi[0], hi[1]), obs)
    nF = len(F1)
    refs = {"F1": list(range(nF)),
            "Q": {j: nF + j - 1 for j in range(1, n + 1)},
            "C1": nF + n, "C2": nF + n + 1, "B2": nF + n + 2,
            "p": {i: T(Point(Q(0), Q(i))) for i in range(1, m + 1)},
            "corridors": corridors}
    params = {"M": M, "slab_width": 2 * h, "rise": rise, "B1": (B1[0], B1[2]),
              "transform": (M * M / 2, 1 / (24 * M)), "n": n, "m": m,
              "bound": polynomial_bound(m, n)}
    return ReductionArtifacts(inst, refs, params)


def coordinate_magnitude(inst: Instance) -> int:
    """Largest |numerator| or denominator over all vertex coordinates."""
    best = 0
    for C in inst.obstacles:
        for v in C.vertices:
            for c in v:
                best = max(best, abs(int(c.numerator)), int(c.denominator))
    for c in inst.box:
        best = max(best, abs(int(c.numerator)), int(c.denominator))
    return best


def witness_tour(art: ReductionArtifacts, chosen) -> ObservationRoute:
    """Doubled left side of the outer rectangle plus one corridor loop per chosen set.

    Every obstacle gets the first tour point (corners, corridor crossings,
    loop tips) that sees it exactly; unseen obstacles stay without a witness
    so validation reports them.
    """
    inst = art.instance
    P = art.parameters
    M = P["M"]
    sx, sy = P["transform"]
    xl = -M ** -2
    corridors = art.reference_points["corridors"]
    chosen = sorted(set(chosen))
    # left side crossings of every corridor line, pre-transform
    cross = {}
    for i, j in corridors:
        cross[(i, j)] = Point(xl, i + (j - i) * xl / M)
    loops = {}
    for i in chosen:
        j = min(j for ii, j in corridors if ii == i)
        loops[i] = cross[(i, j)]
    bottom, top = Point(xl, -M), Point(xl, 2 * M)
    path = [bottom]
    for i in sorted(loops, key=lambda i: loops[i][1]):
        c = loops[i]
        path += [c, Point(Q(0), Q(i)), c]
    path.append(top)

    def T(p):
        return Point(sx * p[0], sy * p[1])

    verts = [T(p) for p in path]
    clean = [v for k, v in enumerate(verts) if k == 0 or v != verts[k - 1]]
    probes = clean + [T(c) for c in cross.values()]
    witness = {}
    for k in range(inst.n):
        for p in probes:
            if inst.obstacle_containing(p) < 0 and sees(p, k, inst):
                witness[k] = p
                break
    L = polyline_length(clean, closed=True)
    tour = Tour(clean, L, witness, list(range(len(clean))), ["tspn"] * len(clean))
    lam = min(C.metrics[2] for C in inst.obstacles)
    return ObservationRoute(tour, witness, [], 0, lam)


def check_witness(art: ReductionArtifacts, chosen) -> dict:
    route = witness_tour(art, chosen)
    rep = validate_observation_route(route, art.instance)
    k = len(set(chosen))
    return {"k": k, "length": route.length, "bound": k + 0.5,
            "within_bound": route.length <= k + 0.5, "valid": rep.valid,
            "failures": rep.failures, "route": route}


def structure_checks(art: ReductionArtifacts) -> dict:
    """Exact structural facts: slopes in [-1, 1], and for every corridor
    (i, j') and element j, Q_j lies in the wedge of (i, j') iff j' = j
    (checked before the transform)."""
    M = art.parameters["M"]
    n = art.parameters["n"]
    rise = art.parameters["rise"]
    h = art.parameters["slab_width"] / 2
    corridors = art.reference_points["corridors"]
    slopes = all(-1 <= Q(j - i) / M <= 1 for i, j in corridors)
    member_ok = True
    for i, jc in corridors:
        for j in range(1, n + 1):
            cy = j + rise / 2
            corners = [(M + dx, cy + dy) for dx in (-h, h) for dy in (-h, h)]
            inside = all(x > 0 and (y - i) * M >= (jc - i) * x and (y - i) * M <= (jc - i + rise) * x
                         for x, y in corners)
            if inside != (j == jc):
                member_ok = False
    every = all(any(jc == j for _, jc in corridors) for j in range(1, n + 1))
    return {"slopes_ok": slopes, "membership_ok": member_ok and every}
