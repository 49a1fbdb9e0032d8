"""Pure Python / numpy implementations of the float64 hot loops.

Same signatures as the compiled ``_kernels`` module.  Obstacles are passed
flattened: ``verts`` is an (M, 2) float array of all CCW vertices and
``offsets`` an (n + 1,) int array so obstacle k owns verts[offsets[k]:offsets[k+1]].
"""
from __future__ import annotations

import math

import numpy as np

INF = float("inf")


def _ray_entry(vx, vy, px, py, dx, dy):
    # smallest t >= 0 with p + t d inside the convex polygon, or INF
    lo = 0.0
    hi = INF
    n = len(vx)
    for i in range(n):
        ax, ay = vx[i], vy[i]
        ex = vx[(i + 1) % n] - ax
        ey = vy[(i + 1) % n] - ay
        num = ex * (py - ay) - ey * (px - ax)
        den = ex * dy - ey * dx
        if den == 0.0:
            if num < 0.0:
                return INF
            continue
        t = -num / den
        if den > 0.0:
            if t > lo:
                lo = t
        elif t < hi:
            hi = t
        if lo > hi:
            return INF
    return lo


def _inside(vx, vy, px, py):
    n = len(vx)
    for i in range(n):
        ax, ay = vx[i], vy[i]
        bx, by = vx[(i + 1) % n], vy[(i + 1) % n]
        if (bx - ax) * (py - ay) - (by - ay) * (px - ax) <= 0.0:
            return False
    return True


def _span(vx, vy, px, py, ux, uy):
    """Angular span [lo, hi] of a polygon seen from p, relative to direction u."""
    cx = sum(vx) / len(vx) - px
    cy = sum(vy) / len(vy) - py
    base = math.atan2(ux * cy - uy * cx, ux * cx + uy * cy)
    lo = INF
    hi = -INF
    for i in range(len(vx)):
        wx = vx[i] - px
        wy = vy[i] - py
        a = math.atan2(cx * wy - cy * wx, cx * wx + cy * wy)
        if a < lo:
            lo = a
        if a > hi:
            hi = a
    return base + lo, base + hi


def _uncovered(tlo, thi, blocks):
    if not blocks:
        return True
    pts = [tlo, thi]
    for a, b in blocks:
        pts.append(a)
        pts.append(b)
    pts.sort()
    probes = list(pts)
    for i in range(len(pts) - 1):
        probes.append(0.5 * (pts[i] + pts[i + 1]))
    for s in probes:
        if s < tlo or s > thi:
            continue
        hit = False
        for a, b in blocks:
            if a < s < b:
                hit = True
                break
        if not hit:
            return True
    return False


def sees_point(verts, offsets, target, px, py):
    """1 visible, 0 hidden, -1 inside an obstacle."""
    n = len(offsets) - 1
    polys = []
    for k in range(n):
        seg = verts[offsets[k]:offsets[k + 1]]
        polys.append((seg[:, 0].tolist(), seg[:, 1].tolist()))
    return _sees_one(polys, target, px, py)


def _sees_one(polys, target, px, py):
    for vx, vy in polys:
        if _inside(vx, vy, px, py):
            return -1
    tx, ty = polys[target]
    ux = sum(tx) / len(tx) - px
    uy = sum(ty) / len(ty) - py
    tlo, thi = _span(tx, ty, px, py, ux, uy)
    blocks = []
    for k, (vx, vy) in enumerate(polys):
        if k == target:
            continue
        a0, b0 = _span(vx, vy, px, py, ux, uy)
        for shift in (-2 * math.pi, 0.0, 2 * math.pi):
            a = a0 + shift
            b = b0 + shift
            lo = a if a > tlo else tlo
            hi = b if b < thi else thi
            if lo >= hi:
                continue
            mid = 0.5 * (lo + hi)
            un = math.hypot(ux, uy)
            c = math.cos(mid)
            s = math.sin(mid)
            dx = (ux * c - uy * s) / un
            dy = (ux * s + uy * c) / un
            to = _ray_entry(vx, vy, px, py, dx, dy)
            tt = _ray_entry(tx, ty, px, py, dx, dy)
            if to < tt:
                blocks.append((a, b))
    return 1 if _uncovered(tlo, thi, blocks) else 0


def sees_batch(verts, offsets, target, points):
    """Vectorised ``sees_point`` over an (N, 2) array; returns int8 codes."""
    verts = np.ascontiguousarray(verts, dtype=np.float64)
    offsets = np.ascontiguousarray(offsets, dtype=np.int64)
    pts = np.ascontiguousarray(points, dtype=np.float64)
    n = len(offsets) - 1
    polys = []
    for k in range(n):
        seg = verts[offsets[k]:offsets[k + 1]]
        polys.append((seg[:, 0].tolist(), seg[:, 1].tolist()))
    out = np.empty(len(pts), dtype=np.int8)
    for i, (px, py) in enumerate(pts.tolist()):
        out[i] = _sees_one(polys, target, px, py)
    return out


def points_in_rings(ring_pts, ring_offsets, points):
    """Even-odd membership of points in the union of rings (outer + holes)."""
    pts = np.asarray(points, dtype=np.float64)
    rp = np.asarray(ring_pts, dtype=np.float64)
    inside = np.zeros(len(pts), dtype=bool)
    x = pts[:, 0]
    y = pts[:, 1]
    for r in range(len(ring_offsets) - 1):
        ring = rp[ring_offsets[r]:ring_offsets[r + 1]]
        a = ring
        b = np.roll(ring, -1, axis=0)
        for (ax, ay), (bx, by) in zip(a, b):
            cond = (ay > y) != (by > y)
            with np.errstate(divide="ignore", invalid="ignore"):
                xc = ax + (y - ay) * (bx - ax) / (by - ay)
            inside ^= cond & (x < xc)
    return inside


def dist_to_segments(seg, points):
    """Distance from each point to the nearest of the (K, 4) segments."""
    pts = np.asarray(points, dtype=np.float64)
    seg = np.asarray(seg, dtype=np.float64)
    best = np.full(len(pts), INF)
    for ax, ay, bx, by in seg:
        dx = bx - ax
        dy = by - ay
        L = dx * dx + dy * dy
        t = ((pts[:, 0] - ax) * dx + (pts[:, 1] - ay) * dy) / L if L > 0 else np.zeros(len(pts))
        t = np.clip(t, 0.0, 1.0)
        qx = ax + t * dx - pts[:, 0]
        qy = ay + t * dy - pts[:, 1]
        np.minimum(best, np.hypot(qx, qy), out=best)
    return best


def gtsp_held_karp(dist, groups):
    """Minimum closed tour through exactly one candidate of every group.

    ``dist`` is a (C, C) matrix, ``groups`` a list of candidate-index lists.
    Returns (cost, sequence of candidate indices, one per group, tour order).
    """
    D = np.asarray(dist, dtype=np.float64)
    g = len(groups)
    if g == 1:
        return 0.0, [groups[0][0]]
    idx = [np.asarray(c, dtype=np.int64) for c in groups]
    full = (1 << (g - 1)) - 1
    best_cost = INF
    best_seq = None
    for s in groups[0]:
        # dp[mask][j] over candidates of groups 1..g-1, mask over those groups
        dp = {}
        par = {}
        for k in range(1, g):
            m = 1 << (k - 1)
            dp[(m, k)] = D[s, idx[k]].copy()
            par[(m, k)] = None
        for mask in range(1, full + 1):
            for k in range(1, g):
                cur = dp.get((mask, k))
                if cur is None:
                    continue
                for k2 in range(1, g):
                    bit = 1 << (k2 - 1)
                    if mask & bit:
                        continue
                    tot = cur[:, None] + D[np.ix_(idx[k], idx[k2])]
                    arg = tot.argmin(axis=0)
                    val = tot[arg, np.arange(len(idx[k2]))]
                    key = (mask | bit, k2)
                    old = dp.get(key)
                    if old is None:
                        dp[key] = val
                        par[key] = (k, arg)
                    else:
                        better = val < old
                        if better.any():
                            old_k, old_arg = par[key]
                            if not isinstance(old_k, np.ndarray):
                                old_k = np.full(len(val), old_k)
                            new_k = np.where(better, k, old_k)
                            new_arg = np.where(better, arg, old_arg)
                            dp[key] = np.where(better, val, old)
                            par[key] = (new_k, new_arg)
        for k in range(1, g):
            tot = dp[(full, k)] + D[idx[k], s]
            j = int(tot.argmin())
            if tot[j] < best_cost - 1e-15:
                best_cost = float(tot[j])
                seq = []
                mask, kk, jj = full, k, j
                while True:
                    seq.append(int(idx[kk][jj]))
                    p = par[(mask, kk)]
                    if p is None:
                        break
                    pk, parg = p
                    pk = int(pk[jj]) if isinstance(pk, np.ndarray) else pk
                    pj = int(parg[jj])
                    mask ^= 1 << (kk - 1)
                    kk, jj = pk, pj
                seq.append(s)
                best_seq = seq[::-1]
    return best_cost, best_seq
