# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled float64 hot loops; mirrors ``_kernels_py`` function by function."""
import numpy as np
cimport numpy as cnp
from libc.math cimport atan2, cos, sin, hypot, INFINITY, M_PI

cnp.import_array()


cdef double _ray_entry(const double[:, ::1] V, Py_ssize_t s, Py_ssize_t e,
                       double px, double py, double dx, double dy) nogil:
    cdef double lo = 0.0, hi = INFINITY, ax, ay, ex, ey, num, den, t
    cdef Py_ssize_t n = e - s, i, j
    for i in range(n):
        j = s + (i + 1) % n
        ax = V[s + i, 0]
        ay = V[s + i, 1]
        ex = V[j, 0] - ax
        ey = V[j, 1] - ay
        num = ex * (py - ay) - ey * (px - ax)
        den = ex * dy - ey * dx
        if den == 0.0:
            if num < 0.0:
                return INFINITY
            continue
        t = -num / den
        if den > 0.0:
            if t > lo:
                lo = t
        elif t < hi:
            hi = t
        if lo > hi:
            return INFINITY
    return lo


cdef bint _inside(const double[:, ::1] V, Py_ssize_t s, Py_ssize_t e,
                  double px, double py) nogil:
    cdef Py_ssize_t n = e - s, i, j
    for i in range(n):
        j = s + (i + 1) % n
        if (V[j, 0] - V[s + i, 0]) * (py - V[s + i, 1]) - (V[j, 1] - V[s + i, 1]) * (px - V[s + i, 0]) <= 0.0:
            return False
    return True


cdef void _span(const double[:, ::1] V, Py_ssize_t s, Py_ssize_t e,
                double px, double py, double ux, double uy,
                double* lo_out, double* hi_out) nogil:
    cdef double cx = 0.0, cy = 0.0, base, lo = INFINITY, hi = -INFINITY, a, wx, wy
    cdef Py_ssize_t i
    for i in range(s, e):
        cx += V[i, 0]
        cy += V[i, 1]
    cx = cx / (e - s) - px
    cy = cy / (e - s) - py
    base = atan2(ux * cy - uy * cx, ux * cx + uy * cy)
    for i in range(s, e):
        wx = V[i, 0] - px
        wy = V[i, 1] - py
        a = atan2(cx * wy - cy * wx, cx * wx + cy * wy)
        if a < lo:
            lo = a
        if a > hi:
            hi = a
    lo_out[0] = base + lo
    hi_out[0] = base + hi


cdef bint _uncovered(double tlo, double thi, double[:, ::1] blocks, Py_ssize_t nb,
                     double[::1] pts, double[::1] probes) nogil:
    cdef Py_ssize_t i, j, k, m, npr
    cdef double s, tmp
    cdef bint hit
    if nb == 0:
        return True
    pts[0] = tlo
    pts[1] = thi
    m = 2
    for i in range(nb):
        pts[m] = blocks[i, 0]
        pts[m + 1] = blocks[i, 1]
        m += 2
    # insertion sort, m is small
    for i in range(1, m):
        tmp = pts[i]
        j = i - 1
        while j >= 0 and pts[j] > tmp:
            pts[j + 1] = pts[j]
            j -= 1
        pts[j + 1] = tmp
    npr = 0
    for i in range(m):
        probes[npr] = pts[i]
        npr += 1
    for i in range(m - 1):
        probes[npr] = 0.5 * (pts[i] + pts[i + 1])
        npr += 1
    for k in range(npr):
        s = probes[k]
        if s < tlo or s > thi:
            continue
        hit = False
        for i in range(nb):
            if blocks[i, 0] < s and s < blocks[i, 1]:
                hit = True
                break
        if not hit:
            return True
    return False


cdef int _sees_one(const double[:, ::1] V, const long long[::1] off, Py_ssize_t n,
                   Py_ssize_t target, double px, double py,
                   double[:, ::1] blocks, double[::1] pts, double[::1] probes) nogil:
    cdef Py_ssize_t k, ts, te, nb = 0
    cdef double ux = 0.0, uy = 0.0, tlo, thi, a0, b0, a, b, lo, hi, mid, un, c, sn, dx, dy
    cdef double shifts[3]
    cdef int q
    shifts[0] = -2.0 * M_PI
    shifts[1] = 0.0
    shifts[2] = 2.0 * M_PI
    for k in range(n):
        if _inside(V, off[k], off[k + 1], px, py):
            return -1
    ts = off[target]
    te = off[target + 1]
    for k in range(ts, te):
        ux += V[k, 0]
        uy += V[k, 1]
    ux = ux / (te - ts) - px
    uy = uy / (te - ts) - py
    _span(V, ts, te, px, py, ux, uy, &tlo, &thi)
    un = hypot(ux, uy)
    for k in range(n):
        if k == target:
            continue
        _span(V, off[k], off[k + 1], px, py, ux, uy, &a0, &b0)
        for q in range(3):
            a = a0 + shifts[q]
            b = b0 + shifts[q]
            lo = a if a > tlo else tlo
            hi = b if b < thi else thi
            if lo >= hi:
                continue
            mid = 0.5 * (lo + hi)
            c = cos(mid)
            sn = sin(mid)
            dx = (ux * c - uy * sn) / un
            dy = (ux * sn + uy * c) / un
            if _ray_entry(V, off[k], off[k + 1], px, py, dx, dy) < _ray_entry(V, ts, te, px, py, dx, dy):
                blocks[nb, 0] = a
                blocks[nb, 1] = b
                nb += 1
    return 1 if _uncovered(tlo, thi, blocks, nb, pts, probes) else 0


def sees_point(verts, offsets, Py_ssize_t target, double px, double py):
    return int(sees_batch(verts, offsets, target, np.array([[px, py]]))[0])


def sees_batch(verts, offsets, Py_ssize_t target, points):
    cdef const double[:, ::1] V = np.ascontiguousarray(verts, dtype=np.float64)
    cdef const long long[::1] off = np.ascontiguousarray(offsets, dtype=np.int64)
    cdef const double[:, ::1] P = np.ascontiguousarray(points, dtype=np.float64)
    cdef Py_ssize_t n = off.shape[0] - 1, N = P.shape[0], i
    out_arr = np.empty(N, dtype=np.int8)
    cdef signed char[::1] out = out_arr
    cap = 3 * n + 4
    cdef double[:, ::1] blocks = np.empty((cap, 2))
    cdef double[::1] pts = np.empty(2 * cap + 2)
    cdef double[::1] probes = np.empty(4 * cap + 4)
    with nogil:
        for i in range(N):
            out[i] = _sees_one(V, off, n, target, P[i, 0], P[i, 1], blocks, pts, probes)
    return out_arr


def points_in_rings(ring_pts, ring_offsets, points):
    cdef const double[:, ::1] R = np.ascontiguousarray(ring_pts, dtype=np.float64)
    cdef const long long[::1] off = np.ascontiguousarray(ring_offsets, dtype=np.int64)
    cdef const double[:, ::1] P = np.ascontiguousarray(points, dtype=np.float64)
    cdef Py_ssize_t N = P.shape[0], nr = off.shape[0] - 1, i, r, k, s, e, j
    cdef double x, y, ax, ay, bx, by
    cdef bint inside
    out_arr = np.zeros(N, dtype=bool)
    cdef cnp.npy_bool[::1] out = out_arr
    with nogil:
        for i in range(N):
            x = P[i, 0]
            y = P[i, 1]
            inside = False
            for r in range(nr):
                s = off[r]
                e = off[r + 1]
                for k in range(s, e):
                    j = k + 1 if k + 1 < e else s
                    ax = R[k, 0]
                    ay = R[k, 1]
                    bx = R[j, 0]
                    by = R[j, 1]
                    if (ay > y) != (by > y):
                        if x < ax + (y - ay) * (bx - ax) / (by - ay):
                            inside = not inside
            out[i] = inside
    return out_arr


def dist_to_segments(seg, points):
    cdef const double[:, ::1] S = np.ascontiguousarray(seg, dtype=np.float64).reshape(-1, 4)
    cdef const double[:, ::1] P = np.ascontiguousarray(points, dtype=np.float64)
    cdef Py_ssize_t N = P.shape[0], K = S.shape[0], i, k
    cdef double best, dx, dy, L, t, qx, qy, d
    out_arr = np.empty(N)
    cdef double[::1] out = out_arr
    with nogil:
        for i in range(N):
            best = INFINITY
            for k in range(K):
                dx = S[k, 2] - S[k, 0]
                dy = S[k, 3] - S[k, 1]
                L = dx * dx + dy * dy
                t = 0.0
                if L > 0.0:
                    t = ((P[i, 0] - S[k, 0]) * dx + (P[i, 1] - S[k, 1]) * dy) / L
                    if t < 0.0:
                        t = 0.0
                    elif t > 1.0:
                        t = 1.0
                qx = S[k, 0] + t * dx - P[i, 0]
                qy = S[k, 1] + t * dy - P[i, 1]
                d = hypot(qx, qy)
                if d < best:
                    best = d
            out[i] = best
    return out_arr


def gtsp_held_karp(dist, groups):
    """Minimum closed tour through one candidate of every group (see _kernels_py)."""
    cdef const double[:, ::1] D = np.ascontiguousarray(dist, dtype=np.float64)
    cdef Py_ssize_t g = len(groups)
    if g == 1:
        return 0.0, [groups[0][0]]
    flat = np.concatenate([np.asarray(c, dtype=np.int64) for c in groups])
    gid = np.concatenate([np.full(len(c), k, dtype=np.int64) for k, c in enumerate(groups)])
    cdef const long long[::1] cand = flat
    cdef const long long[::1] grp = gid
    cdef Py_ssize_t C = flat.shape[0], n0 = len(groups[0])
    cdef Py_ssize_t full = (1 << (g - 1)) - 1
    dp_arr = np.empty((full + 1, C))
    par_arr = np.empty((full + 1, C), dtype=np.int64)
    cdef double[:, ::1] dp = dp_arr
    cdef long long[:, ::1] par = par_arr
    cdef Py_ssize_t si, s, mask, a, b, bit, nm, best_last = -1
    cdef double v, best = INFINITY, cur
    best_seq = None
    for si in range(n0):
        s = cand[si]
        with nogil:
            dp[:, :] = INFINITY
            for a in range(n0, C):
                bit = 1 << (grp[a] - 1)
                dp[bit, a] = D[s, cand[a]]
                par[bit, a] = -1
            for mask in range(1, full + 1):
                for a in range(n0, C):
                    cur = dp[mask, a]
                    if cur == INFINITY:
                        continue
                    for b in range(n0, C):
                        bit = 1 << (grp[b] - 1)
                        if mask & bit:
                            continue
                        v = cur + D[cand[a], cand[b]]
                        nm = mask | bit
                        if v < dp[nm, b]:
                            dp[nm, b] = v
                            par[nm, b] = a
            cur = INFINITY
            best_last = -1
            for a in range(n0, C):
                v = dp[full, a] + D[cand[a], s]
                if v < cur:
                    cur = v
                    best_last = a
        if cur < best - 1e-15:
            best = cur
            seq = []
            mask = full
            a = best_last
            while a != -1:
                seq.append(int(cand[a]))
                b = par[mask, a]
                mask ^= 1 << (grp[a] - 1)
                a = b
            seq.append(int(s))
            best_seq = seq[::-1]
    return float(best), best_seq
