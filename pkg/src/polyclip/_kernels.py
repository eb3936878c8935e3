"""nopython clipping kernels.

Every kernel clips one segment ``a -> b`` given as six scalars and returns
``(status, t0, t1, facets, cb_steps, plane_tests, walk_visits)``.  Status 1 is
a hit with parameter interval ``[t0, t1]``, 0 a miss, and 2 (filtered
clippers only) means the kernel could not decide and the caller must fall
back to the full Cyrus-Beck loop.

Tolerances: ``tol`` is an absolute distance (eps * mesh scale); a facet is
parallel to the line when ``|s . n| <= eps * |s|``.
"""
import math

import numpy as np
from numba import njit

from .geometry import _diagonal_planes, _orthogonal_plane, _sign3, _solve_line_triangle

COUNTER_FIELDS = ("facets_examined", "cb_steps", "plane_tests", "walk_visits", "fallbacks")
FACETS, CB_STEPS, PLANE_TESTS, WALK_VISITS, FALLBACKS = range(5)

MISS, HIT, UNDECIDED = 0, 1, 2

_NEXT = np.array([1, 2, 0])


@njit(cache=True, error_model="numpy")
def _finish(t0, t1, line_mode, slen, tol):
    if not line_mode:
        if t0 < 0.0:
            t0 = 0.0
        if t1 > 1.0:
            t1 = 1.0
    # inverted by less than tol (a graze) collapses to a single point
    if t0 > t1 + tol / slen:
        return MISS, np.nan, np.nan
    if t0 > t1:
        t0 = t1 = 0.5 * (t0 + t1)
    return HIT, t0, t1


@njit(cache=True, error_model="numpy")
def cb_step(nx, ny, nz, d, ax, ay, az, sx, sy, sz, par, tol, t0, t1):
    """One Cyrus-Beck half-space update; returns (t0, t1, emptied).

    Written with selects rather than branches: the sign of s.n is
    unpredictable from facet to facet.
    """
    xi = sx * nx + sy * ny + sz * nz
    num = -(nx * ax + ny * ay + nz * az + d)
    t = num / xi
    t1 = min(t1, t) if xi > par else t1
    t0 = max(t0, t) if xi < -par else t0
    # parallel, with a outside this half-space
    emptied = abs(xi) <= par and num < -tol
    return t0, t1, emptied


@njit(cache=True, error_model="numpy")
def cb_clip(ax, ay, az, bx, by, bz, line_mode, normals, offsets, tol, eps):
    sx, sy, sz = bx - ax, by - ay, bz - az
    slen = math.sqrt(sx * sx + sy * sy + sz * sz)
    par = eps * slen
    if line_mode:
        t0, t1 = -np.inf, np.inf
    else:
        t0, t1 = 0.0, 1.0
    empty = False
    F = normals.shape[0]
    for i in range(F):
        t0, t1, emptied = cb_step(normals[i, 0], normals[i, 1], normals[i, 2], offsets[i],
                                  ax, ay, az, sx, sy, sz, par, tol, t0, t1)
        empty = empty or emptied
    if empty:
        return MISS, np.nan, np.nan, F, F, 0, 0
    st, t0, t1 = _finish(t0, t1, line_mode, slen, tol)
    return st, t0, t1, F, F, 0, 0


@njit(cache=True, error_model="numpy")
def _detailed(i, ax, ay, az, sx, sy, sz, par, tol, normals, offsets,
              lo, hi, klo, khi, empty):
    """Cyrus-Beck step on facet i, remembering which facets set each bound."""
    nx, ny, nz = normals[i, 0], normals[i, 1], normals[i, 2]
    xi = sx * nx + sy * ny + sz * nz
    num = -(nx * ax + ny * ay + nz * az + offsets[i])
    if xi > par:
        t = num / xi
        if t < hi:
            hi, khi = t, i
    elif xi < -par:
        t = num / xi
        if t > lo:
            lo, klo = t, i
    elif num < -tol:
        empty = True
    return lo, hi, klo, khi, empty


@njit(cache=True, error_model="numpy")
def _pierces(i, t, ax, ay, az, sx, sy, sz, edge_normals, edge_offsets, tol):
    """Does the line point at parameter t lie inside triangle i (within tol)?"""
    px, py, pz = ax + t * sx, ay + t * sy, az + t * sz
    for e in range(3):
        if (edge_normals[i, e, 0] * px + edge_normals[i, e, 1] * py
                + edge_normals[i, e, 2] * pz + edge_offsets[i, e]) < -tol:
            return False
    return True


@njit(cache=True, error_model="numpy")
def _pierces_coplanar(k, t, ax, ay, az, sx, sy, sz, normals, offsets, neighbors,
                      edge_normals, edge_offsets, tol, work):
    """Search the triangles edge-connected to k whose planes hold x(t).

    ``work`` is int64 scratch of length 3F whose middle third must be zero;
    it holds the stack, the visited flags and the list of flags to clear.
    """
    px, py, pz = ax + t * sx, ay + t * sy, az + t * sz
    F = normals.shape[0]
    work[F + k] = 1
    work[2 * F] = k
    marked = 1
    work[0] = k
    top = 1
    found = False
    while top > 0 and not found:
        top -= 1
        i = work[top]
        for e in range(3):
            j = neighbors[i, e]
            if work[F + j]:
                continue
            work[F + j] = 1
            work[2 * F + marked] = j
            marked += 1
            if abs(normals[j, 0] * px + normals[j, 1] * py + normals[j, 2] * pz
                   + offsets[j]) > tol:
                continue
            if _pierces(j, t, ax, ay, az, sx, sy, sz, edge_normals, edge_offsets, tol):
                found = True
                break
            work[top] = j
            top += 1
    for m in range(marked):
        work[F + work[2 * F + m]] = 0
    return found


@njit(cache=True, error_model="numpy")
def _pierces_face(k, t, ax, ay, az, sx, sy, sz, normals, offsets, neighbors,
                  edge_normals, edge_offsets, tol, work):
    """Does the line point at t lie on the polygon face containing triangle k?

    A flat face split into several triangles ties their bounds, and the one
    recorded may not be the triangle actually pierced; the search moves on
    to the edge-connected triangles whose planes hold the point.
    """
    if _pierces(k, t, ax, ay, az, sx, sy, sz, edge_normals, edge_offsets, tol):
        return True
    px, py, pz = ax + t * sx, ay + t * sy, az + t * sz
    for e in range(3):
        j = neighbors[k, e]
        if abs(normals[j, 0] * px + normals[j, 1] * py + normals[j, 2] * pz
               + offsets[j]) <= tol:
            return _pierces_coplanar(k, t, ax, ay, az, sx, sy, sz, normals, offsets,
                                     neighbors, edge_normals, edge_offsets, tol, work)
    return False


@njit(cache=True, error_model="numpy")
def _filtered_result(lo, hi, klo, khi, empty, ax, ay, az, sx, sy, sz, normals, offsets,
                     neighbors, edge_normals, edge_offsets, line_mode, slen, tol, work):
    """Turn the candidate-facet interval into a decision.

    The candidates always include the facets where a line that meets the
    solid enters and leaves it, and those are exactly the facets that set
    the tightest bounds.  So the line meets the solid iff it pierces the
    face behind ``lo`` or behind ``hi``; without this check a missing line
    can still leave a non-empty interval.
    """
    if empty:
        return MISS, np.nan, np.nan
    hit = ((klo >= 0 and _pierces_face(klo, lo, ax, ay, az, sx, sy, sz, normals, offsets,
                                       neighbors, edge_normals, edge_offsets, tol, work))
           or (khi >= 0 and _pierces_face(khi, hi, ax, ay, az, sx, sy, sz, normals,
                                          offsets, neighbors, edge_normals, edge_offsets,
                                          tol, work)))
    if not hit:
        return MISS, np.nan, np.nan
    if klo < 0 or khi < 0:
        return UNDECIDED, np.nan, np.nan
    return _finish(lo, hi, line_mode, slen, tol)


@njit(cache=True, error_model="numpy")
def planes_clip(ax, ay, az, bx, by, bz, line_mode, vertices, faces, normals, offsets,
                neighbors, edge_normals, edge_offsets, tol, eps, q, work):
    """Two-plane filtered clip.

    ``q`` is int8 scratch of length V (sign cache); ``work`` is zeroed int64
    scratch of length 3F, left zeroed on return.
    """
    sx, sy, sz = bx - ax, by - ay, bz - az
    slen = math.sqrt(sx * sx + sy * sy + sz * sz)
    par = eps * slen
    A1, C1, D1, B2, C2, D2, fallback, gx, gy, gz, gd = _diagonal_planes(ax, ay, az,
                                                                        bx, by, bz, eps)
    band1 = tol * math.sqrt(A1 * A1 + C1 * C1)
    if fallback:
        P2x, P2y, P2z, P2d = gx, gy, gz, gd
    else:
        P2x, P2y, P2z, P2d = 0.0, B2, C2, D2
    band2 = tol * math.sqrt(P2x * P2x + P2y * P2y + P2z * P2z)

    V = vertices.shape[0]
    for k in range(V):
        q[k] = _sign3(A1 * vertices[k, 0] + C1 * vertices[k, 2] + D1, band1)
    tests = V

    lo, hi = -np.inf, np.inf
    klo = khi = -1
    empty = False
    steps = 0
    F = faces.shape[0]
    for i in range(F):
        i0, i1, i2 = faces[i, 0], faces[i, 1], faces[i, 2]
        tests += 1
        q0 = q[i0]
        if q0 != 0 and q0 == q[i1] and q0 == q[i2]:
            continue
        r0 = _sign3(P2x * vertices[i0, 0] + P2y * vertices[i0, 1]
                    + P2z * vertices[i0, 2] + P2d, band2)
        r1 = _sign3(P2x * vertices[i1, 0] + P2y * vertices[i1, 1]
                    + P2z * vertices[i1, 2] + P2d, band2)
        tests += 2
        if r0 != 0 and r0 == r1:
            r2 = _sign3(P2x * vertices[i2, 0] + P2y * vertices[i2, 1]
                        + P2z * vertices[i2, 2] + P2d, band2)
            tests += 1
            if r0 == r2:
                continue
        steps += 1
        lo, hi, klo, khi, empty = _detailed(i, ax, ay, az, sx, sy, sz, par, tol,
                                                normals, offsets, lo, hi, klo, khi, empty)
    st, t0, t1 = _filtered_result(lo, hi, klo, khi, empty, ax, ay, az, sx, sy, sz,
                                  normals, offsets, neighbors, edge_normals, edge_offsets,
                                  line_mode, slen, tol, work)
    return st, t0, t1, F, steps, tests, 0


@njit(cache=True, error_model="numpy")
def _eval(fv, k, j, nx, ny, nz, d):
    # paired sums: shorter dependency chain than left-to-right accumulation
    return (nx * fv[k, j, 0] + ny * fv[k, j, 1]) + (nz * fv[k, j, 2] + d)


@njit(cache=True, error_model="numpy")
def sqrt_clip(ax, ay, az, bx, by, bz, line_mode, facet_vertices, normals, offsets,
              neighbors, twins, edge_normals, edge_offsets, tol, eps, work):
    """Walk the ring of facets cut by the plane through the line and a facet
    centroid, running the Cyrus-Beck step on those also cut by the
    orthogonal plane.

    Crossing decisions use one bit per vertex (below the first plane or
    not); the bits and the orthogonal-plane signs of the two vertices on the
    edge just crossed are carried into the next facet, so each step only
    evaluates its third vertex.
    """
    sx, sy, sz = bx - ax, by - ay, bz - az
    slen = math.sqrt(sx * sx + sy * sy + sz * sz)
    par = eps * slen
    fv = facet_vertices
    F = normals.shape[0]

    start = -1
    n1x = n1y = n1z = 0.0
    for k in range(F):
        xi = sx * normals[k, 0] + sy * normals[k, 1] + sz * normals[k, 2]
        num = -(normals[k, 0] * ax + normals[k, 1] * ay + normals[k, 2] * az + offsets[k])
        if abs(xi) <= par and abs(num) <= tol:
            continue  # facet plane holds the line
        wx = (fv[k, 0, 0] + fv[k, 1, 0] + fv[k, 2, 0]) / 3.0 - ax
        wy = (fv[k, 0, 1] + fv[k, 1, 1] + fv[k, 2, 1]) / 3.0 - ay
        wz = (fv[k, 0, 2] + fv[k, 1, 2] + fv[k, 2, 2]) / 3.0 - az
        n1x = sy * wz - sz * wy
        n1y = sz * wx - sx * wz
        n1z = sx * wy - sy * wx
        nn = math.sqrt(n1x * n1x + n1y * n1y + n1z * n1z)
        if nn > tol * slen:
            n1x /= nn
            n1y /= nn
            n1z /= nn
            start = k
            break
    if start < 0:
        return UNDECIDED, np.nan, np.nan, 0, 0, 0, 0
    d1 = -(n1x * ax + n1y * ay + n1z * az)
    ok, n2x, n2y, n2z, d2 = _orthogonal_plane(ax, ay, az, bx, by, bz, n1x, n1y, n1z, eps)
    if not ok:
        return UNDECIDED, np.nan, np.nan, 0, 0, 0, 0

    lo, hi = -np.inf, np.inf
    klo = khi = -1
    empty = False
    steps = 0
    tests = 6

    # start facet: all three vertices; (p, q) is the exit edge, w the third
    k = start
    g0 = np.int64(_eval(fv, k, 0, n1x, n1y, n1z, d1) < -tol)
    g1 = np.int64(_eval(fv, k, 1, n1x, n1y, n1z, d1) < -tol)
    g2 = np.int64(_eval(fv, k, 2, n1x, n1y, n1z, d1) < -tol)
    r0 = _sign3(_eval(fv, k, 0, n2x, n2y, n2z, d2), tol)
    r1 = _sign3(_eval(fv, k, 1, n2x, n2y, n2z, d2), tol)
    r2 = _sign3(_eval(fv, k, 2, n2x, n2y, n2z, d2), tol)
    if not (r0 != 0 and r0 == r1 and r0 == r2):
        steps += 1
        lo, hi, klo, khi, empty = _detailed(k, ax, ay, az, sx, sy, sz, par, tol,
                                                normals, offsets, lo, hi, klo, khi, empty)
    if g0 != g1:
        e, gp, rp, rq = 0, g0, r0, r1
    elif g1 != g2:
        e, gp, rp, rq = 1, g1, r1, r2
    elif g2 != g0:
        e, gp, rp, rq = 2, g2, r2, r0
    else:
        return UNDECIDED, np.nan, np.nan, 1, steps, tests, 1

    visits = 1
    while True:
        nxt = neighbors[k, e]
        if nxt == start:
            break
        if visits >= F:
            return UNDECIDED, np.nan, np.nan, visits, steps, tests, visits
        # the edge p -> q of k is q -> p in nxt, at index f
        f = twins[k, e]
        k = nxt
        visits += 1
        w = f - 1 if f > 0 else 2
        # carried values: vertex f is q, vertex f+1 is p.  The first-plane
        # bit of p is the same all round the ring: an exit edge either keeps
        # p or hands its role to w, and then gw == gp.
        gw = np.int64(_eval(fv, k, w, n1x, n1y, n1z, d1) < -tol)
        rw = _sign3(_eval(fv, k, w, n2x, n2y, n2z, d2), tol)
        tests += 2
        if not (rw != 0 and rw == rp and rw == rq):
            steps += 1
            lo, hi, klo, khi, empty = _detailed(k, ax, ay, az, sx, sy, sz, par, tol,
                                                normals, offsets, lo, hi, klo, khi, empty)
        # exit over edge f+1 (p -> w) when the first plane separates p and w,
        # otherwise over edge w (w -> q).  Integer selects: the choice is a
        # coin flip, so a branch here mispredicts half the time.
        c = gw ^ gp
        e = w + c * (_NEXT[f] - w)
        rq = rq + c * (rw - rq)
        rp = rw + c * (rp - rw)
    st, t0, t1 = _filtered_result(lo, hi, klo, khi, empty, ax, ay, az, sx, sy, sz,
                                  normals, offsets, neighbors, edge_normals, edge_offsets,
                                  line_mode, slen, tol, work)
    return st, t0, t1, visits, steps, tests, visits


@njit(cache=True, error_model="numpy")
def _overlap_in_plane(i, ax, ay, az, sx, sy, sz, edge_normals, edge_offsets, tol):
    """Parameter range where a line lying in the plane of triangle i stays
    inside it, clipped against the three inward edge lines.

    The range comes from the exact edges; the edges pushed out by tol only
    decide whether a line that just misses still grazes the triangle, which
    then touches at a single point.
    """
    t0, t1 = -np.inf, np.inf
    w0, w1 = -np.inf, np.inf
    for e in range(3):
        ex, ey, ez = edge_normals[i, e, 0], edge_normals[i, e, 1], edge_normals[i, e, 2]
        d = ex * sx + ey * sy + ez * sz
        w = ex * ax + ey * ay + ez * az + edge_offsets[i, e]
        if d > 0.0:
            t0 = max(t0, -w / d)
            w0 = max(w0, -(w + tol) / d)
        elif d < 0.0:
            t1 = min(t1, -w / d)
            w1 = min(w1, -(w + tol) / d)
        elif w < -tol:
            return False, 0.0, 0.0
    if w0 > w1:
        return False, 0.0, 0.0
    if t0 > t1:
        t = min(max(0.5 * (t0 + t1), w0), w1)
        return True, t, t
    return True, t0, t1


@njit(cache=True, error_model="numpy")
def oracle_clip(ax, ay, az, bx, by, bz, line_mode, fv, normals, offsets, edge_normals,
                edge_offsets, tol, eps, m):
    """Union of the line's intersections with every triangle.

    Facets crossed by the line contribute the solved 3x3 line/triangle
    point; facets whose plane holds the line (within tol) contribute the
    stretch of the line lying on the triangle.
    """
    sx, sy, sz = bx - ax, by - ay, bz - az
    slen = math.sqrt(sx * sx + sy * sy + sz * sz)
    par = eps * slen
    lo, hi = np.inf, -np.inf
    hits = 0
    F = fv.shape[0]
    for i in range(F):
        xi = normals[i, 0] * sx + normals[i, 1] * sy + normals[i, 2] * sz
        dist = normals[i, 0] * ax + normals[i, 1] * ay + normals[i, 2] * az + offsets[i]
        if abs(xi) <= par and abs(dist) <= tol:
            ok, t0, t1 = _overlap_in_plane(i, ax, ay, az, sx, sy, sz, edge_normals,
                                           edge_offsets, tol)
            if ok:
                hits += 1
                lo = min(lo, t0)
                hi = max(hi, t1)
            continue
        status, p, q, t = _solve_line_triangle(
            ax, ay, az, bx, by, bz,
            fv[i, 0, 0], fv[i, 0, 1], fv[i, 0, 2], fv[i, 1, 0], fv[i, 1, 1], fv[i, 1, 2],
            fv[i, 2, 0], fv[i, 2, 1], fv[i, 2, 2], tol, eps, m)
        if status == 1:
            hits += 1
            lo = min(lo, t)
            hi = max(hi, t)
    if hits == 0:
        if line_mode:
            return MISS, np.nan, np.nan, F, 0, 0, 0
        for i in range(F):
            if normals[i, 0] * ax + normals[i, 1] * ay + normals[i, 2] * az + offsets[i] > tol:
                return MISS, np.nan, np.nan, F, 0, 0, 0
        return HIT, 0.0, 1.0, F, 0, 0, 0
    st, t0, t1 = _finish(lo, hi, line_mode, slen, tol)
    return st, t0, t1, F, 0, 0, 0


# --------------------------------------------------------------------------
# batch drivers: one call clips every row of A -> B

@njit(cache=True, error_model="numpy")
def _store(j, res, status, t, cnt):
    status[j] = res[0]
    t[j, 0] = res[1]
    t[j, 1] = res[2]
    cnt[j, FACETS] = res[3]
    cnt[j, CB_STEPS] = res[4]
    cnt[j, PLANE_TESTS] = res[5]
    cnt[j, WALK_VISITS] = res[6]


@njit(cache=True, error_model="numpy")
def batch_cb(A, B, line_mode, normals, offsets, tol, eps, status, t, cnt):
    for j in range(A.shape[0]):
        res = cb_clip(A[j, 0], A[j, 1], A[j, 2], B[j, 0], B[j, 1], B[j, 2], line_mode,
                      normals, offsets, tol, eps)
        _store(j, res, status, t, cnt)


@njit(cache=True, error_model="numpy")
def batch_planes(A, B, line_mode, vertices, faces, normals, offsets, neighbors,
                 edge_normals, edge_offsets, tol, eps, status, t, cnt):
    q = np.empty(vertices.shape[0], dtype=np.int8)
    work = np.zeros(3 * faces.shape[0], dtype=np.int64)
    for j in range(A.shape[0]):
        res = planes_clip(A[j, 0], A[j, 1], A[j, 2], B[j, 0], B[j, 1], B[j, 2], line_mode,
                          vertices, faces, normals, offsets, neighbors, edge_normals,
                          edge_offsets, tol, eps, q, work)
        if res[0] == UNDECIDED:
            res = cb_clip(A[j, 0], A[j, 1], A[j, 2], B[j, 0], B[j, 1], B[j, 2], line_mode,
                          normals, offsets, tol, eps)
            cnt[j, FALLBACKS] = 1
        _store(j, res, status, t, cnt)


@njit(cache=True, error_model="numpy")
def batch_sqrt(A, B, line_mode, facet_vertices, normals, offsets, neighbors, twins,
               edge_normals, edge_offsets, tol, eps, status, t, cnt):
    work = np.zeros(3 * normals.shape[0], dtype=np.int64)
    for j in range(A.shape[0]):
        res = sqrt_clip(A[j, 0], A[j, 1], A[j, 2], B[j, 0], B[j, 1], B[j, 2], line_mode,
                        facet_vertices, normals, offsets, neighbors, twins, edge_normals,
                        edge_offsets, tol, eps, work)
        if res[0] == UNDECIDED:
            visits = res[6]
            res = cb_clip(A[j, 0], A[j, 1], A[j, 2], B[j, 0], B[j, 1], B[j, 2], line_mode,
                          normals, offsets, tol, eps)
            _store(j, res, status, t, cnt)
            cnt[j, WALK_VISITS] = visits
            cnt[j, FALLBACKS] = 1
        else:
            _store(j, res, status, t, cnt)


@njit(cache=True, error_model="numpy")
def batch_oracle(A, B, line_mode, facet_vertices, normals, offsets, edge_normals, edge_offsets,
                 tol, eps, status, t, cnt):
    m = np.empty((3, 4))
    for j in range(A.shape[0]):
        res = oracle_clip(A[j, 0], A[j, 1], A[j, 2], B[j, 0], B[j, 1], B[j, 2], line_mode,
                          facet_vertices, normals, offsets, edge_normals, edge_offsets,
                          tol, eps, m)
        _store(j, res, status, t, cnt)
