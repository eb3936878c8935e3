"""Points, planes, segments and the small predicates every clipper shares.

Points are plain ``float64`` arrays of shape ``(3,)``.  The scalar kernels
(prefixed with an underscore) are numba-compiled so the clipping loops in
:mod:`polyclip._kernels` can call them without leaving nopython mode; the
public functions wrap them with validation and exceptions.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import NamedTuple, Optional

import numpy as np
from numba import njit

from .errors import DegeneratePlane, DegenerateTriangle

#: Relative tolerance.  Multiplied by a length scale (usually the mesh
#: bounding radius) before it is compared against distances.
EPS = 1e-9
# sine of the smallest angle accepted between the two diagonal planes
MIN_PLANE_SINE = 1e-6


def vec3(x, y=None, z=None) -> np.ndarray:
    """Return a finite ``float64`` point of shape (3,).

    Accepts either three scalars or one length-3 sequence.
    """
    if y is None and z is None:
        v = np.array(x, dtype=np.float64).reshape(-1)
    else:
        v = np.array([x, y, z], dtype=np.float64)
    if v.shape != (3,):
        raise ValueError(f"expected 3 components, got shape {v.shape}")
    if not np.all(np.isfinite(v)):
        raise ValueError(f"non-finite point {v}")
    return v


class SignClass(enum.IntEnum):
    NEGATIVE = -1
    ON_PLANE = 0
    POSITIVE = 1


class ClipMode(enum.Enum):
    SEGMENT = "segment"
    LINE = "line"


@dataclass(frozen=True)
class Plane:
    """Implicit plane ``a*x + b*y + c*z + d = 0``."""

    a: float
    b: float
    c: float
    d: float

    def __post_init__(self):
        coeffs = (self.a, self.b, self.c, self.d)
        if not all(math.isfinite(v) for v in coeffs):
            raise DegeneratePlane(f"non-finite plane coefficients {coeffs}")
        if self.a == 0.0 and self.b == 0.0 and self.c == 0.0:
            raise DegeneratePlane("plane normal is the zero vector")

    @property
    def normal(self) -> np.ndarray:
        return np.array([self.a, self.b, self.c])

    @property
    def coefficients(self) -> np.ndarray:
        return np.array([self.a, self.b, self.c, self.d])

    def __call__(self, x) -> float:
        return plane_eval(self, x)


@dataclass(frozen=True, eq=False)
class Segment:
    """Directed segment ``a -> b``; in LINE mode it stands for the whole line."""

    a: np.ndarray
    b: np.ndarray
    mode: ClipMode = ClipMode.SEGMENT
    direction: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        a = vec3(self.a)
        b = vec3(self.b)
        s = b - a
        if not np.any(s):
            raise ValueError("segment endpoints coincide")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "direction", s)

    @property
    def line_mode(self) -> bool:
        return self.mode is ClipMode.LINE

    def point_at(self, t: float) -> np.ndarray:
        return self.a + self.direction * t

    def as_line(self) -> "Segment":
        return Segment(self.a, self.b, ClipMode.LINE)


def plane_eval(p: Plane, x) -> float:
    return p.a * x[0] + p.b * x[1] + p.c * x[2] + p.d


def sign_classify(v: float, scale: float = 1.0, eps: float = EPS) -> SignClass:
    band = eps * scale
    if v > band:
        return SignClass.POSITIVE
    if v < -band:
        return SignClass.NEGATIVE
    return SignClass.ON_PLANE


# --------------------------------------------------------------------------
# nopython kernels

@njit(cache=True)
def _sign3(v, band):
    return np.int64(v > band) - np.int64(v < -band)


@njit(cache=True)
def _plane_through_line_and_point(ax, ay, az, bx, by, bz, px, py, pz, tol):
    """(ok, A, B, C, D) of the unit-normal plane through a, b and p."""
    sx, sy, sz = bx - ax, by - ay, bz - az
    wx, wy, wz = px - ax, py - ay, pz - az
    nx = sy * wz - sz * wy
    ny = sz * wx - sx * wz
    nz = sx * wy - sy * wx
    nn = math.sqrt(nx * nx + ny * ny + nz * nz)
    slen = math.sqrt(sx * sx + sy * sy + sz * sz)
    # |n| / |s| is the distance from p to the line
    if not nn > tol * slen:
        return False, 0.0, 0.0, 0.0, 0.0
    nx /= nn
    ny /= nn
    nz /= nn
    return True, nx, ny, nz, -(nx * ax + ny * ay + nz * az)


@njit(cache=True)
def _orthogonal_plane(ax, ay, az, bx, by, bz, n1x, n1y, n1z, eps):
    """(ok, A, B, C, D): unit-normal plane through a, b, normal (b-a) x n1."""
    sx, sy, sz = bx - ax, by - ay, bz - az
    nx = sy * n1z - sz * n1y
    ny = sz * n1x - sx * n1z
    nz = sx * n1y - sy * n1x
    nn = math.sqrt(nx * nx + ny * ny + nz * nz)
    slen = math.sqrt(sx * sx + sy * sy + sz * sz)
    n1 = math.sqrt(n1x * n1x + n1y * n1y + n1z * n1z)
    if not nn > eps * slen * n1:
        return False, 0.0, 0.0, 0.0, 0.0
    nx /= nn
    ny /= nn
    nz /= nn
    return True, nx, ny, nz, -(nx * ax + ny * ay + nz * az)


@njit(cache=True)
def _diagonal_planes(ax, ay, az, bx, by, bz, eps):
    """Two planes through the line a->b, the first free of y, the second free of x.

    Returns ``(A1, C1, D1, B2, C2, D2, fallback, gx, gy, gz, gd)``.  When the
    x-free form meets the first plane at an angle whose sine is below
    ``MIN_PLANE_SINE`` (direction with almost no z component) ``fallback``
    is True and the second plane is the general
    orthogonal plane ``gx*x + gy*y + gz*z + gd``; B2, C2, D2 are then unused.
    """
    sx, sy, sz = bx - ax, by - ay, bz - az
    slen = math.sqrt(sx * sx + sy * sy + sz * sz)

    # first plane: normal (A1, 0, C1) orthogonal to s
    A1, C1 = sz, -sx
    m1 = math.sqrt(A1 * A1 + C1 * C1)
    if not m1 > eps * slen:
        # s runs along y: any x = const plane contains the line
        A1, C1 = 1.0, 0.0
        m1 = 1.0
    elif abs(A1) > eps * m1:
        C1 = C1 / A1
        A1 = 1.0
    else:
        A1 = 0.0
        C1 = 1.0
    D1 = -(A1 * ax + C1 * az)

    # second plane: normal (0, B2, C2) orthogonal to s
    B2, C2 = sz, -sy
    m2 = math.sqrt(B2 * B2 + C2 * C2)
    # |n1 x n2| with n1 = (A1, 0, C1), n2 = (0, B2, C2)
    cx = -C1 * B2
    cy = -A1 * C2
    cz = A1 * B2
    cross = math.sqrt(cx * cx + cy * cy + cz * cz)
    n1 = math.sqrt(A1 * A1 + C1 * C1)
    if m2 > eps * slen and cross > MIN_PLANE_SINE * n1 * m2:
        if abs(B2) > eps * m2:
            C2 = C2 / B2
            B2 = 1.0
        else:
            B2 = 0.0
            C2 = 1.0
        D2 = -(B2 * ay + C2 * az)
        return A1, C1, D1, B2, C2, D2, False, 0.0, 0.0, 0.0, 0.0
    ok, gx, gy, gz, gd = _orthogonal_plane(ax, ay, az, bx, by, bz, A1, 0.0, C1, eps)
    return A1, C1, D1, 0.0, 0.0, 0.0, True, gx, gy, gz, gd


@njit(cache=True)
def _solve_line_triangle(ax, ay, az, bx, by, bz, v0x, v0y, v0z, v1x, v1y, v1z,
                         v2x, v2y, v2z, pivot_tol, eps, m):
    """Solve [s1 | s2 | -s] (p, q, t)^T = a - v0 by partial pivoting.

    ``m`` is a caller-owned (3, 4) scratch buffer.  Returns
    ``(status, p, q, t)`` with status 1 for a hit, 0 for a miss and -1 for a
    singular system.
    """
    m[0, 0], m[1, 0], m[2, 0] = v1x - v0x, v1y - v0y, v1z - v0z
    m[0, 1], m[1, 1], m[2, 1] = v2x - v0x, v2y - v0y, v2z - v0z
    m[0, 2], m[1, 2], m[2, 2] = ax - bx, ay - by, az - bz
    m[0, 3], m[1, 3], m[2, 3] = ax - v0x, ay - v0y, az - v0z
    for col in range(3):
        piv = col
        best = abs(m[col, col])
        for r in range(col + 1, 3):
            if abs(m[r, col]) > best:
                best = abs(m[r, col])
                piv = r
        if best < pivot_tol:
            return -1, 0.0, 0.0, 0.0
        if piv != col:
            for c in range(4):
                tmp = m[col, c]
                m[col, c] = m[piv, c]
                m[piv, c] = tmp
        for r in range(col + 1, 3):
            f = m[r, col] / m[col, col]
            if f != 0.0:
                for c in range(col, 4):
                    m[r, c] -= f * m[col, c]
    t = m[2, 3] / m[2, 2]
    q = (m[1, 3] - m[1, 2] * t) / m[1, 1]
    p = (m[0, 3] - m[0, 1] * q - m[0, 2] * t) / m[0, 0]
    if p >= -eps and q >= -eps and p + q <= 1.0 + eps:
        return 1, p, q, t
    return 0, p, q, t


# --------------------------------------------------------------------------
# public constructions

def plane_through_line_and_point(seg: Segment, p, scale: float = 1.0,
                                 eps: float = EPS) -> Plane:
    """Plane containing the line of ``seg`` and the point ``p`` (unit normal).

    The normal is ``(b - a) x (p - a)``.
    """
    ok, A, B, C, D = _plane_through_line_and_point(*seg.a, *seg.b, *vec3(p), eps * scale)
    if not ok:
        raise DegeneratePlane("point is collinear with the segment")
    return Plane(A, B, C, D)


def orthogonal_plane_through_line(seg: Segment, rho1: Plane, scale: float = 1.0,
                                  eps: float = EPS) -> Plane:
    """Plane through the line of ``seg`` perpendicular to ``rho1``."""
    n1 = np.linalg.norm(rho1.normal)
    for x in (seg.a, seg.b):
        if abs(plane_eval(rho1, x)) > eps * scale * n1:
            raise DegeneratePlane("rho1 does not contain the segment")
    ok, A, B, C, D = _orthogonal_plane(*seg.a, *seg.b, rho1.a, rho1.b, rho1.c, eps)
    if not ok:
        raise DegeneratePlane("segment is parallel to the normal of rho1")
    return Plane(A, B, C, D)


class DiagonalPlanes(NamedTuple):
    rho1: Plane
    rho2: Plane
    fallback: bool


def diagonal_planes(seg: Segment, eps: float = EPS) -> DiagonalPlanes:
    """Axis-parallel plane pair through the line of ``seg``.

    ``rho1`` has no y term and ``rho2`` no x term, each scaled so that its
    first nonzero coefficient is 1.  For directions with no z component the
    two forms coincide; ``rho2`` is then replaced by the plane through the
    line orthogonal to ``rho1`` and ``fallback`` is set.
    """
    A1, C1, D1, B2, C2, D2, fallback, gx, gy, gz, gd = _diagonal_planes(*seg.a, *seg.b, eps)
    rho1 = Plane(A1, 0.0, C1, D1)
    if fallback:
        rho2 = Plane(gx, gy, gz, gd)
    else:
        rho2 = Plane(0.0, B2, C2, D2)
    return DiagonalPlanes(rho1, rho2, bool(fallback))


def solve_line_triangle(seg: Segment, v0, v1, v2, scale: float = 1.0,
                        eps: float = EPS) -> Optional[tuple]:
    """Intersect the line of ``seg`` with triangle ``v0 v1 v2``.

    Solves ``v0 + p*(v1 - v0) + q*(v2 - v0) = a + t*(b - a)`` and returns
    ``(p, q, t)`` when the barycentric pair lies in the triangle (with an
    ``eps`` margin), otherwise None.  A line parallel to the triangle plane is
    a miss.
    """
    v0, v1, v2 = vec3(v0), vec3(v1), vec3(v2)
    area = 0.5 * np.linalg.norm(np.cross(v1 - v0, v2 - v0))
    if area <= eps * scale * scale:
        raise DegenerateTriangle(f"triangle area {area:g} below threshold")
    status, p, q, t = _solve_line_triangle(*seg.a, *seg.b, *v0, *v1, *v2, eps * scale, eps,
                                           np.empty((3, 4)))
    if status != 1:
        return None
    return p, q, t
