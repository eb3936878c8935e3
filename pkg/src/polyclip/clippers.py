"""Line and segment clipping against a :class:`~polyclip.mesh.ConvexMesh`.

Four interchangeable clippers share one result type:

``clip_cb``
    Cyrus-Beck: one half-space update per facet, all N facets.
``clip_two_planes``
    Two axis-parallel planes through the line; only facets whose vertices
    straddle both get the Cyrus-Beck update.  Vertex signs for the first
    plane are computed once per call and shared by all facets.
``clip_sqrt``
    Walks the ring of facets cut by a plane through the line and a facet
    centroid, using the neighbour table.  Visits O(sqrt N) facets on
    sphere-like meshes.
``clip_oracle``
    Solves the line/triangle linear system against every facet.  Slow,
    independent of the other three, used as ground truth.

Single-segment functions return :class:`ClipResult`; :func:`clip_batch`
clips many segments in one compiled loop and is what the benchmark times.
"""
from __future__ import annotations

from dataclasses import dataclass, field, fields
from typing import Optional

import numpy as np

from . import _kernels as K
from .errors import WalkStalled
from .geometry import EPS, Plane, Segment, _sign3, vec3
from .mesh import ConvexMesh


@dataclass
class Counters:
    facets_examined: int = 0
    cb_steps: int = 0
    plane_tests: int = 0
    walk_visits: int = 0
    fallbacks: int = 0

    @classmethod
    def from_array(cls, arr) -> "Counters":
        return cls(*(int(v) for v in arr))

    def as_array(self) -> np.ndarray:
        return np.array([getattr(self, f.name) for f in fields(self)], dtype=np.int64)

    def __add__(self, other: "Counters") -> "Counters":
        return Counters.from_array(self.as_array() + other.as_array())


@dataclass
class ClipResult:
    interval: Optional[tuple]
    clipped_a: Optional[np.ndarray] = None
    clipped_b: Optional[np.ndarray] = None
    counters: Counters = field(default_factory=Counters)

    @property
    def hit(self) -> bool:
        return self.interval is not None


def _result(seg: Segment, res, fallbacks: int = 0) -> ClipResult:
    status, t0, t1 = res[:3]
    counters = Counters(*(int(v) for v in res[3:7]), fallbacks)
    if status != K.HIT:
        return ClipResult(None, None, None, counters)
    return ClipResult((float(t0), float(t1)), seg.point_at(t0), seg.point_at(t1), counters)


# --------------------------------------------------------------------------
# single steps

def cb_step(mesh: ConvexMesh, k: int, seg: Segment, interval) -> Optional[tuple]:
    """Tighten ``interval = (t_min, t_max)`` by the half-space of facet ``k``.

    Returns None when the line is parallel to the facet and ``seg.a`` lies
    outside it, which empties the interval for good.  An interval with
    ``t_min > t_max`` is returned as is; callers decide what that means.
    """
    n = mesh.normals[k]
    s = seg.direction
    t0, t1, emptied = K.cb_step(n[0], n[1], n[2], mesh.offsets[k], seg.a[0], seg.a[1],
                                seg.a[2], s[0], s[1], s[2], mesh.eps * np.linalg.norm(s),
                                mesh.tol, float(interval[0]), float(interval[1]))
    return None if emptied else (t0, t1)


def facet_crossed_by(mesh: ConvexMesh, k: int, plane: Plane, sign_cache=None) -> bool:
    """True unless all three vertices of facet ``k`` lie strictly on one side.

    A vertex within the tolerance band counts as crossing.  ``sign_cache``
    may hold precomputed per-vertex signs (-1, 0, 1) for ``plane``.
    """
    ids = mesh.faces[k]
    if sign_cache is not None:
        s0, s1, s2 = (int(sign_cache[i]) for i in ids)
    else:
        band = mesh.tol * float(np.linalg.norm(plane.normal))
        s0, s1, s2 = (_sign3(plane(mesh.vertices[i]), band) for i in ids)
    return not (s0 != 0 and s0 == s1 == s2)


def vertex_signs(mesh: ConvexMesh, plane: Plane) -> np.ndarray:
    """Sign class of ``plane`` at every vertex, as an int8 vector."""
    f = mesh.vertices @ plane.normal + plane.d
    band = mesh.tol * float(np.linalg.norm(plane.normal))
    return (np.where(f > band, 1, 0) - np.where(f < -band, 1, 0)).astype(np.int8)


# --------------------------------------------------------------------------
# clippers

def clip_cb(mesh: ConvexMesh, seg: Segment) -> ClipResult:
    res = K.cb_clip(*seg.a, *seg.b, seg.line_mode, mesh.normals, mesh.offsets,
                    mesh.tol, mesh.eps)
    return _result(seg, res)


def _work(mesh):
    # scratch for the coplanar-face search of the filtered clippers
    return np.zeros(3 * mesh.n_facets, dtype=np.int64)


def clip_two_planes(mesh: ConvexMesh, seg: Segment) -> ClipResult:
    q = np.empty(mesh.n_vertices, dtype=np.int8)
    res = K.planes_clip(*seg.a, *seg.b, seg.line_mode, mesh.vertices, mesh.faces,
                        mesh.normals, mesh.offsets, mesh.neighbors, mesh.edge_normals,
                        mesh.edge_offsets, mesh.tol, mesh.eps, q, _work(mesh))
    if res[0] == K.UNDECIDED:
        return _result(seg, K.cb_clip(*seg.a, *seg.b, seg.line_mode, mesh.normals,
                                      mesh.offsets, mesh.tol, mesh.eps), fallbacks=1)
    return _result(seg, res)


def clip_sqrt(mesh: ConvexMesh, seg: Segment, fallback: bool = True) -> ClipResult:
    """Ring-walk clip.

    If the walk stalls on a degenerate configuration the segment is clipped
    with :func:`clip_cb` instead and ``counters.fallbacks`` is 1; with
    ``fallback=False`` :class:`WalkStalled` is raised.
    """
    res = K.sqrt_clip(*seg.a, *seg.b, seg.line_mode, mesh.facet_vertices, mesh.normals,
                      mesh.offsets, mesh.neighbors, mesh.twins, mesh.edge_normals,
                      mesh.edge_offsets, mesh.tol, mesh.eps, _work(mesh))
    if res[0] == K.UNDECIDED:
        if not fallback:
            raise WalkStalled(f"ring walk stalled after {res[6]} facets")
        out = _result(seg, K.cb_clip(*seg.a, *seg.b, seg.line_mode, mesh.normals,
                                     mesh.offsets, mesh.tol, mesh.eps), fallbacks=1)
        out.counters.walk_visits = int(res[6])
        return out
    return _result(seg, res)


def clip_oracle(mesh: ConvexMesh, seg: Segment) -> ClipResult:
    res = K.oracle_clip(*seg.a, *seg.b, seg.line_mode, mesh.facet_vertices, mesh.normals,
                        mesh.offsets, mesh.edge_normals, mesh.edge_offsets, mesh.tol,
                        mesh.eps, np.empty((3, 4)))
    return _result(seg, res)


ALGORITHMS = {
    "cb": clip_cb,
    "planes": clip_two_planes,
    "sqrt": clip_sqrt,
    "oracle": clip_oracle,
}


def clip(mesh: ConvexMesh, seg: Segment, algo: str = "sqrt") -> ClipResult:
    try:
        fn = ALGORITHMS[algo]
    except KeyError:
        raise ValueError(f"unknown algorithm {algo!r}; choose from {sorted(ALGORITHMS)}")
    return fn(mesh, seg)


# --------------------------------------------------------------------------
# batches

@dataclass
class BatchResult:
    """Per-row outcome of :func:`clip_batch`; ``t`` rows are NaN for misses."""

    hit: np.ndarray
    t: np.ndarray
    counters: np.ndarray

    def totals(self) -> Counters:
        return Counters.from_array(self.counters.sum(axis=0))

    def result(self, j: int, a, b, line_mode: bool = False) -> ClipResult:
        seg = Segment(a, b, _mode(line_mode))
        st = K.HIT if self.hit[j] else K.MISS
        c = self.counters[j]
        return _result(seg, (st, self.t[j, 0], self.t[j, 1], *c[:4]), fallbacks=int(c[4]))


def _mode(line_mode):
    from .geometry import ClipMode
    return ClipMode.LINE if line_mode else ClipMode.SEGMENT


def _as_points(X):
    X = np.ascontiguousarray(X, dtype=np.float64)
    if X.ndim != 2 or X.shape[1] != 3:
        raise ValueError(f"expected an (M, 3) array of points, got {X.shape}")
    return X


def clip_batch(mesh: ConvexMesh, A, B, algo: str = "sqrt",
               line_mode: bool = False) -> BatchResult:
    """Clip the segments ``A[j] -> B[j]`` with one algorithm in a compiled loop."""
    A, B = _as_points(A), _as_points(B)
    if A.shape != B.shape:
        raise ValueError("A and B must have the same shape")
    if np.any(np.all(A == B, axis=1)):
        raise ValueError("segment with coincident endpoints")
    M = A.shape[0]
    status = np.zeros(M, dtype=np.int64)
    t = np.full((M, 2), np.nan)
    cnt = np.zeros((M, len(K.COUNTER_FIELDS)), dtype=np.int64)
    run_batch(mesh, A, B, algo, line_mode, status, t, cnt)
    return BatchResult(status == K.HIT, t, cnt)


def run_batch(mesh, A, B, algo, line_mode, status, t, cnt):
    """Kernel dispatch without validation or allocation (used for timing)."""
    m = mesh
    if algo == "cb":
        K.batch_cb(A, B, line_mode, m.normals, m.offsets, m.tol, m.eps, status, t, cnt)
    elif algo == "planes":
        K.batch_planes(A, B, line_mode, m.vertices, m.faces, m.normals, m.offsets, m.neighbors,
                       m.edge_normals, m.edge_offsets, m.tol, m.eps, status, t, cnt)
    elif algo == "sqrt":
        K.batch_sqrt(A, B, line_mode, m.facet_vertices, m.normals, m.offsets, m.neighbors,
                     m.twins, m.edge_normals, m.edge_offsets, m.tol, m.eps, status, t, cnt)
    elif algo == "oracle":
        K.batch_oracle(A, B, line_mode, m.facet_vertices, m.normals, m.offsets,
                       m.edge_normals, m.edge_offsets, m.tol, m.eps, status, t, cnt)
    else:
        raise ValueError(f"unknown algorithm {algo!r}; choose from {sorted(ALGORITHMS)}")


# --------------------------------------------------------------------------
# agreement

def results_agree(r1: ClipResult, r2: ClipResult, seg: Segment, scale: float,
                  rtol: float = 1e-9) -> bool:
    """Same hit/miss decision and, for hits, both ends within ``rtol * scale``
    measured as distance along the segment."""
    if r1.hit != r2.hit:
        return False
    if not r1.hit:
        return True
    slen = float(np.linalg.norm(seg.direction))
    d = np.abs(np.subtract(r1.interval, r2.interval)) * slen
    return bool(np.all(d <= rtol * scale))


def batch_disagreements(r1: BatchResult, r2: BatchResult, A, B, scale: float,
                        rtol: float = 1e-9) -> np.ndarray:
    """Row indices where two batch results disagree (see :func:`results_agree`)."""
    slen = np.linalg.norm(np.asarray(B) - np.asarray(A), axis=1)
    both = r1.hit & r2.hit
    dt = np.abs(r1.t - r2.t).max(axis=1) * slen
    bad = (r1.hit != r2.hit) | (both & ~(dt <= rtol * scale))
    return np.flatnonzero(bad)
