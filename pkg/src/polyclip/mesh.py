"""Triangulated convex polyhedra with per-edge facet adjacency.

A :class:`ConvexMesh` stores, for every triangular facet, its three vertex
indices (counter-clockwise seen from outside), the outward unit normal and
the three neighbouring facets: ``neighbors[k, e]`` is the facet across edge
``e = (faces[k, e], faces[k, (e + 1) % 3])``.  Meshes are validated once at
construction and are read-only afterwards.
"""
from __future__ import annotations

import math
import os
from typing import NamedTuple, TextIO, Union

import numpy as np
from numba import njit
from scipy.spatial import ConvexHull

from .errors import (DegenerateFacet, FormatError, InvalidFacetCount, MeshError,
                     NotClosed, NotConvex)
from .geometry import EPS


class Facet(NamedTuple):
    vertex_ids: tuple
    normal: np.ndarray
    neighbor_ids: tuple


@njit(cache=True)
def _max_plane_excess_soa(x, y, z, normals, offsets):
    nv = x.shape[0]
    n4 = nv - nv % 4
    worst_k = -1
    worst = -np.inf
    for k in range(normals.shape[0]):
        nx, ny, nz = normals[k, 0], normals[k, 1], normals[k, 2]
        # four independent running maxima keep the pipeline full
        m0 = m1 = m2 = m3 = -np.inf
        for v in range(0, n4, 4):
            m0 = max(m0, nx * x[v] + ny * y[v] + nz * z[v])
            m1 = max(m1, nx * x[v + 1] + ny * y[v + 1] + nz * z[v + 1])
            m2 = max(m2, nx * x[v + 2] + ny * y[v + 2] + nz * z[v + 2])
            m3 = max(m3, nx * x[v + 3] + ny * y[v + 3] + nz * z[v + 3])
        for v in range(n4, nv):
            m0 = max(m0, nx * x[v] + ny * y[v] + nz * z[v])
        m = max(max(m0, m1), max(m2, m3)) + offsets[k]
        if m > worst:
            worst = m
            worst_k = k
    return worst_k, worst


def _max_plane_excess(vertices, normals, offsets):
    """(facet, excess) of the worst vertex lying above some facet plane."""
    x, y, z = (np.ascontiguousarray(c) for c in np.asarray(vertices).T)
    return _max_plane_excess_soa(x, y, z, np.ascontiguousarray(normals),
                                 np.ascontiguousarray(offsets))


def _frozen(a):
    a = np.ascontiguousarray(a)
    a.setflags(write=False)
    return a


def _edge_adjacency(faces, n_vertices):
    """neighbors[k, e] and twins[k, e] from shared directed edges.

    ``twins[k, e]`` is the index of the same edge within facet
    ``neighbors[k, e]``.  Raises NotClosed.
    """
    F = faces.shape[0]
    tail = faces.reshape(-1)
    head = np.roll(faces, -1, axis=1).reshape(-1)
    key = tail * n_vertices + head
    rkey = head * n_vertices + tail
    order = np.argsort(key, kind="stable")
    sorted_keys = key[order]
    if np.any(sorted_keys[1:] == sorted_keys[:-1]):
        raise NotClosed("an edge is used twice with the same orientation "
                        "(non-manifold edge or inconsistent facets)")
    pos = np.searchsorted(sorted_keys, rkey)
    pos = np.minimum(pos, len(sorted_keys) - 1)
    found = sorted_keys[pos] == rkey
    if not np.all(found):
        bad = int(np.flatnonzero(~found)[0])
        edge = (int(tail[bad]), int(head[bad]))
        raise NotClosed(f"edge {edge} of facet {bad // 3} has only one incident facet")
    other = order[pos]
    return (other // 3).reshape(F, 3), (other % 3).reshape(F, 3)


class ConvexMesh:
    """Validated convex triangle mesh.  Build it with :func:`build_mesh`."""

    def __init__(self, vertices, faces, normals, offsets, neighbors, twins, center, scale):
        self.vertices = _frozen(vertices)
        self.faces = _frozen(faces)
        self.normals = _frozen(normals)
        self.offsets = _frozen(offsets)
        self.neighbors = _frozen(neighbors)
        self.twins = _frozen(twins)
        self.center = _frozen(center)
        self.scale = float(scale)
        self.eps = EPS
        # per-facet vertex coordinates and inward edge planes for the kernels
        fv = vertices[faces]
        self.facet_vertices = _frozen(fv)
        edges = np.roll(fv, -1, axis=1) - fv
        inward = np.cross(normals[:, None, :], edges)
        inward /= np.linalg.norm(inward, axis=2, keepdims=True)
        self.edge_normals = _frozen(inward)
        self.edge_offsets = _frozen(-np.einsum("kij,kij->ki", inward, fv))

    @property
    def n_vertices(self) -> int:
        return self.vertices.shape[0]

    @property
    def n_facets(self) -> int:
        return self.faces.shape[0]

    @property
    def n_edges(self) -> int:
        return 3 * self.n_facets // 2

    @property
    def tol(self) -> float:
        """Absolute distance tolerance, ``eps * scale``."""
        return self.eps * self.scale

    def facet(self, k: int) -> Facet:
        return Facet(tuple(int(i) for i in self.faces[k]), self.normals[k].copy(),
                     tuple(int(i) for i in self.neighbors[k]))

    def plane(self, k: int):
        from .geometry import Plane
        n = self.normals[k]
        return Plane(float(n[0]), float(n[1]), float(n[2]), float(self.offsets[k]))

    def __repr__(self):
        return (f"ConvexMesh(V={self.n_vertices}, E={self.n_edges}, "
                f"F={self.n_facets}, scale={self.scale:.6g})")


def build_mesh(vertices, facet_vertex_ids, eps: float = EPS) -> ConvexMesh:
    """Validate a closed convex triangulation and derive normals and adjacency.

    Facet windings are flipped where needed so every normal points away from
    the vertex centroid.

    Raises
    ------
    DegenerateFacet
        wrong arity, repeated vertex index or (near) zero area.
    NotClosed
        an edge without exactly two incident facets, or an Euler
        characteristic other than 2.
    NotConvex
        a vertex more than ``eps * scale`` outside some facet plane.
    """
    vertices = np.array(vertices, dtype=np.float64)
    if vertices.ndim != 2 or vertices.shape[1] != 3:
        raise MeshError(f"vertices must have shape (V, 3), got {vertices.shape}")
    if not np.all(np.isfinite(vertices)):
        raise MeshError("non-finite vertex coordinates")
    try:
        faces = np.array(facet_vertex_ids, dtype=np.int64)
    except ValueError as exc:
        raise DegenerateFacet("facets must all be triangles") from exc
    if faces.ndim != 2 or faces.shape[1] != 3:
        raise DegenerateFacet(f"facets must be triangles, got shape {faces.shape}")
    V, F = vertices.shape[0], faces.shape[0]
    if V < 4 or F < 4:
        raise MeshError(f"need at least 4 vertices and 4 facets, got V={V}, F={F}")
    if faces.min() < 0 or faces.max() >= V:
        raise MeshError("facet vertex index out of range")
    if np.any((faces[:, 0] == faces[:, 1]) | (faces[:, 1] == faces[:, 2])
              | (faces[:, 0] == faces[:, 2])):
        raise DegenerateFacet("facet with repeated vertex index")

    center = vertices.mean(axis=0)
    scale = float(np.linalg.norm(vertices - center, axis=1).max())
    tol = eps * scale

    v0, v1, v2 = (vertices[faces[:, i]] for i in range(3))
    raw = np.cross(v1 - v0, v2 - v0)
    area2 = np.linalg.norm(raw, axis=1)
    if np.any(area2 <= 2.0 * tol * scale):
        raise DegenerateFacet(f"facet {int(np.argmin(area2))} has near-zero area")
    flip = np.einsum("ij,ij->i", raw, center - v0) > 0.0
    faces[flip] = faces[flip][:, [0, 2, 1]]
    raw[flip] = -raw[flip]
    normals = raw / area2[:, None]
    offsets = -np.einsum("ij,ij->i", normals, v0)

    neighbors, twins = _edge_adjacency(faces, V)
    E = 3 * F // 2
    if 2 * E != 3 * F or V - E + F != 2:
        raise NotClosed(f"Euler characteristic V - E + F = {V - E + F}, expected 2")

    k, excess = _max_plane_excess(vertices, normals, offsets)
    if excess > tol:
        raise NotConvex(f"a vertex lies {excess:.3g} outside facet {k}")
    if np.any(normals @ center + offsets >= -tol):
        raise NotConvex("vertex centroid is not strictly inside every facet plane")
    return ConvexMesh(vertices, faces, normals, offsets, neighbors, twins, center, scale)


def facet_centroid(mesh: ConvexMesh, k: int) -> np.ndarray:
    return mesh.facet_vertices[k].mean(axis=0)


def opposite_facet(mesh: ConvexMesh, k: int, edge_index: int) -> int:
    return int(mesh.neighbors[k, edge_index])


def plane_convexity_violation(vertices, faces, normals, offsets, tol):
    """Largest excess of any vertex over any facet plane, or None if within ``tol``."""
    k, excess = _max_plane_excess(np.ascontiguousarray(vertices, dtype=np.float64),
                                  np.ascontiguousarray(normals, dtype=np.float64),
                                  np.ascontiguousarray(offsets, dtype=np.float64))
    return (int(k), float(excess)) if excess > tol else None


def dihedral_convexity_violation(vertices, faces, normals, offsets, neighbors, tol):
    """Local convexity test: for every edge, the apex of the facet across it
    must not rise above this facet's plane.  Returns the worst ``(k, excess)``
    or None."""
    vertices = np.asarray(vertices)
    faces = np.asarray(faces)
    nb = np.asarray(neighbors)
    # apex of the neighbour = its vertex that is not on the shared edge
    nb_faces = faces[nb]                               # (F, 3, 3)
    on_edge = np.zeros(nb_faces.shape, dtype=bool)
    for e in range(3):
        shared = faces[:, [e, (e + 1) % 3]]            # (F, 2)
        on_edge[:, e, :] = ((nb_faces[:, e, :, None] == shared[:, None, :]).any(axis=2))
    apex = np.where(~on_edge, nb_faces, -1).max(axis=2)  # (F, 3)
    f = np.einsum("kj,kej->ke", normals, vertices[apex]) + np.asarray(offsets)[:, None]
    k, e = np.unravel_index(np.argmax(f), f.shape)
    return (int(k), float(f[k, e])) if f[k, e] > tol else None


# --------------------------------------------------------------------------
# generators and fixtures

def fibonacci_sphere(n_points: int) -> np.ndarray:
    """``n_points`` on the unit sphere along the golden-angle spiral."""
    i = np.arange(n_points, dtype=np.float64)
    z = 1.0 - (2.0 * i + 1.0) / n_points
    r = np.sqrt(np.maximum(0.0, 1.0 - z * z))
    phi = i * (math.pi * (3.0 - math.sqrt(5.0)))
    return np.column_stack([r * np.cos(phi), r * np.sin(phi), z])


def random_rotation(rng: np.random.Generator) -> np.ndarray:
    q = rng.standard_normal(4)
    w, x, y, z = q / np.linalg.norm(q)
    return np.array([
        [1 - 2 * (y * y + z * z), 2 * (x * y - z * w), 2 * (x * z + y * w)],
        [2 * (x * y + z * w), 1 - 2 * (x * x + z * z), 2 * (y * z - x * w)],
        [2 * (x * z - y * w), 2 * (y * z + x * w), 1 - 2 * (x * x + y * y)],
    ])


def generate_inscribed_polyhedron(n_facets: int, radius: float = 1.0,
                                  rng_seed: int = 0) -> ConvexMesh:
    """Convex polyhedron with exactly ``n_facets`` triangles inscribed in a sphere.

    ``n_facets // 2 + 2`` spiral points are randomly rotated (seeded) and
    hulled; a hull of V points in convex position has 2V - 4 triangles.
    """
    if isinstance(n_facets, bool) or int(n_facets) != n_facets:
        raise InvalidFacetCount(f"facet count must be an integer, got {n_facets!r}")
    n_facets = int(n_facets)
    if n_facets < 4 or n_facets % 2:
        raise InvalidFacetCount(f"facet count must be even and >= 4, got {n_facets}")
    if not radius > 0:
        raise ValueError("radius must be positive")
    n_vertices = n_facets // 2 + 2
    rng = np.random.default_rng(rng_seed)
    pts = fibonacci_sphere(n_vertices) @ random_rotation(rng).T
    pts *= radius / np.linalg.norm(pts, axis=1, keepdims=True)
    hull = ConvexHull(pts, qhull_options="Qt")
    if len(hull.vertices) != n_vertices or len(hull.simplices) != n_facets:
        raise MeshError(f"hull of {n_vertices} points gave {len(hull.vertices)} vertices "
                        f"and {len(hull.simplices)} facets")
    return build_mesh(pts, hull.simplices)


def unit_tetrahedron() -> ConvexMesh:
    """Corner tetrahedron (0,0,0), (1,0,0), (0,1,0), (0,0,1)."""
    verts = [(0, 0, 0), (1, 0, 0), (0, 1, 0), (0, 0, 1)]
    return build_mesh(verts, [(0, 2, 1), (0, 1, 3), (0, 3, 2), (1, 2, 3)])


def cube(half: float = 1.0) -> ConvexMesh:
    """Axis-aligned cube ``[-half, half]^3`` split into 12 triangles."""
    verts = [(x, y, z) for x in (-half, half) for y in (-half, half) for z in (-half, half)]
    quads = [(0, 1, 3, 2), (4, 6, 7, 5), (0, 4, 5, 1),
             (2, 3, 7, 6), (0, 2, 6, 4), (1, 5, 7, 3)]
    tris = [t for a, b, c, d in quads for t in ((a, b, c), (a, c, d))]
    return build_mesh(verts, tris)


def octahedron(radius: float = 1.0) -> ConvexMesh:
    r = radius
    verts = [(r, 0, 0), (-r, 0, 0), (0, r, 0), (0, -r, 0), (0, 0, r), (0, 0, -r)]
    tris = [(0, 2, 4), (2, 1, 4), (1, 3, 4), (3, 0, 4),
            (2, 0, 5), (1, 2, 5), (3, 1, 5), (0, 3, 5)]
    return build_mesh(verts, tris)


def icosahedron(radius: float = 1.0) -> ConvexMesh:
    g = (1.0 + math.sqrt(5.0)) / 2.0
    verts = np.array([(-1, g, 0), (1, g, 0), (-1, -g, 0), (1, -g, 0),
                      (0, -1, g), (0, 1, g), (0, -1, -g), (0, 1, -g),
                      (g, 0, -1), (g, 0, 1), (-g, 0, -1), (-g, 0, 1)], dtype=float)
    verts *= radius / np.linalg.norm(verts[0])
    tris = [(0, 11, 5), (0, 5, 1), (0, 1, 7), (0, 7, 10), (0, 10, 11),
            (1, 5, 9), (5, 11, 4), (11, 10, 2), (10, 7, 6), (7, 1, 8),
            (3, 9, 4), (3, 4, 2), (3, 2, 6), (3, 6, 8), (3, 8, 9),
            (4, 9, 5), (2, 4, 11), (6, 2, 10), (8, 6, 7), (9, 8, 1)]
    return build_mesh(verts, tris)


# --------------------------------------------------------------------------
# text format:  "V F", V lines "x y z", F lines "i0 i1 i2"

PathLike = Union[str, os.PathLike]


def format_float(x: float) -> str:
    """Shortest round-trip text for ``x``; integral values drop the ``.0``."""
    x = float(x)
    if x == 0.0:
        return "0"
    s = repr(x)
    return s[:-2] if s.endswith(".0") else s


def write_mesh(mesh: ConvexMesh, fh: TextIO) -> None:
    fh.write(f"{mesh.n_vertices} {mesh.n_facets}\n")
    for v in mesh.vertices:
        fh.write(" ".join(format_float(c) for c in v) + "\n")
    for f in mesh.faces:
        fh.write(f"{f[0]} {f[1]} {f[2]}\n")


def save_mesh(mesh: ConvexMesh, path: PathLike) -> None:
    with open(path, "w") as fh:
        write_mesh(mesh, fh)


def read_mesh_arrays(path: PathLike):
    """Parse the mesh text format into ``(vertices, faces)`` without validation."""
    with open(path) as fh:
        tokens = [line.split() for line in fh if line.strip()]
    if not tokens or len(tokens[0]) != 2:
        raise FormatError(f"{path}: header must be 'V F'")
    try:
        V, F = int(tokens[0][0]), int(tokens[0][1])
        if len(tokens) != 1 + V + F:
            raise FormatError(f"{path}: expected {1 + V + F} lines, found {len(tokens)}")
        vertices = np.array([[float(c) for c in row] for row in tokens[1:1 + V]])
        faces = np.array([[int(c) for c in row] for row in tokens[1 + V:]], dtype=np.int64)
    except ValueError as exc:
        raise FormatError(f"{path}: {exc}") from exc
    if vertices.shape != (V, 3) or faces.shape != (F, 3):
        raise FormatError(f"{path}: every vertex needs 3 coordinates and every facet 3 indices")
    return vertices, faces


def load_mesh(path: PathLike, eps: float = EPS) -> ConvexMesh:
    vertices, faces = read_mesh_arrays(path)
    return build_mesh(vertices, faces, eps=eps)
