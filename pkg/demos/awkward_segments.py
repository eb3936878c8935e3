"""Segments that touch the boundary: vertices, edges, facet planes.

All clippers share one tolerance, 1e-9 times the mesh scale, and count a
touch as a hit.  A segment through a vertex or along an edge therefore
hits with a single-point or along-the-edge interval, and all four
algorithms report the same thing.
"""
import numpy as np

from polyclip import ALGORITHMS, Segment, clip, cube

box = cube(1.0)

cases = {
    "touching a corner only": Segment((0, 3, 0), (2, -1, 2)),
    "through a corner, entering": Segment((2, 2, 2), (0, 0, 0)),
    "along an edge": Segment((-2, 1, 1), (2, 1, 1)),
    "in a face plane, across it": Segment((-2, 0.3, 1), (2, -0.2, 1)),
    "parallel to a face, just outside": Segment((-2, 0, 1 + 1e-6), (2, 0, 1 + 1e-6)),
    "fully inside": Segment((-0.5, 0, 0), (0.5, 0.1, 0)),
}
for name, seg in cases.items():
    results = {algo: clip(box, seg, algo) for algo in ALGORITHMS}
    shown = {a: (np.round(r.interval, 12).tolist() if r.hit else "MISS")
             for a, r in results.items()}
    print(f"{name:34s} {shown}")
