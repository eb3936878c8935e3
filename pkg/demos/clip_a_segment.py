"""Clip one segment against the unit tetrahedron with every clipper.

The corner tetrahedron (0,0,0), (1,0,0), (0,1,0), (0,0,1) and the segment
(-1, .25, .25) -> (1, .25, .25) have a known answer: the segment enters the
solid at t = 0.5 through the facet x = 0 and leaves at t = 0.75 through
x + y + z = 1.
"""
from polyclip import ALGORITHMS, ClipMode, Segment, clip, unit_tetrahedron

tet = unit_tetrahedron()
print(tet)

seg = Segment((-1, 0.25, 0.25), (1, 0.25, 0.25))
for algo in ALGORITHMS:
    r = clip(tet, seg, algo)
    print(f"{algo:>7}: t = {r.interval}, a' = {r.clipped_a}, b' = {r.clipped_b}")
    print(f"         {r.counters}")

# The same two points as an infinite line: the interval is no longer cut
# to [0, 1].
inner = Segment((0.1, 0.1, 0.1), (0.2, 0.2, 0.2))
print("segment:", clip(tet, inner).interval)
print("line:   ", clip(tet, inner.as_line()).interval)
print(inner.as_line().mode is ClipMode.LINE)

# A segment well away from the solid.
print(clip(tet, Segment((-1, 2, 2), (1, 2, 2))).hit)
