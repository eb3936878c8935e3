"""How far the ring walk goes.

A plane through the line cuts a ring of facets out of the surface.  On a
polyhedron with N roughly equal facets that ring has about sqrt(N) facets,
and the walk only has to follow it; Cyrus-Beck looks at all N.
"""
import numpy as np

from polyclip import clip_batch, generate_inscribed_polyhedron, generate_line_dataset

print("     N   CB facets   walk visits   visits/sqrt(N)   two-plane CB steps")
for n in (50, 200, 800, 1000, 4000):
    mesh = generate_inscribed_polyhedron(n, 0.5, 1)
    ds = generate_line_dataset(mesh, 2000, "hit", 1.0, seed=2)
    cb = clip_batch(mesh, ds.a, ds.b, "cb").counters.mean(axis=0)
    rho = clip_batch(mesh, ds.a, ds.b, "planes").counters.mean(axis=0)
    walk = clip_batch(mesh, ds.a, ds.b, "sqrt").counters.mean(axis=0)
    visits = walk[3]
    print(f"{n:6d} {cb[0]:11.0f} {visits:13.1f} {visits / np.sqrt(n):16.2f} {rho[1]:20.1f}")
