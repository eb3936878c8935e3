"""Convex polyhedra with an exact facet count, inscribed in a sphere.

N/2 + 2 points along a golden-angle spiral, randomly rotated, are hulled;
points in convex position on a sphere always give 2V - 4 triangles.
"""
import io

import numpy as np

from polyclip import generate_inscribed_polyhedron, load_mesh, save_mesh
from polyclip.mesh import write_mesh

for n in (4, 10, 100, 1000, 4000):
    m = generate_inscribed_polyhedron(n, radius=0.5, rng_seed=7)
    radii = np.linalg.norm(m.vertices, axis=1)
    print(f"N={n:5d}  V={m.n_vertices:5d}  E={m.n_edges:5d}  "
          f"V-E+F={m.n_vertices - m.n_edges + m.n_facets}  radius {radii.min():.12f}")

# every facet knows the facet across each of its edges, and which edge of
# that neighbour is the shared one
m = generate_inscribed_polyhedron(20, 1.0, 1)
k = 0
for e in range(3):
    j, f = m.neighbors[k, e], m.twins[k, e]
    print(f"facet {k} edge {e} -> facet {j} edge {f}: "
          f"{m.faces[k, [e, (e + 1) % 3]].tolist()} vs {m.faces[j, [f, (f + 1) % 3]].tolist()}")

# text format: "V F", V vertex lines, F facet lines
buf = io.StringIO()
write_mesh(generate_inscribed_polyhedron(4, 1.0), buf)
print(buf.getvalue())

save_mesh(m, "/tmp/polyclip-demo-mesh.txt")
again = load_mesh("/tmp/polyclip-demo-mesh.txt")
print("round trip exact:", np.array_equal(again.vertices, m.vertices))
