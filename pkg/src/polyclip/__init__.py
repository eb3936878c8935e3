"""Clip lines and segments against triangulated convex polyhedra.

Three clippers with identical results: Cyrus-Beck over every facet, a
two-plane filter that skips facets the line cannot touch, and a walk over
the ring of facets cut by a plane through the line, which visits about
sqrt(N) facets.  A brute-force line/triangle oracle checks them all.
"""
from .bench import (BenchRow, LineDataset, emit_table, generate_line_dataset, load_lines,
                    run_benchmark, save_lines)
from .clippers import (ALGORITHMS, BatchResult, ClipResult, Counters, batch_disagreements,
                       cb_step, clip, clip_batch, clip_cb, clip_oracle, clip_sqrt,
                       clip_two_planes, facet_crossed_by, results_agree, vertex_signs)
from .errors import (DegenerateFacet, DegeneratePlane, DegenerateTriangle,
                     EquivalenceViolation, FormatError, GenerationExhausted, GeometryError,
                     InvalidFacetCount, MeshError, NotClosed, NotConvex, WalkStalled)
from .geometry import (EPS, ClipMode, Plane, Segment, SignClass, diagonal_planes,
                       orthogonal_plane_through_line, plane_eval, plane_through_line_and_point,
                       sign_classify, solve_line_triangle, vec3)
from .mesh import (ConvexMesh, build_mesh, cube, generate_inscribed_polyhedron, icosahedron,
                   load_mesh, octahedron, save_mesh, unit_tetrahedron)

__version__ = "0.1.0"
