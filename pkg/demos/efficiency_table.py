"""A small run of the timing protocol.

For each facet count a mesh is generated in a sphere of radius 0.5 and
segments are drawn inside radius 1.0, keeping only those that all hit
(or all miss) the mesh.  v1 = T_CB / T and v2 = T_rho / T compare
Cyrus-Beck and the two-plane clipper against the ring walk; above 1 the
walk is faster.  Timings vary from run to run, the counter rows do not.

The command-line equivalent is

    polyclip bench --n 10,50,200,1000 --lines 2000 --mode hit --format markdown
"""
from polyclip import emit_table, run_benchmark

for mode in ("miss", "hit"):
    rows = run_benchmark([10, 50, 200, 1000, 4000], lines_per_case=2000, hit_mode=mode,
                         repeats=3)
    print(f"## {mode}")
    print(emit_table(rows, "markdown"))
