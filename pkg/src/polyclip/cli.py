"""Command-line front end.

    polyclip gen-mesh  --n 500 --radius 0.5 --seed 7 --out mesh.txt
    polyclip gen-lines --mesh mesh.txt --count 1000 --mode hit --out lines.txt
    polyclip clip      --mesh mesh.txt --seg -1 0.25 0.25 1 0.25 0.25 --algo sqrt
    polyclip verify    --mesh mesh.txt --lines lines.txt
    polyclip bench     --n 10,50,200,1000 --lines 10000 --mode hit

Exit codes: 0 success, 1 clippers disagree, 2 usage or malformed input,
3 I/O failure, 4 mesh validation failure.
"""
from __future__ import annotations

import argparse
import sys

import numpy as np

from .bench import emit_table, generate_line_dataset, load_lines, run_benchmark, save_lines
from .clippers import ALGORITHMS, batch_disagreements, clip_batch
from .errors import (EquivalenceViolation, FormatError, GenerationExhausted,
                     InvalidFacetCount, MeshError)
from .mesh import (format_float, generate_inscribed_polyhedron, load_mesh, save_mesh,
                   write_mesh)

EXIT_OK, EXIT_MISMATCH, EXIT_USAGE, EXIT_IO, EXIT_INVALID = 0, 1, 2, 3, 4


class UsageError(Exception):
    pass


def _fmt(values):
    return " ".join(format_float(v) for v in values)


def _result_line(hit, t, a, b):
    if not hit:
        return "MISS"
    s = b - a
    return "HIT " + _fmt((t[0], t[1], *(a + s * t[0]), *(a + s * t[1])))


def _counters_line(totals):
    return "counters " + " ".join(f"{k}={v}" for k, v in vars(totals).items())


def _positive_int(text):
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}")
    if v < 1:
        raise argparse.ArgumentTypeError(f"must be at least 1, got {v}")
    return v


def _int_list(text):
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


# --------------------------------------------------------------------------
# subcommands

def cmd_gen_mesh(args):
    mesh = generate_inscribed_polyhedron(args.n, args.radius, args.seed)
    summary = f"V={mesh.n_vertices} E={mesh.n_edges} F={mesh.n_facets}"
    if args.out:
        save_mesh(mesh, args.out)
        print(summary)
    else:
        write_mesh(mesh, sys.stdout)
        print(summary, file=sys.stderr)
    return EXIT_OK


def cmd_gen_lines(args):
    mesh = load_mesh(args.mesh)
    ds = generate_line_dataset(mesh, args.count, args.mode, args.outer_radius, args.seed,
                               args.line)
    save_lines(ds, args.out)
    print(f"{len(ds)} segments ({args.mode}), rejection rate {ds.rejection_rate:.4f}")
    return EXIT_OK


def _segments(args):
    if args.seg is not None:
        A = np.array([args.seg[:3]], dtype=np.float64)
        B = np.array([args.seg[3:]], dtype=np.float64)
        if np.all(A == B):
            raise UsageError("segment endpoints coincide")
        return A, B
    if args.lines is None:
        raise UsageError("give either --seg or --lines")
    return load_lines(args.lines)


def cmd_clip(args):
    mesh = load_mesh(args.mesh)
    A, B = _segments(args)
    res = clip_batch(mesh, A, B, args.algo, args.line)
    for j in range(A.shape[0]):
        print(_result_line(res.hit[j], res.t[j], A[j], B[j]))
    print(_counters_line(res.totals()))
    return EXIT_OK


def cmd_verify(args):
    mesh = load_mesh(args.mesh)
    A, B = load_lines(args.lines)
    results = {algo: clip_batch(mesh, A, B, algo, args.line) for algo in ALGORITHMS}
    bad = set()
    for algo in ("cb", "planes", "sqrt"):
        bad.update(batch_disagreements(results[algo], results["oracle"], A, B,
                                       mesh.scale).tolist())
    if bad:
        j = min(bad)
        print(f"MISMATCH on {len(bad)} of {len(A)} segments; first is segment {j}:")
        print("seg " + _fmt((*A[j], *B[j])))
        for algo, r in results.items():
            print(f"{algo:>6} {_result_line(r.hit[j], r.t[j], A[j], B[j])}")
        return EXIT_MISMATCH
    print(f"OK {len(A)} segments, all four clippers agree")
    return EXIT_OK


def cmd_bench(args):
    rows = run_benchmark(args.n, args.lines, args.mode, args.seed, args.r_in, args.r_out,
                         args.repeats, args.line)
    table = emit_table(rows, args.format)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(table)
    else:
        sys.stdout.write(table)
    summary = "  ".join(f"N={r.n_facets}: v1={r.v1:.3g} v2={r.v2:.3g}" for r in rows)
    print(summary, file=sys.stderr)
    return EXIT_OK


# --------------------------------------------------------------------------
# parser

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="polyclip",
        description="Clip lines and segments against triangulated convex polyhedra.")
    sub = p.add_subparsers(dest="command", required=True, metavar="COMMAND")

    g = sub.add_parser("gen-mesh", help="generate a convex polyhedron inscribed in a sphere")
    g.add_argument("--n", type=int, required=True, help="number of facets (even, >= 4)")
    g.add_argument("--radius", type=float, default=1.0)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--out", help="mesh file to write (default: stdout)")
    g.set_defaults(func=cmd_gen_mesh)

    g = sub.add_parser("gen-lines", help="random segments that all hit or all miss a mesh")
    g.add_argument("--mesh", required=True)
    g.add_argument("--count", type=_positive_int, required=True)
    g.add_argument("--mode", choices=("hit", "miss"), default="hit")
    g.add_argument("--outer-radius", type=float, default=1.0)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--line", action="store_true", help="classify as infinite lines")
    g.add_argument("--out", required=True)
    g.set_defaults(func=cmd_gen_lines)

    g = sub.add_parser("clip", help="clip segments and print the clipped intervals")
    g.add_argument("--mesh", required=True)
    src = g.add_mutually_exclusive_group(required=True)
    src.add_argument("--seg", type=float, nargs=6, metavar=("AX", "AY", "AZ", "BX", "BY", "BZ"))
    src.add_argument("--lines", help="line dataset file")
    g.add_argument("--algo", choices=sorted(ALGORITHMS), default="sqrt")
    g.add_argument("--line", action="store_true", help="clip the infinite line through a, b")
    g.set_defaults(func=cmd_clip)

    g = sub.add_parser("verify", help="check that all four clippers agree")
    g.add_argument("--mesh", required=True)
    g.add_argument("--lines", required=True)
    g.add_argument("--line", action="store_true")
    g.set_defaults(func=cmd_verify)

    g = sub.add_parser("bench", help="time the clippers and print the efficiency table")
    g.add_argument("--n", type=_int_list, default=[10, 20, 50, 100, 200, 500, 1000, 2000, 4000],
                   help="comma-separated facet counts")
    g.add_argument("--lines", type=_positive_int, default=10_000, help="segments per column")
    g.add_argument("--mode", choices=("hit", "miss"), default="hit")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--r-in", type=float, default=0.5, help="radius of the polyhedron")
    g.add_argument("--r-out", type=float, default=1.0, help="radius of the segment sphere")
    g.add_argument("--repeats", type=_positive_int, default=3)
    g.add_argument("--line", action="store_true")
    g.add_argument("--format", choices=("csv", "markdown"), default="csv")
    g.add_argument("--out")
    g.set_defaults(func=cmd_bench)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except EquivalenceViolation as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_MISMATCH
    except (InvalidFacetCount, FormatError, UsageError, GenerationExhausted) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except MeshError as exc:
        print(f"error: invalid mesh: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
