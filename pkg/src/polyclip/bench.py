"""Benchmark protocol: random line datasets, timed batches, efficiency table.

Segments have both endpoints drawn uniformly inside an outer sphere and the
polyhedron is inscribed in a smaller one.  Each dataset is filtered with the
oracle so that either every segment misses (``"miss"``) or every segment
hits (``"hit"``) the mesh.  For each facet count the Cyrus-Beck, two-plane
and ring-walk clippers time the same batch, and the ratios

    v1 = T_CB / T        v2 = T_rho / T

compare the first two against the walk.  Times are noisy; the operation
counters next to them are deterministic.
"""
from __future__ import annotations

import time
from dataclasses import dataclass
from typing import List, Sequence

import numpy as np

from . import _kernels as K
from .clippers import BatchResult, batch_disagreements, clip_batch, run_batch
from .errors import EquivalenceViolation, FormatError, GenerationExhausted
from .geometry import Segment
from .mesh import ConvexMesh, PathLike, format_float, generate_inscribed_polyhedron

HIT_MODES = ("miss", "hit")

# give up when fewer than MIN_ACCEPTANCE of MAX_ATTEMPTS candidate pairs fit
MAX_ATTEMPTS = 1_000_000
MIN_ACCEPTANCE = 1e-3
_CHUNK = 4096


@dataclass
class LineDataset:
    """``count`` segments ``a[j] -> b[j]`` with a verified hit mode."""

    a: np.ndarray
    b: np.ndarray
    hit_mode: str
    outer_radius: float
    seed: int
    rejection_rate: float = 0.0

    def __len__(self):
        return self.a.shape[0]

    @property
    def segments(self) -> List[Segment]:
        return [Segment(a, b) for a, b in zip(self.a, self.b)]


def _check_hit_mode(hit_mode):
    if hit_mode not in HIT_MODES:
        raise ValueError(f"hit_mode must be one of {HIT_MODES}, got {hit_mode!r}")


def uniform_in_ball(rng: np.random.Generator, n: int, radius: float) -> np.ndarray:
    """Up to ``n`` points uniform in the ball, by rejection from the cube.

    Returns the survivors of ``n`` cube samples (about 52% of them).
    """
    p = rng.uniform(-radius, radius, size=(n, 3))
    return p[np.einsum("ij,ij->i", p, p) < radius * radius]


def generate_line_dataset(mesh: ConvexMesh, count: int, hit_mode: str = "hit",
                          outer_radius: float = 1.0, seed: int = 0,
                          line_mode: bool = False) -> LineDataset:
    """Draw segments inside ``outer_radius`` and keep those matching ``hit_mode``.

    Deterministic for a given (mesh, count, hit_mode, outer_radius, seed).
    """
    _check_hit_mode(hit_mode)
    if count < 1:
        raise ValueError("count must be at least 1")
    bound = float(np.linalg.norm(mesh.vertices, axis=1).max())
    if not outer_radius > bound:
        raise ValueError(f"outer_radius {outer_radius} must exceed the mesh bounding "
                         f"radius {bound:.6g}")
    want_hit = hit_mode == "hit"
    rng = np.random.default_rng(seed)
    A_parts, B_parts = [], []
    have = attempts = 0
    while have < count:
        pts = uniform_in_ball(rng, 2 * _CHUNK, outer_radius)
        half = pts.shape[0] // 2
        A, B = pts[:half], pts[half:2 * half]
        keep = np.any(A != B, axis=1)
        A, B = A[keep], B[keep]
        attempts += A.shape[0]
        res = clip_batch(mesh, A, B, "oracle", line_mode)
        sel = res.hit == want_hit
        A_parts.append(A[sel])
        B_parts.append(B[sel])
        have += int(sel.sum())
        if attempts >= MAX_ATTEMPTS and have < MIN_ACCEPTANCE * attempts:
            raise GenerationExhausted(
                f"only {have} of {attempts} random segments are '{hit_mode}' cases; "
                f"adjust the radii")
    A = np.concatenate(A_parts)[:count]
    B = np.concatenate(B_parts)[:count]
    return LineDataset(A, B, hit_mode, float(outer_radius), seed, 1.0 - have / attempts)


def save_lines(ds, path: PathLike) -> None:
    """Write ``count`` then one ``ax ay az bx by bz`` line per segment.

    ``ds`` is a :class:`LineDataset` or an ``(A, B)`` pair of arrays.
    """
    A, B = (ds.a, ds.b) if isinstance(ds, LineDataset) else ds
    with open(path, "w") as fh:
        fh.write(f"{len(A)}\n")
        for a, b in zip(A, B):
            fh.write(" ".join(format_float(c) for c in (*a, *b)) + "\n")


def load_lines(path: PathLike):
    """Read a line dataset file into ``(A, B)`` arrays of shape (count, 3)."""
    with open(path) as fh:
        rows = [line.split() for line in fh if line.strip()]
    if not rows or len(rows[0]) != 1:
        raise FormatError(f"{path}: first line must be the segment count")
    try:
        count = int(rows[0][0])
        data = np.array([[float(c) for c in r] for r in rows[1:]], dtype=np.float64)
    except ValueError as exc:
        raise FormatError(f"{path}: {exc}") from exc
    if count < 1:
        raise FormatError(f"{path}: no segments")
    if data.shape != (count, 6):
        raise FormatError(f"{path}: expected {count} lines of 6 numbers")
    if np.any(np.all(data[:, :3] == data[:, 3:], axis=1)):
        raise FormatError(f"{path}: segment with coincident endpoints")
    return np.ascontiguousarray(data[:, :3]), np.ascontiguousarray(data[:, 3:])


# --------------------------------------------------------------------------
# timing

@dataclass
class BenchRow:
    n_facets: int
    t_cb: float
    t_rho: float
    t: float
    v1: float
    v2: float
    mean_walk_visits: float
    mean_cb_steps_rho: float
    fallbacks: int = 0


BENCH_ALGOS = ("cb", "planes", "sqrt")


def _time_batches(mesh, A, B, line_mode, repeats):
    """Best-of-``repeats`` wall time per algorithm, plus one result each.

    The repeats are interleaved so a slow spell on the machine hits all
    three algorithms alike.
    """
    M = A.shape[0]
    out = {}
    for algo in BENCH_ALGOS:
        out[algo] = (np.zeros(M, np.int64), np.full((M, 2), np.nan),
                     np.zeros((M, len(K.COUNTER_FIELDS)), np.int64))
        run_batch(mesh, A[:1], B[:1], algo, line_mode, *(x[:1] for x in out[algo]))
    best = dict.fromkeys(BENCH_ALGOS, np.inf)
    for _ in range(repeats):
        for algo in BENCH_ALGOS:
            status, t, cnt = out[algo]
            cnt[:] = 0
            t0 = time.perf_counter()
            run_batch(mesh, A, B, algo, line_mode, status, t, cnt)
            best[algo] = min(best[algo], time.perf_counter() - t0)
    return best, out


def _check_equivalence(mesh, A, B, results, line_mode):
    batches = {algo: BatchResult(st == K.HIT, t, cnt) for algo, (st, t, cnt) in results.items()}
    ref = batches["cb"]
    for algo in BENCH_ALGOS[1:]:
        bad = batch_disagreements(batches[algo], ref, A, B, mesh.scale)
        if bad.size:
            j = int(bad[0])
            seg = (A[j].copy(), B[j].copy())
            found = {name: b.result(j, A[j], B[j], line_mode) for name, b in batches.items()}
            raise EquivalenceViolation(
                f"{algo} disagrees with cb on segment {j} "
                f"({' '.join(format_float(c) for c in (*A[j], *B[j]))}) for N={mesh.n_facets}",
                segment=seg, results=found)
    return batches


def benchmark_dataset(mesh: ConvexMesh, A, B, line_mode: bool = False,
                      repeats: int = 3) -> BenchRow:
    """Time all three clippers on one batch and check they agree."""
    best, results = _time_batches(mesh, A, B, line_mode, repeats)
    batches = _check_equivalence(mesh, A, B, results, line_mode)
    walk = batches["sqrt"].counters
    rho = batches["planes"].counters
    M = A.shape[0]
    t_cb, t_rho, t = best["cb"], best["planes"], best["sqrt"]
    return BenchRow(
        n_facets=mesh.n_facets, t_cb=t_cb, t_rho=t_rho, t=t, v1=t_cb / t, v2=t_rho / t,
        mean_walk_visits=float(walk[:, K.WALK_VISITS].sum()) / M,
        mean_cb_steps_rho=float(rho[:, K.CB_STEPS].sum()) / M,
        fallbacks=int(walk[:, K.FALLBACKS].sum() + rho[:, K.FALLBACKS].sum()))


def case_seeds(seed: int, n_facets: int):
    """(mesh seed, dataset seed) for one table column, derived from ``seed``."""
    mesh_seed, line_seed = np.random.SeedSequence([seed, n_facets]).generate_state(2)
    return int(mesh_seed), int(line_seed)


def run_benchmark(n_facets_list: Sequence[int], lines_per_case: int = 10_000,
                  hit_mode: str = "hit", seed: int = 0, r_in: float = 0.5,
                  r_out: float = 1.0, repeats: int = 3,
                  line_mode: bool = False) -> List[BenchRow]:
    """One :class:`BenchRow` per facet count.

    Raises :class:`EquivalenceViolation` as soon as two clippers disagree.
    """
    _check_hit_mode(hit_mode)
    if lines_per_case < 1:
        raise ValueError("lines_per_case must be at least 1")
    rows = []
    for n in n_facets_list:
        mesh_seed, line_seed = case_seeds(seed, n)
        mesh = generate_inscribed_polyhedron(n, r_in, mesh_seed)
        ds = generate_line_dataset(mesh, lines_per_case, hit_mode, r_out, line_seed, line_mode)
        rows.append(benchmark_dataset(mesh, ds.a, ds.b, line_mode, repeats))
    return rows


# --------------------------------------------------------------------------
# tables

TABLE_ROWS = (
    ("T_CB", "t_cb"),
    ("T_rho", "t_rho"),
    ("T", "t"),
    ("v1", "v1"),
    ("v2", "v2"),
    ("mean_walk_visits", "mean_walk_visits"),
    ("mean_cb_steps_rho", "mean_cb_steps_rho"),
)


def emit_table(rows: Sequence[BenchRow], fmt: str = "csv") -> str:
    """Quantities down, facet counts across; ``fmt`` is ``csv`` or ``markdown``."""
    if not rows:
        raise ValueError("emit_table needs at least one row")
    if fmt == "csv":
        lines = [",".join(["quantity"] + [str(r.n_facets) for r in rows])]
        for label, attr in TABLE_ROWS:
            lines.append(",".join([label] + [format_float(getattr(r, attr)) for r in rows]))
    elif fmt == "markdown":
        lines = ["| N | " + " | ".join(str(r.n_facets) for r in rows) + " |",
                 "|---|" + "---:|" * len(rows)]
        for label, attr in TABLE_ROWS:
            cells = [f"{getattr(r, attr):.4g}" for r in rows]
            lines.append(f"| {label} | " + " | ".join(cells) + " |")
    else:
        raise ValueError(f"unknown table format {fmt!r}; use 'csv' or 'markdown'")
    return "\n".join(lines) + "\n"
