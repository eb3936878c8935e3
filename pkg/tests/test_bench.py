import numpy as np
import pytest

from polyclip.bench import (BenchRow, LineDataset, benchmark_dataset, case_seeds, emit_table,
                            generate_line_dataset, load_lines, run_benchmark, save_lines,
                            uniform_in_ball)
from polyclip.clippers import clip_batch, clip_oracle
from polyclip.errors import EquivalenceViolation, FormatError, GenerationExhausted
from polyclip.mesh import build_mesh, generate_inscribed_polyhedron, unit_tetrahedron

SMALL_TET = generate_inscribed_polyhedron(4, 0.4, 0)


@pytest.mark.parametrize("mode", ["hit", "miss"])
def test_dataset_matches_mode(mode):
    ds = generate_line_dataset(SMALL_TET, 100, mode, 1.0, seed=3)
    assert isinstance(ds, LineDataset) and len(ds) == 100
    assert np.all(np.linalg.norm(ds.a, axis=1) < 1.0)
    assert np.all(np.linalg.norm(ds.b, axis=1) < 1.0)
    assert all(clip_oracle(SMALL_TET, s).hit == (mode == "hit") for s in ds.segments)
    assert 0.0 <= ds.rejection_rate < 1.0


def test_dataset_line_mode_is_checked_as_lines():
    ds = generate_line_dataset(SMALL_TET, 200, "hit", 1.0, seed=1, line_mode=True)
    assert clip_batch(SMALL_TET, ds.a, ds.b, "oracle", True).hit.all()
    # as segments, some of those lines stop short of the solid
    assert not clip_batch(SMALL_TET, ds.a, ds.b, "oracle", False).hit.all()


def test_dataset_deterministic():
    a = generate_line_dataset(SMALL_TET, 50, "miss", 1.0, seed=9)
    b = generate_line_dataset(SMALL_TET, 50, "miss", 1.0, seed=9)
    c = generate_line_dataset(SMALL_TET, 50, "miss", 1.0, seed=10)
    assert a.a.tobytes() == b.a.tobytes() and a.b.tobytes() == b.b.tobytes()
    assert not np.array_equal(a.a, c.a)


def test_dataset_preconditions():
    with pytest.raises(ValueError):
        generate_line_dataset(SMALL_TET, 10, "hit", outer_radius=0.3)
    with pytest.raises(ValueError):
        generate_line_dataset(SMALL_TET, 0, "hit")
    with pytest.raises(ValueError):
        generate_line_dataset(SMALL_TET, 10, "sometimes")


def test_generation_exhausted(monkeypatch):
    import polyclip.bench as bench
    monkeypatch.setattr(bench, "MAX_ATTEMPTS", 5000)
    tiny = build_mesh(unit_tetrahedron().vertices * 1e-4, unit_tetrahedron().faces)
    with pytest.raises(GenerationExhausted):
        generate_line_dataset(tiny, 10_000, "hit", 1000.0, seed=0)


def test_uniform_in_ball():
    p = uniform_in_ball(np.random.default_rng(0), 100_000, 2.0)
    assert np.all(np.linalg.norm(p, axis=1) < 2.0)
    assert abs(len(p) / 100_000 - np.pi / 6) < 0.01
    assert np.allclose(p.mean(axis=0), 0.0, atol=0.02)


def test_lines_roundtrip(tmp_path):
    ds = generate_line_dataset(SMALL_TET, 20, "hit", 1.0, seed=2)
    path = tmp_path / "lines.txt"
    save_lines(ds, path)
    assert path.read_text().splitlines()[0] == "20"
    A, B = load_lines(path)
    assert A.tobytes() == ds.a.tobytes() and B.tobytes() == ds.b.tobytes()
    save_lines((A, B), tmp_path / "again.txt")
    assert (tmp_path / "again.txt").read_text() == path.read_text()


@pytest.mark.parametrize("text", [
    "",
    "0\n",
    "2\n0 0 0 1 1 1\n",
    "1\n0 0 0 1 1\n",
    "1\n0 0 0 1 1 z\n",
    "1\n1 2 3 1 2 3\n",
    "1 2\n0 0 0 1 1 1\n",
])
def test_malformed_lines(tmp_path, text):
    path = tmp_path / "bad.txt"
    path.write_text(text)
    with pytest.raises(FormatError):
        load_lines(path)


def test_case_seeds_stable_and_distinct():
    assert case_seeds(0, 100) == case_seeds(0, 100)
    assert case_seeds(0, 100) != case_seeds(0, 200)
    assert case_seeds(0, 100) != case_seeds(1, 100)


def test_run_benchmark_shape():
    rows = run_benchmark([10, 100, 1000], lines_per_case=1000, hit_mode="hit", repeats=1)
    assert [r.n_facets for r in rows] == [10, 100, 1000]
    for r in rows:
        assert r.t_cb > 0 and r.t_rho > 0 and r.t > 0
        assert r.v1 == pytest.approx(r.t_cb / r.t) and r.v2 == pytest.approx(r.t_rho / r.t)
        assert r.v1 > 0 and r.v2 > 0
        assert 0 < r.mean_walk_visits <= r.n_facets
        assert 0 < r.mean_cb_steps_rho <= r.n_facets
        assert r.fallbacks == 0


def test_run_benchmark_counters_deterministic():
    a = run_benchmark([50, 200], lines_per_case=500, hit_mode="miss", seed=4, repeats=1)
    b = run_benchmark([50, 200], lines_per_case=500, hit_mode="miss", seed=4, repeats=1)
    for x, y in zip(a, b):
        assert (x.mean_walk_visits, x.mean_cb_steps_rho) == (y.mean_walk_visits,
                                                             y.mean_cb_steps_rho)


def test_run_benchmark_rejects_bad_input():
    with pytest.raises(ValueError):
        run_benchmark([10], lines_per_case=0)
    with pytest.raises(ValueError):
        run_benchmark([10], hit_mode="half")


def test_equivalence_violation_carries_segment(monkeypatch):
    import polyclip.bench as bench
    mesh = generate_inscribed_polyhedron(50, 0.5, 1)
    ds = generate_line_dataset(mesh, 100, "hit", 1.0, seed=1)
    real = bench._time_batches

    def corrupt(*args):
        best, out = real(*args)
        out["sqrt"][1][7] += 0.25  # shift one interval of the walk's results
        return best, out

    monkeypatch.setattr(bench, "_time_batches", corrupt)
    with pytest.raises(EquivalenceViolation) as info:
        benchmark_dataset(mesh, ds.a, ds.b, repeats=1)
    a, b = info.value.segment
    assert np.array_equal(a, ds.a[7]) and np.array_equal(b, ds.b[7])
    assert set(info.value.results) == {"cb", "planes", "sqrt"}


ROW = BenchRow(10, 0.5, 0.25, 0.125, 4.0, 2.0, 6.5, 3.25)


def test_emit_csv():
    text = emit_table([ROW])
    lines = text.splitlines()
    assert len(lines) == 8
    assert lines[0] == "quantity,10"
    assert lines[1] == "T_CB,0.5"
    assert lines[4] == "v1,4"
    assert all("," in ln for ln in lines)
    two = emit_table([ROW, BenchRow(20, 1, 1, 1, 1, 1, 1, 1)]).splitlines()
    assert two[0] == "quantity,10,20"


def test_emit_markdown():
    lines = emit_table([ROW], "markdown").splitlines()
    assert lines[0].startswith("| N |") and lines[1].startswith("|---|")
    assert len(lines) == 9
    assert all(ln.startswith("|") and ln.endswith("|") for ln in lines)


def test_emit_errors():
    with pytest.raises(ValueError):
        emit_table([])
    with pytest.raises(ValueError):
        emit_table([ROW], "xml")
