import json
import subprocess
import sys

import numpy as np
import pytest

from graphlets.cli import main
from graphlets.graph import Graph, to_edge_list


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


@pytest.fixture
def k4(tmp_path):
    p = tmp_path / "k4.el"
    p.write_text("0 1\n0 2\n0 3\n1 2\n1 3\n2 3\n")
    return p


@pytest.fixture
def exact_rank2(tmp_path):
    a, b = np.array([2.0, 1, 0]), np.array([0.0, 1, 2])
    A = np.outer(a, a) / a.sum() + np.outer(b, b) / b.sum()
    p = tmp_path / "rank2.el"
    p.write_text(to_edge_list(Graph(A, allow_loops=True)))
    return p


def test_analyze_k4(capsys, k4):
    code, out, _ = run(capsys, "analyze", k4)
    assert code == 0
    rep = json.loads(out)
    np.testing.assert_allclose(rep["rho"], [1, -1 / 3, -1 / 3, -1 / 3], atol=1e-12)
    assert rep["eps_spectral"] == pytest.approx(1 / 3, abs=1e-12)
    assert rep["components"] == 1 and rep["vol"] == 12
    assert set(rep["certificates"]) == {"spectral", "disc", "trace"}


def test_analyze_disconnected_hint(capsys, tmp_path):
    p = tmp_path / "two.el"
    p.write_text("0 1\n2 3\n")
    code, out, _ = run(capsys, "analyze", p)
    rep = json.loads(out)
    assert code == 0 and rep["components"] == 2 and "component" in rep["hint"]


def test_malformed_line(capsys, tmp_path):
    p = tmp_path / "bad.el"
    p.write_text("0 1\n1 2\n2 x\n")
    code, _, err = run(capsys, "analyze", p)
    assert code == 2 and "line 3" in err


def test_missing_file(capsys, tmp_path):
    code, _, err = run(capsys, "analyze", tmp_path / "nope.el")
    assert code == 2 and err.startswith("error:")


def test_decompose_exact_fixture(capsys, exact_rank2, tmp_path):
    out_path = tmp_path / "split.json"
    code, _, _ = run(capsys, "decompose", exact_rank2, "--allow-loops", "--out", out_path)
    assert code == 0
    rep = json.loads(out_path.read_text())
    assert rep["alpha"] == pytest.approx(0.5, abs=1e-10)
    assert rep["residual"] <= 1e-8
    np.testing.assert_allclose(sorted([rep["d_prime"], rep["d_doubleprime"]]), [[0, 1, 2], [2, 1, 0]], atol=1e-8)


def test_decompose_refused(capsys, k4):
    code, _, err = run(capsys, "decompose", k4)
    assert code == 4 and "SpectralGapTooSmall" in err


def test_certify_exact_too_large(capsys, tmp_path):
    p = tmp_path / "c13.el"
    p.write_text("".join(f"{i} {(i + 1) % 13}\n" for i in range(13)))
    code, _, err = run(capsys, "certify", p, "--property", "disc", "--mode", "exact")
    assert code == 4 and "ExactModeTooLarge" in err


def test_certify_bipartite(capsys, tmp_path):
    g = tmp_path / "k22.el"
    g.write_text("0 2\n0 3\n1 2\n1 3\n")
    side = tmp_path / "x.txt"
    side.write_text("0 1\n")
    code, out, _ = run(capsys, "certify", g, "--property", "bip-spectral", "--partition", side)
    assert code == 0 and json.loads(out)["certificate"]["epsilon"] <= 1e-10
    code, out, _ = run(capsys, "certify", g, "--property", "bip-spectral", "--partition", side,
                       "--paper-literal")
    assert json.loads(out)["certificate"]["epsilon"] == pytest.approx(0.5, abs=1e-10)
    _, out2, _ = run(capsys, "certify", g, "--property", "bip-spectral", "--partition", side,
                     "--unit-factor")
    assert out2 == out


def test_numerical_failure_exit(capsys, tmp_path):
    w = tmp_path / "w.txt"
    w.write_text("0.05\n" * 50)
    code, _, err = run(capsys, "generate", "--family", "chung-lu", "--weights", w)
    assert code == 3 and "IsolationRetryExhausted" in err


def test_distance_degree_same_file(capsys, k4):
    code, out, _ = run(capsys, "distance", "--kind", "degree", k4, k4)
    assert code == 0 and json.loads(out)["value"] == 0


def test_converge_needs_two_sizes(capsys):
    code, _, err = run(capsys, "converge", "--sizes", "64")
    assert code == 2 and "NeedTwoSizes" in err


def test_converge_same_size_gives_zero(capsys):
    code, out, _ = run(capsys, "converge", "--sizes", "64", "64", "--seeds", "0", "--samples", "200")
    assert code == 0
    rows = [l for l in out.splitlines() if l and not l.startswith("#")]
    assert rows[0] == "n1,n2,seed,d_deg,d_disc,eps1,eps2"
    fields = rows[1].split(",")
    assert float(fields[3]) == 0 and float(fields[4]) == 0
    assert fields[5] == fields[6]


def test_metadata_and_reproducible_bytes(capsys, k4):
    _, a, _ = run(capsys, "analyze", k4, "--seed", "5", "--threads", "2")
    _, b, _ = run(capsys, "analyze", k4, "--seed", "5", "--threads", "2")
    assert a == b
    meta = json.loads(a)["metadata"]
    assert set(meta) == {"tool_version", "seed", "rng_name", "thread_count"}
    assert meta["seed"] == 5 and meta["thread_count"] == 2


def test_csv_metadata_and_determinism(capsys):
    argv = ("converge", "--sizes", "32", "48", "--seeds", "1", "0", "--samples", "100", "--csv")
    _, a, _ = run(capsys, *argv)
    _, b, _ = run(capsys, *argv)
    assert a == b
    assert any(l.startswith("# rng_name") for l in a.splitlines())
    rows = [l for l in a.splitlines() if l and not l.startswith("#")][1:]
    assert [r.split(",")[2] for r in rows] == ["0", "1"]  # sorted, not argument order


def test_generate_deterministic(capsys, tmp_path):
    a, b = tmp_path / "a.el", tmp_path / "b.el"
    for p in (a, b):
        code, _, _ = run(capsys, "generate", "--family", "chung-lu", "--n", 80, "--seed", 3, "--out", p)
        assert code == 0
    assert a.read_bytes() == b.read_bytes()
    code, out, _ = run(capsys, "analyze", a)
    assert code == 0 and json.loads(out)["n"] <= 80


def test_generate_union_split(capsys, tmp_path):
    g, s = tmp_path / "u.el", tmp_path / "split.json"
    code, _, _ = run(capsys, "generate", "--family", "union", "--n", 100, "--out", g, "--split-out", s)
    assert code == 0
    parts = np.array(json.loads(s.read_text())["parts"])
    code, out, _ = run(capsys, "analyze", g)
    assert parts.shape == (2, 100)


def test_argparse_error_is_exit_2():
    with pytest.raises(SystemExit) as info:
        main(["distance", "--kind", "nonsense", "a", "b"])
    assert info.value.code == 2


def test_module_entry_point(k4):
    res = subprocess.run([sys.executable, "-m", "graphlets.cli", "analyze", str(k4)],
                         capture_output=True, text=True)
    assert res.returncode == 0 and json.loads(res.stdout)["n"] == 4
