import csv
import json

import numpy as np
import pytest

from mlmod.cli import EXIT_DATA, EXIT_NUMERIC, EXIT_OK, EXIT_USAGE, main
from mlmod.netcore import load_partition


@pytest.fixture(scope="module")
def gen(tmp_path_factory):
    out = tmp_path_factory.mktemp("gen")
    assert main(["generate", "--temporal", "--N", "90", "--T", "3", "--K", "3", "--eta", "0.8",
                 "--c", "12", "--eps", "0.1", "--seed", "2", "--out", str(out)]) == EXIT_OK
    return out


def manifest(d):
    return json.loads((d / "manifest.json").read_text())


def test_generate_outputs(gen):
    assert {p.name for p in gen.iterdir()} == {"network.txt", "planted.txt", "manifest.json"}
    m = manifest(gen)
    assert m["command"] == "generate" and m["seed"] == 2 and m["exit_code"] == 0
    assert "duration_seconds" in m and m["version"]


def test_generate_full_copying(tmp_path):
    assert main(["generate", "--N", "20", "--T", "3", "--K", "4", "--eta", "1", "--p-in", "0.5",
                 "--p-out", "0.1", "--out", str(tmp_path)]) == EXIT_OK
    L = np.vstack(load_partition(tmp_path / "planted.txt").layers())
    assert np.all(L == L[0])


def test_detect_is_deterministic(gen, tmp_path):
    args = ["detect", str(gen / "network.txt"), "--temporal", "--gamma", "1", "--omega", "1", "--seed", "5"]
    assert main(args + ["--out", str(tmp_path / "a")]) == EXIT_OK
    assert main(args + ["--out", str(tmp_path / "b")]) == EXIT_OK
    assert (tmp_path / "a/partition.txt").read_bytes() == (tmp_path / "b/partition.txt").read_bytes()
    m = manifest(tmp_path / "a")
    assert list(m["inputs"].values())[0] == manifest(tmp_path / "b")["inputs"][str(gen / "network.txt")]
    assert "Q" in json.loads((tmp_path / "a/result.json").read_text())


def test_zero_coupling_equals_layerwise_detection(gen, tmp_path):
    assert main(["detect", str(gen / "network.txt"), "--temporal", "--omega", "0",
                 "--out", str(tmp_path)]) == EXIT_OK
    res = json.loads((tmp_path / "result.json").read_text())
    from mlmod.netcore import load_network
    from mlmod.quality import intralayer_terms
    net = load_network(gen / "network.txt")
    part = load_partition(tmp_path / "partition.txt")
    assert res["Q"] == pytest.approx(intralayer_terms(net, part, 1.0).sum())


def test_evaluate_self_comparison(gen, tmp_path):
    p = str(gen / "planted.txt")
    assert main(["evaluate", "--a", p, "--b", p, "--out", str(tmp_path)]) == EXIT_OK
    rows = list(csv.reader(open(tmp_path / "metrics.csv")))
    assert rows[0] == ["quantity", "nmi"]
    assert all(float(r[1]) == 1.0 for r in rows[1:])


def test_evaluate_metadata(tmp_path):
    (tmp_path / "g.txt").write_text("1 0 0\n1 1 0\n1 2 1\n1 3 1\n")
    (tmp_path / "m.csv").write_text("office,age\nA,30\nA,31\nB,50\nB,52\n")
    assert main(["evaluate", "--a", str(tmp_path / "g.txt"), "--metadata", str(tmp_path / "m.csv"),
                 "--bin-columns", "age", "--bin-width", "10", "--out", str(tmp_path / "o")]) == EXIT_OK
    rows = list(csv.reader(open(tmp_path / "o/metrics.csv")))
    assert rows[0] == ["column", "nmi"] and [r[0] for r in rows[1:]] == ["office", "age"]


def test_iterate_outputs(gen, tmp_path):
    assert main(["iterate", str(gen / "network.txt"), "--temporal", "--max-iters", "1",
                 "--out", str(tmp_path)]) == EXIT_OK
    s = json.loads((tmp_path / "summary.json").read_text())
    assert s["iterations"] == 1
    assert len((tmp_path / "trajectory.jsonl").read_text().splitlines()) == 1


def test_rerun_reproduces(gen, tmp_path):
    assert main(["iterate", str(gen / "network.txt"), "--temporal", "--seed", "3",
                 "--out", str(tmp_path / "a")]) == EXIT_OK
    assert main(["rerun", str(tmp_path / "a/manifest.json"), "--out", str(tmp_path / "b")]) == EXIT_OK
    for name in ("partition.txt", "trajectory.jsonl", "summary.json"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()


def test_multirun_tables(gen, tmp_path):
    assert main(["multirun", str(gen / "network.txt"), "--temporal", "--runs", "2", "--max-iters", "5",
                 "--out", str(tmp_path)]) == EXIT_OK
    assert (tmp_path / "runs.csv").read_text().startswith("run,")
    assert len(list((tmp_path / "partitions").iterdir())) == 2
    rows = list(csv.reader(open(tmp_path / "nmi_matrix.csv")))
    assert rows[0] == ["row", "0", "1"]


def test_sweep_tables(gen, tmp_path):
    assert main(["sweep", str(gen / "network.txt"), "--temporal", "--gammas", "0.5:1.5:2", "--omegas", "1",
                 "--reference", str(gen / "planted.txt"), "--out", str(tmp_path)]) == EXIT_OK
    heat = list(csv.reader(open(tmp_path / "heatmap.csv")))
    arrows = list(csv.reader(open(tmp_path / "arrows.csv")))
    assert len(heat) == 3 and len(arrows) == 3
    assert arrows[0][:4] == ["gamma", "omega", "gamma_next", "omega_next"]


def test_sweep_needs_reference(gen, tmp_path):
    assert main(["sweep", str(gen / "network.txt"), "--temporal", "--gammas", "1", "--omegas", "1",
                 "--out", str(tmp_path)]) == EXIT_USAGE


def test_qsigma(tmp_path):
    assert main(["qsigma", "--p", "0", "1", "--K", "5", "--T", "3", "--trials", "5",
                 "--out", str(tmp_path)]) == EXIT_OK
    rows = list(csv.DictReader(open(tmp_path / "qsigma.csv")))
    assert [float(r["std"]) for r in rows] == [0.0, 0.0]


@pytest.mark.parametrize("extra", [
    ["--multiplex", "--parents", "x.txt"],
    ["--temporal", "--multiplex"],
    ["--multilevel"],
])
def test_topology_flag_errors(gen, tmp_path, extra):
    assert main(["detect", str(gen / "network.txt"), *extra, "--out", str(tmp_path)]) == EXIT_USAGE


def test_layer_dependent_multiplex_rejected(gen, tmp_path):
    assert main(["iterate", str(gen / "network.txt"), "--multiplex", "--layer-dependent",
                 "--out", str(tmp_path)]) == EXIT_USAGE


def test_bad_input_file(tmp_path):
    (tmp_path / "bad.txt").write_text("1 0\n")
    assert main(["detect", str(tmp_path / "bad.txt"), "--temporal", "--out", str(tmp_path / "o")]) == EXIT_DATA


def test_degenerate_estimate_exit_code(tmp_path):
    lines = [f"{t} {i} {j}" for t in (1, 2) for i in range(5) for j in range(i + 1, 5)]
    (tmp_path / "k5.txt").write_text("\n".join(lines) + "\n")
    assert main(["iterate", str(tmp_path / "k5.txt"), "--temporal", "--out", str(tmp_path / "o")]) == EXIT_NUMERIC


def test_thread_env_default(monkeypatch):
    from mlmod.cli import build_parser
    monkeypatch.setenv("MLMOD_THREADS", "3")
    args = build_parser().parse_args(["multirun", "n.txt", "--temporal", "--out", "o"])
    assert args.threads == 3
