"""End-to-end command-line behavior: outputs, exit codes, determinism."""

import json
import math

import pytest
import yaml

from volentropy.cli import main

from builders import THETA_DOC, double_cover_doc, graph_doc


@pytest.fixture
def theta_file(tmp_path):
    path = tmp_path / "theta.graph"
    path.write_text(yaml.safe_dump(THETA_DOC))
    return str(path)


@pytest.fixture
def cycle_file(tmp_path):
    doc = graph_doc(
        ["a", "b", "c", "d"],
        [("e1", "a", "b", 1), ("e2", "b", "c", 1), ("e3", "c", "d", 1), ("e4", "d", "a", 1)],
    )
    path = tmp_path / "cycle4.graph"
    path.write_text(yaml.safe_dump(doc))
    return str(path)


def run_json(capsys, argv):
    code = main(argv + ["--format", "structured"])
    out = capsys.readouterr().out
    return code, json.loads(out)


def test_entropy_theta(capsys, theta_file):
    code, doc = run_json(capsys, ["entropy", theta_file])
    assert code == 0
    assert doc["schema_version"] == 1
    assert doc["h"] == pytest.approx(math.log(2), rel=1e-9)
    assert set(doc["vector"]) == {"e1+", "e1-", "e2+", "e2-", "e3+", "e3-"}
    assert doc["residual"] <= 1e-9


def test_entropy_cycle_fails_validation(capsys, cycle_file):
    code = main(["entropy", cycle_file])
    assert code == 1
    assert "hypotheses" in capsys.readouterr().err


def test_validate(capsys, theta_file, cycle_file):
    assert main(["validate", theta_file]) == 0
    assert main(["validate", cycle_file]) == 1
    out = capsys.readouterr().out
    assert "cycle" in out


def test_volume(capsys, theta_file):
    code, doc = run_json(capsys, ["volume", theta_file])
    assert code == 0 and doc["volume"] == 3


def test_minimize_k4(capsys, tmp_path):
    import itertools

    edges = [
        (f"e{i}", f"v{a}", f"v{b}", 1)
        for i, (a, b) in enumerate(itertools.combinations(range(4), 2), 1)
    ]
    path = tmp_path / "k4.graph"
    path.write_text(yaml.safe_dump(graph_doc([f"v{i}" for i in range(4)], edges)))
    code, doc = run_json(capsys, ["minimize", str(path), "--samples", "3"])
    assert code == 0
    assert doc["h_min"] == pytest.approx(6 * math.log(2), rel=1e-9)
    assert all(v == pytest.approx(1 / 6, rel=1e-9) for v in doc["lengths"].values())
    assert doc["all_samples_above_minimum"] is True


def test_oracle(capsys, theta_file):
    code, doc = run_json(capsys, ["oracle", theta_file, "--r-max", "20"])
    assert code == 0
    assert doc["counts"][0] == str(3 * 2**9)
    assert float(doc["h_est"]) == pytest.approx(math.log(2), rel=0.02)


def test_reduce(capsys, tmp_path):
    doc = graph_doc(
        ["a", "b", "m"],
        [("e1", "a", "b", 1), ("e2", "a", "b", 1),
         ("e3a", "a", "m", "1/2"), ("e3b", "m", "b", "1/2")],
    )
    path = tmp_path / "sub.graph"
    path.write_text(yaml.safe_dump(doc))
    code, out = run_json(capsys, ["reduce", str(path)])
    assert code == 0
    assert out["chains"]["e3a"] == ["e3a+", "e3b+"]
    assert {e["id"]: e["length"] for e in out["graph"]["edges"]}["e3a"] == 1


def test_gog_entropy(capsys, tmp_path):
    doc = {
        "vertices": ["x", "y"],
        "edges": [{"u": "x", "v": "y", "length": 1, "id": "e"}],
        "groups": {"vertex_orders": {"x": 3, "y": 3}, "edge_orders": {"e": 1}},
    }
    path = tmp_path / "seg.graph"
    path.write_text(yaml.safe_dump(doc))
    code, out = run_json(capsys, ["gog-entropy", str(path)])
    assert code == 0
    assert out["h"] == pytest.approx(math.log(2), rel=1e-9)
    assert out["degrees"] == {"x": 3, "y": 3}


def test_gog_minimize(capsys, tmp_path):
    doc = {
        "vertices": ["x", "y"],
        "edges": [{"u": "x", "v": "y", "id": "e"}],
        "groups": {"vertex_orders": {"x": 3, "y": 4}, "edge_orders": {"e": 1}},
    }
    path = tmp_path / "seg.graph"
    path.write_text(yaml.safe_dump(doc))
    code, out = run_json(capsys, ["gog-minimize", str(path)])
    assert code == 0
    assert out["h_min"] == pytest.approx(0.5 * math.log(6), rel=1e-9)
    assert out["lengths"]["e"] == pytest.approx(1.0, rel=1e-9)


def test_cover_check(capsys, tmp_path):
    path = tmp_path / "cover.graph"
    path.write_text(yaml.safe_dump(double_cover_doc()))
    code, out = run_json(capsys, ["cover-check", str(path)])
    assert code == 0
    assert out["valid"] is True and out["sheets"] == 2
    assert out["inequality"]["equality"] is True
    assert out["inequality"]["ratio"] == pytest.approx(0.5, rel=1e-6)


def test_cover_check_invalid(capsys, tmp_path):
    doc = double_cover_doc()
    doc["emap"]["f5"] = "e2"
    path = tmp_path / "cover.graph"
    path.write_text(yaml.safe_dump(doc))
    assert main(["cover-check", str(path)]) == 1


def test_dump_matrix(capsys, theta_file):
    code, doc = run_json(capsys, ["entropy", theta_file, "--dump-matrix"])
    assert code == 0
    assert len(doc["matrix"]) == 12
    first = doc["matrix"][0].split()
    assert len(first) == 3
    assert float(first[2]) == pytest.approx(0.5, rel=1e-9)


def test_missing_file_is_usage_error(capsys, tmp_path):
    assert main(["entropy", str(tmp_path / "nope.graph")]) == 3


def test_malformed_document_is_usage_error(capsys, tmp_path):
    path = tmp_path / "bad.graph"
    path.write_text("vertices: [a\n")
    assert main(["entropy", str(path)]) == 3
    assert "parse error" in capsys.readouterr().err


def test_unknown_flag_is_usage_error(capsys):
    assert main(["entropy", "--bogus"]) == 3


def test_nonconvergence_is_numerical_error(capsys, theta_file):
    code = main(["entropy", theta_file, "--tol-residual", "1e-18"])
    assert code == 2


def test_structured_output_round_trips(capsys, theta_file):
    code1, doc1 = run_json(capsys, ["entropy", theta_file])
    code2, doc2 = run_json(capsys, ["entropy", theta_file])
    assert code1 == code2 == 0
    assert doc1 == doc2
