import json

import pytest

from weakflex.catalog import catalog
from weakflex.cli import main
from weakflex.configurations import config_to_dict


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out
    return code, json.loads(out)


@pytest.fixture
def chain_file(tmp_path, capsys):
    main(["gen", "figure1", "--blocks", "5"])
    path = tmp_path / "chain.json"
    path.write_text(capsys.readouterr().out)
    return str(path)


def test_gen_emits_plane_graph(chain_file):
    data = json.loads(open(chain_file).read())
    assert data["n"] == 16 and len(data["edges"]) == 26
    assert "rotation" in data


def test_gen_random_is_seeded(capsys):
    main(["gen", "random", "--n", "9", "--seed", "4"])
    first = capsys.readouterr().out
    main(["gen", "random", "--n", "9", "--seed", "4"])
    assert capsys.readouterr().out == first


def test_discharge_report(capsys, chain_file, tmp_path):
    trace = tmp_path / "trace.jsonl"
    code, rep = run(capsys, "discharge", chain_file, "--scheme", "A", "--trace", str(trace))
    assert code == 0 and rep["outcome"] == "pass"
    assert rep["payload"]["total"] == "-8" and rep["payload"]["conserved"]
    lines = [json.loads(x) for x in trace.read_text().splitlines()]
    assert len(lines) == rep["payload"]["transfers"]
    assert rep["inputs"][0]["path"] == chain_file and len(rep["inputs"][0]["sha256"]) == 64


def test_detect_and_resolve(capsys, chain_file):
    code, rep = run(capsys, "detect", chain_file, "--catalog", "D")
    assert code == 0 and rep["payload"]["embeddings"]
    code, rep = run(capsys, "resolve", chain_file)
    assert code == 0 and rep["payload"]["verification"]["valid"]
    assert rep["payload"]["epsilon"]["p"] == "1/" + str(4 ** 83)


def test_detect_nothing_exits_one(capsys, tmp_path):
    # the octahedron is 4-regular; every catalog entry needs a vertex of degree at most 3
    path = tmp_path / "octahedron.json"
    edges = [[u, v] for u in range(6) for v in range(u + 1, 6) if v - u != 3]
    path.write_text(json.dumps({"n": 6, "edges": edges}))
    code, rep = run(capsys, "detect", str(path), "--catalog", "C")
    assert code == 1 and rep["outcome"] == "fail"


def test_verify_catalog(capsys):
    code, rep = run(capsys, "verify-catalog", "D", "--jobs", "2")
    assert code == 0
    assert all(not e["failures"] for e in rep["payload"]["entries"])


def test_check_configuration(capsys, tmp_path):
    data = config_to_dict(catalog("D10"))
    for v in data["vertices"]:
        v["in_fix"] = v["id"] == "d"
    path = tmp_path / "d10.json"
    path.write_text(json.dumps(data))
    code, rep = run(capsys, "check", str(path), "--family", "K4,C5,C6,C7,B8")
    assert code == 0 and rep["payload"]["classification"] == "enhanced-weak"
    for v in data["vertices"]:
        v["in_fix"] = v["id"] == "a"
    path.write_text(json.dumps(data))
    code, _ = run(capsys, "check", str(path), "--family", "K4,C5,C6,C7,B8")
    assert code == 1


def test_flex(capsys, tmp_path):
    g = tmp_path / "k3.json"
    g.write_text(json.dumps({"n": 3, "edges": [[0, 1], [1, 2], [0, 2]], "labels": ["a", "b", "c"]}))
    lists = tmp_path / "lists.json"
    lists.write_text(json.dumps([[1, 2, 3]] * 3))
    code, rep = run(capsys, "flex", str(g), str(lists))
    assert code == 0 and rep["payload"]["ratio"] == "1/3"
    req = tmp_path / "req.json"
    req.write_text(json.dumps({"request": {"a": 2, "b": 2}}))
    code, rep = run(capsys, "flex", str(g), str(lists), "--requests", str(req))
    assert rep["payload"]["optimum"] == 1 and rep["payload"]["total"] == 2


def test_errors_exit_two(capsys, tmp_path):
    code, rep = run(capsys, "discharge", str(tmp_path / "missing.json"))
    assert code == 2 and rep["payload"]["error"] == "MalformedInputError"
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    code, _ = run(capsys, "detect", str(bad))
    assert code == 2


def test_output_file(capsys, chain_file, tmp_path):
    out = tmp_path / "report.json"
    assert main(["discharge", chain_file, "--scheme", "B", "--output", str(out)]) == 0
    assert json.loads(out.read_text())["payload"]["total"] == "-12"
