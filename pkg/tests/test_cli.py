import json
import subprocess
import sys

import pytest

from grassres.cli import main


def run(argv, capsys):
    code = main(argv)
    return code, capsys.readouterr()


def test_relations_gr25(capsys):
    code, out = run(["relations", "--d", "2", "--n", "5", "--chart", "45", "--json"], capsys)
    assert code == 0
    data = json.loads(out.out)
    assert data["schema_version"] == 1
    assert [r["relation"] for r in data["relations"]] == [
        "x[12] - x[14]*x[25] + x[15]*x[24]",
        "x[13] - x[14]*x[35] + x[15]*x[34]",
        "x[23] - x[24]*x[35] + x[25]*x[34]"]


def test_relations_gr36(capsys):
    code, out = run(["relations", "--d", "3", "--n", "6", "--chart", "123", "--json"], capsys)
    assert code == 0 and len(json.loads(out.out)["relations"]) == 10


@pytest.mark.parametrize("argv", [
    ["relations", "--d", "2", "--n", "5", "--chart", "46"],
    ["relations", "--d", "2", "--n", "5", "--chart", "4x"],
    ["relations", "--d", "5", "--n", "5"],
    ["certify", "--d", "2", "--n", "4", "--primes", "4,7"],
    ["certify", "--d", "2", "--n", "4", "--gamma", "[[1,2]]"],
    ["bogus"],
])
def test_usage_errors(argv, capsys):
    assert run(argv, capsys)[0] == 2


def test_model(capsys):
    code, out = run(["model", "--d", "2", "--n", "5", "--chart", "45", "--json"], capsys)
    data = json.loads(out.out)
    assert code == 0 and data["counts"] == {"linear": 3, "main": 6, "quotient": 1, "residual": 3}


def test_pipeline_stop_after(capsys):
    code, out = run(["pipeline", "--d", "2", "--n", "4", "--chart", "12", "--stop-after", "theta",
                     "--json"], capsys)
    data = json.loads(out.out)
    assert code == 0 and data["stage"] == "theta"
    assert "pruned" in data["stats"]


def test_pipeline_cap(capsys):
    code, out = run(["pipeline", "--d", "2", "--n", "5", "--chart", "45", "--max-rounds", "1",
                     "--max-sets", "1"], capsys)
    assert code == 3


def test_certify_gamma(capsys):
    code, out = run(["certify", "--d", "2", "--n", "4", "--chart", "12", "--gamma", "[[3,4]]",
                     "--json", "--trials", "10"], capsys)
    data = json.loads(out.out)
    assert code == 0 and data["verdict"] == "SMOOTH"
    assert data["birational"]["fiber_histogram"] == {"1": 10}


def test_certify_deterministic(capsys):
    argv = ["certify", "--d", "2", "--n", "4", "--gamma", "[[3,4]]", "--json", "--seed", "5"]
    a = run(argv, capsys)[1].out
    b = run(argv, capsys)[1].out
    assert a == b and '"seed": 5' in a


def test_certify_matroid(tmp_path, capsys):
    good = tmp_path / "m.json"
    good.write_text(json.dumps({"n": 4, "d": 2, "bases": [[1, 2], [1, 3], [1, 4], [2, 3], [2, 4]]}))
    code, out = run(["certify", "--d", "2", "--n", "4", "--matroid", str(good), "--json"], capsys)
    assert code == 0 and json.loads(out.out)["gamma"] == [[3, 4]]
    bad = tmp_path / "bad.json"
    bad.write_text('{"n": 4, "d": 2, "bases": [[1, 2], [3, 4]]}')
    assert run(["certify", "--d", "2", "--n", "4", "--matroid", str(bad)], capsys)[0] == 2
    bad.write_text("not json")
    assert run(["certify", "--d", "2", "--n", "4", "--matroid", str(bad)], capsys)[0] == 2


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "grassres", "relations", "--d", "2", "--n", "4"],
                          capture_output=True, text=True)
    assert proc.returncode == 0 and "1 primary relations" in proc.stdout
