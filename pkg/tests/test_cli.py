import json

import pytest

from qcluster.cli import EXIT_FAIL, EXIT_OK, EXIT_USAGE, main
from qcluster.io import phi_to_json, save, seed_to_json
from qcluster.rcm import criterion_example


@pytest.fixture
def a2_file(tmp_path, a2):
    p = tmp_path / "a2.json"
    save(seed_to_json(a2), p)
    return p


@pytest.fixture
def hex_file(tmp_path, hexagon):
    p = tmp_path / "hex.json"
    save(seed_to_json(hexagon), p)
    return p


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out = capsys.readouterr()
    return code, out.out, out.err


def test_seed_validate(capsys, tmp_path, a2_file):
    assert run(capsys, "seed", "validate", a2_file)[0] == EXIT_OK
    bad = json.loads(a2_file.read_text())
    bad["beta_columns"]["x2"] = [-1, 5]
    p = tmp_path / "bad.json"
    p.write_text(json.dumps(bad))
    code, out, _ = run(capsys, "seed", "validate", p)
    assert code == EXIT_FAIL and out


def test_seed_mutate(capsys, tmp_path, a2_file):
    out_file = tmp_path / "m.json"
    code, _, _ = run(capsys, "seed", "mutate", a2_file, "-k", "x1", "-o", out_file)
    assert code == EXIT_OK
    doc = json.loads(out_file.read_text())
    assert doc["labels"] == ["x1|1", "x2"]


def test_explore_pentagon(capsys, tmp_path, a2_file):
    dot = tmp_path / "g.dot"
    code, out, _ = run(capsys, "explore", a2_file, "--depth", 8, "--fold", "--dot", dot)
    assert code == EXIT_OK
    assert out.strip() == "closed, 5 clusters, 5 mutable and 0 frozen variables"
    assert dot.read_text().startswith("graph exchange {")


def test_explore_json(capsys, hex_file):
    code, out, _ = run(capsys, "explore", hex_file, "--depth", 12, "--fold", "--json")
    doc = json.loads(out)
    assert code == EXIT_OK and doc["mutable_variables"] == 9 and doc["frozen_variables"] == 6


@pytest.mark.parametrize("what", ["involution", "signs", "compat"])
def test_verify_random(capsys, what):
    code, _, _ = run(capsys, "verify", what, "--rand", 20, "--rng-seed", 3)
    assert code == EXIT_OK


def test_verify_laurent(capsys, a2_file):
    assert run(capsys, "verify", "laurent", a2_file, "--depth", 5)[0] == EXIT_OK


def test_acs_pipeline(capsys, tmp_path, a2_file):
    acs_file = tmp_path / "acs.json"
    assert run(capsys, "acs", "extract", a2_file, "--depth", 2, "-o", acs_file)[0] == EXIT_OK
    assert run(capsys, "acs", "check", acs_file)[0] == EXIT_OK
    prin = tmp_path / "p.json"
    assert run(capsys, "acs", "principal", acs_file, "-o", prin)[0] == EXIT_OK
    code, out, _ = run(capsys, "acs", "to-seed", acs_file, "--vertex", "()", "--json")
    assert code == EXIT_OK and json.loads(out)["seed"]["ex"] == ["x1", "x2"]
    prod = tmp_path / "prod.json"
    assert run(capsys, "cat", "product", acs_file, acs_file, "-o", prod)[0] == EXIT_OK
    assert len(json.loads(prod.read_text())["vertices"]) == 25


def test_surface_commands(capsys):
    code, out, _ = run(capsys, "surface", "enumerate", "-n", 6)
    assert code == EXIT_OK and "14" in out
    code, out, _ = run(capsys, "surface", "hexagon-gr26")
    assert code == EXIT_OK and "isomorphism verified: 14 vertices" in out


def test_rcm_commands(capsys, tmp_path):
    p = tmp_path / "phi.json"
    save(phi_to_json(criterion_example()), p)
    code, out, _ = run(capsys, "rcm", "sign", p)
    assert code == EXIT_OK and "positive" in out
    code, out, _ = run(capsys, "rcm", "push", p, "--seq", "x1,x2", "--json")
    assert json.loads(out)["sequences"][0]["image"] == ["y1", "y2"]
    m = tmp_path / "m.json"
    assert run(capsys, "rcm", "induce", p, "--depth", 3, "-o", m)[0] == EXIT_OK
    assert run(capsys, "cat", "check-morphism", m, "--quantum", "no")[0] == EXIT_OK
    assert run(capsys, "rcm", "verify-vars", p)[0] == EXIT_OK


def test_usage_errors(capsys, tmp_path):
    assert run(capsys, "frobnicate")[0] == EXIT_USAGE
    assert run(capsys, "explore")[0] == EXIT_USAGE
    assert run(capsys, "seed", "validate", tmp_path / "missing.json")[0] == EXIT_USAGE
    junk = tmp_path / "junk.json"
    junk.write_text("{not json")
    assert run(capsys, "seed", "validate", junk)[0] == EXIT_USAGE
