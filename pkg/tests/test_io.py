import json

import pytest

from qcluster.acs import acs_from_seed, verify_acs
from qcluster.acscat import same_morphism, verify_morphism
from qcluster.io import (
    FormatError,
    acs_from_json,
    acs_to_json,
    dumps,
    morphism_from_json,
    morphism_to_json,
    phi_from_json,
    phi_to_json,
    seed_from_json,
    seed_to_json,
)
from qcluster.rcm import ExAdmissibleMap, criterion_example, induced_acs_morphism
from qcluster.seed import Seed
from qcluster.surface import hexagon_gr26_isomorphism


def through_text(doc):
    return json.loads(dumps(doc))


def test_acs_round_trip(hexagon_q):
    acs = acs_from_seed(hexagon_q, 2)
    back = acs_from_json(through_text(acs_to_json(acs)))
    assert verify_acs(back)["ok"]
    assert back.vertices == acs.vertices and back.root == acs.root
    assert back.A == acs.A and back.X_maps == acs.X_maps and back.lam == acs.lam


def test_morphism_round_trip():
    m = hexagon_gr26_isomorphism().morphism
    back = morphism_from_json(through_text(morphism_to_json(m)))
    assert same_morphism(back, m)
    assert verify_morphism(back)["ok"]


def test_contracting_morphism_round_trip():
    s = Seed.build(["x1", "x2", "x3", "x4"], ["x1", "x2"], {"x1": [0, 0, 1, 0], "x2": [0, 0, 0, 1]})
    t = Seed.build(["y1", "y3"], ["y1"], {"y1": [0, 1]})
    m = induced_acs_morphism(ExAdmissibleMap(s, t, {"x1": "y1", "x2": None, "x3": "y3", "x4": None}), 2)
    doc = through_text(morphism_to_json(m))
    assert sum(e["image"] == "contract" for e in doc["edge_map"]) == 8
    assert same_morphism(morphism_from_json(doc), m)


def test_phi_round_trip(tmp_path):
    phi = criterion_example()
    doc = through_text(phi_to_json(phi))
    assert doc["map"]["x3"] == 0 and doc["specialization"] == {"x3": 1}
    assert phi_from_json(doc) == phi
    (tmp_path / "src.json").write_text(dumps(doc["source"]))
    (tmp_path / "tgt.json").write_text(dumps(doc["target"]))
    doc["source"], doc["target"] = "src.json", "tgt.json"
    assert phi_from_json(doc, tmp_path) == phi


def test_seed_errors(a2):
    doc = seed_to_json(a2)
    with pytest.raises(FormatError):
        seed_from_json({"labels": ["x1"]})
    bad = dict(doc, beta_columns={"x1": [0, 1]})
    with pytest.raises(FormatError):
        seed_from_json(bad)
    bad = dict(doc, order=["x1", "x3"])
    with pytest.raises(FormatError):
        seed_from_json(bad)
