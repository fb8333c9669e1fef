import random

import pytest
from hypothesis import given, strategies as st

from qcluster.acs import verify_acs
from qcluster.acscat import identity_morphism, same_morphism, verify_morphism
from qcluster.rcm import (
    ExAdmissibleMap,
    RcmError,
    column_signs,
    consistently_positive,
    criterion_example,
    drop_frozen,
    identity_map,
    induced_acs_morphism,
    is_ex_admissible,
    push_sequence,
    verify_variable_level,
)
from qcluster.seed import Seed, random_seed


@pytest.fixture
def example():
    return criterion_example()


@pytest.fixture
def isolated():
    """x2 is exchangeable but only sees the frozen x4, and both are specialized."""
    s = Seed.build(["x1", "x2", "x3", "x4"], ["x1", "x2"], {"x1": [0, 0, 1, 0], "x2": [0, 0, 0, 1]})
    t = Seed.build(["y1", "y3"], ["y1"], {"y1": [0, 1]})
    return ExAdmissibleMap(s, t, {"x1": "y1", "x2": None, "x3": "y3", "x4": None})


def test_identity_push(a2):
    phi = identity_map(a2)
    p = push_sequence(phi, ["x1", "x2", "x1|1"])
    assert p.image == ("x1", "x2", "x1|1")
    assert all(k == v for k, v in p.phi_k.items())


def test_hand_traced_pair(example):
    p = push_sequence(example, ["x1", "x2"])
    assert p.image == ("y1", "y2")
    assert p.phi_k == {"x1|1": "y1|1", "x2|1.2": "y2|1.2", "x3": None}


def test_back_and_forth_reduces(example):
    p = push_sequence(example, ["x1", "x1|1", "x2"])
    assert p.image == ("y1", "y1|1", "y2")
    assert p.reduced == (1,)


def test_inadmissible_sequence(example):
    with pytest.raises(RcmError, match="after 1 steps"):
        push_sequence(example, ["x1", "x1"])
    with pytest.raises(RcmError):
        push_sequence(example, ["x3"])


def test_contraction(isolated):
    p = push_sequence(isolated, ["x2", "x1"])
    assert p.image == ("y1",)
    assert p.phi_k["x2|2"] is None and p.phi_k["x1|2.1"] == "y1|1"
    assert is_ex_admissible(p.phi_k, p.source_seed, p.target_seed)
    assert column_signs(isolated) == {"x1": "+", "x2": "0"}
    m = induced_acs_morphism(isolated, 2)
    assert verify_morphism(m, quantum=False)["ok"]
    contracted = {aid for (aid, _), path in m.F_edge.items() if path == ()}
    # exactly the x2 steps, in both directions
    assert contracted == {"()>(x2)", "(x2)>()", "(x1)>(x1,x2)", "(x1,x2)>(x1)"}
    assert m.F_obj["(x2)"] == m.F_obj["()"]
    assert verify_variable_level(isolated, 3)["ok"]


def test_verdicts(example):
    assert consistently_positive(example)["verdict"] == "positive"
    flipped = Seed.build(["y1", "y2"], ["y1", "y2"], {"y1": [0, -1], "y2": [1, 0]})
    neg = ExAdmissibleMap(example.source, flipped, example.phi, example.values)
    assert consistently_positive(neg)["verdict"] == "negative"
    with pytest.raises(NotImplementedError):
        induced_acs_morphism(neg, 2)


def test_mixed_components():
    s = Seed.build(["x1", "x2", "x3", "x4"], ["x1", "x2"], {"x1": [0, 0, 1, 0], "x2": [0, 0, 0, 1]})
    t = Seed.build(["y1", "y2", "y3", "y4"], ["y1", "y2"], {"y1": [0, 0, 1, 0], "y2": [0, 0, 0, -1]})
    phi = ExAdmissibleMap(s, t, {"x1": "y1", "x2": "y2", "x3": "y3", "x4": "y4"})
    r = consistently_positive(phi)
    assert r["verdict"] == "mixed"
    assert sorted(c["verdict"] for c in r["components"]) == ["negative", "positive"]
    with pytest.raises(RcmError):
        induced_acs_morphism(phi, 2)


def test_specialized_neighbour_is_inconsistent():
    a3 = Seed.build(["x1", "x2", "x3"], ["x1", "x2", "x3"], {"x1": [0, 1, 0], "x2": [-1, 0, 1], "x3": [0, -1, 0]})
    a2 = Seed.build(["y1", "y2"], ["y1", "y2"], {"y1": [0, 1], "y2": [-1, 0]})
    phi = ExAdmissibleMap(a3, a2, {"x1": "y1", "x2": "y2", "x3": None})
    r = consistently_positive(phi)
    assert r["columns"]["x3"] == "x" and r["verdict"] == "inconsistent"
    with pytest.raises(RcmError):
        induced_acs_morphism(phi, 2)


def test_criterion_example(example):
    m = induced_acs_morphism(example, 3)
    assert verify_acs(m.source)["ok"] and verify_acs(m.target)["ok"]
    assert verify_morphism(m, quantum=False)["ok"]
    assert verify_variable_level(example, 4)["ok"]


def test_wrong_specialization_detected(example):
    r = verify_variable_level(example.with_values({"x3": 2}), 2)
    assert not r["ok"]
    assert r["mismatches"][0]["label"] == "x2|2"


def test_identity_induces_identity(a2c):
    m = induced_acs_morphism(identity_map(a2c), 2)
    assert same_morphism(m, identity_morphism(m.source))


def test_drop_frozen_hexagon(hexagon):
    phi = drop_frozen(hexagon, "12")
    assert consistently_positive(phi)["verdict"] == "positive"
    assert verify_variable_level(phi, 2)["ok"]
    assert verify_morphism(induced_acs_morphism(phi, 2), quantum=False)["ok"]
    with pytest.raises(RcmError):
        drop_frozen(hexagon, "14")


@given(st.integers(0, 10_000))
def test_pushed_maps_stay_admissible(n):
    rng = random.Random(n)
    m = rng.randint(1, 3)
    s = random_seed(rng, m, rng.randint(1, 2), bound=2, quantum=False)
    frozen = rng.choice(s.frozen).text
    phi = drop_frozen(s, frozen)
    seq, cur = [], phi.source
    for _ in range(4):
        k = rng.choice(cur.ex)
        seq.append(k.text)
        cur = push_sequence(phi, seq).source_seed
    p = push_sequence(phi, seq)
    assert is_ex_admissible(p.phi_k, p.source_seed, p.target_seed)
    assert len(p.image) == 4
