from itertools import combinations

import pytest
from hypothesis import given, strategies as st

from qcluster.acs import classify, verify_acs
from qcluster.acscat import is_isomorphism, verify_morphism
from qcluster.lattice import identity, map_compose
from qcluster.seed import MINUS, PLUS
from qcluster.surface import (
    SurfaceError,
    acs_from_polygon,
    all_diagonals,
    arc,
    arc_text,
    catalan,
    crosses,
    enumerate_triangulations,
    fan,
    flip,
    flip_consistent,
    flipped_arc,
    hexagon_gr26_isomorphism,
    hexagon_report,
    mutate_quadrilaterals,
    quadrilateral,
    )


def brute_force(n):
    """Maximal noncrossing sets of diagonals, by checking every subset of size n - 3."""
    ds = all_diagonals(n)
    out = set()
    for sub in combinations(ds, n - 3):
        if all(not crosses(a, b) for a, b in combinations(sub, 2)):
            out.add(frozenset(sub))
    return out


@pytest.mark.parametrize("n", [4, 5, 6, 7, 8])
def test_enumeration_matches_brute_force(n):
    assert {t.diagonals for t in enumerate_triangulations(n)} == brute_force(n)


@pytest.mark.parametrize("n, count", [(4, 2), (5, 5), (6, 14), (7, 42), (8, 132), (9, 429), (10, 1430)])
def test_catalan_counts(n, count):
    assert catalan(n - 2) == count
    assert len(enumerate_triangulations(n)) == count


def test_out_of_range():
    with pytest.raises(SurfaceError):
        enumerate_triangulations(3)
    with pytest.raises(SurfaceError):
        acs_from_polygon(11)


def test_arc_text():
    assert arc_text(arc(3, 1), 6) == "13"
    assert arc_text(arc(2, 11), 12) == "2-11"


def test_quadrilateral_and_flip():
    t = fan(6)
    d = arc(1, 4)
    assert sorted(quadrilateral(t, d)) == [1, 3, 4, 5]
    assert flipped_arc(t, d) == arc(3, 5)
    t2 = flip(t, d)
    assert t2.is_valid() and flip(t2, arc(3, 5)) == t


@pytest.mark.parametrize("n", [4, 5, 6, 7, 8])
def test_flips_follow_mutation(n):
    assert all(flip_consistent(t, d) for t in enumerate_triangulations(n) for d in t.diagonals)


@given(st.integers(0, 13), st.sampled_from([PLUS, MINUS]))
def test_flip_maps_are_tropical_mutations(i, sign):
    t = enumerate_triangulations(6)[i]
    d = sorted(t.diagonals)[0]
    xmap, amap = mutate_quadrilaterals(t, d, sign)
    back_x, back_a = mutate_quadrilaterals(flip(t, d), flipped_arc(t, d), "-" if sign == PLUS else PLUS)
    assert map_compose(back_a, amap).matrix == identity(len(amap.domain))
    assert map_compose(xmap, back_x).matrix == identity(len(xmap.domain))


@pytest.mark.parametrize("n", [4, 5, 6, 7])
def test_polygon_structures(n):
    acs = acs_from_polygon(n)
    r = verify_acs(acs)
    assert r["ok"], r["violations"][:3]
    assert r["vertices"] == catalan(n - 2)
    c = classify(acs)
    assert c["mutable_rank"] == n - 3 and c["frozen_rank"] == n
    assert c["strongly_connected"] and c["bi_directed"]


def test_hexagon_matches_grassmannian():
    report = hexagon_report()
    assert report["ok"]
    assert report["source_vertices"] == report["target_vertices"] == 14
    assert report["is_isomorphism"] and report["well_defined"]


def test_ptolemy_relations():
    match = hexagon_gr26_isomorphism()
    assert is_isomorphism(match.morphism)
    assert verify_morphism(match.morphism)["ok"]
    var = match.arc_variables
    assert len(var) == 15
    checked = 0
    for i, j, k, l in combinations(range(1, 7), 4):
        # diagonals ik and jl of the quadrilateral ijkl cross
        lhs = var[arc(i, k)] * var[arc(j, l)]
        rhs = var[arc(i, j)] * var[arc(k, l)] + var[arc(i, l)] * var[arc(j, k)]
        assert lhs == rhs
        checked += 1
    assert checked == 15
