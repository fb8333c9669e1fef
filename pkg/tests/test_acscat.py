import pytest

from qcluster.acs import acs_from_exchange_graph, acs_from_seed, classify, verify_acs
from qcluster.acscat import (
    TruncationTooShallow,
    coproduct,
    coproduct_mediator,
    codiagonal,
    compose,
    diagonal,
    from_initial,
    identity_morphism,
    initial_object,
    inverse,
    is_isomorphism,
    product,
    same_morphism,
    terminal_object,
    to_terminal,
    verify_morphism,
)
from qcluster.engine import explore
from qcluster.seed import Seed
from qcluster.surface import hexagon_gr26_isomorphism


@pytest.fixture
def pent(a2):
    return acs_from_exchange_graph(explore(a2, 8, fold=True))


@pytest.fixture
def pent_c(a2c):
    return acs_from_exchange_graph(explore(a2c, 8, fold=True))


@pytest.fixture
def a1c():
    return acs_from_seed(Seed.build(["y1", "y2"], ["y1"], {"y1": [0, 1]}), 2)


def test_identity(pent):
    ident = identity_morphism(pent)
    assert verify_morphism(ident)["ok"]
    assert is_isomorphism(ident)
    assert same_morphism(compose(ident, ident), ident)
    assert same_morphism(inverse(ident), ident)


def test_associativity(pent):
    _, d = diagonal(pent)
    prod = d.target
    _, p1, _ = product(pent, pent)
    p1 = type(p1)(prod, pent, p1.F_obj, p1.F_edge, p1.chi, p1.alpha)
    ident = identity_morphism(pent)
    left = compose(compose(ident, p1), d)
    right = compose(ident, compose(p1, d))
    assert same_morphism(left, right)
    assert verify_morphism(left)["ok"]


def test_product_commutative(pent_c, a1c):
    prod, p1, p2 = product(pent_c, a1c)
    assert verify_acs(prod)["ok"]
    assert len(prod.vertices) == 5 * len(a1c.vertices)
    assert verify_morphism(p1)["ok"] and verify_morphism(p2)["ok"]


def test_diagonal_mediates(pent):
    prod, d = diagonal(pent)
    assert verify_acs(prod)["ok"]
    assert verify_morphism(d, quantum=False)["ok"]
    # the diagonal pulls lambda + lambda back to 2 lambda
    r = verify_morphism(d)
    assert {v["check"] for v in r["violations"]} == {"(r)"}
    _, p1, p2 = product(pent, pent)
    ident = identity_morphism(pent)
    assert compose(p1, d).F_obj == ident.F_obj
    assert compose(p1, d).chi == ident.chi and compose(p2, d).alpha == ident.alpha


def test_coproduct(pent, a2):
    other = acs_from_seed(a2, 2)
    co, i1, i2 = coproduct(pent, other)
    assert verify_acs(co)["ok"]
    assert verify_morphism(i1)["ok"] and verify_morphism(i2)["ok"]
    co2, nabla = codiagonal(pent)
    assert verify_morphism(nabla)["ok"]
    _, j1, j2 = coproduct(pent, pent)
    ident = identity_morphism(pent)
    for j in (j1, j2):
        assert same_morphism(compose(nabla, j), ident)
    med = coproduct_mediator(co, i1, i2)
    assert verify_morphism(med)["ok"]


def test_initial_and_terminal(pent, pent_c):
    assert verify_morphism(from_initial(pent))["ok"]
    assert verify_morphism(to_terminal(pent_c))["ok"]
    # lambda does not pull back from the zero lattice
    r = verify_morphism(to_terminal(pent))
    assert not r["ok"] and {v["check"] for v in r["violations"]} == {"(r)"}
    assert verify_morphism(to_terminal(pent), quantum=False)["ok"]
    init, term = initial_object(), terminal_object()
    assert not is_isomorphism(from_initial(term, init))


def test_contraction_to_point(pent_c):
    m = to_terminal(pent_c)
    assert all(path == () for path in m.F_edge.values())


def test_shallow_target(a2):
    small = acs_from_seed(a2, 1)
    big = acs_from_seed(a2, 2)
    ident = identity_morphism(big)
    m = type(ident)(big, small, ident.F_obj, ident.F_edge, ident.chi, ident.alpha)
    with pytest.raises(TruncationTooShallow):
        verify_morphism(m)


def test_broken_naturality(pent):
    ident = identity_morphism(pent)
    v = pent.vertices[0]
    chi = dict(ident.chi)
    chi[v] = type(chi[v])(chi[v].domain, chi[v].codomain, [[-x for x in r] for r in chi[v].matrix])
    m = type(ident)(pent, pent, ident.F_obj, ident.F_edge, chi, ident.alpha)
    r = verify_morphism(m)
    assert not r["ok"]


def test_product_counts(a2):
    a = acs_from_seed(a2, 1)
    prod, _, _ = product(a, a)
    assert len(prod.vertices) == 9
    v = prod.vertices[0]
    assert len(prod.A[v]) == 4 and len(prod.X[v]) == 4


def test_units(pent_c, pent):
    _, p1, _ = product(pent_c, terminal_object())
    assert is_isomorphism(p1) and verify_morphism(p1)["ok"]
    co, i1, _ = coproduct(pent, initial_object(quantum=True))
    assert is_isomorphism(i1) and verify_morphism(i1)["ok"]
    co2, _, _ = coproduct(pent, pent)
    assert classify(co2)["weak_components"] == 2


def test_isomorphism_inverse():
    m = hexagon_gr26_isomorphism().morphism
    inv = inverse(m)
    assert verify_morphism(inv)["ok"]
    assert same_morphism(compose(inv, m), identity_morphism(m.source))
    assert same_morphism(compose(m, inv), identity_morphism(m.target))
    assert same_morphism(compose(m, identity_morphism(m.source)), m)
