import re

import pytest

from qcluster.engine import (
    Frame,
    LaurentFailure,
    check_frame_involution,
    check_specialization,
    collect_variables,
    exchange_terms,
    explore,
    frame_eval,
    mutate_frame,
    verify_laurent,
)
from qcluster.qtorus import _bar, exact_right_divide


def laurent_dict(f):
    return {e: sum(c.values()) for e, c in f.terms.items()}


# the pentagon recurrence x_{n+1} x_{n-1} = x_n + 1, expanded with sympy
A2_VARIABLES = [
    {(1, 0): 1},
    {(0, 1): 1},
    {(-1, 1): 1, (-1, 0): 1},
    {(0, -1): 1, (-1, 0): 1, (-1, -1): 1},
    {(1, -1): 1, (0, -1): 1},
]


def doubled_rule(frame, k):
    plus, minus = exchange_terms(frame.seed, k)
    p = frame.seed.basis.index(k)
    total = frame.torus.zero()
    for c, w in ((2, plus), (1, minus)):
        N = list(w)
        N[p] = 0
        total = total + frame_eval(frame, N).scale(c)
    return exact_right_divide(total, frame.vars[p])


def test_first_mutation(a2c):
    f = mutate_frame(Frame.root(a2c), "x1")
    assert laurent_dict(f.vars[0]) == {(-1, 1): 1, (-1, 0): 1}
    assert f.seed.basis.labels[0].text == "x1|1"


@pytest.mark.parametrize("quantum", [False, True])
def test_pentagon(a2, quantum):
    seed = a2 if quantum else a2.commutative()
    g = explore(seed, 8, fold=True)
    assert g.closed and len(g.nodes) == 5 and g.is_cycle()
    found = {tuple(sorted(laurent_dict(v).items())) for n in g.nodes for v in n.frame.vars}
    want = {tuple(sorted(d.items())) for d in A2_VARIABLES}
    if quantum:
        found = {tuple(sorted(laurent_dict(v.specialize()).items())) for n in g.nodes for v in n.frame.vars}
    assert found == want
    assert len(collect_variables(g)["mutable"]) == 5


def test_hexagon_fold(hexagon):
    g = explore(hexagon, 12, fold=True)
    assert g.closed and len(g.nodes) == 14
    assert set(g.degrees()) == {3}
    v = collect_variables(g)
    assert len(v["mutable"]) == 9 and len(v["frozen"]) == 6


def test_quantum_variables_bar_invariant(hexagon_q):
    g = explore(hexagon_q, 12, fold=True)
    assert all(_bar(v) == v for n in g.nodes for v in n.frame.vars)


def test_laurent_a2_depth8(a2):
    r = verify_laurent(a2, 8)
    assert r["ok"] and r["failures"] == []


def test_laurent_negative_control(a2):
    r = verify_laurent(a2, 6, rule=doubled_rule)
    assert not r["ok"]
    assert r["failures"][0]["path"] == "(x1,x2,x1|1)"
    with pytest.raises(LaurentFailure):
        f = Frame.root(a2)
        for k in ("x1", "x2", "x1|1"):
            f = mutate_frame(f, k, doubled_rule)


def test_specialization_hexagon(hexagon_q):
    r = check_specialization(hexagon_q, 4)
    assert r["ok"] and r["frames"] > 1


def test_frame_involution(hexagon_q):
    root = Frame.root(hexagon_q)
    assert all(check_frame_involution(root, k) for k in hexagon_q.ex)


def test_tree_mode_counts(a2):
    g = explore(a2, 3, fold=False)
    # root, two children, then one new direction each time
    assert len(g.nodes) == 1 + 2 + 2 + 2


def test_node_limit(hexagon):
    g = explore(hexagon, 12, fold=False, max_nodes=20)
    assert len(g.nodes) <= 20 and not g.complete


def test_dot_matches_json(a2):
    g = explore(a2, 8, fold=True)
    dot = g.to_dot()
    assert dot.startswith("graph exchange {") and dot.rstrip().endswith("}")
    nodes = re.findall(r"^\s+n\d+ \[label=", dot, flags=re.M)
    edges = re.findall(r"^\s+n\d+ -- n\d+", dot, flags=re.M)
    assert len(nodes) == len(g.variables_json()) == 5
    assert len(edges) == 5


def test_jobs_do_not_change_results(hexagon):
    one = explore(hexagon, 12, fold=True, jobs=1)
    two = explore(hexagon, 12, fold=True, jobs=2)
    assert one.summary() == two.summary()
    assert one.variables_json() == two.variables_json()
