import random

import pytest
from hypothesis import given, strategies as st

from qcluster import io
from qcluster.lattice import Label, matmul, transpose, identity
from qcluster.seed import (
    MINUS,
    PLUS,
    NoRetraction,
    Seed,
    SeedError,
    check_involution,
    find_retraction,
    fresh_label,
    fundamental_group,
    is_valid,
    mutate_beta,
    mutate_lambda,
    mutate_seed,
    principal_seed,
    quantize,
    random_seed,
    same_up_to_relabeling,
    trop_mutate_A,
    trop_mutate_X,
    validate,
)

seeds = st.integers(0, 10**6).map(lambda s: random_seed(random.Random(s), random.Random(s).randint(1, 3), 2, bound=3))


def test_a2_valid(a2):
    assert validate(a2) == []
    # L B^T is the identity under the fixed convention
    assert matmul(a2.L, transpose(a2.B, 2)) == identity(2)


def test_zero_lambda_fails_compatibility(a2):
    bad = a2.with_lambda(((0, 0), (0, 0)))
    assert any("compatibility" in v["identity"] for v in validate(bad))


def test_repeated_beta_column_not_injective():
    s = Seed.build(["x1", "x2", "f"], ["x1", "x2"], {"x1": [0, 0, 1], "x2": [0, 0, 1]}, [[0, 0, 0]] * 3)
    assert any(v["identity"] == "beta injective" for v in validate(s))


def test_non_skew_principal_part():
    s = Seed.build(["x1", "x2"], ["x1", "x2"], {"x1": [0, 1], "x2": [1, 0]})
    assert validate(s)[0]["identity"] == "principal form skew-symmetric"


def test_reserved_characters():
    with pytest.raises(SeedError):
        Seed.build(["a,b"], ["a,b"], {"a,b": [0]})


def test_fresh_labels():
    assert fresh_label(Label("x1"), (1,)).text == "x1|1"
    a = fresh_label(Label("x1|1"), (1, 1))
    assert a.text == "x1|1.1" and a != Label("x1|1")
    assert fresh_label(Label("x1"), (1, 2)) != fresh_label(Label("x1"), (2, 1))


def test_fresh_label_avoids_taken():
    lab = fresh_label(Label("x1"), (1,), [Label("x1|1")])
    assert lab != Label("x1|1")


def test_f_map_values(a2c):
    k = Label("x1")
    P, Pinv = trop_mutate_X(a2c, k, PLUS)
    new = P.codomain
    # mu^+(k) = -mu(k)
    assert P(a2c.basis.basis_vector(k)) == -new.basis_vector(new.labels[0])
    # mu^+(x2) = x2 + [<beta(x1), x2>]_+ mu(x1)
    assert P(a2c.basis.basis_vector("x2")).vector() == (1, 1)
    assert matmul(P.matrix, Pinv.matrix) == identity(2)


@given(seeds, st.data())
def test_e_f_duality(seed, data):
    k = data.draw(st.sampled_from(seed.ex))
    sign = data.draw(st.sampled_from([PLUS, MINUS]))
    F, _ = trop_mutate_X(seed, k, sign)
    _, Ebar = trop_mutate_A(seed, k, sign)
    n = seed.n
    b = data.draw(st.lists(st.integers(-4, 4), min_size=n, max_size=n))
    c = data.draw(st.lists(st.integers(-4, 4), min_size=n, max_size=n))
    Fc = [sum(F.matrix[i][j] * c[j] for j in range(n)) for i in range(n)]
    Eb = [sum(Ebar.matrix[i][j] * b[j] for j in range(n)) for i in range(n)]
    assert sum(x * y for x, y in zip(b, Fc)) == sum(x * y for x, y in zip(Eb, c))


def test_e_map_values(a2c):
    k = Label("x1")
    E, Ebar = trop_mutate_A(a2c, k, PLUS)
    assert E(a2c.dual_basis.basis_vector(Label("x2", True))).vector() == (0, 1)
    # mubar(mu(k)*) = [beta(k)]_+ - k*
    new = E.codomain
    assert Ebar(new.basis_vector(new.labels[0])).vector() == (-1, 1)


@given(seeds, st.data())
def test_mutated_beta_at_fresh_label(seed, data):
    k = data.draw(st.sampled_from(seed.ex))
    i = seed.ex.index(k)
    assert mutate_beta(seed, k)[i] == tuple(-c for c in seed.B[i])


@given(seeds, st.data())
def test_lambda_diagonal_vanishes(seed, data):
    k = data.draw(st.sampled_from(seed.ex))
    p = seed.basis.index(k)
    assert mutate_lambda(seed, k)[p][p] == 0


@given(seeds, st.data())
def test_involution_and_signs(seed, data):
    k = data.draw(st.sampled_from(seed.ex))
    assert check_involution(seed, k, PLUS) and check_involution(seed, k, MINUS)
    assert mutate_beta(seed, k, PLUS) == mutate_beta(seed, k, MINUS)
    assert mutate_lambda(seed, k, PLUS) == mutate_lambda(seed, k, MINUS)
    assert is_valid(mutate_seed(seed, k))


def test_corrupted_mutation_detected(a2):
    once = mutate_seed(a2, Label("x1"))
    twice = mutate_seed(once, once.basis.labels[0])
    corrupted = Seed(twice.basis, twice.ex, ((0, 2), (-1, 0)), twice.L, twice.inv, twice.path)
    assert same_up_to_relabeling(a2, twice)
    assert not same_up_to_relabeling(a2, corrupted)


def test_x_form(a2):
    x1, x2 = a2.ex_basis.basis_vector("x1"), a2.ex_basis.basis_vector("x2")
    assert a2.x_form(x1, x2) == 1 and a2.x_form(x2, x1) == -1 and a2.x_form(x1, x1) == 0


def test_retraction_unit_invariants(hexagon):
    rho, lam = find_retraction(hexagon)
    q = quantize(hexagon)
    assert is_valid(q)
    rb = matmul(rho.matrix, transpose(hexagon.B, hexagon.n))
    assert rb == identity(hexagon.m)


def test_retraction_times_two():
    s = Seed.build(["x1", "f"], ["x1"], {"x1": [0, 2]})
    with pytest.raises(NoRetraction):
        find_retraction(s)


def test_retraction_square_invertible(a2c):
    rho, _ = find_retraction(a2c)
    assert matmul(rho.matrix, transpose(a2c.B, 2)) == identity(2)


def test_fundamental_group():
    a2 = Seed.build(["x1", "x2"], ["x1", "x2"], {"x1": [0, 1], "x2": [-1, 0]})
    assert fundamental_group(a2) == {"torsion": [], "free_rank": 0}
    pa1 = Seed.build(["x1", "y1"], ["x1"], {"x1": [0, 1]})
    assert fundamental_group(pa1) == {"torsion": [], "free_rank": 1}
    zero = Seed.build(["a", "b"], ["a", "b"], {"a": [0, 0], "b": [0, 0]})
    assert fundamental_group(zero)["free_rank"] == 2
    two = Seed.build(["x1", "f"], ["x1"], {"x1": [0, 2]})
    assert fundamental_group(two) == {"torsion": [2], "free_rank": 1}


def test_principal_seed_valid():
    assert is_valid(principal_seed([[0, 1], [-1, 0]], extra=1))


@given(seeds)
def test_json_round_trip(seed):
    assert io.seed_from_json(io.seed_to_json(seed)) == seed
    mutated = mutate_seed(seed, seed.ex[0])
    assert io.seed_from_json(io.seed_to_json(mutated)) == mutated
