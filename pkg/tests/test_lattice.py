import pytest
import sympy
from hypothesis import given, strategies as st
from sympy.matrices.normalforms import smith_normal_form as sympy_snf
from sympy.polys.domains import ZZ

from qcluster.lattice import (
    Basis,
    BilinearForm,
    Label,
    LinearMap,
    NoSolution,
    identity,
    integer_kernel,
    invariant_factors,
    is_unimodular,
    map_compose,
    map_dual,
    matmul,
    matvec,
    radicals,
    rank,
    smith_invariants,
    smith_normal_form,
    solve_integer,
    transpose,
    unimodular_inverse,
)

matrices = st.integers(1, 4).flatmap(
    lambda r: st.integers(1, 4).flatmap(
        lambda c: st.lists(st.lists(st.integers(-6, 6), min_size=c, max_size=c), min_size=r, max_size=r)
    )
)


def oracle_invariants(m):
    D = sympy_snf(sympy.Matrix(m), domain=ZZ)
    return [abs(int(D[i, i])) for i in range(min(D.shape)) if D[i, i] != 0]


# frozen from the sympy reduction
@pytest.mark.parametrize(
    "m, expected",
    [
        ([[0, 1], [-1, 0]], [1, 1]),
        ([[2]], [2]),
        ([[0], [1]], [1]),
        ([[2, 4, 4], [-6, 6, 12], [10, -4, -16]], [2, 6, 12]),
        ([[1, 2, 3], [4, 5, 6]], [1, 3]),
    ],
)
def test_invariant_factors_known(m, expected):
    assert invariant_factors(m) == expected


@given(matrices)
def test_snf_decomposition(m):
    U, D, V = smith_normal_form(m)
    assert matmul(matmul(U, m), V) == D
    assert is_unimodular(U) and is_unimodular(V)
    diag = [D[i][i] for i in range(min(len(D), len(D[0])))]
    nz = [d for d in diag if d]
    assert all(d > 0 for d in nz)
    assert all(b % a == 0 for a, b in zip(nz, nz[1:]))
    for i, row in enumerate(D):
        assert all(x == 0 for j, x in enumerate(row) if j != i)


@given(matrices)
def test_invariants_match_sympy(m):
    assert invariant_factors(m) == oracle_invariants(m)


@given(matrices)
def test_kernel_is_kernel(m):
    ker = integer_kernel(m)
    assert len(ker) == len(m[0]) - rank(m)
    for v in ker:
        assert all(x == 0 for x in matvec(m, v))


def test_solve_integer():
    a = [[2, 0], [0, 3]]
    assert solve_integer(a, [4, 9]) == (2, 3)
    with pytest.raises(NoSolution):
        solve_integer(a, [1, 0])


def test_unimodular_inverse():
    m = ((2, 1), (1, 1))
    assert matmul(m, unimodular_inverse(m)) == identity(2)


def test_linear_map_columns_and_compose():
    a, b = Basis.of(["a1", "a2"]), Basis.of(["b1"])
    f = LinearMap(a, b, [[1, 2]])
    assert f(a.element([3, 1])).vector() == (5,)
    g = LinearMap(b, a, [[1], [-1]])
    assert map_compose(g, f).matrix == ((1, 2), (-1, -2))
    assert map_dual(f).matrix == transpose(f.matrix, 2)
    assert smith_invariants(f) == [1]


def test_radicals_of_degenerate_form():
    left, right = Basis.of(["u", "v"], dual=True), Basis.of(["x", "y"])
    form = BilinearForm(left, right, [[1, 1], [2, 2]])
    lrad, rrad = radicals(form)
    assert len(lrad) == 1 and len(rrad) == 1


def test_label_round_trip():
    assert Label.parse("x1*") == Label("x1", True)
    assert str(Label("x1").toggled()) == "x1*"
