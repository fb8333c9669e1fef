"""Seeds (ex, B, inv, beta, lambda) and their tropical mutation.

A seed keeps its labels in a fixed order; that order is the enumeration used
for symmetrization scalars.  Exchange data is stored as two Gram matrices:

* ``B[i][c]`` is the coefficient of ``c*`` in ``beta(ex[i])``, i.e. the form
  ``<ex[i], c>_beta``.  Rows follow ``ex``, columns follow the labels.
* ``L[b][c]`` is the coefficient of ``c`` in ``lambda(b*)``, i.e. the form
  ``<b*, c*>_lambda``.

Compatibility then reads ``L B^T = E`` where ``E[b][i] = 1`` iff ``b = ex[i]``.

Mutation keeps positions: the fresh label replaces the mutated one in place.
With ``r[c] = [B[k][c]]_sign`` for ``c != k`` and ``r[k] = -1``, the matrix
``P`` equal to the identity with row k replaced by ``r`` is the F-map on
``Z[B]`` (and its own inverse); its transpose is the E-map on ``Z[B]*``.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from .lattice import (
    Basis,
    BasisMismatch,
    Label,
    LatticeElement,
    LinearMap,
    Matrix,
    NoSolution,
    as_matrix,
    identity,
    invariant_factors,
    matmul,
    neg_part,
    pos_part,
    rank,
    smith_normal_form,
    solve_integer,
    transpose,
    unimodular_inverse,
    zeros,
)

RESERVED = set(",()* ")
PLUS, MINUS = "+", "-"


class SeedError(ValueError):
    """Malformed seed data or an invalid mutation direction."""


class NoRetraction(ValueError):
    """beta is not a split monomorphism, so no compatible lambda exists."""


class NoSkewLambda(ValueError):
    """beta splits but no skew-symmetric integer lambda is compatible with it."""


def _sign_part(x: int, sign: str) -> int:
    return pos_part(x) if sign == PLUS else neg_part(x)


@dataclass(frozen=True)
class MutationStep:
    direction: Label
    fresh: Label
    sign: str = PLUS


@dataclass(frozen=True)
class Seed:
    basis: Basis
    ex: tuple[Label, ...]
    B: Matrix
    L: Matrix | None = None
    inv: frozenset = frozenset()
    path: tuple[int, ...] = ()
    _ex_pos: tuple = field(default=None, compare=False, hash=False, repr=False)

    def __post_init__(self) -> None:
        basis = self.basis
        ex = tuple(sorted(self.ex, key=basis.index))
        object.__setattr__(self, "ex", ex)
        object.__setattr__(self, "_ex_pos", tuple(basis.index(k) for k in ex))
        if len(set(ex)) != len(ex):
            raise SeedError("duplicate exchangeable labels")
        for lab in basis:
            if lab.dual:
                raise SeedError("seed labels must be primal")
            if RESERVED & set(lab.text):
                raise SeedError(f"label {lab.text!r} uses a reserved character")
        B = as_matrix(self.B)
        if len(B) != len(ex) or any(len(r) != len(basis) for r in B):
            raise SeedError("B must have one row per exchangeable label and one column per label")
        object.__setattr__(self, "B", B)
        if self.L is not None:
            L = as_matrix(self.L)
            if len(L) != len(basis) or any(len(r) != len(basis) for r in L):
                raise SeedError("L must be square over the labels")
            object.__setattr__(self, "L", L)
        inv = frozenset(self.inv)
        for lab in inv:
            if lab not in basis or lab in ex:
                raise SeedError(f"invertible label {lab} must be a frozen label")
        object.__setattr__(self, "inv", inv)

    # -- construction

    @classmethod
    def build(
        cls,
        labels: Sequence[str],
        ex: Iterable[str],
        beta: Mapping[str, Sequence[int]] | Sequence[Sequence[int]],
        lam: Mapping[str, Sequence[int]] | Sequence[Sequence[int]] | None = None,
        inv: Iterable[str] = (),
    ) -> "Seed":
        """Build from label strings; ``beta`` rows follow ``ex`` in label order."""
        basis = Basis.of(labels)
        ex_labels = sorted((Label(t) for t in ex), key=basis.index)
        if isinstance(beta, Mapping):
            B = [beta[k.text] for k in ex_labels]
        else:
            B = beta
        L = None
        if lam is not None:
            L = [lam[t] for t in labels] if isinstance(lam, Mapping) else lam
        return cls(basis, tuple(ex_labels), B, L, frozenset(Label(t) for t in inv))

    # -- views

    @property
    def n(self) -> int:
        return len(self.basis)

    @property
    def m(self) -> int:
        return len(self.ex)

    @property
    def labels(self) -> tuple[Label, ...]:
        return self.basis.labels

    @property
    def ex_positions(self) -> tuple[int, ...]:
        return self._ex_pos

    @property
    def frozen(self) -> tuple[Label, ...]:
        exs = set(self.ex)
        return tuple(lab for lab in self.basis if lab not in exs)

    @property
    def ex_basis(self) -> Basis:
        return Basis(self.ex)

    @property
    def dual_basis(self) -> Basis:
        return self.basis.dual()

    @property
    def is_quantum(self) -> bool:
        return self.L is not None

    def ex_row(self, k: Label) -> int:
        try:
            return self.ex.index(k)
        except ValueError:
            raise SeedError(f"{k} is not exchangeable") from None

    @property
    def beta(self) -> LinearMap:
        """beta: Z[ex] -> Z[B]*."""
        return LinearMap(self.ex_basis, self.dual_basis, transpose(self.B, self.n))

    @property
    def lam(self) -> LinearMap | None:
        """lambda: Z[B]* -> Z[B]."""
        if self.L is None:
            return None
        return LinearMap(self.dual_basis, self.basis, transpose(self.L, self.n))

    def beta_of(self, k: Label) -> LatticeElement:
        return LatticeElement.build(self.dual_basis, self.B[self.ex_row(k)])

    def principal_block(self) -> Matrix:
        return tuple(tuple(row[j] for j in self._ex_pos) for row in self.B)

    def with_lambda(self, L: Matrix | None) -> "Seed":
        return Seed(self.basis, self.ex, self.B, L, self.inv, self.path)

    def commutative(self) -> "Seed":
        return self.with_lambda(None)

    def relabeled(self, labels: Sequence[Label]) -> "Seed":
        """The same data over new labels, matched by position."""
        basis = Basis(tuple(labels))
        ex = tuple(basis.labels[p] for p in self._ex_pos)
        inv = frozenset(basis.labels[self.basis.index(lab)] for lab in self.inv)
        return Seed(basis, ex, self.B, self.L, inv, self.path)

    def compatibility_matrix(self) -> Matrix:
        return matmul(self.L, transpose(self.B, self.n), self.m)

    # -- forms

    def x_form(self, x: LatticeElement, y: LatticeElement) -> int:
        """<beta(x), y> for x, y in Z[ex]."""
        eb = self.ex_basis
        if x.basis != eb or y.basis != eb:
            raise BasisMismatch("X-form arguments must lie in Z[ex]")
        xv, yv = x.vector(), y.vector()
        total = 0
        for i, xi in enumerate(xv):
            if xi:
                row = self.B[i]
                total += xi * sum(row[p] * yj for p, yj in zip(self._ex_pos, yv) if yj)
        return total

    def a_form(self, a: LatticeElement, b: LatticeElement) -> int:
        """<lambda(a), b> for a, b in Z[B]*."""
        if self.L is None:
            raise SeedError("seed carries no lambda")
        db = self.dual_basis
        if a.basis != db or b.basis != db:
            raise BasisMismatch("A-form arguments must lie in Z[B]*")
        av, bv = a.vector(), b.vector()
        return sum(ai * sum(r * bj for r, bj in zip(self.L[i], bv)) for i, ai in enumerate(av) if ai)

    def x_gram(self) -> Matrix:
        return self.principal_block()


# ---------------------------------------------------------------------------
# validation


def validate(seed: Seed) -> list[dict]:
    """All violated seed identities; empty means valid."""
    out = []
    P = seed.principal_block()
    for i in range(seed.m):
        for j in range(i, seed.m):
            if P[i][j] != -P[j][i]:
                out.append({
                    "identity": "principal form skew-symmetric",
                    "where": f"({seed.ex[i]}, {seed.ex[j]})",
                    "detail": f"{P[i][j]} vs {P[j][i]}",
                })
    if seed.L is None:
        return out
    L = seed.L
    for i in range(seed.n):
        for j in range(i, seed.n):
            if L[i][j] != -L[j][i]:
                out.append({
                    "identity": "lambda skew-symmetric",
                    "where": f"({seed.labels[i]}*, {seed.labels[j]}*)",
                    "detail": f"{L[i][j]} vs {L[j][i]}",
                })
    C = seed.compatibility_matrix()
    for b in range(seed.n):
        for i, p in enumerate(seed.ex_positions):
            want = 1 if b == p else 0
            if C[b][i] != want:
                out.append({
                    "identity": "compatibility <lambda(b*), beta(k)> = delta",
                    "where": f"(b={seed.labels[b]}, k={seed.ex[i]})",
                    "detail": f"got {C[b][i]}, expected {want}",
                })
    if rank(transpose(seed.B, seed.n), seed.m) != seed.m:
        out.append({"identity": "beta injective", "where": "beta", "detail": "beta has a nonzero kernel"})
    return out


def is_valid(seed: Seed) -> bool:
    return not validate(seed)


# ---------------------------------------------------------------------------
# fresh labels and the tropical maps


def base_symbol(lab: Label) -> str:
    return lab.text.split("|", 1)[0]


def fresh_label(k: Label, path: Sequence[int], taken: Iterable[Label] = ()) -> Label:
    """k's base symbol followed by the 1-based positions of the mutation path.

    ``path`` already includes the current step.
    """
    text = base_symbol(k) + "|" + ".".join(str(p) for p in path)
    taken = set(taken)
    lab = Label(text)
    while lab in taken:
        lab = Label(lab.text + "'")
    return lab


def step_matrix(seed: Seed, k: Label, sign: str = PLUS) -> Matrix:
    """The F-map matrix at k: identity with row k replaced by the sign part of beta(k)."""
    if sign not in (PLUS, MINUS):
        raise SeedError(f"sign must be '+' or '-', not {sign!r}")
    i = seed.ex_row(k)
    p = seed.ex_positions[i]
    row = [_sign_part(x, sign) for x in seed.B[i]]
    row[p] = -1
    rows = [list(r) for r in identity(seed.n)]
    rows[p] = row
    return as_matrix(rows)


def mutated_basis(seed: Seed, k: Label) -> tuple[Basis, Label, tuple[int, ...]]:
    p = seed.basis.index(k)
    seed.ex_row(k)
    path = seed.path + (p + 1,)
    fresh = fresh_label(k, path, seed.basis.labels)
    labels = list(seed.basis.labels)
    labels[p] = fresh
    return Basis(tuple(labels)), fresh, path


def trop_mutate_X(seed: Seed, k: Label, sign: str = PLUS) -> tuple[LinearMap, LinearMap]:
    """(mu_k^sign on Z[B], its inverse mubar_k^sign on Z[mu_k B])."""
    P = step_matrix(seed, k, sign)
    new, _, _ = mutated_basis(seed, k)
    return LinearMap(seed.basis, new, P), LinearMap(new, seed.basis, P)


def trop_mutate_A(seed: Seed, k: Label, sign: str = PLUS) -> tuple[LinearMap, LinearMap]:
    """(mu_k^sign on Z[B]*, its inverse mubar_k^sign on Z[mu_k B]*)."""
    Pt = transpose(step_matrix(seed, k, sign))
    new, _, _ = mutated_basis(seed, k)
    return LinearMap(seed.dual_basis, new.dual(), Pt), LinearMap(new.dual(), seed.dual_basis, Pt)


def restrict_to_ex(seed: Seed, P: Matrix) -> Matrix:
    pos = seed.ex_positions
    return tuple(tuple(P[i][j] for j in pos) for i in pos)


def mutate_beta(seed: Seed, k: Label, sign: str = PLUS) -> Matrix:
    """Gram matrix of mu_k beta = mu_k^sign o beta o mubar_k^sign, over the new labels."""
    P = step_matrix(seed, k, sign)
    Q = restrict_to_ex(seed, P)
    return matmul(matmul(transpose(Q, seed.m), seed.B, seed.n), P, seed.n)


def mutate_lambda(seed: Seed, k: Label, sign: str = PLUS) -> Matrix:
    """Gram matrix of mu_k lambda = mu_k^sign o lambda o mubar_k^sign."""
    if seed.L is None:
        raise SeedError("seed carries no lambda")
    P = step_matrix(seed, k, sign)
    return matmul(matmul(P, seed.L, seed.n), transpose(P, seed.n), seed.n)


def mutate_seed(seed: Seed, k: Label, sign: str = PLUS) -> Seed:
    basis, _, path = mutated_basis(seed, k)
    ex = tuple(basis.labels[q] for q in seed.ex_positions)
    B = mutate_beta(seed, k, sign)
    L = mutate_lambda(seed, k, sign) if seed.L is not None else None
    inv = frozenset(basis.labels[seed.basis.index(lab)] for lab in seed.inv)
    return Seed(basis, ex, B, L, inv, path)


def mutation_step(seed: Seed, k: Label, sign: str = PLUS) -> MutationStep:
    _, fresh, _ = mutated_basis(seed, k)
    return MutationStep(k, fresh, sign)


def same_up_to_relabeling(a: Seed, b: Seed) -> bool:
    """Equal data when labels are matched by position."""
    return (
        a.n == b.n
        and a.ex_positions == b.ex_positions
        and a.B == b.B
        and a.L == b.L
        and {a.basis.index(x) for x in a.inv} == {b.basis.index(x) for x in b.inv}
    )


def check_involution(seed: Seed, k: Label, sign: str = PLUS) -> bool:
    """Mutating at k and then at the fresh label gives back the seed up to relabeling."""
    once = mutate_seed(seed, k, sign)
    fresh = once.basis.labels[seed.basis.index(k)]
    twice = mutate_seed(once, fresh, sign)
    return same_up_to_relabeling(seed, twice)


# ---------------------------------------------------------------------------
# retractions and the fundamental group


def find_retraction(seed: Seed) -> tuple[LinearMap, LinearMap]:
    """A retraction rho of beta and a compatible skew-symmetric lambda.

    rho comes from the Smith form of beta.  The lambda is a solution of the
    integer linear system ``L B^T = E`` restricted to skew matrices.
    """
    n, m = seed.n, seed.m
    bt = transpose(seed.B, n)
    U, D, V = smith_normal_form(bt, m)
    diag = [D[i][i] for i in range(min(n, m))]
    if len([d for d in diag if d]) != m or any(d != 1 for d in diag):
        raise NoRetraction("beta is not a split monomorphism")
    # rho = V [I | 0] U
    proj = [[1 if i == j else 0 for j in range(n)] for i in range(m)]
    rho_m = matmul(matmul(V, proj, n), U, n) if m else zeros(0, n)
    rho = LinearMap(seed.dual_basis, seed.ex_basis, rho_m)
    L = solve_skew_lambda(seed)
    lam = LinearMap(seed.dual_basis, seed.basis, transpose(L, n))
    return rho, lam


def solve_skew_lambda(seed: Seed) -> Matrix:
    n = seed.n
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
    col = {pr: t for t, pr in enumerate(pairs)}
    rows, rhs = [], []
    for b in range(n):
        for r, p in enumerate(seed.ex_positions):
            # sum_c L[b][c] B[r][c] = delta(b, p)
            eq = [0] * len(pairs)
            for c in range(n):
                x = seed.B[r][c]
                if not x or c == b:
                    continue
                if b < c:
                    eq[col[(b, c)]] += x
                else:
                    eq[col[(c, b)]] -= x
            rows.append(eq)
            rhs.append(1 if b == p else 0)
    if not pairs:
        if any(rhs):
            raise NoSkewLambda("no skew-symmetric lambda on a rank-one lattice")
        return zeros(n, n)
    try:
        sol = solve_integer(rows, rhs, len(pairs))
    except NoSolution:
        raise NoSkewLambda("no skew-symmetric integer lambda is compatible with beta") from None
    L = [[0] * n for _ in range(n)]
    for (i, j), v in zip(pairs, sol):
        L[i][j] = v
        L[j][i] = -v
    return as_matrix(L)


def quantize(seed: Seed) -> Seed:
    """The seed with a compatible lambda attached."""
    _, lam = find_retraction(seed)
    return seed.with_lambda(transpose(lam.matrix, seed.n))


def fundamental_group(seed: Seed) -> dict:
    """Cokernel of beta: torsion invariants and free rank."""
    bt = transpose(seed.B, seed.n)
    facs = invariant_factors(bt, seed.m)
    return {"torsion": [d for d in facs if d > 1], "free_rank": seed.n - len(facs)}


# ---------------------------------------------------------------------------
# random seeds


def random_skew(rng: random.Random, m: int, bound: int) -> list[list[int]]:
    B = [[0] * m for _ in range(m)]
    for i in range(m):
        for j in range(i + 1, m):
            x = rng.randint(-bound, bound)
            B[i][j], B[j][i] = x, -x
    return B


def random_seed(
    rng: random.Random,
    mutable: int,
    frozen: int,
    bound: int = 3,
    quantum: bool = True,
    tries: int = 200,
    prefix: str = "x",
) -> Seed:
    """A random valid seed with a skew principal part.

    Quantum seeds are found by rejection: the frozen columns are drawn at
    random until a compatible skew lambda exists.  When that fails
    repeatedly the principal-coefficient construction is used, padded or
    truncated to the requested frozen count when possible.
    """
    n = mutable + frozen
    labels = [f"{prefix}{i + 1}" for i in range(n)]
    ex = labels[:mutable]
    for _ in range(tries):
        B0 = random_skew(rng, mutable, bound)
        rows = [B0[i] + [rng.randint(-bound, bound) for _ in range(frozen)] for i in range(mutable)]
        seed = Seed.build(labels, ex, rows)
        if not quantum:
            return seed
        try:
            return quantize(seed)
        except (NoRetraction, NoSkewLambda):
            continue
    if frozen < mutable:
        raise SeedError("could not find a compatible quantum seed")
    return principal_seed(random_skew(rng, mutable, bound), frozen - mutable, prefix)


def principal_seed(B0: Sequence[Sequence[int]], extra: int = 0, prefix: str = "x") -> Seed:
    """Principal coefficients [B0 | I] with lambda [[0, I], [-I, B0^T]], plus inert frozen labels."""
    m = len(B0)
    n = 2 * m + extra
    labels = [f"{prefix}{i + 1}" for i in range(n)]
    rows = [list(B0[i]) + [1 if j == i else 0 for j in range(m)] + [0] * extra for i in range(m)]
    L = [[0] * n for _ in range(n)]
    for i in range(m):
        L[i][m + i] = 1
        L[m + i][i] = -1
        for j in range(m):
            L[m + i][m + j] = B0[j][i]
    seed = Seed.build(labels, labels[:m], rows, L)
    return seed


def random_basis_change(rng: random.Random, seed: Seed, steps: int = 4) -> Seed:
    """Apply a random unimodular change of the frozen labels, keeping the mutable block.

    T is unimodular with the exchangeable columns equal to unit vectors, so
    compatibility ``L B^T = E`` survives ``L -> T L T^T`` and ``B -> B T^{-1}``.
    """
    n = seed.n
    T = [list(r) for r in identity(n)]
    frozen = [seed.basis.index(f) for f in seed.frozen]
    allpos = list(range(n))
    for _ in range(steps):
        if not frozen:
            break
        i = rng.choice(frozen)
        j = rng.choice([p for p in allpos if p != i])
        c = rng.choice((-1, 1))
        # column operations on frozen columns keep T E = E
        for row in range(n):
            T[row][i] += c * T[row][j]
    T = as_matrix(T)
    Tinv = unimodular_inverse(T)
    B = matmul(seed.B, Tinv, n)
    L = matmul(matmul(T, seed.L, n), transpose(T, n), n) if seed.L is not None else None
    return Seed(seed.basis, seed.ex, B, L, seed.inv, seed.path)
