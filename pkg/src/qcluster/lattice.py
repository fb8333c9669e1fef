"""Labeled free abelian groups, their duals, integer-linear maps and pairings.

Everything here is exact: coefficients are Python integers, matrices are
tuples of tuples of integers (rows indexed by the codomain).  The Smith
normal form routine at the bottom drives kernels, radicals, invariant
factors and integer linear solves for the rest of the package.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

Matrix = tuple[tuple[int, ...], ...]


class BasisMismatch(ValueError):
    """Raised when two lattice objects live over incompatible bases."""


class NoSolution(ValueError):
    """Raised when an integer linear system has no integer solution."""


# ---------------------------------------------------------------------------
# labels and bases


@dataclass(frozen=True, order=True)
class Label:
    text: str
    dual: bool = False

    def __post_init__(self) -> None:
        if not self.text:
            raise ValueError("label text must be nonempty")

    def toggled(self) -> "Label":
        return Label(self.text, not self.dual)

    def __str__(self) -> str:
        return self.text + ("*" if self.dual else "")

    @staticmethod
    def parse(text: str) -> "Label":
        if text.endswith("*"):
            return Label(text[:-1], True)
        return Label(text, False)


@dataclass(frozen=True)
class Basis:
    """An ordered finite basis; the order is the enumeration used for monomials."""

    labels: tuple[Label, ...]
    _index: dict = field(default=None, compare=False, hash=False, repr=False)

    def __post_init__(self) -> None:
        labels = tuple(self.labels)
        object.__setattr__(self, "labels", labels)
        index = {lab: i for i, lab in enumerate(labels)}
        if len(index) != len(labels):
            raise ValueError("duplicate labels in basis")
        object.__setattr__(self, "_index", index)

    @classmethod
    def of(cls, names: Iterable[str], dual: bool = False) -> "Basis":
        return cls(tuple(Label(n, dual) for n in names))

    def __len__(self) -> int:
        return len(self.labels)

    def __iter__(self):
        return iter(self.labels)

    def __contains__(self, lab: object) -> bool:
        return lab in self._index

    def index(self, lab: Label) -> int:
        try:
            return self._index[lab]
        except KeyError:
            raise BasisMismatch(f"label {lab} not in basis") from None

    def dual(self) -> "Basis":
        return Basis(tuple(lab.toggled() for lab in self.labels))

    def element(self, coords: Mapping[Label, int] | Sequence[int]) -> "LatticeElement":
        return LatticeElement.build(self, coords)

    def zero(self) -> "LatticeElement":
        return LatticeElement(self, {})

    def basis_vector(self, lab: Label | str) -> "LatticeElement":
        if isinstance(lab, str):
            lab = Label.parse(lab)
        self.index(lab)
        return LatticeElement(self, {lab: 1})


# ---------------------------------------------------------------------------
# elements


class LatticeElement:
    """A finite integer combination of basis labels.  Zero coefficients are dropped."""

    __slots__ = ("basis", "coords", "_hash")

    def __init__(self, basis: Basis, coords: Mapping[Label, int]):
        self.basis = basis
        self.coords = {lab: int(c) for lab, c in coords.items() if c}
        for lab in self.coords:
            if lab not in basis:
                raise BasisMismatch(f"label {lab} not in basis")
        self._hash = None

    @classmethod
    def build(cls, basis: Basis, coords: Mapping[Label, int] | Sequence[int]) -> "LatticeElement":
        if isinstance(coords, Mapping):
            return cls(basis, coords)
        if len(coords) != len(basis):
            raise BasisMismatch("coordinate vector has the wrong length")
        return cls(basis, {lab: c for lab, c in zip(basis.labels, coords)})

    def vector(self) -> tuple[int, ...]:
        return tuple(self.coords.get(lab, 0) for lab in self.basis.labels)

    def __getitem__(self, lab: Label) -> int:
        return self.coords.get(lab, 0)

    def _check(self, other: "LatticeElement") -> None:
        if self.basis != other.basis:
            raise BasisMismatch("elements over different bases")

    def __add__(self, other: "LatticeElement") -> "LatticeElement":
        self._check(other)
        out = dict(self.coords)
        for lab, c in other.coords.items():
            out[lab] = out.get(lab, 0) + c
        return LatticeElement(self.basis, out)

    def __neg__(self) -> "LatticeElement":
        return LatticeElement(self.basis, {lab: -c for lab, c in self.coords.items()})

    def __sub__(self, other: "LatticeElement") -> "LatticeElement":
        return self + (-other)

    def __rmul__(self, n: int) -> "LatticeElement":
        return LatticeElement(self.basis, {lab: n * c for lab, c in self.coords.items()})

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, LatticeElement):
            return NotImplemented
        return self.basis == other.basis and self.coords == other.coords

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.basis.labels, frozenset(self.coords.items())))
        return self._hash

    def is_zero(self) -> bool:
        return not self.coords

    def __repr__(self) -> str:
        return f"LatticeElement({self})"

    def __str__(self) -> str:
        return render_combination((str(lab), self.coords[lab]) for lab in self.basis.labels if lab in self.coords)


def render_combination(items: Iterable[tuple[str, int]]) -> str:
    """Render ``[("a*", 2), ("b*", -1)]`` as ``2a*-b*``; the empty sum is ``0``."""
    out = ""
    for name, c in items:
        if c == 1:
            term = name
        elif c == -1:
            term = "-" + name
        else:
            term = f"{c}{name}"
        if out and not term.startswith("-"):
            out += "+"
        out += term
    return out or "0"


def eval_pairing(f: LatticeElement, v: LatticeElement) -> int:
    """The evaluation form: sum over b of f(b*) * v(b)."""
    if f.basis != v.basis.dual():
        raise BasisMismatch("evaluation needs an element of the dual basis")
    return sum(c * v.coords.get(lab.toggled(), 0) for lab, c in f.coords.items())


def pos_neg_parts(v: LatticeElement) -> tuple[LatticeElement, LatticeElement]:
    pos = {lab: c for lab, c in v.coords.items() if c > 0}
    neg = {lab: -c for lab, c in v.coords.items() if c < 0}
    return LatticeElement(v.basis, pos), LatticeElement(v.basis, neg)


def pos_part(n: int) -> int:
    return n if n > 0 else 0


def neg_part(n: int) -> int:
    return -n if n < 0 else 0


# ---------------------------------------------------------------------------
# integer matrices


def as_matrix(rows: Iterable[Iterable[int]]) -> Matrix:
    return tuple(tuple(int(x) for x in row) for row in rows)


def zeros(r: int, c: int) -> Matrix:
    return tuple((0,) * c for _ in range(r))


def identity(n: int) -> Matrix:
    return tuple(tuple(1 if i == j else 0 for j in range(n)) for i in range(n))


def transpose(m: Matrix, ncols: int | None = None) -> Matrix:
    r = len(m)
    c = len(m[0]) if r else (ncols or 0)
    return tuple(tuple(m[i][j] for i in range(r)) for j in range(c))


def matmul(a: Matrix, b: Matrix, cols: int | None = None) -> Matrix:
    """Product of an r x n and an n x c matrix.  Pass ``cols`` when n == 0."""
    if not a:
        return ()
    n = len(a[0])
    if n == 0:
        return zeros(len(a), cols if cols is not None else (len(b[0]) if b else 0))
    if len(b) != n:
        raise BasisMismatch("matrix shapes do not compose")
    bt = list(zip(*b))
    if not bt:
        return tuple(() for _ in a)
    return tuple(tuple(sum(x * y for x, y in zip(row, col) if x) for col in bt) for row in a)


def matvec(a: Matrix, v: Sequence[int]) -> tuple[int, ...]:
    return tuple(sum(x * y for x, y in zip(row, v) if x) for row in a)


def neg_matrix(m: Matrix) -> Matrix:
    return tuple(tuple(-x for x in row) for row in m)


def is_skew(m: Matrix) -> bool:
    n = len(m)
    return all(len(row) == n for row in m) and all(m[i][j] == -m[j][i] for i in range(n) for j in range(i, n))


def shape(m: Matrix, ncols: int = 0) -> tuple[int, int]:
    return len(m), (len(m[0]) if m else ncols)


# ---------------------------------------------------------------------------
# Smith normal form


def smith_normal_form(m: Sequence[Sequence[int]], ncols: int | None = None) -> tuple[Matrix, Matrix, Matrix]:
    """Return ``(U, D, V)`` with ``U @ m @ V == D`` and U, V unimodular.

    D is diagonal with nonnegative entries d1 | d2 | ...; zero entries come last.
    ``ncols`` is only needed when m has no rows.
    """
    rows = len(m)
    cols = len(m[0]) if rows else (ncols or 0)
    a = [list(r) for r in m]
    u = [[1 if i == j else 0 for j in range(rows)] for i in range(rows)]
    v = [[1 if i == j else 0 for j in range(cols)] for i in range(cols)]

    def swap_rows(i: int, j: int) -> None:
        a[i], a[j] = a[j], a[i]
        u[i], u[j] = u[j], u[i]

    def swap_cols(i: int, j: int) -> None:
        for row in a:
            row[i], row[j] = row[j], row[i]
        for row in v:
            row[i], row[j] = row[j], row[i]

    def add_row(dst: int, src: int, q: int) -> None:
        # row dst += q * row src
        ra, rs = a[dst], a[src]
        for k in range(cols):
            if rs[k]:
                ra[k] += q * rs[k]
        ua, us = u[dst], u[src]
        for k in range(rows):
            if us[k]:
                ua[k] += q * us[k]

    def add_col(dst: int, src: int, q: int) -> None:
        for row in a:
            if row[src]:
                row[dst] += q * row[src]
        for row in v:
            if row[src]:
                row[dst] += q * row[src]

    t = 0
    while t < min(rows, cols):
        while True:
            best = None
            for i in range(t, rows):
                for j in range(t, cols):
                    x = a[i][j]
                    if x and (best is None or abs(x) < best[0]):
                        best = (abs(x), i, j)
            if best is None:
                break
            _, i, j = best
            if i != t:
                swap_rows(t, i)
            if j != t:
                swap_cols(t, j)
            p = a[t][t]
            clean = True
            for i in range(t + 1, rows):
                if a[i][t]:
                    add_row(i, t, -(a[i][t] // p))
                    clean = clean and a[i][t] == 0
            for j in range(t + 1, cols):
                if a[t][j]:
                    add_col(j, t, -(a[t][j] // p))
                    clean = clean and a[t][j] == 0
            if not clean:
                continue
            bad = next(
                (i for i in range(t + 1, rows) for j in range(t + 1, cols) if a[i][j] % p),
                None,
            )
            if bad is None:
                break
            add_row(t, bad, 1)
        if t >= rows or t >= cols or a[t][t] == 0:
            break
        if a[t][t] < 0:
            a[t] = [-x for x in a[t]]
            u[t] = [-x for x in u[t]]
        t += 1
    return as_matrix(u), as_matrix(a), as_matrix(v)


def diagonal_of(d: Matrix) -> list[int]:
    return [d[i][i] for i in range(min(len(d), len(d[0]) if d else 0))]


def invariant_factors(m: Sequence[Sequence[int]], ncols: int | None = None) -> list[int]:
    """Nonzero invariant factors d1 | d2 | ... of an integer matrix."""
    _, d, _ = smith_normal_form(m, ncols)
    return [x for x in diagonal_of(d) if x]


def rank(m: Sequence[Sequence[int]], ncols: int | None = None) -> int:
    return len(invariant_factors(m, ncols))


def integer_kernel(m: Sequence[Sequence[int]], ncols: int | None = None) -> list[tuple[int, ...]]:
    """A basis of {x : m x = 0} over Z.  The span is saturated."""
    cols = len(m[0]) if m else (ncols or 0)
    _, d, v = smith_normal_form(m, cols)
    r = len([x for x in diagonal_of(d) if x])
    return [tuple(v[i][j] for i in range(cols)) for j in range(r, cols)]


def solve_integer(a: Sequence[Sequence[int]], y: Sequence[int], ncols: int | None = None) -> tuple[int, ...]:
    """One integer solution x of a x = y, or NoSolution."""
    rows = len(a)
    cols = len(a[0]) if rows else (ncols or 0)
    u, d, v = smith_normal_form(a, cols)
    uy = matvec(u, y)
    diag = diagonal_of(d)
    z = [0] * cols
    for i in range(rows):
        di = diag[i] if i < len(diag) else 0
        if di == 0:
            if uy[i]:
                raise NoSolution("inconsistent integer system")
        else:
            if uy[i] % di:
                raise NoSolution("system has rational but no integer solutions")
            z[i] = uy[i] // di
    return matvec(v, z)


def unimodular_inverse(m: Matrix) -> Matrix:
    """Inverse of a square integer matrix with determinant +-1."""
    n = len(m)
    u, d, v = smith_normal_form(m, n)
    if any(d[i][i] != 1 for i in range(n)):
        raise NoSolution("matrix is not invertible over Z")
    return matmul(v, u)


def is_unimodular(m: Matrix) -> bool:
    n = len(m)
    if any(len(r) != n for r in m):
        return False
    return invariant_factors(m, n) == [1] * n


# ---------------------------------------------------------------------------
# linear maps


class LinearMap:
    """An integer-linear map between labeled lattices.

    ``matrix[i][j]`` is the coefficient of ``codomain.labels[i]`` in the image
    of ``domain.labels[j]``.
    """

    __slots__ = ("domain", "codomain", "matrix")

    def __init__(self, domain: Basis, codomain: Basis, matrix: Iterable[Iterable[int]]):
        self.domain = domain
        self.codomain = codomain
        self.matrix = as_matrix(matrix)
        if len(self.matrix) != len(codomain) or any(len(r) != len(domain) for r in self.matrix):
            raise BasisMismatch("matrix shape does not match the bases")

    @classmethod
    def from_columns(cls, domain: Basis, codomain: Basis, columns: Mapping[Label, LatticeElement]) -> "LinearMap":
        cols = []
        for lab in domain.labels:
            img = columns.get(lab, codomain.zero())
            if img.basis != codomain:
                raise BasisMismatch("column outside the codomain lattice")
            cols.append(img.vector())
        rows = [tuple(col[i] for col in cols) for i in range(len(codomain))]
        return cls(domain, codomain, rows)

    @classmethod
    def identity(cls, basis: Basis) -> "LinearMap":
        return cls(basis, basis, identity(len(basis)))

    @classmethod
    def zero(cls, domain: Basis, codomain: Basis) -> "LinearMap":
        return cls(domain, codomain, zeros(len(codomain), len(domain)))

    def column(self, lab: Label) -> LatticeElement:
        j = self.domain.index(lab)
        return LatticeElement.build(self.codomain, [row[j] for row in self.matrix])

    @property
    def columns(self) -> dict[Label, LatticeElement]:
        return {lab: self.column(lab) for lab in self.domain.labels}

    def __call__(self, v: LatticeElement) -> LatticeElement:
        return map_apply(self, v)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, LinearMap):
            return NotImplemented
        return self.domain == other.domain and self.codomain == other.codomain and self.matrix == other.matrix

    def __hash__(self) -> int:
        return hash((self.domain.labels, self.codomain.labels, self.matrix))

    def __neg__(self) -> "LinearMap":
        return LinearMap(self.domain, self.codomain, neg_matrix(self.matrix))

    def __repr__(self) -> str:
        return f"LinearMap({len(self.domain)} -> {len(self.codomain)}, {self.matrix})"

    def is_injective(self) -> bool:
        return rank(self.matrix, len(self.domain)) == len(self.domain)


def map_apply(m: LinearMap, v: LatticeElement) -> LatticeElement:
    if v.basis != m.domain:
        raise BasisMismatch("element not in the domain of the map")
    return LatticeElement.build(m.codomain, matvec(m.matrix, v.vector()))


def map_compose(g: LinearMap, f: LinearMap) -> LinearMap:
    """g after f."""
    if f.codomain != g.domain:
        raise BasisMismatch("maps do not compose")
    if not len(f.domain) or not len(f.codomain) or not len(g.codomain):
        return LinearMap.zero(f.domain, g.codomain)
    return LinearMap(f.domain, g.codomain, matmul(g.matrix, f.matrix))


def map_dual(m: LinearMap) -> LinearMap:
    """The transpose, acting between the dual bases."""
    rows = [tuple(m.matrix[i][j] for i in range(len(m.codomain))) for j in range(len(m.domain))]
    return LinearMap(m.codomain.dual(), m.domain.dual(), rows)


def smith_invariants(m: LinearMap) -> list[int]:
    return invariant_factors(m.matrix, len(m.domain))


# ---------------------------------------------------------------------------
# bilinear forms


@dataclass(frozen=True)
class BilinearForm:
    """A form left x right -> Z given by its Gram matrix (rows: left basis)."""

    left: Basis
    right: Basis
    gram: Matrix

    def __post_init__(self) -> None:
        object.__setattr__(self, "gram", as_matrix(self.gram))
        if len(self.gram) != len(self.left) or any(len(r) != len(self.right) for r in self.gram):
            raise BasisMismatch("Gram matrix shape does not match the bases")

    def __call__(self, a: LatticeElement, b: LatticeElement) -> int:
        if a.basis != self.left or b.basis != self.right:
            raise BasisMismatch("arguments over the wrong bases")
        av, bv = a.vector(), b.vector()
        return sum(x * y for x, y in zip(av, matvec(self.gram, bv)) if x)

    def left_map(self) -> LinearMap:
        """delta_left: left -> right*, a |-> <a, ->."""
        return LinearMap(self.left, self.right.dual(), transpose(self.gram, len(self.right)))

    def right_map(self) -> LinearMap:
        """delta_right: right -> left*, b |-> <-, b>."""
        return LinearMap(self.right, self.left.dual(), self.gram)


def radicals(form: BilinearForm) -> tuple[list[LatticeElement], list[LatticeElement]]:
    """Saturated bases of the left radical Ker delta_left and the right radical."""
    gram = form.gram
    nl, nr = len(form.left), len(form.right)
    gt = transpose(gram, nr)
    left = [LatticeElement.build(form.left, k) for k in integer_kernel(gt, nl)]
    right = [LatticeElement.build(form.right, k) for k in integer_kernel(gram, nr)]
    return left, right


def in_span(vectors: Sequence[Sequence[int]], w: Sequence[int]) -> bool:
    """Whether w is an integer combination of the given vectors."""
    if not vectors:
        return not any(w)
    cols = tuple(tuple(vec[i] for vec in vectors) for i in range(len(w)))
    try:
        solve_integer(cols, w, len(vectors))
    except NoSolution:
        return False
    return True
