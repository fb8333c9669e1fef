"""Quantum tori over Z[s, 1/s], with s standing for a square root of q.

A torus is fixed by an ordered dual basis and the integer Gram matrix
``L[i][j] = <e_i, e_j>_lambda`` of its skew form.  Monomials multiply by

    x^v x^w = s^{<v, w>} x^{v + w}

Elements are immutable.  Internally an element is a dict sending an exponent
tuple to a dict ``{power of s: integer}``.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from .lattice import Basis, BasisMismatch, Label, LatticeElement, Matrix, as_matrix, is_skew, render_combination, zeros

Exponent = tuple[int, ...]


class NotDivisible(ArithmeticError):
    """The dividend is not a right multiple of the divisor."""


class MixedTorus(BasisMismatch):
    """Arithmetic between elements of different tori was attempted."""


# ---------------------------------------------------------------------------
# coefficients


def _clean(d: Mapping[int, int]) -> dict[int, int]:
    return {k: v for k, v in d.items() if v}


class QCoeff:
    """A Laurent polynomial in s with integer coefficients."""

    __slots__ = ("terms", "_hash")

    def __init__(self, terms: Mapping[int, int] | int = 0):
        if isinstance(terms, int):
            terms = {0: terms}
        self.terms = _clean(terms)
        self._hash = None

    @classmethod
    def s(cls, power: int = 1, coeff: int = 1) -> "QCoeff":
        return cls({power: coeff})

    def __add__(self, other: "QCoeff | int") -> "QCoeff":
        other = _coeff(other)
        out = dict(self.terms)
        for k, v in other.terms.items():
            out[k] = out.get(k, 0) + v
        return QCoeff(out)

    __radd__ = __add__

    def __neg__(self) -> "QCoeff":
        return QCoeff({k: -v for k, v in self.terms.items()})

    def __sub__(self, other: "QCoeff | int") -> "QCoeff":
        return self + (-_coeff(other))

    def __mul__(self, other: "QCoeff | int") -> "QCoeff":
        other = _coeff(other)
        out: dict[int, int] = {}
        for a, x in self.terms.items():
            for b, y in other.terms.items():
                out[a + b] = out.get(a + b, 0) + x * y
        return QCoeff(out)

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "QCoeff":
        if n < 0:
            if not self.is_unit():
                raise NotDivisible("only units have negative powers")
            (k, v), = self.terms.items()
            return QCoeff({-k * -n: v ** -n})
        out = QCoeff(1)
        for _ in range(n):
            out = out * self
        return out

    def __eq__(self, other: object) -> bool:
        if isinstance(other, int):
            other = QCoeff(other)
        if not isinstance(other, QCoeff):
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(frozenset(self.terms.items()))
        return self._hash

    def __bool__(self) -> bool:
        return bool(self.terms)

    def is_unit(self) -> bool:
        return len(self.terms) == 1 and abs(next(iter(self.terms.values()))) == 1

    def at_one(self) -> int:
        return sum(self.terms.values())

    def exact_div(self, other: "QCoeff") -> "QCoeff":
        return QCoeff(_laurent_div(self.terms, other.terms))

    def __repr__(self) -> str:
        return f"QCoeff({self})"

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for k in sorted(self.terms, reverse=True):
            v = self.terms[k]
            parts.append(f"{v}*s^{k}")
        return " + ".join(parts)


def _coeff(x: "QCoeff | int") -> QCoeff:
    return x if isinstance(x, QCoeff) else QCoeff(x)


def _laurent_div(num: Mapping[int, int], den: Mapping[int, int]) -> dict[int, int]:
    """Exact quotient of Laurent polynomials in s, or NotDivisible."""
    if not den:
        raise ZeroDivisionError("division by the zero coefficient")
    if not num:
        return {}
    if len(den) == 1:
        (k, v), = den.items()
        out = {}
        for a, x in num.items():
            if x % v:
                raise NotDivisible("coefficient not divisible")
            out[a - k] = x // v
        return out
    # long division from the top degree down
    rem = dict(num)
    dtop = max(den)
    dlead = den[dtop]
    dlow = min(den)
    nlow = min(num)
    out: dict[int, int] = {}
    while rem:
        top = max(rem)
        if top - dtop < nlow - dlow:
            raise NotDivisible("coefficient not divisible")
        c = rem[top]
        if c % dlead:
            raise NotDivisible("coefficient not divisible")
        q = c // dlead
        shift = top - dtop
        out[shift] = q
        for k, v in den.items():
            rem[k + shift] = rem.get(k + shift, 0) - q * v
            if not rem[k + shift]:
                del rem[k + shift]
    return out


# ---------------------------------------------------------------------------
# tori


@dataclass(frozen=True)
class QuantumTorus:
    """The twisted group algebra of Z[basis] with skew form ``gram``.

    The basis order is the enumeration used for symmetrization scalars and
    for printing.  A zero Gram matrix gives the commutative Laurent ring.
    """

    basis: Basis
    gram: Matrix
    _key: tuple = field(default=None, compare=False, hash=False, repr=False)

    def __post_init__(self) -> None:
        gram = as_matrix(self.gram)
        object.__setattr__(self, "gram", gram)
        if len(gram) != len(self.basis) or not is_skew(gram):
            raise ValueError("torus form must be a skew-symmetric square matrix over the basis")
        object.__setattr__(self, "_key", (self.basis.labels, gram))

    @classmethod
    def commutative(cls, basis: Basis) -> "QuantumTorus":
        return cls(basis, zeros(len(basis), len(basis)))

    @property
    def rank(self) -> int:
        return len(self.basis)

    def is_commutative(self) -> bool:
        return not any(any(r) for r in self.gram)

    def specialized(self) -> "QuantumTorus":
        return QuantumTorus.commutative(self.basis)

    def form(self, v: Sequence[int], w: Sequence[int]) -> int:
        total = 0
        for i, vi in enumerate(v):
            if vi:
                row = self.gram[i]
                total += vi * sum(row[j] * wj for j, wj in enumerate(w) if wj)
        return total

    def row_form(self, v: Sequence[int]) -> tuple[int, ...]:
        """The covector v L, so that form(v, w) = row_form(v) . w."""
        n = self.rank
        out = [0] * n
        for i, vi in enumerate(v):
            if vi:
                row = self.gram[i]
                for j in range(n):
                    if row[j]:
                        out[j] += vi * row[j]
        return tuple(out)

    def exponent(self, v: LatticeElement | Sequence[int] | Mapping[Label, int]) -> Exponent:
        if isinstance(v, LatticeElement):
            if v.basis != self.basis:
                raise BasisMismatch("exponent outside the torus lattice")
            return v.vector()
        if isinstance(v, Mapping):
            return LatticeElement.build(self.basis, v).vector()
        v = tuple(int(x) for x in v)
        if len(v) != self.rank:
            raise BasisMismatch("exponent has the wrong length")
        return v

    def x(self, v, coeff: QCoeff | int = 1) -> "QLaurent":
        """The monomial coeff * x^v."""
        c = _coeff(coeff)
        if not c:
            return self.zero()
        return QLaurent(self, {self.exponent(v): c.terms})

    def one(self) -> "QLaurent":
        return self.x((0,) * self.rank)

    def zero(self) -> "QLaurent":
        return QLaurent(self, {})

    def gen(self, i: int) -> "QLaurent":
        e = [0] * self.rank
        e[i] = 1
        return self.x(e)

    def render_exponent(self, e: Exponent) -> str:
        return "x[" + render_combination((str(lab), c) for lab, c in zip(self.basis.labels, e) if c) + "]"


def omega(v, w, torus: QuantumTorus) -> QCoeff:
    """The bicharacter s^{<v, w>}."""
    return QCoeff.s(torus.form(torus.exponent(v), torus.exponent(w)))


def sym_scalar(v, torus: QuantumTorus) -> QCoeff:
    """Product over i < j of omega(e_i, e_j)^(-v_i v_j) in the torus enumeration."""
    return QCoeff.s(sym_power(torus.exponent(v), torus.gram))


def sym_power(v: Sequence[int], gram: Matrix) -> int:
    n = len(v)
    total = 0
    for i in range(n):
        if v[i]:
            row = gram[i]
            for j in range(i + 1, n):
                if v[j] and row[j]:
                    total += v[i] * v[j] * row[j]
    return -total


# ---------------------------------------------------------------------------
# elements


class QLaurent:
    """An element of a quantum torus: a finite sum of c(s) x^v."""

    __slots__ = ("torus", "terms", "_hash")

    def __init__(self, torus: QuantumTorus, terms: Mapping[Exponent, Mapping[int, int]]):
        self.torus = torus
        clean = {}
        for e, c in terms.items():
            cc = _clean(c)
            if cc:
                clean[e] = cc
        self.terms = clean
        self._hash = None

    # -- basic protocol

    def _check(self, other: "QLaurent") -> None:
        if self.torus is not other.torus and self.torus != other.torus:
            raise MixedTorus("elements of different quantum tori")

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, QLaurent):
            return NotImplemented
        return (self.torus is other.torus or self.torus == other.torus) and self.terms == other.terms

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(frozenset((e, frozenset(c.items())) for e, c in self.terms.items()))
        return self._hash

    def __bool__(self) -> bool:
        return bool(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def is_monomial(self) -> bool:
        return len(self.terms) == 1

    def coefficient(self, v) -> QCoeff:
        return QCoeff(self.terms.get(self.torus.exponent(v), {}))

    def support(self) -> list[Exponent]:
        return sorted(self.terms, key=term_key, reverse=True)

    def __len__(self) -> int:
        return sum(len(c) for c in self.terms.values())

    # -- ring operations

    def __add__(self, other: "QLaurent") -> "QLaurent":
        self._check(other)
        out = {e: dict(c) for e, c in self.terms.items()}
        for e, c in other.terms.items():
            d = out.setdefault(e, {})
            for k, v in c.items():
                d[k] = d.get(k, 0) + v
        return QLaurent(self.torus, out)

    def __neg__(self) -> "QLaurent":
        return QLaurent(self.torus, {e: {k: -v for k, v in c.items()} for e, c in self.terms.items()})

    def __sub__(self, other: "QLaurent") -> "QLaurent":
        return self + (-other)

    def scale(self, c: QCoeff | int) -> "QLaurent":
        c = _coeff(c)
        out = {}
        for e, d in self.terms.items():
            nd: dict[int, int] = {}
            for a, x in d.items():
                for b, y in c.terms.items():
                    nd[a + b] = nd.get(a + b, 0) + x * y
            out[e] = nd
        return QLaurent(self.torus, out)

    def __mul__(self, other: "QLaurent") -> "QLaurent":
        if isinstance(other, (int, QCoeff)):
            return self.scale(other)
        return mul(self, other)

    def __rmul__(self, other: QCoeff | int) -> "QLaurent":
        return self.scale(other)

    def __pow__(self, n: int) -> "QLaurent":
        if n < 0:
            if not self.is_monomial():
                raise NotDivisible("only monomials are invertible here")
            return self.monomial_inverse() ** (-n)
        out = self.torus.one()
        for _ in range(n):
            out = out * self
        return out

    def monomial_inverse(self) -> "QLaurent":
        (e, c), = self.terms.items()
        q = QCoeff(c)
        if not q.is_unit():
            raise NotDivisible("monomial coefficient is not a unit")
        (k, v), = q.terms.items()
        neg = tuple(-x for x in e)
        return QLaurent(self.torus, {neg: {-k: v}})

    def specialize(self) -> "QLaurent":
        return specialize_commutative(self)

    def __repr__(self) -> str:
        return f"QLaurent({self})"

    def __str__(self) -> str:
        return render(self)


def term_key(e: Exponent) -> tuple:
    """Total degree first, then lexicographic in the torus enumeration."""
    return (sum(e), e)


def mul(f: QLaurent, g: QLaurent) -> QLaurent:
    f._check(g)
    torus = f.torus
    commutative = torus.is_commutative()
    out: dict[Exponent, dict[int, int]] = {}
    gitems = list(g.terms.items())
    for e1, c1 in f.terms.items():
        row = None if commutative else torus.row_form(e1)
        for e2, c2 in gitems:
            shift = 0 if row is None else sum(r * y for r, y in zip(row, e2) if r and y)
            e = tuple(a + b for a, b in zip(e1, e2))
            d = out.get(e)
            if d is None:
                d = out[e] = {}
            for a, x in c1.items():
                for b, y in c2.items():
                    k = a + b + shift
                    d[k] = d.get(k, 0) + x * y
    return QLaurent(torus, out)


def ordered_monomial(v, torus: QuantumTorus) -> QLaurent:
    """The ordered product of the generator powers (x^{e_i})^{v_i}."""
    e = torus.exponent(v)
    out = torus.one()
    for i, vi in enumerate(e):
        if vi:
            unit = [0] * torus.rank
            unit[i] = vi
            out = out * torus.x(unit)
    return out


def exact_right_divide(f: QLaurent, g: QLaurent) -> QLaurent:
    """The unique h with h * g == f, or NotDivisible.

    Leading terms are eliminated under the order of ``term_key``.  The
    quotient's exponents must lie in the coordinate box spanned by the
    supports, which bounds the search.
    """
    f._check(g)
    if g.is_zero():
        raise ZeroDivisionError("division by zero")
    torus = f.torus
    if f.is_zero():
        return torus.zero()
    n = torus.rank
    if g.is_monomial():
        (ge, gc), = g.terms.items()
        gq = QCoeff(gc)
        row = torus.row_form(tuple(-x for x in ge))
        out = {}
        for e, c in f.terms.items():
            he = tuple(a - b for a, b in zip(e, ge))
            # (c' x^he) x^ge = c' s^{<he, ge>} x^e
            shift = torus.form(he, ge)
            q = QCoeff(c).exact_div(gq)
            out[he] = {k - shift: v for k, v in q.terms.items()}
        return QLaurent(torus, out)

    lo = [min(e[i] for e in f.terms) - min(e[i] for e in g.terms) for i in range(n)]
    hi = [max(e[i] for e in f.terms) - max(e[i] for e in g.terms) for i in range(n)]
    if any(a > b for a, b in zip(lo, hi)):
        raise NotDivisible("support box of the quotient is empty")
    glead = max(g.terms, key=term_key)
    gcoef = g.terms[glead]
    gitems = list(g.terms.items())

    rem = {e: dict(c) for e, c in f.terms.items()}
    heap = [(_neg_key(e), e) for e in rem]
    heapq.heapify(heap)
    quotient: dict[Exponent, dict[int, int]] = {}
    while heap:
        _, e = heapq.heappop(heap)
        c = rem.get(e)
        if not c:
            continue
        he = tuple(a - b for a, b in zip(e, glead))
        if any(x < l or x > h for x, l, h in zip(he, lo, hi)):
            raise NotDivisible("leading term leaves the support box")
        shift = torus.form(he, glead)
        q = _laurent_div(c, gcoef)
        q = {k - shift: v for k, v in q.items()}
        quotient[he] = q
        row = torus.row_form(he)
        for e2, c2 in gitems:
            s2 = sum(r * y for r, y in zip(row, e2) if r and y)
            t = tuple(a + b for a, b in zip(he, e2))
            d = rem.get(t)
            if d is None:
                d = rem[t] = {}
                heapq.heappush(heap, (_neg_key(t), t))
            for a, x in q.items():
                for b, y in c2.items():
                    k = a + b + s2
                    val = d.get(k, 0) - x * y
                    if val:
                        d[k] = val
                    else:
                        d.pop(k, None)
            if not d:
                del rem[t]
        if e in rem:
            raise NotDivisible("remainder does not cancel")
    return QLaurent(torus, quotient)


def _neg_key(e: Exponent) -> tuple:
    return (-sum(e), tuple(-x for x in e))


def exact_left_divide(f: QLaurent, g: QLaurent) -> QLaurent:
    """The unique h with g * h == f, via the anti-automorphism x^v -> x^v, s -> 1/s."""
    return _bar(exact_right_divide(_bar(f), _bar(g)))


def _bar(f: QLaurent) -> QLaurent:
    # x^v x^w = s^{<v,w>} x^{v+w} and <w,v> = -<v,w>, so reversing products
    # corresponds to inverting s.
    return QLaurent(f.torus, {e: {-k: v for k, v in c.items()} for e, c in f.terms.items()})


def specialize_commutative(f: QLaurent) -> QLaurent:
    """Evaluate every coefficient at s = 1; the result lives in the commutative torus."""
    torus = f.torus.specialized()
    return QLaurent(torus, {e: {0: sum(c.values())} for e, c in f.terms.items()})


def change_torus(f: QLaurent, torus: QuantumTorus) -> QLaurent:
    """Reinterpret the coefficients of f in another torus over the same basis."""
    if torus.basis != f.torus.basis:
        raise BasisMismatch("tori have different bases")
    return QLaurent(torus, f.terms)


def render(f: QLaurent) -> str:
    """Deterministic text: terms as ``[c*]s^k * x[...]`` joined by `` + ``."""
    if f.is_zero():
        return "0"
    parts = []
    for e in sorted(f.terms, key=term_key, reverse=True):
        c = f.terms[e]
        mono = f.torus.render_exponent(e)
        for k in sorted(c, reverse=True):
            v = c[k]
            prefix = "" if v == 1 else ("-" if v == -1 else f"{v}*")
            parts.append(f"{prefix}s^{k} * {mono}")
    return " + ".join(parts)


def apply_lattice_map(f: QLaurent, target: QuantumTorus, images: Sequence[Sequence[int]]) -> QLaurent:
    """Send x^v to x^{A v} where ``images[i]`` is the image of the i-th basis vector."""
    out: dict[Exponent, dict[int, int]] = {}
    m = target.rank
    for e, c in f.terms.items():
        t = [0] * m
        for i, x in enumerate(e):
            if x:
                col = images[i]
                for j in range(m):
                    t[j] += x * col[j]
        d = out.setdefault(tuple(t), {})
        for k, v in c.items():
            d[k] = d.get(k, 0) + v
    return QLaurent(target, out)


def from_terms(torus: QuantumTorus, items: Iterable[tuple[Sequence[int], int, int]]) -> QLaurent:
    """Build from ``(exponent, power of s, integer)`` triples."""
    out: dict[Exponent, dict[int, int]] = {}
    for e, k, v in items:
        d = out.setdefault(torus.exponent(e), {})
        d[k] = d.get(k, 0) + v
    return QLaurent(torus, out)
