"""Morphisms of cluster structure truncations, products, coproducts and the extremal objects.

A morphism sends every signed arrow of the source to a path of signed
arrows in the target; the empty path means the arrow is contracted to an
identity.  Paths let mediating morphisms into products send one arrow to a
step in each factor.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .acs import SIGNS, AcsError, AcsTruncation, Arrow, verify_acs
from .lattice import (
    Basis,
    BilinearForm,
    Label,
    LinearMap,
    is_unimodular,
    map_compose,
    map_dual,
    unimodular_inverse,
)

SignedArrow = tuple[str, str]


class TruncationTooShallow(AcsError):
    """The target truncation does not contain the image of the source."""


@dataclass
class AcsMorphism:
    source: AcsTruncation
    target: AcsTruncation
    F_obj: dict[str, str]
    F_edge: dict[SignedArrow, tuple[SignedArrow, ...]]
    chi: dict[str, LinearMap]
    alpha: dict[str, LinearMap]


# ---------------------------------------------------------------------------
# helpers


def _identity_map(b: Basis) -> LinearMap:
    return LinearMap.identity(b)


def path_A(acs: AcsTruncation, start: str, path: Sequence[SignedArrow]) -> tuple[LinearMap, str]:
    """A(path): A start -> A end, composing the forward A maps."""
    out = _identity_map(acs.A[start])
    here = start
    for aid, sign in path:
        arr = acs.arrows.get(aid)
        if arr is None:
            raise TruncationTooShallow(f"arrow {aid} is not in the target truncation")
        if arr.source != here:
            raise AcsError(f"path is not composable at {aid}")
        out = map_compose(acs.A_maps[(aid, sign)], out)
        here = arr.target
    return out, here


def path_X(acs: AcsTruncation, start: str, path: Sequence[SignedArrow]) -> tuple[LinearMap, str]:
    """X(path): X end -> X start, composing the backward X maps."""
    here = start
    maps = []
    for aid, sign in path:
        arr = acs.arrows.get(aid)
        if arr is None:
            raise TruncationTooShallow(f"arrow {aid} is not in the target truncation")
        if arr.source != here:
            raise AcsError(f"path is not composable at {aid}")
        maps.append(acs.X_maps[(aid, sign)])
        here = arr.target
    out = _identity_map(acs.X[here])
    for m in reversed(maps):
        out = map_compose(m, out)
    return out, here


def _violation(check: str, where: str, detail: str = "") -> dict:
    return {"check": check, "where": where, "detail": detail}


def _canform(acs: AcsTruncation, v: str) -> LinearMap:
    """x -> <lambda(-), beta(x)> as a map X -> A*."""
    return map_compose(map_dual(acs.lam[v]), acs.beta[v])


def _pairing_map(acs: AcsTruncation, v: str) -> LinearMap:
    return acs.pairing[v].right_map()


# ---------------------------------------------------------------------------
# verification


def verify_morphism(m: AcsMorphism, quantum: bool | None = None) -> dict:
    """Check functoriality, both naturality squares, (q) and, when quantum, (r)."""
    s, t = m.source, m.target
    if quantum is None:
        quantum = s.is_quantum and t.is_quantum
    if quantum and not (s.is_quantum and t.is_quantum):
        raise AcsError("quantum verification needs lambda on both sides")
    out: list[dict] = []
    info: list[dict] = []
    for c in s.vertices:
        Fc = m.F_obj.get(c)
        if Fc is None:
            out.append(_violation("object map", c, "vertex has no image"))
            continue
        if Fc not in t.X:
            raise TruncationTooShallow(f"image {Fc} of {c} is not in the target truncation")
        chi, alpha = m.chi.get(c), m.alpha.get(c)
        if chi is None or alpha is None:
            out.append(_violation("components", c, "missing chi or alpha"))
            continue
        if chi.domain != s.X[c] or chi.codomain != t.X[Fc] or alpha.domain != s.A[c] or alpha.codomain != t.A[Fc]:
            out.append(_violation("components", c, "component bases do not match"))
            continue
        # (q) alpha o beta_1 = beta_2 o chi
        if map_compose(alpha, s.beta[c]) != map_compose(t.beta[Fc], chi):
            out.append(_violation("(q)", c, "alpha o beta1 != beta2 o chi"))
        if quantum:
            pulled = map_compose(map_dual(alpha), map_compose(t.lam[Fc], alpha))
            if pulled != s.lam[c]:
                out.append(_violation("(r)", c, "lambda1 != alpha* o lambda2 o alpha"))
            same = map_compose(map_dual(alpha), map_compose(_canform(t, Fc), chi)) == _canform(s, c)
            info.append({"check": "canonical form preserved", "where": c, "holds": same})
        else:
            same = map_compose(map_dual(alpha), map_compose(_pairing_map(t, Fc), chi)) == _pairing_map(s, c)
            info.append({"check": "evaluation pairing preserved", "where": c, "holds": same})
    if out and any(v["check"] in ("object map", "components") for v in out):
        return {"ok": False, "violations": out, "info": info}
    for arr in s.arrows.values():
        c, d = arr.source, arr.target
        for sign in SIGNS:
            where = f"{arr.id}[{sign}]"
            path = m.F_edge.get((arr.id, sign))
            if path is None:
                out.append(_violation("edge map", where, "signed arrow has no image"))
                continue
            A2, end = path_A(t, m.F_obj[c], path)
            X2, _ = path_X(t, m.F_obj[c], path)
            if end != m.F_obj[d]:
                out.append(_violation("functor", where, f"image path ends at {end}, not {m.F_obj[d]}"))
                continue
            # chi_c o X1 f = X2(F f) o chi_d
            if map_compose(m.chi[c], s.X_maps[(arr.id, sign)]) != map_compose(X2, m.chi[d]):
                out.append(_violation("chi natural", where))
            # alpha_d o A1 f = A2(F f) o alpha_c
            if map_compose(m.alpha[d], s.A_maps[(arr.id, sign)]) != map_compose(A2, m.alpha[c]):
                out.append(_violation("alpha natural", where))
            # the functor must respect the digon relations of the source
            if arr.reverse is not None:
                back = m.F_edge.get((arr.reverse, "-" if sign == "+" else "+"))
                if back is not None:
                    loop = tuple(path) + tuple(back)
                    Aloop, endl = path_A(t, m.F_obj[c], loop)
                    Xloop, _ = path_X(t, m.F_obj[c], loop)
                    if endl != m.F_obj[c] or Aloop != _identity_map(t.A[m.F_obj[c]]) or Xloop != _identity_map(t.X[m.F_obj[c]]):
                        out.append(_violation("functor relations", where, "image of a digon is not an identity"))
    return {"ok": not out, "violations": out, "info": info}


# ---------------------------------------------------------------------------
# composition and isomorphisms


def identity_morphism(acs: AcsTruncation) -> AcsMorphism:
    return AcsMorphism(
        acs,
        acs,
        {v: v for v in acs.vertices},
        {(a, sg): ((a, sg),) for a in acs.arrows for sg in SIGNS},
        {v: _identity_map(acs.X[v]) for v in acs.vertices},
        {v: _identity_map(acs.A[v]) for v in acs.vertices},
    )


def compose(g: AcsMorphism, f: AcsMorphism) -> AcsMorphism:
    """g after f."""
    if f.target is not g.source and f.target.vertices != g.source.vertices:
        raise AcsError("morphisms do not compose")
    F_obj = {c: g.F_obj[f.F_obj[c]] for c in f.source.vertices}
    F_edge = {}
    for key, path in f.F_edge.items():
        F_edge[key] = tuple(step for e in path for step in g.F_edge[e])
    chi = {c: map_compose(g.chi[f.F_obj[c]], f.chi[c]) for c in f.source.vertices}
    alpha = {c: map_compose(g.alpha[f.F_obj[c]], f.alpha[c]) for c in f.source.vertices}
    return AcsMorphism(f.source, g.target, F_obj, F_edge, chi, alpha)


def same_morphism(a: AcsMorphism, b: AcsMorphism) -> bool:
    return a.F_obj == b.F_obj and a.F_edge == b.F_edge and a.chi == b.chi and a.alpha == b.alpha


def is_isomorphism(m: AcsMorphism) -> bool:
    s, t = m.source, m.target
    if sorted(m.F_obj.values()) != sorted(t.vertices) or len(set(m.F_obj.values())) != len(s.vertices):
        return False
    images = []
    for key in ((a, sg) for a in s.arrows for sg in SIGNS):
        path = m.F_edge.get(key, ())
        if len(path) != 1:
            return False
        images.append(path[0])
    if sorted(images) != sorted((a, sg) for a in t.arrows for sg in SIGNS):
        return False
    for c in s.vertices:
        for comp in (m.chi[c], m.alpha[c]):
            if len(comp.domain) != len(comp.codomain):
                return False
            if len(comp.domain) and not is_unimodular(comp.matrix):
                return False
    return True


def _invert(mp: LinearMap) -> LinearMap:
    if not len(mp.domain):
        return LinearMap.zero(mp.codomain, mp.domain)
    return LinearMap(mp.codomain, mp.domain, unimodular_inverse(mp.matrix))


def inverse(m: AcsMorphism) -> AcsMorphism:
    if not is_isomorphism(m):
        raise AcsError("morphism is not an isomorphism")
    F_obj = {v: c for c, v in m.F_obj.items()}
    F_edge = {path[0]: (key,) for key, path in m.F_edge.items()}
    chi = {m.F_obj[c]: _invert(m.chi[c]) for c in m.source.vertices}
    alpha = {m.F_obj[c]: _invert(m.alpha[c]) for c in m.source.vertices}
    return AcsMorphism(m.target, m.source, F_obj, F_edge, chi, alpha)


# ---------------------------------------------------------------------------
# products


def _prefixed(b: Basis, tag: str) -> tuple[Label, ...]:
    return tuple(Label(f"{tag}:{lab.text}", lab.dual) for lab in b.labels)


def _sum_basis(b1: Basis, b2: Basis) -> Basis:
    return Basis(_prefixed(b1, "1") + _prefixed(b2, "2"))


def _block(m1, m2, dom: Basis, cod: Basis) -> LinearMap:
    r1, c1 = len(m1.codomain), len(m1.domain)
    r2, c2 = len(m2.codomain), len(m2.domain)
    rows = [tuple(m1.matrix[i]) + (0,) * c2 for i in range(r1)]
    rows += [(0,) * c1 + tuple(m2.matrix[i]) for i in range(r2)]
    return LinearMap(dom, cod, rows)


def _block_form(g1: BilinearForm, g2: BilinearForm, left: Basis, right: Basis) -> BilinearForm:
    r1, c1 = len(g1.left), len(g1.right)
    r2, c2 = len(g2.left), len(g2.right)
    rows = [tuple(g1.gram[i]) + (0,) * c2 for i in range(r1)]
    rows += [(0,) * c1 + tuple(g2.gram[i]) for i in range(r2)]
    return BilinearForm(left, right, rows)


def _projection(total: Basis, part: Basis, offset: int) -> LinearMap:
    rows = [tuple(1 if j == offset + i else 0 for j in range(len(total))) for i in range(len(part))]
    return LinearMap(total, part, rows)


def _stack(m1: LinearMap, m2: LinearMap, cod: Basis) -> LinearMap:
    return LinearMap(m1.domain, cod, tuple(m1.matrix) + tuple(m2.matrix))


def pair_name(c1: str, c2: str) -> str:
    return f"{c1} x {c2}"


def product(acs1: AcsTruncation, acs2: AcsTruncation) -> tuple[AcsTruncation, AcsMorphism, AcsMorphism]:
    """Direct sum over the graph whose arrows move one factor and fix the other."""
    vertices = tuple(pair_name(c1, c2) for c1 in acs1.vertices for c2 in acs2.vertices)
    X, A, beta, pairing = {}, {}, {}, {}
    lam = {} if acs1.is_quantum and acs2.is_quantum else None
    for c1 in acs1.vertices:
        for c2 in acs2.vertices:
            v = pair_name(c1, c2)
            X[v] = _sum_basis(acs1.X[c1], acs2.X[c2])
            A[v] = _sum_basis(acs1.A[c1], acs2.A[c2])
            beta[v] = _block(acs1.beta[c1], acs2.beta[c2], X[v], A[v])
            pairing[v] = _block_form(acs1.pairing[c1], acs2.pairing[c2], A[v], X[v])
            if lam is not None:
                lam[v] = _block(acs1.lam[c1], acs2.lam[c2], A[v], A[v].dual())
    arrows: dict[str, Arrow] = {}
    X_maps, A_maps = {}, {}
    for a in acs1.arrows.values():
        for c2 in acs2.vertices:
            aid = f"{a.id} x {c2}"
            rev = f"{a.reverse} x {c2}" if a.reverse is not None else None
            src, dst = pair_name(a.source, c2), pair_name(a.target, c2)
            arrows[aid] = Arrow(aid, src, dst, rev)
            for sg in SIGNS:
                X_maps[(aid, sg)] = _block(acs1.X_maps[(a.id, sg)], _identity_map(acs2.X[c2]), X[dst], X[src])
                A_maps[(aid, sg)] = _block(acs1.A_maps[(a.id, sg)], _identity_map(acs2.A[c2]), A[src], A[dst])
    for c1 in acs1.vertices:
        for b in acs2.arrows.values():
            aid = f"{c1} x {b.id}"
            rev = f"{c1} x {b.reverse}" if b.reverse is not None else None
            src, dst = pair_name(c1, b.source), pair_name(c1, b.target)
            arrows[aid] = Arrow(aid, src, dst, rev)
            for sg in SIGNS:
                X_maps[(aid, sg)] = _block(_identity_map(acs1.X[c1]), acs2.X_maps[(b.id, sg)], X[dst], X[src])
                A_maps[(aid, sg)] = _block(_identity_map(acs1.A[c1]), acs2.A_maps[(b.id, sg)], A[src], A[dst])
    root = pair_name(acs1.root, acs2.root) if acs1.root and acs2.root else None
    prod = AcsTruncation(vertices, arrows, X, A, X_maps, A_maps, beta, pairing, lam, root)

    projs = []
    for which, acs in ((1, acs1), (2, acs2)):
        F_obj, F_edge, chi, alpha = {}, {}, {}, {}
        for c1 in acs1.vertices:
            for c2 in acs2.vertices:
                v = pair_name(c1, c2)
                c = c1 if which == 1 else c2
                F_obj[v] = c
                off_x = 0 if which == 1 else len(acs1.X[c1])
                off_a = 0 if which == 1 else len(acs1.A[c1])
                chi[v] = _projection(X[v], acs.X[c], off_x)
                alpha[v] = _projection(A[v], acs.A[c], off_a)
        for a in acs1.arrows.values():
            for c2 in acs2.vertices:
                for sg in SIGNS:
                    F_edge[(f"{a.id} x {c2}", sg)] = ((a.id, sg),) if which == 1 else ()
        for c1 in acs1.vertices:
            for b in acs2.arrows.values():
                for sg in SIGNS:
                    F_edge[(f"{c1} x {b.id}", sg)] = ((b.id, sg),) if which == 2 else ()
        projs.append(AcsMorphism(prod, acs, F_obj, F_edge, chi, alpha))
    return prod, projs[0], projs[1]


def product_mediator(prod: AcsTruncation, f1: AcsMorphism, f2: AcsMorphism) -> AcsMorphism:
    """The morphism into the product determined by a cone (f1, f2) with a common source."""
    src = f1.source
    F_obj = {c: pair_name(f1.F_obj[c], f2.F_obj[c]) for c in src.vertices}
    F_edge = {}
    for arr in src.arrows.values():
        for sg in SIGNS:
            key = (arr.id, sg)
            steps = [(f"{aid} x {f2.F_obj[arr.source]}", s1) for aid, s1 in f1.F_edge[key]]
            steps += [(f"{f1.F_obj[arr.target]} x {bid}", s2) for bid, s2 in f2.F_edge[key]]
            F_edge[key] = tuple(steps)
    chi = {c: _stack(f1.chi[c], f2.chi[c], prod.X[F_obj[c]]) for c in src.vertices}
    alpha = {c: _stack(f1.alpha[c], f2.alpha[c], prod.A[F_obj[c]]) for c in src.vertices}
    return AcsMorphism(src, prod, F_obj, F_edge, chi, alpha)


def diagonal(acs: AcsTruncation) -> tuple[AcsTruncation, AcsMorphism]:
    prod, _, _ = product(acs, acs)
    ident = identity_morphism(acs)
    return prod, product_mediator(prod, ident, ident)


# ---------------------------------------------------------------------------
# coproducts


def coproduct(acs1: AcsTruncation, acs2: AcsTruncation) -> tuple[AcsTruncation, AcsMorphism, AcsMorphism]:
    """Disjoint union; vertices and arrows are tagged ``1:`` and ``2:``."""
    vertices: list[str] = []
    arrows: dict[str, Arrow] = {}
    X, A, X_maps, A_maps, beta, pairing = {}, {}, {}, {}, {}, {}
    quantum = acs1.is_quantum and acs2.is_quantum
    lam = {} if quantum else None
    for tag, acs in (("1", acs1), ("2", acs2)):
        for v in acs.vertices:
            w = f"{tag}:{v}"
            vertices.append(w)
            X[w], A[w], beta[w], pairing[w] = acs.X[v], acs.A[v], acs.beta[v], acs.pairing[v]
            if lam is not None:
                lam[w] = acs.lam[v]
        for a in acs.arrows.values():
            aid = f"{tag}:{a.id}"
            arrows[aid] = Arrow(aid, f"{tag}:{a.source}", f"{tag}:{a.target}", f"{tag}:{a.reverse}" if a.reverse else None)
            for sg in SIGNS:
                X_maps[(aid, sg)] = acs.X_maps[(a.id, sg)]
                A_maps[(aid, sg)] = acs.A_maps[(a.id, sg)]
    root = f"1:{acs1.root}" if acs1.root else None
    co = AcsTruncation(tuple(vertices), arrows, X, A, X_maps, A_maps, beta, pairing, lam, root)
    injs = []
    for tag, acs in (("1", acs1), ("2", acs2)):
        injs.append(AcsMorphism(
            acs,
            co,
            {v: f"{tag}:{v}" for v in acs.vertices},
            {(a, sg): ((f"{tag}:{a}", sg),) for a in acs.arrows for sg in SIGNS},
            {v: _identity_map(acs.X[v]) for v in acs.vertices},
            {v: _identity_map(acs.A[v]) for v in acs.vertices},
        ))
    return co, injs[0], injs[1]


def coproduct_mediator(co: AcsTruncation, g1: AcsMorphism, g2: AcsMorphism) -> AcsMorphism:
    """The morphism out of the coproduct determined by a cocone (g1, g2)."""
    F_obj, F_edge, chi, alpha = {}, {}, {}, {}
    for tag, g in (("1", g1), ("2", g2)):
        for v in g.source.vertices:
            w = f"{tag}:{v}"
            F_obj[w] = g.F_obj[v]
            chi[w] = g.chi[v]
            alpha[w] = g.alpha[v]
        for (aid, sg), path in g.F_edge.items():
            F_edge[(f"{tag}:{aid}", sg)] = path
    return AcsMorphism(co, g1.target, F_obj, F_edge, chi, alpha)


def codiagonal(acs: AcsTruncation) -> tuple[AcsTruncation, AcsMorphism]:
    co, _, _ = coproduct(acs, acs)
    ident = identity_morphism(acs)
    return co, coproduct_mediator(co, ident, ident)


# ---------------------------------------------------------------------------
# initial and terminal objects


EMPTY = Basis(())


def initial_object(quantum: bool = False) -> AcsTruncation:
    return AcsTruncation((), {}, {}, {}, {}, {}, {}, {}, {} if quantum else None, None)


def terminal_object(quantum: bool = False) -> AcsTruncation:
    """One vertex, no arrows, zero lattices; the quantum version has zero lambda."""
    v = "*"
    lam = {v: LinearMap.zero(EMPTY, EMPTY)} if quantum else None
    return AcsTruncation(
        (v,), {}, {v: EMPTY}, {v: EMPTY}, {}, {}, {v: LinearMap.zero(EMPTY, EMPTY)},
        {v: BilinearForm(EMPTY, EMPTY, ())}, lam, v,
    )


def from_initial(acs: AcsTruncation, initial: AcsTruncation | None = None) -> AcsMorphism:
    init = initial if initial is not None else initial_object(acs.is_quantum)
    return AcsMorphism(init, acs, {}, {}, {}, {})


def to_terminal(acs: AcsTruncation, terminal: AcsTruncation | None = None) -> AcsMorphism:
    term = terminal if terminal is not None else terminal_object(acs.is_quantum)
    return AcsMorphism(
        acs,
        term,
        {v: "*" for v in acs.vertices},
        {(a, sg): () for a in acs.arrows for sg in SIGNS},
        {v: LinearMap.zero(acs.X[v], EMPTY) for v in acs.vertices},
        {v: LinearMap.zero(acs.A[v], EMPTY) for v in acs.vertices},
    )


def check_object(acs: AcsTruncation) -> dict:
    return verify_acs(acs)
