"""Triangulations of a polygon with marked points 1..n in anticlockwise order.

Arcs are unordered pairs stored as (min, max).  The quadrilateral of a
diagonal (i, j), i < j, has apex k with i < k < j and apex l on the other
side, and its boundary map is

    beta(q_ij) = (ik + jl) - (kj + li)

so for the square, beta(q_13) = 12 + 34 - 23 - 14.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations

from .acs import SIGNS, AcsTruncation, Arrow, acs_from_exchange_graph, verify_acs
from .acscat import AcsMorphism, is_isomorphism, verify_morphism
from .engine import Frame, canonical_key, explore, mutate_frame
from .lattice import Basis, BilinearForm, Label, LinearMap, neg_part, pos_part
from .seed import PLUS, Seed, mutate_beta

Arc = tuple[int, int]


class SurfaceError(ValueError):
    """Bad polygon size or a missing arc."""


def arc(i: int, j: int) -> Arc:
    return (i, j) if i < j else (j, i)


def arc_text(a: Arc, n: int) -> str:
    return f"{a[0]}{a[1]}" if n < 10 else f"{a[0]}-{a[1]}"


def is_boundary(a: Arc, n: int) -> bool:
    i, j = a
    return j - i == 1 or (i == 1 and j == n)


def crosses(a: Arc, b: Arc) -> bool:
    (i, j), (k, l) = a, b
    return (i < k < j < l) or (k < i < l < j)


def all_diagonals(n: int) -> list[Arc]:
    return [(i, j) for i in range(1, n + 1) for j in range(i + 2, n + 1) if not (i == 1 and j == n)]


def boundary_arcs(n: int) -> list[Arc]:
    return [arc(i, i % n + 1) for i in range(1, n + 1)]


@dataclass(frozen=True)
class Triangulation:
    n: int
    diagonals: frozenset

    def __post_init__(self) -> None:
        if self.n < 4:
            raise SurfaceError("need at least four marked points")
        diags = frozenset(arc(*d) for d in self.diagonals)
        object.__setattr__(self, "diagonals", diags)

    @property
    def name(self) -> str:
        return "{" + ",".join(arc_text(d, self.n) for d in sorted(self.diagonals)) + "}"

    def arcs(self) -> list[Arc]:
        return sorted(set(self.diagonals) | set(boundary_arcs(self.n)))

    def has_arc(self, a: Arc) -> bool:
        a = arc(*a)
        return a in self.diagonals or is_boundary(a, self.n)

    def is_valid(self) -> bool:
        d = sorted(self.diagonals)
        if len(d) != self.n - 3 or any(is_boundary(a, self.n) for a in d):
            return False
        return not any(crosses(a, b) for a, b in combinations(d, 2))


def quadrilateral(t: Triangulation, d: Arc) -> tuple[int, int, int, int]:
    """(i, k, j, l): the diagonal's endpoints i < j with apexes k inside (i, j) and l outside."""
    d = arc(*d)
    if d not in t.diagonals:
        raise SurfaceError(f"{d} is not a diagonal of the triangulation")
    i, j = d
    inside = [k for k in range(i + 1, j) if t.has_arc((i, k)) and t.has_arc((k, j))]
    outside = [l for l in range(1, t.n + 1) if not i <= l <= j and t.has_arc((i, l)) and t.has_arc((l, j))]
    if len(inside) != 1 or len(outside) != 1:
        raise SurfaceError("not a triangulation")
    return i, inside[0], j, outside[0]


def beta_vector(t: Triangulation, d: Arc) -> dict[Arc, int]:
    i, k, j, l = quadrilateral(t, d)
    out: dict[Arc, int] = {}
    for a, c in ((arc(i, k), 1), (arc(j, l), 1), (arc(k, j), -1), (arc(l, i), -1)):
        out[a] = out.get(a, 0) + c
    return out


def flip(t: Triangulation, d: Arc) -> Triangulation:
    i, k, j, l = quadrilateral(t, d)
    return Triangulation(t.n, (t.diagonals - {arc(i, j)}) | {arc(k, l)})


def flipped_arc(t: Triangulation, d: Arc) -> Arc:
    _, k, _, l = quadrilateral(t, d)
    return arc(k, l)


# ---------------------------------------------------------------------------
# enumeration


def enumerate_triangulations(n: int) -> list[Triangulation]:
    """All triangulations of the n-gon, via the triangle on the edge (1, n)."""
    if not 4 <= n <= 12:
        raise SurfaceError("n must lie between 4 and 12")
    out = [Triangulation(n, d) for d in _triangulate(1, n)]
    return sorted(out, key=lambda t: sorted(t.diagonals))


@lru_cache(maxsize=None)
def _triangulate(a: int, b: int) -> tuple[frozenset, ...]:
    """Diagonal sets triangulating the sub-polygon a, a+1, ..., b."""
    if b - a < 2:
        return (frozenset(),)
    out = []
    for m in range(a + 1, b):
        extra = set()
        if m - a > 1:
            extra.add((a, m))
        if b - m > 1:
            extra.add((m, b))
        for left in _triangulate(a, m):
            for right in _triangulate(m, b):
                out.append(frozenset(extra) | left | right)
    return tuple(out)


def catalan(k: int) -> int:
    from math import comb

    return comb(2 * k, k) // (k + 1)


# ---------------------------------------------------------------------------
# lattices and maps


def quad_label(d: Arc, n: int) -> Label:
    return Label("q" + arc_text(d, n))


def arc_label(a: Arc, n: int, dual: bool = True) -> Label:
    return Label(arc_text(a, n), dual)


def x_basis(t: Triangulation) -> Basis:
    return Basis(tuple(quad_label(d, t.n) for d in sorted(t.diagonals)))


def a_basis(t: Triangulation) -> Basis:
    return Basis(tuple(arc_label(a, t.n) for a in t.arcs()))


def beta_from_triangulation(t: Triangulation) -> LinearMap:
    """beta: Z[quadrilaterals] -> Z[arcs], the signed boundary of each quadrilateral."""
    Xb, Ab = x_basis(t), a_basis(t)
    arcs = t.arcs()
    cols = []
    for d in sorted(t.diagonals):
        vec = beta_vector(t, d)
        cols.append([vec.get(a, 0) for a in arcs])
    rows = [tuple(col[i] for col in cols) for i in range(len(arcs))]
    return LinearMap(Xb, Ab, rows)


def pairing_from_triangulation(t: Triangulation) -> BilinearForm:
    """<a, q> = 1 exactly when a is the diagonal of q."""
    diags = sorted(t.diagonals)
    rows = [tuple(1 if a == d else 0 for d in diags) for a in t.arcs()]
    return BilinearForm(a_basis(t), x_basis(t), rows)


def seed_from_triangulation(t: Triangulation, lam=None) -> Seed:
    arcs = t.arcs()
    labels = [arc_text(a, t.n) for a in arcs]
    beta = {}
    for d in sorted(t.diagonals):
        vec = beta_vector(t, d)
        beta[arc_text(d, t.n)] = [vec.get(a, 0) for a in arcs]
    return Seed.build(labels, [arc_text(d, t.n) for d in sorted(t.diagonals)], beta, lam)


def mutate_quadrilaterals(t: Triangulation, d: Arc, sign: str = PLUS) -> tuple[LinearMap, LinearMap]:
    """Maps of the flip at d: (X map on quadrilaterals X t' -> X t, A map on arcs A t -> A t').

    The A map is the E-map: a* -> a* away from d, d* -> [beta(q_d)]_sign - d'*.
    The X map is the inverse F-map restricted to quadrilaterals:
    q_e -> q_e + [<beta(q_d), e>]_sign q_d away from d', and q_d' -> -q_d.
    """
    d = arc(*d)
    t2 = flip(t, d)
    new = flipped_arc(t, d)
    part = pos_part if sign == PLUS else neg_part
    vec = beta_vector(t, d)
    A1, A2 = a_basis(t), a_basis(t2)
    cols = {}
    for a in t.arcs():
        if a == d:
            img = {arc_label(b, t.n): part(c) for b, c in vec.items()}
            img[arc_label(new, t.n)] = img.get(arc_label(new, t.n), 0) - 1
        else:
            img = {arc_label(a, t.n): 1}
        cols[arc_label(a, t.n)] = A2.element(img)
    amap = LinearMap.from_columns(A1, A2, cols)
    X1, X2 = x_basis(t), x_basis(t2)
    xcols = {}
    for e in sorted(t2.diagonals):
        if e == new:
            img = {quad_label(d, t.n): -1}
        else:
            img = {quad_label(e, t.n): 1}
            c = part(vec.get(e, 0))
            if c:
                img[quad_label(d, t.n)] = c
        xcols[quad_label(e, t.n)] = X1.element(img)
    xmap = LinearMap.from_columns(X2, X1, xcols)
    return xmap, amap


def flip_consistent(t: Triangulation, d: Arc) -> bool:
    """beta of the flipped triangulation equals the mutated beta, matching the new arc to d's slot."""
    d = arc(*d)
    s = seed_from_triangulation(t)
    k = Label(arc_text(d, t.n))
    mutated = mutate_beta(s, k)
    t2 = flip(t, d)
    new = flipped_arc(t, d)
    arcs1, arcs2 = t.arcs(), t2.arcs()
    slot = {a: i for i, a in enumerate(arcs1)}
    slot[new] = slot.pop(d)
    ex1 = sorted(t.diagonals)
    for e in sorted(t2.diagonals):
        row = mutated[ex1.index(d if e == new else e)]
        vec = beta_vector(t2, e)
        if any(row[slot[a]] != vec.get(a, 0) for a in arcs2):
            return False
    return True


# ---------------------------------------------------------------------------
# the cluster structure of a polygon


def flip_arrow_id(t: Triangulation, d: Arc) -> str:
    return f"{t.name}~{arc_text(d, t.n)}"


def acs_from_polygon(n: int) -> AcsTruncation:
    """The full flip graph of the n-gon with arcs, quadrilaterals and flip maps."""
    if not 4 <= n <= 10:
        raise SurfaceError("n must lie between 4 and 10")
    ts = enumerate_triangulations(n)
    vertices = tuple(t.name for t in ts)
    X = {t.name: x_basis(t) for t in ts}
    A = {t.name: a_basis(t) for t in ts}
    beta = {t.name: beta_from_triangulation(t) for t in ts}
    pairing = {t.name: pairing_from_triangulation(t) for t in ts}
    arrows, X_maps, A_maps = {}, {}, {}
    for t in ts:
        for d in sorted(t.diagonals):
            t2 = flip(t, d)
            aid = flip_arrow_id(t, d)
            arrows[aid] = Arrow(aid, t.name, t2.name, flip_arrow_id(t2, flipped_arc(t, d)))
            for sign in SIGNS:
                X_maps[(aid, sign)], A_maps[(aid, sign)] = mutate_quadrilaterals(t, d, sign)
    root = fan(n).name
    return AcsTruncation(vertices, arrows, X, A, X_maps, A_maps, beta, pairing, None, root)


def fan(n: int) -> Triangulation:
    return Triangulation(n, frozenset((1, j) for j in range(3, n)))


def hexagon_seed(quantum: bool = False) -> Seed:
    """Exchange data of the fan triangulation of the hexagon, labels ij for arcs {i, j}."""
    s = seed_from_triangulation(fan(6))
    if quantum:
        from .seed import quantize

        s = quantize(s)
    return s


# ---------------------------------------------------------------------------
# the hexagon and Gr(2,6)


@dataclass
class HexagonMatch:
    morphism: AcsMorphism
    source: AcsTruncation
    target: AcsTruncation
    arc_variables: dict
    well_defined: bool


def hexagon_gr26_isomorphism(quantum: bool = False) -> HexagonMatch:
    """Match the polygon cluster structure with the folded one of the Gr(2,6) seed.

    Triangulations are walked by flips from the fan while the matching frame
    is mutated alongside; each arc is sent to the label carrying the same
    cluster variable in the folded node's representative.
    """
    n = 6
    seed = hexagon_seed(quantum)
    graph = explore(seed, 12, fold=True)
    target = acs_from_exchange_graph(graph)
    source = acs_from_polygon(n)
    registry = {node.key: node.index for node in graph.nodes}

    t0 = fan(n)
    root = Frame.root(seed)
    arc_pos0 = {a: seed.basis.index(Label(arc_text(a, n))) for a in t0.arcs()}
    frames = {t0: (root, arc_pos0)}
    arc_var: dict[Arc, object] = {a: root.vars[p] for a, p in arc_pos0.items()}
    well_defined = True
    queue = deque([t0])
    while queue:
        t = queue.popleft()
        frame, pos = frames[t]
        for d in sorted(t.diagonals):
            t2 = flip(t, d)
            new = flipped_arc(t, d)
            child = mutate_frame(frame, frame.seed.basis.labels[pos[d]])
            pos2 = dict(pos)
            pos2[new] = pos2.pop(d)
            v = child.vars[pos2[new]]
            if new in arc_var and arc_var[new] != v:
                well_defined = False
            arc_var.setdefault(new, v)
            if t2 not in frames:
                frames[t2] = (child, pos2)
                queue.append(t2)
            elif canonical_key(frames[t2][0]) != canonical_key(child):
                well_defined = False

    node_of: dict[str, int] = {}
    F_obj, chi, alpha = {}, {}, {}
    for t, (frame, pos) in frames.items():
        j = registry.get(canonical_key(frame))
        if j is None:
            well_defined = False
            continue
        node_of[t.name] = j
        rep = graph.nodes[j].frame
        vid = rep.vertex_id
        F_obj[t.name] = vid
        where = {v: q for q, v in enumerate(rep.vars)}
        lab_of = {a: rep.seed.basis.labels[where[frame.vars[p]]] for a, p in pos.items()}
        Xs, As = source.X[t.name], source.A[t.name]
        Xt, At = target.X[vid], target.A[vid]
        chi[t.name] = LinearMap.from_columns(
            Xs, Xt, {quad_label(d, n): Xt.basis_vector(lab_of[d]) for d in t.diagonals}
        )
        alpha[t.name] = LinearMap.from_columns(
            As, At, {arc_label(a, n): At.basis_vector(lab_of[a].toggled()) for a in t.arcs()}
        )
    F_edge = {}
    for arr in source.arrows.values():
        a, b = F_obj.get(arr.source), F_obj.get(arr.target)
        for sign in SIGNS:
            F_edge[(arr.id, sign)] = ((f"{a}>{b}", sign),)
    morphism = AcsMorphism(source, target, F_obj, F_edge, chi, alpha)
    return HexagonMatch(morphism, source, target, arc_var, well_defined and len(set(node_of.values())) == len(frames))


def hexagon_report(quantum: bool = False) -> dict:
    match = hexagon_gr26_isomorphism(quantum)
    src_ok = verify_acs(match.source)["ok"]
    tgt_ok = verify_acs(match.target)["ok"]
    mor = verify_morphism(match.morphism, quantum=False)
    iso = is_isomorphism(match.morphism)
    return {
        "ok": src_ok and tgt_ok and mor["ok"] and iso and match.well_defined,
        "source_vertices": len(match.source.vertices),
        "target_vertices": len(match.target.vertices),
        "source_valid": src_ok,
        "target_valid": tgt_ok,
        "morphism_valid": mor["ok"],
        "violations": mor["violations"],
        "is_isomorphism": iso,
        "well_defined": match.well_defined,
    }
