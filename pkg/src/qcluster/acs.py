"""Finite truncations of abstract (quantum) cluster structures.

A truncation lives over a finite directed graph whose arrows each carry a
``+`` and a ``-`` version.  For an arrow f: c -> d the X maps run backwards,
X(f): X d -> X c, and the A maps run forwards, A(f): A c -> A d.  Each vertex
carries beta_c: X c -> A c, an optional lambda_c: A c -> A c* and a pairing
A c x X c -> Z.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Iterable

from .lattice import (
    Basis,
    BilinearForm,
    Label,
    LinearMap,
    Matrix,
    identity,
    integer_kernel,
    matmul,
    radicals,
    smith_normal_form,
    transpose,
    unimodular_inverse,
)
from .seed import PLUS, MINUS, Seed, SeedError, restrict_to_ex, step_matrix, mutate_seed

SIGNS = (PLUS, MINUS)


class AcsError(ValueError):
    """Malformed or failing cluster structure data."""


def flip(sign: str) -> str:
    return MINUS if sign == PLUS else PLUS


@dataclass(frozen=True)
class Arrow:
    id: str
    source: str
    target: str
    reverse: str | None = None


@dataclass
class AcsTruncation:
    vertices: tuple[str, ...]
    arrows: dict[str, Arrow]
    X: dict[str, Basis]
    A: dict[str, Basis]
    X_maps: dict[tuple[str, str], LinearMap]
    A_maps: dict[tuple[str, str], LinearMap]
    beta: dict[str, LinearMap]
    pairing: dict[str, BilinearForm]
    lam: dict[str, LinearMap] | None = None
    root: str | None = None

    @property
    def is_quantum(self) -> bool:
        return self.lam is not None

    def out_arrows(self, v: str) -> list[Arrow]:
        return [a for a in self.arrows.values() if a.source == v]

    def arrows_between(self, c: str, d: str) -> list[Arrow]:
        return [a for a in self.arrows.values() if a.source == c and a.target == d]

    def lambda_gram(self, v: str) -> Matrix:
        """The form <lambda(a), a'> on A v, rows and columns in A-basis order."""
        return transpose(self.lam[v].matrix, len(self.A[v]))

    def x_form_gram(self, v: str) -> Matrix:
        """<beta(x), y> on X v."""
        G = self.pairing[v].gram
        return matmul(transpose(self.beta[v].matrix, len(self.X[v])), G, len(self.X[v]))


# ---------------------------------------------------------------------------
# construction from a seed


def vertex_name(labels: Iterable[str]) -> str:
    return "(" + ",".join(labels) + ")"


def pairing_for(seed: Seed) -> BilinearForm:
    """Evaluation pairing of Z[B]* against Z[ex]."""
    rows = []
    for b in seed.basis:
        rows.append(tuple(1 if b == k else 0 for k in seed.ex))
    return BilinearForm(seed.dual_basis, seed.ex_basis, rows)


def tree_seeds(seed: Seed, depth: int) -> list[tuple[str, Seed, str | None, int | None]]:
    """Breadth-first exchange tree without back-mutations: (id, seed, parent id, position)."""
    out = [(vertex_name(()), seed, None, None)]
    labels_path = {vertex_name(()): ()}
    frontier = [(vertex_name(()), seed)]
    for _ in range(depth):
        nxt = []
        for vid, s in frontier:
            back = s.path[-1] - 1 if s.path else None
            for p in s.ex_positions:
                if p == back:
                    continue
                k = s.basis.labels[p]
                child = mutate_seed(s, k)
                lp = labels_path[vid] + (k.text,)
                cid = vertex_name(lp)
                labels_path[cid] = lp
                out.append((cid, child, vid, p))
                nxt.append((cid, child))
        frontier = nxt
    return out


def acs_from_seed(seed: Seed, depth: int) -> AcsTruncation:
    """The bi-directed exchange tree of the seed to the given depth with all lattice data."""
    entries = tree_seeds(seed, depth)
    seeds = {vid: s for vid, s, _, _ in entries}
    vertices = tuple(vid for vid, _, _, _ in entries)
    X = {v: s.ex_basis for v, s in seeds.items()}
    A = {v: s.dual_basis for v, s in seeds.items()}
    beta = {v: s.beta for v, s in seeds.items()}
    pairing = {v: pairing_for(s) for v, s in seeds.items()}
    lam = None
    if seed.L is not None:
        lam = {v: LinearMap(A[v], A[v].dual(), transpose(s.L, s.n)) for v, s in seeds.items()}
    arrows: dict[str, Arrow] = {}
    X_maps: dict[tuple[str, str], LinearMap] = {}
    A_maps: dict[tuple[str, str], LinearMap] = {}
    for vid, s, parent, p in entries:
        if parent is None:
            continue
        fwd, rev = f"{parent}>{vid}", f"{vid}>{parent}"
        arrows[fwd] = Arrow(fwd, parent, vid, rev)
        arrows[rev] = Arrow(rev, vid, parent, fwd)
        ps = seeds[parent]
        for sign in SIGNS:
            _attach(ps, ps.basis.labels[p], parent, vid, fwd, sign, X, A, X_maps, A_maps)
            _attach(s, s.basis.labels[p], vid, parent, rev, sign, X, A, X_maps, A_maps)
    return AcsTruncation(vertices, arrows, X, A, X_maps, A_maps, beta, pairing, lam, root=vertices[0])


def _attach(s: Seed, k: Label, c: str, d: str, aid: str, sign: str, X, A, X_maps, A_maps) -> None:
    """Maps of the mutation of s at k, viewed as the arrow c -> d."""
    P = step_matrix(s, k, sign)
    # X(f) = mubar restricted to the exchangeable part: X d -> X c
    X_maps[(aid, sign)] = LinearMap(X[d], X[c], restrict_to_ex(s, P))
    # A(f) = the E-map mu^sign: A c -> A d
    A_maps[(aid, sign)] = LinearMap(A[c], A[d], transpose(P, s.n))


# ---------------------------------------------------------------------------
# verification


def _violation(check: str, where: str, detail: str = "") -> dict:
    return {"check": check, "where": where, "detail": detail}


def _compose(*maps: LinearMap) -> Matrix:
    """Matrix of maps[0] o maps[1] o ... (applied right to left)."""
    out = maps[-1].matrix
    cols = len(maps[-1].domain)
    for m in reversed(maps[:-1]):
        out = matmul(m.matrix, out, cols)
    return out


def verify_acs(acs: AcsTruncation) -> dict:
    """Check every axiom on the truncation and list the violations."""
    out: list[dict] = []
    for v in acs.vertices:
        bm = acs.beta[v]
        if bm.domain != acs.X[v] or bm.codomain != acs.A[v]:
            out.append(_violation("shape", v, "beta must map X to A"))
        form = acs.pairing[v]
        if form.left != acs.A[v] or form.right != acs.X[v]:
            out.append(_violation("shape", v, "pairing must be A x X"))
            continue
        _, right = radicals(form)
        if right:
            out.append(_violation("right non-degenerate", v, f"right radical of rank {len(right)}"))
        if acs.lam is not None:
            L = acs.lambda_gram(v)
            if any(L[i][j] != -L[j][i] for i in range(len(L)) for j in range(len(L))):
                out.append(_violation("lambda skew", v))
    for a in acs.arrows.values():
        c, d = a.source, a.target
        for sign in SIGNS:
            where = f"{a.id}[{sign}]"
            xf = acs.X_maps.get((a.id, sign))
            af = acs.A_maps.get((a.id, sign))
            if xf is None or af is None:
                out.append(_violation("maps present", where))
                continue
            if xf.domain != acs.X[d] or xf.codomain != acs.X[c] or af.domain != acs.A[c] or af.codomain != acs.A[d]:
                out.append(_violation("shape", where, "map bases do not match the arrow"))
                continue
            # A f o beta_c o X f = beta_d
            if _compose(af, acs.beta[c], xf) != acs.beta[d].matrix:
                out.append(_violation("factorization", where, "A f o beta_c o X f != beta_d"))
            # <a, X f x>_c = <A f a, x>_d
            lhs = matmul(acs.pairing[c].gram, xf.matrix, len(acs.X[d]))
            rhs = matmul(transpose(af.matrix, len(acs.A[c])), acs.pairing[d].gram, len(acs.X[d]))
            if lhs != rhs:
                out.append(_violation("adjointness", where, "<a, X f x> != <A f a, x>"))
            if acs.lam is not None:
                n = len(acs.A[c])
                pulled = matmul(matmul(transpose(af.matrix, n), acs.lambda_gram(d), len(acs.A[d])), af.matrix, n)
                if pulled != acs.lambda_gram(c):
                    out.append(_violation("lambda factorization", where, "lambda_c != (A f)* lambda_d A f"))
            if a.reverse is not None:
                r = acs.arrows.get(a.reverse)
                if r is None or r.source != d or r.target != c:
                    out.append(_violation("digon", where, "declared reverse arrow missing"))
                    continue
                back = flip(sign)
                ar = acs.A_maps.get((r.id, back))
                xr = acs.X_maps.get((r.id, back))
                if ar is None or xr is None:
                    out.append(_violation("digon", where, "reverse maps missing"))
                    continue
                if _compose(ar, af) != identity(len(acs.A[c])):
                    out.append(_violation("digon", where, "A(rev) o A(f) != id"))
                if _compose(xf, xr) != identity(len(acs.X[c])):
                    out.append(_violation("digon", where, "X(f) o X(rev) != id"))
    return {"ok": not out, "violations": out, "vertices": len(acs.vertices), "arrows": len(acs.arrows)}


# ---------------------------------------------------------------------------
# principal part


def principal_part(acs: AcsTruncation) -> AcsTruncation:
    """Quotient each A c by the left radical of its pairing.

    Vertices with a trivial radical keep their data unchanged, so the
    construction is idempotent.
    """
    pi: dict[str, Matrix] = {}
    sec: dict[str, Matrix] = {}
    A: dict[str, Basis] = {}
    for v in acs.vertices:
        G = acs.pairing[v].gram
        na, nx = len(acs.A[v]), len(acs.X[v])
        if not integer_kernel(transpose(G, nx), na):
            pi[v] = sec[v] = identity(na)
            A[v] = acs.A[v]
            continue
        _, D, V = smith_normal_form(transpose(G, nx), na)
        r = sum(1 for i in range(min(nx, na)) if D[i][i])
        Vinv = unimodular_inverse(V)
        pi[v] = tuple(Vinv[i] for i in range(r))
        sec[v] = tuple(tuple(V[i][j] for j in range(r)) for i in range(na))
        A[v] = Basis(tuple(Label(f"p{i + 1}") for i in range(r)))
    A_maps = {}
    for (aid, sign), m in acs.A_maps.items():
        a = acs.arrows[aid]
        c, d = a.source, a.target
        mat = matmul(matmul(pi[d], m.matrix, len(acs.A[c])), sec[c], len(A[c]))
        A_maps[(aid, sign)] = LinearMap(A[c], A[d], mat)
    beta = {}
    pairing = {}
    for v in acs.vertices:
        nx = len(acs.X[v])
        beta[v] = LinearMap(acs.X[v], A[v], matmul(pi[v], acs.beta[v].matrix, nx))
        gram = matmul(transpose(sec[v], len(A[v])), acs.pairing[v].gram, nx)
        pairing[v] = BilinearForm(A[v], acs.X[v], gram)
    return AcsTruncation(
        acs.vertices, dict(acs.arrows), dict(acs.X), A, dict(acs.X_maps), A_maps, beta, pairing, None, acs.root
    )


# ---------------------------------------------------------------------------
# skew-symmetrizability and classification


def _skew(m: Matrix) -> bool:
    return all(m[i][j] == -m[j][i] for i in range(len(m)) for j in range(len(m)))


def skew_symmetrizable_report(acs: AcsTruncation, vertex: str, principal: AcsTruncation | None = None) -> dict:
    """Four separately computed conditions that should all agree."""
    if vertex not in acs.X:
        raise AcsError(f"unknown vertex {vertex}")
    pp = principal if principal is not None else principal_part(acs)

    def x_form_skew(c: AcsTruncation) -> bool:
        return _skew(c.x_form_gram(vertex))

    def delta_beta_skew(c: AcsTruncation) -> bool:
        # delta_A: A -> X*, a -> <a, ->; then delta_A o beta: X -> X*
        delta = c.pairing[vertex].left_map()
        return _skew(matmul(delta.matrix, c.beta[vertex].matrix, len(c.X[vertex])))

    r = {
        "x_form": x_form_skew(acs),
        "x_form_principal": x_form_skew(pp),
        "delta_beta": delta_beta_skew(acs),
        "delta_beta_principal": delta_beta_skew(pp),
    }
    r["agree"] = len(set(r.values())) == 1
    return r


def _components(vertices, edges) -> list[list[str]]:
    adj = {v: set() for v in vertices}
    for a, b in edges:
        adj[a].add(b)
        adj[b].add(a)
    seen, comps = set(), []
    for v in vertices:
        if v in seen:
            continue
        comp, queue = [], deque([v])
        seen.add(v)
        while queue:
            u = queue.popleft()
            comp.append(u)
            for w in sorted(adj[u]):
                if w not in seen:
                    seen.add(w)
                    queue.append(w)
        comps.append(comp)
    return comps


def _reachable(start: str, succ: dict) -> set:
    seen = {start}
    stack = [start]
    while stack:
        u = stack.pop()
        for w in succ[u]:
            if w not in seen:
                seen.add(w)
                stack.append(w)
    return seen


def classify(acs: AcsTruncation) -> dict:
    ranks = {v: {"a_rank": len(acs.A[v]), "x_rank": len(acs.X[v])} for v in acs.vertices}
    pairs = {(r["a_rank"], r["x_rank"]) for r in ranks.values()}
    constant = len(pairs) == 1
    report = {"per_vertex": ranks, "constant_rank": constant}
    if constant:
        a, x = next(iter(pairs))
        report.update({"rank": a, "mutable_rank": x, "frozen_rank": a - x})
    succ = {v: set() for v in acs.vertices}
    edges = []
    for arr in acs.arrows.values():
        succ[arr.source].add(arr.target)
        edges.append((arr.source, arr.target))
    weak = _components(acs.vertices, edges)
    report["weak_components"] = len(weak)
    report["bi_directed"] = all(acs.arrows_between(a.target, a.source) for a in acs.arrows.values())
    roots = [v for v in acs.vertices if len(_reachable(v, succ)) == len(acs.vertices)]
    report["strongly_connected"] = len(roots) == len(acs.vertices) and bool(roots)
    report["weakly_connected"] = len(weak) == 1
    report["rootable"] = bool(roots)
    report["root"] = roots[0] if roots else None
    return report


# ---------------------------------------------------------------------------
# back to seeds


def seed_from_acs(acs: AcsTruncation, vertex: str, inv: Iterable[str] = ()) -> Seed:
    """The seed read off at a vertex whose pairing matches X with distinct A basis vectors.

    The invertible frozen labels are not part of the cluster structure and
    are supplied separately.
    """
    if vertex not in acs.X:
        raise AcsError(f"unknown vertex {vertex}")
    G = acs.pairing[vertex].gram
    Ab, Xb = acs.A[vertex], acs.X[vertex]
    ex_pos = []
    for j in range(len(Xb)):
        col = [G[i][j] for i in range(len(Ab))]
        if sorted(col) != [0] * (len(col) - 1) + [1]:
            raise AcsError("pairing does not identify X with a set of A basis vectors")
        ex_pos.append(col.index(1))
    if len(set(ex_pos)) != len(ex_pos):
        raise AcsError("pairing sends two X basis vectors to the same A basis vector")
    labels = [lab.toggled() for lab in Ab.labels]
    basis = Basis(tuple(labels))
    ex = tuple(labels[p] for p in ex_pos)
    bm = acs.beta[vertex].matrix
    rows_by_label = {labels[p]: [bm[i][j] for i in range(len(Ab))] for j, p in enumerate(ex_pos)}
    ordered_ex = sorted(ex, key=basis.index)
    B = [rows_by_label[k] for k in ordered_ex]
    L = acs.lambda_gram(vertex) if acs.lam is not None else None
    inv_labels = frozenset(Label(t) for t in inv)
    try:
        return Seed(basis, tuple(ordered_ex), B, L, inv_labels)
    except SeedError as exc:
        raise AcsError(str(exc)) from None


# ---------------------------------------------------------------------------
# folded exchange graphs


def _match_positions(child_vars, rep_vars) -> list[int]:
    """sigma with child_vars[q] == rep_vars[sigma[q]]."""
    where = {}
    for j, v in enumerate(rep_vars):
        where.setdefault(v, j)
    sigma = []
    for v in child_vars:
        j = where.get(v)
        if j is None:
            raise AcsError("folded frames do not share their variables")
        sigma.append(j)
    if len(set(sigma)) != len(sigma):
        raise AcsError("variable matching is not a bijection")
    return sigma


def acs_from_exchange_graph(graph) -> AcsTruncation:
    """The cluster structure over a closed folded exchange graph.

    Each node is represented by one frame.  An arrow i -> j is a mutation of
    i's seed followed by the relabeling onto j's representative, read off by
    matching cluster variables.
    """
    if not graph.folded or not graph.closed:
        raise AcsError("need a closed folded exchange graph")
    nodes = graph.nodes
    vid = {node.index: node.frame.vertex_id for node in nodes}
    seeds = {node.index: node.frame.seed for node in nodes}
    vertices = tuple(vid[node.index] for node in nodes)
    X = {vid[i]: s.ex_basis for i, s in seeds.items()}
    A = {vid[i]: s.dual_basis for i, s in seeds.items()}
    beta = {vid[i]: s.beta for i, s in seeds.items()}
    pairing = {vid[i]: pairing_for(s) for i, s in seeds.items()}
    quantum = nodes[0].frame.seed.L is not None
    lam = {vid[i]: LinearMap(A[vid[i]], A[vid[i]].dual(), transpose(s.L, s.n)) for i, s in seeds.items()} if quantum else None
    arrows: dict[str, Arrow] = {}
    X_maps: dict[tuple[str, str], LinearMap] = {}
    A_maps: dict[tuple[str, str], LinearMap] = {}
    from .engine import mutate_frame_at

    for node in nodes:
        i = node.index
        s = seeds[i]
        for p in s.ex_positions:
            j = node.neighbors[p]
            child = mutate_frame_at(node.frame, p)
            sigma = _match_positions(child.vars, nodes[j].frame.vars)
            n = s.n
            # permutation matrix child positions -> representative positions
            perm = [[1 if sigma[q] == r else 0 for q in range(n)] for r in range(n)]
            if j == i:
                raise AcsError("exchange graph has a loop")
            aid = f"{vid[i]}>{vid[j]}"
            back = [q for q, t in nodes[j].neighbors.items() if t == i]
            rev = f"{vid[j]}>{vid[i]}" if back else None
            arrows[aid] = Arrow(aid, vid[i], vid[j], rev)
            sj = seeds[j]
            for sign in SIGNS:
                P = step_matrix(s, s.basis.labels[p], sign)
                Pt = transpose(P, n)
                A_maps[(aid, sign)] = LinearMap(A[vid[i]], A[vid[j]], matmul(perm, Pt, n))
                # X(f): X j -> X i is the restricted inverse F-map after undoing sigma
                inv_perm = transpose(perm, n)
                full = matmul(P, inv_perm, n)
                rows = tuple(tuple(full[a][b] for b in sj.ex_positions) for a in s.ex_positions)
                X_maps[(aid, sign)] = LinearMap(X[vid[j]], X[vid[i]], rows)
    return AcsTruncation(vertices, arrows, X, A, X_maps, A_maps, beta, pairing, lam, root=vertices[0])
