"""Toric frames, cluster variable mutation and exchange graph exploration.

Every cluster variable is kept as an element of the initial quantum torus.
A frame pairs the current seed with the positional list of its variables;
positions never move under mutation, so the variable at position p is the
one attached to the label at position p of the current seed.
"""

from __future__ import annotations

import hashlib
import json
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Sequence

from .lattice import Label, LatticeElement, neg_part, pos_part
from .qtorus import (
    NotDivisible,
    QCoeff,
    QLaurent,
    QuantumTorus,
    exact_right_divide,
    render,
    specialize_commutative,
    sym_power,
)
from .seed import Seed, SeedError, mutate_seed


class LaurentFailure(ArithmeticError):
    """A division in the exchange relation left the initial quantum torus."""

    def __init__(self, path: Sequence[str], reason: str):
        super().__init__(f"division failed along {format_path(path)}: {reason}")
        self.path = tuple(path)
        self.reason = reason


def default_jobs() -> int:
    try:
        return max(1, int(os.environ.get("QCLUSTER_JOBS", "1")))
    except ValueError:
        return 1


def format_path(labels: Sequence[str]) -> str:
    return "(" + ",".join(labels) + ")"


# ---------------------------------------------------------------------------
# frames


@dataclass(frozen=True)
class Frame:
    seed: Seed
    torus: QuantumTorus
    vars: tuple[QLaurent, ...]
    labels_path: tuple[str, ...] = ()
    _powers: dict = field(default_factory=dict, compare=False, hash=False, repr=False)

    @classmethod
    def root(cls, seed: Seed) -> "Frame":
        basis = seed.dual_basis
        if seed.L is None:
            torus = QuantumTorus.commutative(basis)
        else:
            torus = QuantumTorus(basis, seed.L)
        return cls(seed, torus, tuple(torus.gen(i) for i in range(seed.n)))

    @property
    def quantum(self) -> bool:
        return self.seed.L is not None

    @property
    def path(self) -> tuple[int, ...]:
        return self.seed.path

    @property
    def vertex_id(self) -> str:
        return format_path(self.labels_path)

    def var(self, lab: Label | str) -> QLaurent:
        if isinstance(lab, str):
            lab = Label.parse(lab)
        if lab.dual:
            lab = lab.toggled()
        return self.vars[self.seed.basis.index(lab)]

    def power(self, i: int, e: int) -> QLaurent:
        key = (i, e)
        got = self._powers.get(key)
        if got is None:
            got = self.vars[i] ** e
            self._powers[key] = got
        return got

    def form(self, v: Sequence[int], w: Sequence[int]) -> int:
        L = self.seed.L
        if L is None:
            return 0
        return sum(vi * sum(r * wj for r, wj in zip(L[i], w) if wj) for i, vi in enumerate(v) if vi)


def _vector(frame: Frame, w) -> tuple[int, ...]:
    if isinstance(w, LatticeElement):
        if w.basis != frame.seed.dual_basis:
            raise SeedError("exponent must lie in the current dual lattice")
        return w.vector()
    w = tuple(int(x) for x in w)
    if len(w) != frame.seed.n:
        raise SeedError("exponent has the wrong length")
    return w


def frame_eval(frame: Frame, w) -> QLaurent:
    """The frame's value on w, for w >= 0 or w = N - e_k with N >= 0 and N_k = 0."""
    v = _vector(frame, w)
    negs = [i for i, x in enumerate(v) if x < 0]
    if not negs:
        out = frame.torus.one()
        for i, x in enumerate(v):
            if x:
                out = out * frame.power(i, x)
        if frame.seed.L is not None:
            k = sym_power(v, frame.seed.L)
            if k:
                out = out.scale(QCoeff.s(k))
        return out
    if len(negs) != 1 or v[negs[0]] != -1:
        raise SeedError("frame_eval supports N or N - e_k with N >= 0")
    p = negs[0]
    N = list(v)
    N[p] = 0
    ek = [0] * len(v)
    ek[p] = 1
    num = frame_eval(frame, N)
    q = exact_right_divide(num, frame.vars[p])
    k = frame.form(N, ek)
    return q.scale(QCoeff.s(k)) if k else q


def exchange_terms(seed: Seed, k: Label) -> tuple[tuple[int, ...], tuple[int, ...]]:
    """The exponents [beta(k)]_+ - k* and [beta(k)]_- - k* over the current dual basis."""
    i = seed.ex_row(k)
    p = seed.ex_positions[i]
    plus = [pos_part(x) for x in seed.B[i]]
    minus = [neg_part(x) for x in seed.B[i]]
    plus[p] = -1
    minus[p] = -1
    return tuple(plus), tuple(minus)


def standard_rule(frame: Frame, k: Label) -> QLaurent:
    """frame_eval of both exchange exponents, summed before the one right division.

    The two summands need not be Laurent on their own (for instance when
    [beta(k)]_+ = 0), only their sum is.
    """
    plus, minus = exchange_terms(frame.seed, k)
    p = frame.seed.basis.index(k)
    ek = [0] * frame.seed.n
    ek[p] = 1
    total = frame.torus.zero()
    for w in (plus, minus):
        N = list(w)
        N[p] = 0
        t = frame_eval(frame, N)
        shift = frame.form(N, ek)
        total = total + (t.scale(QCoeff.s(shift)) if shift else t)
    return exact_right_divide(total, frame.vars[p])


ExchangeRule = Callable[[Frame, Label], QLaurent]


def mutate_frame(frame: Frame, k: Label | str, rule: ExchangeRule = standard_rule) -> Frame:
    if isinstance(k, str):
        k = Label(k)
    if k not in frame.seed.ex:
        raise SeedError(f"{k} is not exchangeable")
    try:
        new = rule(frame, k)
    except NotDivisible as exc:
        raise LaurentFailure(frame.labels_path + (k.text,), str(exc)) from None
    p = frame.seed.basis.index(k)
    vars_ = list(frame.vars)
    vars_[p] = new
    return Frame(mutate_seed(frame.seed, k), frame.torus, tuple(vars_), frame.labels_path + (k.text,))


def mutate_frame_at(frame: Frame, p: int, rule: ExchangeRule = standard_rule) -> Frame:
    return mutate_frame(frame, frame.seed.basis.labels[p], rule)


def specialize_frame(frame: Frame) -> tuple[QLaurent, ...]:
    return tuple(specialize_commutative(v) for v in frame.vars)


# ---------------------------------------------------------------------------
# exchange graphs


def canonical_key(frame: Frame) -> tuple:
    """Unordered fingerprint: sorted variables with exchange flags and the permuted B."""
    seed = frame.seed
    rendered = [render(v) for v in frame.vars]
    order = sorted(range(seed.n), key=lambda i: rendered[i])
    ex_pos = seed.ex_positions
    row_of = {p: r for r, p in enumerate(ex_pos)}
    flags = tuple(i in row_of for i in order)
    rows = tuple(tuple(seed.B[row_of[i]][j] for j in order) for i in order if i in row_of)
    return (tuple(rendered[i] for i in order), flags, rows)


def key_digest(key: tuple) -> str:
    return hashlib.sha1(repr(key).encode()).hexdigest()[:12]


@dataclass
class GraphNode:
    index: int
    frame: Frame
    depth: int
    key: tuple | None = None
    neighbors: dict = field(default_factory=dict)  # position -> node index


@dataclass
class ExchangeGraph:
    nodes: list[GraphNode]
    folded: bool
    closed: bool
    complete: bool
    max_depth: int
    failures: list[dict] = field(default_factory=list)

    @property
    def root(self) -> GraphNode:
        return self.nodes[0]

    def edges(self) -> list[tuple[int, int, int]]:
        """(source, target, position) with source < target, one entry per unordered pair."""
        seen = set()
        out = []
        for node in self.nodes:
            for p, j in sorted(node.neighbors.items()):
                pair = (min(node.index, j), max(node.index, j))
                if pair in seen or node.index == j:
                    continue
                seen.add(pair)
                out.append((node.index, j, p))
        return out

    def degrees(self) -> list[int]:
        return [len(set(n.neighbors.values())) for n in self.nodes]

    def is_cycle(self) -> bool:
        if len(self.nodes) < 3 or any(d != 2 for d in self.degrees()):
            return False
        seen = {0}
        stack = [0]
        while stack:
            i = stack.pop()
            for j in self.nodes[i].neighbors.values():
                if j not in seen:
                    seen.add(j)
                    stack.append(j)
        return len(seen) == len(self.nodes)

    def summary(self) -> dict:
        return {
            "nodes": len(self.nodes),
            "edges": len(self.edges()),
            "folded": self.folded,
            "closed": self.closed,
            "complete": self.complete,
            "max_depth": self.max_depth,
            "failures": self.failures,
        }

    def to_dot(self) -> str:
        lines = ["graph exchange {"]
        for node in self.nodes:
            label = node.frame.vertex_id
            if node.key is not None:
                label += "\\n" + key_digest(node.key)
            lines.append(f'  n{node.index} [label="{label}"];')
        for a, b, p in self.edges():
            lines.append(f'  n{a} -- n{b} [label="{p + 1}"];')
        lines.append("}")
        return "\n".join(lines) + "\n"

    def variables_json(self) -> dict:
        out = {}
        for node in self.nodes:
            seed = node.frame.seed
            out[node.frame.vertex_id] = {
                str(lab): render(v) for lab, v in zip(seed.basis.labels, node.frame.vars)
            }
        return out


def _mutate_task(args):
    frame, p, rule = args
    try:
        return mutate_frame_at(frame, p, rule), None
    except LaurentFailure as exc:
        return None, {"path": format_path(exc.path), "reason": exc.reason}


def explore(
    seed: Seed,
    max_depth: int,
    fold: bool = True,
    max_nodes: int = 10000,
    jobs: int | None = None,
    rule: ExchangeRule = standard_rule,
) -> ExchangeGraph:
    """Breadth-first exploration of the exchange tree, optionally folded.

    Tree mode never takes the step straight back along the edge it came from.
    Results do not depend on ``jobs``: each level is expanded in a fixed
    order and merged sequentially.
    """
    if max_depth < 0 or max_nodes < 1:
        raise ValueError("depth and node limits must be nonnegative and positive")
    jobs = default_jobs() if jobs is None else max(1, jobs)
    root = GraphNode(0, Frame.root(seed), 0)
    if fold:
        root.key = canonical_key(root.frame)
    nodes = [root]
    registry = {root.key: 0} if fold else {}
    level = [0]
    failures: list[dict] = []
    complete = True
    pool = ProcessPoolExecutor(max_workers=jobs) if jobs > 1 else None
    try:
        depth = 0
        while level and depth < max_depth:
            tasks = []
            for i in level:
                node = nodes[i]
                frame = node.frame
                back = frame.path[-1] - 1 if frame.path else None
                for p in frame.seed.ex_positions:
                    if p == back:
                        continue
                    tasks.append((i, p))
            if pool is not None:
                results = list(pool.map(_mutate_task, [(nodes[i].frame, p, rule) for i, p in tasks], chunksize=4))
            else:
                results = [_mutate_task((nodes[i].frame, p, rule)) for i, p in tasks]
            nxt = []
            for (i, p), (child, err) in zip(tasks, results):
                if err is not None:
                    failures.append(err)
                    continue
                if fold:
                    key = canonical_key(child)
                    j = registry.get(key)
                    if j is not None:
                        nodes[i].neighbors[p] = j
                        nodes[j].neighbors.setdefault(_position_in(nodes[j].frame, child.vars[p]), i)
                        continue
                if len(nodes) >= max_nodes:
                    complete = False
                    continue
                j = len(nodes)
                new = GraphNode(j, child, depth + 1, key if fold else None)
                new.neighbors[p] = i
                nodes[i].neighbors[p] = j
                nodes.append(new)
                if fold:
                    registry[key] = j
                nxt.append(j)
            level = nxt
            depth += 1
    finally:
        if pool is not None:
            pool.shutdown()
    if fold and level:
        # the last level's own mutations may still close the graph
        closed = complete and not failures and _closes(nodes, level, registry, rule)
    else:
        closed = fold and complete and not failures and not level
    return ExchangeGraph(nodes, fold, closed, complete, max_depth, failures)


def _closes(nodes: list[GraphNode], level: list[int], registry: dict, rule: ExchangeRule) -> bool:
    """Whether every mutation out of the final level lands on a known node."""
    ok = True
    for i in level:
        frame = nodes[i].frame
        back = frame.path[-1] - 1 if frame.path else None
        for p in frame.seed.ex_positions:
            if p == back:
                continue
            try:
                child = mutate_frame_at(frame, p, rule)
            except LaurentFailure:
                return False
            j = registry.get(canonical_key(child))
            if j is None:
                ok = False
            else:
                nodes[i].neighbors[p] = j
                nodes[j].neighbors.setdefault(_position_in(nodes[j].frame, child.vars[p]), i)
    return ok


def _position_in(frame: Frame, var: QLaurent) -> int:
    for q, v in enumerate(frame.vars):
        if v == var:
            return q
    raise ValueError("folded frames do not share the variable")


def collect_variables(graph: ExchangeGraph) -> dict:
    """Distinct mutable variables across the graph, plus the frozen monomials."""
    root = graph.root.frame
    mutable: dict[str, QLaurent] = {}
    for node in graph.nodes:
        seed = node.frame.seed
        for p in seed.ex_positions:
            v = node.frame.vars[p]
            mutable.setdefault(render(v), v)
    seed = root.seed
    frozen = []
    for lab in seed.frozen:
        frozen.append({
            "label": lab.text,
            "variable": root.var(lab),
            "invertible": lab in seed.inv,
        })
    return {"mutable": [mutable[k] for k in sorted(mutable)], "frozen": frozen}


def verify_laurent(
    seed: Seed,
    depth: int,
    max_nodes: int = 100000,
    jobs: int | None = None,
    rule: ExchangeRule = standard_rule,
) -> dict:
    """Explore the unfolded tree and report whether every division was exact."""
    graph = explore(seed, depth, fold=False, max_nodes=max_nodes, jobs=jobs, rule=rule)
    return {
        "ok": not graph.failures and graph.complete,
        "nodes": len(graph.nodes),
        "depth": depth,
        "complete": graph.complete,
        "failures": graph.failures,
    }


def frames_by_path(seed: Seed, depth: int, max_nodes: int = 100000) -> dict[tuple[int, ...], Frame]:
    graph = explore(seed, depth, fold=False, max_nodes=max_nodes, jobs=1)
    return {node.frame.path: node.frame for node in graph.nodes}


def check_specialization(seed: Seed, depth: int, max_nodes: int = 100000) -> dict:
    """Compare s -> 1 of the quantum variables with the commutative mutation."""
    if seed.L is None:
        raise SeedError("specialization check needs a quantum seed")
    quantum = frames_by_path(seed, depth, max_nodes)
    classical = frames_by_path(seed.commutative(), depth, max_nodes)
    mismatches = []
    for path, frame in quantum.items():
        other = classical.get(path)
        if other is None:
            mismatches.append({"path": list(path), "reason": "missing in commutative run"})
            continue
        specialized = specialize_frame(frame)
        if any(a.terms != b.terms for a, b in zip(specialized, other.vars)):
            mismatches.append({"path": list(path), "reason": "variables differ"})
    return {"ok": not mismatches and len(quantum) == len(classical), "frames": len(quantum), "mismatches": mismatches}


def check_frame_involution(frame: Frame, k: Label | str) -> bool:
    """Mutating at k and back gives the same variables and seed data."""
    if isinstance(k, str):
        k = Label(k)
    p = frame.seed.basis.index(k)
    once = mutate_frame(frame, k)
    twice = mutate_frame(once, once.seed.basis.labels[p])
    return twice.vars == frame.vars and twice.seed.B == frame.seed.B and twice.seed.L == frame.seed.L


def dump_variables(graph: ExchangeGraph) -> str:
    return json.dumps(graph.variables_json(), indent=2, sort_keys=True)
