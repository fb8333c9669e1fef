"""Rooted cluster morphisms at the level of labels.

An ex-admissible map sends each source label to a target label or to 0
(None here), with exchangeable labels going to exchangeable labels or 0.
Labels sent to 0 carry an integer specialization value, 1 unless stated.

Mutation keeps positions fixed (the mutated label is replaced in place),
so the mutated maps phi_k are the same map on positions at every vertex.
Sequences are given in the order the mutations are applied.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from .acs import SIGNS, acs_from_seed, tree_seeds
from .acscat import AcsMorphism
from .engine import Frame, mutate_frame_at
from .lattice import Label, LinearMap
from .seed import Seed, mutate_seed


class RcmError(ValueError):
    """An ill-formed label map or an inadmissible sequence."""


class SubstitutionError(RcmError):
    """A specialized variable cannot be substituted (missing value or division by zero)."""


@dataclass(frozen=True)
class ExAdmissibleMap:
    source: Seed
    target: Seed
    phi: dict  # source label text -> target label text or None
    values: dict = field(default_factory=dict)  # source label text -> int, for labels sent to 0

    def __post_init__(self) -> None:
        src = {b.text for b in self.source.basis}
        tgt = {b.text for b in self.target.basis}
        phi = {str(k): (None if v in (None, 0, "0") else str(v)) for k, v in self.phi.items()}
        missing = src - set(phi)
        if missing:
            raise RcmError(f"phi is not defined on {sorted(missing)}")
        extra = set(phi) - src
        if extra:
            raise RcmError(f"phi mentions unknown labels {sorted(extra)}")
        for k, v in phi.items():
            if v is not None and v not in tgt:
                raise RcmError(f"{k} is sent to {v}, which is not a target label")
        ex2 = {k.text for k in self.target.ex}
        for k in self.source.ex:
            v = phi[k.text]
            if v is not None and v not in ex2:
                raise RcmError(f"exchangeable {k.text} is sent to frozen {v}")
        values = {}
        for k, v in phi.items():
            if v is None:
                values[k] = self.values.get(k, 1)
        object.__setattr__(self, "phi", phi)
        object.__setattr__(self, "values", values)

    @property
    def positions(self) -> tuple[int | None, ...]:
        """phi on positions: source index -> target index or None."""
        tb = self.target.basis
        return tuple(
            None if self.phi[b.text] is None else tb.index(Label(self.phi[b.text])) for b in self.source.basis
        )

    def with_values(self, values: Mapping[str, int]) -> "ExAdmissibleMap":
        return ExAdmissibleMap(self.source, self.target, self.phi, {**self.values, **values})


def identity_map(seed: Seed) -> ExAdmissibleMap:
    return ExAdmissibleMap(seed, seed, {b.text: b.text for b in seed.basis})


def drop_frozen(seed: Seed, label: str, value: int = 1) -> ExAdmissibleMap:
    """Specialize one frozen variable: the target forgets that label's row."""
    lab = Label(label)
    if lab not in seed.basis.labels or lab in seed.ex:
        raise RcmError(f"{label} is not a frozen label")
    i = seed.basis.index(lab)
    keep = [b.text for b in seed.basis if b != lab]
    beta = {k.text: [c for j, c in enumerate(seed.B[seed.ex_row(k)]) if j != i] for k in seed.ex}
    target = Seed.build(keep, [k.text for k in seed.ex], beta)
    phi = {b.text: (None if b == lab else b.text) for b in seed.basis}
    return ExAdmissibleMap(seed.commutative(), target, phi, {label: value})


# ---------------------------------------------------------------------------
# sequences


@dataclass
class Pushed:
    sequence: tuple[str, ...]  # source labels, as applied
    image: tuple[str, ...]  # F of the sequence, target labels as applied
    image_positions: tuple[int, ...]  # 0-based target positions of the image
    reduced: tuple[int, ...]  # image with immediate back-mutations cancelled
    phi_k: dict  # label of the mutated source seed -> label of the mutated target seed or None
    source_seed: Seed
    target_seed: Seed

    def as_json(self) -> dict:
        return {
            "sequence": list(self.sequence),
            "image": list(self.image),
            "reduced_positions": [p + 1 for p in self.reduced],
            "phi": dict(self.phi_k),
        }


def push_sequence(phi: ExAdmissibleMap, seq: Sequence[str]) -> Pushed:
    """F of an admissible sequence together with the mutated label map."""
    pos = phi.positions
    s1, s2 = phi.source, phi.target
    image: list[str] = []
    image_pos: list[int] = []
    stack: list[int] = []
    for done, lab in enumerate(seq):
        k = Label(lab)
        if k not in s1.ex:
            raise RcmError(f"{lab} is not exchangeable after {done} steps; sequence is inadmissible")
        p = s1.basis.index(k)
        s1 = mutate_seed(s1, k)
        q = pos[p]
        if q is None:
            continue
        kq = s2.basis.labels[q]
        image.append(kq.text)
        image_pos.append(q)
        s2 = mutate_seed(s2, kq)
        if stack and stack[-1] == q:
            stack.pop()
        else:
            stack.append(q)
    phi_k = {
        b.text: (None if pos[i] is None else s2.basis.labels[pos[i]].text) for i, b in enumerate(s1.basis)
    }
    return Pushed(tuple(seq), tuple(image), tuple(image_pos), tuple(stack), phi_k, s1, s2)


def is_ex_admissible(phi_k: Mapping[str, str | None], source: Seed, target: Seed) -> bool:
    ex2 = {k.text for k in target.ex}
    return all(phi_k[k.text] is None or phi_k[k.text] in ex2 for k in source.ex)


# ---------------------------------------------------------------------------
# signs


def _pushed_row(phi: ExAdmissibleMap, row: Sequence[int]) -> list[int]:
    out = [0] * phi.target.n
    for c, q in zip(row, phi.positions):
        if q is not None and c:
            out[q] += c
    return out


def column_signs(phi: ExAdmissibleMap) -> dict[str, str]:
    """Per exchangeable k: '+', '-', '0' (both sides vanish, either sign) or 'x' (neither)."""
    pos = phi.positions
    out = {}
    for k in phi.source.ex:
        lhs = _pushed_row(phi, phi.source.B[phi.source.ex_row(k)])
        q = pos[phi.source.basis.index(k)]
        rhs = [0] * phi.target.n if q is None else list(phi.target.B[phi.target.ex_row(phi.target.basis.labels[q])])
        if not any(lhs) and not any(rhs):
            out[k.text] = "0"
        elif lhs == rhs:
            out[k.text] = "+"
        elif lhs == [-c for c in rhs]:
            out[k.text] = "-"
        else:
            out[k.text] = "x"
    return out


def _ex_components(seed: Seed) -> list[list[str]]:
    ex = [k.text for k in seed.ex]
    idx = {k: i for i, k in enumerate(ex)}
    parent = list(range(len(ex)))

    def find(i: int) -> int:
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for k in seed.ex:
        row = seed.B[seed.ex_row(k)]
        for j in seed.ex:
            if row[seed.basis.index(j)]:
                parent[find(idx[k.text])] = find(idx[j.text])
    groups: dict[int, list[str]] = {}
    for k in ex:
        groups.setdefault(find(idx[k]), []).append(k)
    return sorted(groups.values())


def _verdict(signs: Iterable[str]) -> str:
    signs = set(signs) - {"0"}
    if "x" in signs:
        return "inconsistent"
    if signs <= {"+"}:
        return "positive"
    if signs == {"-"}:
        return "negative"
    return "mixed"


def consistently_positive(phi: ExAdmissibleMap) -> dict:
    """Compare phi*(beta_1(k)) with beta_2(phi(k)) column by column."""
    cols = column_signs(phi)
    comps = [{"labels": c, "verdict": _verdict(cols[k] for k in c)} for c in _ex_components(phi.source)]
    verdict = _verdict(cols.values())
    if verdict == "mixed" and any(c["verdict"] in ("mixed", "inconsistent") for c in comps):
        verdict = "inconsistent"
    return {"verdict": verdict, "columns": cols, "components": comps}


# ---------------------------------------------------------------------------
# induced morphism


def _positions_index(seed: Seed, depth: int) -> dict[tuple[int, ...], str]:
    return {s.path: vid for vid, s, _, _ in tree_seeds(seed, depth)}


def _reduce(phi_pos: Sequence[int | None], path: Sequence[int]) -> tuple[int, ...]:
    stack: list[int] = []
    for p in path:
        q = phi_pos[p - 1]
        if q is None:
            continue
        if stack and stack[-1] == q + 1:
            stack.pop()
        else:
            stack.append(q + 1)
    return tuple(stack)


def induced_acs_morphism(phi: ExAdmissibleMap, depth: int) -> AcsMorphism:
    """The ACS morphism of a consistently positive map between tree truncations."""
    verdict = consistently_positive(phi)["verdict"]
    if verdict == "negative":
        raise NotImplementedError("consistently negative maps are not handled")
    if verdict != "positive":
        raise RcmError(f"map is {verdict}, not consistently positive")
    src = acs_from_seed(phi.source, depth)
    tgt = acs_from_seed(phi.target, depth)
    pos = phi.positions
    tindex = _positions_index(phi.target, depth)
    tseeds = {vid: s for vid, s, _, _ in tree_seeds(phi.target, depth)}
    F_obj, chi, alpha = {}, {}, {}
    for vid, s, _, _ in tree_seeds(phi.source, depth):
        w = tindex[_reduce(pos, s.path)]
        F_obj[vid] = w
        t = tseeds[w]
        Xs, As, Xt, At = src.X[vid], src.A[vid], tgt.X[w], tgt.A[w]
        xcols, acols = {}, {}
        for i, b in enumerate(s.basis):
            q = pos[i]
            img = {} if q is None else {t.basis.labels[q]: 1}
            if b in s.ex:
                xcols[b] = Xt.element(img)
            acols[b.toggled()] = At.element({k.toggled(): c for k, c in img.items()})
        chi[vid] = LinearMap.from_columns(Xs, Xt, xcols)
        alpha[vid] = LinearMap.from_columns(As, At, acols)
    F_edge = {}
    for arr in src.arrows.values():
        a, b = F_obj[arr.source], F_obj[arr.target]
        for sign in SIGNS:
            F_edge[(arr.id, sign)] = () if a == b else ((f"{a}>{b}", sign),)
    return AcsMorphism(src, tgt, F_obj, F_edge, chi, alpha)


# ---------------------------------------------------------------------------
# variables


def _substitute(f, phi: ExAdmissibleMap, n2: int) -> dict[tuple[int, ...], Fraction]:
    """Commutative image of a source variable under the substitution."""
    pos = phi.positions
    labels = [b.text for b in phi.source.basis]
    out: dict[tuple[int, ...], Fraction] = {}
    for exp, coeffs in f.terms.items():
        c = Fraction(sum(coeffs.values()))
        e2 = [0] * n2
        for i, e in enumerate(exp):
            if not e:
                continue
            q = pos[i]
            if q is not None:
                e2[q] += e
                continue
            val = phi.values.get(labels[i])
            if val is None:
                raise SubstitutionError(f"no specialization value for {labels[i]}")
            if val == 0 and e < 0:
                raise SubstitutionError(f"{labels[i]} specialized to 0 appears with a negative power")
            c *= Fraction(val) ** e
        key = tuple(e2)
        out[key] = out.get(key, Fraction(0)) + c
    return {k: v for k, v in out.items() if v}


def _commutative_terms(f) -> dict[tuple[int, ...], Fraction]:
    out = {}
    for exp, coeffs in f.terms.items():
        c = sum(coeffs.values())
        if c:
            out[exp] = Fraction(c)
    return out


def _source_frames(seed: Seed, depth: int):
    """Frames along every tree path without immediate back-mutation."""
    root = Frame.root(seed)
    out = [((), root)]
    frontier = [((), root)]
    for _ in range(depth):
        nxt = []
        for path, fr in frontier:
            for p in fr.seed.ex_positions:
                if path and path[-1] == p:
                    continue
                child = mutate_frame_at(fr, p)
                nxt.append((path + (p,), child))
        out.extend(nxt)
        frontier = nxt
    return out


def verify_variable_level(phi: ExAdmissibleMap, depth: int) -> dict:
    """Check f(source variable) = target variable for all paths of length <= depth."""
    src_seed = phi.source.commutative()
    tgt_seed = phi.target.commutative()
    pos = phi.positions
    target_frames: dict[tuple[int, ...], Frame] = {(): Frame.root(tgt_seed)}

    def target_frame(image: tuple[int, ...]) -> Frame:
        got = target_frames.get(image)
        if got is None:
            got = mutate_frame_at(target_frame(image[:-1]), image[-1])
            target_frames[image] = got
        return got

    mismatches = []
    checked = 0
    for path, fr in _source_frames(src_seed, depth):
        image = tuple(pos[p] for p in path if pos[p] is not None)
        tf = target_frame(image)
        for i, v in enumerate(fr.vars):
            q = pos[i]
            if q is None:
                continue
            checked += 1
            lhs = _substitute(v, phi, tgt_seed.n)
            rhs = _commutative_terms(tf.vars[q])
            if lhs != rhs:
                mismatches.append(
                    {
                        "path": [p + 1 for p in path],
                        "label": fr.seed.basis.labels[i].text,
                        "target_label": tf.seed.basis.labels[q].text,
                    }
                )
    return {"ok": not mismatches, "checked": checked, "paths": len(target_frames), "mismatches": mismatches}


def criterion_example() -> ExAdmissibleMap:
    """Three labels with x3 frozen onto the rank-two A2 seed, x3 specialized to 1."""
    source = Seed.build(["x1", "x2", "x3"], ["x1", "x2"], {"x1": [0, 1, 0], "x2": [-1, 0, 1]})
    target = Seed.build(["y1", "y2"], ["y1", "y2"], {"y1": [0, 1], "y2": [-1, 0]})
    return ExAdmissibleMap(source, target, {"x1": "y1", "x2": "y2", "x3": None}, {"x3": 1})


__all__ = [
    "ExAdmissibleMap",
    "Pushed",
    "RcmError",
    "SubstitutionError",
    "column_signs",
    "consistently_positive",
    "criterion_example",
    "drop_frozen",
    "identity_map",
    "induced_acs_morphism",
    "is_ex_admissible",
    "push_sequence",
    "verify_variable_level",
]
