"""JSON documents for seeds, truncations, morphisms and label maps."""

from __future__ import annotations

import json
from pathlib import Path
from typing import Any

from .acs import AcsTruncation, Arrow
from .acscat import AcsMorphism
from .lattice import Basis, BilinearForm, Label, LinearMap
from .rcm import ExAdmissibleMap
from .seed import Seed


class FormatError(ValueError):
    """A document that does not describe the expected object."""


def _require(doc: dict, *keys: str) -> None:
    missing = [k for k in keys if k not in doc]
    if missing:
        raise FormatError(f"missing keys: {', '.join(missing)}")


def _ints(rows) -> list[list[int]]:
    return [[int(c) for c in r] for r in rows]


# ---------------------------------------------------------------------------
# seeds


def seed_to_json(seed: Seed) -> dict:
    labels = [b.text for b in seed.basis]
    doc: dict[str, Any] = {
        "labels": labels,
        "order": labels,
        "ex": [k.text for k in seed.ex],
        "inv": sorted(b.text for b in seed.inv),
        "beta_columns": {k.text: list(seed.B[i]) for i, k in enumerate(seed.ex)},
    }
    if seed.L is not None:
        doc["lambda_columns"] = {b: list(seed.L[i]) for i, b in enumerate(labels)}
    if seed.path:
        doc["path"] = list(seed.path)
    return doc


def seed_from_json(doc: dict) -> Seed:
    if not isinstance(doc, dict):
        raise FormatError("a seed document is a JSON object")
    _require(doc, "labels", "ex", "beta_columns")
    order = [str(t) for t in doc.get("order") or doc["labels"]]
    if sorted(order) != sorted(str(t) for t in doc["labels"]):
        raise FormatError("order must list the same labels")
    ex = [str(t) for t in doc["ex"]]
    cols = doc["beta_columns"]
    if set(cols) != set(ex):
        raise FormatError("beta_columns must have one column per exchangeable label")
    for k in ex:
        if len(cols[k]) != len(order):
            raise FormatError(f"beta column {k} has the wrong length")
    lam = doc.get("lambda_columns")
    if lam is not None:
        if set(lam) != set(order) or any(len(lam[b]) != len(order) for b in order):
            raise FormatError("lambda_columns must be square over the labels")
        lam = {b: [int(c) for c in lam[b]] for b in order}
    seed = Seed.build(order, ex, {k: [int(c) for c in cols[k]] for k in ex}, lam, doc.get("inv", ()))
    if doc.get("path"):
        seed = Seed(seed.basis, seed.ex, seed.B, seed.L, seed.inv, tuple(int(p) for p in doc["path"]))
    return seed


# ---------------------------------------------------------------------------
# truncations


def _basis_json(b: Basis) -> list[str]:
    return [str(lab) for lab in b]


def _basis_from(items) -> Basis:
    return Basis(tuple(Label.parse(str(t)) for t in items))


def acs_to_json(acs: AcsTruncation) -> dict:
    doc: dict[str, Any] = {
        "vertices": list(acs.vertices),
        "root": acs.root,
        "arrows": [
            {"id": a.id, "source": a.source, "target": a.target, "reverse": a.reverse} for a in acs.arrows.values()
        ],
        "X": {v: _basis_json(acs.X[v]) for v in acs.vertices},
        "A": {v: _basis_json(acs.A[v]) for v in acs.vertices},
        "beta": {v: [list(r) for r in acs.beta[v].matrix] for v in acs.vertices},
        "pairing": {v: [list(r) for r in acs.pairing[v].gram] for v in acs.vertices},
        "X_maps": [
            {"arrow": aid, "sign": s, "matrix": [list(r) for r in m.matrix]} for (aid, s), m in acs.X_maps.items()
        ],
        "A_maps": [
            {"arrow": aid, "sign": s, "matrix": [list(r) for r in m.matrix]} for (aid, s), m in acs.A_maps.items()
        ],
    }
    if acs.lam is not None:
        doc["lambda"] = {v: [list(r) for r in acs.lam[v].matrix] for v in acs.vertices}
    return doc


def acs_from_json(doc: dict) -> AcsTruncation:
    if not isinstance(doc, dict):
        raise FormatError("an ACS document is a JSON object")
    _require(doc, "vertices", "arrows", "X", "A", "beta", "pairing", "X_maps", "A_maps")
    vertices = tuple(str(v) for v in doc["vertices"])
    X = {v: _basis_from(doc["X"][v]) for v in vertices}
    A = {v: _basis_from(doc["A"][v]) for v in vertices}
    arrows = {}
    for a in doc["arrows"]:
        arrows[a["id"]] = Arrow(a["id"], a["source"], a["target"], a.get("reverse"))
    X_maps, A_maps = {}, {}
    for rec in doc["X_maps"]:
        arr = arrows[rec["arrow"]]
        X_maps[(arr.id, rec["sign"])] = LinearMap(X[arr.target], X[arr.source], _ints(rec["matrix"]))
    for rec in doc["A_maps"]:
        arr = arrows[rec["arrow"]]
        A_maps[(arr.id, rec["sign"])] = LinearMap(A[arr.source], A[arr.target], _ints(rec["matrix"]))
    beta = {v: LinearMap(X[v], A[v], _ints(doc["beta"][v])) for v in vertices}
    pairing = {v: BilinearForm(A[v], X[v], _ints(doc["pairing"][v])) for v in vertices}
    lam = None
    if doc.get("lambda") is not None:
        lam = {v: LinearMap(A[v], A[v].dual(), _ints(doc["lambda"][v])) for v in vertices}
    return AcsTruncation(vertices, arrows, X, A, X_maps, A_maps, beta, pairing, lam, doc.get("root"))


# ---------------------------------------------------------------------------
# morphisms


def morphism_to_json(m: AcsMorphism) -> dict:
    edges = []
    for (aid, s), image in m.F_edge.items():
        edges.append({"arrow": aid, "sign": s, "image": [list(x) for x in image] if image else "contract"})
    return {
        "source": acs_to_json(m.source),
        "target": acs_to_json(m.target),
        "vertex_map": dict(m.F_obj),
        "edge_map": edges,
        "chi": {v: [list(r) for r in mp.matrix] for v, mp in m.chi.items()},
        "alpha": {v: [list(r) for r in mp.matrix] for v, mp in m.alpha.items()},
    }


def morphism_from_json(doc: dict) -> AcsMorphism:
    _require(doc, "source", "target", "vertex_map", "edge_map", "chi", "alpha")
    src, tgt = acs_from_json(doc["source"]), acs_from_json(doc["target"])
    F_obj = {str(k): str(v) for k, v in doc["vertex_map"].items()}
    F_edge = {}
    for rec in doc["edge_map"]:
        img = rec["image"]
        F_edge[(rec["arrow"], rec["sign"])] = () if img == "contract" else tuple((a, s) for a, s in img)
    chi = {v: LinearMap(src.X[v], tgt.X[F_obj[v]], _ints(mx)) for v, mx in doc["chi"].items()}
    alpha = {v: LinearMap(src.A[v], tgt.A[F_obj[v]], _ints(mx)) for v, mx in doc["alpha"].items()}
    return AcsMorphism(src, tgt, F_obj, F_edge, chi, alpha)


# ---------------------------------------------------------------------------
# label maps


def phi_to_json(phi: ExAdmissibleMap) -> dict:
    return {
        "source": seed_to_json(phi.source),
        "target": seed_to_json(phi.target),
        "map": {k: (0 if v is None else v) for k, v in phi.phi.items()},
        "specialization": dict(phi.values),
    }


def phi_from_json(doc: dict, base: Path | None = None) -> ExAdmissibleMap:
    """Seeds may be embedded or given as file names relative to ``base``."""
    _require(doc, "source", "target", "map")

    def seed_ref(ref) -> Seed:
        if isinstance(ref, str):
            path = Path(ref) if base is None else Path(base) / ref
            return seed_from_json(json.loads(path.read_text()))
        return seed_from_json(ref)

    return ExAdmissibleMap(seed_ref(doc["source"]), seed_ref(doc["target"]), dict(doc["map"]), dict(doc.get("specialization", {})))


# ---------------------------------------------------------------------------
# files


def dumps(doc: Any) -> str:
    return json.dumps(doc, indent=2, sort_keys=True)


def load(path: str | Path) -> Any:
    return json.loads(Path(path).read_text())


def save(doc: Any, path: str | Path) -> None:
    Path(path).write_text(dumps(doc) + "\n")
