"""Command-line entry point.

Exit codes: 0 when every requested check passes, 1 when a check fails,
2 for usage and input errors.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Callable

from . import io
from .acs import AcsError, acs_from_seed, classify, principal_part, seed_from_acs, verify_acs
from .acscat import coproduct, product, verify_morphism
from .engine import collect_variables, default_jobs, explore
from .lattice import Label
from .rcm import (
    RcmError,
    consistently_positive,
    induced_acs_morphism,
    is_ex_admissible,
    push_sequence,
    verify_variable_level,
)
from .seed import SeedError, check_involution, mutate_seed, mutation_step, validate
from .suites import (
    compat_suite,
    involution_suite,
    laurent_corpus,
    laurent_suite,
    random_corpus,
    sign_suite,
    specialization_suite,
    tree_seeds_upto,
)
from .surface import SurfaceError, acs_from_polygon, enumerate_triangulations, hexagon_report

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


class Report:
    """A JSON record plus the lines used for the human rendering."""

    def __init__(self, ok: bool, data: dict, lines: list[str] | None = None):
        self.ok = ok
        self.data = {"ok": ok, **data}
        self.lines = lines or []


def _load_seed(path: str):
    return io.seed_from_json(io.load(path))


def _load_acs(path: str):
    return io.acs_from_json(io.load(path))


def _violations(vs: list[dict], key: str = "check") -> list[str]:
    return [f"  violated: {v[key]} at {v['where']}" + (f" ({v['detail']})" if v.get("detail") else "") for v in vs]


# ---------------------------------------------------------------------------
# seed


def cmd_seed_validate(a) -> Report:
    seed = _load_seed(a.file)
    bad = validate(seed)
    lines = ["valid"] if not bad else ["invalid"] + _violations(bad, "identity")
    return Report(not bad, {"violations": bad}, lines)


def cmd_seed_mutate(a) -> Report:
    seed = _load_seed(a.file)
    k = Label(a.k)
    if k not in seed.ex:
        raise UsageError(f"{a.k} is not an exchangeable label")
    new = mutate_seed(seed, k, a.sign)
    data = {"seed": io.seed_to_json(new)}
    ok = True
    lines = [io.dumps(data["seed"])]
    if a.trace:
        step = mutation_step(seed, k, a.sign)
        back = check_involution(seed, k, a.sign)
        ok = back
        data["step"] = {"direction": step.direction.text, "fresh": step.fresh.text, "sign": step.sign}
        data["involution"] = back
        lines.insert(0, f"mutate {k.text} -> {step.fresh.text} (sign {a.sign}); mutating back {'restores' if back else 'DOES NOT restore'} the seed")
    if a.output:
        io.save(data["seed"], a.output)
    return Report(ok, data, lines)


# ---------------------------------------------------------------------------
# explore / verify


def cmd_explore(a) -> Report:
    seed = _load_seed(a.file)
    g = explore(seed, a.depth, fold=a.fold, max_nodes=a.max_nodes, jobs=a.jobs)
    summ = g.summary()
    vars_ = collect_variables(g)
    summ["mutable_variables"] = len(vars_["mutable"])
    summ["frozen_variables"] = len(vars_["frozen"])
    if a.fold:
        summ["cycle"] = g.is_cycle()
    if a.dot:
        Path(a.dot).write_text(g.to_dot())
    if a.vars:
        io.save(g.variables_json(), a.vars)
    state = "closed" if g.closed else ("complete" if g.complete else "open")
    line = f"{state}, {len(g.nodes)} clusters"
    if a.fold:
        line += f", {summ['mutable_variables']} mutable and {summ['frozen_variables']} frozen variables"
    lines = [line] + [f"  division failure on path {f.get('path')}: {f.get('reason')}" for f in g.failures]
    return Report(not g.failures, summ, lines)


SUITES: dict[str, Callable] = {
    "involution": involution_suite,
    "signs": sign_suite,
    "compat": compat_suite,
}


def cmd_verify(a) -> Report:
    seeds = []
    if a.file:
        seeds.append(_load_seed(a.file))
    if not seeds and not a.rand:
        raise UsageError("give a seed file or --rand N")
    if a.what in ("laurent", "specialization"):
        if a.rand:
            seeds += laurent_corpus(a.rand, a.rng_seed)
        if a.what == "laurent":
            res = laurent_suite(seeds, a.depth, jobs=a.jobs)
        else:
            res = specialization_suite([s for s in seeds if s.L is not None], a.depth)
    else:
        if a.rand:
            seeds += random_corpus(a.rand, a.rng_seed)
        expanded = [t for s in seeds for t in tree_seeds_upto(s, a.depth)]
        res = SUITES[a.what](expanded)
        res["seeds"] = len(expanded)
    lines = [f"{a.what}: {'pass' if res['ok'] else 'FAIL'} on {res['seeds']} seeds"]
    lines += [f"  {json.dumps(f)}" for f in res["failures"][:10]]
    return Report(res["ok"], res, lines)


# ---------------------------------------------------------------------------
# acs


def _acs_lines(name: str, rep: dict) -> list[str]:
    head = f"{name}: {'valid' if rep['ok'] else 'INVALID'} ({rep['vertices']} vertices, {rep['arrows']} arrows)"
    return [head] + _violations(rep["violations"])


def cmd_acs_extract(a) -> Report:
    acs = acs_from_seed(_load_seed(a.file), a.depth)
    io.save(io.acs_to_json(acs), a.output)
    rep = verify_acs(acs)
    return Report(rep["ok"], {"written": a.output, **rep}, _acs_lines(a.output, rep))


def cmd_acs_check(a) -> Report:
    acs = _load_acs(a.file)
    rep = verify_acs(acs)
    cls = classify(acs)
    data = {**rep, "classification": {k: v for k, v in cls.items() if k != "per_vertex"}}
    lines = _acs_lines(a.file, rep)
    lines.append(f"  rank {cls['rank']} (mutable {cls['mutable_rank']}, frozen {cls['frozen_rank']}), "
                 f"{cls['weak_components']} weak component(s)")
    return Report(rep["ok"], data, lines)


def cmd_acs_principal(a) -> Report:
    acs = principal_part(_load_acs(a.file))
    rep = verify_acs(acs)
    cls = classify(acs)
    if a.output:
        io.save(io.acs_to_json(acs), a.output)
    lines = _acs_lines("principal part", rep) + [f"  frozen rank {cls['frozen_rank']}"]
    return Report(rep["ok"], {**rep, "frozen_rank": cls["frozen_rank"]}, lines)


def cmd_acs_to_seed(a) -> Report:
    acs = _load_acs(a.file)
    if a.vertex not in acs.vertices:
        raise UsageError(f"no vertex {a.vertex}")
    seed = seed_from_acs(acs, a.vertex)
    bad = validate(seed)
    doc = io.seed_to_json(seed)
    return Report(not bad, {"seed": doc, "violations": bad}, [io.dumps(doc)] + _violations(bad, "identity"))


# ---------------------------------------------------------------------------
# category


def cmd_cat_check(a) -> Report:
    m = io.morphism_from_json(io.load(a.file))
    quantum = None if a.quantum is None else a.quantum == "yes"
    rep = verify_morphism(m, quantum=quantum)
    lines = [f"morphism: {'valid' if rep['ok'] else 'INVALID'}"] + _violations(rep["violations"])
    return Report(rep["ok"], rep, lines)


def cmd_cat_build(a) -> Report:
    first, second = _load_acs(a.first), _load_acs(a.second)
    build = product if a.op == "product" else coproduct
    obj, m1, m2 = build(first, second)
    rep = verify_acs(obj)
    quantum = False if a.op == "product" else None
    r1, r2 = verify_morphism(m1, quantum=quantum), verify_morphism(m2, quantum=quantum)
    ok = rep["ok"] and r1["ok"] and r2["ok"]
    if a.output:
        io.save(io.acs_to_json(obj), a.output)
    maps = "projections" if a.op == "product" else "injections"
    lines = _acs_lines(a.op, rep) + [f"  {maps}: {'valid' if r1['ok'] and r2['ok'] else 'INVALID'}"]
    lines += _violations(r1["violations"] + r2["violations"])
    return Report(ok, {**rep, "maps": [r1, r2]}, lines)


# ---------------------------------------------------------------------------
# surface


def cmd_surface_enumerate(a) -> Report:
    ts = enumerate_triangulations(a.n)
    names = [t.name for t in ts]
    return Report(True, {"n": a.n, "count": len(ts), "triangulations": names}, [f"{len(ts)} triangulations"] + names)


def cmd_surface_acs(a) -> Report:
    acs = acs_from_polygon(a.n)
    rep = verify_acs(acs)
    if a.output:
        io.save(io.acs_to_json(acs), a.output)
    return Report(rep["ok"], rep, _acs_lines(f"{a.n}-gon", rep))


def cmd_surface_hexagon(a) -> Report:
    rep = hexagon_report()
    if rep["ok"]:
        lines = [f"isomorphism verified: {rep['source_vertices']} vertices"]
    else:
        lines = ["isomorphism NOT verified"] + _violations(rep["violations"])
    return Report(rep["ok"], rep, lines)


# ---------------------------------------------------------------------------
# rcm


def _load_phi(path: str):
    return io.phi_from_json(io.load(path), Path(path).parent)


def _sequences(seed, depth: int):
    """All admissible label sequences of length <= depth without immediate return."""
    out = [((), seed)]
    frontier = [((), seed, None)]
    for _ in range(depth):
        nxt = []
        for seq, s, back in frontier:
            for p in s.ex_positions:
                if p == back:
                    continue
                k = s.basis.labels[p]
                child = mutate_seed(s, k)
                nxt.append((seq + (k.text,), child, p))
                out.append((seq + (k.text,), child))
        frontier = nxt
    return out


def cmd_rcm_push(a) -> Report:
    phi = _load_phi(a.file)
    seqs = [tuple(a.seq.split(","))] if a.seq else [s for s, _ in _sequences(phi.source, a.depth)]
    records, ok = [], True
    for seq in seqs:
        pushed = push_sequence(phi, seq)
        adm = is_ex_admissible(pushed.phi_k, pushed.source_seed, pushed.target_seed)
        ok &= adm
        records.append({**pushed.as_json(), "ex_admissible": adm})
    lines = [f"({','.join(r['sequence'])}) -> ({','.join(r['image'])})" + ("" if r["ex_admissible"] else "  NOT ex-admissible")
             for r in records]
    return Report(ok, {"sequences": records}, lines)


def cmd_rcm_sign(a) -> Report:
    rep = consistently_positive(_load_phi(a.file))
    lines = [f"verdict: {rep['verdict']}"] + [f"  component {','.join(c['labels'])}: {c['verdict']}" for c in rep["components"]]
    return Report(rep["verdict"] == "positive", rep, lines)


def cmd_rcm_induce(a) -> Report:
    phi = _load_phi(a.file)
    try:
        m = induced_acs_morphism(phi, a.depth)
    except NotImplementedError as e:
        return Report(False, {"verdict": "negative", "error": str(e)}, [f"not constructed: {e}"])
    except RcmError as e:
        return Report(False, {"error": str(e)}, [f"not constructed: {e}"])
    rep = verify_morphism(m)
    if a.output:
        io.save(io.morphism_to_json(m), a.output)
    lines = [f"induced morphism on depth {a.depth}: {'valid' if rep['ok'] else 'INVALID'} "
             f"({len(m.source.vertices)} -> {len(m.target.vertices)} vertices)"] + _violations(rep["violations"])
    return Report(rep["ok"], {**rep, "source_vertices": len(m.source.vertices)}, lines)


def cmd_rcm_vars(a) -> Report:
    rep = verify_variable_level(_load_phi(a.file), a.depth)
    lines = [f"variables: {'match' if rep['ok'] else 'MISMATCH'} ({rep['checked']} checked)"]
    lines += [f"  witness path {m['path']}: {m['label']} vs {m['target_label']}" for m in rep["mismatches"][:10]]
    return Report(rep["ok"], rep, lines)


# ---------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="print the JSON report")
    common.add_argument("--jobs", type=int, default=None, help="worker processes (default: $QCLUSTER_JOBS or 1)")

    p = argparse.ArgumentParser(prog="qcluster", description="Quantum cluster algebra and abstract cluster structure toolkit.")
    sub = p.add_subparsers(dest="command", required=True)

    def leaf(parent, name, func, **kw):
        q = parent.add_parser(name, parents=[common], **kw)
        q.set_defaults(func=func)
        return q

    seed = sub.add_parser("seed", help="seed files").add_subparsers(dest="action", required=True)
    q = leaf(seed, "validate", cmd_seed_validate)
    q.add_argument("file")
    q = leaf(seed, "mutate", cmd_seed_mutate)
    q.add_argument("file")
    q.add_argument("-k", required=True, help="exchangeable label")
    q.add_argument("--sign", choices=["+", "-"], default="+")
    q.add_argument("--trace", action="store_true")
    q.add_argument("-o", "--output")

    q = leaf(sub, "explore", cmd_explore, help="explore the exchange graph")
    q.add_argument("file")
    q.add_argument("--depth", type=int, required=True)
    q.add_argument("--fold", action="store_true")
    q.add_argument("--dot")
    q.add_argument("--vars")
    q.add_argument("--max-nodes", type=int, default=10000)

    q = leaf(sub, "verify", cmd_verify, help="verification suites")
    q.add_argument("what", choices=["laurent", "involution", "signs", "compat", "specialization"])
    q.add_argument("file", nargs="?")
    q.add_argument("--depth", type=int, default=1)
    q.add_argument("--rand", type=int, default=0)
    q.add_argument("--rng-seed", type=int, default=0)

    acs = sub.add_parser("acs", help="abstract cluster structures").add_subparsers(dest="action", required=True)
    q = leaf(acs, "extract", cmd_acs_extract)
    q.add_argument("file")
    q.add_argument("--depth", type=int, required=True)
    q.add_argument("-o", "--output", required=True)
    q = leaf(acs, "check", cmd_acs_check)
    q.add_argument("file")
    q = leaf(acs, "principal", cmd_acs_principal)
    q.add_argument("file")
    q.add_argument("-o", "--output")
    q = leaf(acs, "to-seed", cmd_acs_to_seed)
    q.add_argument("file")
    q.add_argument("--vertex", required=True)

    cat = sub.add_parser("cat", help="morphisms, products and coproducts").add_subparsers(dest="action", required=True)
    q = leaf(cat, "check-morphism", cmd_cat_check)
    q.add_argument("file")
    q.add_argument("--quantum", choices=["yes", "no"], default=None)
    for op in ("product", "coproduct"):
        q = leaf(cat, op, cmd_cat_build)
        q.set_defaults(op=op)
        q.add_argument("first")
        q.add_argument("second")
        q.add_argument("-o", "--output")

    surf = sub.add_parser("surface", help="polygon triangulations").add_subparsers(dest="action", required=True)
    q = leaf(surf, "enumerate", cmd_surface_enumerate)
    q.add_argument("-n", type=int, required=True)
    q = leaf(surf, "acs", cmd_surface_acs)
    q.add_argument("-n", type=int, required=True)
    q.add_argument("-o", "--output")
    leaf(surf, "hexagon-gr26", cmd_surface_hexagon)

    rcm = sub.add_parser("rcm", help="rooted cluster morphisms").add_subparsers(dest="action", required=True)
    for name, func in (("push", cmd_rcm_push), ("sign", cmd_rcm_sign), ("induce", cmd_rcm_induce), ("verify-vars", cmd_rcm_vars)):
        q = leaf(rcm, name, func)
        q.add_argument("file")
        q.add_argument("--depth", type=int, default=2)
        if name == "push":
            q.add_argument("--seq", help="comma-separated labels, in the order applied")
        if name == "induce":
            q.add_argument("-o", "--output")
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_OK if e.code == 0 else EXIT_USAGE
    if getattr(args, "jobs", None) is None:
        args.jobs = default_jobs()
    try:
        report = args.func(args)
    except (UsageError, io.FormatError, SeedError, AcsError, RcmError, SurfaceError, json.JSONDecodeError,
            FileNotFoundError, KeyError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    if args.json:
        print(io.dumps(report.data))
    else:
        for line in report.lines:
            print(line)
    return EXIT_OK if report.ok else EXIT_FAIL


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
