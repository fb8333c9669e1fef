"""Randomized and exhaustive verification suites with reproducible corpora."""

from __future__ import annotations

import random
from typing import Iterable, Sequence

from .engine import Frame, check_frame_involution, check_specialization, verify_laurent
from .lattice import Label
from .qtorus import QuantumTorus, sym_scalar
from .seed import (
    MINUS,
    PLUS,
    Seed,
    check_involution,
    is_valid,
    mutate_beta,
    mutate_lambda,
    mutate_seed,
    random_basis_change,
    random_seed,
    validate,
)


def random_corpus(count: int, rng_seed: int = 0, max_rank: int = 5, bound: int = 3, quantum: bool = True) -> list[Seed]:
    """Valid seeds of rank at most ``max_rank`` with at least one frozen label."""
    rng = random.Random(rng_seed)
    out = []
    while len(out) < count:
        m = rng.randint(1, max_rank - 1)
        f = rng.randint(1, max_rank - m)
        s = random_seed(rng, m, f, bound=bound, quantum=quantum)
        if s.n > max_rank:
            continue
        if rng.random() < 0.5:
            s = random_basis_change(rng, s)
        out.append(s)
    return out


def laurent_corpus(count: int, rng_seed: int = 0) -> list[Seed]:
    """Compatible quantum seeds with three exchangeable labels, entries in {-1, 0, 1}."""
    rng = random.Random(rng_seed)
    return [random_seed(rng, 3, rng.randint(1, 3), bound=1, quantum=True) for _ in range(count)]


def _record(failures: list, seed_no: int, k: Label, what: str) -> None:
    failures.append({"seed": seed_no, "direction": k.text, "check": what})


def involution_suite(seeds: Iterable[Seed], frames: bool = True) -> dict:
    failures: list[dict] = []
    checks = 0
    for i, s in enumerate(seeds):
        root = Frame.root(s) if frames else None
        for k in s.ex:
            for sign in (PLUS, MINUS):
                checks += 1
                if not check_involution(s, k, sign):
                    _record(failures, i, k, f"seed data ({sign})")
            if root is not None:
                checks += 1
                if not check_frame_involution(root, k):
                    _record(failures, i, k, "frame")
    return {"ok": not failures, "checks": checks, "failures": failures}


def sign_suite(seeds: Iterable[Seed]) -> dict:
    failures: list[dict] = []
    checks = 0
    for i, s in enumerate(seeds):
        for k in s.ex:
            checks += 1
            if mutate_beta(s, k, PLUS) != mutate_beta(s, k, MINUS):
                _record(failures, i, k, "beta")
            if s.L is not None:
                checks += 1
                if mutate_lambda(s, k, PLUS) != mutate_lambda(s, k, MINUS):
                    _record(failures, i, k, "lambda")
            checks += 1
            if mutate_seed(s, k, PLUS).x_gram() != mutate_seed(s, k, MINUS).x_gram():
                _record(failures, i, k, "x-form")
    return {"ok": not failures, "checks": checks, "failures": failures}


def compat_suite(seeds: Iterable[Seed]) -> dict:
    failures: list[dict] = []
    checks = 0
    for i, s in enumerate(seeds):
        if not is_valid(s):
            continue
        for k in s.ex:
            checks += 1
            bad = validate(mutate_seed(s, k))
            if bad:
                _record(failures, i, k, bad[0]["identity"])
    return {"ok": not failures, "checks": checks, "failures": failures}


def tree_seeds_upto(seed: Seed, depth: int) -> list[Seed]:
    """Every seed reached by at most ``depth`` mutations without immediate return."""
    out = [seed]
    frontier = [(seed, None)]
    for _ in range(depth):
        nxt = []
        for s, back in frontier:
            for p in s.ex_positions:
                if p == back:
                    continue
                nxt.append((mutate_seed(s, s.basis.labels[p]), p))
        out.extend(s for s, _ in nxt)
        frontier = nxt
    return out


def laurent_suite(seeds: Sequence[Seed], depth: int, jobs: int | None = None) -> dict:
    results = [verify_laurent(s, depth, jobs=jobs) for s in seeds]
    failures = [{"seed": i, "failures": r["failures"]} for i, r in enumerate(results) if not r["ok"]]
    return {"ok": not failures, "seeds": len(seeds), "nodes": sum(r["nodes"] for r in results), "failures": failures}


def specialization_suite(seeds: Sequence[Seed], depth: int) -> dict:
    results = [check_specialization(s, depth) for s in seeds]
    failures = [{"seed": i, "mismatches": r["mismatches"][:3]} for i, r in enumerate(results) if not r["ok"]]
    return {"ok": not failures, "seeds": len(seeds), "frames": sum(r["frames"] for r in results), "failures": failures}


def ordered_monomial_suite(torus: QuantumTorus, count: int, rng_seed: int = 0, bound: int = 3) -> dict:
    """x^v against the scalar times the ordered product of generator powers."""
    rng = random.Random(rng_seed)
    failures = []
    for _ in range(count):
        v = [rng.randint(-bound, bound) for _ in range(torus.rank)]
        prod = torus.one()
        for i, vi in enumerate(v):
            if vi:
                prod = prod * torus.gen(i) ** vi
        if torus.x(v) != prod.scale(sym_scalar(v, torus)):
            failures.append(v)
    return {"ok": not failures, "checks": count, "failures": failures}
