"""Verification sweeps: each suite is a list of work items plus a pure check.

``check`` returns a flat record with an ``ok`` field; records are plain
JSON-able values (rationals as "p/q").  Items are small tuples so they can
be shipped to worker processes.
"""

from __future__ import annotations

import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Iterator

from .closed_forms import cof_closed, det_closed, invariants, reciprocal_sum_solution
from .exact_linalg import ExactMatrix, cofactor_sum, determinant, inverse, rational_to_str
from .graph_model import (
    InvalidGraphError,
    MultiBlockGraph,
    build_multipartite,
    distance_matrix,
    graham_compose,
    random_multiblock,
    tree_from_edges,
    tn_spec,
)
from .singularity_lab import (
    RECIPROCAL,
    admissible_ks,
    classify,
    lambda_tn,
    negative_lambda_brute,
    negative_lambda_classifier,
    negative_lambda_family,
    zero_lambda_multiblock,
)
from .spectral import (
    inverse_single_block,
    lapexp_check,
    rank_one_inverse,
    spectral_multiblock,
    spectral_single,
    tree_inverse,
)
from .t6_family import T6TnSpec, full_check

EXHAUSTIVE_BUDGET = 16  # |V| cap for the exhaustive composition sweeps


class BudgetExceeded(ValueError):
    pass


def _q(x) -> str:
    return rational_to_str(Fraction(x))


def compositions(total_max: int, min_parts: int = 2) -> Iterator[tuple[int, ...]]:
    """Ordered compositions with at least ``min_parts`` parts and sum <= total_max."""

    def rec(rem, prefix):
        if len(prefix) >= min_parts:
            yield prefix
        for k in range(1, rem + 1):
            yield from rec(rem - k, prefix + (k,))

    yield from rec(total_max, ())


# ---------------------------------------------------------------------------
# checks (top-level so they pickle)
# ---------------------------------------------------------------------------

def check_closed_forms(parts) -> dict:
    D = build_multipartite(parts)
    det, cof = determinant(D), cofactor_sum(D)
    ok = det == det_closed(parts) and cof == cof_closed(parts)
    return {"spec": list(parts), "det": _q(det), "cof": _q(cof), "ok": ok}


def check_singularity(parts) -> dict:
    D = build_multipartite(parts)
    v = classify(parts)
    det_zero = determinant(D) == 0
    cof_zero = cofactor_sum(D) == 0
    ok = v.det_zero == det_zero and v.cof_zero == cof_zero
    # a case-2 witness must satisfy its own equality and bound
    for verdict, shift in ((v.det, 1), (v.cof, 0)):
        if verdict.case == RECIPROCAL:
            w = verdict.witness
            m = len(parts)
            s = sum(Fraction(2, p - 2) for p in w.tail)
            ok = ok and s == 2 * w.ones - (m + shift)
            ok = ok and Fraction(m + shift, 2) < w.ones <= Fraction(3 * m + shift, 4)
    return {
        "spec": list(parts),
        "det_zero": det_zero,
        "cof_zero": cof_zero,
        "det_case": v.det.case,
        "cof_case": v.cof.case,
        "ok": ok,
    }


def check_inverse_single(parts) -> dict:
    D = build_multipartite(parts)
    inv = invariants(parts)
    if inv.beta == 0:
        return {"spec": list(parts), "skipped": "det = 0", "ok": True}
    Dt = inverse_single_block(parts)
    ok = Dt @ D == ExactMatrix.identity(D.rows)
    rank_one = None
    if inv.gamma != 0:
        rank_one = rank_one_inverse(spectral_single(parts)) == Dt
        ok = ok and rank_one
    return {"spec": list(parts), "product_is_identity": ok, "rank_one_agrees": rank_one, "ok": ok}


def check_lapexp_single(parts) -> dict:
    if invariants(parts).gamma == 0:
        return {"spec": list(parts), "skipped": "cof = 0", "ok": True}
    data = spectral_single(parts)
    rep = lapexp_check(build_multipartite(parts), data.lam, data.mu, data.lap_like)
    return {"spec": list(parts), "lambda": _q(data.lam), "ok": rep.ok and data.check_invariants()}


def check_multiblock(graph_json: dict) -> dict:
    g = MultiBlockGraph.from_json(graph_json)
    D = distance_matrix(g)
    data = spectral_multiblock(g)
    rep = lapexp_check(D, data.lam, data.mu, data.lap_like)
    rec = {
        "vertices": g.vertex_count,
        "blocks": [list(b.spec.parts) for b in g.blocks],
        "lambda": _q(data.lam),
        "lapexp": rep.ok,
    }
    ok = rep.ok and data.check_invariants()
    det, cof = graham_compose(g)
    ok = ok and det == data.lam * cof
    if data.lam != 0:
        same = rank_one_inverse(data) == inverse(D)
        rec["inverse_matches_oracle"] = same
        ok = ok and same
    else:
        rec["oracle_det_zero"] = determinant(D) == 0
        ok = ok and rec["oracle_det_zero"]
    rec["ok"] = ok
    return rec


def check_tree(edges) -> dict:
    edges = [tuple(e) for e in edges]
    n = len(edges) + 1
    g = tree_from_edges(edges, n)
    expected = Fraction((-1) ** (n - 1) * (n - 1) * 2 ** (n - 2))
    D = distance_matrix(g)
    det_comp, _ = graham_compose(g)
    det_oracle = determinant(D)
    ok = det_comp == expected and det_oracle == expected
    inv_ok = None
    if n >= 2:
        data = spectral_multiblock(g)
        inv_ok = tree_inverse(g) == inverse(D) == rank_one_inverse(data)
        ok = ok and inv_ok and data.lam == Fraction(n - 1, 2)
    return {"n": n, "edges": [list(e) for e in edges], "det": _q(det_oracle), "inverse_ok": inv_ok, "ok": ok}


def check_t6(nb) -> dict:
    rep = full_check(T6TnSpec(*nb))
    return {"n": nb[0], "b": nb[1], **rep.checks, "ok": rep.ok}


def check_tn_lambda(n) -> dict:
    spec = tn_spec(n)
    if n == 6:
        D = build_multipartite(spec)
        cof, det = cofactor_sum(D), determinant(D)
        return {"n": 6, "cof": _q(cof), "det": _q(det), "ok": cof == 0 and det != 0}
    D = build_multipartite(spec)
    lam = determinant(D) / cofactor_sum(D)
    return {"n": n, "lambda": _q(lam), "ok": lam == lambda_tn(n)}


def check_prop41(item) -> dict:
    m, budget = item
    found = {s.parts for s in negative_lambda_classifier(m, budget)}
    brute = {s.parts for s in negative_lambda_brute(m, budget)}
    expected = set(_prop41_expected(m, budget))
    return {
        "m": m,
        "budget": budget,
        "count": len(found),
        "ok": found == brute == expected,
    }


def _prop41_expected(m, budget) -> Iterator[tuple[int, ...]]:
    # the closed descriptions for small m, written independently of the classifier
    r = range(1, budget + 1)
    if m == 3:
        yield from ((1, 1, c) for c in r if c >= 5)
    elif m == 5:
        for a in r:
            for c in r:
                if a >= 5 and c >= a and c > 4 + Fraction(4, a - 4):
                    yield (1, 1, 1, a, c)
    elif m in (2, 4):
        return
    else:
        raise ValueError("closed description known only for m <= 5")


def check_zero_lambda(item) -> dict:
    kind, params = item
    g = zero_lambda_multiblock(kind, **params)
    data = spectral_multiblock(g)
    D = distance_matrix(g)
    det = determinant(D)
    block_cofs = [cofactor_sum(build_multipartite(b.spec)) for b in g.blocks]
    ok = data.lam == 0 and det == 0 and all(c != 0 for c in block_cofs)
    return {"kind": kind, **params, "vertices": g.vertex_count, "lambda": _q(data.lam), "det": _q(det), "ok": ok}


def check_reciprocal(item) -> dict:
    p, r = item
    q = reciprocal_sum_solution(p, r)
    ok = len(q) == p and all(x >= 1 for x in q) and sum(Fraction(1, x) for x in q) == Fraction(r, 2)
    return {"p": p, "r": r, "solution": list(q), "ok": ok}


def check_family(item) -> dict:
    m, k, count = item
    specs = set()
    ok = True
    for seed in range(count):
        s = negative_lambda_family(m, k, seed)
        inv = invariants(s)
        ok = ok and s.m == m and inv.gamma != 0 and Fraction(inv.beta, inv.gamma) < 0
        specs.add(s.parts)
    ok = ok and len(specs) == count
    return {"m": m, "k": k, "distinct": len(specs), "ok": ok}


# ---------------------------------------------------------------------------
# suites
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Suite:
    name: str
    items: Callable[..., list]
    check: Callable[[object], dict]
    doc: str


def _comp_items(max_vertices=12, **_):
    if max_vertices > EXHAUSTIVE_BUDGET:
        raise BudgetExceeded(f"exhaustive sweeps are capped at |V| <= {EXHAUSTIVE_BUDGET}")
    return list(compositions(max_vertices))


def _prufer_tree(n: int, rng: random.Random) -> list[tuple[int, int]]:
    if n == 2:
        return [(0, 1)]
    seq = [rng.randrange(n) for _ in range(n - 2)]
    degree = [1] * n
    for x in seq:
        degree[x] += 1
    edges = []
    for x in seq:
        leaf = min(v for v in range(n) if degree[v] == 1)
        edges.append((leaf, x))
        degree[leaf] -= 1
        degree[x] -= 1
    u, v = (w for w in range(n) if degree[w] == 1)
    edges.append((u, v))
    return edges


def _tree_items(max_vertices=10, count=20, seed=0, **_):
    rng = random.Random(seed)
    return [_prufer_tree(n, rng) for n in range(2, max_vertices + 1) for _ in range(count)]


def _multiblock_items(max_vertices=30, count=200, seed=0, **_):
    rng = random.Random(seed)
    out = []
    while len(out) < count:
        g = random_multiblock(rng, max_vertices=max_vertices, accept_spec=lambda s: invariants(s).gamma != 0)
        out.append(g.to_json())
    return out


def _t6_items(**_):
    return [(n, b) for n in (3, 4, 5, 7, 8, 9, 10) for b in (1, 2, 3)]


def _tn_items(max_vertices=12, **_):
    return list(range(3, max_vertices + 1))


def _prop41_items(max_part=12, **_):
    return [(m, max_part) for m in (2, 3, 4, 5)]


def _zero_lambda_items(max_vertices=None, **_):
    items = [("ex4.7", {"b1": 1, "b2": 1, "b3": 1, "x": x, "y": x, "z": x}) for x in (1, 2, 3)]
    items += [("ex4.8", {"m": m}) for m in (1, 3, 4)]
    if max_vertices is not None:
        items = [it for it in items if zero_lambda_multiblock(it[0], **it[1]).vertex_count <= max_vertices]
    return items


def _reciprocal_items(max_part=12, **_):
    return [(p, r) for p in range(1, max_part + 1) for r in range(1, 2 * p + 1)]


def _family_items(count=50, **_):
    return [(m, k, count) for m in range(5, 10) for k in admissible_ks(m)]


SUITES = {
    s.name: s
    for s in (
        Suite("closed-forms", _comp_items, check_closed_forms, "closed det/cof vs oracle, all compositions"),
        Suite("singularity", _comp_items, check_singularity, "det/cof zero verdicts vs oracle"),
        Suite("inverse-single", _comp_items, check_inverse_single, "block-form single-block inverse"),
        Suite("lapexp-single", _comp_items, check_lapexp_single, "LapExp conditions, single blocks"),
        Suite("multiblock", _multiblock_items, check_multiblock, "random multi-block graphs: LapExp and inverse"),
        Suite("trees", _tree_items, check_tree, "random trees: determinant and inverse"),
        Suite("tn-lambda", _tn_items, check_tn_lambda, "lambda of T_n and cof D(T_6)"),
        Suite("negative-lambda", _prop41_items, check_prop41, "negative-lambda sets for m <= 5"),
        Suite("zero-lambda", _zero_lambda_items, check_zero_lambda, "lambda = 0 multi-block families"),
        Suite("t6", _t6_items, check_t6, "the T_6 o T_n^(b) grid"),
        Suite("reciprocal", _reciprocal_items, check_reciprocal, "sum 1/q_i = r/2 solver"),
        Suite("families", _family_items, check_family, "negative-lambda family generators"),
    )
}


def run_suite(name: str, workers: int = 1, **params) -> Iterator[dict]:
    """Records in input order; ``workers > 1`` fans out over processes."""
    try:
        suite = SUITES[name]
    except KeyError:
        raise InvalidGraphError(f"unknown suite {name!r}; choose from {sorted(SUITES)}") from None
    items = suite.items(**params)
    if workers > 1:
        with ProcessPoolExecutor(workers) as pool:
            yield from pool.map(suite.check, items, chunksize=max(1, len(items) // (4 * workers)))
    else:
        yield from map(suite.check, items)


def run_checks(check: Callable[[object], dict], items: Iterable) -> list[dict]:
    return [check(x) for x in items]
