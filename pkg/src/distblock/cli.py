"""``distblock`` command line.

One-shot commands print a single JSON report; streaming commands
(``enumerate``, ``family``, ``sweep``) print JSON lines followed by a
summary line.  Rationals are written as "p/q" strings.

Exit codes: 0 ok, 1 a verification failed, 2 bad input or a closed form
that does not apply to the given graph.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import hashlib
import json
import sys
import time
from fractions import Fraction
from typing import Any, Iterable, Iterator

from . import __version__
from .closed_forms import cof_closed, det_closed, identity_suite, invariants
from .exact_linalg import ExactMatrix, SingularMatrixError, cofactor_sum, determinant, inverse, matrix_to_json
from .graph_model import (
    InvalidGraphError,
    MultiBlockGraph,
    MultipartiteSpec,
    build_multipartite,
    check,
    distance_matrix,
    graham_compose,
    parse_graph_spec,
    parse_spec,
)
from .singularity_lab import (
    UndefinedLambda,
    classify,
    enumerate_specs,
    lambda_single,
    negative_lambda_family,
    zero_lambda_multiblock,
)
from .spectral import (
    FormulaInapplicable,
    inverse_multiblock,
    inverse_single_block,
    lapexp_check,
    spectral_multiblock,
)
from .sweeps import SUITES, BudgetExceeded, run_suite
from .t6_family import (
    T6TnSpec,
    build_t6_tn,
    c_block_form,
    det_t6_tn,
    full_check,
    inverse_t6_tn,
    match_t6_tn,
    to_graph_order,
    vertex_order,
)

EXIT_OK, EXIT_VERIFY, EXIT_INPUT = 0, 1, 2

# args that change presentation only, not the result
_PRESENTATION = {"format", "timing", "workers", "argv"}


class InputError(Exception):
    pass


def jsonable(x: Any) -> Any:
    if isinstance(x, Fraction):
        return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"
    if x is None or isinstance(x, (bool, int, float, str)):
        return x
    if isinstance(x, ExactMatrix):
        return matrix_to_json(x)
    if isinstance(x, MultipartiteSpec):
        return list(x.parts)
    if isinstance(x, MultiBlockGraph):
        return x.to_json()
    if dataclasses.is_dataclass(x):
        return {f.name: jsonable(getattr(x, f.name)) for f in dataclasses.fields(x) if not f.name.startswith("_")}
    if isinstance(x, dict):
        return {str(k): jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [jsonable(v) for v in x]
    raise TypeError(f"cannot serialise {type(x).__name__}")


def _dump(obj) -> str:
    return json.dumps(jsonable(obj), sort_keys=True, separators=(",", ":"))


def inputs_digest(args: argparse.Namespace) -> str:
    payload = {k: v for k, v in sorted(vars(args).items()) if k not in _PRESENTATION}
    return hashlib.sha256(_dump(payload).encode()).hexdigest()


def make_report(args, outputs: dict, verdicts: dict | None = None, started: float | None = None) -> dict:
    rep = {
        "command": args.command,
        "argv": getattr(args, "argv", []),
        "inputs_sha256": inputs_digest(args),
        "outputs": outputs,
    }
    if verdicts is not None:
        rep["verdicts"] = verdicts
        rep["ok"] = all(v is not False for v in verdicts.values())
    if args.timing and started is not None:
        rep["timing"] = {"seconds": round(time.perf_counter() - started, 6)}
    return rep


# ---------------------------------------------------------------------------
# output
# ---------------------------------------------------------------------------

def _flatten(d: dict, prefix: str = "") -> dict:
    out = {}
    for k, v in d.items():
        key = f"{prefix}{k}"
        if isinstance(v, dict):
            out.update(_flatten(v, key + "."))
        elif isinstance(v, list):
            out[key] = json.dumps(v, separators=(",", ":"))
        else:
            out[key] = v
    return out


def _write_csv(rows: list[dict], out) -> None:
    flat = [_flatten(jsonable(r)) for r in rows]
    keys: list[str] = []
    for r in flat:
        keys.extend(k for k in r if k not in keys)
    w = csv.DictWriter(out, fieldnames=keys, lineterminator="\n")
    w.writeheader()
    w.writerows(flat)


def emit_one(report: dict, fmt: str, out) -> None:
    if fmt == "csv":
        _write_csv([report], out)
    elif fmt == "jsonl":
        out.write(_dump(report) + "\n")
    else:
        out.write(json.dumps(jsonable(report), indent=2, sort_keys=True) + "\n")


def emit_stream(records: Iterable[dict], summary: dict, fmt: str, out) -> None:
    if fmt == "csv":
        buf = list(records)
        _write_csv(buf + [summary], out)
        return
    for r in records:
        out.write(_dump(r) + "\n")
    out.write(_dump(summary) + "\n")


# ---------------------------------------------------------------------------
# helpers
# ---------------------------------------------------------------------------

def _graph(args) -> MultiBlockGraph:
    g = check(parse_graph_spec(args.graph))
    if args.max_vertices is not None and g.vertex_count > args.max_vertices:
        raise InputError(f"graph has {g.vertex_count} vertices, above --max-vertices {args.max_vertices}")
    return g


def _spec(args) -> MultipartiteSpec:
    s = parse_spec(args.spec)
    if args.max_vertices is not None and s.order > args.max_vertices:
        raise InputError(f"spec has {s.order} vertices, above --max-vertices {args.max_vertices}")
    return s


def _closed_inverse(g: MultiBlockGraph) -> tuple[ExactMatrix, str]:
    if len(g.blocks) == 1:
        blk = g.blocks[0]
        order = list(blk.vertices)
        return to_graph_order(inverse_single_block(blk.spec), order), "single-block"
    if any(invariants(b.spec).gamma == 0 for b in g.blocks):
        m = match_t6_tn(g)
        if m is not None:
            spec, order = m
            return to_graph_order(inverse_t6_tn(spec), order), f"t6_tn n={spec.n} b={spec.b}"
    return inverse_multiblock(g), "rank-one"


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------

def cmd_invariants(args) -> dict:
    t0 = time.perf_counter()
    s = _spec(args)
    inv = invariants(s)
    outputs = {
        "spec": s,
        "alpha": inv.alpha,
        "beta": inv.beta,
        "gamma": inv.gamma,
        "det": det_closed(s),
        "cof": cof_closed(s),
        "lambda": Fraction(inv.beta, inv.gamma) if inv.gamma else None,
    }
    verdicts = None
    if args.verify:
        D = build_multipartite(s)
        verdicts = {
            "det = oracle": determinant(D) == outputs["det"],
            "cof = oracle": cofactor_sum(D) == outputs["cof"],
            "identities": identity_suite(s).ok if s.m >= 2 else None,
        }
    return make_report(args, outputs, verdicts, t0)


def cmd_classify(args) -> dict:
    t0 = time.perf_counter()
    s = _spec(args)
    v = classify(s)
    outputs = {"spec": s, "det": v.det, "cof": v.cof}
    try:
        rep = lambda_single(s)
        outputs["lambda"] = rep.lam
        outputs["lambda_sign"] = rep.sign
    except UndefinedLambda as exc:
        outputs["lambda"] = None
        outputs["lambda_note"] = str(exc)
    verdicts = None
    if args.verify:
        D = build_multipartite(s)
        verdicts = {
            "det verdict = oracle": v.det_zero == (determinant(D) == 0),
            "cof verdict = oracle": v.cof_zero == (cofactor_sum(D) == 0),
        }
    return make_report(args, outputs, verdicts, t0)


def cmd_enumerate(args) -> tuple[Iterator[dict], dict]:
    if args.m < 2 or args.max_part < 1:
        raise InputError("need --m >= 2 and --max-part >= 1")
    rows = []
    for row in enumerate_specs(args.m, args.max_part, args.filter):
        inv = row["invariants"]
        v = row["verdict"]
        rows.append(
            {
                "spec": row["spec"],
                "alpha": inv.alpha,
                "beta": inv.beta,
                "gamma": inv.gamma,
                "det_zero": v.det_zero,
                "cof_zero": v.cof_zero,
                "lambda": row["lambda"],
            }
        )
    summary = {"summary": True, "command": "enumerate", "inputs_sha256": inputs_digest(args), "count": len(rows)}
    return iter(rows), summary


def _params(pairs) -> dict:
    out = {}
    for p in pairs or []:
        key, sep, val = p.partition("=")
        if not sep:
            raise InputError(f"expected key=value, got {p!r}")
        try:
            out[key] = int(val)
        except ValueError:
            raise InputError(f"parameter {key} must be an integer") from None
    return out


def cmd_family(args) -> tuple[Iterator[dict], dict]:
    rows = []
    ok = True
    if args.kind == "negative":
        if args.m is None or args.k is None:
            raise InputError("family negative needs --m and --k")
        for seed in range(args.seed, args.seed + args.count):
            s = negative_lambda_family(args.m, args.k, seed)
            row = {"seed": seed, "spec": s, "lambda": lambda_single(s).lam}
            if args.verify:
                D = build_multipartite(s)
                row["verified"] = determinant(D) / cofactor_sum(D) == row["lambda"] < 0
                ok = ok and row["verified"]
            rows.append(row)
    else:
        g = zero_lambda_multiblock(args.kind, **_params(args.param))
        if args.max_vertices is not None and g.vertex_count > args.max_vertices:
            raise InputError(f"graph has {g.vertex_count} vertices, above --max-vertices {args.max_vertices}")
        data = spectral_multiblock(g)
        det, cof = graham_compose(g)
        row = {
            "kind": args.kind,
            "params": _params(args.param),
            "vertices": g.vertex_count,
            "blocks": [b.spec for b in g.blocks],
            "lambda": data.lam,
            "det_composed": det,
        }
        if args.verify:
            row["oracle_det"] = determinant(distance_matrix(g))
            row["verified"] = data.lam == 0 and row["oracle_det"] == 0
            ok = row["verified"]
        rows.append(row)
    summary = {"summary": True, "command": "family", "inputs_sha256": inputs_digest(args), "count": len(rows)}
    if args.verify:
        summary["ok"] = ok
    return iter(rows), summary


def cmd_compute(args) -> dict:
    t0 = time.perf_counter()
    g = _graph(args)
    what = args.what
    outputs: dict[str, Any] = {"what": what, "vertices": g.vertex_count}
    verdicts = None
    D = distance_matrix(g) if args.verify else None
    if what in ("det", "cof"):
        det, cof = graham_compose(g)
        value = det if what == "det" else cof
        outputs["value"] = value
        if args.verify:
            oracle = determinant(D) if what == "det" else cofactor_sum(D)
            verdicts = {f"{what} = oracle": oracle == value}
    elif what in ("lambda", "mu"):
        data = spectral_multiblock(g)
        outputs["value"] = data.lam if what == "lambda" else list(data.mu)
        if args.verify:
            rep = lapexp_check(D, data.lam, data.mu, data.lap_like)
            verdicts = {**rep.left, **{f"right: {k}": v for k, v in rep.right.items()}}
            if what == "lambda":
                cof = cofactor_sum(D)
                verdicts["lambda = det/cof (oracle)"] = cof != 0 and determinant(D) / cof == data.lam
    elif what == "inverse":
        C, route = _closed_inverse(g)
        outputs["route"] = route
        outputs["value"] = C
        if args.verify:
            verdicts = {"inverse = oracle": C == inverse(D)}
    else:
        raise InputError(f"unknown quantity {what!r}")
    return make_report(args, outputs, verdicts, t0)


def cmd_inverse(args) -> dict:
    t0 = time.perf_counter()
    g = _graph(args)
    outputs: dict[str, Any] = {"vertices": g.vertex_count, "method": args.method}
    verdicts = None
    closed = oracle = None
    if args.method in ("closed", "both"):
        closed, route = _closed_inverse(g)
        outputs["route"] = route
        outputs["closed"] = closed
    if args.method in ("oracle", "both") or args.verify:
        oracle = inverse(distance_matrix(g))
        if args.method != "closed":
            outputs["oracle"] = oracle
    if closed is not None and oracle is not None:
        verdicts = {"closed = oracle": closed == oracle}
    return make_report(args, outputs, verdicts, t0)


def cmd_t6(args) -> dict:
    t0 = time.perf_counter()
    spec = T6TnSpec(args.n, args.b)
    outputs: dict[str, Any] = {
        "n": spec.n,
        "b": spec.b,
        "vertices": spec.order,
        "det": det_t6_tn(spec),
        "graph_vertex_order": vertex_order(spec),
    }
    if args.max_vertices is not None and spec.order > args.max_vertices:
        raise InputError(f"graph has {spec.order} vertices, above --max-vertices {args.max_vertices}")
    mats = None
    for name in args.emit or []:
        if name == "C":
            outputs["C"] = inverse_t6_tn(spec)
        elif name == "C_blocks":
            outputs["C_blocks"] = c_block_form(spec)
        else:
            mats = mats or build_t6_tn(spec)
            outputs[name] = getattr(mats, name)
    verdicts = full_check(spec).checks if args.verify else None
    return make_report(args, outputs, verdicts, t0)


def cmd_sweep(args) -> tuple[Iterator[dict], dict]:
    params = {"seed": args.seed}
    for key in ("max_vertices", "count", "max_part"):
        val = getattr(args, key)
        if val is not None:
            params[key] = val
    records = list(run_suite(args.suite, workers=args.workers, **params))
    failures = [r for r in records if not r.get("ok")]
    summary = {
        "summary": True,
        "command": "sweep",
        "suite": args.suite,
        "inputs_sha256": inputs_digest(args),
        "checked": len(records),
        "failed": len(failures),
        "ok": not failures,
        "first_counterexample": failures[0] if failures else None,
    }
    return iter(records), summary


STREAMING = {"enumerate": cmd_enumerate, "family": cmd_family, "sweep": cmd_sweep}
ONE_SHOT = {
    "invariants": cmd_invariants,
    "classify": cmd_classify,
    "compute": cmd_compute,
    "inverse": cmd_inverse,
    "t6": cmd_t6,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("json", "jsonl", "csv"), default=None)
    common.add_argument("--verify", action="store_true", help="also run the exact oracle and compare")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--max-vertices", type=int, default=None)
    common.add_argument("--timing", action="store_true", help="add wall-clock timing (breaks byte-identity)")

    p = argparse.ArgumentParser(prog="distblock", description="Exact distance-matrix computations for multi-block graphs.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    for name in ("invariants", "classify"):
        sp = sub.add_parser(name, parents=[common])
        sp.add_argument("spec", help='part sizes, e.g. "1,1,5" or "K_{2,3}"')

    sp = sub.add_parser("enumerate", parents=[common])
    sp.add_argument("--m", type=int, required=True)
    sp.add_argument("--max-part", type=int, required=True)
    sp.add_argument("--filter", choices=("det0", "cof0", "lneg"), default=None)

    sp = sub.add_parser("family", parents=[common])
    sp.add_argument("kind", choices=("negative", "ex4.7", "ex4.8"))
    sp.add_argument("--m", type=int)
    sp.add_argument("--k", type=int)
    sp.add_argument("--count", type=int, default=1)
    sp.add_argument("--param", action="append", metavar="KEY=INT")

    sp = sub.add_parser("compute", parents=[common])
    sp.add_argument("graph")
    sp.add_argument("--what", choices=("det", "cof", "lambda", "mu", "inverse"), required=True)

    sp = sub.add_parser("inverse", parents=[common])
    sp.add_argument("graph")
    sp.add_argument("--method", choices=("closed", "oracle", "both"), default="closed")

    sp = sub.add_parser("t6", parents=[common])
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--b", type=int, required=True)
    sp.add_argument("--emit", action="append", choices=("D", "L", "R", "C", "C_blocks"))

    sp = sub.add_parser("sweep", parents=[common])
    sp.add_argument("suite", choices=sorted(SUITES))
    sp.add_argument("--count", type=int, default=None)
    sp.add_argument("--max-part", type=int, default=None)
    sp.add_argument("--workers", type=int, default=1)
    return p


def main(argv: list[str] | None = None, out=None) -> int:
    out = out or sys.stdout
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    args.argv = argv
    fmt = args.format or ("jsonl" if args.command in STREAMING else "json")
    try:
        if args.command in STREAMING:
            records, summary = STREAMING[args.command](args)
            emit_stream(records, summary, fmt, out)
            return EXIT_VERIFY if summary.get("ok") is False else EXIT_OK
        report = ONE_SHOT[args.command](args)
    except (InputError, InvalidGraphError, BudgetExceeded, FormulaInapplicable, UndefinedLambda,
            SingularMatrixError, ValueError) as exc:
        err = {"command": args.command, "argv": argv, "error": type(exc).__name__, "message": str(exc)}
        emit_one(err, "json" if fmt == "csv" else fmt, out)
        return EXIT_INPUT
    emit_one(report, fmt, out)
    return EXIT_VERIFY if report.get("ok") is False else EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
