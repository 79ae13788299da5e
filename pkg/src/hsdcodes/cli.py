"""Command-line entry point ``hsd``.

Data goes to stdout (or ``--out``); diagnostics go to stderr as one JSON
object per line. Exit status 1 means invalid input, 2 means a budget ran out.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from contextlib import contextmanager
from pathlib import Path

from .code import DEFAULT_BUDGET, LinearCode, load_code
from .construct import ConstructionSpec, build_code
from .errors import BudgetExceeded, CapExceeded, HSDError, SubsetCountTooLarge
from .field import alpha_for_minus_one, field_from_order
from .mpcode import MatrixProductSpec, mp_code
from .unitary import PowerFamily, algorithm1, make_generators

EXIT_INVALID = 1
EXIT_BUDGET = 2


class CliError(Exception):
    def __init__(self, code: int, kind: str, message: str):
        super().__init__(message)
        self.code = code
        self.kind = kind


def _diag(**payload) -> None:
    sys.stderr.write(json.dumps(payload, sort_keys=True) + "\n")


@contextmanager
def _output(path: str | None):
    if path is None or path == "-":
        yield sys.stdout
    else:
        with open(path, "w") as fh:
            yield fh


def _emit(obj, path: str | None) -> None:
    with _output(path) as fh:
        fh.write(json.dumps(obj, indent=1, sort_keys=True) + "\n")


def _tuple4(text: str) -> tuple[int, int, int, int]:
    parts = [int(p) for p in text.split(",")]
    if len(parts) != 4:
        raise argparse.ArgumentTypeError("expected four comma-separated integers")
    return tuple(parts)


def _abcd(text: str) -> list[str]:
    parts = [p.strip() for p in text.split(",")]
    if len(parts) != 4:
        raise argparse.ArgumentTypeError("expected four comma-separated field elements")
    return parts


def _params(text: str) -> dict:
    out = {}
    for item in filter(None, text.split(",")):
        key, sep, val = item.partition("=")
        if not sep:
            raise argparse.ArgumentTypeError(f"parameter {item!r} is not key=value")
        out[key.strip()] = val.strip()
    return out


def _n_values(text: str) -> list[int]:
    out: list[int] = []
    for part in text.split(","):
        lo, sep, hi = part.partition("-")
        out.extend(range(int(lo), int(hi) + 1) if sep else [int(lo)])
    return out


def _ctx(q2: int):
    try:
        return field_from_order(q2)
    except (ValueError, LookupError) as exc:
        raise CliError(EXIT_INVALID, "invalid_field", str(exc)) from exc


def _read_code(path: str) -> LinearCode:
    try:
        obj = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise CliError(EXIT_INVALID, "unreadable_input", str(exc)) from exc
    try:
        if "construction" in obj:
            return build_code(ConstructionSpec.from_json(obj))
        if "A" in obj and "inner" in obj:
            return mp_code(MatrixProductSpec.from_json(obj))
        if "code" in obj:
            obj = obj["code"]
        return load_code(obj)
    except (KeyError, TypeError) as exc:
        raise CliError(EXIT_INVALID, "malformed_input", f"missing or bad field {exc}") from exc


# ------------------------------------------------------------------ commands
def cmd_field(args) -> int:
    ctx = _ctx(args.q2)
    card = {
        "q2": ctx.order,
        "p": ctx.p,
        "q": ctx.q,
        "m": ctx.m,
        "modulus": list(ctx.modulus),
        "omega_order": ctx.order - 1,
        "alpha": str(alpha_for_minus_one(ctx)),
    }
    _emit(card, args.out)
    return 0


def cmd_unitary(args) -> int:
    ctx = _ctx(args.q2)
    abcd = None if args.abcd is None else tuple(ctx(v) for v in args.abcd)
    gens = make_generators(ctx, args.n, abcd=abcd, action=args.action)
    m = args.m or args.n
    with _output(args.out) as fh:
        if args.ijkl is not None:
            L = PowerFamily(gens, m, args.word_order).matrix(args.ijkl)
            fh.write(json.dumps({"ijkl": list(args.ijkl), "L": L.to_json()}) + "\n")
            return 0
        for t, L in algorithm1(gens, m, args.s, args.word_order):
            fh.write(json.dumps({"ijkl": t.as_list(), "L": L.to_json()}) + "\n")
    return 0


def _spec_from_args(args) -> ConstructionSpec:
    if args.spec:
        try:
            return ConstructionSpec.from_json(json.loads(Path(args.spec).read_text()))
        except (OSError, json.JSONDecodeError) as exc:
            raise CliError(EXIT_INVALID, "unreadable_input", str(exc)) from exc
    if args.construction is None or args.q2 is None or args.n is None:
        raise CliError(EXIT_INVALID, "missing_flag", "need --spec or --construction, --q2 and --n")
    params = dict(args.params or {})
    extra = {k: params.pop(k) for k in ("lambdas", "x") if k in params}
    return ConstructionSpec(
        args.construction,
        args.q2,
        args.n,
        args.ijkl,
        args.m,
        params or None,
        lambdas=extra["lambdas"].split(";") if "lambdas" in extra else None,
        x=extra["x"].split(";") if "x" in extra else None,
        a=args.a,
        word_order=args.word_order,
        action=args.action,
        abcd=args.abcd,
    )


def cmd_construct(args) -> int:
    spec = _spec_from_args(args)
    C = build_code(spec)
    out = {"spec": spec.to_json(), "code": C.to_json(), "self_dual": C.is_self_dual_h()}
    _emit(out, args.out)
    return 0


def cmd_mindist(args) -> int:
    C = _read_code(args.input)
    try:
        d = C.min_distance(budget=args.budget)
        _emit({"n": C.n, "k": C.k, "d": d, "method": "exhaustive"}, args.out)
        return 0
    except BudgetExceeded as exc:
        _diag(event="budget_exceeded", stage="exhaustive", message=str(exc))
    try:
        if C.is_mds():
            _emit({"n": C.n, "k": C.k, "d": C.n - C.k + 1, "method": "mds_certificate"}, args.out)
            return 0
        raise CliError(EXIT_BUDGET, "budget_exceeded", "not MDS and too large to enumerate")
    except SubsetCountTooLarge as exc:
        raise CliError(EXIT_BUDGET, "budget_exceeded", str(exc)) from exc


def cmd_verify(args) -> int:
    C = _read_code(args.input)
    report = {
        "n": C.n,
        "k": C.k,
        "q2": C.ctx.order,
        "self_orthogonal": C.is_self_orthogonal_h(),
        "self_dual": C.is_self_dual_h(),
    }
    try:
        report["mds"] = C.is_mds()
    except SubsetCountTooLarge as exc:
        report["mds"] = None
        _diag(event="mds_skipped", message=str(exc))
    _emit(report, args.out)
    return 0


def cmd_search(args) -> int:
    from .search import SearchPlan, run_search, write_csv, write_jsonl

    params = None
    if args.params:
        params = {c: [dict(args.params)] for c in args.construction}
    try:
        plan = SearchPlan(
            q2=args.q2,
            n_values=tuple(args.n),
            constructions=tuple(args.construction),
            s=args.s,
            m=args.m,
            params=params,
            budget=args.budget,
            jobs=args.jobs,
            word_order=args.word_order,
            action=args.action,
            abcd=args.abcd,
        )
    except ValueError as exc:
        raise CliError(EXIT_INVALID, "invalid_plan", str(exc)) from exc
    records = run_search(plan, checkpoint=args.checkpoint)
    if args.out:
        base = Path(args.out)
        with open(base.with_suffix(".csv"), "w") as fh:
            write_csv(records, fh)
        with open(base.with_suffix(".jsonl"), "w") as fh:
            write_jsonl(records, fh)
    else:
        write_csv(records, sys.stdout)
    unverified = sum(r.d is None for r in records)
    if unverified:
        _diag(event="unverified_records", count=unverified)
    return 0


def cmd_reproduce(args) -> int:
    from .search import reproduce_table

    rows = None if args.rows is None else _n_values(args.rows)
    report = reproduce_table(
        args.table,
        s_box=args.s,
        budget=args.budget,
        rows=rows,
        retry_general=not args.no_retry,
        abcd=args.abcd,
    )
    _emit(report.to_json(), args.out)
    _diag(event="summary", table=args.table, counts=report.counts())
    return 0


# ------------------------------------------------------------------- parser
def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="hsd", description=__doc__.splitlines()[0])
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, need_q2=True):
        p.add_argument("--q2", type=int, required=need_q2, help="field order q^2")
        p.add_argument("--out", help="output path (default stdout)")

    def family(p):
        p.add_argument("--m", type=int, help="power applied to each word (default n)")
        p.add_argument("--abcd", type=_abcd, help="transvection solution a,b,c,d")
        p.add_argument("--word-order", choices=("printed", "reversed"), default="printed")
        p.add_argument("--action", choices=("row", "column"), default="row")

    p = sub.add_parser("field", help="print a field card")
    common(p)
    p.set_defaults(func=cmd_field)

    p = sub.add_parser("unitary", help="stream unitary matrices of the power family")
    common(p)
    family(p)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--s", type=int, default=1)
    p.add_argument("--ijkl", type=_tuple4, help="a single exponent tuple")
    p.set_defaults(func=cmd_unitary)

    p = sub.add_parser("construct", help="build one code")
    common(p, need_q2=False)
    family(p)
    p.add_argument("--spec", help="construction spec JSON file")
    p.add_argument("--construction")
    p.add_argument("--n", type=int)
    p.add_argument("--ijkl", type=_tuple4)
    p.add_argument("--a", help="scalar of norm -1")
    p.add_argument("--params", type=_params, help="k=v,... (lambdas/x as ;-separated lists)")
    p.set_defaults(func=cmd_construct)

    for name, func, helptext in (
        ("mindist", cmd_mindist, "exact distance or MDS certificate"),
        ("verify", cmd_verify, "self-orthogonality, self-duality and MDS report"),
    ):
        p = sub.add_parser(name, help=helptext)
        p.add_argument("input", help="code JSON (generator, construct output, spec or matrix-product spec)")
        p.add_argument("--budget", type=int, default=DEFAULT_BUDGET)
        p.add_argument("--out")
        p.set_defaults(func=func)

    p = sub.add_parser("search", help="run a grid search")
    common(p)
    family(p)
    p.add_argument("--n", type=_n_values, required=True, help="e.g. 4-8 or 5,7")
    p.add_argument("--s", type=int, default=2)
    p.add_argument("--construction", type=lambda t: t.split(","), default=["eq5"])
    p.add_argument("--params", type=_params)
    p.add_argument("--budget", type=int, default=DEFAULT_BUDGET)
    p.add_argument("--jobs", type=int, default=os.cpu_count() or 1)
    p.add_argument("--checkpoint")
    p.set_defaults(func=cmd_search)

    p = sub.add_parser("reproduce", help="replay a transcribed table")
    p.add_argument("--table", type=int, required=True)
    p.add_argument("--s", type=int, default=2, help="fallback exponent box")
    p.add_argument("--budget", type=int, default=2**28)
    p.add_argument("--rows", help="row indices, e.g. 0-3,7")
    p.add_argument("--no-retry", action="store_true", help="skip the general transvection retry")
    p.add_argument("--abcd", type=_abcd, help="pin the transvection solution a,b,c,d")
    p.add_argument("--out")
    p.set_defaults(func=cmd_reproduce)
    return ap


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, stream=sys.stderr)
    if os.environ.get("HSD_CONWAY_TABLE"):
        _diag(event="conway_table", path=os.environ["HSD_CONWAY_TABLE"])
    try:
        return args.func(args)
    except CliError as exc:
        _diag(error=exc.kind, message=str(exc))
        return exc.code
    except (BudgetExceeded, CapExceeded) as exc:
        _diag(error=type(exc).__name__, message=str(exc))
        return EXIT_BUDGET
    except (HSDError, ValueError) as exc:
        _diag(error=type(exc).__name__, message=str(exc))
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
