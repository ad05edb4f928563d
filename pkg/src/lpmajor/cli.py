"""Command-line front end.

Exit status: 0 for a positive verdict, 1 for a negative one, 2 for bad
input. Output is deterministic for identical inputs and flags.
"""

from __future__ import annotations

import argparse
import sys

from . import demos, formats
from .errors import LpMajorError
from .formats import InputError, dumps, load_json
from .majorization import equivalent_by_permutation, majorizes
from .preserver import (
    apply_preserver,
    build_preserver,
    check_columns_equivalent,
    check_row_structure,
    column_norm,
    decompose,
)
from .stochastic import compose, conjugate_by_injections, from_coefficients, validate
from .vectors import as_exponent


def _parse_window(text: str) -> list[str]:
    """``"1,2,5"`` or ``"1..4"`` (integers, inclusive) or a mix of both."""
    out: list[str] = []
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        if ".." in part:
            lo, hi = part.split("..", 1)
            try:
                out.extend(str(n) for n in range(int(lo), int(hi) + 1))
            except ValueError:
                raise InputError("window", f"bad range {part!r}") from None
        else:
            out.append(part)
    if len(set(out)) != len(out):
        raise InputError("window", "labels repeat")
    return out


def _load(path, parser, kind):
    return parser(load_json(path), f"{path} ({kind})")


def _vec_text(obj: dict) -> str:
    return "{" + ", ".join(f"{k}: {v}" for k, v in obj.items()) + "}"


def _operator_text(op: dict) -> list[str]:
    lines = [f"operator ({op['tail']} tail) rows {op['rows']} cols {op['cols']}"]
    width = max([len(v) for row in op["block"] for v in row] + [1])
    for r, row in zip(op["rows"], op["block"]):
        lines.append(f"  {r}: " + " ".join(v.rjust(width) for v in row))
    return lines


def _verdict_text(v: dict) -> list[str]:
    flags = [k for k in ("row_stochastic", "column_stochastic", "doubly_stochastic", "permutation") if v[k]]
    lines = ["stochastic: " + (", ".join(flags) if flags else "none")]
    for x in v["violations"]:
        where = ", ".join(x["location"])
        extra = f" = {x['actual']}" if x["actual"] is not None else ""
        detail = f" ({x['detail']})" if x.get("detail") else ""
        lines.append(f"  violation {x['kind']}({where}){extra}{detail}")
    return lines


def _certificate_text(c: dict) -> list[str]:
    lines = [c["verdict"]]
    if c["witness"] is not None:
        lines += ["witness " + line for line in _operator_text(c["witness"])[:1]] + _operator_text(c["witness"])[1:]
    if c["refutation"] is not None:
        r = c["refutation"]
        if r["kind"] == "trace_mismatch":
            lines.append(f"refutation: trace_mismatch trace(f)={r['lhs']} trace(g)={r['rhs']}")
        else:
            lines.append(f"refutation: convex_gap c={r['c']} side={r['side']} lhs={r['lhs']} rhs={r['rhs']}")
    return lines


def _report_text(r: dict | None, ok: str = "pass") -> list[str]:
    if r is None:
        return [ok]
    return [f"{r['kind']}({', '.join(r['labels'])})" + (f": {r['details']}" if r["details"] else "")]


def _generic_text(obj, indent: str = "") -> list[str]:
    lines = []
    for k, v in obj.items():
        if isinstance(v, dict) and v and all(isinstance(x, str) for x in v.values()):
            lines.append(f"{indent}{k}: {_vec_text(v)}")
        elif isinstance(v, dict):
            lines.append(f"{indent}{k}:")
            lines += _generic_text(v, indent + "  ")
        else:
            lines.append(f"{indent}{k}: {v}")
    return lines


def _emit(args, payload, text_lines) -> None:
    if args.format == "structured":
        print(dumps(payload))
    else:
        print("\n".join(text_lines))


def cmd_check(args) -> int:
    f = _load(args.f, formats.vector_from_json, "vector")
    g = _load(args.g, formats.vector_from_json, "vector")
    cert = formats.certificate_to_json(majorizes(f, g))
    _emit(args, cert, _certificate_text(cert))
    return 0 if cert["verdict"] == "majorized" else 1


def cmd_equiv(args) -> int:
    f = _load(args.f, formats.vector_from_json, "vector")
    g = _load(args.g, formats.vector_from_json, "vector")
    w = formats.witness_to_json(equivalent_by_permutation(f, g))
    if w is None:
        _emit(args, {"equivalent": False, "bijection": None}, ["not equivalent"])
        return 1
    lines = ["equivalent; bijection supp(g) -> supp(f):"] + [f"  {a} -> {b}" for a, b in w["bijection"].items()]
    _emit(args, {"equivalent": True, **w}, lines)
    return 0


def cmd_ds_validate(args) -> int:
    op = _load(args.op, formats.operator_from_json, "operator")
    v = formats.verdict_to_json(validate(op))
    _emit(args, v, _verdict_text(v))
    return 0 if v["doubly_stochastic"] else 1


def cmd_ds_compose(args) -> int:
    a = _load(args.a, formats.operator_from_json, "operator")
    b = _load(args.b, formats.operator_from_json, "operator")
    out = formats.operator_to_json(compose(a, b))
    _emit(args, out, _operator_text(out))
    return 0


def cmd_ds_build(args) -> int:
    rows, cols, block = _load(args.coeffs, formats.coefficients_from_json, "coefficients")
    try:
        op = from_coefficients(rows, cols, block)
    except LpMajorError as exc:
        raise InputError(f"{args.coeffs} (coefficients)", f"{type(exc).__name__}: {exc}") from None
    out = formats.operator_to_json(op)
    _emit(args, out, _operator_text(out))
    return 0


def cmd_dtilde(args) -> int:
    D = _load(args.op, formats.operator_from_json, "operator")
    fam = _load(args.injections, formats.injections_from_json, "injections")
    out = formats.operator_to_json(conjugate_by_injections(D, fam))
    _emit(args, out, _operator_text(out))
    return 0


def _norm_fields(spec, p) -> dict:
    q = spec.p if p is None else as_exponent(p)
    norm = column_norm(spec, q)
    if q == 1:
        return {"p": formats.rational(q), "column_norm": formats.rational(norm), "approximate": False}
    return {"p": formats.rational(q), "column_norm": repr(norm), "approximate": True}


def cmd_preserver_build(args) -> int:
    spec = _load(args.spec, formats.spec_from_json, "preserver spec")
    T = build_preserver(spec, _parse_window(args.window))
    out = formats.columns_to_json(T)
    out["norm"] = _norm_fields(spec, args.p)
    lines = [f"column {j}: {_vec_text(v)}" for j, v in out["columns"].items()]
    lines.append(f"||T e_j||_{out['norm']['p']} = {out['norm']['column_norm']}" + (" (approx)" if out["norm"]["approximate"] else ""))
    _emit(args, out, lines)
    return 0


def cmd_preserver_check(args) -> int:
    T = _load(args.columns, formats.columns_from_json, "columns")
    rows = formats.report_to_json(check_row_structure(T))
    cols = formats.report_to_json(check_columns_equivalent(T))
    out = {"row_structure": rows, "columns_equivalent": cols}
    lines = ["row structure: " + _report_text(rows)[0], "columns equivalent: " + _report_text(cols)[0]]
    _emit(args, out, lines)
    return 0 if rows is None and cols is None else 1


def cmd_preserver_decompose(args) -> int:
    T = _load(args.columns, formats.columns_from_json, "columns")
    p = args.p if args.p is not None else "2"
    for report in (check_row_structure(T), check_columns_equivalent(T)):
        if report is not None:
            r = formats.report_to_json(report)
            _emit(args, {"spec": None, "violation": r}, _report_text(r))
            return 1
    spec = decompose(T, p)
    out = {"spec": formats.spec_to_json(spec), "violation": None}
    lines = [f"p = {out['spec']['p']}"]
    for t, term in zip(spec.terms, out["spec"]["terms"]):
        lines.append(f"  alpha = {term['alpha']}  sigma = {t.sigma.describe()}")
    if not spec.terms:
        lines.append("  (zero operator: no terms)")
    _emit(args, out, lines)
    return 0


def cmd_preserver_apply(args) -> int:
    T = _load(args.columns, formats.columns_from_json, "columns")
    f = _load(args.f, formats.vector_from_json, "vector")
    out = formats.vector_to_json(apply_preserver(T, f))
    _emit(args, out, [_vec_text(out)])
    return 0


def cmd_demo(args) -> int:
    if args.name == "shift-truncation":
        out = demos.shift_truncation(args.depth)
    else:
        out = demos.DEMOS[args.name]()
    _emit(args, out, _generic_text(out))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="lpmajor", description="Exact majorization on l^p(I).")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=["text", "structured"], default="text")
    common.add_argument("--p", default=None, help="norm exponent (rational, >= 1)")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, func, *positional, help=None):
        sp = sub.add_parser(name, parents=[common], help=help)
        for arg in positional:
            sp.add_argument(arg)
        sp.set_defaults(func=func)
        return sp

    add("check", cmd_check, "f", "g", help="decide f ≺ g and print a certificate")
    add("equiv", cmd_equiv, "f", "g", help="permutation relating f and g, if any")
    add("ds-validate", cmd_ds_validate, "op")
    add("ds-compose", cmd_ds_compose, "a", "b", help="print a∘b")
    add("ds-build", cmd_ds_build, "coeffs")
    add("dtilde", cmd_dtilde, "op", "injections", help="conjugate D along disjoint injections")
    add("preserver-build", cmd_preserver_build, "spec", "window")
    add("preserver-check", cmd_preserver_check, "columns")
    add("preserver-decompose", cmd_preserver_decompose, "columns")
    add("preserver-apply", cmd_preserver_apply, "columns", "f")
    demo = add("demo", cmd_demo, help="reproduce a worked counterexample")
    demo.add_argument("name", choices=sorted(demos.DEMOS))
    demo.add_argument("--depth", type=int, default=6)
    return parser


def run(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (LpMajorError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def main(argv=None) -> None:
    sys.exit(run(argv))


if __name__ == "__main__":
    main()
