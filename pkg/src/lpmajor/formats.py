"""JSON file formats for vectors, operators, injections, preservers and certificates.

Rationals are written as ``"p/q"`` strings (integers as ``"n"``), labels as
strings. Every loader raises :class:`InputError` naming the file and the
offending location.
"""

from __future__ import annotations

import json
from fractions import Fraction
from pathlib import Path

from .errors import LpMajorError
from .majorization import ConvexGap, MajorizationCertificate, PermutationWitness, TraceMismatch
from .preserver import OperatorColumns, PreserverSpec, Term, ViolationReport
from .stochastic import IDENTITY, ZERO, IndexInjection, StochasticVerdict, WindowOperator
from .vectors import SparseVec, as_label, as_scalar


class InputError(LpMajorError):
    def __init__(self, where: str, message: str):
        self.where = where
        super().__init__(f"{where}: {message}")


def rational(x: Fraction) -> str:
    return str(Fraction(x))


def _scalar(value, where: str) -> Fraction:
    if not isinstance(value, (str, int)) or isinstance(value, bool):
        raise InputError(where, f"expected a rational string like '1/2', got {value!r}")
    try:
        return as_scalar(value)
    except (TypeError, ValueError) as exc:
        raise InputError(where, str(exc)) from None


def _label(value, where: str) -> str:
    if isinstance(value, bool) or not isinstance(value, (str, int)):
        raise InputError(where, f"expected a label string, got {value!r}")
    try:
        return as_label(value)
    except (TypeError, ValueError) as exc:
        raise InputError(where, str(exc)) from None


def _expect(obj, kind, where: str):
    if not isinstance(obj, kind):
        name = {dict: "an object", list: "a list"}.get(kind, kind.__name__)
        raise InputError(where, f"expected {name}")
    return obj


def load_json(path) -> object:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise InputError(str(path), exc.strerror or str(exc)) from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}:{exc.lineno}:{exc.colno}", exc.msg) from None


def dumps(obj) -> str:
    return json.dumps(obj, indent=2, ensure_ascii=False)


# vectors


def vector_to_json(f: SparseVec) -> dict:
    return {k: rational(v) for k, v in f.items()}


def vector_from_json(obj, where: str = "vector") -> SparseVec:
    _expect(obj, dict, where)
    entries = {}
    for k, v in obj.items():
        value = _scalar(v, f"{where}[{k!r}]")
        if value == 0:
            raise InputError(f"{where}[{k!r}]", "zero values must be omitted, not stored")
        entries[_label(k, where)] = value
    return SparseVec(entries)


# operators


def operator_to_json(op: WindowOperator) -> dict:
    return {
        "rows": list(op.rows),
        "cols": list(op.cols),
        "block": [[rational(v) for v in row] for row in op.block],
        "tail": op.tail,
    }


def _block(obj, where: str):
    rows = [_label(x, f"{where}.rows[{i}]") for i, x in enumerate(_expect(obj.get("rows"), list, f"{where}.rows"))]
    cols = [_label(x, f"{where}.cols[{i}]") for i, x in enumerate(_expect(obj.get("cols"), list, f"{where}.cols"))]
    raw = _expect(obj.get("block"), list, f"{where}.block")
    if len(raw) != len(rows):
        raise InputError(f"{where}.block", f"has {len(raw)} rows, expected {len(rows)}")
    block = []
    for i, row in enumerate(raw):
        _expect(row, list, f"{where}.block[{i}]")
        if len(row) != len(cols):
            raise InputError(f"{where}.block[{i}]", f"has {len(row)} entries, expected {len(cols)}")
        block.append([_scalar(v, f"{where}.block[{i}][{j}]") for j, v in enumerate(row)])
    return rows, cols, block


def operator_from_json(obj, where: str = "operator") -> WindowOperator:
    _expect(obj, dict, where)
    rows, cols, block = _block(obj, where)
    tail = obj.get("tail", IDENTITY)
    if tail not in (IDENTITY, ZERO):
        raise InputError(f"{where}.tail", f"must be 'identity' or 'zero', got {tail!r}")
    try:
        return WindowOperator(rows, cols, block, tail)
    except ValueError as exc:
        raise InputError(where, str(exc)) from None


def coefficients_from_json(obj, where: str = "coefficients"):
    _expect(obj, dict, where)
    return _block(obj, where)


def verdict_to_json(v: StochasticVerdict) -> dict:
    return {
        "row_stochastic": v.is_row_stochastic,
        "column_stochastic": v.is_column_stochastic,
        "doubly_stochastic": v.is_doubly_stochastic,
        "permutation": v.is_permutation,
        "violations": [
            {
                "kind": x.kind,
                "location": [str(s) for s in x.location],
                "actual": None if x.actual is None else rational(x.actual),
                **({"detail": x.detail} if x.detail else {}),
            }
            for x in v.violations
        ],
    }


# injections


def injection_to_json(s: IndexInjection) -> dict:
    out: dict = {}
    if s.mapping:
        out["map"] = dict(s.mapping)
    if s.affine is not None:
        out["affine"] = {"k": s.affine[0], "c": s.affine[1]}
    if s.identity_off:
        out["identity_off"] = True
    return out


def injection_from_json(obj, where: str = "injection") -> IndexInjection:
    _expect(obj, dict, where)
    unknown = set(obj) - {"map", "affine", "identity_off"}
    if unknown:
        raise InputError(where, f"unknown keys {sorted(unknown)}")
    if "map" not in obj and "affine" not in obj and not obj.get("identity_off"):
        raise InputError(where, "needs a 'map' or an 'affine' rule")
    pairs = ()
    if "map" in obj:
        m = _expect(obj["map"], dict, f"{where}.map")
        pairs = tuple((_label(a, f"{where}.map"), _label(b, f"{where}.map[{a!r}]")) for a, b in m.items())
    affine = None
    if "affine" in obj:
        a = _expect(obj["affine"], dict, f"{where}.affine")
        try:
            affine = (int(a["k"]), int(a.get("c", 0)))
        except (KeyError, TypeError, ValueError):
            raise InputError(f"{where}.affine", "needs integer 'k' and optional integer 'c'") from None
    try:
        return IndexInjection(pairs, affine, bool(obj.get("identity_off", False)))
    except ValueError as exc:
        raise InputError(where, str(exc)) from None


def injections_from_json(obj, where: str = "injections") -> list[IndexInjection]:
    if isinstance(obj, dict) and "injections" in obj:
        obj, where = obj["injections"], f"{where}.injections"
    _expect(obj, list, where)
    return [injection_from_json(x, f"{where}[{i}]") for i, x in enumerate(obj)]


# preservers


def spec_to_json(spec: PreserverSpec) -> dict:
    return {
        "p": rational(spec.p),
        "terms": [{"alpha": rational(t.alpha), "sigma": injection_to_json(t.sigma)} for t in spec.terms],
    }


def spec_from_json(obj, where: str = "spec") -> PreserverSpec:
    _expect(obj, dict, where)
    p = _scalar(obj.get("p", "2"), f"{where}.p")
    terms = []
    for i, t in enumerate(_expect(obj.get("terms", []), list, f"{where}.terms")):
        tw = f"{where}.terms[{i}]"
        _expect(t, dict, tw)
        alpha = _scalar(t.get("alpha"), f"{tw}.alpha")
        if alpha == 0:
            raise InputError(f"{tw}.alpha", "coefficients must be nonzero")
        terms.append(Term(alpha, injection_from_json(t.get("sigma"), f"{tw}.sigma")))
    try:
        return PreserverSpec(tuple(terms), p)
    except ValueError as exc:
        raise InputError(where, str(exc)) from None


def columns_to_json(T: OperatorColumns) -> dict:
    return {"columns": {j: vector_to_json(v) for j, v in T.columns}}


def columns_from_json(obj, where: str = "columns") -> OperatorColumns:
    _expect(obj, dict, where)
    cols = _expect(obj.get("columns"), dict, f"{where}.columns")
    return OperatorColumns(
        tuple((_label(j, f"{where}.columns"), vector_from_json(v, f"{where}.columns[{j!r}]")) for j, v in cols.items())
    )


def report_to_json(r: ViolationReport | None) -> dict | None:
    if r is None:
        return None
    return {"kind": r.kind, "labels": list(r.labels), "details": r.details}


# certificates


def refutation_to_json(ref) -> dict | None:
    if ref is None:
        return None
    if isinstance(ref, TraceMismatch):
        return {"kind": "trace_mismatch", "c": None, "lhs": rational(ref.trace_f), "rhs": rational(ref.trace_g)}
    assert isinstance(ref, ConvexGap)
    return {"kind": "convex_gap", "side": ref.side, "c": rational(ref.c), "lhs": rational(ref.lhs), "rhs": rational(ref.rhs)}


def certificate_to_json(cert: MajorizationCertificate) -> dict:
    return {
        "verdict": cert.verdict,
        "witness": None if cert.witness is None else operator_to_json(cert.witness),
        "refutation": refutation_to_json(cert.refutation),
    }


def certificate_from_json(obj, where: str = "certificate") -> MajorizationCertificate:
    _expect(obj, dict, where)
    verdict = obj.get("verdict")
    if verdict == "majorized":
        return MajorizationCertificate(witness=operator_from_json(obj.get("witness"), f"{where}.witness"))
    if verdict != "not_majorized":
        raise InputError(f"{where}.verdict", f"unknown verdict {verdict!r}")
    ref = _expect(obj.get("refutation"), dict, f"{where}.refutation")
    lhs = _scalar(ref.get("lhs"), f"{where}.refutation.lhs")
    rhs = _scalar(ref.get("rhs"), f"{where}.refutation.rhs")
    if ref.get("kind") == "trace_mismatch":
        return MajorizationCertificate(refutation=TraceMismatch(lhs, rhs))
    if ref.get("kind") == "convex_gap":
        c = _scalar(ref.get("c"), f"{where}.refutation.c")
        return MajorizationCertificate(refutation=ConvexGap(c, ref.get("side", "upper"), lhs, rhs))
    raise InputError(f"{where}.refutation.kind", f"unknown refutation {ref.get('kind')!r}")


def witness_to_json(w: PermutationWitness | None) -> dict | None:
    return None if w is None else {"bijection": dict(w.mapping)}
