"""Linear majorization preservers ``T = sum_i alpha_i P_{sigma_i}``.

For 1 < p < inf these are exactly the operators whose rows carry at most one
nonzero entry and whose columns are rearrangements of one another. This
module builds such operators from (alpha, sigma) terms, checks the two
structural conditions, reads the terms back off an operator, and tests the
preserving property on sample pairs.

Operators are stored by columns over a finite column window; applying one to
a vector supported outside that window is an error, since nothing is known
about the missing columns.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from .errors import (
    PairNotMajorized,
    StructureViolation,
    SupportOutsideColumns,
    ZeroVector,
)
from .majorization import MajorizationCertificate, majorizes
from .stochastic import IndexInjection, check_disjoint_family
from .vectors import (
    Label,
    SparseVec,
    as_exponent,
    as_label,
    as_scalar,
    label_as_int,
    p_norm,
    sort_labels,
    value_multiset_equal,
)

ROW_WITH_TWO_ENTRIES = "RowWithTwoEntries"
COLUMNS_NOT_EQUIVALENT = "ColumnsNotEquivalent"


@dataclass(frozen=True)
class Term:
    alpha: Fraction
    sigma: IndexInjection

    def __post_init__(self):
        a = as_scalar(self.alpha)
        if a == 0:
            raise ValueError("preserver coefficients must be nonzero")
        object.__setattr__(self, "alpha", a)


@dataclass(frozen=True)
class PreserverSpec:
    terms: tuple[Term, ...] = ()
    p: Fraction = Fraction(2)

    def __post_init__(self):
        object.__setattr__(self, "terms", tuple(self.terms))
        object.__setattr__(self, "p", as_exponent(self.p))

    @classmethod
    def of(cls, *pairs, p=2) -> "PreserverSpec":
        """``PreserverSpec.of((alpha, sigma), ...)``."""
        return cls(tuple(Term(a, s) for a, s in pairs), p)


@dataclass(frozen=True)
class OperatorColumns:
    """``T e_j`` for each ``j`` in a finite column window, in window order."""

    columns: tuple[tuple[Label, SparseVec], ...]

    def __post_init__(self):
        cols = tuple((as_label(j), v if isinstance(v, SparseVec) else SparseVec(v)) for j, v in self.columns)
        labels = [j for j, _ in cols]
        if len(set(labels)) != len(labels):
            raise ValueError("column labels must be distinct")
        object.__setattr__(self, "columns", cols)

    @classmethod
    def from_dict(cls, columns) -> "OperatorColumns":
        return cls(tuple(columns.items()))

    @property
    def window(self) -> tuple[Label, ...]:
        return tuple(j for j, _ in self.columns)

    def row_window(self) -> list[Label]:
        rows = set()
        for _, v in self.columns:
            rows.update(v.support())
        return sort_labels(rows)

    def column(self, j) -> SparseVec:
        return dict(self.columns)[as_label(j)]

    def entry(self, i, j) -> Fraction:
        return self.column(j)[i]

    def scaled(self, c) -> "OperatorColumns":
        c = as_scalar(c)
        return OperatorColumns(tuple((j, v * c) for j, v in self.columns))

    def __add__(self, other: "OperatorColumns") -> "OperatorColumns":
        if self.window != other.window:
            raise ValueError("can only add operators over the same column window")
        return OperatorColumns(tuple((j, v + other.column(j)) for j, v in self.columns))

    def __eq__(self, other) -> bool:
        if not isinstance(other, OperatorColumns):
            return NotImplemented
        return dict(self.columns) == dict(other.columns)

    def __hash__(self):
        return hash(frozenset(self.columns))


@dataclass(frozen=True)
class ViolationReport:
    kind: str
    labels: tuple[Label, ...]
    details: str = ""

    def __str__(self):
        return f"{self.kind}({', '.join(self.labels)})" + (f": {self.details}" if self.details else "")


def _window(labels) -> list[Label]:
    return [as_label(j) for j in labels]


def build_preserver(spec: PreserverSpec, column_window: Iterable) -> OperatorColumns:
    """Columns ``T e_j = sum_i alpha_i e_{sigma_i(j)}`` over the window."""
    window = _window(column_window)
    sigmas = [t.sigma for t in spec.terms]
    check_disjoint_family(sigmas, window)
    columns = []
    for j in window:
        col = {}
        for t in spec.terms:
            col[t.sigma(j)] = t.alpha
        columns.append((j, SparseVec._trusted(col)))
    return OperatorColumns(tuple(columns))


def build_operator_sum(terms: Sequence[tuple], column_window: Iterable) -> OperatorColumns:
    """``sum alpha_i P_{sigma_i}`` with no disjointness requirement.

    This is how non-preservers such as ``P_{2n} + P_{n}`` are assembled.
    """
    window = _window(column_window)
    total = OperatorColumns(tuple((j, SparseVec()) for j in window))
    for alpha, sigma in terms:
        part = OperatorColumns(tuple((j, SparseVec({sigma(j): alpha})) for j in window))
        total = total + part
    return total


def apply_preserver(T: OperatorColumns, f: SparseVec) -> SparseVec:
    cols = dict(T.columns)
    outside = [k for k in f if k not in cols]
    if outside:
        raise SupportOutsideColumns(f"support labels {outside} have no column in this operator")
    out = SparseVec()
    for k, v in f.items():
        out = out + cols[k] * v
    return out


def check_row_structure(T: OperatorColumns) -> ViolationReport | None:
    """None when every row label meets at most one column's support.

    Columns are scanned in window order, rows in label order; the first
    row found in two columns is reported.
    """
    owner: dict[Label, Label] = {}
    for j, col in T.columns:
        for i in col:
            if i in owner:
                j1 = owner[i]
                return ViolationReport(
                    ROW_WITH_TWO_ENTRIES,
                    (i, j1, j),
                    f"<Te_{j1}, e_{i}> = {T.entry(i, j1)}, <Te_{j}, e_{i}> = {col[i]}",
                )
            owner[i] = j
    return None


def check_columns_equivalent(T: OperatorColumns) -> ViolationReport | None:
    """None when all columns carry the same multiset of nonzero values."""
    ref = next(((j, c) for j, c in T.columns if c), None)
    if ref is None:
        return None
    j0, c0 = ref
    for j, col in T.columns:
        if not value_multiset_equal(c0, col):
            return ViolationReport(
                COLUMNS_NOT_EQUIVALENT,
                (j0, j),
                f"values {sorted(map(str, c0.values()))} vs {sorted(map(str, col.values()))}",
            )
    return None


def _matched_rows(ref: SparseVec, col: SparseVec) -> dict[Label, Label]:
    """Pair rows of ``ref`` with rows of ``col`` carrying equal values.

    Within one value, rows are paired in ascending label order on both sides.
    """
    def groups(v: SparseVec):
        out: dict[Fraction, list[Label]] = {}
        for i, x in v.items():
            out.setdefault(x, []).append(i)
        return {x: sort_labels(ls) for x, ls in out.items()}

    gr, gc = groups(ref), groups(col)
    match = {}
    for x, rows in gr.items():
        match.update(zip(rows, gc[x]))
    return match


def _with_affine_promise(mapping: dict[Label, Label]) -> IndexInjection:
    """Attach ``n -> k n + c`` when it fits every pair (at least two)."""
    ints = [(label_as_int(a), label_as_int(b)) for a, b in mapping.items()]
    if len(ints) >= 2 and all(a is not None and b is not None for a, b in ints):
        (a1, b1), (a2, b2) = ints[0], ints[1]
        if (b2 - b1) % (a2 - a1) == 0:
            k = (b2 - b1) // (a2 - a1)
            c = b1 - k * a1
            if k != 0 and all(b == k * a + c for a, b in ints):
                return IndexInjection(tuple(mapping.items()), (k, c))
    return IndexInjection.from_map(mapping)


def decompose(T: OperatorColumns, p=2) -> PreserverSpec:
    """Recover terms ``(alpha_i, sigma_i)`` from a preserver's columns.

    The reference column j0 is the nonzero column with the smallest label;
    each of its rows i gives ``alpha_i = <Te_j0, e_i>`` and ``sigma_i(j)`` is
    the row of column j matched to i. The result is checked by rebuilding.
    """
    for report in (check_row_structure(T), check_columns_equivalent(T)):
        if report is not None:
            raise StructureViolation(report)
    nonzero = [j for j, c in T.columns if c]
    if not nonzero:
        return PreserverSpec((), p)
    j0 = sort_labels(nonzero)[0]
    ref = T.column(j0)
    matches = {j: _matched_rows(ref, col) for j, col in T.columns}
    terms = []
    for i in ref:
        sigma = _with_affine_promise({j: matches[j][i] for j in T.window})
        terms.append(Term(ref[i], sigma))
    spec = PreserverSpec(tuple(terms), p)
    rebuilt = build_preserver(spec, T.window)
    assert rebuilt == T, "decomposition failed to rebuild the operator"
    return spec


@dataclass(frozen=True)
class PreservationFailure:
    index: int
    f: SparseVec
    g: SparseVec
    Tf: SparseVec
    Tg: SparseVec
    certificate: MajorizationCertificate


@dataclass(frozen=True)
class PreservationReport:
    checked: int
    failures: tuple[PreservationFailure, ...] = field(default_factory=tuple)

    @property
    def holds(self) -> bool:
        return not self.failures


def verify_preserver_on_samples(T: OperatorColumns, pairs: Iterable[tuple[SparseVec, SparseVec]]) -> PreservationReport:
    """Check ``Tf ≺ Tg`` for each pair with ``f ≺ g``."""
    failures = []
    n = 0
    for idx, (f, g) in enumerate(pairs):
        pre = majorizes(f, g)
        if not pre.majorized:
            raise PairNotMajorized(idx, pre)
        Tf, Tg = apply_preserver(T, f), apply_preserver(T, g)
        cert = majorizes(Tf, Tg)
        if not cert.majorized:
            failures.append(PreservationFailure(idx, f, g, Tf, Tg, cert))
        n += 1
    return PreservationReport(n, tuple(failures))


def trace_operator_l1(h: SparseVec, column_window: Iterable) -> OperatorColumns:
    """``f -> (sum_i f_i) h``: every column equals ``h``.

    On l^1 this preserves majorization (majorized pairs share their trace)
    but has repeated rows as soon as there are two columns, so it is not
    of the ``sum alpha_i P_{sigma_i}`` form.
    """
    if not h:
        raise ZeroVector("trace operator needs a nonzero vector h")
    return OperatorColumns(tuple((j, h) for j in _window(column_window)))


def replication_spec(k: int, p=2) -> PreserverSpec:
    """``sum_{i=1..k} P_{sigma_i}`` with ``sigma_i(n) = k n + i - 1``."""
    if k < 1:
        raise ValueError("replication factor must be >= 1")
    return PreserverSpec(tuple(Term(1, IndexInjection.from_affine(k, i - 1)) for i in range(1, k + 1)), p)


def replication_norm(k: int, p=2) -> Fraction | float:
    """``k ** (1/p)``; exact when p = 1."""
    q = as_exponent(p)
    if k < 1:
        raise ValueError("replication factor must be >= 1")
    if q == 1:
        return Fraction(k)
    return float(k) ** (1.0 / float(q))


def column_norm(spec: PreserverSpec, p=None) -> Fraction | float:
    """``(sum |alpha_i|^p)^(1/p)``, the p-norm of every column of the built operator."""
    q = spec.p if p is None else as_exponent(p)
    return p_norm(SparseVec({str(i): t.alpha for i, t in enumerate(spec.terms)}), q)
