"""Window operators: finite labeled blocks plus an off-window rule.

An operator on l^p(I) is stored as the finite block of coefficients
``<D e_j, e_i>`` over ``rows x cols`` together with a tail policy:

``identity``
    the operator is the identity on every label outside the window, so
    a doubly stochastic block gives a doubly stochastic operator on all of I.
``zero``
    the block is the whole operator; it is defined on vectors supported in
    ``cols`` and lands in ``rows``.

Non-surjective injections (shifts, doublings) naturally produce ``zero``
tails, and those deliberately fail the doubly stochastic verdict.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from .errors import (
    ColSumError,
    IncompatibleWindows,
    NegativeEntryError,
    NonSquareBlockError,
    NotDoublyStochastic,
    NotInjectiveOnWindow,
    OutsideInjectionDomain,
    OverlappingImages,
    RowSumError,
    SupportOutsideWindow,
)
from .vectors import Label, SparseVec, as_exponent, as_label, as_scalar, label_as_int, p_norm

IDENTITY = "identity"
ZERO = "zero"

NEGATIVE_ENTRY = "NegativeEntry"
ROW_SUM = "RowSum"
COL_SUM = "ColSum"
NON_SQUARE_BLOCK = "NonSquareBlock"

# relative slack for float norm comparisons (p != 1)
NORM_RTOL = 1e-9


@dataclass(frozen=True)
class WindowOperator:
    rows: tuple[Label, ...]
    cols: tuple[Label, ...]
    block: tuple[tuple[Fraction, ...], ...]
    tail: str = IDENTITY

    def __post_init__(self):
        rows = tuple(as_label(r) for r in self.rows)
        cols = tuple(as_label(c) for c in self.cols)
        block = tuple(tuple(as_scalar(x) for x in row) for row in self.block)
        if len(set(rows)) != len(rows) or len(set(cols)) != len(cols):
            raise ValueError("row and column labels must be distinct")
        if len(block) != len(rows) or any(len(r) != len(cols) for r in block):
            raise ValueError(f"block shape does not match {len(rows)} rows x {len(cols)} cols")
        if self.tail not in (IDENTITY, ZERO):
            raise ValueError(f"tail must be {IDENTITY!r} or {ZERO!r}, got {self.tail!r}")
        if self.tail == IDENTITY and set(rows) != set(cols):
            raise ValueError("identity tail needs the same label set for rows and columns")
        object.__setattr__(self, "rows", rows)
        object.__setattr__(self, "cols", cols)
        object.__setattr__(self, "block", block)
        object.__setattr__(self, "_row_at", {r: i for i, r in enumerate(rows)})
        object.__setattr__(self, "_col_at", {c: j for j, c in enumerate(cols)})

    @classmethod
    def identity(cls, labels: Iterable = ()) -> "WindowOperator":
        labels = tuple(as_label(x) for x in labels)
        n = len(labels)
        block = tuple(tuple(Fraction(int(i == j)) for j in range(n)) for i in range(n))
        return cls(labels, labels, block, IDENTITY)

    @property
    def shape(self) -> tuple[int, int]:
        return len(self.rows), len(self.cols)

    def window(self) -> set[Label]:
        return set(self.rows) | set(self.cols)

    def entry(self, i, j) -> Fraction:
        i, j = as_label(i), as_label(j)
        ri, cj = self._row_at.get(i), self._col_at.get(j)
        if ri is not None and cj is not None:
            return self.block[ri][cj]
        if self.tail == IDENTITY and i == j and ri is None and cj is None:
            return Fraction(1)
        return Fraction(0)

    def column(self, j) -> SparseVec:
        j = as_label(j)
        cj = self._col_at.get(j)
        if cj is None:
            if self.tail == IDENTITY:
                return SparseVec.unit(j)
            raise SupportOutsideWindow(f"label {j!r} is outside the operator's columns")
        return SparseVec._trusted({r: self.block[i][cj] for i, r in enumerate(self.rows)})

    def matrix(self, rows: Sequence, cols: Sequence) -> list[list[Fraction]]:
        """Dense coefficients over arbitrary label lists, tail included."""
        return [[self.entry(i, j) for j in cols] for i in rows]

    def nonzero_entries(self) -> dict[tuple[Label, Label], Fraction]:
        return {
            (r, c): v
            for r, row in zip(self.rows, self.block)
            for c, v in zip(self.cols, row)
            if v
        }

    def same_as(self, other: "WindowOperator") -> bool:
        """Equality as operators, ignoring label order and window padding."""
        if self.tail != other.tail:
            return False
        if self.tail == ZERO:
            return set(self.cols) == set(other.cols) and self.nonzero_entries() == other.nonzero_entries()
        labels = sorted(self.window() | other.window())
        return self.matrix(labels, labels) == other.matrix(labels, labels)

    def transpose(self) -> "WindowOperator":
        block = tuple(zip(*self.block)) if self.rows else tuple(() for _ in self.cols)
        return WindowOperator(self.cols, self.rows, block, self.tail)


def transpose(op: WindowOperator) -> WindowOperator:
    return op.transpose()


@dataclass(frozen=True)
class Violation:
    kind: str
    location: tuple
    actual: Fraction | None = None
    detail: str = ""

    def __str__(self):
        where = ", ".join(map(str, self.location))
        msg = f"{self.kind}({where})"
        if self.actual is not None:
            msg += f" = {self.actual}"
        if self.detail:
            msg += f": {self.detail}"
        return msg


@dataclass(frozen=True)
class StochasticVerdict:
    is_row_stochastic: bool
    is_column_stochastic: bool
    is_doubly_stochastic: bool
    is_permutation: bool
    violations: tuple[Violation, ...] = field(default_factory=tuple)


def validate(op: WindowOperator) -> StochasticVerdict:
    """Exact stochasticity verdict for ``op``.

    Row sums are taken over the declared rows and column sums over the
    declared columns; outside the window an identity tail contributes
    exactly one unit per row and column, so only the block matters.

    A doubly stochastic verdict additionally needs the row and column label
    sets to coincide: a zero-tail block whose rows differ from its columns
    (a 1x2 block, or the shift 1,2,3 -> 2,3,4 which leaves row 1 empty)
    is not doubly stochastic as an operator on one space, and gets a
    ``NonSquareBlock`` violation.

    Violations come in a fixed order: negative entries (row-major), column
    sums, row sums, then the square-block check.
    """
    violations: list[Violation] = []
    for r, row in zip(op.rows, op.block):
        for c, v in zip(op.cols, row):
            if v < 0:
                violations.append(Violation(NEGATIVE_ENTRY, (r, c), v))
    negative = bool(violations)
    col_bad = False
    for j, c in enumerate(op.cols):
        s = sum((row[j] for row in op.block), Fraction(0))
        if s != 1:
            col_bad = True
            violations.append(Violation(COL_SUM, (c,), s))
    row_bad = False
    for r, row in zip(op.rows, op.block):
        s = sum(row, Fraction(0))
        if s != 1:
            row_bad = True
            violations.append(Violation(ROW_SUM, (r,), s))
    square = set(op.rows) == set(op.cols)
    if not square:
        missing_rows = tuple(c for c in op.cols if c not in op._row_at)
        missing_cols = tuple(r for r in op.rows if r not in op._col_at)
        detail = f"{len(op.rows)}x{len(op.cols)} block"
        if missing_rows:
            detail += f"; no row for labels {list(missing_rows)}"
        if missing_cols:
            detail += f"; no column for labels {list(missing_cols)}"
        violations.append(Violation(NON_SQUARE_BLOCK, op.shape, None, detail))
    is_row = not negative and not row_bad
    is_col = not negative and not col_bad
    is_ds = is_row and is_col and square
    is_perm = is_ds and all(v in (0, 1) for row in op.block for v in row)
    return StochasticVerdict(is_row, is_col, is_ds, is_perm, tuple(violations))


_ERROR_FOR_KIND = {
    NEGATIVE_ENTRY: NegativeEntryError,
    ROW_SUM: RowSumError,
    COL_SUM: ColSumError,
    NON_SQUARE_BLOCK: NonSquareBlockError,
}


def from_coefficients(rows, cols, entries, tail: str = IDENTITY) -> WindowOperator:
    """Build a doubly stochastic operator from its window coefficients.

    The window data determines the operator completely, so any failure is
    an error: the first violation in :func:`validate` order is raised.

    >>> D = from_coefficients("ab", "ab", [["1/2", "1/2"], ["1/2", "1/2"]])
    >>> apply(D, SparseVec({"a": 1}))
    SparseVec({'a': '1/2', 'b': '1/2'})
    """
    probe = WindowOperator(tuple(rows), tuple(cols), tuple(tuple(r) for r in entries), ZERO)
    verdict = validate(probe)
    if verdict.violations:
        first = verdict.violations[0]
        raise _ERROR_FOR_KIND[first.kind](first)
    return WindowOperator(probe.rows, probe.cols, probe.block, tail)


def apply(op: WindowOperator, f: SparseVec) -> SparseVec:
    if op.tail == ZERO:
        outside = [k for k in f if k not in op._col_at]
        if outside:
            raise SupportOutsideWindow(f"support labels {outside} lie outside the columns of a zero-tail operator")
    out: dict[Label, Fraction] = {}
    for r, row in zip(op.rows, op.block):
        s = Fraction(0)
        for c, v in zip(op.cols, row):
            if v:
                s += v * f[c]
        out[r] = s
    if op.tail == IDENTITY:
        for k, v in f.items():
            if k not in op._row_at:
                out[k] = v
    return SparseVec._trusted(out)


def _merged(first: Sequence[Label], second: Sequence[Label]) -> tuple[Label, ...]:
    seen = set(first)
    return tuple(first) + tuple(x for x in second if x not in seen)


def compose(a: WindowOperator, b: WindowOperator) -> WindowOperator:
    """The operator ``a ∘ b`` (apply ``b`` first)."""
    if a.tail == IDENTITY and b.tail == IDENTITY:
        labels = _merged(a.rows, b.rows)
        ma = a.matrix(labels, labels)
        mb = b.matrix(labels, labels)
        n = len(labels)
        block = [
            [sum((ma[i][k] * mb[k][j] for k in range(n) if ma[i][k] and mb[k][j]), Fraction(0)) for j in range(n)]
            for i in range(n)
        ]
        return WindowOperator(labels, labels, block, IDENTITY)

    if a.tail == ZERO and not set(b.rows) <= set(a.cols):
        extra = sorted(set(b.rows) - set(a.cols))
        raise IncompatibleWindows(f"rows {extra} of the inner operator are outside the outer operator's columns")
    cols = b.cols if b.tail == ZERO else a.cols
    rows = a.rows if a.tail == ZERO else _merged(b.rows, a.rows)
    columns = [apply(a, b.column(j)) for j in cols]
    row_set = set(rows)
    for vec in columns:
        stray = [k for k in vec if k not in row_set]
        if stray:
            raise IncompatibleWindows(f"composition leaves the row window at labels {stray}")
    block = [[vec[r] for vec in columns] for r in rows]
    return WindowOperator(rows, cols, block, ZERO)


# ---------------------------------------------------------------------------
# injections and permutation operators


@dataclass(frozen=True)
class IndexInjection:
    """A one-to-one map on labels.

    Defined explicitly on ``mapping`` (pairs ``(j, sigma(j))``); off that
    finite domain either the affine rule ``n -> k*n + c`` on integer labels
    applies, or the identity if ``identity_off`` is set. Anything else is
    outside the domain.
    """

    mapping: tuple[tuple[Label, Label], ...] = ()
    affine: tuple[int, int] | None = None
    identity_off: bool = False

    def __post_init__(self):
        pairs = tuple((as_label(a), as_label(b)) for a, b in self.mapping)
        object.__setattr__(self, "mapping", pairs)
        domain = [a for a, _ in pairs]
        images = [b for _, b in pairs]
        if len(set(domain)) != len(domain):
            raise ValueError("injection map lists a label twice")
        if len(set(images)) != len(images):
            raise NotInjectiveOnWindow("injection map sends two labels to the same image")
        if self.affine is not None:
            k, c = (int(x) for x in self.affine)
            if k == 0:
                raise NotInjectiveOnWindow("affine rule n -> 0*n + c is not injective")
            object.__setattr__(self, "affine", (k, c))
            if self.identity_off:
                raise ValueError("an injection has either an affine rule or an identity tail, not both")
            for a, b in pairs:
                n = label_as_int(a)
                if n is not None and str(k * n + c) != b:
                    raise ValueError(f"explicit image of {a!r} contradicts the affine rule")
        object.__setattr__(self, "_table", dict(pairs))

    @classmethod
    def from_map(cls, mapping, identity_off: bool = False) -> "IndexInjection":
        return cls(tuple(mapping.items()), None, identity_off)

    @classmethod
    def from_affine(cls, k: int, c: int = 0) -> "IndexInjection":
        return cls((), (k, c))

    @classmethod
    def identity(cls) -> "IndexInjection":
        return cls((), None, True)

    def __call__(self, label) -> Label:
        label = as_label(label)
        hit = self._table.get(label)
        if hit is not None:
            return hit
        if self.affine is not None:
            n = label_as_int(label)
            if n is not None:
                k, c = self.affine
                return str(k * n + c)
        elif self.identity_off:
            return label
        raise OutsideInjectionDomain(f"injection is not defined at label {label!r}")

    def images(self, window: Iterable) -> list[Label]:
        window = [as_label(j) for j in window]
        out = [self(j) for j in window]
        if len(set(out)) != len(out):
            raise NotInjectiveOnWindow(f"injection is not one-to-one on window {window}")
        return out

    def is_pure_affine(self) -> bool:
        return self.affine is not None and not self.mapping

    def describe(self) -> str:
        parts = [f"{a}->{b}" for a, b in self.mapping]
        if self.affine is not None:
            k, c = self.affine
            rule = f"n->{k}n" if k != 1 else "n->n"
            if c:
                rule += f"{c:+d}"
            parts.append(rule)
        elif self.identity_off:
            parts.append("identity elsewhere")
        return "{" + ", ".join(parts) + "}"


def push_forward(sigma: IndexInjection, f: SparseVec) -> SparseVec:
    """``P_sigma f``: move the value at ``j`` to ``sigma(j)``."""
    images = sigma.images(f.support())
    return SparseVec._trusted(dict(zip(images, f.values())))


def images_collision(s1: IndexInjection, s2: IndexInjection, window: Iterable) -> Label | None:
    """A label hit by both injections, or None.

    Two pure affine rules are compared on all integer labels (exactly, via
    the gcd of their slopes); otherwise the images of ``window`` and of
    the explicit map domains are compared.
    """
    if s1.is_pure_affine() and s2.is_pure_affine():
        (k1, c1), (k2, c2) = s1.affine, s2.affine
        g, x, _ = _ext_gcd(k1, -k2)
        diff = c2 - c1
        if diff % g:
            return None
        a = x * (diff // g)
        return str(k1 * a + c1)
    window = [as_label(j) for j in window]
    dom1 = window + [a for a, _ in s1.mapping if a not in set(window)]
    dom2 = window + [a for a, _ in s2.mapping if a not in set(window)]
    hits2 = set()
    for j in dom2:
        try:
            hits2.add(s2(j))
        except OutsideInjectionDomain:
            pass
    for j in dom1:
        try:
            lab = s1(j)
        except OutsideInjectionDomain:
            continue
        if lab in hits2:
            return lab
    return None


def _ext_gcd(a: int, b: int) -> tuple[int, int, int]:
    """(g, x, y) with a*x + b*y = g = gcd(a, b) > 0."""
    old_r, r = a, b
    old_x, x = 1, 0
    old_y, y = 0, 1
    while r:
        q = old_r // r
        old_r, r = r, old_r - q * r
        old_x, x = x, old_x - q * x
        old_y, y = y, old_y - q * y
    if old_r < 0:
        old_r, old_x, old_y = -old_r, -old_x, -old_y
    return old_r, old_x, old_y


def check_disjoint_family(family: Sequence[IndexInjection], window: Iterable) -> None:
    window = list(window)
    for a in range(len(family)):
        family[a].images(window)
        for b in range(a + 1, len(family)):
            hit = images_collision(family[a], family[b], window)
            if hit is not None:
                raise OverlappingImages(a, b, hit)


def permutation_from_injection(sigma: IndexInjection, window: Iterable, identity_tail: bool | None = None) -> WindowOperator:
    """``P_sigma`` restricted to ``window``: entry 1 at ``(sigma(j), j)``.

    With ``identity_tail=None`` the tail is the identity exactly when sigma
    permutes the window; otherwise the result is a zero-tail block with rows
    ``sigma(window)``.
    """
    window = tuple(as_label(j) for j in window)
    images = sigma.images(window)
    onto = set(images) == set(window)
    if identity_tail is None:
        identity_tail = onto
    if identity_tail and not onto:
        raise IncompatibleWindows("identity tail requested but sigma does not permute the window")
    rows = window if identity_tail else tuple(images)
    image_of = dict(zip(window, images))
    block = [[Fraction(int(image_of[c] == r)) for c in window] for r in rows]
    return WindowOperator(rows, window, block, IDENTITY if identity_tail else ZERO)


def conjugate_by_injections(D: WindowOperator, family: Sequence[IndexInjection]) -> WindowOperator:
    """The operator D~ with ``P_s D = D~ P_s`` for every ``s`` in ``family``.

    ``D`` is read as its doubly stochastic block on window W plus identity
    elsewhere. On each image ``s(I)`` the coefficients of D are copied over
    (``d~[s(r), s(c)] = d[r, c]``), distinct images do not talk to each other,
    and off every image D~ is the identity. Since D is the identity off W,
    only the copies ``s(W)`` need storing; the rest is the identity tail.
    """
    verdict = validate(D)
    if not verdict.is_doubly_stochastic:
        raise NotDoublyStochastic("conjugation needs a doubly stochastic operator")
    W = D.cols
    family = list(family)
    check_disjoint_family(family, W)
    labels: list[Label] = []
    origin: dict[Label, tuple[int, Label]] = {}
    for idx, s in enumerate(family):
        for c, img in zip(W, s.images(W)):
            labels.append(img)
            origin[img] = (idx, c)
    block = []
    for i in labels:
        si, ri = origin[i]
        row = []
        for j in labels:
            sj, cj = origin[j]
            row.append(D.entry(ri, cj) if si == sj else Fraction(0))
        block.append(row)
    return WindowOperator(labels, labels, block, IDENTITY)


@dataclass(frozen=True)
class ContractionReport:
    ratios: tuple
    max_ratio: Fraction | float
    holds: bool
    p: Fraction


def contraction_check(D: WindowOperator, samples: Iterable[SparseVec], p=1) -> ContractionReport:
    """Check ``||Df||_p <= ||f||_p`` on each nonzero sample.

    Exact for ``p == 1``; otherwise the bound is allowed a relative slack of
    ``NORM_RTOL``.
    """
    q = as_exponent(p)
    if not validate(D).is_doubly_stochastic:
        raise NotDoublyStochastic("contraction bound applies to doubly stochastic operators")
    ratios = []
    holds = True
    for f in samples:
        if not f:
            continue
        num, den = p_norm(apply(D, f), q), p_norm(f, q)
        if q == 1:
            ratio = num / den
            holds &= num <= den
        else:
            ratio = num / den
            holds &= num <= den * (1 + NORM_RTOL)
        ratios.append(ratio)
    top = max(ratios) if ratios else Fraction(0)
    if not ratios and q != 1:
        top = 0.0
    return ContractionReport(tuple(ratios), top, bool(holds), q)
