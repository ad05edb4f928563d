"""Deciding ``f ≺ g`` with a certificate either way.

For finitely supported vectors, ``f ≺ g`` (some doubly stochastic D with
``f = D g``) is decided on the common support window U = supp f ∪ supp g:
compare prefix sums of the decreasing rearrangements over U and demand
equal totals. Labels outside U are zero in both vectors and are left alone
by the witness, which is a doubly stochastic block on U plus the identity.

A positive answer carries that witness, built from T-transforms. A negative
answer carries either the two traces (doubly stochastic operators preserve
the trace) or a hinge function ``phi`` with ``phi(0) = 0`` whose sums over
f and g are in the wrong order, which no doubly stochastic D allows.
"""

from __future__ import annotations

from bisect import bisect_right
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .errors import NotMajorizedInput
from .stochastic import IDENTITY, WindowOperator
from .vectors import (
    Label,
    SparseVec,
    as_scalar,
    level_set_partition,
    ranked_labels,
    sort_labels,
    sorted_padded,
    trace,
    value_multiset_equal,
)

UPPER = "upper"
LOWER = "lower"


@dataclass(frozen=True)
class ConvexTestFn:
    """Piecewise-linear convex ``phi`` with ``phi(0) = 0`` and ``phi >= 0``.

    ``slopes[i]`` is the slope on the i-th open interval cut out by the
    sorted ``breakpoints`` (so there is one more slope than breakpoints).
    Convexity plus a minimum at 0 is exactly what ``phi >= 0`` needs.
    """

    breakpoints: tuple[Fraction, ...]
    slopes: tuple[Fraction, ...]

    def __post_init__(self):
        bps = tuple(as_scalar(b) for b in self.breakpoints)
        slopes = tuple(as_scalar(s) for s in self.slopes)
        if len(slopes) != len(bps) + 1:
            raise ValueError("need exactly one more slope than breakpoints")
        if any(b2 <= b1 for b1, b2 in zip(bps, bps[1:])):
            raise ValueError("breakpoints must be strictly increasing")
        if any(s2 < s1 for s1, s2 in zip(slopes, slopes[1:])):
            raise ValueError("slopes must be non-decreasing (convexity)")
        left = slopes[bisect_right(bps, 0) - (1 if 0 in bps else 0)]
        right = slopes[bisect_right(bps, 0)]
        if left > 0 or right < 0:
            raise ValueError("phi must attain its minimum 0 at x = 0")
        object.__setattr__(self, "breakpoints", bps)
        object.__setattr__(self, "slopes", slopes)

    @classmethod
    def hinge_upper(cls, c) -> "ConvexTestFn":
        """``x -> max(x - c, 0)`` for ``c >= 0``."""
        return cls((as_scalar(c),), (Fraction(0), Fraction(1)))

    @classmethod
    def hinge_lower(cls, c) -> "ConvexTestFn":
        """``x -> max(c - x, 0)`` for ``c <= 0``."""
        return cls((as_scalar(c),), (Fraction(-1), Fraction(0)))

    @classmethod
    def absolute(cls) -> "ConvexTestFn":
        return cls((Fraction(0),), (Fraction(-1), Fraction(1)))

    def _slope_at(self, t: Fraction) -> Fraction:
        return self.slopes[bisect_right(self.breakpoints, t)]

    def __call__(self, x) -> Fraction:
        x = as_scalar(x)
        if x == 0:
            return Fraction(0)
        lo, hi = (Fraction(0), x) if x > 0 else (x, Fraction(0))
        cuts = [lo] + [b for b in self.breakpoints if lo < b < hi] + [hi]
        area = sum(
            (self._slope_at((a + b) / 2) * (b - a) for a, b in zip(cuts, cuts[1:])),
            Fraction(0),
        )
        return area if x > 0 else -area


def convex_sum(phi: ConvexTestFn, f: SparseVec) -> Fraction:
    return sum((phi(v) for v in f.values()), Fraction(0))


@dataclass(frozen=True)
class ConvexCheck:
    holds: bool
    lhs: Fraction
    rhs: Fraction


def check_convex_inequality(f: SparseVec, g: SparseVec, phi: ConvexTestFn) -> ConvexCheck:
    """``sum phi(f) <= sum phi(g)``, with both sides.

    Guaranteed to hold whenever ``f ≺ g``; a failure refutes majorization.
    """
    lhs, rhs = convex_sum(phi, f), convex_sum(phi, g)
    return ConvexCheck(lhs <= rhs, lhs, rhs)


@dataclass(frozen=True)
class TraceMismatch:
    trace_f: Fraction
    trace_g: Fraction

    kind = "trace_mismatch"

    def recheck(self, f: SparseVec, g: SparseVec) -> bool:
        return trace(f) == self.trace_f and trace(g) == self.trace_g and self.trace_f != self.trace_g


@dataclass(frozen=True)
class ConvexGap:
    """``sum phi_c(f) = lhs > rhs = sum phi_c(g)`` for the hinge at ``c``.

    ``side`` is ``upper`` for ``(x - c)+`` (c >= 0) or ``lower`` for
    ``(c - x)+`` (c < 0); both vanish at 0 so the sums are finite.
    """

    c: Fraction
    side: str
    lhs: Fraction
    rhs: Fraction

    kind = "convex_gap"

    def test_function(self) -> ConvexTestFn:
        if self.side == UPPER:
            return ConvexTestFn.hinge_upper(self.c)
        return ConvexTestFn.hinge_lower(self.c)

    def recheck(self, f: SparseVec, g: SparseVec) -> bool:
        phi = self.test_function()
        return convex_sum(phi, f) == self.lhs and convex_sum(phi, g) == self.rhs and self.lhs > self.rhs


@dataclass(frozen=True)
class MajorizationCertificate:
    witness: WindowOperator | None = None
    refutation: TraceMismatch | ConvexGap | None = None

    @property
    def majorized(self) -> bool:
        return self.witness is not None

    @property
    def verdict(self) -> str:
        return "majorized" if self.majorized else "not_majorized"

    def __bool__(self) -> bool:
        return self.majorized


def _first_failing_prefix(x: Sequence[Fraction], y: Sequence[Fraction]) -> int | None:
    sx = sy = Fraction(0)
    for k, (a, b) in enumerate(zip(x, y), start=1):
        sx += a
        sy += b
        if sx > sy:
            return k
    return None


def majorizes(f: SparseVec, g: SparseVec) -> MajorizationCertificate:
    """Decide ``f ≺ g`` and attach a witness or a refutation.

    >>> cert = majorizes(SparseVec({"a": 2}), SparseVec({"a": 1, "b": 1}))
    >>> cert.verdict, cert.refutation
    ('not_majorized', ConvexGap(c=Fraction(1, 1), side='upper', lhs=Fraction(1, 1), rhs=Fraction(0, 1)))
    """
    tf, tg = trace(f), trace(g)
    if tf != tg:
        return MajorizationCertificate(refutation=TraceMismatch(tf, tg))
    x, y = sorted_padded(f, g)
    k = _first_failing_prefix(x, y)
    if k is None:
        return MajorizationCertificate(witness=_t_transform_witness(f, g))
    # equal totals force k < n, so y[k] is the (k+1)-th largest value of g
    c = y[k]
    phi = ConvexTestFn.hinge_upper(c) if c >= 0 else ConvexTestFn.hinge_lower(c)
    gap = ConvexGap(c, UPPER if c >= 0 else LOWER, convex_sum(phi, f), convex_sum(phi, g))
    return MajorizationCertificate(refutation=gap)


def is_majorized(f: SparseVec, g: SparseVec) -> bool:
    if trace(f) != trace(g):
        return False
    x, y = sorted_padded(f, g)
    return _first_failing_prefix(x, y) is None


def build_ds_witness(f: SparseVec, g: SparseVec) -> WindowOperator:
    """A doubly stochastic D with ``D g = f`` on the common support window.

    D is a relabeling permutation around a chain of at most n-1 averaging
    steps ``lam*I + (1-lam)*Q`` (Q a transposition) on the sorted values.
    """
    if not is_majorized(f, g):
        raise NotMajorizedInput("f is not majorized by g")
    return _t_transform_witness(f, g)


def t_transform_chain(x: Sequence[Fraction], y: Sequence[Fraction]) -> list[tuple[int, int, Fraction]]:
    """Averaging steps taking sorted ``y`` to sorted ``x`` (requires x ≺ y).

    Each step ``(j, k, lam)`` replaces ``y`` by ``T y`` where T is
    ``lam*I + (1-lam)*(swap j,k)``. Every step fixes at least one more
    coordinate, so there are at most ``len(y) - 1`` of them.
    """
    y = list(y)
    n = len(y)
    steps = []
    while True:
        over = [i for i in range(n) if y[i] > x[i]]
        if not over:
            break
        j = over[-1]
        k = next(i for i in range(j + 1, n) if y[i] < x[i])
        delta = min(y[j] - x[j], x[k] - y[k])
        mu = delta / (y[j] - y[k])
        yj, yk = y[j], y[k]
        y[j] = yj - mu * (yj - yk)
        y[k] = yk + mu * (yj - yk)
        steps.append((j, k, 1 - mu))
    assert y == list(x), "T-transform chain did not reach the target"
    return steps


def _t_transform_witness(f: SparseVec, g: SparseVec) -> WindowOperator:
    labels = sort_labels(set(f.support()) | set(g.support()))
    n = len(labels)
    order_g = ranked_labels(g, labels)
    order_f = ranked_labels(f, labels)
    y = [g[k] for k in order_g]
    x = [f[k] for k in order_f]
    M = [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]
    for j, k, lam in t_transform_chain(x, y):
        # left-multiply by the T-transform: only rows j and k change
        rj, rk = M[j], M[k]
        M[j] = [lam * a + (1 - lam) * b for a, b in zip(rj, rk)]
        M[k] = [(1 - lam) * a + lam * b for a, b in zip(rj, rk)]
    row_pos = {lab: a for a, lab in enumerate(order_f)}
    col_pos = {lab: b for b, lab in enumerate(order_g)}
    block = [[M[row_pos[r]][col_pos[c]] for c in labels] for r in labels]
    return WindowOperator(labels, labels, block, IDENTITY)


@dataclass(frozen=True)
class PermutationWitness:
    """Bijection ``supp g -> supp f`` with ``f(theta(j)) = g(j)``.

    Zero coordinates map to zero coordinates and are not materialized.
    """

    mapping: tuple[tuple[Label, Label], ...]

    def __call__(self, label: Label) -> Label:
        return dict(self.mapping)[label]

    def as_dict(self) -> dict[Label, Label]:
        return dict(self.mapping)


def equivalent_by_permutation(f: SparseVec, g: SparseVec) -> PermutationWitness | None:
    """Match level sets of g onto those of f, or None if f ≁ g.

    Level sets are paired from the largest positive value down, then from
    the most negative value up; inside a level, labels are matched in
    ascending label order.
    """
    if not value_multiset_equal(f, g):
        return None
    lf, lg = level_set_partition(f), level_set_partition(g)
    pairs: list[tuple[Label, Label]] = []
    for (vg, src), (vf, dst) in zip(lg.levels(), lf.levels()):
        assert vg == vf and len(src) == len(dst)
        pairs.extend(zip(src, dst))
    return PermutationWitness(tuple(pairs))
