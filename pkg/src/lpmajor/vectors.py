"""Finitely supported vectors over an abstract, unbounded index set.

Labels are opaque strings. A label whose text is the canonical decimal
form of an integer (``"7"``, ``"-3"``, not ``"07"``) sorts numerically
ahead of every non-integer label; other labels sort lexicographically.
That order drives every tie-break in the package.

Scalars are :class:`fractions.Fraction`; floats are refused so that no
decision ever depends on rounding.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational
from typing import Iterable, Iterator, Mapping, Union

Label = str
ScalarLike = Union[int, Fraction, str]


def as_label(label) -> Label:
    if isinstance(label, bool):
        raise TypeError("bool is not a valid index label")
    if isinstance(label, int):
        return str(label)
    if isinstance(label, str):
        if not label:
            raise ValueError("empty string is not a valid index label")
        return label
    raise TypeError(f"index labels must be int or str, got {type(label).__name__}")


def label_key(label: Label):
    """Sort key: integer labels numerically first, then strings."""
    try:
        n = int(label)
    except ValueError:
        return (1, 0, label)
    if str(n) == label:
        return (0, n, "")
    return (1, 0, label)


def sort_labels(labels: Iterable[Label]) -> list[Label]:
    return sorted(labels, key=label_key)


def label_as_int(label: Label) -> int | None:
    kind, n, _ = label_key(label)
    return n if kind == 0 else None


def fresh_labels(taken: Iterable[Label], count: int, prefix: str = "z") -> list[Label]:
    """Mint ``count`` labels not in ``taken``."""
    taken = set(taken)
    out: list[Label] = []
    i = 0
    while len(out) < count:
        cand = f"{prefix}{i}"
        if cand not in taken:
            out.append(cand)
            taken.add(cand)
        i += 1
    return out


def as_scalar(value) -> Fraction:
    if isinstance(value, bool):
        raise TypeError("bool is not a valid scalar")
    if isinstance(value, float):
        raise TypeError("floats are not accepted; pass an int, Fraction or 'p/q' string")
    if isinstance(value, (int, Rational)):
        return Fraction(value)
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise ValueError(f"not an exact rational: {value!r}") from exc
    raise TypeError(f"cannot interpret {type(value).__name__} as an exact rational")


def as_exponent(p) -> Fraction:
    """Validate a norm exponent ``p >= 1``."""
    q = as_scalar(p)
    if q < 1:
        raise ValueError(f"norm exponent must satisfy p >= 1, got {q}")
    return q


class SparseVec:
    """Immutable finitely supported map label -> nonzero Fraction.

    Reading a label outside the support gives 0. Zero values passed to the
    constructor are dropped, so ``support()`` is exactly the stored keys.

    >>> f = SparseVec({"a": 3, "b": "-1", "c": 0})
    >>> f.support()
    ('a', 'b')
    >>> f["zzz"]
    Fraction(0, 1)
    """

    __slots__ = ("_entries", "_hash")

    def __init__(self, entries: Mapping | Iterable[tuple] = ()):
        items = entries.items() if isinstance(entries, Mapping) else entries
        data: dict[Label, Fraction] = {}
        for label, value in items:
            v = as_scalar(value)
            lab = as_label(label)
            if v:
                data[lab] = v
            else:
                data.pop(lab, None)
        self._entries = {k: data[k] for k in sort_labels(data)}
        self._hash = None

    @classmethod
    def unit(cls, label) -> "SparseVec":
        return cls({label: 1})

    @classmethod
    def _trusted(cls, data: dict[Label, Fraction]) -> "SparseVec":
        obj = cls.__new__(cls)
        obj._entries = {k: data[k] for k in sort_labels(data) if data[k]}
        obj._hash = None
        return obj

    def __getitem__(self, label) -> Fraction:
        return self._entries.get(as_label(label), Fraction(0))

    def __contains__(self, label) -> bool:
        return as_label(label) in self._entries

    def __iter__(self) -> Iterator[Label]:
        return iter(self._entries)

    def __len__(self) -> int:
        return len(self._entries)

    def __bool__(self) -> bool:
        return bool(self._entries)

    def support(self) -> tuple[Label, ...]:
        return tuple(self._entries)

    def items(self):
        return self._entries.items()

    def values(self):
        return self._entries.values()

    def to_dict(self) -> dict[Label, Fraction]:
        return dict(self._entries)

    def __eq__(self, other) -> bool:
        if not isinstance(other, SparseVec):
            return NotImplemented
        return self._entries == other._entries

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(frozenset(self._entries.items()))
        return self._hash

    def __repr__(self) -> str:
        body = ", ".join(f"{k!r}: '{v}'" for k, v in self._entries.items())
        return f"SparseVec({{{body}}})"

    def __add__(self, other: "SparseVec") -> "SparseVec":
        if not isinstance(other, SparseVec):
            return NotImplemented
        out = dict(self._entries)
        for k, v in other._entries.items():
            out[k] = out.get(k, 0) + v
        return SparseVec._trusted(out)

    def __neg__(self) -> "SparseVec":
        return SparseVec._trusted({k: -v for k, v in self._entries.items()})

    def __sub__(self, other: "SparseVec") -> "SparseVec":
        if not isinstance(other, SparseVec):
            return NotImplemented
        return self + (-other)

    def __mul__(self, scalar) -> "SparseVec":
        c = as_scalar(scalar)
        return SparseVec._trusted({k: c * v for k, v in self._entries.items()})

    __rmul__ = __mul__

    def relabel(self, mapping: Mapping[Label, Label]) -> "SparseVec":
        """Move the value at ``j`` to ``mapping[j]``; unmapped labels stay put."""
        out: dict[Label, Fraction] = {}
        for k, v in self._entries.items():
            target = mapping.get(k, k)
            if target in out:
                raise ValueError(f"relabeling is not injective on the support (hits {target!r} twice)")
            out[target] = v
        return SparseVec._trusted(out)


def trace(f: SparseVec) -> Fraction:
    return sum(f.values(), Fraction(0))


def p_norm(f: SparseVec, p=1) -> Fraction | float:
    """``(sum |f(i)|^p)^(1/p)``.

    Exact (a Fraction) when ``p == 1``. Otherwise a float: the power sum is
    taken exactly for integer ``p`` and rescaled by the largest magnitude
    before rooting, which keeps the relative error near machine epsilon.
    """
    q = as_exponent(p)
    mags = [abs(v) for v in f.values()]
    if q == 1:
        return sum(mags, Fraction(0))
    if not mags:
        return 0.0
    top = max(mags)
    if q.denominator == 1:
        n = q.numerator
        total = sum(((m / top) ** n for m in mags), Fraction(0))
        return float(top) * float(total) ** (1.0 / n)
    qf = float(q)
    total = math.fsum(float(m / top) ** qf for m in mags)
    return float(top) * total ** (1.0 / qf)


def _decreasing(f: SparseVec, labels: Iterable[Label]) -> list[Fraction]:
    return sorted((f[k] for k in labels), reverse=True)


def sorted_padded(f: SparseVec, g: SparseVec) -> tuple[list[Fraction], list[Fraction]]:
    """Decreasing rearrangements of ``f`` and ``g`` over ``supp f | supp g``."""
    common = set(f.support()) | set(g.support())
    return _decreasing(f, common), _decreasing(g, common)


def ranked_labels(f: SparseVec, labels: Iterable[Label]) -> list[Label]:
    """``labels`` ordered by decreasing value of ``f``, ties by label order."""
    return sorted(labels, key=lambda k: (-f[k], label_key(k)))


@dataclass(frozen=True)
class LevelSetPartition:
    """Distinct nonzero values of a vector with the labels carrying each.

    ``positive_levels`` runs from the largest positive value down;
    ``negative_levels`` runs from the most negative value up (decreasing
    levels of ``-f``). Values are those of ``f`` itself. The cofinite zero
    set is left implicit.
    """

    positive_levels: tuple[tuple[Fraction, tuple[Label, ...]], ...]
    negative_levels: tuple[tuple[Fraction, tuple[Label, ...]], ...]

    def levels(self):
        return self.positive_levels + self.negative_levels


def level_set_partition(f: SparseVec) -> LevelSetPartition:
    groups: dict[Fraction, list[Label]] = {}
    for k, v in f.items():
        groups.setdefault(v, []).append(k)
    pos = tuple(
        (v, tuple(sort_labels(groups[v]))) for v in sorted((v for v in groups if v > 0), reverse=True)
    )
    neg = tuple((v, tuple(sort_labels(groups[v]))) for v in sorted(v for v in groups if v < 0))
    return LevelSetPartition(pos, neg)


def value_multiset_equal(f: SparseVec, g: SparseVec) -> bool:
    return sorted(f.values()) == sorted(g.values())
