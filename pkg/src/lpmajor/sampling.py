"""Seeded random generators for exact test data.

Everything takes a :class:`random.Random` so runs are reproducible.
"""

from __future__ import annotations

import random
from fractions import Fraction
from typing import Sequence

from .majorization import ConvexTestFn
from .stochastic import IDENTITY, IndexInjection, WindowOperator, apply
from .vectors import SparseVec


def random_rational(rng: random.Random, span: int = 6, max_den: int = 4, allow_negative: bool = True) -> Fraction:
    lo = -span if allow_negative else 0
    return Fraction(rng.randint(lo * max_den, span * max_den), rng.randint(1, max_den))


def random_vec(rng: random.Random, labels: Sequence[str], max_support: int = 6, allow_negative: bool = True) -> SparseVec:
    size = rng.randint(0, min(max_support, len(labels)))
    chosen = rng.sample(list(labels), size)
    return SparseVec({k: random_rational(rng, allow_negative=allow_negative) for k in chosen})


def random_ds(rng: random.Random, labels: Sequence[str], steps: int | None = None) -> WindowOperator:
    """Doubly stochastic block on ``labels``: a random permutation times T-transforms.

    Products of doubly stochastic matrices stay doubly stochastic, and the
    entries remain exact rationals.
    """
    labels = list(labels)
    n = len(labels)
    perm = rng.sample(range(n), n)
    M = [[Fraction(int(perm[i] == j)) for j in range(n)] for i in range(n)]
    for _ in range(rng.randint(0, 2 * n) if steps is None else steps):
        if n < 2:
            break
        j, k = rng.sample(range(n), 2)
        lam = Fraction(rng.randint(0, 6), 6)
        rj, rk = M[j], M[k]
        M[j] = [lam * a + (1 - lam) * b for a, b in zip(rj, rk)]
        M[k] = [(1 - lam) * a + lam * b for a, b in zip(rj, rk)]
    return WindowOperator(labels, labels, M, IDENTITY)


def random_majorized_pair(rng: random.Random, labels: Sequence[str], max_support: int = 6) -> tuple[SparseVec, SparseVec]:
    """``(D g, g)`` for random ``g`` and a random doubly stochastic ``D``."""
    g = random_vec(rng, labels, max_support)
    window = list(g.support())
    extra = [k for k in labels if k not in g]
    window += rng.sample(extra, rng.randint(0, min(2, len(extra))))
    D = random_ds(rng, window)
    return apply(D, g), g


def random_convex_fn(rng: random.Random, max_breaks: int = 4) -> ConvexTestFn:
    """Piecewise-linear convex ``phi >= 0`` with ``phi(0) = 0``."""
    m = rng.randint(1, max_breaks)
    bps = sorted({random_rational(rng) for _ in range(m)} | {Fraction(0)})
    zero_at = bps.index(Fraction(0))
    # slopes left of 0 are <= 0, right of 0 are >= 0, non-decreasing throughout
    left = sorted(-random_rational(rng, allow_negative=False) for _ in range(zero_at + 1))
    right = sorted(random_rational(rng, allow_negative=False) for _ in range(len(bps) - zero_at))
    return ConvexTestFn(tuple(bps), tuple(left + right))


def random_affine_family(rng: random.Random, n_terms: int, max_modulus: int = 6) -> list[IndexInjection]:
    """Affine injections with pairwise disjoint images on all integers.

    A common modulus m >= n_terms with distinct residues keeps the images in
    distinct residue classes.
    """
    m = rng.randint(max(n_terms, 1), max(n_terms, max_modulus))
    residues = rng.sample(range(m), n_terms)
    return [IndexInjection.from_affine(m, r + m * rng.randint(0, 3)) for r in residues]
