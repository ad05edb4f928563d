"""Worked counterexamples, reproduced at finite depth.

Each function returns a plain dict (JSON-ready) so the CLI can print it.
"""

from __future__ import annotations

import random
from fractions import Fraction

from . import formats
from .majorization import equivalent_by_permutation, majorizes
from .preserver import (
    build_operator_sum,
    check_columns_equivalent,
    check_row_structure,
    trace_operator_l1,
    verify_preserver_on_samples,
)
from .sampling import random_majorized_pair
from .stochastic import IndexInjection, permutation_from_injection, validate
from .vectors import SparseVec, trace


def halving_pair(depth: int) -> tuple[SparseVec, SparseVec]:
    """``f = sum 2^-n e_{n+1}``, ``g = sum 2^-n e_n`` for n = 1..depth."""
    if depth < 1:
        raise ValueError("depth must be >= 1")
    f = SparseVec({n + 1: Fraction(1, 2**n) for n in range(1, depth + 1)})
    g = SparseVec({n: Fraction(1, 2**n) for n in range(1, depth + 1)})
    return f, g


def shift_truncation(depth: int = 6) -> dict:
    f, g = halving_pair(depth)
    theta = equivalent_by_permutation(f, g)
    shift = permutation_from_injection(IndexInjection.from_affine(1, 1), range(1, depth + 1))
    return {
        "demo": "shift-truncation",
        "depth": depth,
        "f": formats.vector_to_json(f),
        "g": formats.vector_to_json(g),
        "trace_f": formats.rational(trace(f)),
        "trace_g": formats.rational(trace(g)),
        "f_majorized_by_g": majorizes(f, g).majorized,
        "g_majorized_by_f": majorizes(g, f).majorized,
        "bijection": formats.witness_to_json(theta)["bijection"],
        "shift_operator_verdict": formats.verdict_to_json(validate(shift)),
        "note": (
            "Each truncation is a relabeling of the other, so f and g majorize each other here. "
            "The infinite-support pair is outside what this tool decides: the shift n -> n+1 is "
            "not onto, and the zero-tail shift block above fails the doubly stochastic check."
        ),
    }


def sum_of_preservers() -> dict:
    s1 = IndexInjection.from_affine(2, 0)
    s2 = IndexInjection.from_affine(1, 0)
    window = ["1", "2", "3"]
    T = build_operator_sum([(1, s1), (1, s2)], window)
    pair = (SparseVec({1: 1, 2: 1}), SparseVec({1: 1, 3: 1}))
    result = verify_preserver_on_samples(T, [pair])
    failure = result.failures[0] if result.failures else None
    return {
        "demo": "sum-of-preservers",
        "operator": "P_{n->2n} + P_{n->n}",
        "columns": formats.columns_to_json(T)["columns"],
        "row_structure": formats.report_to_json(check_row_structure(T)),
        "columns_equivalent": formats.report_to_json(check_columns_equivalent(T)),
        "sample_pair": {"f": formats.vector_to_json(pair[0]), "g": formats.vector_to_json(pair[1])},
        "sample_preserved": result.holds,
        "Tf": None if failure is None else formats.vector_to_json(failure.Tf),
        "Tg": None if failure is None else formats.vector_to_json(failure.Tg),
        "certificate": None if failure is None else formats.certificate_to_json(failure.certificate),
    }


def l1_trace(samples: int = 20, seed: int = 0) -> dict:
    h = SparseVec({1: Fraction(1, 2), 2: Fraction(1, 2)})
    window = ["1", "2", "3"]
    T = trace_operator_l1(h, window)
    rng = random.Random(seed)
    pairs = [random_majorized_pair(rng, window) for _ in range(samples)]
    result = verify_preserver_on_samples(T, pairs)
    return {
        "demo": "l1-trace",
        "h": formats.vector_to_json(h),
        "window": window,
        "samples": result.checked,
        "samples_preserved": result.holds,
        "row_structure": formats.report_to_json(check_row_structure(T)),
        "note": "f -> (sum f) h preserves majorization on l^1 yet has a row shared by several columns.",
    }


DEMOS = {
    "shift-truncation": shift_truncation,
    "sum-of-preservers": sum_of_preservers,
    "l1-trace": l1_trace,
}
