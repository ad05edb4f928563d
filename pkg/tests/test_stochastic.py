import random
from fractions import Fraction as F

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lpmajor.errors import (
    ColSumError,
    IncompatibleWindows,
    NegativeEntryError,
    NotDoublyStochastic,
    NotInjectiveOnWindow,
    OutsideInjectionDomain,
    OverlappingImages,
    RowSumError,
    SupportOutsideWindow,
)
from lpmajor.sampling import random_affine_family, random_ds, random_vec
from lpmajor.stochastic import (
    IDENTITY,
    ZERO,
    IndexInjection,
    WindowOperator,
    apply,
    compose,
    conjugate_by_injections,
    contraction_check,
    from_coefficients,
    images_collision,
    permutation_from_injection,
    push_forward,
    transpose,
    validate,
)
from lpmajor.vectors import SparseVec, p_norm

H = F(1, 2)
UNIFORM = WindowOperator("ab", "ab", [[H, H], [H, H]])
SWAP = WindowOperator("ab", "ab", [[0, 1], [1, 0]])


class TestValidate:
    def test_uniform(self):
        v = validate(UNIFORM)
        assert v.is_doubly_stochastic and not v.is_permutation and v.violations == ()

    def test_identity_is_permutation(self):
        v = validate(WindowOperator.identity("ab"))
        assert v.is_permutation and v.is_doubly_stochastic

    def test_one_by_two_row_stochastic_only(self):
        op = WindowOperator(["a"], ["a", "b"], [[H, H]], ZERO)
        v = validate(op)
        assert v.is_row_stochastic and not v.is_column_stochastic and not v.is_doubly_stochastic
        colsum = [x for x in v.violations if x.kind == "ColSum"]
        assert [(x.location, x.actual) for x in colsum] == [(("a",), H), (("b",), H)]
        assert any(x.kind == "NonSquareBlock" for x in v.violations)

    def test_negative_entry(self):
        op = WindowOperator("ab", "ab", [[2, -1], [-1, 2]])
        v = validate(op)
        assert not v.is_row_stochastic and not v.is_column_stochastic
        assert [x.location for x in v.violations] == [("a", "b"), ("b", "a")]

    def test_shift_not_ds_on_naturals(self):
        shift = permutation_from_injection(IndexInjection.from_affine(1, 1), [1, 2, 3])
        assert shift.rows == ("2", "3", "4") and shift.tail == ZERO
        v = validate(shift)
        assert v.is_column_stochastic and v.is_row_stochastic
        assert not v.is_doubly_stochastic and not v.is_permutation
        (bad,) = v.violations
        assert bad.kind == "NonSquareBlock" and "['1']" in bad.detail

    def test_identity_tail_needs_same_labels(self):
        with pytest.raises(ValueError):
            WindowOperator(["a"], ["b"], [[1]], IDENTITY)

    @given(st.integers(0, 10**6))
    @settings(max_examples=60)
    def test_transpose_swaps_flags(self, seed):
        rng = random.Random(seed)
        rows = ["r0", "r1", "r2"][: rng.randint(1, 3)]
        cols = ["c0", "c1", "c2"][: rng.randint(1, 3)]
        block = [[F(rng.randint(0, 3), 3) for _ in cols] for _ in rows]
        op = WindowOperator(rows, cols, block, ZERO)
        v, vt = validate(op), validate(transpose(op))
        assert (v.is_row_stochastic, v.is_column_stochastic) == (vt.is_column_stochastic, vt.is_row_stochastic)
        assert transpose(transpose(op)) == op

    @given(st.integers(0, 10**6))
    @settings(max_examples=60)
    def test_ds_implies_square(self, seed):
        rng = random.Random(seed)
        n, m = rng.randint(1, 3), rng.randint(1, 3)
        op = WindowOperator([str(i) for i in range(n)], [str(i) for i in range(m)],
                            [[F(rng.randint(0, 2), 2) for _ in range(m)] for _ in range(n)], ZERO)
        v = validate(op)
        if v.is_doubly_stochastic:
            assert n == m
        if v.is_permutation:
            assert v.is_doubly_stochastic
        assert v.is_doubly_stochastic == (v.is_row_stochastic and v.is_column_stochastic and set(op.rows) == set(op.cols))


class TestFromCoefficients:
    def test_identity(self):
        op = from_coefficients("ab", "ab", [[1, 0], [0, 1]])
        assert op.same_as(WindowOperator.identity("ab"))

    def test_uniform_three(self):
        third = F(1, 3)
        op = from_coefficients("abc", "abc", [[third] * 3] * 3)
        assert validate(op).is_doubly_stochastic

    def test_first_violation_is_column_two(self):
        with pytest.raises(ColSumError) as info:
            from_coefficients("ab", "ab", [[F(2, 3), F(1, 3)], [F(1, 3), F(1, 3)]])
        assert info.value.violation.location == ("b",)
        assert info.value.violation.actual == F(2, 3)

    def test_row_error(self):
        # column sums are 1, row sums are 3/2 and 1/2
        with pytest.raises(RowSumError) as info:
            from_coefficients("ab", "ab", [[1, F(1, 2)], [0, F(1, 2)]])
        assert info.value.violation.location == ("a",)

    def test_negative(self):
        with pytest.raises(NegativeEntryError):
            from_coefficients("ab", "ab", [[2, -1], [-1, 2]])


class TestApply:
    def test_uniform_on_unit(self):
        assert apply(UNIFORM, SparseVec({"a": 1})) == SparseVec({"a": H, "b": H})

    def test_identity(self):
        f = SparseVec({"a": 3, "q": -1})
        assert apply(WindowOperator.identity("ab"), f) == f

    def test_tail_pass_through(self):
        assert apply(UNIFORM, SparseVec({"c": 7})) == SparseVec({"c": 7})

    def test_zero_tail_rejects_outside(self):
        op = WindowOperator(["a"], ["a", "b"], [[H, H]], ZERO)
        with pytest.raises(SupportOutsideWindow):
            apply(op, SparseVec({"c": 1}))


class TestCompose:
    def test_identity_left(self):
        D = random_ds(random.Random(3), ["1", "2", "3"])
        assert compose(WindowOperator.identity(["1", "2", "3"]), D).same_as(D)
        assert compose(WindowOperator.identity(), D).same_as(D)

    def test_uniform_idempotent(self):
        assert compose(UNIFORM, UNIFORM).same_as(UNIFORM)

    def test_swap_involution(self):
        assert compose(SWAP, SWAP).same_as(WindowOperator.identity("ab"))

    def test_different_windows(self):
        other = WindowOperator("bc", "bc", [[H, H], [H, H]])
        C = compose(UNIFORM, other)
        f = SparseVec({"a": 1, "b": 2, "c": 4, "d": 5})
        assert apply(C, f) == apply(UNIFORM, apply(other, f))
        assert validate(C).is_doubly_stochastic

    def test_zero_tail_incompatible(self):
        a = WindowOperator(["x"], ["x"], [[1]], ZERO)
        b = WindowOperator(["y"], ["y"], [[1]], ZERO)
        with pytest.raises(IncompatibleWindows):
            compose(a, b)

    def test_zero_tail_chain(self):
        s1 = permutation_from_injection(IndexInjection.from_affine(1, 1), [1, 2])
        s2 = permutation_from_injection(IndexInjection.from_affine(1, 1), [2, 3])
        C = compose(s2, s1)
        assert apply(C, SparseVec({1: 5, 2: 7})) == SparseVec({3: 5, 4: 7})

    @given(st.integers(0, 10**6))
    @settings(max_examples=50)
    def test_compose_matches_sequential_apply(self, seed):
        rng = random.Random(seed)
        labels = [str(i) for i in range(6)]
        A = random_ds(rng, rng.sample(labels, rng.randint(1, 4)))
        B = random_ds(rng, rng.sample(labels, rng.randint(1, 4)))
        f = random_vec(rng, labels + ["x"])
        assert apply(compose(A, B), f) == apply(A, apply(B, f))


class TestInjections:
    def test_explicit_and_affine(self):
        s = IndexInjection((("x", "y"), (1, 2)), (2, 0))
        assert s("x") == "y" and s(3) == "6"
        with pytest.raises(ValueError):
            IndexInjection(((1, 3),), (2, 0))
        assert IndexInjection.from_affine(2, 1)(4) == "9"
        assert IndexInjection.identity()("q") == "q"
        with pytest.raises(OutsideInjectionDomain):
            IndexInjection.from_map({"a": "b"})("c")
        with pytest.raises(OutsideInjectionDomain):
            IndexInjection.from_affine(2)("x")

    def test_non_injective(self):
        with pytest.raises(NotInjectiveOnWindow):
            IndexInjection.from_map({"a": "c", "b": "c"})
        with pytest.raises(NotInjectiveOnWindow):
            IndexInjection.from_affine(0, 3)

    def test_doubling_entries(self):
        op = permutation_from_injection(IndexInjection.from_affine(2), [1, 2])
        assert op.nonzero_entries() == {("2", "1"): 1, ("4", "2"): 1}

    def test_identity_injection(self):
        op = permutation_from_injection(IndexInjection.identity(), "abc")
        assert op.tail == IDENTITY and op.same_as(WindowOperator.identity("abc"))

    def test_affine_collisions(self):
        even, odd = IndexInjection.from_affine(2, 0), IndexInjection.from_affine(2, 1)
        assert images_collision(even, odd, [1, 2]) is None
        hit = images_collision(IndexInjection.from_affine(2), IndexInjection.from_affine(1), [])
        assert hit is not None and int(hit) % 2 == 0
        # 3a + 1 = 5b + 2 has integer solutions
        hit = images_collision(IndexInjection.from_affine(3, 1), IndexInjection.from_affine(5, 2), [])
        assert int(hit) % 3 == 1 and int(hit) % 5 == 2


def intertwines(D, Dt, sigma, probe_labels):
    """P_sigma D e_j == D~ P_sigma e_j for each probe label j."""
    for j in probe_labels:
        e = SparseVec.unit(j)
        if push_forward(sigma, apply(D, e)) != apply(Dt, push_forward(sigma, e)):
            return False
    return True


class TestConjugate:
    def test_identity(self):
        D = WindowOperator.identity([1, 2])
        Dt = conjugate_by_injections(D, [IndexInjection.from_affine(2)])
        assert Dt.same_as(WindowOperator.identity())

    def test_uniform_doubling(self):
        D = WindowOperator([1, 2], [1, 2], [[H, H], [H, H]])
        sigma = IndexInjection.from_affine(2)
        Dt = conjugate_by_injections(D, [sigma])
        assert Dt.same_as(WindowOperator([2, 4], [2, 4], [[H, H], [H, H]]))
        # off the images (odd labels) D~ is the identity
        assert Dt.entry(3, 3) == 1 and Dt.entry(3, 1) == 0
        lhs = push_forward(sigma, apply(D, SparseVec.unit(1)))
        rhs = apply(Dt, push_forward(sigma, SparseVec.unit(1)))
        assert lhs == rhs == SparseVec({2: H, 4: H})

    def test_swap_two_images(self):
        D = WindowOperator([1, 2], [1, 2], [[0, 1], [1, 0]])
        fam = [IndexInjection.from_affine(2, 0), IndexInjection.from_affine(2, 1)]
        Dt = conjugate_by_injections(D, fam)
        assert apply(Dt, SparseVec({2: 1, 3: 10, 4: 100, 5: 1000})) == SparseVec({4: 1, 5: 10, 2: 100, 3: 1000})
        assert validate(Dt).is_permutation

    def test_overlap_rejected(self):
        with pytest.raises(OverlappingImages):
            conjugate_by_injections(UNIFORM, [IndexInjection.identity(), IndexInjection.from_map({"a": "b", "b": "c"})])

    def test_not_ds_rejected(self):
        with pytest.raises(NotDoublyStochastic):
            conjugate_by_injections(WindowOperator("ab", "ab", [[1, 1], [0, 0]]), [])

    @given(st.integers(0, 10**6))
    @settings(max_examples=40)
    def test_intertwining_random(self, seed):
        rng = random.Random(seed)
        window = [str(i) for i in rng.sample(range(1, 9), rng.randint(1, 4))]
        D = random_ds(rng, window)
        fam = random_affine_family(rng, rng.randint(1, 3))
        Dt = conjugate_by_injections(D, fam)
        assert validate(Dt).is_doubly_stochastic
        probes = window + ["0", "11", "12"]
        assert all(intertwines(D, Dt, s, probes) for s in fam)


class TestContraction:
    def test_uniform_unit_p2(self):
        rep = contraction_check(UNIFORM, [SparseVec({"a": 1})], 2)
        assert rep.holds and rep.max_ratio == pytest.approx(2 ** -0.5, rel=1e-12)

    def test_identity_ratio_one(self):
        rep = contraction_check(WindowOperator.identity("ab"), [SparseVec({"a": 3, "z": -1})], F(7, 2))
        assert rep.holds and rep.max_ratio == pytest.approx(1.0, rel=1e-15)
        rep1 = contraction_check(WindowOperator.identity("ab"), [SparseVec({"a": 3})], 1)
        assert rep1.max_ratio == 1

    def test_uniform_p1_equality(self):
        rep = contraction_check(UNIFORM, [SparseVec({"a": 1, "b": 1})], 1)
        assert rep.max_ratio == 1 and isinstance(rep.max_ratio, F)

    def test_requires_ds(self):
        with pytest.raises(NotDoublyStochastic):
            contraction_check(WindowOperator(["a"], ["a", "b"], [[H, H]], ZERO), [], 2)

    def test_norm_direct(self):
        f = SparseVec({"a": 2, "b": -1})
        Df = apply(UNIFORM, f)
        assert Df == SparseVec({"a": H, "b": H})
        assert p_norm(Df, 2) <= p_norm(f, 2)
