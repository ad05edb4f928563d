"""Exact majorization on l^p(I) for finitely supported vectors."""

from .errors import *  # noqa: F401,F403
from .majorization import (
    ConvexCheck,
    ConvexGap,
    ConvexTestFn,
    MajorizationCertificate,
    PermutationWitness,
    TraceMismatch,
    build_ds_witness,
    check_convex_inequality,
    convex_sum,
    equivalent_by_permutation,
    is_majorized,
    majorizes,
)
from .preserver import (
    OperatorColumns,
    PreserverSpec,
    Term,
    ViolationReport,
    apply_preserver,
    build_operator_sum,
    build_preserver,
    check_columns_equivalent,
    check_row_structure,
    decompose,
    replication_norm,
    replication_spec,
    trace_operator_l1,
    verify_preserver_on_samples,
)
from .stochastic import (
    IndexInjection,
    StochasticVerdict,
    Violation,
    WindowOperator,
    apply,
    compose,
    conjugate_by_injections,
    contraction_check,
    from_coefficients,
    permutation_from_injection,
    push_forward,
    transpose,
    validate,
)
from .vectors import (
    LevelSetPartition,
    SparseVec,
    level_set_partition,
    p_norm,
    sorted_padded,
    trace,
    value_multiset_equal,
)

__version__ = "0.1.0"
