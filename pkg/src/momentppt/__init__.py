"""Partial-transposition tests for two-mode bosonic states from moment matrices.

The moment matrix of the partially transposed state is positive
semidefinite exactly when the state is PPT. This package builds that matrix
from ladder-operator moments and looks for negative principal minors, with
exact rational arithmetic where the state allows it.
"""

from .errors import (
    BudgetExhausted,
    DegenerateState,
    IrrationalValue,
    MomentPPTError,
    NoMatchingOrdering,
    SoundnessViolation,
    SubsetOutOfRange,
    TruncationTooSevere,
)
from .exact import GaussianRational
from .fock import (
    CoherentSuperposition,
    FockSuperposition,
    TruncatedDensityMatrix,
    apply_operator,
    ladder_matrix,
    make_bell_phi,
    make_coherent_bell,
    make_fock,
    make_product_coherent,
    make_singlet,
    make_vacuum,
    to_density_matrix,
)
from .minors import (
    IndexSubset,
    MinorReport,
    Sign,
    WitnessResult,
    classify_state,
    det_exact,
    det_float,
    leading_minor_scan,
    ordering_signature_search,
    principal_minor,
    search_witness,
)
from .moments import (
    MomentMatrix,
    MultiIndex,
    OperatorOrdering,
    build_moment_matrix,
    cross_validate_backends,
    grlex,
    moment,
    normal_order_contraction,
    sv_compatible,
    swap_for_partial_transpose,
)
from .oracle import agreement_audit, oracle_npt, partial_transpose

__version__ = "0.1.0"
