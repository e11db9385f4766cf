"""ctred: order reduction for LQG controllers with machine-checkable
stability and performance certificates."""

from .certify import (
    ReductionCertificate,
    check_cor1,
    check_cor2,
    check_lemma3,
    check_thm1,
    check_thm2_bound,
    check_thm3,
    lqg_cost,
    lqg_cost_blocks,
)
from .decompose import (
    ModalBlock,
    ModalDecomposition,
    StableUnstableSplit,
    modal_form,
    mode_importance,
    split_stable_unstable,
)
from .linalg import (
    SchurForm,
    eigenvalues,
    ordered_real_schur,
    solve_care,
    solve_lyapunov,
    solve_sylvester,
)
from .norms import h2_norm, hinf_norm, l2_norm, linf_norm
from .polezero import (
    PartialFraction,
    nearest_zero_gap,
    partial_fractions,
    residue_factorization,
    small_block_cancellation_probe,
)
from .rational import RationalTransferFunction, to_rational
from .reduce import (
    BalancedRealization,
    TruncationResult,
    balance,
    balanced_truncate,
    balanced_truncate_unstable,
    minimal_realization,
    modal_truncate,
)
from .statespace import (
    FourBlockMap,
    StateSpaceSystem,
    add,
    check_minimal,
    closed_loop_matrix,
    four_block,
    frequency_response,
    is_internally_stable,
    make_system,
    poles,
    sensitivity_pair,
    series,
    zeros,
)

__version__ = "0.1.0"

__all__ = [
    "BalancedRealization",
    "FourBlockMap",
    "ModalBlock",
    "ModalDecomposition",
    "PartialFraction",
    "RationalTransferFunction",
    "ReductionCertificate",
    "SchurForm",
    "StableUnstableSplit",
    "StateSpaceSystem",
    "TruncationResult",
    "add",
    "balance",
    "balanced_truncate",
    "balanced_truncate_unstable",
    "check_cor1",
    "check_cor2",
    "check_lemma3",
    "check_minimal",
    "check_thm1",
    "check_thm2_bound",
    "check_thm3",
    "closed_loop_matrix",
    "eigenvalues",
    "four_block",
    "frequency_response",
    "h2_norm",
    "hinf_norm",
    "is_internally_stable",
    "l2_norm",
    "linf_norm",
    "lqg_cost",
    "lqg_cost_blocks",
    "make_system",
    "minimal_realization",
    "modal_form",
    "modal_truncate",
    "mode_importance",
    "nearest_zero_gap",
    "ordered_real_schur",
    "partial_fractions",
    "poles",
    "residue_factorization",
    "sensitivity_pair",
    "series",
    "small_block_cancellation_probe",
    "solve_care",
    "solve_lyapunov",
    "solve_sylvester",
    "split_stable_unstable",
    "to_rational",
    "zeros",
]
