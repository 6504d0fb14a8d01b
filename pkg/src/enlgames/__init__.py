"""Extended nonlocal games built out of quantum-classical games.

Construct extended nonlocal games whose entangled value is pinned to a
source game's value by an exact loss-scaling identity, adapt strategies in
both directions with verified receipts, and lower-bound entangled values by
see-saw optimization.
"""

from .adapt import (
    AdaptationReceipt,
    adapt_enlg_to_qc,
    adapt_qc_to_enlg,
    loss_operator_g,
    loss_operator_h,
    qc_environment_state,
)
from .construct import (
    MaxEntangledState,
    ReducedOps,
    WeylBasis,
    build_enlg,
    build_rv_game,
    chsh_game,
    embed_nonlocal_game,
    max_entangled,
    reduce_qc,
    weyl_basis,
)
from .errors import (
    DimensionMismatchError,
    EmptyKeepSetError,
    FileFormatError,
    InvalidDimensionError,
    NoConvergenceError,
    NonSquareError,
    NotAPermutationError,
    NotHermitianError,
    ShapeMismatchError,
    ToolkitError,
    UnsupportedAnswerAlphabetError,
    ValidationFailedError,
)
from .linalg import (
    ComplexMatrix,
    RegisterShape,
    adjoint,
    conjugate,
    hermitian_eig,
    hs_inner,
    kron,
    kron_all,
    partial_trace,
    permutation_matrix,
    permute_registers,
    transpose,
)
from .model import (
    ENLGStrategy,
    ExtendedGame,
    QCGame,
    QCStrategy,
    ValidationReport,
    Violation,
    clamp01,
    enlg_win_prob,
    qc_win_prob,
    validate_enlg,
    validate_enlg_strategy,
    validate_qc_game,
    validate_qc_strategy,
)
from .optimize import (
    RelationReport,
    SeeSawConfig,
    SeeSawReport,
    SweepRow,
    embed_enlg_strategy,
    embed_qc_strategy,
    helstrom_update,
    seesaw_enlg,
    seesaw_qc,
    state_update_enlg,
    sweep_enlg,
    sweep_qc,
    value_relation_check,
)
from .policy import DEFAULT_POLICY, NumericPolicy

__version__ = "0.1.0"
