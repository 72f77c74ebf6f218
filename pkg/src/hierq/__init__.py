"""Hierarchic quantum states: tree-structured wave functions, branch-restricted
density matrices, measurement with overlapping pointer states, hierarchic
ladder operators and the continuous wavelet norm identity."""

from .errors import (
    DimensionMismatch,
    DuplicateSibling,
    GridMismatch,
    HierError,
    IndexOutOfRange,
    NonpositiveCpsi,
    NotAdmissible,
    NotNormalized,
    NumericContractViolation,
    PathInvalid,
    StructureMismatch,
    ZeroProbability,
    ZeroSignal,
)
from .hier_core import ComponentState, HierState, inner_product, linear_combine, norm_sq
from .tensor_states import (
    ControlledOperator,
    DensityMatrix,
    TensorNode,
    TreeTensorState,
    TwoLevelState,
    branch_reduced_density,
    controlled_expectation,
    expectation_micro,
    full_micro_density,
    meson_state,
    reduced_density,
)

__version__ = "0.1.0"
