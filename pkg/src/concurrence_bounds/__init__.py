"""Certified lower bounds and variational upper bounds on the concurrence of
mixed bipartite states in arbitrary finite dimensions.

Typical use::

    >>> from concurrence_bounds import horodecki_state, bound_report
    >>> rep = bound_report(horodecki_state(0.5))
    >>> rep.is_ppt, rep.lower_algebraic > 0
    (True, True)
"""

__version__ = "0.1.0"

from .bounds import (
    BoundReport,
    OptimizerOptions,
    ZVector,
    algebraic_lower,
    bound_report,
    eof_lower_2x2,
    is_ppt,
    lower_bound_for_z,
    negativity,
    optimize_lower,
    optimize_upper,
    two_qubit_exact,
    wootters_reference,
)
from .linalg import (
    BipartiteDims,
    StateVector,
    cross_reduced,
    herm_eig,
    partial_transpose,
    random_density_matrix,
    random_unitary,
    singular_values,
)
from .states import (
    DensityMatrix,
    SubnormalizedDecomposition,
    decompose,
    horodecki_state,
    load_state,
    maximally_entangled,
    save_state,
    transform_decomposition,
    validate,
)
from .tensor import (
    ConcurrenceTensor,
    TmatrixSet,
    antisym_dim,
    build_A,
    capc_C,
    capc_via_A,
    extract_T,
    f_function,
    pure_concurrence,
    symmetrize,
    t_matrices,
)
