"""Closest separable states of two qubits.

Builds states on the boundary between separable and entangled two-qubit
states, the normal direction along which every entangled state shares that
boundary state as its closest separable state, and an independent numerical
minimizer of the relative entropy of entanglement to check it.
"""

from .boundary import (
    BoundaryState,
    NormalVector,
    RayPoint,
    boundary_state_from_sigma,
    boundary_state_limit,
    delta_c_hadamard,
    entangled_ray,
    extremal_residuals,
    fit_quadratic_law,
    make_boundary_state,
    normal_vector,
    random_boundary_state,
    w_uniqueness_rank,
    x_max_psd,
    z_operator,
)
from .errors import *  # noqa: F401,F403
from .linalg import eig_hermitian, ln_pd, log_mean, log_mean_matrix, sqrt_psd, takagi
from .normal_form import filter_normal_form, gram_matrices, wootters_decomposition
from .oracle import (
    OracleReport,
    SeparableEnsemble,
    closest_separable,
    product_linear_oracle,
    validate_formula,
)
from .states import (
    as_density,
    bell_diagonal,
    concurrence_signed,
    partial_transpose,
    ppt_min_eigenvalue,
    relative_entropy,
    tilde_op,
    tilde_state,
)

__version__ = "0.1.0"
