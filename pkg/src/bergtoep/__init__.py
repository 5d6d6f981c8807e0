"""Numerical verification of Bergman-Toeplitz operator estimates.

Model domains (unit disc, unit balls in C^2 and C^3) carry exact Bergman
kernels, so every operator inequality can be checked against ground truth:
kernel integral envelopes, Schur-test norm bounds, essential-norm brackets,
compactness and Schatten-class criteria, and the Berezin transform.
"""

from .errors import (
    AdmissibilityError,
    BergtoepError,
    ChartDomainError,
    ConditioningError,
    ConfigurationError,
    InvalidPointError,
    IterationError,
    UnsupportedSymbolError,
)
from .domains import (
    BALL2,
    BALL3,
    DISC,
    BSystem,
    Chart,
    DomainModel,
    b_functions,
    boundary_distance,
    bpolydisc,
    bsystem_for,
    chart_at,
    domain_from_name,
    kernel,
    kernel_diag,
    kernel_series,
    pseudo_distance,
    radial_point,
    sharp_b_ratio,
)
from .quadrature import (
    QuadGrid,
    build_grid,
    convergence_estimate,
    integrate,
    load_grid_csv,
    norm_pa,
    save_grid_csv,
)
from .estimates import (
    EstimateReport,
    I_ab,
    I_abs,
    default_sweep,
    kernel_norm,
    kernel_norm_bracket,
    berezin_envelope_ratio,
)
from .schur import (
    SpaceParams,
    gamma_default,
    gamma_window,
    norm_bound_constant,
    schur_weights,
    tau1,
    tau2,
    tau_product_bound,
    verify_test_inequalities,
)
from .toeplitz import (
    DiscreteOperator,
    ExhaustionSpec,
    SingularSpectrum,
    SymbolSpec,
    M_quantity,
    M_sweep,
    apply_toeplitz,
    assemble_nystrom,
    berezin,
    disc_l2_kernel_image_norm,
    disc_l2_norm,
    boundary_exponent,
    boundedness_criterion,
    compactness_criterion,
    essential_norm,
    galerkin_radial_eigs,
    global_bound_check,
    leading_singular_values,
    op_norm,
    op_norm_lower_batch,
    oracle_singular_values,
    schatten_criterion,
    schatten_norm_estimate,
    singular_values,
    symbol_eval,
    symbol_values,
    trace_identity_check,
    truncate_symbol,
)

__version__ = "0.1.0"
