"""Exact laws of the first two traces of Gaussian beta-ensembles, with
matrix and eigenvalue samplers and a Monte Carlo / quadrature verification
harness."""

from .algebra import (
    BOUNDARY,
    EXTERIOR,
    INTERIOR,
    DiscriminantValue,
    HankelMatrix,
    SecularCoefficients,
    discriminant,
    extend_traces,
    hankel_matrix,
    in_domain,
    log_vandermonde,
    newton_coefficients,
    scale_traces,
    shift_traces,
    standardize_traces,
    traces_from_matrix,
    traces_from_spectrum,
)
from .core import (
    EnsembleParams,
    MatrixSample,
    RngStream,
    Spectrum,
    TraceVector,
    exponent_p,
    make_params,
)
from .distributions import (
    log_normalization,
    log_q_t1,
    log_q_t1_t2,
    log_q_t2,
    log_trace_jpdf_unnormalized,
    mean_t2,
    mixed_moment,
    sample_t1_t2_exact,
)
from .errors import *  # noqa: F401,F403
from .geometry import (
    BoundCheck,
    BoundsReport,
    ExtremalPattern,
    cauchy_schwarz_check,
    lagrange_residual,
    min_t2_given_t1,
    solve_multipliers,
    t2_cut_bounds,
    t2_cut_check,
    traces_from_pattern,
)
from .sampling import (
    McmcConfig,
    sample_dense,
    sample_spectrum_mcmc,
    sample_tridiagonal,
)
from .verify import (
    Histogram,
    VerificationReport,
    cdf_t1,
    cdf_t2,
    ks_statistic,
    quadrature_2d,
    run_campaign,
)

__version__ = "0.1.0"
