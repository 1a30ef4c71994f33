"""Variational perturbation theory for x^p anharmonic oscillators.

The stationarity condition of the order-N variational energy collapses to a
universal polynomial equation P_N(sigma) = 0 in the scaling variable
sigma = Omega^{(p-2)/2} (Omega^2 - omega^2) / g, independent of the coupling.
This package builds that polynomial exactly, solves it in high precision,
and turns the divergent weak-coupling series into converging energy
approximations, with independent oracles for verification.
"""

from .bwcache import CacheError, get_bw_series
from .optimizer import (
    EXTREMUM,
    TURNING_POINT,
    ConvergenceReport,
    ConvergenceRow,
    ExtremumCandidate,
    NoCandidatesError,
    RationalCandidate,
    VariationalResult,
    converge_scan,
    omega_from_sigma,
    omega_polynomial,
    optimize,
    rational_candidates,
)
from .oracle import (
    OracleResult,
    OracleSettings,
    direct_extremize_wn,
    exact_energy_diag,
    exact_energy_grid,
    first_order_trial_frequency,
)
from .reexpansion import (
    OscillatorSpec,
    ReexpandedSeries,
    evaluate_wn,
    evaluate_wn_exact,
    reexpand,
    sigma_of,
    sigma_of_exact,
)
from .rootisolation import rational_roots, real_roots, sturm_root_count
from .scaling import (
    ScalingPolynomial,
    build_scaling_polynomial,
    d2w_domega2,
    d2w_domega2_at_extremum,
    dw_domega,
    scaling_polynomial_from_series,
    verify_binomial_identity,
    verify_combined_identity,
    verify_term_identity,
)
from .series_core import (
    DEFAULT_DPS,
    BWSeries,
    Rational,
    RationalPolynomial,
    as_rational,
    binom_general,
    generate_bw_coefficients,
    poly_add,
    poly_derivative,
    poly_eval,
    poly_mul,
)

__version__ = "0.1.0"

__all__ = [
    "BWSeries",
    "CacheError",
    "ConvergenceReport",
    "ConvergenceRow",
    "DEFAULT_DPS",
    "EXTREMUM",
    "ExtremumCandidate",
    "NoCandidatesError",
    "OracleResult",
    "OracleSettings",
    "OscillatorSpec",
    "Rational",
    "RationalCandidate",
    "RationalPolynomial",
    "ReexpandedSeries",
    "ScalingPolynomial",
    "TURNING_POINT",
    "VariationalResult",
    "as_rational",
    "binom_general",
    "build_scaling_polynomial",
    "converge_scan",
    "d2w_domega2",
    "d2w_domega2_at_extremum",
    "direct_extremize_wn",
    "dw_domega",
    "evaluate_wn",
    "evaluate_wn_exact",
    "exact_energy_diag",
    "exact_energy_grid",
    "first_order_trial_frequency",
    "generate_bw_coefficients",
    "get_bw_series",
    "omega_from_sigma",
    "omega_polynomial",
    "optimize",
    "poly_add",
    "poly_derivative",
    "poly_eval",
    "poly_mul",
    "rational_candidates",
    "rational_roots",
    "real_roots",
    "reexpand",
    "scaling_polynomial_from_series",
    "sigma_of",
    "sigma_of_exact",
    "sturm_root_count",
    "verify_binomial_identity",
    "verify_combined_identity",
    "verify_term_identity",
]
