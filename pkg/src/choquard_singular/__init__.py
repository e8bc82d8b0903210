"""Singular solutions of div(|x|^-alpha |grad u|^(m-2) grad u) >= (I_beta * u^p) u^q.

Exact exponent algebra and existence classification, closed-form and
finite-difference evaluation of the weighted m-Laplacian on power-log
profiles, radial Riesz-potential quadrature, a radial shooting solver for
comparison problems, and end-to-end verification pipelines.
"""

from .ansatz import (PowerLogProfile, eval_profile, fundamental_solution,
                     weighted_m_laplace_closed_form, weighted_m_laplace_fd,
                     weighted_m_laplace_fd_all)
from .exponents import (Existence, ProblemParams, ProfileKind, Regime, candidate_gamma_range,
                        classify_existence, classify_profile, construct_candidate,
                        derive_exponents, validate_params)
from .grid import RadialGrid, log_radii
from .odesolver import (AsymptoticFit, FitClass, ODESolution, RadialBVP, RadialEquation,
                        fit_asymptotic_slope, integrate_radial, monotone_limit,
                        solve_bvp_shooting)
from .riesz import (EnvelopeCase, angular_kernel, bound_envelope, envelope_integral,
                    riesz_constant, riesz_convolve_radial, riesz_potential, verify_envelope)
from .verify import (DEFAULT_ANCHORS, Anchor, AprioriCheckConfig, VerificationReport,
                     VerifyConfig, apriori_ratio_check, dichotomy_pipeline, run_pipeline, keller_osserman_check, verify_double_inequality,
                     verify_pointwise_inequality)

__all__ = [
    "PowerLogProfile", "eval_profile", "fundamental_solution", "weighted_m_laplace_closed_form",
    "weighted_m_laplace_fd", "weighted_m_laplace_fd_all", "Existence", "ProblemParams", "ProfileKind", "Regime",
    "candidate_gamma_range", "classify_existence", "classify_profile", "construct_candidate",
    "derive_exponents", "validate_params", "RadialGrid", "log_radii", "AsymptoticFit",
    "FitClass", "ODESolution", "RadialBVP", "RadialEquation", "fit_asymptotic_slope",
    "integrate_radial", "monotone_limit", "solve_bvp_shooting", "EnvelopeCase",
    "angular_kernel", "bound_envelope", "envelope_integral", "riesz_constant",
    "riesz_convolve_radial", "riesz_potential", "verify_envelope", "DEFAULT_ANCHORS", "Anchor", "AprioriCheckConfig",
    "VerificationReport", "VerifyConfig", "apriori_ratio_check", "dichotomy_pipeline",
    "keller_osserman_check", "run_pipeline", "verify_double_inequality", "verify_pointwise_inequality",
]
