"""Sparse maximum-likelihood regression toolkit.

Numerically characterizes the random-dual theory of an l1-regularized,
residual-ball-constrained estimator family (stationary points, small-noise
limits, phase transitions, MSE intervals, known-support benchmark) and runs
the matching large-scale fixed-point contraction and convex baselines on
synthetic instances.
"""

from .instances import Metrics, ProblemInstance, generate, metrics
from .interval import IntervalResult, delta_interval, xi_upper
from .numerics import Bracket, RngSeed, gaussian_stream
from .rdt_core import DualVariables, TheoryPoint
from .solvers import (ClupParams, ClupResult, clup_basic, clup_largescale,
                      ideal_ml_estimate, lasso_solve, socp_linear)
from .theory import (IdealMlTheory, StationarySolution, ideal_ml_theory,
                     limit_mse_ratio, phase_transition_alpha_w, plain_worst_mse,
                     sigma0_limits, solve_stationary, tune_very_ultimate)

__version__ = "0.1.0"

__all__ = [
    "Bracket", "ClupParams", "ClupResult", "DualVariables", "IdealMlTheory",
    "IntervalResult", "Metrics", "ProblemInstance", "RngSeed",
    "StationarySolution", "TheoryPoint", "clup_basic", "clup_largescale",
    "delta_interval", "gaussian_stream", "generate", "ideal_ml_estimate",
    "ideal_ml_theory", "lasso_solve", "limit_mse_ratio", "metrics",
    "phase_transition_alpha_w", "plain_worst_mse", "sigma0_limits",
    "socp_linear", "solve_stationary", "tune_very_ultimate", "xi_upper",
]
