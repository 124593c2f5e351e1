"""Spectral analysis of complex perturbations of 2-periodic Jacobi matrices.

Background reconstruction from Borg data, Jost solutions, explicit
eigenvalue-free regions and independent numerical oracles.
"""

__version__ = "0.1.0"

from .background import (
    POLE,
    Background,
    BackgroundEval,
    BorgData,
    FundamentalPair,
    evaluate,
    floquet_w,
    fundamental_polys,
    green,
    hill_u,
    normal_form,
    reconstruct,
    weyl_solution,
    weyl_solution_hat,
)
from .errors import (
    ContourError,
    ConvergenceError,
    JacobiSpectraError,
    PoleProximityError,
    ValidationError,
)
from .jost import JostSolution, jost_value, solve_backsub, solve_series
from .perturbation import MomentSummary, Perturbation, kernel_A, kernel_A_tilde, moments
from .regions import (
    Rect,
    RegionParams,
    RegionReport,
    constants,
    criterion_first_moment_empty,
    criterion_zero_moment,
    omega_constant,
    scan,
)
from .suite import run_invariant_suite
from .verify import Circle, OracleResult, WindingResult, locate_zeros, truncated_eigs, winding

__all__ = [
    "POLE",
    "Background",
    "BackgroundEval",
    "BorgData",
    "Circle",
    "ContourError",
    "ConvergenceError",
    "FundamentalPair",
    "JacobiSpectraError",
    "JostSolution",
    "MomentSummary",
    "OracleResult",
    "Perturbation",
    "PoleProximityError",
    "Rect",
    "RegionParams",
    "RegionReport",
    "ValidationError",
    "WindingResult",
    "constants",
    "criterion_first_moment_empty",
    "criterion_zero_moment",
    "evaluate",
    "floquet_w",
    "fundamental_polys",
    "green",
    "hill_u",
    "jost_value",
    "kernel_A",
    "kernel_A_tilde",
    "locate_zeros",
    "moments",
    "normal_form",
    "omega_constant",
    "reconstruct",
    "run_invariant_suite",
    "scan",
    "solve_backsub",
    "solve_series",
    "truncated_eigs",
    "weyl_solution",
    "weyl_solution_hat",
    "winding",
]
