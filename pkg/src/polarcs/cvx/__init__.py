"""Solvers for the arc-constrained program and for basis pursuit denoising."""
from .bpdn import ResidualBall, soft_threshold, solve_bpdn
from .options import CONSTRAINED, PENALIZED, ConvergenceReport, SolverOptions
from .polar_program import ArcProgram, solve_polar

__all__ = [
    "ArcProgram",
    "CONSTRAINED",
    "ConvergenceReport",
    "PENALIZED",
    "ResidualBall",
    "SolverOptions",
    "soft_threshold",
    "solve_bpdn",
    "solve_polar",
]
