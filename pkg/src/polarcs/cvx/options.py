from __future__ import annotations

from dataclasses import dataclass, field

PENALIZED = "penalized"
CONSTRAINED = "constrained"


@dataclass(frozen=True)
class SolverOptions:
    """Settings for the arc-constrained program and the BPDN solver.

    ``mode="penalized"`` minimizes ``||y - A f||^2 / (2 sigma^2) + ||alpha||_1``;
    ``mode="constrained"`` minimizes ``||alpha||_1`` subject to
    ``||y - A f|| <= epsilon``.  When ``sigma`` is None it defaults to
    ``epsilon / sqrt(M)``.

    ``amplitudes="complex"`` lets each arc carry a complex amplitude whose
    phase is shared by ``beta`` and ``gamma``; ``"real"`` restricts the
    coefficients to real values with ``alpha >= 0``.

    ``max_iterations`` bounds the inner iterations summed over all phase
    alternation rounds of one solve.
    """

    mode: str = PENALIZED
    sigma: float | None = None
    epsilon: float = 0.0
    max_iterations: int = 20000
    tolerance: float = 1e-8
    feasibility_tol: float = 1e-6
    tau: float = 1e-12
    amplitudes: str = "complex"
    phase_rounds: int = 30

    def __post_init__(self):
        if self.mode not in (PENALIZED, CONSTRAINED):
            raise ValueError(f"unknown mode {self.mode!r}")
        if self.amplitudes not in ("complex", "real"):
            raise ValueError(f"unknown amplitude mode {self.amplitudes!r}")
        if not 0 < self.tolerance < 1 or not 0 < self.feasibility_tol < 1:
            raise ValueError("tolerance and feasibility_tol must lie in (0, 1)")
        if self.sigma is not None and self.sigma <= 0:
            raise ValueError("sigma must be positive")
        if self.epsilon < 0:
            raise ValueError("epsilon must be non-negative")
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be positive")

    def resolved_sigma(self, M: int) -> float:
        if self.sigma is not None:
            return self.sigma
        if self.epsilon > 0:
            return self.epsilon / M**0.5
        raise ValueError("penalized mode needs sigma > 0 or epsilon > 0")


@dataclass
class ConvergenceReport:
    iterations: int
    objective: float
    residual_norm: float
    max_constraint_violation: float
    converged: bool
    mode: str = PENALIZED
    trace: list = field(default_factory=list, repr=False)
    # constrained mode: smallest residual the cones were found to reach, when estimated
    min_residual: float | None = None
