"""Matched frequency error and signal error."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import linear_sum_assignment

from .errors import DimensionMismatchError, EmptyInputError, ZeroSignalError
from .frame import circular_distance


@dataclass(frozen=True)
class MatchResult:
    """Optimal pairing of estimated and true frequencies.

    ``pairs`` holds ``(estimate_index, truth_index)`` rows.  Errors are
    circular distances scaled by ``n_samples`` (bins when ``n_samples = N``).
    """

    pairs: np.ndarray
    per_pair_errors: np.ndarray
    mean_error: float
    total_cost: float
    missed: int

    @property
    def assignment(self) -> dict:
        return {int(i): int(j) for i, j in self.pairs}


def hungarian_match(w_true, w_est, n_samples: int = 1) -> MatchResult:
    """Minimum-cost matching under circular distance.

    Unequal set sizes are handled as zero-cost padding: only
    ``min(len(w_true), len(w_est))`` pairs are formed and the rest are
    reported in ``missed``.
    """
    w_true = np.atleast_1d(np.asarray(w_true, dtype=float))
    w_est = np.atleast_1d(np.asarray(w_est, dtype=float))
    if w_true.size == 0 or w_est.size == 0:
        raise EmptyInputError("both frequency sets must be non-empty")
    cost = circular_distance(w_est[:, None], w_true[None, :]) * n_samples
    rows, cols = linear_sum_assignment(cost)
    err = cost[rows, cols]
    return MatchResult(
        pairs=np.column_stack([rows, cols]),
        per_pair_errors=err,
        mean_error=float(err.mean()),
        total_cost=float(err.sum()),
        missed=abs(w_true.size - w_est.size),
    )


def signal_error(f, f_hat) -> float:
    """Relative error ``||f - f_hat|| / ||f||``."""
    f = np.asarray(f)
    f_hat = np.asarray(f_hat)
    if f.shape != f_hat.shape:
        raise DimensionMismatchError("signals differ in length")
    nf = np.linalg.norm(f)
    if nf == 0:
        raise ZeroSignalError("reference signal is zero")
    return float(np.linalg.norm(f - f_hat) / nf)
