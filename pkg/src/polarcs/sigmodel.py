"""Test signals, measurement operators and noise for the Monte Carlo trials.

Every function takes an explicit ``seed`` (an int, a ``SeedSequence`` or a
``numpy.random.Generator``); nothing touches global random state.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidDimensionError, PackingInfeasibleError
from .frame import circular_distance

NOISELESS_EPSILON = 1e-10
AMPLITUDE_MODES = ("unit-random-phase", "complex-gaussian")


@dataclass(frozen=True)
class GroundTruth:
    frequencies: np.ndarray
    amplitudes: np.ndarray
    signal: np.ndarray


@dataclass(frozen=True)
class MeasurementModel:
    A: np.ndarray
    y: np.ndarray
    noise: np.ndarray
    epsilon: float
    kind: str
    snr_db: float = np.inf

    @property
    def M(self) -> int:
        return self.A.shape[0]


def _rng(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def tone_signal(N: int, frequencies, amplitudes) -> np.ndarray:
    """``f_n = sum_k x_k exp(2j*pi*w_k*n)`` for ``n = 1..N``."""
    n = np.arange(1, N + 1)
    w = np.asarray(frequencies, dtype=float)
    return np.exp(2j * np.pi * np.outer(n, w)) @ np.asarray(amplitudes, dtype=complex)


def min_circular_gap(frequencies) -> float:
    w = np.asarray(frequencies, dtype=float)
    if w.size < 2:
        return np.inf
    d = circular_distance(w[:, None], w[None, :])
    return float(d[~np.eye(w.size, dtype=bool)].min())


def gen_signal(
    N: int,
    K: int,
    min_separation: float = 1.0,
    amplitude_mode: str = "unit-random-phase",
    seed=None,
    grid_size: int | None = None,
    max_tries: int = 100_000,
) -> GroundTruth:
    """Draw ``K`` tones with pairwise circular spacing of at least ``min_separation`` bins.

    With ``grid_size`` set, frequencies are drawn from ``{p / grid_size}``
    instead of the continuum.
    """
    if K < 1 or N < 2:
        raise InvalidDimensionError("need K >= 1 and N >= 2")
    if K * min_separation >= N:
        raise PackingInfeasibleError(f"{K} tones cannot be {min_separation} bins apart in {N} bins")
    if amplitude_mode not in AMPLITUDE_MODES:
        raise ValueError(f"unknown amplitude mode {amplitude_mode!r}")
    rng = _rng(seed)
    sep = min_separation / N
    for _ in range(max_tries):
        if grid_size is None:
            w = rng.uniform(0.0, 1.0, size=K)
        else:
            w = rng.integers(0, grid_size, size=K) / grid_size
        if min_circular_gap(w) >= sep - 1e-12:
            break
    else:
        raise PackingInfeasibleError(f"no admissible draw after {max_tries} tries")
    if amplitude_mode == "unit-random-phase":
        x = np.exp(2j * np.pi * rng.uniform(size=K))
    else:
        x = (rng.standard_normal(K) + 1j * rng.standard_normal(K)) / np.sqrt(2)
    return GroundTruth(w, x, tone_signal(N, w, x))


def gaussian_matrix(M: int, N: int, seed=None) -> np.ndarray:
    """``M x N`` matrix with i.i.d. ``N(0, 1/M)`` entries."""
    if not 1 <= M <= N:
        raise InvalidDimensionError(f"need 1 <= M <= N, got M={M}, N={N}")
    return _rng(seed).standard_normal((M, N)) / np.sqrt(M)


def subsample_matrix(M: int, N: int, seed=None) -> np.ndarray:
    """``M`` distinct rows of the ``N x N`` identity, in random order."""
    if not 1 <= M <= N:
        raise InvalidDimensionError(f"need 1 <= M <= N, got M={M}, N={N}")
    rows = _rng(seed).permutation(N)[:M]
    return np.eye(N)[rows]


def add_noise(y_clean, snr_db: float, seed=None) -> tuple[np.ndarray, float]:
    """Add complex white noise scaled to hit ``snr_db`` exactly.

    Returns ``(y, epsilon)`` with ``epsilon = ||z||``.  An infinite SNR gives
    noiseless data and the fixed tolerance ``NOISELESS_EPSILON``.
    """
    y_clean = np.asarray(y_clean, dtype=complex)
    if np.isinf(snr_db):
        return y_clean.copy(), NOISELESS_EPSILON
    rng = _rng(seed)
    z = rng.standard_normal(y_clean.shape) + 1j * rng.standard_normal(y_clean.shape)
    target = np.linalg.norm(y_clean) / 10.0 ** (snr_db / 20.0)
    z *= target / np.linalg.norm(z)
    return y_clean + z, float(np.linalg.norm(z))


def measure(truth: GroundTruth, M: int, kind: str = "gaussian", snr_db: float = np.inf, seed=None):
    """Build ``A``, apply it to ``truth.signal`` and add noise."""
    rng = _rng(seed)
    N = truth.signal.size
    if kind == "gaussian":
        A = gaussian_matrix(M, N, rng)
    elif kind == "subsample":
        A = subsample_matrix(M, N, rng)
    else:
        raise ValueError(f"unknown matrix kind {kind!r}")
    y_clean = A @ truth.signal
    y, eps = add_noise(y_clean, snr_db, rng)
    return MeasurementModel(A=A, y=y, noise=y - y_clean, epsilon=eps, kind=kind, snr_db=snr_db)
