"""Signal-domain baseline: l1-synthesis recovery followed by MUSIC."""
from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from .cvx import SolverOptions, solve_bpdn
from .errors import InvalidDimensionError, ZeroSignalError
from .frame import DftFrame, circular_distance, wrap
from .pursuit import LineEstimate, dictionary_image

log = logging.getLogger(__name__)

# eigenvalues below this fraction of the largest count as an empty signal direction
RANK_TOL = 1e-10


@dataclass(frozen=True)
class MusicConfig:
    """MUSIC settings.

    ``subvector_length`` defaults to ``N // 2``; ``grid_refinement`` is the
    pseudospectrum oversampling relative to a frame grid of ``P`` points.
    """

    K: int
    subvector_length: int | None = None
    grid_refinement: int = 20

    def __post_init__(self):
        if self.K < 1:
            raise InvalidDimensionError("K must be at least 1")
        if self.grid_refinement < 1:
            raise InvalidDimensionError("grid_refinement must be positive")
        if self.subvector_length is not None and self.subvector_length <= self.K:
            raise InvalidDimensionError("subvector_length must exceed K")

    def window(self, N: int) -> int:
        L = N // 2 if self.subvector_length is None else self.subvector_length
        if not self.K < L <= N - 1:
            raise InvalidDimensionError(f"subvector length {L} outside [K+1, N-1]")
        return L


@dataclass
class MusicResult:
    frequencies: np.ndarray
    diagnostics: dict = field(default_factory=dict)


def l1_synthesis_recover(y, A, frame: DftFrame, eps: float, opts: SolverOptions | None = None):
    """Recover the time signal as ``D x`` with ``x`` the BPDN solution over ``A D``."""
    x = solve_bpdn(y, dictionary_image(A, frame), eps, opts)
    return frame.matrix @ x


def fb_covariance(f, L: int) -> np.ndarray:
    """Forward-backward averaged covariance of all length-``L`` windows of ``f``."""
    f = np.asarray(f, dtype=complex)
    X = np.lib.stride_tricks.sliding_window_view(f, L).T  # L x W
    Rf = X @ X.conj().T / X.shape[1]
    J = np.eye(L)[::-1]
    R = 0.5 * (Rf + J @ Rf.conj() @ J)
    return 0.5 * (R + R.conj().T)


def noise_subspace(f, L: int, K: int):
    """Noise eigenvectors (``L x (L-K)``) and the eigenvalues, descending."""
    vals, vecs = np.linalg.eigh(fb_covariance(f, L))
    order = np.argsort(vals)[::-1]
    return vecs[:, order[K:]], vals[order]


def pseudospectrum(En, n_points: int) -> np.ndarray:
    """``1 / ||En^H e(w)||^2`` on ``w = q / n_points`` with ``e(w)_l = exp(2j*pi*w*l)``."""
    # column k of the transform is sum_l conj(En[l, k]) exp(2j*pi*w*l)
    C = np.fft.ifft(En.conj(), n=n_points, axis=0) * n_points
    q = np.sum(np.abs(C) ** 2, axis=1)
    return 1.0 / np.maximum(q, 1e-300)


def _refine(logp, idx, n_points):
    """Quadratic fit through a log-pseudospectrum peak and its two neighbours."""
    lm, l0, lp = logp[(idx - 1) % n_points], logp[idx], logp[(idx + 1) % n_points]
    den = lm - 2.0 * l0 + lp
    shift = 0.5 * (lm - lp) / den if den < 0 else 0.0
    return float(wrap((idx + np.clip(shift, -0.5, 0.5)) / n_points))


def music_frequencies(f_hat, cfg: MusicConfig, P: int | None = None) -> MusicResult:
    """MUSIC line-spectrum estimate of ``cfg.K`` frequencies from a time signal.

    Parameters
    ----------
    f_hat : (N,) complex array
    cfg : MusicConfig
    P : int, optional
        Frame grid size; peaks are kept at least ``1/P`` apart and the
        pseudospectrum is evaluated on ``P * cfg.grid_refinement`` points.
        Defaults to ``N``.

    Returns
    -------
    MusicResult
        Frequencies sorted by peak height.  ``diagnostics`` has
        ``insufficient_peaks`` (fewer than K maxima were found) and
        ``spurious`` (indices of peaks beyond the numerical rank of the
        covariance).
    """
    f_hat = np.asarray(f_hat, dtype=complex)
    N = f_hat.size
    if not np.any(f_hat):
        raise ZeroSignalError("MUSIC needs a nonzero signal")
    L = cfg.window(N)
    P = N if P is None else int(P)
    n_points = P * cfg.grid_refinement
    En, vals = noise_subspace(f_hat, L, cfg.K)
    spec = pseudospectrum(En, n_points)
    logp = np.log(spec)

    is_peak = (logp > np.roll(logp, 1)) & (logp >= np.roll(logp, -1))
    cand = np.flatnonzero(is_peak)
    cand = cand[np.argsort(-logp[cand], kind="stable")]
    picked = []
    for idx in cand:
        w = idx / n_points
        if picked and np.min(circular_distance(w, np.asarray(picked) / n_points)) < 1.0 / P:
            continue
        picked.append(idx)
        if len(picked) == cfg.K:
            break

    freqs = np.array([_refine(logp, i, n_points) for i in picked])
    rank = int(np.sum(vals > RANK_TOL * vals[0]))
    diag = {
        "insufficient_peaks": len(picked) < cfg.K,
        "spurious": list(range(min(rank, len(picked)), len(picked))),
        "eigenvalues": vals,
        "peak_heights": spec[picked] if picked else np.zeros(0),
    }
    if diag["insufficient_peaks"]:
        log.warning("MUSIC found %d of %d requested peaks", len(picked), cfg.K)
    return MusicResult(freqs, diag)


def l1synth_music(y, A, frame: DftFrame, K: int, eps: float,
                  opts: SolverOptions | None = None, music: MusicConfig | None = None):
    """l1-synthesis recovery of the signal followed by MUSIC on the estimate."""
    f_hat = l1_synthesis_recover(y, A, frame, eps, opts)
    diag = {"converged": True}
    if not np.any(f_hat):
        diag.update(converged=False, reason="zero signal estimate")
        freqs = np.zeros(0)
    else:
        res = music_frequencies(f_hat, music or MusicConfig(K=K), P=frame.P)
        freqs = res.frequencies
        diag.update(res.diagnostics)
    resid = float(np.linalg.norm(np.asarray(y) - np.asarray(A) @ f_hat))
    return LineEstimate(freqs, np.zeros(freqs.size, complex), f_hat, resid, diag)
