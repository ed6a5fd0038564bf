"""Greedy and convex line-spectrum recovery: BOMP, CBP and BISP.

All three return a :class:`LineEstimate` whose amplitudes are in signal-model
units, i.e. ``signal = sum_k amplitudes[k] * exp(2j*pi*frequencies[k]*n)``.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field, replace

import numpy as np

from .cvx import CONSTRAINED, PENALIZED, SolverOptions, solve_polar
from .errors import ExhaustedDictionaryError, InfeasibleError, InvalidDimensionError
from .frame import DftFrame, atom, band_mask
from .polar import recover_frequencies, rescale

log = logging.getLogger(__name__)

TRIVIAL_RATIO = 1e-9


@dataclass(frozen=True)
class PursuitConfig:
    K: int
    eta: float = 0.25
    solver: SolverOptions = field(default_factory=lambda: SolverOptions(mode=CONSTRAINED))
    max_outer_iterations: int | None = None

    def __post_init__(self):
        if self.K < 1:
            raise InvalidDimensionError("K must be at least 1")
        if not 0.0 <= self.eta < 1.0:
            raise ValueError("eta must lie in [0, 1)")

    @property
    def outer_limit(self) -> int:
        if self.max_outer_iterations is not None:
            return self.max_outer_iterations
        return max(self.K, 10)


@dataclass
class LineEstimate:
    frequencies: np.ndarray
    amplitudes: np.ndarray
    signal: np.ndarray
    residual_norm: float
    diagnostics: dict = field(default_factory=dict)

    @property
    def converged(self) -> bool:
        return bool(self.diagnostics.get("converged", True))


def dictionary_image(A, frame: DftFrame) -> np.ndarray:
    """``Phi = A @ D``, the measured dictionary."""
    return np.asarray(A) @ frame.matrix


def correlation_select(v, Phi, S, frame: DftFrame, eta: float) -> int:
    """Index maximizing ``|<v, Phi_i>| / ||Phi_i||`` outside the ``eta``-band of ``S``.

    The columns of ``Phi = A D`` lose their unit norm under a random ``A``;
    normalizing keeps a noiseless one-atom proxy maximal at its own atom.
    Ties go to the lowest index.
    """
    norms = np.linalg.norm(Phi, axis=0)
    corr = np.abs(Phi.conj().T @ v) / np.where(norms > 0, norms, 1.0)
    mask = band_mask(frame, S, eta)
    if mask.all():
        raise ExhaustedDictionaryError("band exclusion left no admissible atom")
    corr[mask] = -np.inf
    return int(np.argmax(corr))


def _select(v, Phi, S, frame, eta, count):
    S = list(S)
    for _ in range(count):
        S.append(correlation_select(v, Phi, S, frame, eta))
    return S


def _finalize(y, A, frame: DftFrame, freqs, diagnostics) -> LineEstimate:
    """Least-squares amplitudes on atoms at ``freqs`` and the implied signal."""
    freqs = np.asarray(freqs, dtype=float)
    if freqs.size == 0:
        return LineEstimate(freqs, np.zeros(0, complex), np.zeros(frame.N, complex),
                            float(np.linalg.norm(y)), diagnostics)
    D = atom(frame, freqs)
    coef, *_ = np.linalg.lstsq(A @ D, y, rcond=None)
    signal = D @ coef
    res = float(np.linalg.norm(y - A @ signal))
    return LineEstimate(freqs, coef / np.sqrt(frame.N), signal, res, diagnostics)


def prune_estimates(estimates, frame: DftFrame, K: int, eta: float) -> np.ndarray:
    """Keep up to ``K`` frequencies, strongest first, pairwise outside each other's band."""
    kept, grid_idx = [], []
    offs = frame.band_offsets(eta)
    for w, _ in estimates:
        p = int(np.rint(w * frame.P)) % frame.P
        if grid_idx and np.any(np.isin(np.mod(np.asarray(grid_idx)[:, None] + offs, frame.P), p)):
            continue
        kept.append(w)
        grid_idx.append(p)
        if len(kept) == K:
            break
    return np.asarray(kept, dtype=float)


def _trivial(sol, y) -> bool:
    return np.abs(sol.alpha).max(initial=0.0) < TRIVIAL_RATIO * np.linalg.norm(y)


def solve_with_fallback(y, A, omega, frame: DftFrame, opts: SolverOptions):
    """Run the arc program, switching between the constrained and penalized
    forms when the first one is infeasible or returns an all-zero solution.

    A constrained solve that ends above its residual bound counts as
    infeasible only when the cones were also found unable to reach the bound
    (``report.min_residual``).  Otherwise the miss is an iteration shortfall
    and the iterate is kept, reported as not converged.

    Returns ``(solution, report)``; ``report.mode`` says which form was used.
    """
    order = (opts.mode, PENALIZED if opts.mode == CONSTRAINED else CONSTRAINED)
    first, error = None, None
    for mode in order:
        if mode == PENALIZED and opts.sigma is None and opts.epsilon <= 0:
            continue
        try:
            result = solve_polar(y, A, omega, frame, replace(opts, mode=mode))
        except InfeasibleError as exc:
            log.debug("%s form infeasible: %s", mode, exc)
            error = exc
            continue
        first = first or result
        bound = opts.epsilon + opts.feasibility_tol
        rep = result[1]
        unreachable = (mode == CONSTRAINED and rep.residual_norm > bound
                       and rep.min_residual is not None and rep.min_residual > bound)
        if unreachable:
            log.debug("constrained form missed its bound (residual %g)", rep.residual_norm)
        elif not _trivial(result[0], y):
            return result
    if first is None:
        raise error
    return first


def bomp(y, A, frame: DftFrame, cfg: PursuitConfig) -> LineEstimate:
    """Band-excluded orthogonal matching pursuit on the frame grid."""
    y = np.asarray(y, dtype=complex)
    if cfg.K > y.size:
        raise InvalidDimensionError("K exceeds the number of measurements")
    Phi = dictionary_image(A, frame)
    S, trace = [], [float(np.linalg.norm(y))]
    res = y
    for _ in range(cfg.K):
        S.append(correlation_select(res, Phi, S, frame, cfg.eta))
        coef, *_ = np.linalg.lstsq(Phi[:, S], y, rcond=None)
        res = y - Phi[:, S] @ coef
        trace.append(float(np.linalg.norm(res)))
    freqs = np.asarray(S) / frame.P
    signal = frame.matrix[:, S] @ coef
    return LineEstimate(
        frequencies=freqs,
        amplitudes=coef / np.sqrt(frame.N),
        signal=signal,
        residual_norm=float(np.linalg.norm(y - A @ signal)),
        diagnostics={"residual_trace": trace, "support": S, "converged": True},
    )


def cbp(y, A, frame: DftFrame, cfg: PursuitConfig) -> LineEstimate:
    """Continuous basis pursuit: the arc program over every grid arc."""
    y = np.asarray(y, dtype=complex)
    sol, report = solve_with_fallback(y, A, np.arange(frame.P), frame, cfg.solver)
    est = recover_frequencies(rescale(sol), frame)
    freqs = prune_estimates(est, frame, cfg.K, cfg.eta)
    diag = {"solver": report, "converged": report.converged, "mode": report.mode}
    return _finalize(y, A, frame, freqs, diag)


def expand_arcs(S, frame: DftFrame) -> np.ndarray:
    """``{s-1, s, s+1}`` for every ``s`` in ``S`` (mod P), deduplicated, sorted."""
    S = np.asarray(S, dtype=np.int64)
    return np.unique(np.mod(S[:, None] + np.array([-1, 0, 1]), frame.P))


def bisp(y, A, frame: DftFrame, cfg: PursuitConfig) -> LineEstimate:
    """Band-excluded interpolating subspace pursuit.

    Subspace-pursuit support updates on the frame grid; each candidate
    support is refined off-grid by the arc program over the support and its
    grid neighbours.  Iterates while the residual strictly decreases and
    returns the iterate with the smallest residual.
    """
    y = np.asarray(y, dtype=complex)
    K = cfg.K
    if K > y.size:
        raise InvalidDimensionError("K exceeds the number of measurements")
    Phi = dictionary_image(A, frame)

    S = _select(y, Phi, [], frame, cfg.eta, K)
    best = _finalize(y, A, frame, np.asarray(S) / frame.P, {})
    best.diagnostics.update(iteration=0, converged=True)
    trace = [best.residual_norm]
    reports = []
    prev = best.residual_norm
    y_r = y - A @ best.signal
    floor = 1e-12 * np.linalg.norm(y)

    for n in range(1, cfg.outer_limit + 1):
        if prev <= floor:
            break
        try:
            S_aug = _select(y_r, Phi, S, frame, cfg.eta, K)
        except ExhaustedDictionaryError:
            log.debug("band exclusion exhausted the dictionary at iteration %d", n)
            break
        a, *_ = np.linalg.lstsq(Phi[:, S_aug], y, rcond=None)
        keep = np.argsort(-np.abs(a), kind="stable")[:K]
        S = [S_aug[i] for i in sorted(keep)]
        sol, report = solve_with_fallback(y, A, expand_arcs(S, frame), frame, cfg.solver)
        reports.append(report)
        est = recover_frequencies(rescale(sol), frame)
        freqs = prune_estimates(est, frame, K, cfg.eta)
        it = _finalize(y, A, frame, freqs, {"iteration": n, "converged": report.converged,
                                            "mode": report.mode})
        trace.append(it.residual_norm)
        y_r = y - A @ it.signal
        if it.residual_norm < best.residual_norm:
            best = it
        if it.residual_norm >= prev:
            break
        prev = it.residual_norm

    best.diagnostics["residual_trace"] = trace
    best.diagnostics["solver_reports"] = reports
    return best
