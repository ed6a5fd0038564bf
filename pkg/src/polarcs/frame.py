"""Redundant DFT frames, atom coherence and band exclusion.

Frequencies are normalized (cycles per sample) and live on the unit circle:
all differences are taken modulo 1.  Atom ``d(w)`` has entries
``exp(2j*pi*w*n) / sqrt(N)`` for ``n = 1..N``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .errors import InvalidDimensionError


@dataclass(frozen=True)
class DftFrame:
    """DFT frame of redundancy ``c`` for signals of length ``N``.

    The ``P = c*N`` grid frequencies are ``p / P`` for ``p = 0..P-1``.
    Instances are immutable; the dictionary matrix and band-exclusion offsets
    are computed lazily and cached.
    """

    N: int
    c: int
    _bands: dict = field(default_factory=dict, init=False, repr=False, compare=False)

    @property
    def P(self) -> int:
        return self.N * self.c

    @property
    def delta(self) -> float:
        return 1.0 / self.P

    @cached_property
    def grid(self) -> np.ndarray:
        return np.arange(self.P) / self.P

    @cached_property
    def samples(self) -> np.ndarray:
        return np.arange(1, self.N + 1)

    @cached_property
    def matrix(self) -> np.ndarray:
        """The ``N x P`` dictionary ``D`` (read-only)."""
        D = atom(self, self.grid)
        D.setflags(write=False)
        return D

    def bins(self, w):
        """Express normalized frequencies in bins (units of ``1/N``)."""
        return np.asarray(w) * self.N

    def band_offsets(self, eta: float) -> np.ndarray:
        """Grid offsets ``m`` (mod P) whose atom coherence exceeds ``eta``."""
        key = float(eta)
        if key not in self._bands:
            mu = coherence(self, 0.0, self.grid)
            offs = np.flatnonzero(mu > key)
            offs.setflags(write=False)
            self._bands[key] = offs
        return self._bands[key]


def build_frame(N: int, c: int) -> DftFrame:
    """Build a DFT frame with ``P = c*N`` atoms."""
    if int(N) != N or N < 2:
        raise InvalidDimensionError(f"N must be an integer >= 2, got {N!r}")
    if int(c) != c or c < 1:
        raise InvalidDimensionError(f"c must be an integer >= 1, got {c!r}")
    return DftFrame(int(N), int(c))


def atom(frame: DftFrame, w) -> np.ndarray:
    """Sampled complex exponential(s).

    A scalar ``w`` gives a length-``N`` vector; an array of frequencies gives
    an ``N x len(w)`` matrix with one atom per column.
    """
    w = np.asarray(w, dtype=np.float64)
    n = frame.samples
    if w.ndim == 0:
        return np.exp(2j * np.pi * w * n) / np.sqrt(frame.N)
    return np.exp(2j * np.pi * np.outer(n, w)) / np.sqrt(frame.N)


def wrap(w):
    """Reduce frequencies to ``[0, 1)``."""
    return np.mod(w, 1.0)


def circular_distance(a, b):
    """Distance between normalized frequencies on the unit circle."""
    d = np.abs(np.mod(np.asarray(a, dtype=float) - np.asarray(b, dtype=float), 1.0))
    return np.minimum(d, 1.0 - d)


def dirichlet_magnitude(N: int, delta):
    """``|sin(pi*N*delta) / (N*sin(pi*delta))|``, equal to 1 at ``delta = 0 mod 1``."""
    delta = np.mod(np.asarray(delta, dtype=np.float64), 1.0)
    den = N * np.sin(np.pi * delta)
    num = np.sin(np.pi * N * delta)
    small = np.abs(den) < 1e-300
    out = np.abs(num / np.where(small, 1.0, den))
    out = np.where(small, 1.0, out)
    # guard rounding near the self-coherence peak
    return np.minimum(out, 1.0)


def coherence(frame: DftFrame, w_i, w_k):
    """Coherence ``|<d(w_i), d(w_k)>|`` via the Dirichlet kernel."""
    out = dirichlet_magnitude(frame.N, np.subtract(w_i, w_k))
    return float(out) if np.ndim(out) == 0 else out


def band_mask(frame: DftFrame, S, eta: float) -> np.ndarray:
    """Boolean mask over the grid marking the ``eta``-coherence band of ``S``."""
    mask = np.zeros(frame.P, dtype=bool)
    S = np.asarray(list(S) if isinstance(S, (set, frozenset)) else S, dtype=np.int64)
    if S.size == 0:
        return mask
    offs = frame.band_offsets(eta)
    mask[np.mod(S[:, None] + offs[None, :], frame.P).ravel()] = True
    return mask


def coherence_band(frame: DftFrame, S, eta: float) -> np.ndarray:
    """Sorted grid indices ``i`` with ``coherence(i, k) > eta`` for some ``k`` in ``S``."""
    if not 0.0 <= eta < 1.0:
        raise ValueError(f"eta must lie in [0, 1), got {eta}")
    return np.flatnonzero(band_mask(frame, S, eta))
