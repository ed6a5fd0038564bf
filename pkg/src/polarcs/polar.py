"""Polar interpolation of the complex-exponential manifold.

Each grid frequency ``w_p`` owns an arc covering ``[w_p - delta/2,
w_p + delta/2]``.  Over that arc an atom is approximated by

    d(w) ~ c + r*cos(phi)*u + r*sin(phi)*v,   phi = 2*theta*(w - w_p)/delta,

where ``r`` is the atom norm and ``theta`` the angle (in the real embedding of
C^N) between ``d(w_p)`` and ``d(w_p -/+ delta/2)``.  The interpolation is
exact at ``phi = -theta, 0, theta``.
"""
from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .errors import DegenerateArcError, DimensionMismatchError, EmptyFrequencySetError
from .frame import DftFrame, atom, wrap


@dataclass(frozen=True)
class PolarTriple:
    index: int
    center: float
    c_vec: np.ndarray
    u_vec: np.ndarray
    v_vec: np.ndarray
    r: float
    theta: float

    def interpolate(self, phi):
        """Point on the approximating circle at angle(s) ``phi``."""
        phi = np.asarray(phi, dtype=float)
        if phi.ndim == 0:
            return self.c_vec + self.r * (np.cos(phi) * self.u_vec + np.sin(phi) * self.v_vec)
        return (
            self.c_vec[:, None]
            + self.r * np.outer(self.u_vec, np.cos(phi))
            + self.r * np.outer(self.v_vec, np.sin(phi))
        )


@dataclass(frozen=True)
class PolarSolution:
    """Per-arc coefficients ``(alpha, beta, gamma)`` over the arc set ``arcs``."""

    arcs: np.ndarray
    centers: np.ndarray
    alpha: np.ndarray
    beta: np.ndarray
    gamma: np.ndarray
    r: float
    theta: float

    @property
    def J(self) -> int:
        return len(self.arcs)


def arc_geometry(frame: DftFrame, p: int = 0) -> tuple[float, float]:
    """Radius and half-angle ``(r, theta)`` of the arc centred on grid index ``p``."""
    w = p / frame.P
    d0 = atom(frame, w)
    dm = atom(frame, w - frame.delta / 2)
    r = float(np.linalg.norm(d0))
    cos_t = np.real(np.vdot(d0, dm)) / r**2
    theta = float(np.arccos(np.clip(cos_t, -1.0, 1.0)))
    if theta < 1e-9:
        raise DegenerateArcError(f"arc half-angle {theta:g} is degenerate")
    return r, theta


def _solve_cuv(dm, d0, dp, r, theta):
    # closed-form inverse of [[1, r cos, -r sin], [1, r, 0], [1, r cos, r sin]]
    rc, rs = r * np.cos(theta), r * np.sin(theta)
    v = (dp - dm) / (2.0 * rs)
    u = (d0 - 0.5 * (dm + dp)) / (r - rc)
    c = d0 - r * u
    return c, u, v


def polar_triple(frame: DftFrame, p: int) -> PolarTriple:
    """Interpolation vectors for the arc centred on grid index ``p``."""
    if not 0 <= p < frame.P:
        raise IndexError(f"grid index {p} outside [0, {frame.P})")
    r, theta = arc_geometry(frame, p)
    w = p / frame.P
    half = frame.delta / 2
    c, u, v = _solve_cuv(atom(frame, w - half), atom(frame, w), atom(frame, w + half), r, theta)
    return PolarTriple(int(p), w, c, u, v, r, theta)


def unique_arcs(omega) -> np.ndarray:
    """Drop duplicate grid indices, keeping first-seen order."""
    omega = np.asarray(omega, dtype=np.int64).ravel()
    _, first = np.unique(omega, return_index=True)
    return omega[np.sort(first)]


def assemble_cuv(frame: DftFrame, omega) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Stack the interpolation vectors of each arc in ``omega`` as ``N x J`` matrices."""
    omega = unique_arcs(omega)
    if omega.size == 0:
        raise EmptyFrequencySetError("arc set is empty")
    if omega.min() < 0 or omega.max() >= frame.P:
        raise IndexError("arc index outside the frame grid")
    r, theta = arc_geometry(frame)
    w = omega / frame.P
    half = frame.delta / 2
    return _solve_cuv(atom(frame, w - half), atom(frame, w), atom(frame, w + half), r, theta)


def synthesize(cuv, sol: PolarSolution) -> np.ndarray:
    """Signal ``C @ alpha + U @ beta + V @ gamma``."""
    C, U, V = cuv
    J = C.shape[1]
    if not (U.shape == V.shape == C.shape) or any(
        len(x) != J for x in (sol.alpha, sol.beta, sol.gamma)
    ):
        raise DimensionMismatchError("coefficient vectors do not match the arc matrices")
    return C @ sol.alpha + U @ sol.beta + V @ sol.gamma


def rescale(sol: PolarSolution, r: float | None = None) -> PolarSolution:
    """Push ``(beta_j, gamma_j)`` onto the circle of radius ``r*|alpha_j|``.

    Arcs with ``beta_j = gamma_j = 0`` are put at the arc midpoint.
    """
    r = sol.r if r is None else r
    mag = np.abs(sol.alpha)
    norm = np.sqrt(np.abs(sol.beta) ** 2 + np.abs(sol.gamma) ** 2)
    zero = norm == 0
    scale = np.where(zero, 0.0, r * mag / np.where(zero, 1.0, norm))
    beta = np.where(zero, r * sol.alpha, sol.beta * scale).astype(complex)
    gamma = np.where(zero, 0.0, sol.gamma * scale).astype(complex)
    return replace(sol, beta=beta, gamma=gamma)


def arc_offsets(sol: PolarSolution) -> np.ndarray:
    """Clamped arc angles ``phi_j`` recovered from phase-aligned coefficients."""
    ac = np.conj(sol.alpha)
    phi = np.arctan2(np.real(sol.gamma * ac), np.real(sol.beta * ac))
    return np.clip(phi, -sol.theta, sol.theta)


def recover_frequencies(sol: PolarSolution, frame: DftFrame) -> list[tuple[float, complex]]:
    """Map each active arc to ``(frequency, alpha)``, largest ``|alpha|`` first."""
    active = np.flatnonzero(np.abs(sol.alpha) > 0)
    phi = arc_offsets(sol)
    freqs = wrap(sol.centers + frame.delta / (2.0 * sol.theta) * phi)
    order = active[np.argsort(-np.abs(sol.alpha[active]), kind="stable")]
    return [(float(freqs[j]), complex(sol.alpha[j])) for j in order]
