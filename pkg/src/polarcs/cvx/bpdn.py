"""Basis pursuit denoising: ``min ||x||_1`` subject to ``||Phi x - y|| <= eps``."""
from __future__ import annotations

import numpy as np

from ..errors import InfeasibleError
from ..kernels import secular_multiplier
from .options import CONSTRAINED, ConvergenceReport, SolverOptions


class ResidualBall:
    """Euclidean projection onto ``{x : ||G x - y|| <= eps}`` (real or complex).

    Works in the thin-SVD coordinates of ``G``.  The Lagrange multiplier solves
    a scalar secular equation.
    """

    def __init__(self, G, y, eps, rcond=1e-12):
        U, s, Vh = np.linalg.svd(G, full_matrices=False)
        keep = s > rcond * s[0]
        self.U, self.s, self.Vh = U[:, keep], s[keep], Vh[keep]
        self.b = self.U.conj().T @ y
        self.min_residual = float(np.linalg.norm(y - self.U @ self.b))
        self.eps = float(eps)
        self.target2 = self.eps**2 - self.min_residual**2

    @property
    def empty(self) -> bool:
        return self.target2 < 0

    def __call__(self, x0):
        z0 = self.Vh @ x0
        w = self.s * z0 - self.b
        mu = secular_multiplier(np.abs(w) ** 2, self.s**2, max(self.target2, 0.0))
        if mu == 0.0:
            return x0
        if np.isinf(mu):
            dz = -w / self.s
        else:
            dz = -w * (mu * self.s / (1.0 + mu * self.s**2))
        return x0 + self.Vh.conj().T @ dz


def soft_threshold(x, t):
    """Complex soft thresholding, the prox of ``t * ||x||_1``."""
    mag = np.abs(x)
    return x * (np.maximum(mag - t, 0.0) / np.where(mag > 0, mag, 1.0))


def solve_bpdn(y, Phi, eps, opts: SolverOptions | None = None, full_output=False):
    """Minimize ``||x||_1`` subject to ``||Phi x - y||_2 <= eps`` by ADMM.

    Returns the ball-feasible iterate.  With ``full_output=True`` a
    :class:`ConvergenceReport` is returned alongside.

    Raises
    ------
    InfeasibleError
        If ``eps`` is below the least-squares residual of ``Phi``.
    """
    opts = opts or SolverOptions()
    if eps < 0:
        raise ValueError("eps must be non-negative")
    y = np.asarray(y, dtype=complex).ravel()
    Phi = np.asarray(Phi, dtype=complex)
    n = Phi.shape[1]
    ball = ResidualBall(Phi, y, eps)
    if ball.min_residual > eps + opts.feasibility_tol:
        raise InfeasibleError(
            f"eps={eps:g} below least-squares residual {ball.min_residual:g}",
            min_residual=ball.min_residual,
        )

    z = ball(np.zeros(n, dtype=complex))
    u = np.zeros(n, dtype=complex)
    scale = max(np.abs(z).max(initial=0.0), 1e-300)
    rho = 1.0 / scale
    abstol = 1e-3 * opts.feasibility_tol / np.sqrt(n)
    reltol = opts.tolerance
    sqn = np.sqrt(n)
    converged = False
    x = z
    it = 0
    for it in range(1, opts.max_iterations + 1):
        x = soft_threshold(z - u, 1.0 / rho)
        z_old = z
        z = ball(x + u)
        u += x - z
        r_pri = np.linalg.norm(x - z)
        r_dual = rho * np.linalg.norm(z - z_old)
        if (
            r_pri <= sqn * abstol + reltol * max(np.linalg.norm(x), np.linalg.norm(z))
            and r_dual <= sqn * abstol + reltol * rho * np.linalg.norm(u)
        ):
            converged = True
            break
        if it % 10 == 0:
            if r_pri > 10.0 * r_dual:
                rho *= 2.0
                u /= 2.0
            elif r_dual > 10.0 * r_pri:
                rho /= 2.0
                u *= 2.0

    if not np.any(y):
        z = np.zeros(n, dtype=complex)
    rnorm = float(np.linalg.norm(Phi @ z - y))
    viol = max(rnorm - eps, 0.0)
    if not full_output:
        return z
    report = ConvergenceReport(
        iterations=it,
        objective=float(np.abs(z).sum()),
        residual_norm=rnorm,
        max_constraint_violation=viol,
        converged=bool(converged and viol <= opts.feasibility_tol),
        mode=CONSTRAINED,
    )
    return z, report
