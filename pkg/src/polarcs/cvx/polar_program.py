"""Arc-constrained sparse recovery over a set of polar-interpolation arcs.

Each arc ``j`` contributes ``e^{i psi_j} (a_j c_j + b_j u_j + g_j v_j)`` with
real ``(a_j, b_j, g_j)`` in the arc cone

    sqrt(b^2 + g^2) <= r a,    r cos(theta) a <= b.

For a fixed set of phases ``psi`` the problem is convex in the real
coefficients and is solved by monotone FISTA (penalized form) or ADMM
(residual-constrained form).  In complex-amplitude mode the phases are then
refit in closed form, one arc at a time, and the two steps alternate.  Both
steps never increase the objective.  In real mode all phases stay at zero,
so only the convex step runs.
"""
from __future__ import annotations

import numpy as np

from .. import kernels
from ..errors import DimensionMismatchError, EmptyFrequencySetError, InfeasibleError
from ..frame import DftFrame
from ..polar import PolarSolution, arc_geometry, assemble_cuv, unique_arcs
from .options import CONSTRAINED, PENALIZED, ConvergenceReport, SolverOptions

_ENTRY_ANGLES = 9
_OUTER_TOL = 1e-7


class ArcProgram:
    """Data and helpers shared by both solver modes for one arc set."""

    def __init__(self, y, A, arcs, frame: DftFrame, opts: SolverOptions):
        self.y = np.asarray(y, dtype=complex).ravel()
        self.A = np.asarray(A)
        if self.A.ndim != 2 or self.A.shape[1] != frame.N:
            raise DimensionMismatchError(f"A must have {frame.N} columns")
        if self.A.shape[0] != self.y.size:
            raise DimensionMismatchError("A and y disagree on the number of measurements")
        self.frame = frame
        self.opts = opts
        self.arcs = unique_arcs(arcs)
        if self.arcs.size == 0:
            raise EmptyFrequencySetError("arc set is empty")
        self.J = self.arcs.size
        self.M = self.y.size
        self.r, self.theta = arc_geometry(frame)
        self.cos_t, self.sin_t = np.cos(self.theta), np.sin(self.theta)
        self.cuv = assemble_cuv(frame, self.arcs)
        # B[:, j, k] = A @ (c_j, u_j, v_j)[k]
        self.B = np.stack([self.A @ m for m in self.cuv], axis=2)
        self.Bflat = self.B.reshape(self.M, 3 * self.J)
        self.L = max(np.linalg.norm(self.Bflat, 2) ** 2, 1e-300)
        self.yr = np.concatenate([self.y.real, self.y.imag])
        self.complex_mode = opts.amplitudes == "complex"

    # -- phases ---------------------------------------------------------

    def real_matrix(self, psi):
        Gc = self.Bflat * np.repeat(np.exp(1j * psi), 3)[None, :]
        return np.vstack([Gc.real, Gc.imag])

    def contributions(self, x):
        """Per-arc signals ``A (a c + b u + g v)`` before phase rotation, ``M x J``."""
        return np.einsum("mjk,jk->mj", self.B, x.reshape(self.J, 3))

    def residual(self, x, psi):
        return self.y - self.contributions(x) @ np.exp(1j * psi)

    def entry_phases(self, res):
        """Phase that best aligns each arc with ``res`` (matched filter over the arc)."""
        proj = self.B.conj().transpose(1, 2, 0) @ res  # (J, 3)
        ang = np.linspace(-self.theta, self.theta, _ENTRY_ANGLES)
        corr = (
            proj[None, :, 0]
            + self.r * np.cos(ang)[:, None] * proj[None, :, 1]
            + self.r * np.sin(ang)[:, None] * proj[None, :, 2]
        )
        best = np.argmax(np.abs(corr), axis=0)
        return np.angle(corr[best, np.arange(self.J)])

    def initial_phases(self):
        if not self.complex_mode:
            return np.zeros(self.J)
        return self.entry_phases(self.y)

    def update_phases(self, x, psi):
        """Exact block-coordinate refit of each active arc's phase."""
        psi = psi.copy()
        W = self.contributions(x)
        a = x[0::3]
        res = self.y - W @ np.exp(1j * psi)
        active = np.flatnonzero(a > self.opts.tau * max(a.max(initial=0.0), 1e-300))
        for j in active:
            w = W[:, j]
            rj = res + np.exp(1j * psi[j]) * w
            psi[j] = np.angle(np.vdot(w, rj))
            res = rj - np.exp(1j * psi[j]) * w
        idle = np.ones(self.J, dtype=bool)
        idle[active] = False
        if idle.any():
            psi[idle] = self.entry_phases(res)[idle]
        return psi, res

    # -- diagnostics ----------------------------------------------------

    def cone_violation(self, x):
        X = x.reshape(self.J, 3)
        a, b, g = X[:, 0], X[:, 1], X[:, 2]
        v1 = np.hypot(b, g) - self.r * a
        v2 = self.r * self.cos_t * a - b
        return float(max(v1.max(initial=0.0), v2.max(initial=0.0), 0.0))

    def solution(self, x, psi):
        X = x.reshape(self.J, 3)
        ph = np.exp(1j * psi)
        return PolarSolution(
            arcs=self.arcs,
            centers=self.arcs / self.frame.P,
            alpha=X[:, 0] * ph,
            beta=X[:, 1] * ph,
            gamma=X[:, 2] * ph,
            r=self.r,
            theta=self.theta,
        )

    # -- solvers --------------------------------------------------------

    def _round_cap(self, rounds):
        # spread the iteration budget so every phase round gets to run
        if not self.complex_mode:
            return self.opts.max_iterations
        return max(self.opts.max_iterations // max(rounds, 1), 1)

    def _mfista_rounds(self, lam, x, psi, max_rounds, tol=None):
        trace, total, converged = [], 0, False
        opts = self.opts
        tol = opts.tolerance if tol is None else tol
        per_round = self._round_cap(max_rounds)
        for _ in range(max_rounds):
            budget = min(opts.max_iterations - total, per_round)
            if budget <= 0:
                break
            G = self.real_matrix(psi)
            x, it, converged, tr = kernels.mfista_cone(
                G, self.yr, lam, x, self.L, self.r, self.cos_t, self.sin_t, budget, tol,
            )
            total += it
            trace.extend(tr)
            if not self.complex_mode:
                break
            before = tr[-1]
            psi, res = self.update_phases(x, psi)
            after = 0.5 * np.vdot(res, res).real + lam * x[0::3].sum()
            trace.append(after)
            if converged and before - after <= _OUTER_TOL * max(before, 1e-300):
                break
        return x, psi, total, converged, trace

    def solve_penalized(self, x0=None):
        sigma = self.opts.resolved_sigma(self.M)
        lam = sigma**2
        x = np.zeros(3 * self.J) if x0 is None else np.asarray(x0, dtype=float).ravel()
        psi = self.initial_phases()
        x, psi, total, converged, trace = self._mfista_rounds(
            lam, x, psi, self.opts.phase_rounds
        )
        res = self.residual(x, psi)
        rnorm = float(np.linalg.norm(res))
        viol = self.cone_violation(x)
        objective = 0.5 * rnorm**2 / lam + x[0::3].sum()
        report = ConvergenceReport(
            iterations=total,
            objective=float(objective),
            residual_norm=rnorm,
            max_constraint_violation=viol,
            converged=bool(converged and viol <= self.opts.feasibility_tol),
            mode=PENALIZED,
            trace=[t / lam for t in trace],
        )
        return x, psi, report

    def min_cone_residual(self, psi, x0=None):
        """Smallest residual reachable inside the arc cones (phases refit too)."""
        x = np.zeros(3 * self.J) if x0 is None else x0
        x, psi, _, converged, _ = self._mfista_rounds(0.0, x, psi, self.opts.phase_rounds, tol=1e-14)
        return float(np.linalg.norm(self.residual(x, psi))), x, psi, converged

    def solve_constrained(self, x0=None):
        opts = self.opts
        eps = opts.epsilon
        tol = opts.feasibility_tol
        coef, *_ = np.linalg.lstsq(self.Bflat, self.y, rcond=None)
        span_res = float(np.linalg.norm(self.y - self.Bflat @ coef))
        if span_res > eps + tol:
            raise InfeasibleError(
                f"residual bound {eps:g} below the reachable minimum {span_res:g}",
                min_residual=span_res,
            )
        psi = self.initial_phases()
        x = np.zeros(3 * self.J) if x0 is None else np.asarray(x0, dtype=float).ravel()
        rmin = None
        if 3 * self.J <= 2 * self.M:
            rmin, x, psi, settled = self.min_cone_residual(psi, x)
            # an unsettled estimate is only an upper bound, not a certificate
            if settled and rmin > eps + tol:
                raise InfeasibleError(
                    f"residual bound {eps:g} below the reachable minimum {rmin:g}",
                    min_residual=rmin,
                )

        total, converged, trace = 0, False, []
        prev = np.inf
        scale = max(np.abs(x).max(initial=0.0), np.linalg.norm(self.y) / np.sqrt(self.L))
        rho = 1.0 / max(scale, 1e-300)
        u = np.zeros_like(x)
        per_round = self._round_cap(opts.phase_rounds)
        for _ in range(opts.phase_rounds if self.complex_mode else 1):
            budget = min(opts.max_iterations - total, per_round)
            if budget <= 0:
                break
            G = self.real_matrix(psi)
            U, s, Vh = np.linalg.svd(G, full_matrices=False)
            keep = s > 1e-12 * s[0]
            U, s, Vh = U[:, keep], s[keep], Vh[keep]
            b = U.T @ self.yr
            rperp = np.linalg.norm(self.yr - U @ b)
            target2 = eps**2 - rperp**2
            if target2 < 0:
                # the phases cannot reach the bound; keep the residual-minimizing fit
                target2 = 0.0
            # the scaled dual and penalty carry over; a phase update moves G only slightly
            x, z, u, rho, it, converged = kernels.admm_cone_ball(
                Vh, s, b, target2, x, u, rho, self.r, self.cos_t, self.sin_t,
                budget, 1e-3 * tol / np.sqrt(3 * self.J), opts.tolerance,
            )
            total += it
            l1 = float(x[0::3].sum())
            trace.append(l1)
            if not self.complex_mode:
                break
            psi, _ = self.update_phases(x, psi)
            if converged and abs(prev - l1) <= _OUTER_TOL * max(l1, 1e-300):
                break
            prev = l1

        rnorm = float(np.linalg.norm(self.residual(x, psi)))
        viol = max(self.cone_violation(x), rnorm - eps, 0.0)
        report = ConvergenceReport(
            iterations=total,
            objective=float(x[0::3].sum()),
            residual_norm=rnorm,
            max_constraint_violation=float(viol),
            converged=bool(converged and viol <= tol),
            mode=CONSTRAINED,
            trace=trace,
            min_residual=rmin,
        )
        return x, psi, report


def solve_polar(y, A, omega, frame: DftFrame, opts: SolverOptions | None = None, x0=None):
    """Solve the arc-constrained program over the arcs ``omega``.

    Parameters
    ----------
    y : (M,) complex array
        Measurements.
    A : (M, N) array
        Measurement matrix.
    omega : sequence of int
        Grid indices of the arc centres; duplicates are dropped.
    frame : DftFrame
    opts : SolverOptions, optional
    x0 : array, optional
        Initial real coefficients, arc-major ``(a, b, g)`` triples.

    Returns
    -------
    solution : PolarSolution
        Coefficients before radial rescaling.
    report : ConvergenceReport

    Raises
    ------
    InfeasibleError
        Constrained mode only, when no admissible coefficients reach the
        residual bound.
    """
    opts = opts or SolverOptions()
    prog = ArcProgram(y, A, omega, frame, opts)
    if opts.mode == PENALIZED:
        x, psi, report = prog.solve_penalized(x0)
    else:
        x, psi, report = prog.solve_constrained(x0)
    return prog.solution(x, psi), report
