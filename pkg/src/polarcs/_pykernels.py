"""NumPy implementations of the inner loops in :mod:`polarcs._ckernels`."""
import numpy as np


def project_polar_cone(x, r, cos_t, sin_t):
    """Euclidean projection of each row ``(a, b, g)`` onto the arc cone.

    The cone is ``{sqrt(b**2 + g**2) <= r*a, b >= r*cos_t*a}``, i.e. the conic
    hull of a circular arc of radius ``r`` and half-angle ``theta``.  The
    minimizer is found by checking every active-set candidate (interior,
    second-order cone face, half-space face, the two edge rays, apex) and
    keeping the closest feasible one.
    """
    x = np.asarray(x, dtype=np.float64)
    a, b, g = x[:, 0], x[:, 1], x[:, 2]
    rc, rs = r * cos_t, r * sin_t
    den = 1.0 + r * r
    s = np.hypot(b, g)
    tol = 1e-12 * (1.0 + np.abs(a) + np.abs(b) + np.abs(g))

    cands = [np.zeros_like(x)]

    with np.errstate(divide="ignore", invalid="ignore"):
        t = np.where(s > 0, (a + r * s) / den, 0.0)
        t = np.maximum(t, 0.0)
        ratio = np.where(s > 0, t * r / s, 0.0)
        soc = np.stack([t, ratio * b, ratio * g], axis=1)
    soc_ok = (t > 0) & (soc[:, 1] - rc * soc[:, 0] >= -tol)
    cands.append(np.where(soc_ok[:, None], soc, np.nan))

    nv = np.minimum(b - rc * a, 0.0)
    k = nv / (1.0 + rc * rc)
    half = np.stack([a + k * rc, b - k, g], axis=1)
    half_ok = np.hypot(half[:, 1], half[:, 2]) <= r * half[:, 0] + tol
    cands.append(np.where(half_ok[:, None], half, np.nan))

    for sign in (1.0, -1.0):
        t = np.maximum((a + rc * b + sign * rs * g) / den, 0.0)
        cands.append(np.stack([t, t * rc, sign * t * rs], axis=1))

    stack = np.stack(cands)
    dist = np.sum((stack - x[None]) ** 2, axis=2)
    dist = np.where(np.isnan(dist), np.inf, dist)
    best = stack[np.argmin(dist, axis=0), np.arange(x.shape[0])]

    inside = (s <= r * a) & (b >= rc * a)
    best[inside] = x[inside]
    return best


def secular_multiplier(w2, s2, target2, max_iter=100):
    """Root ``mu >= 0`` of ``sum(w2 / (1 + mu*s2)**2) = target2``.

    Newton iteration on ``1/rho(mu) - 1/sqrt(target2)``, which is concave in
    ``mu`` so the iterates increase monotonically from ``mu = 0``.
    """
    w2 = np.asarray(w2, dtype=np.float64)
    s2 = np.asarray(s2, dtype=np.float64)
    if w2.sum() <= target2:
        return 0.0
    if target2 <= 0.0:
        return float("inf")
    target = np.sqrt(target2)
    mu = 0.0
    for _ in range(max_iter):
        q = 1.0 / (1.0 + mu * s2)
        f = np.dot(w2, q * q)
        df = np.dot(w2 * s2, q * q * q)
        rho = np.sqrt(f)
        if abs(rho - target) <= 1e-13 * target or df <= 0.0:
            break
        step = (1.0 / target - 1.0 / rho) * rho**3 / df
        mu = max(mu + step, 0.0)
        if abs(step) <= 1e-15 * mu:
            break
    return float(mu)


def _ball_project(x0, Vh, s, b, target2):
    # projection onto {x : ||G x - y|| <= eps} in the SVD coordinates of G
    z0 = Vh @ x0
    w = s * z0 - b
    mu = secular_multiplier(np.abs(w) ** 2, s * s, target2)
    if mu == 0.0:
        return x0
    if np.isinf(mu):
        dz = -w / s
    else:
        dz = -w * (mu * s / (1.0 + mu * s * s))
    return x0 + Vh.conj().T @ dz


def mfista_cone(G, y, lam, x0, L, r, cos_t, sin_t, max_iter, tol):
    """Monotone FISTA for ``0.5*||y - G x||^2 + lam*sum(a)`` over the arc cones.

    ``x`` is laid out arc-major: ``x.reshape(-1, 3)`` gives ``(a, b, g)`` rows.
    Momentum is reset whenever the proximal step fails to decrease the
    objective or points against the last accepted step.  Stops once the gradient-mapping step ``||z - y_k||`` falls
    below ``tol * ||z||``.  Returns ``(x, iterations, converged, trace)``.
    """
    n = x0.size
    J = n // 3
    x = project_polar_cone(x0.reshape(J, 3), r, cos_t, sin_t).ravel()
    rx = y - G @ x
    fx = 0.5 * np.dot(rx, rx) + lam * x[0::3].sum()
    yk, ry = x.copy(), rx.copy()
    t = 1.0
    trace = [fx]
    shift = np.zeros(n)
    shift[0::3] = lam / L
    converged = False
    plain = True
    it = 0
    for it in range(1, max_iter + 1):
        v = yk + (G.T @ ry) / L - shift
        z = project_polar_cone(v.reshape(J, 3), r, cos_t, sin_t).ravel()
        d = z - yk
        step = np.sqrt(np.dot(d, d))
        rz = y - G @ z
        fz = 0.5 * np.dot(rz, rz) + lam * z[0::3].sum()
        # a step taken from x itself is plain projected gradient, a descent
        # step in exact arithmetic; accept it even when rounding hides the gain
        if fz <= fx or plain:
            # gradient-based restart: drop momentum that points uphill
            if np.dot(yk - z, z - x) > 0.0:
                t = 1.0
            t_new = 0.5 * (1.0 + np.sqrt(1.0 + 4.0 * t * t))
            beta = (t - 1.0) / t_new
            yk = z + beta * (z - x)
            ry = rz + beta * (rz - rx)
            x, rx, fx, t = z, rz, min(fz, fx), t_new
            plain = beta == 0.0
        else:
            yk, ry, t = x.copy(), rx.copy(), 1.0
            plain = True
        trace.append(fx)
        if step <= tol * max(np.sqrt(np.dot(z, z)), 1e-300):
            converged = True
            break
    return x, it, converged, trace


def admm_cone_ball(Vh, s, b, target2, x0, u0, rho, r, cos_t, sin_t, max_iter, abstol, reltol):
    """ADMM for ``min sum(a)`` over the arc cones intersected with a residual ball.

    The ball ``{x : ||G x - y|| <= eps}`` is given by the thin SVD of ``G``
    (``Vh``, ``s``), ``b = U^T y`` and ``target2 = eps**2 - ||y - U b||**2``.
    ``u0`` is the initial scaled dual, so a sequence of calls with slowly
    changing ``G`` can resume where the last one stopped.  Returns
    ``(x, z, u, rho, iterations, converged)``; ``x`` lies exactly in the
    cones and ``z`` exactly in the ball.
    """
    n = x0.size
    J = n // 3
    u = np.array(u0, dtype=np.float64)
    z = _ball_project(x0 + u, Vh, s, b, target2)
    e_a = np.zeros(n)
    e_a[0::3] = 1.0
    sqn = np.sqrt(n)
    converged = False
    x = z
    it = 0
    for it in range(1, max_iter + 1):
        x = project_polar_cone((z - u - e_a / rho).reshape(J, 3), r, cos_t, sin_t).ravel()
        z_old = z
        z = _ball_project(x + u, Vh, s, b, target2)
        u = u + x - z
        r_pri = np.linalg.norm(x - z)
        r_dual = rho * np.linalg.norm(z - z_old)
        eps_pri = sqn * abstol + reltol * max(np.linalg.norm(x), np.linalg.norm(z))
        eps_dual = sqn * abstol + reltol * rho * np.linalg.norm(u)
        if r_pri <= eps_pri and r_dual <= eps_dual:
            converged = True
            break
        if it % 10 == 0:
            if r_pri > 10.0 * r_dual:
                rho *= 2.0
                u = u / 2.0
            elif r_dual > 10.0 * r_pri:
                rho /= 2.0
                u = u * 2.0
    return x, z, u, rho, it, converged
