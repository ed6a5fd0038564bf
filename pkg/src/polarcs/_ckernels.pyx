# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled inner loops for the cone solvers.

Mirrors :mod:`polarcs._pykernels` function for function.
"""
import numpy as np

from libc.math cimport sqrt, fabs


cdef inline double _sq(double v) noexcept nogil:
    return v * v


cdef void _project_one(double a, double b, double g, double r, double rc,
                       double rs, double* out) noexcept nogil:
    cdef double s = sqrt(b * b + g * g)
    cdef double tol, best, d, t, pa, pb, pg, nv, k, den
    cdef double ba = 0.0, bb = 0.0, bg = 0.0

    if s <= r * a and b >= rc * a:
        out[0] = a
        out[1] = b
        out[2] = g
        return

    tol = 1e-12 * (1.0 + fabs(a) + fabs(b) + fabs(g))
    best = a * a + b * b + g * g
    den = 1.0 + r * r

    # second-order cone only
    if s > 0.0:
        t = (a + r * s) / den
        if t > 0.0:
            pa = t
            pb = t * r * b / s
            pg = t * r * g / s
            if pb - rc * pa >= -tol:
                d = _sq(a - pa) + _sq(b - pb) + _sq(g - pg)
                if d < best:
                    best = d
                    ba = pa
                    bb = pb
                    bg = pg

    # half-space only
    nv = b - rc * a
    if nv < 0.0:
        k = nv / (1.0 + rc * rc)
        pa = a + k * rc
        pb = b - k
        pg = g
        if sqrt(pb * pb + pg * pg) <= r * pa + tol:
            d = _sq(a - pa) + _sq(b - pb) + _sq(g - pg)
            if d < best:
                best = d
                ba = pa
                bb = pb
                bg = pg

    # both active: the two edge rays
    t = (a + rc * b + rs * g) / den
    if t > 0.0:
        d = _sq(a - t) + _sq(b - t * rc) + _sq(g - t * rs)
        if d < best:
            best = d
            ba = t
            bb = t * rc
            bg = t * rs
    t = (a + rc * b - rs * g) / den
    if t > 0.0:
        d = _sq(a - t) + _sq(b - t * rc) + _sq(g + t * rs)
        if d < best:
            best = d
            ba = t
            bb = t * rc
            bg = -t * rs

    out[0] = ba
    out[1] = bb
    out[2] = bg


def project_polar_cone(const double[:, ::1] x, double r, double cos_t,
                       double sin_t):
    cdef Py_ssize_t j, n = x.shape[0]
    cdef double rc = r * cos_t
    cdef double rs = r * sin_t
    cdef double buf[3]
    res = np.empty((n, 3), dtype=np.float64)
    cdef double[:, ::1] out = res
    with nogil:
        for j in range(n):
            _project_one(x[j, 0], x[j, 1], x[j, 2], r, rc, rs, buf)
            out[j, 0] = buf[0]
            out[j, 1] = buf[1]
            out[j, 2] = buf[2]
    return res


def secular_multiplier(const double[::1] w2, const double[::1] s2,
                       double target2, int max_iter=100):
    cdef Py_ssize_t i, n = w2.shape[0]
    cdef double mu = 0.0, f, df, q, rho, target, step
    cdef int it

    f = 0.0
    for i in range(n):
        f += w2[i]
    if f <= target2:
        return 0.0
    if target2 <= 0.0:
        return float("inf")
    target = sqrt(target2)
    with nogil:
        for it in range(max_iter):
            f = 0.0
            df = 0.0
            for i in range(n):
                q = 1.0 / (1.0 + mu * s2[i])
                f += w2[i] * q * q
                df += w2[i] * s2[i] * q * q * q
            rho = sqrt(f)
            if fabs(rho - target) <= 1e-13 * target or df <= 0.0:
                break
            # Newton on 1/rho(mu) - 1/target
            step = (1.0 / target - 1.0 / rho) * rho * rho * rho / df
            mu = mu + step
            if mu < 0.0:
                mu = 0.0
            if fabs(step) <= 1e-15 * mu:
                break
    return mu


# -- iteration loops ----------------------------------------------------

from scipy.linalg.cython_blas cimport dgemv, ddot, dnrm2


cdef inline void _gemv(char trans, int m, int n, double alpha, double* A,
                       double* x, double beta, double* y) noexcept nogil:
    # A is C-contiguous (m x n); BLAS sees its transpose in column-major
    cdef int one = 1
    cdef char t = b'T' if trans == b'N' else b'N'
    dgemv(&t, &n, &m, &alpha, A, &n, x, &one, &beta, y, &one)


cdef inline double _dot(int n, double* a, double* b) noexcept nogil:
    cdef int one = 1
    return ddot(&n, a, &one, b, &one)


cdef inline double _nrm(int n, double* a) noexcept nogil:
    cdef int one = 1
    return dnrm2(&n, a, &one)


cdef void _project_all(double* v, double* out, Py_ssize_t J, double r,
                       double rc, double rs) noexcept nogil:
    cdef Py_ssize_t j
    for j in range(J):
        _project_one(v[3 * j], v[3 * j + 1], v[3 * j + 2], r, rc, rs, &out[3 * j])


def mfista_cone(const double[:, ::1] G, const double[::1] y, double lam,
                const double[::1] x0, double L, double r, double cos_t,
                double sin_t, int max_iter, double tol):
    cdef int m = G.shape[0], n = G.shape[1]
    cdef Py_ssize_t J = n // 3, i
    cdef double rc = r * cos_t, rs = r * sin_t
    cdef double shift = lam / L
    cdef double fx, fz, t = 1.0, t_new, beta, step, zz, asum
    cdef int it = 0
    cdef bint converged = False, plain = True

    x_arr = np.empty(n)
    cdef double[::1] x = x_arr
    cdef double[::1] z = np.empty(n)
    cdef double[::1] yk = np.empty(n)
    cdef double[::1] v = np.empty(n)
    cdef double[::1] rx = np.empty(m)
    cdef double[::1] rz = np.empty(m)
    cdef double[::1] ry = np.empty(m)
    cdef double* Gp = <double*> &G[0, 0]
    trace = [0.0] * (max_iter + 1)

    v[:] = x0
    _project_all(&v[0], &x[0], J, r, rc, rs)
    rx[:] = y
    _gemv(b'N', m, n, -1.0, Gp, &x[0], 1.0, &rx[0])
    asum = 0.0
    for i in range(J):
        asum += x[3 * i]
    fx = 0.5 * _dot(m, &rx[0], &rx[0]) + lam * asum
    trace[0] = fx
    yk[:] = x
    ry[:] = rx

    for it in range(1, max_iter + 1):
        with nogil:
            # v = yk + G^T ry / L - shift on the amplitude coordinates
            for i in range(n):
                v[i] = yk[i]
            _gemv(b'T', m, n, 1.0 / L, Gp, &ry[0], 1.0, &v[0])
            for i in range(J):
                v[3 * i] -= shift
            _project_all(&v[0], &z[0], J, r, rc, rs)
            step = 0.0
            zz = 0.0
            asum = 0.0
            for i in range(n):
                step += (z[i] - yk[i]) * (z[i] - yk[i])
                zz += z[i] * z[i]
            for i in range(J):
                asum += z[3 * i]
            for i in range(m):
                rz[i] = y[i]
            _gemv(b'N', m, n, -1.0, Gp, &z[0], 1.0, &rz[0])
            fz = 0.5 * _dot(m, &rz[0], &rz[0]) + lam * asum
            # a step from x itself is plain projected gradient: accept it even
            # when rounding hides the decrease
            if fz <= fx or plain:
                # gradient-based restart: drop momentum that points uphill
                beta = 0.0
                for i in range(n):
                    beta += (yk[i] - z[i]) * (z[i] - x[i])
                if beta > 0.0:
                    t = 1.0
                t_new = 0.5 * (1.0 + sqrt(1.0 + 4.0 * t * t))
                beta = (t - 1.0) / t_new
                for i in range(n):
                    yk[i] = z[i] + beta * (z[i] - x[i])
                    x[i] = z[i]
                for i in range(m):
                    ry[i] = rz[i] + beta * (rz[i] - rx[i])
                    rx[i] = rz[i]
                if fz < fx:
                    fx = fz
                t = t_new
                plain = beta == 0.0
            else:
                for i in range(n):
                    yk[i] = x[i]
                for i in range(m):
                    ry[i] = rx[i]
                t = 1.0
                plain = True
        trace[it] = fx
        if sqrt(step) <= tol * (sqrt(zz) if zz > 0 else 1e-300):
            converged = True
            break
    return x_arr, it, converged, trace[:it + 1]


cdef void _ball_project(double* x0, double* out, double* Vh, double* s,
                        double* b, double target2, int k, int n,
                        double* z0, double* w2, double* s2) noexcept nogil:
    # projection onto {x : ||G x - y|| <= eps}; Vh is (k x n) C-contiguous
    cdef int i, k_it
    cdef double mu, f = 0.0, df, q, rho, target, st, fac
    _gemv(b'N', k, n, 1.0, Vh, x0, 0.0, z0)
    for i in range(k):
        z0[i] = s[i] * z0[i] - b[i]          # w
        w2[i] = z0[i] * z0[i]
        s2[i] = s[i] * s[i]
        f += w2[i]
    for i in range(n):
        out[i] = x0[i]
    if f <= target2:
        return
    if target2 <= 0.0:
        for i in range(k):
            z0[i] = -z0[i] / s[i]
    else:
        target = sqrt(target2)
        mu = 0.0
        for k_it in range(100):
            f = 0.0
            df = 0.0
            for i in range(k):
                q = 1.0 / (1.0 + mu * s2[i])
                f += w2[i] * q * q
                df += w2[i] * s2[i] * q * q * q
            rho = sqrt(f)
            if fabs(rho - target) <= 1e-13 * target or df <= 0.0:
                break
            st = (1.0 / target - 1.0 / rho) * rho * rho * rho / df
            mu = mu + st
            if mu < 0.0:
                mu = 0.0
            if fabs(st) <= 1e-15 * mu:
                break
        for i in range(k):
            fac = mu * s[i] / (1.0 + mu * s2[i])
            z0[i] = -z0[i] * fac
    _gemv(b'T', k, n, 1.0, Vh, z0, 1.0, out)


def admm_cone_ball(const double[:, ::1] Vh, const double[::1] s,
                   const double[::1] b, double target2, const double[::1] x0,
                   const double[::1] u0, double rho, double r, double cos_t, double sin_t,
                   int max_iter, double abstol, double reltol):
    cdef int k = Vh.shape[0], n = Vh.shape[1]
    cdef Py_ssize_t J = n // 3, i
    cdef double rc = r * cos_t, rs = r * sin_t
    cdef double sqn = sqrt(<double> n)
    cdef double r_pri, r_dual, nx, nz, nu, d
    cdef int it = 0
    cdef bint converged = False

    x_arr = np.empty(n)
    z_arr = np.empty(n)
    cdef double[::1] x = x_arr
    cdef double[::1] z = z_arr
    cdef double[::1] zold = np.empty(n)
    u_arr = np.array(u0, dtype=np.float64)
    cdef double[::1] u = u_arr
    cdef double[::1] v = np.empty(n)
    cdef double[::1] z0 = np.empty(max(k, 1))
    cdef double[::1] w2 = np.empty(max(k, 1))
    cdef double[::1] s2 = np.empty(max(k, 1))
    cdef double* Vp = <double*> &Vh[0, 0]
    cdef double* sp = <double*> &s[0]
    cdef double* bp = <double*> &b[0]

    with nogil:
        for i in range(n):
            v[i] = x0[i] + u[i]
        _ball_project(&v[0], &z[0], Vp, sp, bp, target2, k, n, &z0[0], &w2[0], &s2[0])
        for it in range(1, max_iter + 1):
            for i in range(n):
                v[i] = z[i] - u[i]
            for i in range(J):
                v[3 * i] -= 1.0 / rho
            _project_all(&v[0], &x[0], J, r, rc, rs)
            for i in range(n):
                zold[i] = z[i]
                v[i] = x[i] + u[i]
            _ball_project(&v[0], &z[0], Vp, sp, bp, target2, k, n, &z0[0], &w2[0], &s2[0])
            r_pri = 0.0
            r_dual = 0.0
            for i in range(n):
                d = x[i] - z[i]
                u[i] += d
                r_pri += d * d
                r_dual += (z[i] - zold[i]) * (z[i] - zold[i])
            r_pri = sqrt(r_pri)
            r_dual = rho * sqrt(r_dual)
            nx = _nrm(n, &x[0])
            nz = _nrm(n, &z[0])
            nu = _nrm(n, &u[0])
            if (r_pri <= sqn * abstol + reltol * (nx if nx > nz else nz)
                    and r_dual <= sqn * abstol + reltol * rho * nu):
                converged = True
                break
            if it % 10 == 0:
                if r_pri > 10.0 * r_dual:
                    rho *= 2.0
                    for i in range(n):
                        u[i] *= 0.5
                elif r_dual > 10.0 * r_pri:
                    rho *= 0.5
                    for i in range(n):
                        u[i] *= 2.0
    return x_arr, z_arr, u_arr, rho, it, converged
