"""Kernel backend selection.

The compiled extension ``polarcs._ckernels`` is used when it was built;
otherwise the NumPy versions in ``polarcs._pykernels`` are used.  Setting the
environment variable ``POLARCS_PURE_PYTHON=1`` forces the fallback.
"""
import os

import numpy as np

from . import _pykernels

BACKEND = "python"
_impl = _pykernels

if os.environ.get("POLARCS_PURE_PYTHON", "") not in ("1", "true", "yes"):
    try:
        from . import _ckernels as _impl  # noqa: F811

        BACKEND = "cython"
    except ImportError:  # extension not built
        _impl = _pykernels


def project_polar_cone(x, r, cos_t, sin_t):
    return _impl.project_polar_cone(
        np.ascontiguousarray(x, dtype=np.float64), float(r), float(cos_t), float(sin_t)
    )


def secular_multiplier(w2, s2, target2):
    return _impl.secular_multiplier(
        np.ascontiguousarray(w2, dtype=np.float64),
        np.ascontiguousarray(s2, dtype=np.float64),
        float(target2),
    )


def mfista_cone(G, y, lam, x0, L, r, cos_t, sin_t, max_iter, tol):
    return _impl.mfista_cone(
        np.ascontiguousarray(G, dtype=np.float64),
        np.ascontiguousarray(y, dtype=np.float64),
        float(lam),
        np.ascontiguousarray(x0, dtype=np.float64),
        float(L), float(r), float(cos_t), float(sin_t), int(max_iter), float(tol),
    )


def admm_cone_ball(Vh, s, b, target2, x0, u0, rho, r, cos_t, sin_t, max_iter, abstol, reltol):
    return _impl.admm_cone_ball(
        np.ascontiguousarray(Vh, dtype=np.float64),
        np.ascontiguousarray(s, dtype=np.float64),
        np.ascontiguousarray(b, dtype=np.float64),
        float(target2),
        np.ascontiguousarray(x0, dtype=np.float64),
        np.ascontiguousarray(u0, dtype=np.float64),
        float(rho), float(r), float(cos_t), float(sin_t),
        int(max_iter), float(abstol), float(reltol),
    )
