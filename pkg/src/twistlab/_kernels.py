"""Hot numeric kernels with an optional numba path.

The one loop that dominates runtime is the truncated Fourier evaluation
of scalar theta functions: it sits under every matrix theta operation,
including the determinant grids scanned by the zero finder.  Both
implementations stay importable so the benchmark can compare them; the
active one is picked at import time.  Set TWISTLAB_JIT=0 to force the
pure numpy path even when numba is installed.
"""

import os

import numpy as np


def theta_eval_numpy(coeffs, ks, zs):
    """Evaluate L truncated Fourier series at the points zs.

    coeffs: (L, T) complex term coefficients
    ks:     (L, T) float wavenumbers
    zs:     (P,) complex points
    returns (L, P) with out[l, p] = sum_t coeffs[l, t] * exp(2 pi i ks[l, t] zs[p])
    """
    phase = np.exp(2j * np.pi * ks[:, :, None] * zs[None, None, :])
    return np.einsum("lt,ltp->lp", coeffs, phase)


_JIT_REQUESTED = os.environ.get("TWISTLAB_JIT", "1").lower() not in ("0", "false", "no")

theta_eval_numba = None
if _JIT_REQUESTED:
    try:
        from numba import njit

        @njit(cache=True)
        def _theta_eval_jit(coeffs, ks, zs):
            L, T = coeffs.shape
            P = zs.shape[0]
            out = np.zeros((L, P), dtype=np.complex128)
            for l in range(L):
                for p in range(P):
                    z = zs[p]
                    acc = 0.0 + 0.0j
                    for t in range(T):
                        acc += coeffs[l, t] * np.exp(2j * np.pi * ks[l, t] * z)
                    out[l, p] = acc
            return out

        theta_eval_numba = _theta_eval_jit
    except ImportError:
        theta_eval_numba = None

JIT_ENABLED = theta_eval_numba is not None


def theta_eval(coeffs, ks, zs):
    if JIT_ENABLED:
        return theta_eval_numba(coeffs, ks, zs)
    return theta_eval_numpy(coeffs, ks, zs)
