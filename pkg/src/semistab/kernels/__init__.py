"""Numeric kernel dispatch.

The compiled extension is preferred when importable; the numpy reference
backend is the fallback.  Set SEMISTAB_NO_EXT=1 to force the fallback (used by
the parity tests and the benchmark).
"""

import os

import numpy as np

from . import _reference

if os.environ.get("SEMISTAB_NO_EXT"):
    _impl = _reference
    BACKEND = "reference"
else:
    try:
        from . import _speedups as _impl

        BACKEND = "compiled"
    except ImportError:
        _impl = _reference
        BACKEND = "reference"


def _c(a):
    return np.ascontiguousarray(a, dtype=np.complex128)


def _f(a):
    return np.ascontiguousarray(a, dtype=np.float64)


def scan_states(lam, dts, coeffs, cols, x0):
    """Piecewise-exact propagation, states at all piece boundaries.

    lam (N,), dts (P,), coeffs (P, m), cols (m, N), x0 (N,) -> (P+1, N).
    """
    coeffs = np.atleast_2d(_c(coeffs))
    cols = np.atleast_2d(_c(cols))
    return _impl.scan_states(_c(lam), _f(dts), coeffs, cols, _c(x0))


def scan_norms(lam, dts, coeffs, cols, x0):
    """Like scan_states but returns only the coordinate l2 norms, (P+1,)."""
    coeffs = np.atleast_2d(_c(coeffs))
    cols = np.atleast_2d(_c(cols))
    return _impl.scan_norms(_c(lam), _f(dts), coeffs, cols, _c(x0))


def decay_sup_grid(re_lam, abs_lam, beta, ts):
    """sup_n e^(t re_lam[n]) abs_lam[n]^(-beta) over a grid of times."""
    return _impl.decay_sup_grid(_f(re_lam), _f(abs_lam), float(beta), _f(ts))


__all__ = ["BACKEND", "scan_states", "scan_norms", "decay_sup_grid"]
