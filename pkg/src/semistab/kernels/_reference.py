"""Pure-numpy kernels.

These are the reference implementations; `semistab.kernels._speedups` is a
Cython twin with identical signatures and semantics.  Keep the two in sync --
the parity tests compare them element-wise.
"""

import numpy as np

_SMALL_Z = 1e-6


def _exp_phi(lam, dt):
    """Decay factor e^(lam*dt) and phi = (e^(lam*dt) - 1)/lam for one piece.

    phi is the exact integral of e^(lam*s) over [0, dt].  For |lam*dt| below
    a threshold the quotient is evaluated by series so that lam = 0 gives the
    exact limit dt.
    """
    z = lam * dt
    decay = np.exp(z)
    small = np.abs(z) < _SMALL_Z
    lam_safe = np.where(small, 1.0, lam)
    phi = (decay - 1.0) / lam_safe
    series = dt * (1.0 + z / 2.0 + z * z / 6.0)
    return decay, np.where(small, series, phi)


def scan_states(lam, dts, coeffs, cols, x0):
    """Propagate x' = lam*x + (coeffs[j] @ cols) piecewise-exactly.

    Parameters
    ----------
    lam : (N,) complex eigenvalues.
    dts : (P,) positive piece lengths.
    coeffs : (P, m) complex input values per piece.
    cols : (m, N) complex operator columns (row k is column k's coordinates).
    x0 : (N,) complex initial coordinates.

    Returns
    -------
    (P+1, N) complex states at piece boundaries, states[0] = x0.
    """
    P = dts.shape[0]
    N = lam.shape[0]
    states = np.empty((P + 1, N), dtype=np.complex128)
    states[0] = x0
    if P == 0:
        return states
    uniform = bool(np.all(dts == dts[0]))
    if uniform:
        decay, phi = _exp_phi(lam, dts[0])
    for j in range(P):
        if not uniform:
            decay, phi = _exp_phi(lam, dts[j])
        forcing = coeffs[j] @ cols
        states[j + 1] = decay * states[j] + phi * forcing
    return states


def scan_norms(lam, dts, coeffs, cols, x0):
    """Same recursion as scan_states but returns only the l2 norms at piece
    boundaries, shape (P+1,).  Memory stays O(N)."""
    P = dts.shape[0]
    norms = np.empty(P + 1, dtype=np.float64)
    x = np.array(x0, dtype=np.complex128, copy=True)
    norms[0] = np.linalg.norm(x)
    if P == 0:
        return norms
    uniform = bool(np.all(dts == dts[0]))
    if uniform:
        decay, phi = _exp_phi(lam, dts[0])
    for j in range(P):
        if not uniform:
            decay, phi = _exp_phi(lam, dts[j])
        x = decay * x + phi * (coeffs[j] @ cols)
        norms[j + 1] = np.linalg.norm(x)
    return norms


def decay_sup_grid(re_lam, abs_lam, beta, ts):
    """sup_n e^(t*re_lam[n]) * abs_lam[n]^(-beta) for each t in ts."""
    if beta != 0.0:
        w = abs_lam ** (-beta)
    else:
        w = np.ones_like(abs_lam)
    out = np.empty(ts.shape[0], dtype=np.float64)
    with np.errstate(under="ignore"):
        for i in range(ts.shape[0]):
            out[i] = np.max(np.exp(ts[i] * re_lam) * w)
    return out
