"""Pure numpy evaluation of a sparse polynomial, its gradient and Hessian."""
from __future__ import annotations

import numpy as np


def _pow(pts: np.ndarray, e: np.ndarray) -> np.ndarray:
    # (N, 3) ** (T, 3) -> (N, T, 3); negative exponents are masked to zero
    safe = np.maximum(e, 0)
    out = pts[:, None, :] ** safe[None, :, :]
    return np.where(e[None, :, :] < 0, 0, out)


def eval_ghv(exps: np.ndarray, coefs: np.ndarray, pts: np.ndarray):
    """Same contract as the compiled kernel: exps (T, 3), pts (N, 3)."""
    exps = np.asarray(exps, dtype=np.int64)
    pts = np.asarray(pts, dtype=np.complex128)
    n = pts.shape[0]
    if exps.shape[0] == 0:
        return (np.zeros(n, complex), np.zeros((n, 3), complex), np.zeros((n, 3, 3), complex))
    p0 = _pow(pts, exps)
    val = (p0.prod(axis=2) * coefs).sum(axis=1)
    grad = np.empty((n, 3), dtype=np.complex128)
    hess = np.empty((n, 3, 3), dtype=np.complex128)
    for v in range(3):
        ev = exps.copy()
        ev[:, v] -= 1
        pv = p0.copy()
        pv[:, :, v] = _pow(pts, ev)[:, :, v]
        cv = coefs * exps[:, v]
        grad[:, v] = (pv.prod(axis=2) * cv).sum(axis=1)
        for w in range(v, 3):
            ew = ev.copy()
            ew[:, w] -= 1
            pw = pv.copy()
            pw[:, :, w] = _pow(pts, ew)[:, :, w]
            cw = cv * ev[:, w]
            h = (pw.prod(axis=2) * cw).sum(axis=1)
            hess[:, v, w] = h
            hess[:, w, v] = h
    return val, grad, hess
