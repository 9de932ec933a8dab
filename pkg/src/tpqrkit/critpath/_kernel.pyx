# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled evaluation of a sparse polynomial, its gradient and Hessian."""
import numpy as np
cimport numpy as cnp

cnp.import_array()


def eval_ghv(const long long[:, ::1] exps, const double complex[::1] coefs,
             const double complex[:, ::1] pts):
    """Value, gradient and Hessian of sum_k c_k x^a y^b z^c at every point.

    exps is (T, 3), pts is (N, 3).  Returns arrays of shape (N,), (N, 3),
    (N, 3, 3).
    """
    cdef Py_ssize_t n = pts.shape[0], nt = exps.shape[0]
    cdef Py_ssize_t i, k, v, w, dmax = 0
    for k in range(nt):
        for v in range(3):
            if exps[k, v] > dmax:
                dmax = exps[k, v]
    val_a = np.zeros(n, dtype=np.complex128)
    grad_a = np.zeros((n, 3), dtype=np.complex128)
    hess_a = np.zeros((n, 3, 3), dtype=np.complex128)
    pw_a = np.ones((3, dmax + 1), dtype=np.complex128)
    cdef double complex[::1] val = val_a
    cdef double complex[:, ::1] grad = grad_a
    cdef double complex[:, :, ::1] hess = hess_a
    cdef double complex[:, ::1] pw = pw_a
    cdef double complex c, m, g[3], f[3]
    cdef long long e[3]
    for i in range(n):
        for v in range(3):
            pw[v, 0] = 1.0
            for k in range(1, dmax + 1):
                pw[v, k] = pw[v, k - 1] * pts[i, v]
        for k in range(nt):
            c = coefs[k]
            for v in range(3):
                e[v] = exps[k, v]
            m = c * pw[0, e[0]] * pw[1, e[1]] * pw[2, e[2]]
            val[i] += m
            for v in range(3):
                # partial derivative without dividing by the coordinate
                if e[v] > 0:
                    f[v] = e[v] * pw[v, e[v] - 1]
                else:
                    f[v] = 0.0
            g[0] = c * f[0] * pw[1, e[1]] * pw[2, e[2]]
            g[1] = c * pw[0, e[0]] * f[1] * pw[2, e[2]]
            g[2] = c * pw[0, e[0]] * pw[1, e[1]] * f[2]
            for v in range(3):
                grad[i, v] += g[v]
            for v in range(3):
                if e[v] > 1:
                    m = e[v] * (e[v] - 1) * pw[v, e[v] - 2]
                    if v == 0:
                        hess[i, 0, 0] += c * m * pw[1, e[1]] * pw[2, e[2]]
                    elif v == 1:
                        hess[i, 1, 1] += c * pw[0, e[0]] * m * pw[2, e[2]]
                    else:
                        hess[i, 2, 2] += c * pw[0, e[0]] * pw[1, e[1]] * m
            if e[0] > 0 and e[1] > 0:
                m = c * f[0] * f[1] * pw[2, e[2]]
                hess[i, 0, 1] += m
                hess[i, 1, 0] += m
            if e[0] > 0 and e[2] > 0:
                m = c * f[0] * pw[1, e[1]] * f[2]
                hess[i, 0, 2] += m
                hess[i, 2, 0] += m
            if e[1] > 0 and e[2] > 0:
                m = c * pw[0, e[0]] * f[1] * f[2]
                hess[i, 1, 2] += m
                hess[i, 2, 1] += m
    return val_a, grad_a, hess_a
