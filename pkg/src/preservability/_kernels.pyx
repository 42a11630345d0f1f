# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled inner loops: complex Jacobi eigensolver, one-sided Jacobi SVD and
a Bland-rule simplex pivot loop.

Signatures mirror ``_kernels_py`` exactly; ``numerics`` picks one at import.
"""

import numpy as np
cimport numpy as cnp
from libc.math cimport sqrt, fabs, hypot

cnp.import_array()

ctypedef double complex cplx


cdef inline double cabs2(cplx z) nogil:
    return z.real * z.real + z.imag * z.imag


def jacobi_eigh(A_in, double tol, int max_sweeps):
    """Cyclic Jacobi on a Hermitian matrix. Returns (diag, V, sweeps)."""
    cdef cnp.ndarray[cplx, ndim=2] Aarr = np.array(A_in, dtype=np.complex128, order="C", copy=True)
    cdef Py_ssize_t n = Aarr.shape[0]
    cdef cnp.ndarray[cplx, ndim=2] Varr = np.eye(n, dtype=np.complex128)
    cdef cplx[:, ::1] A = Aarr
    cdef cplx[:, ::1] V = Varr
    cdef Py_ssize_t p, q, k
    cdef int sweep = 0
    cdef double off, scale, b, app, aqq, theta, t, c, s
    cdef cplx e, dq, dqc, akp, akq, apk, aqk

    scale = 0.0
    for p in range(n):
        for q in range(n):
            scale += cabs2(A[p, q])
    scale = sqrt(scale)
    if scale < 1.0:
        scale = 1.0

    while sweep < max_sweeps:
        off = 0.0
        for p in range(n):
            for q in range(p + 1, n):
                off += cabs2(A[p, q])
        off = sqrt(2.0 * off)
        if off <= tol * scale:
            break
        sweep += 1
        for p in range(n - 1):
            for q in range(p + 1, n):
                b = sqrt(cabs2(A[p, q]))
                if b <= 1e-300:
                    continue
                e = A[p, q] / b
                dq = e.conjugate()
                dqc = e
                app = A[p, p].real
                aqq = A[q, q].real
                theta = (aqq - app) / (2.0 * b)
                if theta >= 0:
                    t = 1.0 / (theta + sqrt(theta * theta + 1.0))
                else:
                    t = -1.0 / (-theta + sqrt(theta * theta + 1.0))
                c = 1.0 / sqrt(t * t + 1.0)
                s = t * c
                # columns: A <- A G, G = D P
                for k in range(n):
                    akp = A[k, p]
                    akq = A[k, q]
                    A[k, p] = c * akp - s * dq * akq
                    A[k, q] = s * akp + c * dq * akq
                    akp = V[k, p]
                    akq = V[k, q]
                    V[k, p] = c * akp - s * dq * akq
                    V[k, q] = s * akp + c * dq * akq
                # rows: A <- G^H A
                for k in range(n):
                    apk = A[p, k]
                    aqk = A[q, k]
                    A[p, k] = c * apk - s * dqc * aqk
                    A[q, k] = s * apk + c * dqc * aqk
                A[p, q] = 0.0
                A[q, p] = 0.0
                A[p, p] = A[p, p].real
                A[q, q] = A[q, q].real

    diag = np.empty(n, dtype=np.float64)
    for k in range(n):
        diag[k] = A[k, k].real
    return diag, Varr, sweep


def jacobi_svd(A_in, double tol, int max_sweeps):
    """One-sided (Hestenes) Jacobi. Returns (G, V, sweeps) with A V = G, G orthogonal columns."""
    cdef cnp.ndarray[double, ndim=2] Garr = np.array(A_in, dtype=np.float64, order="C", copy=True)
    cdef Py_ssize_t m = Garr.shape[0]
    cdef Py_ssize_t n = Garr.shape[1]
    cdef cnp.ndarray[double, ndim=2] Varr = np.eye(n, dtype=np.float64)
    cdef double[:, ::1] G = Garr
    cdef double[:, ::1] V = Varr
    cdef Py_ssize_t p, q, k
    cdef int sweep = 0
    cdef int rotated
    cdef double alpha, beta, gamma, zeta, t, c, s, gp, gq

    while sweep < max_sweeps:
        sweep += 1
        rotated = 0
        for p in range(n - 1):
            for q in range(p + 1, n):
                alpha = 0.0
                beta = 0.0
                gamma = 0.0
                for k in range(m):
                    alpha += G[k, p] * G[k, p]
                    beta += G[k, q] * G[k, q]
                    gamma += G[k, p] * G[k, q]
                if gamma == 0.0 or fabs(gamma) <= tol * sqrt(alpha * beta):
                    continue
                rotated = 1
                zeta = (beta - alpha) / (2.0 * gamma)
                if zeta >= 0:
                    t = 1.0 / (zeta + sqrt(1.0 + zeta * zeta))
                else:
                    t = -1.0 / (-zeta + sqrt(1.0 + zeta * zeta))
                c = 1.0 / sqrt(1.0 + t * t)
                s = c * t
                for k in range(m):
                    gp = G[k, p]
                    gq = G[k, q]
                    G[k, p] = c * gp - s * gq
                    G[k, q] = s * gp + c * gq
                for k in range(n):
                    gp = V[k, p]
                    gq = V[k, q]
                    V[k, p] = c * gp - s * gq
                    V[k, q] = s * gp + c * gq
        if not rotated:
            break
    return Garr, Varr, sweep


def simplex_pivots(cnp.ndarray[double, ndim=2] T, cnp.ndarray[long, ndim=1] basis,
                   Py_ssize_t n_enter, double eps, int max_iter):
    """Bland-rule pivots on tableau ``T`` in place.

    Rows 0..m-1 are constraints with rhs in the last column, row m holds reduced
    costs (last entry = -objective). Only columns < n_enter may enter.
    Returns 0 optimal, 1 unbounded, 2 iteration limit.
    """
    cdef double[:, ::1] Tv = T
    cdef long[::1] bv = basis
    cdef Py_ssize_t m = T.shape[0] - 1
    cdef Py_ssize_t ncol = T.shape[1]
    cdef Py_ssize_t rhs = ncol - 1
    cdef Py_ssize_t i, j, col, row
    cdef int it = 0
    cdef double ratio, best, piv, f

    while it < max_iter:
        col = -1
        for j in range(n_enter):
            if Tv[m, j] < -eps:
                col = j
                break
        if col < 0:
            return 0
        row = -1
        best = 0.0
        for i in range(m):
            if Tv[i, col] > eps:
                ratio = Tv[i, rhs] / Tv[i, col]
                if row < 0 or ratio < best - 1e-14 or (fabs(ratio - best) <= 1e-14 and bv[i] < bv[row]):
                    row = i
                    best = ratio
        if row < 0:
            return 1
        piv = Tv[row, col]
        for j in range(ncol):
            Tv[row, j] /= piv
        for i in range(m + 1):
            if i != row:
                f = Tv[i, col]
                if f != 0.0:
                    for j in range(ncol):
                        Tv[i, j] -= f * Tv[row, j]
        bv[row] = col
        it += 1
    return 2
