"""Pure-Python versions of the compiled kernels in ``_kernels.pyx``.

Same signatures and return conventions. Row/column updates are vectorised
with numpy; the rotation and pivot loops stay in Python.
"""

import numpy as np


def jacobi_eigh(A_in, tol, max_sweeps):
    A = np.array(A_in, dtype=np.complex128, copy=True)
    n = A.shape[0]
    V = np.eye(n, dtype=np.complex128)
    scale = max(1.0, float(np.linalg.norm(A)))
    sweep = 0
    while sweep < max_sweeps:
        off = np.sqrt(2.0 * np.sum(np.abs(np.triu(A, 1)) ** 2))
        if off <= tol * scale:
            break
        sweep += 1
        for p in range(n - 1):
            for q in range(p + 1, n):
                b = abs(A[p, q])
                if b <= 1e-300:
                    continue
                e = A[p, q] / b
                dq = e.conjugate()
                theta = (A[q, q].real - A[p, p].real) / (2.0 * b)
                if theta >= 0:
                    t = 1.0 / (theta + np.sqrt(theta * theta + 1.0))
                else:
                    t = -1.0 / (-theta + np.sqrt(theta * theta + 1.0))
                c = 1.0 / np.sqrt(t * t + 1.0)
                s = t * c
                colp = A[:, p].copy()
                colq = A[:, q]
                A[:, p] = c * colp - s * dq * colq
                A[:, q] = s * colp + c * dq * colq
                vp = V[:, p].copy()
                vq = V[:, q]
                V[:, p] = c * vp - s * dq * vq
                V[:, q] = s * vp + c * dq * vq
                rowp = A[p, :].copy()
                rowq = A[q, :]
                A[p, :] = c * rowp - s * e * rowq
                A[q, :] = s * rowp + c * e * rowq
                A[p, q] = 0.0
                A[q, p] = 0.0
                A[p, p] = A[p, p].real
                A[q, q] = A[q, q].real
    return np.real(np.diag(A)).copy(), V, sweep


def jacobi_svd(A_in, tol, max_sweeps):
    G = np.array(A_in, dtype=np.float64, copy=True)
    n = G.shape[1]
    V = np.eye(n)
    sweep = 0
    while sweep < max_sweeps:
        sweep += 1
        rotated = False
        for p in range(n - 1):
            for q in range(p + 1, n):
                gp = G[:, p]
                gq = G[:, q]
                alpha = gp @ gp
                beta = gq @ gq
                gamma = gp @ gq
                if gamma == 0.0 or abs(gamma) <= tol * np.sqrt(alpha * beta):
                    continue
                rotated = True
                zeta = (beta - alpha) / (2.0 * gamma)
                if zeta >= 0:
                    t = 1.0 / (zeta + np.sqrt(1.0 + zeta * zeta))
                else:
                    t = -1.0 / (-zeta + np.sqrt(1.0 + zeta * zeta))
                c = 1.0 / np.sqrt(1.0 + t * t)
                s = c * t
                G[:, [p, q]] = np.column_stack((c * gp - s * gq, s * gp + c * gq))
                vp = V[:, p].copy()
                vq = V[:, q].copy()
                V[:, p] = c * vp - s * vq
                V[:, q] = s * vp + c * vq
        if not rotated:
            break
    return G, V, sweep


def simplex_pivots(T, basis, n_enter, eps, max_iter):
    m = T.shape[0] - 1
    it = 0
    while it < max_iter:
        neg = np.nonzero(T[m, :n_enter] < -eps)[0]
        if neg.size == 0:
            return 0
        col = int(neg[0])
        row = -1
        best = 0.0
        for i in range(m):
            if T[i, col] > eps:
                ratio = T[i, -1] / T[i, col]
                if row < 0 or ratio < best - 1e-14 or (abs(ratio - best) <= 1e-14 and basis[i] < basis[row]):
                    row = i
                    best = ratio
        if row < 0:
            return 1
        T[row] /= T[row, col]
        f = T[:, col].copy()
        f[row] = 0.0
        T -= np.outer(f, T[row])
        basis[row] = col
        it += 1
    return 2
