"""Dense linear algebra and feasibility kernels for small matrices (n <= 64).

The inner loops live in a compiled extension (``_kernels``); if it is not
importable, or ``PRESERVABILITY_KERNELS=python`` is set, the numpy versions in
``_kernels_py`` are used instead. Both expose the same three functions.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field

import numpy as np

from . import _kernels_py
from .errors import ValidationError

DEFAULT_TOLERANCE = 1e-9
RANK_THRESHOLD = 1e-9
HERMITIAN_TOLERANCE = 1e-12

_EIG_TOL = 1e-15
_MAX_SWEEPS = 100


def _load_kernels():
    if os.environ.get("PRESERVABILITY_KERNELS", "").lower() == "python":
        return _kernels_py, "python"
    try:
        from . import _kernels
    except ImportError:
        return _kernels_py, "python"
    return _kernels, "compiled"


kernels, BACKEND = _load_kernels()


def use_backend(name):
    """Switch kernel backend at runtime ("compiled" or "python"). Returns the previous name."""
    global kernels, BACKEND
    previous = BACKEND
    if name == "python":
        kernels, BACKEND = _kernels_py, "python"
    elif name == "compiled":
        from . import _kernels

        kernels, BACKEND = _kernels, "compiled"
    else:
        raise ValueError(f"unknown backend {name!r}")
    return previous


def _as_square(A, what="matrix"):
    A = np.asarray(A)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValidationError(f"{what} must be square, got shape {A.shape}")
    return A


def hermitian_defect(A):
    A = np.asarray(A)
    return float(np.max(np.abs(A - A.conj().T))) if A.size else 0.0


def _fix_phases(V):
    # first non-negligible component of every column made real positive
    V = V.copy()
    for k in range(V.shape[1]):
        col = V[:, k]
        big = np.nonzero(np.abs(col) > 1e-10 * max(np.max(np.abs(col)), 1e-300))[0]
        if big.size:
            z = col[big[0]]
            V[:, k] = col * (abs(z) / z)
    return V


def hermitian_eig(A, hermitian_tol=HERMITIAN_TOLERANCE):
    """Eigendecomposition of a Hermitian matrix by cyclic Jacobi rotations.

    Returns ``(w, V)`` with ``w`` real and descending and ``V`` holding
    orthonormal eigenvectors as columns, so that ``A @ V ~= V * w``.
    """
    A = _as_square(A).astype(np.complex128)
    if A.shape[0] == 0:
        return np.zeros(0), np.zeros((0, 0), dtype=np.complex128)
    defect = hermitian_defect(A)
    bound = hermitian_tol * max(1.0, float(np.max(np.abs(A))))
    if defect > bound:
        raise ValidationError(f"matrix is not Hermitian: max|A - A^H| = {defect:.3e} > {bound:.1e}")
    A = 0.5 * (A + A.conj().T)
    w, V, _ = kernels.jacobi_eigh(np.ascontiguousarray(A), _EIG_TOL, _MAX_SWEEPS)
    order = np.argsort(-w, kind="stable")
    return w[order], _fix_phases(V[:, order])


def eigvalsh(A):
    return hermitian_eig(A)[0]


def _svd(A):
    """Thin SVD via one-sided Jacobi: A = U diag(s) V^T, s descending, U columns completed."""
    A = np.asarray(A, dtype=np.float64)
    m, n = A.shape
    transposed = m < n
    if transposed:
        A = A.T
        m, n = n, m
    G, V, _ = kernels.jacobi_svd(np.ascontiguousarray(A), 1e-15, _MAX_SWEEPS)
    s = np.sqrt(np.sum(G * G, axis=0))
    order = np.argsort(-s, kind="stable")
    s = s[order]
    G = G[:, order]
    V = V[:, order]
    U = np.zeros((m, n))
    tiny = 1e-300 if s.size == 0 else max(s[0], 1.0) * 1e-14
    for k in range(n):
        if s[k] > tiny:
            U[:, k] = G[:, k] / s[k]
    U = _complete_orthonormal(U, s > tiny)
    if transposed:
        return V, s, U
    return U, s, V


def _complete_orthonormal(U, keep):
    """Fill the columns of U not flagged in ``keep`` with an orthonormal completion."""
    m, n = U.shape
    basis = [U[:, k] for k in range(n) if keep[k]]
    fill = [k for k in range(n) if not keep[k]]
    candidates = iter(np.eye(m))
    for k in fill:
        while True:
            v = next(candidates).copy()
            for b in basis:
                v -= (b @ v) * b
            for b in basis:
                v -= (b @ v) * b
            norm = np.linalg.norm(v)
            if norm > 1e-8:
                v /= norm
                break
        U[:, k] = v
        basis.append(v)
    return U


def singular_values(A):
    return _svd(A)[1]


def real_svd(T):
    """SVD of a real square matrix with proper rotations on both sides.

    Returns ``(O1, s, O2)`` with ``T = O1 @ diag(s) @ O2.T`` and
    ``det(O1) = det(O2) = +1``. Reflections are absorbed into the sign of the
    last entry of ``s``, which may therefore be negative.
    """
    T = np.asarray(T)
    if T.ndim != 2 or T.shape[0] != T.shape[1]:
        raise ValidationError(f"real_svd expects a square matrix, got shape {T.shape}")
    if np.iscomplexobj(T):
        if np.max(np.abs(T.imag)) > 0:
            raise ValidationError("real_svd expects a real matrix")
        T = T.real
    U, s, V = _svd(T)
    s = s.copy()
    if np.linalg.det(U) < 0:
        U[:, -1] *= -1
        s[-1] *= -1
    if np.linalg.det(V) < 0:
        V[:, -1] *= -1
        s[-1] *= -1
    return U, s, V


def rank(A, threshold=RANK_THRESHOLD):
    A = np.atleast_2d(np.asarray(A, dtype=np.float64))
    if A.size == 0:
        return 0
    return int(np.sum(singular_values(A) > threshold))


def null_space(A, threshold=RANK_THRESHOLD):
    """Orthonormal basis (columns) of the right null space of a real matrix."""
    A = np.atleast_2d(np.asarray(A, dtype=np.float64))
    m, n = A.shape
    if m < n:
        A = np.vstack([A, np.zeros((n - m, n))])
    _, s, V = _svd(A)
    return V[:, s <= threshold]


def kron(*mats):
    out = np.ones((1, 1))
    for M in mats:
        out = np.kron(out, M)
    return out


# --- feasibility ---------------------------------------------------------


@dataclass(frozen=True)
class FeasibilityProblem:
    """Is ``target`` a convex combination of ``columns``?

    ``columns`` has shape (k, n): k candidate vectors of length n.
    """

    columns: np.ndarray
    target: np.ndarray
    tolerance: float = DEFAULT_TOLERANCE

    def __post_init__(self):
        cols = np.atleast_2d(np.asarray(self.columns, dtype=np.float64))
        target = np.asarray(self.target, dtype=np.float64).ravel()
        object.__setattr__(self, "columns", cols)
        object.__setattr__(self, "target", target)
        tol = float(self.tolerance)
        if tol < 0:
            raise ValidationError("tolerance must be nonnegative")
        if cols.shape[0] == 0:
            raise ValidationError("feasibility problem needs at least one column")
        if cols.shape[1] != target.size:
            raise ValidationError(f"column length {cols.shape[1]} != target length {target.size}")
        slack = max(tol, 1e-12)
        if np.any(np.abs(cols.sum(axis=1) - 1.0) > slack) or abs(target.sum() - 1.0) > slack:
            raise ValidationError("columns and target must each sum to 1")
        if cols.min() < -slack or target.min() < -slack:
            raise ValidationError("columns and target must be entrywise nonnegative")


@dataclass(frozen=True)
class FeasibilityResult:
    feasible: bool
    weights: np.ndarray
    residual: float
    method: str
    extra: dict = field(default_factory=dict)


def _barycentric(M, target):
    k = M.shape[1]
    aug = np.vstack([M, np.ones((1, k))])
    rhs = np.concatenate([target, [1.0]])
    U, s, V = _svd(aug)
    if np.sum(s > RANK_THRESHOLD) < k:
        return None
    return V @ ((U.T @ rhs) / s)


def linprog_standard(c, A_eq, b_eq, eps=1e-12, max_iter=10_000):
    """Minimise ``c @ x`` subject to ``A_eq @ x = b_eq``, ``x >= 0``.

    Two-phase dense simplex with Bland's rule. Returns ``(status, x, value)``
    where status is "optimal", "infeasible" or "unbounded".
    """
    A = np.array(A_eq, dtype=np.float64)
    b = np.array(b_eq, dtype=np.float64)
    c = np.asarray(c, dtype=np.float64)
    m, n = A.shape
    neg = b < 0
    A[neg] *= -1
    b[neg] *= -1

    T = np.zeros((m + 1, n + m + 1))
    T[:m, :n] = A
    T[:m, n : n + m] = np.eye(m)
    T[:m, -1] = b
    T[m, :n] = -A.sum(axis=0)
    T[m, -1] = -b.sum()
    basis = np.arange(n, n + m, dtype=np.int64)
    status = kernels.simplex_pivots(T, basis, n, eps, max_iter)
    if status == 2:
        raise RuntimeError("simplex iteration limit reached in phase 1")
    if -T[m, -1] > 1e-9 * max(1.0, float(b.sum())):
        return "infeasible", None, np.inf

    # drive artificials out of the basis; drop redundant rows
    keep = np.ones(m, dtype=bool)
    for i in range(m):
        if basis[i] >= n:
            cand = np.nonzero(np.abs(T[i, :n]) > 1e-9)[0]
            if cand.size == 0:
                keep[i] = False
                continue
            j = cand[0]
            T[i] /= T[i, j]
            f = T[:, j].copy()
            f[i] = 0.0
            T -= np.outer(f, T[i])
            basis[i] = j
    rows = np.nonzero(keep)[0]
    T2 = np.zeros((rows.size + 1, n + 1))
    T2[:-1, :n] = T[rows, :n]
    T2[:-1, -1] = T[rows, -1]
    basis2 = basis[rows].copy()
    cb = c[basis2]
    T2[-1, :n] = c - cb @ T2[:-1, :n]
    T2[-1, -1] = -(cb @ T2[:-1, -1])
    status = kernels.simplex_pivots(T2, basis2, n, eps, max_iter)
    if status == 1:
        return "unbounded", None, -np.inf
    if status == 2:
        raise RuntimeError("simplex iteration limit reached in phase 2")
    x = np.zeros(n)
    x[basis2] = T2[:-1, -1]
    return "optimal", x, float(c @ x)


def _min_linf_gap(M, target):
    """LP: minimise the l-infinity gap between a convex mixture of columns and target."""
    n, k = M.shape
    nv = k + 1 + 2 * n
    A = np.zeros((2 * n + 1, nv))
    A[:n, :k] = M
    A[:n, k] = -1.0
    A[:n, k + 1 : k + 1 + n] = np.eye(n)
    A[n : 2 * n, :k] = M
    A[n : 2 * n, k] = 1.0
    A[n : 2 * n, k + 1 + n :] = -np.eye(n)
    A[2 * n, :k] = 1.0
    b = np.concatenate([target, target, [1.0]])
    c = np.zeros(nv)
    c[k] = 1.0
    status, x, value = linprog_standard(c, A, b)
    if status != "optimal":
        raise RuntimeError(f"l-infinity gap LP returned {status}")
    return x[:k], max(value, 0.0)


def solve_feasibility(problem):
    """Decide whether ``problem.target`` lies in the convex hull of its columns.

    Independent columns are tried first with a direct barycentric solve;
    otherwise (or when that solve lands outside the hull) a phase-1 simplex
    minimises the l-infinity gap, whose optimum is reported as ``residual``.
    """
    M = problem.columns.T
    target = problem.target
    tol = problem.tolerance
    w = _barycentric(M, target)
    if w is not None and w.min() >= -tol:
        w = np.clip(w, 0.0, None)
        w /= w.sum()
        residual = float(np.max(np.abs(M @ w - target)))
        if residual <= tol:
            return FeasibilityResult(True, w, residual, "linear_solve")
    w, gap = _min_linf_gap(M, target)
    w = np.clip(w, 0.0, None)
    w /= w.sum()
    residual = float(np.max(np.abs(M @ w - target)))
    residual = max(min(residual, gap), 0.0) if residual <= tol else residual
    return FeasibilityResult(residual <= tol, w, residual, "simplex_lp", {"lp_gap": gap})


def lstsq(A, b, threshold=RANK_THRESHOLD):
    """Minimum-norm least-squares solution of ``A x = b`` via the Jacobi SVD."""
    A = np.atleast_2d(np.asarray(A, dtype=np.float64))
    b = np.asarray(b, dtype=np.float64)
    m, n = A.shape
    pad = max(0, n - m)
    Ap = np.vstack([A, np.zeros((pad, n))]) if pad else A
    bp = np.concatenate([b, np.zeros(pad)]) if pad else b
    U, s, V = _svd(Ap)
    inv = np.where(s > threshold, 1.0 / np.where(s > threshold, s, 1.0), 0.0)
    return V @ (inv * (U.T @ bp))
