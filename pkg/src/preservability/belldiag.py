"""Bell-basis diagonalisation of qubit unital Choi states and the Weyl normal form.

Pauli vector convention: sigma_1 = X, sigma_2 = i|0><1| - i|1><0| (= -Y), sigma_3 = Z.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import numerics, weyl
from .channels import ChannelSpec, ChoiMatrix, apply_linear, bell_offdiag_defect, choi
from .errors import NonUnitalError, UnsupportedChannelError, ValidationError

SIGMA = (
    np.array([[0, 1], [1, 0]], dtype=np.complex128),
    np.array([[0, 1j], [-1j, 0]], dtype=np.complex128),
    np.array([[1, 0], [0, -1]], dtype=np.complex128),
)
_STD = (SIGMA[0], -SIGMA[1], SIGMA[2])  # X, Y, Z
_FLIP = np.diag([1.0, -1.0, 1.0])  # sigma frame <-> (x, y, z)

UNITAL_TOLERANCE = 1e-10


@dataclass(frozen=True)
class EigenvalueVector:
    d: int
    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=np.float64).ravel()
        if v.size != self.d**2:
            raise ValidationError(f"eigenvalue vector needs {self.d ** 2} entries, got {v.size}")
        if v.min() < -1e-10 or abs(v.sum() - 1.0) > 1e-10:
            raise ValidationError(f"not a probability vector (min {v.min():.3e}, sum {v.sum():.12g})")
        v = np.clip(v, 0.0, None)
        v = v / v.sum()
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    def truncated(self):
        return self.values[:-1]


@dataclass(frozen=True)
class PauliBlockDecomposition:
    beta: np.ndarray
    gamma: np.ndarray
    T: np.ndarray

    def matrix(self):
        I = np.eye(2)
        J = np.kron(I, I).astype(np.complex128)
        for i in range(3):
            J = J + self.beta[i] * np.kron(SIGMA[i], I) + self.gamma[i] * np.kron(I, SIGMA[i])
            for j in range(3):
                J = J + self.T[i, j] * np.kron(SIGMA[i], SIGMA[j])
        return J / 4


@dataclass(frozen=True)
class LocalDiagonalizer:
    U1: np.ndarray
    U2: np.ndarray
    eigenvalues: EigenvalueVector
    T_diag: np.ndarray
    offdiag_defect: float

    def conjugated(self, J):
        U = np.kron(self.U1, self.U2)
        return U @ J @ U.conj().T


def _choi_matrix(J):
    if isinstance(J, ChoiMatrix):
        if J.d != 2:
            raise ValidationError(f"qubit routine called with d={J.d}")
        return J.matrix
    J = np.asarray(J, dtype=np.complex128)
    if J.shape != (4, 4):
        raise ValidationError(f"qubit Choi matrix must be 4x4, got {J.shape}")
    return J


def pauli_blocks(J):
    J = _choi_matrix(J)
    I = np.eye(2)
    beta = np.array([np.trace(J @ np.kron(s, I)).real for s in SIGMA])
    gamma = np.array([np.trace(J @ np.kron(I, s)).real for s in SIGMA])
    T = np.array([[np.trace(J @ np.kron(a, b)).real for b in SIGMA] for a in SIGMA])
    return PauliBlockDecomposition(beta, gamma, T)


def rotation_to_unitary(O):
    """SU(2) element whose conjugation rotates sigma-frame Pauli vectors by ``O``.

    The two lifts differ by sign; the one whose first nonzero quaternion
    component is positive is returned.
    """
    O = np.asarray(O, dtype=np.float64)
    if O.shape != (3, 3):
        raise ValidationError(f"rotation must be 3x3, got shape {O.shape}")
    orth = float(np.max(np.abs(O @ O.T - np.eye(3))))
    if orth > 1e-9 or np.linalg.det(O) < 0:
        raise ValidationError(f"not a proper rotation (orthogonality defect {orth:.3e}, det {np.linalg.det(O):.3f})")
    R = _FLIP @ O @ _FLIP
    tr = np.trace(R)
    # Shepperd: pick the largest of w, x, y, z for a well-conditioned square root
    cand = np.array([tr, R[0, 0], R[1, 1], R[2, 2]])
    k = int(np.argmax(cand))
    if k == 0:
        w = 0.5 * np.sqrt(max(1.0 + tr, 0.0))
        x = (R[2, 1] - R[1, 2]) / (4 * w)
        y = (R[0, 2] - R[2, 0]) / (4 * w)
        z = (R[1, 0] - R[0, 1]) / (4 * w)
    elif k == 1:
        x = 0.5 * np.sqrt(max(1.0 + 2 * R[0, 0] - tr, 0.0))
        w = (R[2, 1] - R[1, 2]) / (4 * x)
        y = (R[0, 1] + R[1, 0]) / (4 * x)
        z = (R[0, 2] + R[2, 0]) / (4 * x)
    elif k == 2:
        y = 0.5 * np.sqrt(max(1.0 + 2 * R[1, 1] - tr, 0.0))
        w = (R[0, 2] - R[2, 0]) / (4 * y)
        x = (R[0, 1] + R[1, 0]) / (4 * y)
        z = (R[1, 2] + R[2, 1]) / (4 * y)
    else:
        z = 0.5 * np.sqrt(max(1.0 + 2 * R[2, 2] - tr, 0.0))
        w = (R[1, 0] - R[0, 1]) / (4 * z)
        x = (R[0, 2] + R[2, 0]) / (4 * z)
        y = (R[1, 2] + R[2, 1]) / (4 * z)
    q = np.array([w, x, y, z])
    q /= np.linalg.norm(q)
    lead = q[np.nonzero(np.abs(q) > 1e-12)[0][0]]
    if lead < 0:
        q = -q
    w, x, y, z = q
    return w * np.eye(2) - 1j * (x * _STD[0] + y * _STD[1] + z * _STD[2])


def unitary_to_rotation(U):
    """O with U (v . sigma) U^dag = (O v) . sigma in the sigma frame."""
    U = np.asarray(U)
    return np.array([[0.5 * np.trace(SIGMA[i] @ U @ SIGMA[j] @ U.conj().T).real for j in range(3)] for i in range(3)])


def diagonalize(J):
    """Local unitaries U1, U2 making (U1 x U2) J (U1 x U2)^dag Bell-diagonal.

    Eigenvalues are stored in the Bell order produced by the conjugation (not sorted).
    """
    J = _choi_matrix(J)
    blocks = pauli_blocks(J)
    defect = max(np.max(np.abs(blocks.beta)), np.max(np.abs(blocks.gamma)))
    if defect > 1e-9:
        raise NonUnitalError(f"Choi marginals not maximally mixed: max(|beta|, |gamma|) = {defect:.3e}")
    R1, s, R2 = numerics.real_svd(blocks.T)
    U1 = rotation_to_unitary(R1.T)
    U2 = rotation_to_unitary(R2.T)
    U = np.kron(U1, U2)
    Jt = U @ J @ U.conj().T
    M = weyl.to_bell_frame(Jt, 2)
    diag = np.real(np.diag(M))
    off = float(np.max(np.abs(M - np.diag(np.diag(M)))))
    return LocalDiagonalizer(U1, U2, EigenvalueVector(2, diag), s, off)


def _covariant_probs(spec, tol=1e-10):
    """Bell-diagonal entries in Bell order when the Choi matrix is already Bell-diagonal, else None."""
    table = spec.weyl_table()
    if table is not None:
        return table.ravel().copy()
    J = choi(spec).matrix
    if bell_offdiag_defect(J, spec.d) > tol:
        return None
    return EigenvalueVector(spec.d, np.real(np.diag(weyl.to_bell_frame(J, spec.d)))).values.copy()


def weyl_normal_form(spec):
    """(U, V, probs) with V N(U rho U^dag) V^dag = sum_k probs_k W_k rho W_k^dag."""
    if spec.d != 2:
        raise ValidationError("weyl_normal_form is defined for qubit channels only")
    defect = float(np.max(np.abs(apply_linear(spec, np.eye(2)) - np.eye(2))))
    if defect > UNITAL_TOLERANCE:
        raise NonUnitalError(f"channel is not unital: max|N(I) - I| = {defect:.3e}")
    probs = _covariant_probs(spec)
    if probs is not None:
        return np.eye(2, dtype=np.complex128), np.eye(2, dtype=np.complex128), probs
    diag = diagonalize(choi(spec))
    return diag.U1.T.copy(), diag.U2.copy(), diag.eigenvalues.values.copy()


def normal_form_residual(spec, U, V, probs):
    """Max deviation between V N(U X U^dag) V^dag and the Weyl mixture, over the matrix units."""
    Ws = weyl.weyl_operators(2)
    worst = 0.0
    for i in range(2):
        for j in range(2):
            X = np.zeros((2, 2), dtype=np.complex128)
            X[i, j] = 1.0
            lhs = V @ apply_linear(spec, U @ X @ U.conj().T) @ V.conj().T
            rhs = sum(p * W @ X @ W.conj().T for p, W in zip(probs, Ws))
            worst = max(worst, float(np.max(np.abs(lhs - rhs))))
    return worst


def weyl_covariant_eigenvalues(spec):
    """Bell-diagonal entries of a Weyl-covariant channel's Choi matrix, any d."""
    table = spec.weyl_table()
    if table is not None:
        return EigenvalueVector(spec.d, table.ravel())
    J = choi(spec).matrix
    return EigenvalueVector(spec.d, np.real(np.diag(weyl.to_bell_frame(J, spec.d))))


def channel_eigenvalues(spec):
    """Eigenvalue vector used by the preorder.

    Bell-diagonal Choi matrices are read in Bell order, so a Weyl-covariant
    channel gets the same vector whatever its encoding. Other qubit unital
    channels go through the diagonaliser, whose index order is a convention.
    """
    probs = _covariant_probs(spec)
    if probs is not None:
        return EigenvalueVector(spec.d, probs)
    if spec.d == 2:
        return diagonalize(choi(spec)).eigenvalues
    raise UnsupportedChannelError(f"d={spec.d} channel is not Weyl-covariant")

