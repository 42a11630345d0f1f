"""Discrete Weyl operators, the generalised Bell basis and local cyclic shifts.

Indices are flattened row-major everywhere: (n, m) -> n*d + m.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import ValidationError


def _check_dim(d):
    if int(d) != d or d < 2:
        raise ValidationError(f"dimension must be an integer >= 2, got {d!r}")
    return int(d)


def omega(d):
    return np.exp(2j * np.pi / d)


@dataclass(frozen=True)
class WeylIndex:
    a: int
    b: int
    d: int

    def __post_init__(self):
        _check_dim(self.d)
        if not (0 <= self.a < self.d and 0 <= self.b < self.d):
            raise ValidationError(f"Weyl index ({self.a}, {self.b}) out of range for d={self.d}")

    @property
    def flat(self):
        return self.a * self.d + self.b

    @classmethod
    def from_flat(cls, k, d):
        return cls(k // d, k % d, d)


@lru_cache(maxsize=None)
def _weyl(a, b, d):
    W = np.zeros((d, d), dtype=np.complex128)
    w = omega(d)
    for c in range(d):
        W[(c + a) % d, c] = w ** ((b * c) % d)
    W.setflags(write=False)
    return W


def weyl_operator(idx, b=None, d=None):
    """W_ab = sum_c Omega^{bc} |c+a><c|.

    Accepts a ``WeylIndex`` or the triple ``(a, b, d)``; residues are reduced mod d.
    """
    if isinstance(idx, WeylIndex):
        a, b, d = idx.a, idx.b, idx.d
    else:
        if b is None or d is None:
            raise ValidationError("weyl_operator needs a WeylIndex or (a, b, d)")
        a = idx
        d = _check_dim(d)
    return _weyl(int(a) % d, int(b) % d, d).copy()


def weyl_compose(x, y):
    """W_x W_y = Omega^phase W_result; returns (phase, result)."""
    if x.d != y.d:
        raise ValidationError(f"dimension mismatch: {x.d} vs {y.d}")
    d = x.d
    return (x.b * y.a) % d, WeylIndex((x.a + y.a) % d, (x.b + y.b) % d, d)


def weyl_operators(d):
    """All d^2 Weyl operators in flat order."""
    d = _check_dim(d)
    return [_weyl(a, b, d).copy() for a in range(d) for b in range(d)]


@dataclass(frozen=True)
class BellBasis:
    d: int
    vectors: np.ndarray  # (d^2, d^2): row k is |Phi_k>

    @property
    def matrix(self):
        """Unitary whose columns are the Bell vectors."""
        return self.vectors.T


@lru_cache(maxsize=None)
def _bell(d):
    phi = np.zeros(d * d, dtype=np.complex128)
    phi[:: d + 1] = 1.0 / np.sqrt(d)
    vecs = np.array([np.kron(np.eye(d), _weyl(n, m, d)) @ phi for n in range(d) for m in range(d)])
    vecs.setflags(write=False)
    return vecs


def bell_basis(d):
    d = _check_dim(d)
    return BellBasis(d, _bell(d))


def max_entangled(d):
    return _bell(_check_dim(d))[0].copy()


def to_bell_frame(J, d):
    """Matrix elements <Phi_k| J |Phi_l>."""
    B = _bell(d)
    return B.conj() @ J @ B.T


def from_bell_frame(M, d):
    B = _bell(d)
    return B.T @ M @ B.conj()


def cyclic_permutation(alpha, beta, d):
    """Index map (n, m) -> (n+alpha, m+beta) mod d, as an array ``perm[i] = image of i``."""
    d = _check_dim(d)
    n, m = np.divmod(np.arange(d * d), d)
    return ((n + alpha) % d) * d + (m + beta) % d


def permutation_matrix(perm):
    """P with P[perm[i], i] = 1, so that (P v)[perm[i]] = v[i]."""
    perm = np.asarray(perm)
    P = np.zeros((perm.size, perm.size))
    P[perm, np.arange(perm.size)] = 1.0
    return P


def shift_matrix(d):
    """Generalised Pauli X: |c> -> |c+1 mod d>."""
    return np.roll(np.eye(d), 1, axis=0)


def local_permutation_set(d, mode="cyclic"):
    """The d^2 local cyclic permutations, listed with flat index alpha*d + beta.

    ``qubit_full`` is only defined for d=2, where it coincides with ``cyclic``.
    """
    d = _check_dim(d)
    if mode == "qubit_full":
        if d != 2:
            raise ValidationError("mode 'qubit_full' requires d=2")
    elif mode != "cyclic":
        raise ValidationError(f"unknown permutation mode {mode!r}")
    return [p.copy() for p in _cyclic_set(d)]


@lru_cache(maxsize=None)
def _cyclic_set(d):
    return tuple(cyclic_permutation(a, b, d) for a in range(d) for b in range(d))


@lru_cache(maxsize=None)
def inverse_cyclic_set(d):
    """Stacked inverses of the cyclic permutations: ``v[inv[k]]`` equals ``P_k v``."""
    out = np.array([np.argsort(p) for p in _cyclic_set(d)])
    out.setflags(write=False)
    return out


def product_weyl_overlaps(x, y):
    """Column-stochastic matrix M[kl, nm] = |<Phi_kl| W_x (x) W_y |Phi_nm>|^2."""
    if x.d != y.d:
        raise ValidationError(f"dimension mismatch: {x.d} vs {y.d}")
    d = x.d
    B = _bell(d)
    U = np.kron(_weyl(x.a, x.b, d), _weyl(y.a, y.b, d))
    return np.abs(B.conj() @ U @ B.T) ** 2
