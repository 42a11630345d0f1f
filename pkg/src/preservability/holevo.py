"""Holevo capacity of covariant channels via minimum output entropy (natural log)."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize

from . import numerics
from .belldiag import SIGMA
from .channels import (
    FreeSuperchannelSample,
    apply_linear,
    apply_superchannel,
    is_weyl_covariant,
    require_unital,
    validate_state,
)
from .errors import UnsupportedChannelError, ValidationError

PSD_TOLERANCE = 1e-10
N_STARTS = 20
STEP_TOLERANCE = 1e-10


@dataclass(frozen=True)
class CapacityReport:
    chi: float
    min_output_entropy: float
    argmin_state: np.ndarray
    method: str


def _entropy_from_eigs(w):
    w = w[w > 0]
    return float(-np.sum(w * np.log(w)))


def von_neumann_entropy(rho):
    rho = validate_state(rho)
    w = numerics.eigvalsh(rho)
    if w.min() < -PSD_TOLERANCE:
        raise ValidationError(f"state is not positive semidefinite (min eigenvalue {w.min():.3e})")
    return _entropy_from_eigs(np.clip(w, 0.0, None))


def relative_entropy_to_max_mixed(rho):
    """D(rho || I/d) = ln d - S(rho), in nats."""
    d = np.asarray(rho).shape[0]
    return max(np.log(d) - von_neumann_entropy(rho), 0.0)


def binary_entropy(p):
    return _entropy_from_eigs(np.array([p, 1.0 - p]))


def bloch_matrix(spec):
    """M_ij = Tr[sigma_i N(sigma_j)] / 2 for a qubit channel."""
    return np.array([[0.5 * np.trace(SIGMA[i] @ apply_linear(spec, SIGMA[j])).real for j in range(3)] for i in range(3)])


def _qubit_capacity(spec):
    M = bloch_matrix(spec)
    _, s, V = numerics._svd(M)
    t = float(s[0])
    h = binary_entropy(0.5 * (1.0 + min(t, 1.0)))
    n = V[:, 0]
    rho = 0.5 * (np.eye(2) + sum(n[i] * SIGMA[i] for i in range(3)))
    w, vecs = numerics.hermitian_eig(rho)
    psi = vecs[:, 0]
    return CapacityReport(np.log(2) - h, h, np.outer(psi, psi.conj()), "qubit_closed_form")


def _adjoint_apply(spec, X):
    return sum(K.conj().T @ X @ K for K in spec.kraus())


def _log_herm(rho):
    w, V = np.linalg.eigh(rho)
    w = np.clip(w, 1e-300, None)
    return (V * np.log(w)) @ V.conj().T, w


def _search(spec, seed, n_starts):
    d = spec.d
    rng = np.random.default_rng(seed)

    def f(x):
        psi = x[:d] + 1j * x[d:]
        nrm = np.vdot(psi, psi).real
        out = apply_linear(spec, np.outer(psi, psi.conj()) / nrm)
        L, w = _log_herm(0.5 * (out + out.conj().T))
        S = -float(np.sum(w * np.log(w)))
        # dS/dpsi* = -(N^dag(log out) + S) psi / |psi|^2
        g = -(_adjoint_apply(spec, L) @ psi + S * psi) / nrm
        return S, np.concatenate([2 * g.real, 2 * g.imag])

    best = None
    for _ in range(n_starts):
        x0 = rng.normal(size=2 * d)
        res = minimize(f, x0, jac=True, method="L-BFGS-B", options={"ftol": 1e-14, "gtol": 1e-10, "maxiter": 500})
        if best is None or res.fun < best.fun:
            best = res
    psi = best.x[:d] + 1j * best.x[d:]
    psi /= np.linalg.norm(psi)
    return float(best.fun), np.outer(psi, psi.conj())


def holevo_capacity(spec, seed=0, n_starts=N_STARTS, method=None):
    """chi = ln d - min output entropy.

    Qubit unital channels use the Bloch-matrix closed form; other
    Weyl-covariant channels use a seeded multistart search over pure inputs.
    ``method="multistart_search"`` forces the search at d=2.
    """
    require_unital(spec)
    d = spec.d
    if d == 2 and method != "multistart_search":
        return _qubit_capacity(spec)
    if d > 2 and not is_weyl_covariant(spec):
        raise UnsupportedChannelError("capacity above d=2 needs a Weyl-covariant channel")
    smin, rho = _search(spec, seed, n_starts)
    smin = min(max(smin, 0.0), np.log(d))
    return CapacityReport(float(np.log(d) - smin), smin, rho, "multistart_search")


def capacity_monotonicity_trial(spec, sample, seed=0, tol=1e-9):
    """(chi before, chi after, holds) for one super-channel application."""
    if not isinstance(sample, FreeSuperchannelSample):
        raise ValidationError("sample must be a FreeSuperchannelSample")
    if spec.d > 2 and (spec.weyl_table() is None or not sample.is_weyl()):
        raise UnsupportedChannelError("above d=2 the trial needs a Weyl-mixture channel and Weyl-mixture branches")
    before = holevo_capacity(spec, seed=seed).chi
    after = holevo_capacity(apply_superchannel(sample, spec), seed=seed).chi
    return before, after, after <= before + tol
