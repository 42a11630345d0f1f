"""Convertibility oracle between unital channels.

Channels are reduced to their Bell eigenvalue vectors; N -> M is decided by
asking whether mu is a convex mixture of local (cyclic) permutations of lambda.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import permutations

import numpy as np

from . import numerics, weyl
from .belldiag import EigenvalueVector, channel_eigenvalues, weyl_normal_form
from .channels import ChannelSpec, FreeSuperchannelSample, require_unital, weyl_convolve
from .errors import UnsupportedChannelError, ValidationError

FREE_SETS = ("local", "mixed_unitary")


@dataclass(frozen=True)
class ConversionVerdict:
    feasible: bool
    weights: dict
    residual: float
    method: str
    notes: str = ""
    extra: dict = field(default_factory=dict)

    def weight_table(self, d):
        """Weights as a d x d array indexed by the shift (alpha, beta)."""
        out = np.zeros((d, d))
        for (a, b), w in self.weights.items():
            out[a, b] = w
        return out


def eigenvalue_vector(spec):
    """Bell eigenvalue vector lambda of a unital channel (d=2) or Weyl-covariant channel (any d)."""
    require_unital(spec)
    try:
        return channel_eigenvalues(spec)
    except UnsupportedChannelError:
        raise UnsupportedChannelError(
            f"d={spec.d} channel is not Weyl-covariant; only Weyl-covariant channels are supported above d=2"
        ) from None


def permuted_vertices(lam, d):
    """Rows P_k lambda for the d^2 local cyclic shifts, k = alpha*d + beta."""
    lam = np.asarray(lam, dtype=np.float64)
    return lam[weyl.inverse_cyclic_set(d)]


def decide(lam, mu, d, tolerance=numerics.DEFAULT_TOLERANCE, free_set="local"):
    """Feasibility verdict on raw eigenvalue vectors."""
    lam = np.asarray(lam, dtype=np.float64)
    mu = np.asarray(mu, dtype=np.float64)
    if free_set == "local":
        cols = permuted_vertices(lam, d)
        labels = [(a, b) for a in range(d) for b in range(d)]
    elif free_set == "mixed_unitary":
        if d != 2:
            raise ValidationError("free_set 'mixed_unitary' is implemented for d=2 only")
        perms = list(permutations(range(4)))
        cols = np.array([lam[list(p)] for p in perms])
        labels = perms
    else:
        raise ValidationError(f"unknown free set {free_set!r}")
    res = numerics.solve_feasibility(numerics.FeasibilityProblem(cols, mu, tolerance))
    notes = ""
    if not res.feasible and res.residual <= 10 * tolerance:
        notes = "near-boundary: residual within 10x tolerance"
    weights = {lab: float(w) for lab, w in zip(labels, res.weights)} if res.feasible else {}
    return ConversionVerdict(res.feasible, weights, res.residual, res.method, notes, {"lambda": lam, "mu": mu})


def convertible(source, target, tolerance=numerics.DEFAULT_TOLERANCE, free_set="local"):
    """Can a free super-channel map ``source`` to ``target``?

    ``free_set="local"`` mixes the local cyclic permutations of lambda.
    ``free_set="mixed_unitary"`` (qubits) allows every permutation of the
    Bell indices, i.e. tests majorisation mu < lambda.
    """
    if source.d != target.d:
        raise ValidationError(f"dimension mismatch: {source.d} vs {target.d}")
    lam = eigenvalue_vector(source)
    mu = eigenvalue_vector(target)
    return decide(lam.values, mu.values, source.d, tolerance, free_set)


# --- closed forms for the qubit families ---------------------------------------


def _verdict(feasible, weights, residual, notes=""):
    w = {(k // 2, k % 2): float(x) for k, x in enumerate(weights)} if feasible else {}
    return ConversionVerdict(bool(feasible), w, float(residual), "closed_form", notes)


def _closed_form_residual(lam, mu, weights):
    return float(np.max(np.abs(np.asarray(weights) @ permuted_vertices(lam, 2) - mu)))


def closed_form_bound(source_family, source_param, target_family):
    """Largest target parameter reachable from the source (depol -> deph: None unless s=1)."""
    pair = (source_family, target_family)
    if pair in (("depolarizing", "depolarizing"), ("dephasing", "dephasing")):
        return float(source_param)
    if pair == ("dephasing", "depolarizing"):
        q = float(source_param)
        return q / (2.0 - q)
    if pair == ("depolarizing", "dephasing"):
        return 1.0 if source_param == 1.0 else None
    raise ValidationError(f"no closed form for {source_family} -> {target_family}")


def convertible_closed_form(source_family, source_param, target_family, target_param):
    """Verdict for qubit depolarising/dephasing pairs from the exact family inequalities."""
    s_fam, t_fam = source_family, target_family
    x, y = float(source_param), float(target_param)
    for v in (x, y):
        if not 0.0 <= v <= 1.0:
            raise ValidationError(f"family parameter {v} outside [0, 1]")
    lam = ChannelSpec.named(s_fam, x).weyl_table().ravel()
    mu = ChannelSpec.named(t_fam, y).weyl_table().ravel()

    if (s_fam, t_fam) == ("depolarizing", "depolarizing"):
        if y > x:
            return _verdict(False, None, y - x)
        r = y / x if x > 0 else 1.0
        w = [0.25 * (3 * r + 1)] + [0.25 * (1 - r)] * 3
    elif (s_fam, t_fam) == ("dephasing", "dephasing"):
        if y > x:
            return _verdict(False, None, y - x)
        r = y / x if x > 0 else 1.0
        w = [0.5 * (1 + r), 0.5 * (1 - r), 0.0, 0.0]
    elif (s_fam, t_fam) == ("dephasing", "depolarizing"):
        bound = x / (2.0 - x)
        if y > bound:
            return _verdict(False, None, y - bound)
        ratio = 2 * y / x if x > 0 else 0.0
        w = [0.25 * (y + 1 + ratio), 0.25 * (y + 1 - ratio), 0.25 * (1 - y), 0.25 * (1 - y)]
    elif (s_fam, t_fam) == ("depolarizing", "dephasing"):
        if x != 1.0:
            return _verdict(False, None, 1.0 - x, "requires s = 1")
        w = list(mu)
    else:
        raise ValidationError(f"no closed form for {s_fam} -> {t_fam}")
    return _verdict(True, w, _closed_form_residual(lam, mu, w))


# --- product-Bell matrices ------------------------------------------------------


def product_bell_matrix(U, V):
    """B[nm, kl] = |<Phi_kl| U (x) V |Phi_nm>|^2 for 2x2 unitaries."""
    U = np.asarray(U, dtype=np.complex128)
    V = np.asarray(V, dtype=np.complex128)
    for name, X in (("U", U), ("V", V)):
        if X.shape != (2, 2):
            raise ValidationError(f"{name} must be 2x2, got {X.shape}")
        dev = float(np.max(np.abs(X @ X.conj().T - np.eye(2))))
        if dev > 1e-10:
            raise ValidationError(f"{name} is not unitary (defect {dev:.3e})")
    B = weyl.bell_basis(2).vectors
    overlaps = B.conj() @ np.kron(U, V) @ B.T  # [kl, nm]
    return (np.abs(overlaps) ** 2).T


def local_permutation_decomposition(B):
    """Least-squares coefficients of B on the four local qubit permutations.

    Returns ``(coefficients, residual)`` with residual the max-abs reconstruction error.
    Permutation k acts as the matrix ``B_k[i, perm_k[i]] = 1``.
    """
    B = np.asarray(B, dtype=np.float64)
    basis = []
    for perm in weyl.local_permutation_set(2):
        basis.append(weyl.permutation_matrix(perm).T.ravel())
    A = np.array(basis).T
    c = numerics.lstsq(A, B.ravel())
    residual = float(np.max(np.abs(A @ c - B.ravel())))
    return c, residual


# --- certificates -----------------------------------------------------------------


def materialize(source, target, verdict):
    """Free super-channel realising a feasible local-permutation verdict.

    Weyl-encoded sources get a Weyl-mixture pre-processing and identity
    post-processing. Other qubit channels are routed through their Weyl
    normal forms: pre = U_N W_k U_M^dag, post = V_M^dag V_N.
    """
    if not verdict.feasible:
        raise ValidationError("cannot materialise an infeasible verdict")
    d = source.d
    table = verdict.weight_table(d)
    identity = ChannelSpec.named("identity", d=d)
    if source.weyl_table() is not None and target.weyl_table() is not None:
        return FreeSuperchannelSample(((1.0, ChannelSpec.from_weyl_probs(table), identity),))
    if d != 2:
        if source.weyl_table() is None or target.weyl_table() is None:
            src = ChannelSpec.from_weyl_probs(eigenvalue_vector(source).values.reshape(d, d))
            tgt = ChannelSpec.from_weyl_probs(eigenvalue_vector(target).values.reshape(d, d))
            return materialize(src, tgt, verdict)
    Un, Vn, _ = weyl_normal_form(source)
    Um, Vm, _ = weyl_normal_form(target)
    post = ChannelSpec.unitary(Vm.conj().T @ Vn)
    branches = []
    for (a, b), w in verdict.weights.items():
        if w <= 0:
            continue
        W = weyl.weyl_operator(a, b, 2)
        branches.append((w, ChannelSpec.unitary(Un @ W @ Um.conj().T), post))
    total = sum(w for w, _, _ in branches)
    return FreeSuperchannelSample(tuple((w / total, pre, po) for w, pre, po in branches))


def compose_weights(first, second, d):
    """Weights of the composed local-permutation mixture (cyclic convolution of tables)."""
    return weyl_convolve(first.weight_table(d), second.weight_table(d))


def as_eigenvalue_vector(values, d):
    return EigenvalueVector(d, values)
