"""Facet monotones of the permutation simplex and the Bell-measurement game.

Vertices are the local cyclic permutations P_k lambda (k = alpha*d + beta).
Truncation drops the last coordinate. Facet k omits vertex d^2 - 1 - k.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import numerics, weyl
from .belldiag import EigenvalueVector, diagonalize
from .channels import adjoint, choi, is_weyl_covariant, require_unital
from .errors import DegenerateFacetError, UnsupportedChannelError, ValidationError
from .preorder import eigenvalue_vector, permuted_vertices

FACET_TOLERANCE = 1e-9


@dataclass(frozen=True)
class VertexSet:
    d: int
    vertices: np.ndarray
    truncated: np.ndarray
    rank: int


@dataclass(frozen=True)
class Facet:
    normal: np.ndarray
    offset: float
    orientation: int
    omitted: int

    def margin(self, x_trunc):
        return self.orientation * (float(self.normal @ x_trunc) - self.offset)


@dataclass(frozen=True)
class FacetSystem:
    d: int
    facets: tuple
    interior_point: np.ndarray
    degenerate: bool
    rank: int
    vertex_set: VertexSet


def _values(lam):
    if isinstance(lam, EigenvalueVector):
        return lam.d, lam.values
    lam = np.asarray(lam, dtype=np.float64).ravel()
    d = int(round(np.sqrt(lam.size)))
    return d, EigenvalueVector(d, lam).values


def vertex_set(lam):
    d, v = _values(lam)
    verts = permuted_vertices(v, d)
    diffs = verts[1:] - verts[0]
    r = numerics.rank(diffs) if np.any(diffs) else 0
    return VertexSet(d, verts, verts[:, :-1].copy(), r)


def facet_system(vs):
    d = vs.d
    n = d * d
    interior = np.full(n - 1, 1.0 / n)
    if vs.rank < n - 1:
        return FacetSystem(d, (), interior, True, vs.rank, vs)
    facets = []
    for k in range(n):
        omit = n - 1 - k
        rest = np.delete(vs.truncated, omit, axis=0)
        ns = numerics.null_space(rest[1:] - rest[0])
        if ns.shape[1] != 1:
            raise DegenerateFacetError(f"facet {k}: null space has dimension {ns.shape[1]}")
        f = ns[:, 0]
        l = float(f @ rest[0])
        side = float(f @ interior) - l
        facets.append(Facet(f, l, -1 if side > 0 else 1, omit))
    return FacetSystem(d, tuple(facets), interior, False, vs.rank, vs)


def check_monotones(fs, mu, tol=FACET_TOLERANCE):
    """(pass, margins): pass iff every oriented margin f.mu~ - l is <= tol."""
    if fs.degenerate:
        raise DegenerateFacetError(
            f"vertex set has rank {fs.rank} < {fs.d ** 2 - 1}; decide with the LP oracle (preorder.convertible)"
        )
    _, m = _values(mu)
    margins = np.array([f.margin(m[:-1]) for f in fs.facets])
    return bool(np.all(margins <= tol)), margins


# --- discrimination game -------------------------------------------------------


@dataclass(frozen=True)
class GameStateSet:
    """Witness states rho_k (one per facet k) built from the adjoint source."""

    d: int
    states: tuple
    Q: np.ndarray
    r: np.ndarray
    w: np.ndarray
    offsets: np.ndarray
    facet_system: FacetSystem
    source_success: np.ndarray
    frame: tuple
    source: object

    def expected_source_success(self):
        """(l + r/d^2)/w per facet, with l the oriented offset."""
        return (self.offsets + self.r / self.d**2) / self.w


def _bell_diag_state(q, d):
    return weyl.from_bell_frame(np.diag(q).astype(np.complex128), d)


def success(spec, rho, k):
    """<Phi_k| (I (x) N)(rho) |Phi_k>."""
    d = spec.d
    phi = weyl.bell_basis(d).vectors[k]
    I = np.eye(d)
    out = sum(np.kron(I, K) @ rho @ np.kron(I, K).conj().T for K in spec.kraus())
    return float(np.real(phi.conj() @ out @ phi))


def _adjoint_frame(source):
    """Eigenvalues of J^{N^dag} and the local unitaries that diagonalise it."""
    require_unital(source)
    dual = adjoint(source)
    if source.d != 2 or is_weyl_covariant(dual):
        I = np.eye(source.d, dtype=np.complex128)
        return eigenvalue_vector(dual), I, I
    diag = diagonalize(choi(dual))
    return diag.eigenvalues, diag.U1, diag.U2


def game_states(source):
    """Witness states from the facets of the adjoint channel's eigenvalue vector.

    State k carries Q_k = (F_k + r_k Lambda)/w_k on its Bell diagonal, with
    F_k the oriented facet normal padded by a zero. For qubit channels that
    are not Bell-diagonal the state is conjugated back into the channel's
    frame, using the frame that maps the k-th Choi outcome onto P_k lambda.
    """
    d = source.d
    n = d * d
    lam, U1, U2 = _adjoint_frame(source)
    fs = facet_system(vertex_set(lam))
    if fs.degenerate:
        raise DegenerateFacetError(f"vertex set has rank {fs.rank}; no witness states")
    Q, r, w, offsets, states = [], [], [], [], []
    for k, facet in enumerate(fs.facets):
        F = np.append(facet.orientation * facet.normal, 0.0)
        delta = max(0.1 * float(np.max(np.abs(facet.normal))), 1e-6)
        rk = n * (max(0.0, -float(F.min())) + delta)
        wk = float(F.sum()) + rk
        qk = (F + rk / n) / wk
        sigma = _bell_diag_state(qk, d)
        Wt = weyl.weyl_operator(k // d, k % d, d).T
        U1k = Wt @ U1 @ Wt.conj().T
        U = np.kron(U1k, U2)
        states.append(U.conj().T @ sigma @ U)
        Q.append(qk)
        r.append(rk)
        w.append(wk)
        offsets.append(facet.orientation * facet.offset)
    src = np.array([success(source, rho, k) for k, rho in enumerate(states)])
    return GameStateSet(d, tuple(states), np.array(Q), np.array(r), np.array(w), np.array(offsets), fs, src, (U1, U2), source)


def play_game(states, candidate, tol=FACET_TOLERANCE):
    """Main pairing: state k measured for outcome k. Verdict: source wins or ties everywhere."""
    if candidate.d != states.d:
        raise ValidationError(f"dimension mismatch: game d={states.d}, candidate d={candidate.d}")
    cand = np.array([success(candidate, rho, k) for k, rho in enumerate(states.states)])
    return cand, bool(np.all(states.source_success >= cand - tol))


def _require_weyl_frame(states):
    U1, U2 = states.frame
    if not (np.allclose(U1, np.eye(states.d)) and np.allclose(U2, np.eye(states.d))):
        raise UnsupportedChannelError("alternative strategies are tabulated for Bell-diagonal sources only")


def strategy_table(states):
    """T[alpha, k] = Tr(J^{N^dag}_alpha sigma_k) = <Phi_alpha|(I (x) N)(sigma_k)|Phi_alpha>."""
    _require_weyl_frame(states)
    n = states.d**2
    return np.array([[success(states.source, states.states[k], a) for k in range(n)] for a in range(n)])


def play_game_alternative(states, candidate, tol=FACET_TOLERANCE):
    """Complete pairing: every state measured for outcome 00.

    Facet k is passed when the candidate's outcome-00 success on sigma_k is
    at most the source's success at an outcome whose vertex lies on facet k.
    Returns (candidate successes, reference values, verdict).
    """
    _require_weyl_frame(states)
    if candidate.d != states.d:
        raise ValidationError(f"dimension mismatch: game d={states.d}, candidate d={candidate.d}")
    cand = np.array([success(candidate, rho, 0) for rho in states.states])
    ref = np.array(
        [success(states.source, rho, 0 if f.omitted != 0 else 1) for rho, f in zip(states.states, states.facet_system.facets)]
    )
    return cand, ref, bool(np.all(cand <= ref + tol))


def povm_defect(source, rho):
    """|sum_k <Phi_k|(I (x) N)(rho)|Phi_k> - 1|."""
    n = source.d**2
    return abs(sum(success(source, rho, k) for k in range(n)) - 1.0)
