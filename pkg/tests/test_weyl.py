import itertools

import numpy as np
import pytest

from preservability import weyl
from preservability.errors import ValidationError


def test_index_validation():
    assert weyl.WeylIndex(1, 2, 3).flat == 5
    assert weyl.WeylIndex.from_flat(5, 3) == weyl.WeylIndex(1, 2, 3)
    with pytest.raises(ValidationError):
        weyl.WeylIndex(3, 0, 3)
    with pytest.raises(ValidationError):
        weyl.weyl_operator(0, 0, 1)
    with pytest.raises(ValidationError):
        weyl.weyl_operator(0)


def test_qubit_weyl_are_paulis():
    X = np.array([[0, 1], [1, 0]])
    Z = np.diag([1, -1])
    assert np.allclose(weyl.weyl_operator(0, 0, 2), np.eye(2))
    assert np.allclose(weyl.weyl_operator(1, 0, 2), X)
    assert np.allclose(weyl.weyl_operator(0, 1, 2), Z)
    assert np.allclose(weyl.weyl_operator(1, 1, 2), X @ Z)


def test_weyl_operator_accepts_index_and_reduces_mod_d():
    assert np.array_equal(weyl.weyl_operator(weyl.WeylIndex(1, 2, 3)), weyl.weyl_operator(4, -1, 3))


def test_weyl_operators_unitary_and_orthogonal():
    for d in range(2, 6):
        ops = weyl.weyl_operators(d)
        for W in ops:
            assert np.allclose(W @ W.conj().T, np.eye(d), atol=1e-12)
        G = np.array([[np.trace(A.conj().T @ B) for B in ops] for A in ops])
        assert np.allclose(G, d * np.eye(d * d), atol=1e-12)


def test_weyl_operator_is_a_copy():
    W = weyl.weyl_operator(1, 1, 3)
    W[0, 0] = 99
    assert weyl.weyl_operator(1, 1, 3)[0, 0] != 99


@pytest.mark.parametrize("d", [2, 3, 4, 5, 6])
def test_algebra_identities(d):
    w = weyl.omega(d)
    for a, b, c, e in itertools.product(range(d), repeat=4):
        x, y = weyl.WeylIndex(a, b, d), weyl.WeylIndex(c, e, d)
        phase, z = weyl.weyl_compose(x, y)
        lhs = weyl.weyl_operator(x) @ weyl.weyl_operator(y)
        assert np.max(np.abs(lhs - w**phase * weyl.weyl_operator(z))) <= 1e-12
    for a, b in itertools.product(range(d), repeat=2):
        W = weyl.weyl_operator(a, b, d)
        assert np.max(np.abs(W.T - w ** (-a * b) * weyl.weyl_operator(-a, b, d))) <= 1e-12
        assert np.max(np.abs(W.conj().T - w ** (a * b) * weyl.weyl_operator(-a, -b, d))) <= 1e-12


def test_compose_dimension_mismatch():
    with pytest.raises(ValidationError):
        weyl.weyl_compose(weyl.WeylIndex(0, 0, 2), weyl.WeylIndex(0, 0, 3))


@pytest.mark.parametrize("d", [2, 3, 4])
def test_bell_basis_orthonormal(d):
    B = weyl.bell_basis(d)
    assert np.allclose(B.matrix.conj().T @ B.matrix, np.eye(d * d), atol=1e-12)
    phi = weyl.max_entangled(d)
    assert np.allclose(B.vectors[0], phi)
    # |Phi_nm> = (I x W_nm)|Phi_00>
    assert np.allclose(B.vectors[d + 1], np.kron(np.eye(d), weyl.weyl_operator(1, 1, d)) @ phi)


def test_bell_frame_round_trip(rng):
    d = 3
    M = rng.normal(size=(9, 9)) + 1j * rng.normal(size=(9, 9))
    assert np.allclose(weyl.from_bell_frame(weyl.to_bell_frame(M, d), d), M)
    B = weyl.bell_basis(d).vectors
    assert np.isclose(weyl.to_bell_frame(M, d)[2, 5], B[2].conj() @ M @ B[5])


def test_cyclic_permutation_and_matrix():
    perm = weyl.cyclic_permutation(1, 0, 2)
    assert list(perm) == [2, 3, 0, 1]
    P = weyl.permutation_matrix(perm)
    v = np.arange(4.0)
    assert np.array_equal((P @ v)[perm], v)
    X = weyl.shift_matrix(2)
    assert np.array_equal(P, np.kron(X, np.eye(2)))


def test_local_permutation_set():
    for d in (2, 3):
        perms = weyl.local_permutation_set(d)
        assert len(perms) == d * d
        assert len({tuple(p) for p in perms}) == d * d
    assert len(weyl.local_permutation_set(2, "qubit_full")) == 4
    with pytest.raises(ValidationError):
        weyl.local_permutation_set(3, "qubit_full")
    with pytest.raises(ValidationError):
        weyl.local_permutation_set(2, "everything")


def test_inverse_cyclic_set_matches_matrices(rng):
    d = 3
    lam = rng.random(d * d)
    inv = weyl.inverse_cyclic_set(d)
    for k, perm in enumerate(weyl.local_permutation_set(d)):
        assert np.allclose(lam[inv[k]], weyl.permutation_matrix(perm) @ lam)


@pytest.mark.parametrize("d", [2, 3, 4, 5])
def test_product_overlaps_are_cyclic_shifts(d):
    X = weyl.shift_matrix(d)
    for c, e, f, g in itertools.product(range(d), repeat=4):
        M = weyl.product_weyl_overlaps(weyl.WeylIndex(c, e, d), weyl.WeylIndex(f, g, d))
        expected = np.kron(np.linalg.matrix_power(X, (f - c) % d), np.linalg.matrix_power(X, (e + g) % d))
        assert np.max(np.abs(M - expected)) <= 1e-12


@pytest.mark.parametrize("d", [2, 3, 4])
def test_bell_basis_complete(d):
    B = weyl.bell_basis(d).vectors
    assert np.max(np.abs(sum(np.outer(v, v.conj()) for v in B) - np.eye(d * d))) <= 1e-12


@pytest.mark.parametrize("d", [2, 3, 4])
def test_cyclic_permutations_compose_additively(d):
    for a, b, c, e in itertools.product(range(d), repeat=4):
        p, q = weyl.cyclic_permutation(a, b, d), weyl.cyclic_permutation(c, e, d)
        assert np.array_equal(p[q], weyl.cyclic_permutation(a + c, b + e, d))
