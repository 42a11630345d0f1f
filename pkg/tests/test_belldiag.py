import numpy as np
import pytest
from scipy.stats import special_ortho_group

from preservability import belldiag, channels
from preservability.channels import ChannelSpec
from preservability.errors import NonUnitalError, UnsupportedChannelError, ValidationError


def test_sigma_convention():
    X, S2, Z = belldiag.SIGMA
    assert np.allclose(S2, [[0, 1j], [-1j, 0]])
    assert np.allclose(X @ S2, -1j * Z)


def test_identity_channel_correlation_matrix():
    blocks = belldiag.pauli_blocks(channels.choi(ChannelSpec.named("identity")).matrix)
    assert np.allclose(blocks.T, np.diag([1, -1, 1]))
    assert np.allclose(blocks.beta, 0) and np.allclose(blocks.gamma, 0)


def test_pauli_blocks_reconstruct():
    spec = channels.random_channel(2, "qubit_unital", seed=2)
    J = channels.choi(spec).matrix
    assert np.allclose(belldiag.pauli_blocks(J).matrix(), J, atol=1e-14)


def test_rotation_unitary_round_trip():
    rng = np.random.default_rng(0)
    for O in special_ortho_group.rvs(3, size=30, random_state=rng):
        U = belldiag.rotation_to_unitary(O)
        assert np.allclose(U @ U.conj().T, np.eye(2), atol=1e-12)
        assert np.allclose(belldiag.unitary_to_rotation(U), O, atol=1e-12)


def test_rotation_to_unitary_rejects_reflection():
    with pytest.raises(ValidationError):
        belldiag.rotation_to_unitary(np.diag([1.0, 1.0, -1.0]))


@pytest.mark.parametrize("seed", range(10))
def test_diagonalize_random_unital(backend, seed):
    spec = channels.random_channel(2, "qubit_unital", seed=seed)
    J = channels.choi(spec).matrix
    diag = belldiag.diagonalize(J)
    assert diag.offdiag_defect <= 1e-9
    assert channels.bell_offdiag_defect(diag.conjugated(J), 2) <= 1e-9
    assert np.allclose(np.sort(diag.eigenvalues.values), np.linalg.eigvalsh(J), atol=1e-9)


def test_diagonalize_rejects_non_unital():
    ops = [np.array([[1, 0], [0, np.sqrt(0.7)]]), np.array([[0, np.sqrt(0.3)], [0, 0]])]
    with pytest.raises(NonUnitalError):
        belldiag.diagonalize(channels.choi(ChannelSpec.from_kraus(ops)).matrix)


def test_weyl_normal_form():
    theta = np.pi / 8
    R = np.array([[np.cos(theta), -np.sin(theta)], [np.sin(theta), np.cos(theta)]])
    spec = channels.compose(ChannelSpec.unitary(R), ChannelSpec.named("dephasing", 0.5))
    U, V, probs = belldiag.weyl_normal_form(spec)
    assert belldiag.normal_form_residual(spec, U, V, probs) < 1e-12
    assert np.allclose(np.sort(probs), [0, 0, 0.25, 0.75], atol=1e-12)
    for seed in range(5):
        spec = channels.random_channel(2, "qubit_unital", seed=100 + seed)
        assert belldiag.normal_form_residual(spec, *belldiag.weyl_normal_form(spec)) < 1e-10


def test_weyl_normal_form_of_weyl_table_is_trivial():
    spec = ChannelSpec.named("depolarizing", 0.3)
    U, V, probs = belldiag.weyl_normal_form(spec)
    assert np.array_equal(U, np.eye(2)) and np.array_equal(V, np.eye(2))
    assert np.allclose(probs, spec.weyl_table().ravel())


def test_channel_eigenvalues_paths():
    d3 = channels.random_channel(3, "weyl_mixture", seed=1)
    from_kraus = ChannelSpec.from_kraus(d3.kraus())
    assert np.allclose(belldiag.channel_eigenvalues(from_kraus).values, d3.weyl_table().ravel(), atol=1e-12)
    with pytest.raises(UnsupportedChannelError):
        belldiag.channel_eigenvalues(channels.random_channel(3, "mixed_unitary", seed=1))


def test_eigenvalue_vector_validation():
    v = belldiag.EigenvalueVector(2, [0.5, 0.5, 0.0, -1e-12])
    assert v.values.min() == 0 and v.truncated().size == 3
    with pytest.raises(ValidationError):
        belldiag.EigenvalueVector(2, [0.5, 0.5, 0.1, 0.0])
    with pytest.raises(ValidationError):
        belldiag.EigenvalueVector(3, [0.25] * 4)


def test_eigenvalues_invariant_under_local_unitaries():
    from scipy.stats import unitary_group

    rng = np.random.default_rng(12)
    for _ in range(20):
        J = channels.choi(channels.random_channel(2, "qubit_unital", rng)).matrix
        U = np.kron(unitary_group.rvs(2, random_state=rng), unitary_group.rvs(2, random_state=rng))
        a = np.sort(belldiag.diagonalize(J).eigenvalues.values)
        b = np.sort(belldiag.diagonalize(U @ J @ U.conj().T).eigenvalues.values)
        assert np.max(np.abs(a - b)) <= 1e-9
