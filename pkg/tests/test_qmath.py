import numpy as np
import pytest

from qca import qmath as qm
from qca.errors import ContractError, ShapeError


def random_density(rng, dim=2):
    a = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    rho = a @ a.conj().T
    return rho / np.trace(rho)


def test_pauli_algebra():
    x, y, z = qm.PAULI
    assert np.allclose(x @ y, 1j * z)
    assert np.allclose(y @ z, 1j * x)
    for s in qm.PAULI:
        assert np.allclose(s @ s, qm.IDENTITY2)
        assert qm.is_hermitian(s) and qm.is_unitary(s)


def test_tensor_product_matches_kron(rng):
    a = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
    b = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
    assert np.allclose(qm.tensor_product(a, b), np.kron(a, b), atol=1e-15)


def test_partial_trace_of_product_state(rng):
    rho, sigma = random_density(rng), random_density(rng)
    assert np.allclose(qm.partial_trace_env(np.kron(rho, sigma)), rho, atol=1e-15)


def test_partial_trace_reshape_oracle(rng):
    r = random_density(rng, 4)
    oracle = np.trace(r.reshape(2, 2, 2, 2), axis1=1, axis2=3)
    assert np.allclose(qm.partial_trace_env(r), oracle, atol=1e-15)


def test_partial_trace_bell_state_is_mixed():
    bell = np.array([1, 0, 0, 1]) / np.sqrt(2)
    assert np.allclose(qm.partial_trace_env(np.outer(bell, bell)), qm.IDENTITY2 / 2)


def test_bloch_round_trip(rng):
    for _ in range(50):
        r = rng.normal(size=3)
        r *= rng.random() / np.linalg.norm(r)
        rho = qm.bloch_to_density(r, physical=True)
        assert qm.is_density_matrix(rho)
        assert np.allclose(qm.density_to_bloch(rho), r, atol=1e-15)


def test_bloch_vector_is_pauli_expectation(rng):
    rho = random_density(rng)
    expect = [np.trace(rho @ s).real for s in qm.PAULI]
    assert np.allclose(qm.density_to_bloch(rho), expect, atol=1e-15)


def test_bloch_outside_ball_rejected_when_physical():
    qm.bloch_to_density([0, 0, 2.0])
    with pytest.raises(ValueError):
        qm.bloch_to_density([0, 0, 2.0], physical=True)


def test_density_to_bloch_contract():
    with pytest.raises(ContractError):
        qm.density_to_bloch(np.array([[1, 1], [0, 0]], dtype=complex))
    with pytest.raises(ContractError):
        qm.density_to_bloch(np.eye(2))


def test_shape_errors():
    with pytest.raises(ShapeError):
        qm.partial_trace_env(np.eye(3))
    with pytest.raises(ShapeError):
        qm.tensor_product(np.eye(3), np.eye(2))


def test_symmetric_eigen3_vs_eigvalsh(rng):
    for _ in range(500):
        a = rng.normal(size=(3, 3))
        s = a + a.T
        assert np.allclose(qm.symmetric_eigen3(s), np.linalg.eigvalsh(s)[::-1], atol=1e-12)


def test_symmetric_eigen3_degenerate_spectra(rng):
    for spectrum in ([2.0, 2.0, 0.5], [1.0, 1.0, 1.0], [0.3, 0.0, 0.0], [1.0, 1.0 + 1e-9, 0.2]):
        q, _ = np.linalg.qr(rng.normal(size=(3, 3)))
        s = q @ np.diag(spectrum) @ q.T
        assert np.allclose(qm.symmetric_eigen3(s), sorted(spectrum, reverse=True), atol=1e-13)


def test_symmetric_eigen3_rejects_asymmetric():
    with pytest.raises(ContractError):
        qm.symmetric_eigen3(np.arange(9.0).reshape(3, 3))


def test_svd3_factorisation(rng):
    for _ in range(500):
        m = rng.normal(size=(3, 3))
        u, d, v = qm.svd3(m)
        assert np.allclose(u @ d @ v, m, atol=1e-13)
        assert np.allclose(u @ u.T, np.eye(3), atol=1e-13)
        assert np.allclose(v @ v.T, np.eye(3), atol=1e-13)
        assert np.allclose(np.diag(d), np.linalg.svd(m, compute_uv=False), atol=1e-13)


@pytest.mark.parametrize(
    "m",
    [
        np.zeros((3, 3)),
        np.diag([1.0, 0.0, 0.0]),
        np.outer([1.0, 2.0, 3.0], [0.5, -1.0, 2.0]),
        np.diag([0.5, 0.5, 0.25]),
        -np.eye(3),
    ],
)
def test_svd3_rank_deficient_and_degenerate(m):
    u, d, v = qm.svd3(m)
    s = np.diag(d)
    assert np.all(s >= 0) and np.all(np.diff(s) <= 0)
    assert np.allclose(u @ d @ v, m, atol=1e-13)
    assert np.allclose(u @ u.T, np.eye(3), atol=1e-13)
    assert np.allclose(v @ v.T, np.eye(3), atol=1e-13)
