import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mubverify.errors import DimensionMismatch, NotHermitian
from mubverify.linalg import (
    fidelity_pure,
    hermitian_eigen,
    is_density_matrix,
    is_projector,
    normalized,
    projector,
    tensor,
)
from mubverify.mub import maximally_entangled_state


def random_hermitian(rng, n):
    a = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    return (a + a.conj().T) / 2


def random_density(rng, n):
    a = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    rho = a @ a.conj().T
    return rho / np.trace(rho)


def test_tensor_identity():
    assert np.array_equal(tensor(np.eye(2), np.eye(2)), np.eye(4))


def test_tensor_diagonal():
    out = tensor(np.diag([1, 2]), np.diag([3, 4]))
    assert np.array_equal(out, np.diag([3, 4, 6, 8]))


def test_tensor_index_layout():
    ket0, ket1 = np.eye(3)[0], np.eye(3)[1]
    out = tensor(projector(ket0), projector(ket1))
    expected = np.zeros((9, 9))
    expected[1, 1] = 1  # |01> = 0*3 + 1
    assert np.array_equal(out, expected)
    assert is_projector(out)


def test_tensor_entry_formula():
    rng = np.random.default_rng(3)
    a = rng.integers(-3, 4, size=(2, 2))
    b = rng.integers(-3, 4, size=(3, 3))
    out = tensor(a, b)
    for i in range(2):
        for j in range(2):
            for k in range(3):
                for l in range(3):
                    assert out[i * 3 + k, j * 3 + l] == a[i, j] * b[k, l]


@given(st.integers(0, 2**32 - 1))
@settings(max_examples=50, deadline=None)
def test_tensor_associative_on_integers(seed):
    rng = np.random.default_rng(seed)
    a, b, c = (rng.integers(-5, 6, size=(k, k)) for k in (2, 3, 2))
    assert np.array_equal(tensor(tensor(a, b), c), tensor(a, tensor(b, c)))


@given(st.integers(0, 2**32 - 1))
@settings(max_examples=50, deadline=None)
def test_trace_of_tensor_is_product_of_traces(seed):
    rng = np.random.default_rng(seed)
    a = random_hermitian(rng, 3)
    b = random_hermitian(rng, 4)
    assert np.trace(tensor(a, b)) == pytest.approx(np.trace(a) * np.trace(b), abs=1e-10)


def test_eigen_identity():
    eig = hermitian_eigen(np.eye(3))
    assert np.allclose(eig.eigenvalues, [1, 1, 1])


def test_eigen_pauli_x():
    eig = hermitian_eigen([[0, 1], [1, 0]])
    assert np.allclose(eig.eigenvalues, [1, -1], atol=1e-14)


def test_eigen_rejects_non_hermitian():
    with pytest.raises(NotHermitian):
        hermitian_eigen([[0, 1], [0, 0]])


@pytest.mark.parametrize("n", [1, 2, 5, 9, 25, 49])
def test_eigen_contract_random(n):
    rng = np.random.default_rng(n)
    a = random_hermitian(rng, n)
    eig = hermitian_eigen(a)
    vals, vecs = eig.eigenvalues, eig.eigenvectors
    assert np.all(np.diff(vals) <= 0)
    for k in range(n):
        assert np.linalg.norm(a @ vecs[:, k] - vals[k] * vecs[:, k]) <= 1e-9
    assert np.max(np.abs(vecs.conj().T @ vecs - np.eye(n))) <= 1e-10
    rebuilt = (vecs * vals) @ vecs.conj().T
    assert np.max(np.abs(rebuilt - a)) <= 1e-9


def test_eigen_degenerate_is_deterministic_and_phase_fixed():
    rng = np.random.default_rng(11)
    q, _ = np.linalg.qr(rng.normal(size=(6, 6)) + 1j * rng.normal(size=(6, 6)))
    a = q @ np.diag([2.0, 2.0, 2.0, -1.0, -1.0, 0.5]) @ q.conj().T
    a = (a + a.conj().T) / 2
    first = hermitian_eigen(a)
    second = hermitian_eigen(a.copy())
    assert np.array_equal(first.eigenvalues, second.eigenvalues)
    assert np.array_equal(first.eigenvectors, second.eigenvectors)
    for k in range(6):
        v = first.eigenvectors[:, k]
        lead = v[np.flatnonzero(np.abs(v) > 1e-12)[0]]
        assert lead.imag == pytest.approx(0, abs=1e-15) and lead.real > 0
    # ties ordered by their leading entry
    leads = [first.eigenvectors[np.flatnonzero(np.abs(first.eigenvectors[:, k]) > 1e-12)[0], k].real for k in range(3)]
    assert leads == sorted(leads)


def test_fidelity_pure_cases():
    psi = maximally_entangled_state(3)
    assert fidelity_pure(projector(psi), psi) == pytest.approx(1.0, abs=1e-15)
    other = normalized(np.arange(1, 10))
    assert fidelity_pure(np.eye(9) / 9, other) == pytest.approx(1 / 9, abs=1e-15)


def test_fidelity_white_noise_closed_form():
    psi = maximally_entangled_state(3)
    v = 0.9352
    rho = v * projector(psi) + (1 - v) * np.eye(9) / 9
    assert fidelity_pure(rho, psi) == pytest.approx(0.9352 + 0.0648 / 9, abs=1e-12)
    assert round(fidelity_pure(rho, psi), 4) == 0.9424


def test_fidelity_dimension_mismatch():
    with pytest.raises(DimensionMismatch):
        fidelity_pure(np.eye(4) / 4, np.ones(3) / np.sqrt(3))


@given(st.integers(0, 2**32 - 1), st.integers(1, 9))
@settings(max_examples=100, deadline=None)
def test_fidelity_in_unit_interval(seed, n):
    rng = np.random.default_rng(seed)
    rho = random_density(rng, n)
    assert is_density_matrix(rho)
    psi = normalized(rng.normal(size=n) + 1j * rng.normal(size=n))
    assert 0.0 <= fidelity_pure(rho, psi) <= 1.0
