import itertools
import math

import numpy as np
import pytest

from mubverify.errors import DomainError, UnsupportedDimension
from mubverify.linalg import hermitian_eigen, is_projector, normalized, projector
from mubverify.mub import (
    QUTRIT_BASES,
    build_mub,
    build_strategy,
    conjugate_vector,
    generate_mub,
    maximally_entangled_state,
    min_copies,
    min_copies_real,
    rejection_probability,
    strategy_to_json,
    worst_case_pass_probability,
)

W = np.exp(2j * np.pi / 3)


def overlaps_ok(mubs, tol=1e-10):
    d = mubs.d
    for (i, bi), (j, bj) in itertools.combinations(enumerate(mubs.bases), 2):
        for u in bi:
            for w in bj:
                if abs(abs(np.vdot(u, w)) ** 2 - 1 / d) > tol:
                    return False
    return True


def test_qutrit_bases_match_printed_vectors():
    s = 1 / math.sqrt(3)
    printed = [
        [(1, 0, 0), (0, 1, 0), (0, 0, 1)],
        [(s, s, s), (s, s * W, s * W.conjugate()), (s, s * W.conjugate(), s * W)],
        [(s, s * W, s), (s, s * W.conjugate(), s * W.conjugate()), (s, s, s * W)],
        [(s, s * W.conjugate(), s), (s, s, s * W.conjugate()), (s, s * W, s * W)],
    ]
    mubs = build_mub(3)
    assert np.max(np.abs(mubs.bases - np.array(printed))) <= 1e-15
    assert np.array_equal(mubs.bases[0], np.eye(3))
    assert np.allclose(mubs.bases[1, 0], np.ones(3) / math.sqrt(3), atol=1e-15)


@pytest.mark.parametrize("d", [2, 3, 5, 7])
def test_mub_invariants(d):
    mubs = build_mub(d)
    assert mubs.bases.shape == (d + 1, d, d)
    assert mubs.check()
    assert overlaps_ok(mubs)


def test_qubit_bases():
    mubs = build_mub(2)
    r = 1 / math.sqrt(2)
    assert np.allclose(mubs.bases[1], [[r, r], [r, -r]])
    assert np.allclose(mubs.bases[2], [[r, 1j * r], [r, -1j * r]])


def _same_basis_up_to_phase(a, b):
    # every vector of a equals some vector of b up to a global phase
    gram = np.abs(a.conj() @ b.T)
    return np.allclose(np.sort(gram, axis=1)[:, -1], 1.0, atol=1e-12)


def test_generated_qutrit_set_equals_printed_up_to_phase_and_order():
    generated = generate_mub(3).bases
    for printed in QUTRIT_BASES:
        matches = [g for g in generated if _same_basis_up_to_phase(printed, g)]
        assert len(matches) == 1


def test_generated_vectors_phase_fixed():
    for d in (2, 3, 5, 7):
        for basis in generate_mub(d).bases:
            for v in basis:
                lead = v[np.flatnonzero(np.abs(v) > 1e-12)[0]]
                assert lead.real > 0 and abs(lead.imag) < 1e-15


@pytest.mark.parametrize("d", [0, 1, 4, 6, 8, 9, 11, 3.0])
def test_unsupported_dimension(d):
    with pytest.raises(UnsupportedDimension):
        build_mub(d)


def test_maximally_entangled_state():
    assert np.allclose(maximally_entangled_state(2), np.array([1, 0, 0, 1]) / math.sqrt(2))
    psi = maximally_entangled_state(3)
    assert np.flatnonzero(psi).tolist() == [0, 4, 8]
    assert np.allclose(psi[[0, 4, 8]], 1 / math.sqrt(3))
    for d in (2, 3, 5, 7):
        assert np.linalg.norm(maximally_entangled_state(d)) == pytest.approx(1.0, abs=1e-15)


def test_conjugate_vector():
    real = np.array([0.6, 0.8, 0.0])
    assert np.array_equal(conjugate_vector(real), real)
    s = 1 / math.sqrt(3)
    v = build_mub(3).bases[1, 1]
    assert np.allclose(conjugate_vector(v), [s, s * W.conjugate(), s * W], atol=1e-15)
    assert np.array_equal(conjugate_vector(conjugate_vector(v)), v)


@pytest.mark.parametrize("d", [2, 3, 5, 7])
def test_strategy_invariants(d):
    strategy = build_strategy(build_mub(d))
    psi = strategy.target
    for m in strategy.settings:
        assert is_projector(m)
        assert np.linalg.matrix_rank(m, tol=1e-8) == d
        assert np.allclose(m @ psi, psi, atol=1e-10)
    assert abs(strategy.probabilities.sum() - 1) <= 1e-15
    assert np.max(np.abs(strategy.omega @ psi - psi)) <= 1e-10
    assert strategy.lambda2 == pytest.approx(1 / (d + 1), abs=1e-9)
    assert strategy.lambda2 == pytest.approx(hermitian_eigen(strategy.omega).eigenvalues[1], abs=1e-10)


@pytest.mark.parametrize("d", [2, 3, 5, 7])
def test_omega_closed_form(d):
    # complete MUBs give Omega = P + (1 - P) / (d + 1), P the target projector
    strategy = build_strategy(build_mub(d))
    p = projector(maximally_entangled_state(d))
    expected = p + (np.eye(d * d) - p) / (d + 1)
    assert np.max(np.abs(strategy.omega - expected)) <= 1e-12


def test_qutrit_strategy_constants(qutrit_strategy):
    assert qutrit_strategy.omega.shape == (9, 9)
    assert np.trace(qutrit_strategy.omega).real == pytest.approx(3.0, abs=1e-12)
    assert qutrit_strategy.lambda2 == pytest.approx(0.25, abs=1e-12)
    assert qutrit_strategy.delta_coefficient == pytest.approx(0.75, abs=1e-12)


def test_soundness_on_orthogonal_states(qutrit_strategy):
    rng = np.random.default_rng(2024)
    psi = qutrit_strategy.target
    worst = 0.0
    for _ in range(1000):
        chi = rng.normal(size=9) + 1j * rng.normal(size=9)
        chi = normalized(chi - np.vdot(psi, chi) * psi)
        worst = max(worst, np.vdot(chi, qutrit_strategy.omega @ chi).real)
    assert worst <= qutrit_strategy.lambda2 + 1e-9


@pytest.mark.parametrize("eps", [0.01, 0.08, 0.3, 0.9])
def test_worst_case_attained_on_lambda2_eigenvector(qutrit_strategy, eps):
    eig = hermitian_eigen(qutrit_strategy.omega)
    chi2 = eig.eigenvectors[:, 1]
    psi = qutrit_strategy.target
    theta = math.acos(math.sqrt(1 - eps))
    state = math.cos(theta) * psi + math.sin(theta) * chi2
    assert abs(np.vdot(psi, state)) ** 2 == pytest.approx(1 - eps, abs=1e-12)
    attained = np.vdot(state, qutrit_strategy.omega @ state).real
    bound = worst_case_pass_probability(eps, qutrit_strategy.lambda2)
    assert attained == pytest.approx(bound, abs=1e-6)

    # and nothing at the same fidelity does better
    rng = np.random.default_rng(7)
    for _ in range(200):
        chi = rng.normal(size=9) + 1j * rng.normal(size=9)
        chi = normalized(chi - np.vdot(psi, chi) * psi)
        trial = math.cos(theta) * psi + math.sin(theta) * chi
        assert np.vdot(trial, qutrit_strategy.omega @ trial).real <= bound + 1e-9


def test_min_copies_examples():
    assert min_copies_real(0.08, 0.05, 0.25) == pytest.approx(49.93, abs=0.01)
    assert min_copies(0.08, 0.05, 0.25) == 50
    assert min_copies(0.08, 1 - 1e-15, 0.25) == 1


def test_min_copies_linear_in_inverse_epsilon():
    assert min_copies_real(0.04, 0.05, 0.25) == 2 * min_copies_real(0.08, 0.05, 0.25)


def test_min_copies_monotone():
    grid = np.linspace(0.01, 0.99, 60)
    for lam in (0.0, 0.25):
        by_eps = [min_copies(e, 0.05, lam) for e in grid]
        by_delta = [min_copies(0.08, d, lam) for d in grid]
        assert all(a >= b for a, b in zip(by_eps, by_eps[1:]))
        assert all(a >= b for a, b in zip(by_delta, by_delta[1:]))


@pytest.mark.parametrize("eps,delta", [(0, 0.5), (1, 0.5), (0.5, 0), (0.5, 1), (-0.1, 0.5)])
def test_min_copies_domain(eps, delta):
    with pytest.raises(DomainError):
        min_copies(eps, delta, 0.25)


def test_worst_case_pass_probability():
    assert worst_case_pass_probability(0.0, 0.7) == 1.0
    assert rejection_probability(0.08, 0.25) == pytest.approx(0.06, abs=1e-15)
    assert worst_case_pass_probability(0.08, 0.25) == pytest.approx(0.94, abs=1e-15)
    assert worst_case_pass_probability(0.0576, 0.25) == pytest.approx(0.9568, abs=1e-12)


def test_strategy_json(qutrit_strategy):
    doc = strategy_to_json(qutrit_strategy)
    assert doc["d"] == 3
    assert len(doc["bases"]) == 4 and len(doc["bases"][1]) == 3
    assert doc["bases"][1][0][0] == pytest.approx([1 / math.sqrt(3), 0.0])
    assert doc["lambda2"] == pytest.approx(0.25)
    assert doc["delta_coefficient"] == pytest.approx(0.75)
