"""Mutually unbiased bases and the optimal verification strategy built from them."""

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, UnsupportedDimension
from .linalg import hermitian_eigen, phase_fix, projector, tensor

SUPPORTED_DIMENSIONS = (2, 3, 5, 7)

_W = np.exp(2j * np.pi / 3)
_WC = np.conj(_W)
_S3 = 1 / math.sqrt(3)

# The four qutrit bases exactly as printed, in order S1..S4.
QUTRIT_BASES = np.array(
    [
        [[1, 0, 0], [0, 1, 0], [0, 0, 1]],
        [[_S3, _S3, _S3], [_S3, _S3 * _W, _S3 * _WC], [_S3, _S3 * _WC, _S3 * _W]],
        [[_S3, _S3 * _W, _S3], [_S3, _S3 * _WC, _S3 * _WC], [_S3, _S3, _S3 * _W]],
        [[_S3, _S3 * _WC, _S3], [_S3, _S3, _S3 * _WC], [_S3, _S3 * _W, _S3 * _W]],
    ],
    dtype=complex,
)


@dataclass(frozen=True)
class MubSet:
    """A complete set of d+1 mutually unbiased bases.

    ``bases[i, k]`` is the k-th unit vector of basis i.
    """

    d: int
    bases: np.ndarray

    def basis_matrix(self, i):
        """Basis i as a unitary whose columns are the basis vectors."""
        return self.bases[i].T

    def check(self, ortho_tol=1e-12, unbiased_tol=1e-10):
        d = self.d
        if self.bases.shape != (d + 1, d, d):
            raise ValueError(f"expected shape {(d + 1, d, d)}, got {self.bases.shape}")
        for i in range(d + 1):
            gram = self.bases[i].conj() @ self.bases[i].T
            if np.max(np.abs(gram - np.eye(d))) > ortho_tol:
                raise ValueError(f"basis {i} is not orthonormal")
            for j in range(i + 1, d + 1):
                overlaps = np.abs(self.bases[i].conj() @ self.bases[j].T) ** 2
                if np.max(np.abs(overlaps - 1 / d)) > unbiased_tol:
                    raise ValueError(f"bases {i} and {j} are not unbiased")
        return True


def _is_prime(n):
    return n >= 2 and all(n % p for p in range(2, math.isqrt(n) + 1))


def _check_dimension(d):
    if not isinstance(d, (int, np.integer)) or isinstance(d, bool):
        raise UnsupportedDimension(f"unsupported dimension {d!r}")
    if not _is_prime(d) or not 2 <= d <= 7:
        raise UnsupportedDimension(f"unsupported dimension {d}: need a prime in [2, 7]")


def generate_mub(d) -> MubSet:
    """Quadratic-phase construction for prime d.

    Basis b+1 (b = 0..d-1) holds the vectors sum_j w^(b j^2 + k j) |j> / sqrt(d)
    with w = exp(2 pi i / d). For d = 2 the quadratic term needs the fourth root
    of unity, i.e. i^(b j^2) (-1)^(k j).
    """
    _check_dimension(d)
    j = np.arange(d)
    bases = [np.eye(d, dtype=complex)]
    for b in range(d):
        if d == 2:
            quad = np.exp(1j * np.pi * b * j**2 / 2)
        else:
            quad = np.exp(2j * np.pi * ((b * j**2) % d) / d)
        basis = []
        for k in range(d):
            vec = quad * np.exp(2j * np.pi * ((k * j) % d) / d) / math.sqrt(d)
            basis.append(phase_fix(vec))
        bases.append(basis)
    return MubSet(d=int(d), bases=np.array(bases, dtype=complex))


def build_mub(d) -> MubSet:
    """Complete MUB set; the printed qutrit bases for d = 3, generated otherwise."""
    _check_dimension(d)
    if d == 3:
        return MubSet(d=3, bases=QUTRIT_BASES.copy())
    return generate_mub(d)


def maximally_entangled_state(d) -> np.ndarray:
    if d < 2:
        raise DomainError(f"dimension must be at least 2, got {d}")
    psi = np.zeros(d * d, dtype=complex)
    psi[np.arange(d) * (d + 1)] = 1 / math.sqrt(d)
    return psi


def conjugate_vector(v) -> np.ndarray:
    return np.conj(np.asarray(v, dtype=complex))


@dataclass(frozen=True)
class VerificationStrategy:
    """Omega = sum_i p_i M_i with M_i the pass projector of setting i."""

    d: int
    mubs: MubSet
    settings: tuple
    probabilities: np.ndarray
    omega: np.ndarray
    lambda2: float
    target: np.ndarray

    @property
    def delta_coefficient(self):
        """Single-test rejection rate per unit infidelity, 1 - lambda2."""
        return 1.0 - self.lambda2

    def local_unitary(self, i):
        """Columns are the joint outcome vectors |phi_a,i>|phi_b,i*>, index a*d + b."""
        u = self.mubs.basis_matrix(i)
        return np.kron(u, u.conj())


def build_strategy(mubs: MubSet) -> VerificationStrategy:
    d = mubs.d
    settings = []
    for i in range(d + 1):
        m = np.zeros((d * d, d * d), dtype=complex)
        for k in range(d):
            phi = mubs.bases[i, k]
            m += tensor(projector(phi), projector(conjugate_vector(phi)))
        settings.append(m)
    probabilities = np.full(d + 1, 1.0 / (d + 1))
    omega = sum(p * m for p, m in zip(probabilities, settings))
    spectrum = hermitian_eigen(omega).eigenvalues
    return VerificationStrategy(
        d=d,
        mubs=mubs,
        settings=tuple(settings),
        probabilities=probabilities,
        omega=omega,
        lambda2=float(spectrum[1]),
        target=maximally_entangled_state(d),
    )


def _check_open_unit(name, value):
    if not 0.0 < value < 1.0:
        raise DomainError(f"{name} must lie in (0, 1), got {value}")


def min_copies_real(epsilon, delta, lambda2) -> float:
    """ln(1/delta) / ((1 - lambda2) epsilon), before rounding up."""
    _check_open_unit("epsilon", epsilon)
    _check_open_unit("delta", delta)
    if not 0.0 <= lambda2 < 1.0:
        raise DomainError(f"lambda2 must lie in [0, 1), got {lambda2}")
    return math.log(1.0 / delta) / ((1.0 - lambda2) * epsilon)


def min_copies(epsilon, delta, lambda2) -> int:
    """Smallest number of copies certifying infidelity epsilon at confidence 1 - delta."""
    return max(1, math.ceil(min_copies_real(epsilon, delta, lambda2)))


def rejection_probability(epsilon, lambda2) -> float:
    if not 0.0 <= epsilon <= 1.0:
        raise DomainError(f"epsilon must lie in [0, 1], got {epsilon}")
    return (1.0 - lambda2) * epsilon


def worst_case_pass_probability(epsilon, lambda2) -> float:
    """Largest pass probability of a state at infidelity epsilon."""
    return 1.0 - rejection_probability(epsilon, lambda2)


def _complex_pairs(v):
    return [[float(z.real), float(z.imag)] for z in v]


def strategy_to_json(strategy: VerificationStrategy, table=None) -> dict:
    doc = {
        "d": strategy.d,
        "bases": [[_complex_pairs(vec) for vec in basis] for basis in strategy.mubs.bases],
        "lambda2": strategy.lambda2,
        "delta_coefficient": strategy.delta_coefficient,
    }
    if table is not None:
        doc["min_copies"] = table
    return doc


def min_copies_table(lambda2, deltas=(0.10, 0.05, 0.01), epsilons=(0.10, 0.08, 0.05, 0.01)):
    return [
        {"delta": delta, "epsilon": eps, "n": min_copies(eps, delta, lambda2)}
        for delta in deltas
        for eps in epsilons
    ]
