"""Dense complex linear algebra for small qudit systems.

Vectors and matrices are plain ``numpy`` arrays of dtype ``complex128``.
Everything here is a pure function; nothing mutates its inputs.
"""

from typing import NamedTuple

import numpy as np

from .errors import DimensionMismatch, NotHermitian

HERMITIAN_TOL = 1e-10
EIGEN_TIE_TOL = 1e-10
_ZERO_ENTRY = 1e-12


class EigenDecomposition(NamedTuple):
    """Spectrum sorted in descending order.

    ``eigenvectors[:, k]`` belongs to ``eigenvalues[k]``.
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray


def as_matrix(a) -> np.ndarray:
    a = np.asarray(a, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DimensionMismatch(f"expected a square matrix, got shape {a.shape}")
    return a


def normalized(v) -> np.ndarray:
    v = np.asarray(v, dtype=complex).ravel()
    norm = np.linalg.norm(v)
    if norm == 0:
        raise ValueError("cannot normalize the zero vector")
    return v / norm


def is_normalized(v, tol=1e-12) -> bool:
    return abs(np.vdot(v, v).real - 1.0) <= tol


def projector(v) -> np.ndarray:
    """|v><v| for a column vector ``v``."""
    v = np.asarray(v, dtype=complex).ravel()
    return np.outer(v, v.conj())


def dagger(a) -> np.ndarray:
    return np.asarray(a).conj().T


def tensor(a, b) -> np.ndarray:
    """Kronecker product; entry (i*db + k, j*db + l) is a[i, j] * b[k, l]."""
    return np.kron(as_matrix(a), as_matrix(b))


def is_hermitian(a, tol=HERMITIAN_TOL) -> bool:
    a = np.asarray(a)
    return bool(np.max(np.abs(a - dagger(a)), initial=0.0) <= tol)


def is_projector(p, tol=1e-10) -> bool:
    p = np.asarray(p)
    return bool(np.max(np.abs(p @ p - p), initial=0.0) <= tol)


def is_density_matrix(rho, tol=1e-12, psd_tol=1e-10) -> bool:
    rho = np.asarray(rho, dtype=complex)
    if not is_hermitian(rho, tol):
        return False
    if abs(np.trace(rho) - 1.0) > tol:
        return False
    return bool(np.linalg.eigvalsh(rho).min() >= -psd_tol)


def phase_fix(v) -> np.ndarray:
    """Rotate the global phase so the first nonzero entry is real positive."""
    v = np.asarray(v, dtype=complex)
    nonzero = np.flatnonzero(np.abs(v) > _ZERO_ENTRY)
    if nonzero.size == 0:
        return v.copy()
    lead = v[nonzero[0]]
    return v * (abs(lead) / lead)


def _tie_key(v):
    lead = v[np.flatnonzero(np.abs(v) > _ZERO_ENTRY)[0]]
    # the remaining entries only break ties between equal leading entries
    rest = tuple(x for z in v for x in (round(z.real, 12), round(z.imag, 12)))
    return (lead.real, lead.imag) + rest


def hermitian_eigen(a) -> EigenDecomposition:
    """Full eigendecomposition of a Hermitian matrix.

    Eigenvalues come back in descending order. Within a group of eigenvalues
    equal to ``EIGEN_TIE_TOL``, eigenvectors are phase-fixed (first nonzero
    entry real positive) and ordered by the (real, imag) value of that entry,
    so the output is a deterministic function of the input.

    Raises
    ------
    NotHermitian
        If ``max|A - A^dagger|`` exceeds ``HERMITIAN_TOL``.
    """
    a = as_matrix(a)
    if not is_hermitian(a):
        raise NotHermitian("matrix is not Hermitian within %g" % HERMITIAN_TOL)
    # symmetrize so LAPACK sees exactly Hermitian input
    values, vectors = np.linalg.eigh((a + dagger(a)) / 2)
    values = values[::-1]
    vectors = vectors[:, ::-1]

    cols = [phase_fix(vectors[:, k]) for k in range(len(values))]
    order = []
    start = 0
    n = len(values)
    while start < n:
        stop = start + 1
        while stop < n and values[start] - values[stop] <= EIGEN_TIE_TOL:
            stop += 1
        group = list(range(start, stop))
        if len(group) > 1:
            group.sort(key=lambda k: _tie_key(cols[k]))
        order.extend(group)
        start = stop

    return EigenDecomposition(
        eigenvalues=values[order].copy(),
        eigenvectors=np.column_stack([cols[k] for k in order]),
    )


def fidelity_pure(rho, psi) -> float:
    """<psi|rho|psi>, clamped to [0, 1]."""
    rho = as_matrix(rho)
    psi = np.asarray(psi, dtype=complex).ravel()
    if rho.shape[0] != psi.shape[0]:
        raise DimensionMismatch(f"state of dim {rho.shape[0]} vs vector of dim {psi.shape[0]}")
    value = np.vdot(psi, rho @ psi)
    if abs(value.imag) > 1e-10:
        raise ValueError(f"fidelity has imaginary part {value.imag:g}; rho is not Hermitian")
    return float(min(1.0, max(0.0, value.real)))
