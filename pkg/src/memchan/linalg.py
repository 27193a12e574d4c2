"""Dense complex linear algebra for the 2x2 and 4x4 matrices used throughout.

Matrices are plain ``numpy`` arrays. Single-matrix spectra come from a cyclic
Jacobi solver; the ``*_batch`` helpers operate on stacks of shape ``(..., n, n)``
and delegate to LAPACK, which is what makes sweeps over 10^4-point time grids
affordable.
"""
from __future__ import annotations

import numpy as np

from .errors import DimensionMismatch, NoConvergence, NotHermitian

HERMITIAN_TOL = 1e-10
JACOBI_TOL = 1e-13
JACOBI_MAX_SWEEPS = 100

SIGMA0 = np.eye(2, dtype=complex)
SIGMA1 = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA2 = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA3 = np.array([[1, 0], [0, -1]], dtype=complex)
PAULIS = (SIGMA0, SIGMA1, SIGMA2, SIGMA3)


def as_matrix(a) -> np.ndarray:
    a = np.asarray(a, dtype=complex)
    if a.ndim != 2:
        raise DimensionMismatch(f"expected a 2-d matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError("matrix has non-finite entries")
    return a


def dagger(a: np.ndarray) -> np.ndarray:
    return np.conj(np.swapaxes(a, -1, -2))


def kron(a, b) -> np.ndarray:
    return np.kron(as_matrix(a), as_matrix(b))


def hadamard_product(a, b) -> np.ndarray:
    """Entrywise product. Broadcasts over leading stack axes."""
    a = np.asarray(a)
    b = np.asarray(b)
    if a.shape[-2:] != b.shape[-2:]:
        raise DimensionMismatch(f"shapes {a.shape} and {b.shape} differ")
    return a * b


def hermiticity_defect(a: np.ndarray) -> float:
    """max |a - a^dagger| entrywise."""
    return float(np.max(np.abs(a - dagger(a)), initial=0.0))


def _check_square_hermitian(a: np.ndarray, tol: float) -> None:
    if a.shape[0] != a.shape[1]:
        raise DimensionMismatch(f"matrix is not square: {a.shape}")
    defect = hermiticity_defect(a)
    if defect > tol:
        raise NotHermitian(f"max |a - a^dagger| = {defect:.3e} exceeds {tol:.0e}")


def _off_diagonal_norm(a: np.ndarray) -> float:
    off = a - np.diag(np.diag(a))
    return float(np.sqrt(np.sum(np.abs(off) ** 2)))


def jacobi_eigh(a, tol: float = JACOBI_TOL, max_sweeps: int = JACOBI_MAX_SWEEPS):
    """Eigen-decomposition of a Hermitian matrix by cyclic complex Jacobi rotations.

    Returns ``(w, v)`` with ``a @ v[:, k] == w[k] * v[:, k]``; ``w`` is in the
    order the sweeps leave it, not sorted.
    """
    a = as_matrix(a).copy()
    n = a.shape[0]
    # Symmetrize so round-off below the Hermiticity tolerance cannot stall the sweeps.
    a = 0.5 * (a + dagger(a))
    v = np.eye(n, dtype=complex)
    scale = max(1.0, float(np.linalg.norm(a)))
    for _ in range(max_sweeps):
        if _off_diagonal_norm(a) <= tol * scale:
            return np.real(np.diag(a)).copy(), v
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                mag = abs(apq)
                if mag <= 1e-300:
                    continue
                phase = apq / mag
                theta = (a[q, q].real - a[p, p].real) / (2.0 * mag)
                t = 1.0 / (abs(theta) + np.sqrt(theta * theta + 1.0))
                if theta < 0.0:
                    t = -t
                c = 1.0 / np.sqrt(t * t + 1.0)
                s = t * c
                # u = diag(1, conj(phase)) on (p, q), then a real Givens rotation.
                rot = np.array([[c, s], [-s * np.conj(phase), c * np.conj(phase)]])
                idx = [p, q]
                a[:, idx] = a[:, idx] @ rot
                a[idx, :] = dagger(rot) @ a[idx, :]
                a[p, q] = a[q, p] = 0.0
                v[:, idx] = v[:, idx] @ rot
    if _off_diagonal_norm(a) <= tol * scale:
        return np.real(np.diag(a)).copy(), v
    raise NoConvergence(f"Jacobi did not converge in {max_sweeps} sweeps")


def hermitian_eigenvalues(a, tol: float = HERMITIAN_TOL) -> np.ndarray:
    """Real eigenvalues of a Hermitian matrix, in descending order."""
    a = as_matrix(a)
    _check_square_hermitian(a, tol)
    w, _ = jacobi_eigh(a)
    return np.sort(w)[::-1]


def trace_norm(a, tol: float = HERMITIAN_TOL) -> float:
    """Sum of absolute eigenvalues of a Hermitian matrix."""
    return float(np.sum(np.abs(hermitian_eigenvalues(a, tol))))


def eigvalsh_batch(a: np.ndarray) -> np.ndarray:
    """Descending eigenvalues for a stack of Hermitian matrices."""
    return np.linalg.eigvalsh(a)[..., ::-1]


def trace_norm_batch(a: np.ndarray) -> np.ndarray:
    return np.sum(np.abs(np.linalg.eigvalsh(a)), axis=-1)
