"""Single- and two-qubit states: fixed constructions, seeded samplers, validation.

Two-qubit matrices are in the computational basis |00>, |01>, |10>, |11>.
Bell index convention: 0 = Phi+, 1 = Phi-, 2 = Psi+, 3 = Psi-.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import DomainError, IndexOutOfRange
from .linalg import dagger, hermiticity_defect

TRACE_TOL = 1e-12
PSD_TOL = 1e-10
HERMITIAN_TOL = 1e-10

STATE_KINDS = ("pure", "mixed_ginibre", "product", "max_entangled_lu", "bell")

_S = 1.0 / np.sqrt(2.0)
BELL_VECTORS = (
    np.array([_S, 0, 0, _S], dtype=complex),
    np.array([_S, 0, 0, -_S], dtype=complex),
    np.array([0, _S, _S, 0], dtype=complex),
    np.array([0, _S, -_S, 0], dtype=complex),
)
BELL_NAMES = ("phi+", "phi-", "psi+", "psi-")


@dataclass(frozen=True)
class RngStream:
    """Names an independent random stream.

    The pair ``(master_seed, stream_index)`` fully determines the draws, so
    samples can be generated in any order or in parallel with identical results.
    """

    master_seed: int
    stream_index: int

    def generator(self) -> np.random.Generator:
        seq = np.random.SeedSequence(self.master_seed, spawn_key=(self.stream_index,))
        return np.random.default_rng(seq)


def _as_generator(rng) -> np.random.Generator:
    if isinstance(rng, RngStream):
        return rng.generator()
    if isinstance(rng, np.random.Generator):
        return rng
    raise TypeError(f"expected RngStream or numpy Generator, got {type(rng).__name__}")


def projector(psi) -> np.ndarray:
    psi = np.asarray(psi, dtype=complex)
    psi = psi / np.linalg.norm(psi)
    return np.outer(psi, psi.conj())


def bell_state(k: int) -> np.ndarray:
    if k not in (0, 1, 2, 3):
        raise IndexOutOfRange(f"Bell index must be 0..3, got {k}")
    return projector(BELL_VECTORS[k])


def plus_minus_state(s1: int, s2: int) -> np.ndarray:
    """|s1 s2><s1 s2| for sigma_x eigenstates; ``s1``, ``s2`` are +1 or -1."""
    for s in (s1, s2):
        if s not in (1, -1):
            raise DomainError(f"sign must be +1 or -1, got {s}")
    a = np.array([1, s1], dtype=complex) * _S
    b = np.array([1, s2], dtype=complex) * _S
    return projector(np.kron(a, b))


def ginibre(dim: int, gen: np.random.Generator) -> np.ndarray:
    return (gen.standard_normal((dim, dim)) + 1j * gen.standard_normal((dim, dim))) / np.sqrt(2.0)


def haar_unitary(dim: int, rng) -> np.ndarray:
    """Haar-random unitary from the QR decomposition of a complex Ginibre matrix."""
    if dim not in (2, 4):
        raise DomainError(f"dim must be 2 or 4, got {dim}")
    q, r = np.linalg.qr(ginibre(dim, _as_generator(rng)))
    d = np.diag(r)
    return q * (d / np.abs(d))


def haar_pure_vector(dim: int, gen: np.random.Generator) -> np.ndarray:
    v = gen.standard_normal(dim) + 1j * gen.standard_normal(dim)
    return v / np.linalg.norm(v)


def sample_state(kind: str, rng) -> np.ndarray:
    """Draw a two-qubit density matrix from one of the named ensembles."""
    gen = _as_generator(rng)
    if kind == "pure":
        return projector(haar_pure_vector(4, gen))
    if kind == "mixed_ginibre":
        g = ginibre(4, gen)
        m = g @ dagger(g)
        return m / np.trace(m).real
    if kind == "product":
        return projector(np.kron(haar_pure_vector(2, gen), haar_pure_vector(2, gen)))
    if kind == "max_entangled_lu":
        u = np.kron(haar_unitary(2, gen), haar_unitary(2, gen))
        return u @ bell_state(0) @ dagger(u)
    if kind == "bell":
        return bell_state(int(gen.integers(4)))
    raise DomainError(f"unknown state kind {kind!r}; expected one of {STATE_KINDS}")


def partial_trace(rho: np.ndarray, keep: int) -> np.ndarray:
    """Reduced state of qubit ``keep`` (0 = first, 1 = second) of a two-qubit matrix."""
    r = np.asarray(rho).reshape(2, 2, 2, 2)
    if keep == 0:
        return np.einsum("ijkj->ik", r)
    if keep == 1:
        return np.einsum("ijil->jl", r)
    raise IndexOutOfRange(f"keep must be 0 or 1, got {keep}")


class Violation(NamedTuple):
    invariant: str
    magnitude: float


def validate(rho) -> list[Violation]:
    """Check the density-matrix invariants. An empty list means the state is valid."""
    rho = np.asarray(rho, dtype=complex)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1] or rho.shape[0] not in (2, 4):
        return [Violation("shape", float("inf"))]
    if not np.all(np.isfinite(rho)):
        return [Violation("finite", float("inf"))]
    out = []
    herm = hermiticity_defect(rho)
    if herm > HERMITIAN_TOL:
        out.append(Violation("hermitian", herm))
    tr = abs(np.trace(rho) - 1.0)
    if tr > TRACE_TOL:
        out.append(Violation("trace", float(tr)))
    lowest = float(np.linalg.eigvalsh(0.5 * (rho + dagger(rho)))[0])
    if lowest < -PSD_TOL:
        out.append(Violation("psd", -lowest))
    return out
