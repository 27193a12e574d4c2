"""Random-telegraph dephasing and its classically correlated two-use extension.

A single use is the Pauli channel ``rho -> sum_i q_i s_i rho s_i``. Two uses are
joined by the kernel ``p_ij = (1 - mu) q_i q_j + mu q_i delta_ij``, so ``mu = 0``
is two independent uses and ``mu = 1`` repeats the same Pauli on both qubits.
For dephasing (q_1 = q_2 = 0) the two-qubit evolution reduces to a Hadamard
product with a fixed multiplier matrix; see :func:`evolution_matrix`.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionMismatch, DomainError
from .linalg import PAULIS, dagger

PROB_TOL = 1e-12
CPTP_TOL = 1e-10


@dataclass(frozen=True)
class DephasingParams:
    """Telegraph-noise correlation time ``tau`` (coupling fixed to 1)."""

    tau: float = 1.0

    def __post_init__(self):
        if not (np.isfinite(self.tau) and self.tau > 0):
            raise DomainError(f"tau must be > 0, got {self.tau}")

    @property
    def u(self) -> complex:
        """sqrt((4 tau)^2 - 1); imaginary below tau = 1/4."""
        return np.sqrt(complex((4.0 * self.tau) ** 2 - 1.0))


@dataclass(frozen=True)
class PauliProbabilities:
    q: tuple[float, float, float, float]

    def __post_init__(self):
        q = np.asarray(self.q, dtype=float)
        if q.shape != (4,):
            raise DimensionMismatch(f"need 4 probabilities, got {q.shape}")
        if np.any(q < -PROB_TOL) or np.any(q > 1 + PROB_TOL) or abs(q.sum() - 1) > PROB_TOL:
            raise DomainError(f"not a probability vector: {tuple(q)}")
        object.__setattr__(self, "q", tuple(float(x) for x in q))

    def as_array(self) -> np.ndarray:
        return np.array(self.q)


@dataclass(frozen=True)
class CorrelatedMapSpec:
    """Joint Pauli probabilities ``p[i, j]`` for the pair (sigma_i on qubit 1, sigma_j on qubit 2)."""

    p: np.ndarray
    mu: float | None = None
    q: PauliProbabilities | None = field(default=None, compare=False)

    def __post_init__(self):
        p = np.array(self.p, dtype=float)
        if p.shape != (4, 4):
            raise DimensionMismatch(f"joint distribution must be 4x4, got {p.shape}")
        if np.any(p < -PROB_TOL) or abs(p.sum() - 1) > PROB_TOL:
            raise DomainError("joint probabilities must be non-negative and sum to 1")
        if self.q is not None and np.max(np.abs(p.sum(axis=1) - self.q.as_array())) > PROB_TOL:
            raise DomainError("row marginals of p do not match q")
        p.setflags(write=False)
        object.__setattr__(self, "p", p)


def phi(nu, params: DephasingParams):
    """Coherence factor of the telegraph dephasing at scaled time ``nu``.

    Oscillatory for tau > 1/4, the hyperbolic continuation for tau < 1/4 and
    ``exp(-nu) (1 + nu)`` at tau = 1/4. Accepts scalars or arrays.
    """
    nu_arr = np.asarray(nu, dtype=float)
    if np.any(nu_arr < 0) or not np.all(np.isfinite(nu_arr)):
        raise DomainError("nu must be finite and >= 0")
    x = (4.0 * params.tau) ** 2 - 1.0
    if x > 0:
        u = np.sqrt(x)
        out = np.exp(-nu_arr) * (np.cos(u * nu_arr) + np.sin(u * nu_arr) / u)
    elif x < 0:
        w = np.sqrt(-x)
        # exp(-nu)[cosh(w nu) + sinh(w nu)/w] split into two decaying exponentials.
        out = 0.5 * ((1 + 1 / w) * np.exp(-(1 - w) * nu_arr) + (1 - 1 / w) * np.exp(-(1 + w) * nu_arr))
    else:
        out = np.exp(-nu_arr) * (1.0 + nu_arr)
    return float(out) if out.ndim == 0 else out


def pauli_probs(nu: float, params: DephasingParams) -> PauliProbabilities:
    f = phi(nu, params)
    return PauliProbabilities((0.5 * (1 + f), 0.0, 0.0, 0.5 * (1 - f)))


def joint_probs(q: PauliProbabilities, mu: float) -> CorrelatedMapSpec:
    if not 0.0 <= mu <= 1.0:
        raise DomainError(f"mu must lie in [0, 1], got {mu}")
    qa = q.as_array()
    p = (1 - mu) * np.outer(qa, qa) + mu * np.diag(qa)
    return CorrelatedMapSpec(p=p, mu=mu, q=q)


def dephasing_spec(nu: float, params: DephasingParams, mu: float) -> CorrelatedMapSpec:
    return joint_probs(pauli_probs(nu, params), mu)


def gamma(nu, params: DephasingParams, mu: float):
    """Anti-diagonal multiplier (1 - mu) phi^2 + mu."""
    if not 0.0 <= mu <= 1.0:
        raise DomainError(f"mu must lie in [0, 1], got {mu}")
    f = phi(nu, params)
    return (1 - mu) * f * f + mu


def apply_single_qubit(rho, q: PauliProbabilities) -> np.ndarray:
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (2, 2):
        raise DimensionMismatch(f"expected a 2x2 state, got {rho.shape}")
    out = sum(qi * s @ rho @ s for qi, s in zip(q.q, PAULIS) if qi != 0.0)
    return 0.5 * (out + dagger(out))


def _pauli_pair_sum(x: np.ndarray, spec: CorrelatedMapSpec) -> np.ndarray:
    out = np.zeros((4, 4), dtype=complex)
    for i in range(4):
        for j in range(4):
            if spec.p[i, j] != 0.0:
                k = np.kron(PAULIS[i], PAULIS[j])
                out += spec.p[i, j] * k @ x @ k
    return out


def apply_two_qubit(rho, spec: CorrelatedMapSpec) -> np.ndarray:
    """Kraus sum over all 16 Pauli pairs weighted by ``spec.p``."""
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (4, 4):
        raise DimensionMismatch(f"expected a 4x4 state, got {rho.shape}")
    out = _pauli_pair_sum(rho, spec)
    return 0.5 * (out + dagger(out))


# Basis-index pairs (|00>,|01>,|10>,|11>) where exactly one qubit flips, and where both do.
_SINGLE_FLIP = ((0, 1), (0, 2), (1, 3), (2, 3))
_DOUBLE_FLIP = ((0, 3), (1, 2))


def evolution_matrix(nu, params: DephasingParams, mu: float) -> np.ndarray:
    """Hadamard multiplier M(nu, mu): ones on the diagonal, phi on single-flip
    coherences, gamma on the anti-diagonal. Shape (4, 4) or (len(nu), 4, 4)."""
    f = np.asarray(phi(nu, params))
    g = (1 - mu) * f * f + mu
    m = np.ones(f.shape + (4, 4))
    for a, b in _SINGLE_FLIP:
        m[..., a, b] = m[..., b, a] = f
    for a, b in _DOUBLE_FLIP:
        m[..., a, b] = m[..., b, a] = g
    return m


def evolve_closed_form(rho0, nu, params: DephasingParams, mu: float) -> np.ndarray:
    """rho(nu) = rho0 o M(nu, mu). Vectorized over an array of ``nu``."""
    if not 0.0 <= mu <= 1.0:
        raise DomainError(f"mu must lie in [0, 1], got {mu}")
    rho0 = np.asarray(rho0, dtype=complex)
    if rho0.shape[-2:] != (4, 4):
        raise DimensionMismatch(f"expected a 4x4 state, got {rho0.shape}")
    return rho0 * evolution_matrix(nu, params, mu)


def maximally_entangled_vector(d: int) -> np.ndarray:
    return np.eye(d, dtype=complex).reshape(-1) / np.sqrt(d)


def choi_matrix(spec: CorrelatedMapSpec) -> np.ndarray:
    """(I (x) E)(|Omega><Omega|) with |Omega> = sum_i |ii>/2 over the 4-dim input."""
    d = 4
    choi = np.zeros((d, d, d, d), dtype=complex)
    for a in range(d):
        for b in range(d):
            unit = np.zeros((d, d), dtype=complex)
            unit[a, b] = 1.0
            choi[a, :, b, :] = _pauli_pair_sum(unit, spec) / d
    return choi.reshape(d * d, d * d)


def choi_partial_trace_output(choi: np.ndarray, d: int = 4) -> np.ndarray:
    """Trace out the channel output; equals I/d for trace-preserving maps."""
    return np.einsum("aibi->ab", choi.reshape(d, d, d, d))


@dataclass(frozen=True)
class CptpReport:
    min_eigenvalue: float
    trace_preservation_error: float

    @property
    def ok(self) -> bool:
        return self.min_eigenvalue >= -CPTP_TOL and self.trace_preservation_error <= PROB_TOL


def certify_cptp(spec: CorrelatedMapSpec) -> CptpReport:
    choi = choi_matrix(spec)
    w = np.linalg.eigvalsh(0.5 * (choi + dagger(choi)))
    tp = np.max(np.abs(choi_partial_trace_output(choi) - np.eye(4) / 4))
    return CptpReport(float(w[0]), float(tp))
