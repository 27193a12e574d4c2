"""Non-Markovianity witnesses: trace distance and concurrence trajectories,
their positive-increment integrals, revival detection, and the maximizations
over candidate initial states.
"""
from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Iterable, Sequence

import numpy as np

from . import states as st
from .channels import DephasingParams, evolution_matrix, phi
from .errors import DimensionMismatch, DomainError, NegativeSpectrum
from .linalg import SIGMA0, SIGMA2, SIGMA3, dagger, trace_norm, trace_norm_batch

REVIVAL_EPS = 1e-12
NEGATIVE_SPECTRUM_TOL = 1e-8
TIE_TOL = 1e-12

YY = np.kron(SIGMA2, SIGMA2)


@dataclass(frozen=True)
class TimeGrid:
    """Uniform grid of ``steps`` points on [0, nu_max]."""

    nu_max: float = 40.0
    steps: int = 20000

    def __post_init__(self):
        if not self.nu_max > 0:
            raise DomainError(f"nu_max must be > 0, got {self.nu_max}")
        if self.steps < 2:
            raise DomainError(f"steps must be >= 2, got {self.steps}")

    @property
    def nus(self) -> np.ndarray:
        return np.linspace(0.0, self.nu_max, self.steps)

    @property
    def spacing(self) -> float:
        return self.nu_max / (self.steps - 1)

    def as_dict(self) -> dict:
        return {"nu_max": self.nu_max, "steps": self.steps}


@dataclass(frozen=True)
class TimeSeries:
    nus: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        nus = np.asarray(self.nus, dtype=float)
        values = np.asarray(self.values, dtype=float)
        if nus.shape != values.shape or nus.ndim != 1:
            raise DimensionMismatch(f"nus {nus.shape} and values {values.shape} must be equal 1-d")
        if np.any(np.diff(nus) <= 0):
            raise DomainError("nus must be strictly increasing")
        if not np.all(np.isfinite(values)):
            raise DomainError("values must be finite")
        object.__setattr__(self, "nus", nus)
        object.__setattr__(self, "values", values)


@dataclass(frozen=True)
class Candidate:
    """An initial state (or state pair) with a record of where it came from."""

    descriptor: dict
    state: Any


@dataclass(frozen=True)
class MeasureResult:
    value: float
    argmax_descriptor: dict
    grid: TimeGrid
    values: np.ndarray = field(repr=False, compare=False, default=None)


def trace_distance(rho1, rho2) -> float:
    rho1 = np.asarray(rho1, dtype=complex)
    rho2 = np.asarray(rho2, dtype=complex)
    if rho1.shape != rho2.shape:
        raise DimensionMismatch(f"shapes {rho1.shape} and {rho2.shape} differ")
    return 0.5 * trace_norm(rho1 - rho2)


def trace_distance_batch(delta: np.ndarray) -> np.ndarray:
    """Half the trace norm of each matrix in a stack of state differences."""
    return 0.5 * trace_norm_batch(delta)


def _concurrence_from_factor(w: np.ndarray) -> np.ndarray:
    """Concurrence of rho = w w^dagger for a stack of factors ``w`` of shape (..., 4, k).

    sqrt(lambda_i) for R = rho (Y(x)Y) rho* (Y(x)Y) are the singular values of
    w^T (Y(x)Y) w, so no square root of a rounding-level eigenvalue is taken.
    """
    t = np.swapaxes(w, -1, -2) @ YY @ w
    s = np.linalg.svd(t, compute_uv=False)
    if s.shape[-1] < 4:
        s = np.concatenate([s, np.zeros(s.shape[:-1] + (4 - s.shape[-1],))], axis=-1)
    return np.maximum(0.0, s[..., 0] - s[..., 1] - s[..., 2] - s[..., 3])


def concurrence_batch(rho: np.ndarray) -> np.ndarray:
    rho = np.asarray(rho, dtype=complex)
    rho = 0.5 * (rho + dagger(rho))
    w, v = np.linalg.eigh(rho)
    if np.any(w < -NEGATIVE_SPECTRUM_TOL):
        raise NegativeSpectrum(f"state has eigenvalue {w.min():.3e} below -{NEGATIVE_SPECTRUM_TOL:.0e}")
    return _concurrence_from_factor(v * np.sqrt(np.clip(w, 0.0, None))[..., None, :])


def concurrence(rho) -> float:
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (4, 4):
        raise DimensionMismatch(f"concurrence needs a 4x4 state, got {rho.shape}")
    return float(concurrence_batch(rho[None])[0])


def positive_increment_sum(series: TimeSeries, eps: float = 0.0) -> float:
    """Sum of the increments of ``series`` that exceed ``eps``."""
    d = np.diff(series.values)
    return float(np.sum(d[d > eps]))


def revival_intervals(series: TimeSeries, eps: float = REVIVAL_EPS) -> list[tuple[float, float]]:
    """Maximal runs of increments above ``eps``, as (nu_start, nu_end) pairs."""
    if not eps > 0:
        raise DomainError(f"eps must be > 0, got {eps}")
    up = np.diff(series.values) > eps
    if not up.any():
        return []
    edges = np.diff(np.concatenate(([0], up.astype(np.int8), [0])))
    starts = np.flatnonzero(edges == 1)
    ends = np.flatnonzero(edges == -1)
    return [(float(series.nus[a]), float(series.nus[b])) for a, b in zip(starts, ends)]


# Kraus operators of the dephasing pair channel, ordered to match dephasing_weights().
_DEPHASING_KRAUS = tuple(np.kron(a, b) for a, b in ((SIGMA0, SIGMA0), (SIGMA0, SIGMA3), (SIGMA3, SIGMA0), (SIGMA3, SIGMA3)))
_PURE_TOL = 1e-14


def dephasing_weights(nus, params: DephasingParams, mu: float) -> np.ndarray:
    """Columns p00, p03, p30, p33 of the joint kernel along ``nus``."""
    f = np.asarray(phi(nus, params))
    q0 = 0.5 * (1 + f)
    q3 = 0.5 * (1 - f)
    cross = (1 - mu) * q0 * q3
    return np.stack([(1 - mu) * q0 * q0 + mu * q0, cross, cross, (1 - mu) * q3 * q3 + mu * q3], axis=-1)


def trace_distance_trajectory(rho1, rho2, params: DephasingParams, mu: float):
    """Return ``f(nus)`` giving the trace distance of the evolved pair."""
    delta = np.asarray(rho1, dtype=complex) - np.asarray(rho2, dtype=complex)

    def f(nus):
        return trace_distance_batch(delta * evolution_matrix(nus, params, mu))

    return f


def concurrence_trajectory(rho0, params: DephasingParams, mu: float):
    """Return ``f(nus)`` giving the concurrence of the evolved state.

    A pure ``rho0 = |psi><psi|`` evolves as sum_k p_k K_k rho0 K_k, so
    [sqrt(p_k) K_k psi]_k is an exact factor of the evolved state and only a
    4x4 singular-value problem is needed per time point.
    """
    rho0 = np.asarray(rho0, dtype=complex)
    w, v = np.linalg.eigh(0.5 * (rho0 + dagger(rho0)))
    if np.sum(w > _PURE_TOL * w[-1]) == 1:
        psi = v[:, -1] * np.sqrt(w[-1])
        kpsi = np.stack([k @ psi for k in _DEPHASING_KRAUS])
        block = kpsi @ YY @ kpsi.T

        def f(nus):
            s = np.sqrt(np.clip(dephasing_weights(nus, params, mu), 0.0, None))
            t = s[..., :, None] * s[..., None, :] * block
            sv = np.linalg.svd(t, compute_uv=False)
            return np.maximum(0.0, sv[..., 0] - sv[..., 1] - sv[..., 2] - sv[..., 3])

        return f

    def g(nus):
        return concurrence_batch(rho0 * evolution_matrix(nus, params, mu))

    return g


def trace_distance_series(rho1, rho2, params: DephasingParams, mu: float, grid: TimeGrid) -> TimeSeries:
    return TimeSeries(grid.nus, trace_distance_trajectory(rho1, rho2, params, mu)(grid.nus))


def concurrence_series(rho0, params: DephasingParams, mu: float, grid: TimeGrid) -> TimeSeries:
    return TimeSeries(grid.nus, concurrence_trajectory(rho0, params, mu)(grid.nus))


_GOLDEN = (np.sqrt(5.0) - 1.0) / 2.0
REFINE_ITERATIONS = 60


def refine_extrema(series: TimeSeries, f, eps: float = REVIVAL_EPS, iterations: int = REFINE_ITERATIONS) -> TimeSeries:
    """Replace each sampled interior extremum by the true extremum of ``f``.

    A sampled local max (min) at index k brackets the true one in
    [nus[k-1], nus[k+1]]; a batched golden-section search locates it. Only
    extrema with an adjacent increment above ``eps`` are touched, so
    rounding-level wiggles are left alone. Monotone runs between extrema keep
    their signs, so ``positive_increment_sum`` of the result measures the
    revivals without the grid's clipping of peaks and troughs.
    """
    v = series.values
    d = np.diff(v)
    if d.size < 2:
        return series
    left, right = d[:-1], d[1:]
    peak = (left > 0) & (right < 0)
    trough = (left < 0) & (right > 0)
    big = np.maximum(np.abs(left), np.abs(right)) > eps
    idx = np.flatnonzero((peak | trough) & big) + 1
    if idx.size == 0:
        return series
    sign = np.where(peak[idx - 1], 1.0, -1.0)
    a = series.nus[idx - 1].copy()
    b = series.nus[idx + 1].copy()
    x1 = b - _GOLDEN * (b - a)
    x2 = a + _GOLDEN * (b - a)
    f1 = sign * f(x1)
    f2 = sign * f(x2)
    for _ in range(iterations):
        right = f1 < f2
        a = np.where(right, x1, a)
        b = np.where(right, b, x2)
        new = np.where(right, a + _GOLDEN * (b - a), b - _GOLDEN * (b - a))
        fn = sign * f(new)
        x1, x2 = np.where(right, x2, new), np.where(right, new, x1)
        f1, f2 = np.where(right, f2, fn), np.where(right, fn, f1)
    best = np.maximum(f1, f2)
    out = v.copy()
    out[idx] = sign * np.maximum(sign * v[idx], best)
    return TimeSeries(series.nus, out)


def thread_count() -> int:
    raw = os.environ.get("MEMCHAN_THREADS")
    if raw is None:
        return 1
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def _as_candidates(source: Iterable) -> list[Candidate]:
    out = []
    for i, item in enumerate(source):
        out.append(item if isinstance(item, Candidate) else Candidate({"index": i}, item))
    if not out:
        raise DomainError("candidate list is empty")
    return out


def _maximize(cands: list[Candidate], score, grid: TimeGrid) -> MeasureResult:
    n = thread_count()
    if n > 1 and len(cands) > 1:
        with ThreadPoolExecutor(max_workers=n) as pool:
            values = np.array(list(pool.map(score, cands)))
    else:
        values = np.array([score(c) for c in cands])
    # Values within TIE_TOL of the maximum tie; the earliest candidate wins.
    best = int(np.flatnonzero(values >= values.max() - TIE_TOL)[0])
    return MeasureResult(float(values[best]), dict(cands[best].descriptor), grid, values)


def revival_sum(series: TimeSeries, f=None) -> float:
    """Positive-increment sum, with sampled extrema refined against ``f`` when given.

    Increments at or below REVIVAL_EPS count as flat, so rounding noise on a
    frozen trajectory does not accumulate over long grids.
    """
    if f is not None:
        series = refine_extrema(series, f)
    return positive_increment_sum(series, REVIVAL_EPS)


def blp_measure(
    pairs: Sequence, params: DephasingParams, mu: float, grid: TimeGrid = TimeGrid(), refine: bool = True
) -> MeasureResult:
    """Largest total increase of the trace distance over the candidate pairs."""
    cands = _as_candidates(pairs)
    m = evolution_matrix(grid.nus, params, mu)

    def score(c: Candidate) -> float:
        rho1, rho2 = c.state
        delta = np.asarray(rho1, dtype=complex) - np.asarray(rho2, dtype=complex)
        series = TimeSeries(grid.nus, trace_distance_batch(delta * m))
        return revival_sum(series, trace_distance_trajectory(rho1, rho2, params, mu) if refine else None)

    return _maximize(cands, score, grid)


def entanglement_measure(
    states: Sequence, params: DephasingParams, mu: float, grid: TimeGrid = TimeGrid(), refine: bool = True
) -> MeasureResult:
    """Largest total increase of the concurrence over the candidate states."""
    cands = _as_candidates(states)

    def score(c: Candidate) -> float:
        f = concurrence_trajectory(c.state, params, mu)
        return revival_sum(TimeSeries(grid.nus, f(grid.nus)), f if refine else None)

    return _maximize(cands, score, grid)


def optimal_pair() -> tuple[np.ndarray, np.ndarray]:
    return st.plus_minus_state(1, 1), st.plus_minus_state(-1, -1)


PAIR_FAMILIES = ("pure", "mixed_ginibre", "product", "max_entangled_lu", "pure_mixed")


def structured_pairs() -> list[Candidate]:
    pp, mm = optimal_pair()
    out = [
        Candidate({"family": "plus_minus", "name": "++/--"}, (pp, mm)),
        Candidate({"family": "plus_minus", "name": "+-/-+"}, (st.plus_minus_state(1, -1), st.plus_minus_state(-1, 1))),
    ]
    for a, b in ((0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)):
        out.append(
            Candidate(
                {"family": "bell", "name": f"{st.BELL_NAMES[a]}/{st.BELL_NAMES[b]}"},
                (st.bell_state(a), st.bell_state(b)),
            )
        )
    # Antipodal product pairs: |n n> vs |-n -n> for n along x, y, z.
    axes = {
        "x": (np.array([1, 1]) / np.sqrt(2), np.array([1, -1]) / np.sqrt(2)),
        "y": (np.array([1, 1j]) / np.sqrt(2), np.array([1, -1j]) / np.sqrt(2)),
        "z": (np.array([1, 0]), np.array([0, 1])),
    }
    for name, (up, down) in axes.items():
        out.append(
            Candidate(
                {"family": "antipodal_product", "name": f"{name}{name}"},
                (st.projector(np.kron(up, up)), st.projector(np.kron(down, down))),
            )
        )
    return out


def random_pairs(seed: int, samples: int) -> list[Candidate]:
    """``samples`` seeded pairs, cycling through :data:`PAIR_FAMILIES`.

    Pair ``i`` draws both states from stream ``i`` of ``seed``.
    """
    out = []
    for i in range(samples):
        family = PAIR_FAMILIES[i % len(PAIR_FAMILIES)]
        gen = st.RngStream(seed, i).generator()
        if family == "pure_mixed":
            pair = (st.sample_state("pure", gen), st.sample_state("mixed_ginibre", gen))
        else:
            pair = (st.sample_state(family, gen), st.sample_state(family, gen))
        out.append(Candidate({"family": family, "master_seed": seed, "stream_index": i}, pair))
    return out


def pair_library(seed: int, samples: int) -> list[Candidate]:
    return structured_pairs() + random_pairs(seed, samples)


def lu_orbit_ensemble(seed: int, samples: int, include_bell: bool = True) -> list[Candidate]:
    """Bell states followed by ``samples`` seeded local-unitary rotations of Phi+."""
    out = []
    if include_bell:
        out += [Candidate({"family": "bell", "name": st.BELL_NAMES[k]}, st.bell_state(k)) for k in range(4)]
    for i in range(samples):
        rho = st.sample_state("max_entangled_lu", st.RngStream(seed, i))
        out.append(Candidate({"family": "max_entangled_lu", "master_seed": seed, "stream_index": i}, rho))
    return out


MEASURES = ("blp", "ent")


def measure_sweep(
    measure: str,
    mu_grid: Sequence[float],
    source: Sequence,
    params: DephasingParams,
    grid: TimeGrid = TimeGrid(),
    refine: bool = True,
) -> list[tuple[float, MeasureResult]]:
    """Evaluate one measure at every ``mu`` against the same candidate list."""
    if measure == "blp":
        fn = blp_measure
    elif measure in ("ent", "entanglement"):
        fn = entanglement_measure
    else:
        raise DomainError(f"unknown measure {measure!r}")
    for mu in mu_grid:
        if not 0.0 <= mu <= 1.0:
            raise DomainError(f"mu must lie in [0, 1], got {mu}")
    cands = _as_candidates(source)
    return [(float(mu), fn(cands, params, float(mu), grid, refine)) for mu in mu_grid]
