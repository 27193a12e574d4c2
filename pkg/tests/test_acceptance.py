"""End-to-end acceptance checks, one test per criterion.

Each test prints a single ``criterion N: PASS|FAIL`` line with the observed
error and runtime, then asserts.
"""
import time

import numpy as np
import pytest

from memchan import channels as ch
from memchan import cli
from memchan import measures as ms
from memchan import states as st

TAU1 = ch.DephasingParams(1.0)
U = np.sqrt(15.0)
# Geometric series of the revival heights of |phi| and phi^2 at u nu = k pi.
BLP_ORACLE = 1.0 / (np.exp(np.pi / U) - 1.0)
ENT_ORACLE = 1.0 / (np.exp(2.0 * np.pi / U) - 1.0)
MU_SWEEP = (0.0, 0.25, 0.5, 0.75, 1.0)

I2 = np.eye(2)
Z = np.diag([1.0, -1.0])


@pytest.fixture
def report(capsys):
    def emit(n, ok, detail):
        with capsys.disabled():
            print(f"\ncriterion {n}: {'PASS' if ok else 'FAIL'} ({detail})")

    return emit


def four_term_kraus(rho, nu, mu):
    f = np.exp(-nu) * (np.cos(U * nu) + np.sin(U * nu) / U)
    q0, q3 = (1 + f) / 2, (1 - f) / 2
    terms = (
        ((1 - mu) * q0 * q0 + mu * q0, np.kron(I2, I2)),
        ((1 - mu) * q0 * q3, np.kron(I2, Z)),
        ((1 - mu) * q3 * q0, np.kron(Z, I2)),
        ((1 - mu) * q3 * q3 + mu * q3, np.kron(Z, Z)),
    )
    return sum(p * k @ rho @ k for p, k in terms)


def test_criterion_1_optimal_pair_trace_distance(report):
    t0 = time.perf_counter()
    grid = ms.TimeGrid()
    pp, mm = ms.optimal_pair()
    target = np.abs(ch.phi(grid.nus, TAU1))
    err = max(
        np.abs(ms.trace_distance_series(pp, mm, TAU1, mu, grid).values - target).max() for mu in (0.0, 0.5, 1.0)
    )
    elapsed = time.perf_counter() - t0
    ok = err <= 1e-12 and elapsed < 1.0
    report(1, ok, f"max |D - |phi|| = {err:.2e}, {elapsed:.2f} s")
    assert ok


def test_criterion_2_blp_value_and_mu_insensitivity(report):
    t0 = time.perf_counter()
    grid = ms.TimeGrid(40.0, 20000)
    pair = [ms.Candidate({"family": "plus_minus", "name": "++/--"}, ms.optimal_pair())]
    values = np.array([ms.blp_measure(pair, TAU1, mu, grid).value for mu in MU_SWEEP])
    elapsed = time.perf_counter() - t0
    err = np.abs(values - BLP_ORACLE).max()
    spread = np.ptp(values)
    ok = err <= 1e-3 and spread <= 1e-9 and elapsed < 5.0
    report(2, ok, f"BLP = {values[0]:.6f}, |err| = {err:.2e}, spread over mu = {spread:.2e}, {elapsed:.2f} s")
    assert ok


def test_criterion_3_bell_concurrence_law(report):
    t0 = time.perf_counter()
    grid = ms.TimeGrid(40.0, 1000)
    f = ch.phi(grid.nus, TAU1)
    err = 0.0
    frozen = 0.0
    for k in range(4):
        for mu in (0.0, 0.1, 0.5, 1.0):
            c = ms.concurrence_series(st.bell_state(k), TAU1, mu, grid).values
            err = max(err, np.abs(c - ((1 - mu) * f * f + mu)).max())
            if mu == 1.0:
                frozen = max(frozen, np.abs(c - 1.0).max())
    elapsed = time.perf_counter() - t0
    ok = err <= 1e-12 and frozen <= 1e-12 and elapsed < 2.0
    report(3, ok, f"max law deviation = {err:.2e}, max |C - 1| at mu=1 = {frozen:.2e}, {elapsed:.2f} s")
    assert ok


def test_criterion_4_bell_entanglement_measure(report):
    t0 = time.perf_counter()
    bell = [ms.Candidate({"family": "bell", "name": st.BELL_NAMES[k]}, st.bell_state(k)) for k in range(4)]
    res = ms.entanglement_measure(bell, TAU1, 0.0, ms.TimeGrid(40.0, 20000))
    elapsed = time.perf_counter() - t0
    err = abs(res.value - ENT_ORACLE)
    ok = err <= 1e-3 and elapsed < 2.0
    report(4, ok, f"measure = {res.value:.6f}, |err| = {err:.2e}, {elapsed:.2f} s")
    assert ok


@pytest.mark.slow
def test_criterion_5_mu_monotonicity(report):
    t0 = time.perf_counter()
    grid = ms.TimeGrid(20.0, 2001)
    ensemble = ms.lu_orbit_ensemble(42, 500)
    sweep = ms.measure_sweep("ent", MU_SWEEP, ensemble, TAU1, grid)
    elapsed = time.perf_counter() - t0
    maxima = np.array([res.value for _, res in sweep])
    bell = np.array([res.values[:4].max() for _, res in sweep])
    nondecreasing = bool(np.all(np.diff(maxima) >= 0))
    beats_bell = bool(np.all(maxima[1:] > bell[1:]))
    ok = nondecreasing and beats_bell and elapsed < 60.0
    report(
        5,
        ok,
        f"maxima = {np.round(maxima, 6).tolist()}, bell = {np.round(bell, 6).tolist()}, {elapsed:.1f} s",
    )
    assert ok


def test_criterion_6_closed_form_matches_kraus_sum(report):
    t0 = time.perf_counter()
    gen = np.random.default_rng(6)
    points = list(zip(gen.uniform(0, 20, 20), gen.uniform(0, 1, 20)))
    err = 0.0
    for i in range(100):
        rho = st.sample_state(st.STATE_KINDS[i % 4], st.RngStream(6, i))
        for nu, mu in points:
            err = max(err, np.abs(ch.evolve_closed_form(rho, nu, TAU1, mu) - four_term_kraus(rho, nu, mu)).max())
    elapsed = time.perf_counter() - t0
    ok = err <= 1e-12 and elapsed < 2.0
    report(6, ok, f"max entry deviation = {err:.2e} over 2000 evaluations, {elapsed:.2f} s")
    assert ok


def test_criterion_7_cptp_certification(report):
    t0 = time.perf_counter()
    gen = np.random.default_rng(7)
    reports = [
        ch.certify_cptp(ch.dephasing_spec(nu, TAU1, mu))
        for nu, mu in zip(gen.uniform(0, 40, 100), gen.uniform(0, 1, 100))
    ]
    elapsed = time.perf_counter() - t0
    lowest = min(r.min_eigenvalue for r in reports)
    tp = max(r.trace_preservation_error for r in reports)
    ok = lowest >= -1e-10 and tp <= 1e-12 and all(r.ok for r in reports) and elapsed < 2.0
    report(7, ok, f"min Choi eigenvalue = {lowest:.2e}, max TP error = {tp:.2e}, {elapsed:.2f} s")
    assert ok


def _intervals_agree(a, b, step):
    return len(a) == len(b) and all(abs(x0 - y0) <= step and abs(x1 - y1) <= step for (x0, x1), (y0, y1) in zip(a, b))


def test_criterion_8_revival_coincidence(report):
    t0 = time.perf_counter()
    pp, mm = ms.optimal_pair()
    # The default threshold on a 0.01 grid, then a finer threshold on finer grids.
    cases = ((1001, ms.REVIVAL_EPS), (5001, 1e-14), (10001, 1e-14))
    details = []
    ok = True
    for steps, eps in cases:
        grid = ms.TimeGrid(10.0, steps)
        td = ms.revival_intervals(ms.trace_distance_series(pp, mm, TAU1, 0.5, grid), eps)
        conc = ms.revival_intervals(ms.concurrence_series(st.bell_state(0), TAU1, 0.5, grid), eps)
        agree = len(td) > 0 and _intervals_agree(td, conc, grid.spacing)
        ok &= agree
        details.append(f"{steps} pts: {len(td)} intervals {'match' if agree else 'differ'}")
    elapsed = time.perf_counter() - t0
    ok = ok and elapsed < 2.0
    report(8, ok, "; ".join(details) + f", {elapsed:.2f} s")
    assert ok


def test_criterion_9_markovian_contrast(report):
    t0 = time.perf_counter()
    params = ch.DephasingParams(0.1)
    grid = ms.TimeGrid(20.0, 4000)
    pairs = ms.pair_library(9, 25)
    states = ms.lu_orbit_ensemble(9, 10) + [
        ms.Candidate({"kind": kind, "i": i}, st.sample_state(kind, st.RngStream(90, i)))
        for i, kind in enumerate(("pure", "mixed_ginibre", "product") * 4)
    ]
    worst = 0.0
    for mu in (0.0, 0.5, 1.0):
        worst = max(worst, ms.blp_measure(pairs, params, mu, grid).values.max())
        worst = max(worst, ms.entanglement_measure(states, params, mu, grid).values.max())
    elapsed = time.perf_counter() - t0
    ok = worst <= 1e-9 and elapsed < 5.0
    report(9, ok, f"largest measure over {len(pairs)} pairs and {len(states)} states = {worst:.2e}, {elapsed:.2f} s")
    assert ok


def test_criterion_10_determinism(report, tmp_path):
    t0 = time.perf_counter()
    outputs = []
    for run in ("a", "b"):
        out = tmp_path / run / "sweep.csv"
        out.parent.mkdir()
        argv = ["sweep", "--measure", "blp", "--mu-grid", "0:1:0.25", "--samples", "20", "--seed", "42", "--out", str(out)]
        assert cli.main(argv) == 0
        outputs.append((out.read_bytes(), out.with_suffix(".json").read_bytes()))
    elapsed = time.perf_counter() - t0
    ok = outputs[0] == outputs[1] and elapsed < 60.0
    report(10, ok, f"CSV and JSON byte-identical: {outputs[0] == outputs[1]}, {elapsed:.1f} s")
    assert ok
