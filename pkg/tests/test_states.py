import numpy as np
import pytest

from memchan import states as st
from memchan.errors import DomainError, IndexOutOfRange
from memchan.measures import concurrence


def test_bell_phi_plus_entries():
    b = st.bell_state(0)
    expected = np.zeros((4, 4))
    expected[np.ix_([0, 3], [0, 3])] = 0.5
    assert np.allclose(b, expected, atol=1e-15)


@pytest.mark.parametrize("k", range(4))
def test_bell_states_valid_and_maximally_entangled(k):
    b = st.bell_state(k)
    assert st.validate(b) == []
    assert concurrence(b) == pytest.approx(1.0, abs=1e-12)


def test_bell_index_out_of_range():
    with pytest.raises(IndexOutOfRange):
        st.bell_state(4)


def test_plus_minus_matrix_pattern():
    assert np.allclose(st.plus_minus_state(1, 1), np.full((4, 4), 0.25))
    signs = np.array([1, -1, -1, 1])
    assert np.allclose(st.plus_minus_state(-1, -1), 0.25 * np.outer(signs, signs))
    for s1 in (1, -1):
        for s2 in (1, -1):
            rho = st.plus_minus_state(s1, s2)
            assert np.abs(rho.imag).max() == 0
            assert concurrence(rho) < 1e-12
    with pytest.raises(DomainError):
        st.plus_minus_state(0, 1)


@pytest.mark.parametrize("dim", [2, 4])
def test_haar_unitary_is_unitary(dim):
    for i in range(50):
        u = st.haar_unitary(dim, st.RngStream(1, i))
        assert np.abs(u.conj().T @ u - np.eye(dim)).max() < 1e-10
        assert abs(abs(np.linalg.det(u)) - 1) < 1e-10


def test_haar_second_moment():
    # Haar oracle: E|U_ij|^2 = 1/dim.
    vals = [abs(st.haar_unitary(2, st.RngStream(7, i))[0, 0]) ** 2 for i in range(10_000)]
    assert abs(np.mean(vals) - 0.5) < 0.02


def test_haar_bad_dim():
    with pytest.raises(DomainError):
        st.haar_unitary(3, st.RngStream(0, 0))


@pytest.mark.parametrize("kind", st.STATE_KINDS)
def test_samplers_always_valid(kind):
    for i in range(10_000):
        assert st.validate(st.sample_state(kind, st.RngStream(11, i))) == []


@pytest.mark.parametrize("kind", st.STATE_KINDS)
def test_sampling_reproducible(kind):
    a = st.sample_state(kind, st.RngStream(5, 3))
    b = st.sample_state(kind, st.RngStream(5, 3))
    c = st.sample_state(kind, st.RngStream(5, 4))
    assert np.array_equal(a, b)
    assert not np.array_equal(a, c) or kind == "bell"


def test_sampled_families_have_expected_entanglement():
    for i in range(200):
        assert concurrence(st.sample_state("bell", st.RngStream(2, i))) == pytest.approx(1.0, abs=1e-10)
        assert concurrence(st.sample_state("product", st.RngStream(2, i))) < 1e-10
        assert concurrence(st.sample_state("max_entangled_lu", st.RngStream(2, i))) == pytest.approx(1.0, abs=1e-10)


def test_lu_orbit_reduced_states_maximally_mixed():
    for i in range(500):
        rho = st.sample_state("max_entangled_lu", st.RngStream(3, i))
        for keep in (0, 1):
            assert np.abs(st.partial_trace(rho, keep) - np.eye(2) / 2).max() < 1e-10


def test_validate_diagnostics():
    assert st.validate(st.bell_state(1)) == []
    [v] = st.validate(np.eye(2))
    assert v.invariant == "trace" and v.magnitude == pytest.approx(1.0)
    bad = np.diag([0.6, 0.5, -0.1, 0.0])
    [v] = st.validate(bad)
    assert v.invariant == "psd" and v.magnitude == pytest.approx(0.1)
    names = {v.invariant for v in st.validate(np.array([[0.5, 1], [0, 0.5]]))}
    assert "hermitian" in names
    assert st.validate(np.eye(3) / 3)[0].invariant == "shape"


def test_rng_accepts_generator():
    gen = np.random.default_rng(0)
    assert st.validate(st.sample_state("pure", gen)) == []
    with pytest.raises(TypeError):
        st.sample_state("pure", 42)
    with pytest.raises(DomainError):
        st.sample_state("nonsense", gen)
