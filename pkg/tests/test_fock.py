import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from momentppt.errors import DegenerateState, TruncationTooSevere
from momentppt.fock import (
    CoherentSuperposition,
    FockSuperposition,
    TruncatedDensityMatrix,
    adequate_cutoff,
    apply_operator,
    basis_index,
    coherent_fock_amplitudes,
    coherent_overlap,
    ladder_matrix,
    make_coherent_bell,
    make_singlet,
    parse_word,
    to_density_matrix,
    word_matrix,
)


def fock_vec(n_a, n_b, n_max_a, n_max_b):
    v = np.zeros((n_max_a + 1) * (n_max_b + 1), dtype=complex)
    v[basis_index(n_a, n_b, n_max_b)] = 1
    return v


def test_singlet_terms():
    s = make_singlet()
    assert s.terms == pytest.approx([(1 / math.sqrt(2), 0, 1), (-1 / math.sqrt(2), 1, 0)])
    assert s.norm() == pytest.approx(1, abs=1e-12)
    assert s.norm_sq == 2
    assert s.amplitude(0, 0) == 0


def test_fock_rejects_duplicates_and_zero():
    with pytest.raises(ValueError):
        FockSuperposition([(1, 0, 1), (2, 0, 1)])
    with pytest.raises(DegenerateState):
        FockSuperposition([(0, 0, 1)])


def test_coherent_bell_normalization_against_fock_vectors():
    # oracle: build |1,1> and |-1,-1> from Poisson amplitudes directly
    cutoff = 40
    amp = np.array([math.exp(-0.5) / math.sqrt(math.factorial(n)) for n in range(cutoff + 1)])
    plus = np.kron(amp, amp)
    minus = np.kron(amp * (-1.0) ** np.arange(cutoff + 1), amp * (-1.0) ** np.arange(cutoff + 1))
    c_oracle = 1 / np.linalg.norm(plus - minus)
    state = make_coherent_bell(1, 1)
    assert state.normalization == pytest.approx(c_oracle, rel=1e-12)
    assert state.normalization == pytest.approx((2 - 2 * math.exp(-4)) ** -0.5, rel=1e-14)


def test_coherent_bell_degenerate():
    with pytest.raises(DegenerateState):
        make_coherent_bell(0, 0)


@settings(max_examples=40, deadline=None)
@given(
    st.complex_numbers(max_magnitude=2, allow_nan=False, allow_infinity=False),
    st.complex_numbers(max_magnitude=2, allow_nan=False, allow_infinity=False),
)
def test_coherent_bell_norm_is_one(alpha, beta):
    if abs(alpha) ** 2 + abs(beta) ** 2 < 1e-3:
        return
    assert make_coherent_bell(alpha, beta).norm() == pytest.approx(1, abs=1e-12)


@pytest.mark.parametrize("alpha", [0.3, 1.0, 1 + 1j, -1.5j])
def test_coherent_overlap_matches_truncated(alpha):
    cutoff = adequate_cutoff(abs(alpha))
    analytic = coherent_overlap(alpha, -alpha)
    numeric = np.vdot(coherent_fock_amplitudes(alpha, cutoff), coherent_fock_amplitudes(-alpha, cutoff))
    assert abs(analytic - numeric) < 1e-9


def test_singlet_density_matrix_exact():
    rho = to_density_matrix(make_singlet(), 1, 1)
    expected = [[0, 0, 0, 0], [0, Fraction(1, 2), Fraction(-1, 2), 0], [0, Fraction(-1, 2), Fraction(1, 2), 0], [0, 0, 0, 0]]
    assert [[v for v in row] for row in rho.exact_entries] == expected
    assert np.linalg.matrix_rank(rho.entries) == 1
    assert rho.discarded_weight == 0


def test_singlet_density_matrix_all_discarded():
    with pytest.raises(TruncationTooSevere):
        to_density_matrix(make_singlet(), 0, 0)


def test_coherent_bell_truncation_weight():
    state = make_coherent_bell(1, 1)
    assert state.adequate_cutoffs() == (19, 19)
    rho = to_density_matrix(state, 19, 19)
    assert rho.discarded_weight <= 1e-12
    # below the adequacy rule: refused, and the tail really is above 1e-12
    with pytest.raises(TruncationTooSevere):
        to_density_matrix(state, 12, 12)
    _, discarded = state.vector(12, 12)
    assert discarded > 1e-12


def test_density_matrix_validation():
    with pytest.raises(ValueError):
        TruncatedDensityMatrix(np.array([[1, 1], [0, 0]]), 1, 0)
    with pytest.raises(ValueError):
        TruncatedDensityMatrix(np.diag([0.5, 0.4]), 1, 0)
    with pytest.raises(ValueError):
        TruncatedDensityMatrix(np.diag([1.5, -0.5]), 1, 0)
    with pytest.raises(DegenerateState):
        TruncatedDensityMatrix.from_matrix([[0, 0], [0, 0]], 1, 0)


def test_density_from_matrix_renormalizes():
    rho = TruncatedDensityMatrix.from_matrix([["2", "0"], ["0", "2"]], 1, 0)
    assert rho.exact_entries[0, 0] == Fraction(1, 2)
    assert rho.max_occupation == (1, 0)


@pytest.mark.parametrize("cutoff", [0, 1, 4, 9])
def test_ladder_adjointness_exact(cutoff):
    a = ladder_matrix("a", False, cutoff)
    ad = ladder_matrix("a", True, cutoff)
    assert np.array_equal(ad.entries, a.entries.conj().T)
    assert ad == a.adjoint()


@pytest.mark.parametrize("cutoff", [1, 5, 12])
def test_number_operator_exact(cutoff):
    # (a† a)[m, n] = sum_k sqrt(R†[m,k] R[k,n]); one k contributes, and its product is a perfect square
    rd = ladder_matrix("a", True, cutoff).radicands
    ra = ladder_matrix("a", False, cutoff).radicands
    for m in range(cutoff + 1):
        for n in range(cutoff + 1):
            products = [int(rd[m, k]) * int(ra[k, n]) for k in range(cutoff + 1) if rd[m, k] and ra[k, n]]
            value = sum(math.isqrt(p) for p in products)
            assert all(math.isqrt(p) ** 2 == p for p in products)
            assert value == (m if m == n else 0)


@pytest.mark.parametrize("cutoff", [1, 3, 8])
def test_commutator_identity_below_cutoff(cutoff):
    a = ladder_matrix("b", False, cutoff).entries
    comm = a @ a.T - a.T @ a
    np.testing.assert_allclose(comm[:cutoff, :cutoff], np.eye(cutoff), atol=1e-12)
    assert comm[cutoff, cutoff] == pytest.approx(-cutoff)


def test_parse_word():
    assert parse_word("a† b") == [("a", True), ("b", False)]
    assert parse_word("a†b") == parse_word("a+ b") == parse_word("adag b")
    assert parse_word("b†^2 a") == [("b", True), ("b", True), ("a", False)]
    assert parse_word("1") == []
    with pytest.raises(ValueError):
        parse_word("c")


def test_apply_operator_examples():
    out = apply_operator(fock_vec(0, 1, 2, 2), ["a† b"], 2, 2)
    np.testing.assert_allclose(out.vector, fock_vec(1, 0, 2, 2))
    assert out.leakage == 0
    out = apply_operator(fock_vec(0, 0, 2, 2), ["a"], 2, 2)
    assert not out.vector.any()
    out = apply_operator(fock_vec(1, 1, 2, 2), ["a† a", "b† b"], 2, 2)
    np.testing.assert_allclose(out.vector, fock_vec(1, 1, 2, 2))


def test_apply_operator_leakage():
    out = apply_operator(fock_vec(1, 0, 1, 1), ["a†"], 1, 1)
    assert not out.vector.any()
    assert out.leakage == pytest.approx(math.sqrt(2))


def test_word_matrix_matches_apply_operator():
    rng = np.random.default_rng(3)
    psi = rng.normal(size=16) + 1j * rng.normal(size=16)
    psi.reshape(4, 4)[3, :] = 0
    psi.reshape(4, 4)[:, 3] = 0
    mat = word_matrix(parse_word("a† b a b†"), 3, 3)
    np.testing.assert_allclose(mat @ psi, apply_operator(psi, "a† b a b†", 3, 3).vector, atol=1e-12)


def test_coherent_superposition_requires_terms():
    with pytest.raises(DegenerateState):
        CoherentSuperposition([])
    with pytest.raises(DegenerateState):
        CoherentSuperposition([(1, 0.5, 0.5), (-1, 0.5, 0.5)])
