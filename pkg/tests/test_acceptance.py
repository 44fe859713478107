"""Acceptance gate: one test per criterion, each with its own time limit."""

import itertools
import time
from fractions import Fraction

import numpy as np
import pytest

from momentppt import moments
from momentppt.exact import GaussianRational
from momentppt.fock import (
    TruncatedDensityMatrix,
    make_bell_phi,
    make_coherent_bell,
    make_product_coherent,
    make_singlet,
    to_density_matrix,
)
from momentppt.minors import (
    Sign,
    det_exact_hermitian,
    det_float,
    leading_minor_scan,
    ordering_signature_search,
    principal_minor,
    search_witness,
)
from momentppt.moments import MomentMatrix, build_moment_matrix, cross_validate_backends, monomials, swap_for_partial_transpose
from momentppt.oracle import agreement_audit, oracle_npt, partial_transpose

from randstates import (
    random_coherent_state,
    random_finite_support_state,
    random_fock_state,
    random_hermitian_gaussian_rational,
)


class Timer:
    def __init__(self, limit):
        self.limit = limit

    def __enter__(self):
        moments.clear_moment_cache()
        self.start = time.perf_counter()
        return self

    def __exit__(self, *exc):
        self.elapsed = time.perf_counter() - self.start
        if exc[0] is None:
            assert self.elapsed < self.limit, f"took {self.elapsed:.2f} s, limit {self.limit} s"


@pytest.mark.criterion(1, "singlet minor on {1, a b} is exactly -1/4")
def test_criterion_1_singlet_witness():
    # 2x2 oracle by hand: [[<1>, <b† a>], [<a† b>, <a† a b† b>]] = [[1, -1/2], [-1/2, 0]]
    oracle = det_exact_hermitian([[1, Fraction(-1, 2)], [Fraction(-1, 2), 0]])
    assert oracle == Fraction(-1, 4)
    with Timer(1.0):
        m = build_moment_matrix(make_singlet(), n=15, backend="exact")
        ab = m.ordering.position("a b")
        report = principal_minor(m, (1, ab))
    assert report.exact
    assert report.determinant == oracle


@pytest.mark.criterion(2, "an ordering hides the singlet from every leading minor up to 15")
def test_criterion_2_leading_scan_misses_singlet():
    with Timer(10.0):
        state = make_singlet()
        match = ordering_signature_search(state, "+++++++00000000", backend="exact")
        m = build_moment_matrix(state, match.ordering, 15, backend="exact")
        leading = leading_minor_scan(m)
        witness = search_witness(m, max_cardinality=2)
    assert all(r.exact for r in leading)
    assert not any(r.sign is Sign.NEGATIVE for r in leading)
    assert [r.sign for r in leading[:7]] == [Sign.POSITIVE] * 7
    assert all(r.determinant == 0 for r in leading[7:])
    assert witness.npt and witness.witness_words() == ["1", "a b"]
    assert witness.report.determinant == Fraction(-1, 4)


@pytest.mark.criterion(3, "coherent Bell caught by {1, b, a b}; product state shows no witness")
def test_criterion_3_coherent_bell():
    x = 1 / np.tanh(2)
    analytic = x * (1 - x * x)
    with Timer(5.0):
        m = build_moment_matrix(make_coherent_bell(1, 1), n=15, backend="float")
        pos = [1] + [m.ordering.position(w) for w in ("b", "a b")]
        report = principal_minor(m, sorted(pos))
        product = build_moment_matrix(make_product_coherent(1, 1), n=15, backend="float")
        search = search_witness(product, max_cardinality=3, tol=1e-10)
    assert report.determinant < -1e-6
    assert report.determinant == pytest.approx(analytic, abs=1e-10)
    assert not search.npt
    assert search.examined == 15 + 105 + 455


@pytest.mark.criterion(4, "untransposed moment matrices are positive semidefinite")
def test_criterion_4_gram_positivity():
    rng = np.random.default_rng(2024)
    states = [random_fock_state(rng) for _ in range(25)] + [random_coherent_state(rng) for _ in range(25)]
    with Timer(30.0):
        worst = min(build_moment_matrix(s, n=15, transposed=False).min_eigenvalue() for s in states)
    assert worst >= -1e-10


@pytest.mark.criterion(5, "every moment witness is confirmed by the partial-transpose spectrum")
def test_criterion_5_oracle_soundness():
    rng = np.random.default_rng(7)
    states = [random_fock_state(rng) for _ in range(50)] + [random_finite_support_state(rng) for _ in range(50)]
    witnessed = 0
    with Timer(60.0):
        for state in states:
            result = search_witness(build_moment_matrix(state, n=15), max_cardinality=3)
            oracle = oracle_npt(state)
            audit = agreement_audit(state, result, oracle, strict=True)
            assert audit.ok
            if result.npt:
                witnessed += 1
                assert oracle.min_eigenvalue < -1e-8
        singlet = oracle_npt(make_singlet(), 1, 1)
    assert witnessed > 0
    assert abs(singlet.min_eigenvalue - (-0.5)) <= 1e-12


@pytest.mark.criterion(6, "analytic and traced moments agree; exact and float determinants agree")
def test_criterion_6_backend_agreement():
    rng = np.random.default_rng(99)
    with Timer(30.0):
        state = make_coherent_bell(1, 1)
        gaps = [cross_validate_backends(state, n=15, transposed=t, cutoffs=state.adequate_cutoffs()) for t in (True, False)]
        for _ in range(20):
            rows = random_hermitian_gaussian_rational(rng, 6)
            exact = float(det_exact_hermitian(rows))
            approx = det_float(np.array([[complex(v) for v in r] for r in rows])).value
            assert abs(approx - exact) <= 1e-9 * max(abs(exact), 1.0)
            assert abs(approx.imag) <= 1e-9 * max(abs(exact), 1.0)
    assert max(gaps) <= 1e-9


def _random_gram(rng, n):
    b = [[GaussianRational(int(rng.integers(-2, 3)), int(rng.integers(-2, 3))) for _ in range(3)] for _ in range(n)]
    return [[sum((b[p][k] * b[q][k].conjugate() for k in range(3)), GaussianRational(0)) for q in range(n)] for p in range(n)]


@pytest.mark.criterion(7, "structural invariants")
def test_criterion_7_structural_invariants():
    rng = np.random.default_rng(31)
    with Timer(10.0):
        ops = [m for d in range(4) for m in monomials(d)]
        for i, j in itertools.product(ops, repeat=2):
            assert swap_for_partial_transpose(*swap_for_partial_transpose(i, j)) == (i, j)

        for state in (make_singlet(), make_bell_phi(), random_fock_state(rng), random_fock_state(rng)):
            rho = to_density_matrix(state, 2, 2)
            once = partial_transpose(rho, exact=True)
            assert (partial_transpose(once, dims=(3, 3), exact=True) == rho.exact_entries).all()
            assert sum(once[k, k] for k in range(9)) == 1
        werner = TruncatedDensityMatrix.from_matrix(
            [[0, 0, 0, 0], [0, "1/2", "-1/4", 0], [0, "-1/4", "1/2", 0], [0, 0, 0, 0]], 1, 1
        )
        once = partial_transpose(werner, exact=True)
        assert (partial_transpose(once, dims=(2, 2), exact=True) == werner.exact_entries).all()

        built = [
            build_moment_matrix(s, n=15, transposed=t)
            for s in (make_singlet(), make_bell_phi(), make_coherent_bell(1, 1), random_fock_state(rng))
            for t in (True, False)
        ]
        for m in built:
            assert np.array_equal(m.values, m.values.conj().T)

        # a negative leading minor is one of the principal minors, so the search must find a witness
        # no larger than it; Gram matrices have neither
        for k in range(20):
            rows = random_hermitian_gaussian_rational(rng, 6) if k % 2 else _random_gram(rng, 6)
            m = MomentMatrix.from_array(rows)
            leading = leading_minor_scan(m)
            first = next((n for n, r in enumerate(leading, 1) if r.sign is Sign.NEGATIVE), None)
            found = search_witness(m, max_cardinality=6)
            if first is not None:
                assert found.npt and len(found.witness) <= first
            if k % 2 == 0:
                assert first is None and not found.npt
