from fractions import Fraction

import numpy as np
import pytest
from scipy.linalg import hilbert

from momentppt.errors import BudgetExhausted, NoMatchingOrdering, SubsetOutOfRange
from momentppt.exact import GaussianRational
from momentppt.fock import make_bell_phi, make_coherent_bell, make_product_coherent, make_singlet
from momentppt.minors import (
    EXHAUSTIVE,
    GUIDED,
    NO_WITNESS,
    NPT_WITNESSED,
    PPT_CONSISTENT,
    IndexSubset,
    Sign,
    classify_state,
    det_exact,
    det_exact_hermitian,
    det_float,
    leading_minor_scan,
    ordering_signature_search,
    parse_signature,
    principal_minor,
    search_witness,
    signature,
)
from momentppt.moments import MomentMatrix, build_moment_matrix

from randstates import random_hermitian_gaussian_rational

# Leading minors of the singlet under the default ordering. Cross-checked
# below against determinants of the truncated-trace matrix.
SINGLET_LEADING = [
    Fraction(1), Fraction(1, 2), Fraction(3, 4), Fraction(1, 4), Fraction(1, 4),
    Fraction(1, 16), Fraction(0), Fraction(-1, 64), Fraction(-1, 128), Fraction(-1, 256),
    Fraction(-1, 256), Fraction(0), Fraction(0), Fraction(0), Fraction(0),
]

FOUND_SINGLET_ORDER = ["1", "a", "a†", "b", "b†", "a† a", "a† b", "b† b", "a b†", "a^2", "a b", "a† b†", "a†^2", "b^2", "b†^2"]


def test_det_examples():
    assert det_exact([[GaussianRational(2), GaussianRational(1)], [GaussianRational(1), GaussianRational(1)]]) == 1
    assert det_exact_hermitian([[1, "1/2"], ["1/2", "1/4"]]) == 0
    assert det_exact_hermitian([[0, 1], [1, 0]]) == -1
    # needs a row swap
    assert det_exact_hermitian([[0, 1, 0], [1, 0, 0], [0, 0, 5]]) == -5


def test_hilbert_is_ill_conditioned():
    m = MomentMatrix.from_array(hilbert(8))
    report = principal_minor(m, range(1, 9))
    assert report.condition > 1e8
    assert report.ill_conditioned


def test_exact_vs_float_determinants():
    rng = np.random.default_rng(5)
    for _ in range(20):
        rows = random_hermitian_gaussian_rational(rng, 6)
        exact = det_exact_hermitian(rows)
        approx = det_float(np.array([[complex(v) for v in r] for r in rows])).value
        assert abs(approx - float(exact)) <= 1e-9 * max(1.0, abs(float(exact)))


def test_principal_minor_examples():
    m = MomentMatrix.from_array([[1, 0, "1/2"], [0, 1, 0], ["1/2", 0, "1/4"]])
    assert principal_minor(m, (1, 3)).determinant == 0
    assert principal_minor(m, (1, 3)).sign is Sign.ZERO
    assert principal_minor(m, (2,)).determinant == 1
    with pytest.raises(SubsetOutOfRange):
        principal_minor(m, (1, 4))
    with pytest.raises(ValueError):
        IndexSubset((2, 1))


def test_float_zero_band():
    m = MomentMatrix.from_array([[1.0, 0.5], [0.5, 0.25 + 1e-14]])
    assert principal_minor(m, (1, 2)).sign is Sign.ZERO


def test_parse_signature():
    assert parse_signature("+0−-") == [Sign.POSITIVE, Sign.ZERO, Sign.NEGATIVE, Sign.NEGATIVE]
    with pytest.raises(ValueError):
        parse_signature("+x")


def test_singlet_leading_table():
    m = build_moment_matrix(make_singlet(), n=15)
    reports = leading_minor_scan(m)
    assert all(r.exact for r in reports)
    assert [r.determinant for r in reports] == SINGLET_LEADING
    assert signature(reports) == "++++++0----0000"


def test_singlet_leading_table_against_trace():
    traced = build_moment_matrix(make_singlet(), n=15, backend="trace").values
    for k, expected in enumerate(SINGLET_LEADING, 1):
        assert np.linalg.det(traced[:k, :k]).real == pytest.approx(float(expected), abs=1e-12)


def test_singlet_witness():
    result = search_witness(build_moment_matrix(make_singlet(), n=15))
    assert result.verdict == NPT_WITNESSED
    assert result.witness.indices == (1, 8)
    assert result.witness_words() == ["1", "a b"]
    assert result.report.determinant == Fraction(-1, 4)


def test_bell_phi_needs_three_operators():
    # no 2x2 witness exists; the first one sits at cardinality 3
    m = build_moment_matrix(make_bell_phi(), n=15)
    assert not search_witness(m, max_cardinality=2).npt
    result = search_witness(m, max_cardinality=3)
    assert result.witness.indices == (6, 7, 9)
    assert result.report.determinant == Fraction(-1, 8)


def test_coherent_bell_witnesses():
    m = build_moment_matrix(make_coherent_bell(1, 1), n=15)
    x = 1 / np.tanh(2)
    assert principal_minor(m, (1, 4, 8)).determinant == pytest.approx(x * (1 - x * x), abs=1e-10)
    assert principal_minor(m, (1, 4, 8)).determinant < -1e-6
    result = search_witness(m, max_cardinality=3)
    assert result.witness.indices == (1, 8)
    assert result.report.determinant == pytest.approx(1 - x * x, abs=1e-10)


def test_guided_agrees_with_exhaustive():
    for state in (make_singlet(), make_bell_phi(), make_coherent_bell(1, 1), make_product_coherent(1, 1)):
        m = build_moment_matrix(state, n=15)
        a = search_witness(m, 3, strategy=EXHAUSTIVE)
        b = search_witness(m, 3, strategy=GUIDED)
        assert a.npt == b.npt
        if b.npt:
            assert b.report.determinant < 0


def test_product_state_has_no_witness():
    c = classify_state(make_product_coherent(1, 1), max_cardinality=3)
    assert c.verdict == PPT_CONSISTENT
    assert c.witness.verdict == NO_WITNESS
    assert c.witness.examined == 15 + 105 + 455


def test_budget_exhausted():
    m = build_moment_matrix(make_product_coherent(1, 1), n=15)
    with pytest.raises(BudgetExhausted) as info:
        search_witness(m, 3, budget=50)
    assert info.value.examined == 50


def test_search_requires_transposed_matrix():
    with pytest.raises(ValueError):
        search_witness(build_moment_matrix(make_singlet(), n=4, transposed=False))


def test_subsumption_on_random_matrices():
    # any negative leading minor is also found by the principal-minor search
    rng = np.random.default_rng(21)
    for _ in range(20):
        m = MomentMatrix.from_array(random_hermitian_gaussian_rational(rng, 6))
        leading = leading_minor_scan(m)
        first_negative = next((r for r in leading if r.sign is Sign.NEGATIVE), None)
        result = search_witness(m, max_cardinality=6)
        if first_negative is not None:
            assert result.npt


def test_signature_search_finds_order_for_singlet():
    match = ordering_signature_search(make_singlet(), "+" * 7 + "0" * 8)
    assert match.signature == "+++++++00000000"
    assert match.ordering.words() == FOUND_SINGLET_ORDER
    assert match.ordering.name == "signature-search"


def test_signature_search_prefers_default():
    match = ordering_signature_search(make_singlet(), "+")
    assert match.ordering.name == "sv-compatible"


def test_signature_search_rejects_impossible_start():
    with pytest.raises(NoMatchingOrdering):
        ordering_signature_search(make_singlet(), "-")
