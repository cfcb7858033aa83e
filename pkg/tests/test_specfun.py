import math
from fractions import Fraction

import mpmath
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hulthen_lab.errors import DomainError, UnsupportedError
from hulthen_lab.specfun import (
    HypParams,
    gamma_ratio,
    hyp2f1_series,
    hyp2f1_terminating,
    hyp3f2_unit,
    kampe_unit,
    log_gamma,
    nonpositive_int,
    pochhammer,
    terminating_terms,
)

rationals = st.fractions(min_value=-20, max_value=20, max_denominator=50)


# -- log_gamma ---------------------------------------------------------------

@pytest.mark.parametrize("x, expected", [(1, 0.0), (5, math.log(24)), (0.5, 0.5723649429247001)])
def test_log_gamma_examples(x, expected):
    assert log_gamma(x) == pytest.approx(expected, abs=1e-15)


@given(st.floats(min_value=1e-6, max_value=200.0))
def test_log_gamma_matches_mpmath(x):
    with mpmath.workdps(40):
        ref = float(mpmath.loggamma(x))
    assert abs(log_gamma(x) - ref) <= 1e-13 * max(1.0, abs(ref))


@pytest.mark.parametrize("x", [0, -1, -2.0, -0.5, float("inf"), float("nan")])
def test_log_gamma_rejects_nonpositive(x):
    with pytest.raises(DomainError):
        log_gamma(x)


# -- pochhammer ----------------------------------------------------------------

@pytest.mark.parametrize("a, k, expected", [(2, 3, 24), (-3, 3, -6), (7.5, 0, 1)])
def test_pochhammer_examples(a, k, expected):
    assert pochhammer(a, k) == expected


def test_pochhammer_overflow_is_infinite_not_silent():
    assert pochhammer(1e300, 3) == math.inf


def test_pochhammer_rejects_negative_order():
    with pytest.raises(DomainError):
        pochhammer(2, -1)


@given(rationals, st.integers(0, 10), st.integers(0, 10))
def test_pochhammer_splits_exactly(a, i, j):
    assert pochhammer(a, i + j) == pochhammer(a + i, j) * pochhammer(a, i)


@given(st.floats(min_value=-20, max_value=20), st.integers(0, 10), st.integers(0, 10))
def test_pochhammer_splits_in_floats(a, i, j):
    lhs = pochhammer(a, i + j)
    rhs = pochhammer(a + i, j) * pochhammer(a, i)
    assert lhs == pytest.approx(rhs, rel=1e-12, abs=1e-300)


def test_gamma_ratio_is_reciprocal_pochhammer():
    assert gamma_ratio(Fraction(7, 2), 3) == 1 / (Fraction(7, 2) * Fraction(9, 2) * Fraction(11, 2))
    with pytest.raises(DomainError):
        gamma_ratio(-1, 3)


# -- terminating series --------------------------------------------------------

def test_nonpositive_int_detection():
    assert nonpositive_int(-3) == 3
    assert nonpositive_int(Fraction(-4)) == 4
    assert nonpositive_int(-2 + 5e-10) == 2
    assert nonpositive_int(-2 + 1e-6) is None
    assert nonpositive_int(Fraction(-5, 2)) is None
    assert nonpositive_int(1) is None


def test_hyp2f1_terminating_examples():
    assert hyp2f1_terminating(0, 3.3, 1.7, 0.4) == 1
    assert hyp2f1_terminating(1, 2, 3, Fraction(1, 2)) == Fraction(2, 3)
    assert hyp2f1_terminating(1, 2, 3, 0.5) == pytest.approx(2 / 3, rel=1e-15)
    for t in (0.0, 0.25, 0.9):
        assert hyp2f1_terminating(1, 7, 5, t) == pytest.approx(1 - 1.4 * t, rel=1e-15)


def test_hyp2f1_lower_pole_before_termination():
    with pytest.raises(DomainError):
        hyp2f1_terminating(3, 1, -1, 0.5)
    # a pole past the termination degree is never reached
    assert hyp2f1_terminating(1, 1, -1, 0.5) == pytest.approx(1.5)


def test_hyp3f2_unit_examples():
    assert hyp3f2_unit(0, 2.5, 3.5, 1.5, 4.5) == 1
    assert hyp3f2_unit(-3, 5, 4, 4, 3) == 0
    assert hyp3f2_unit(-1, 7, 4, 5, 7) == Fraction(1, 5)


def test_hyp3f2_unit_rejects_nonterminating():
    with pytest.raises(UnsupportedError):
        hyp3f2_unit(0.5, 2, 3, 4, 5)


def test_exact_inputs_give_fractions():
    assert isinstance(hyp3f2_unit(-2, Fraction(1, 3), 2, 5, Fraction(7, 2)), Fraction)
    assert isinstance(hyp2f1_terminating(2, 1, 3, 0.5), float)


def test_hypparams_evaluates_its_series():
    hp = HypParams([-1, 7, 4], [5, 7])
    assert hp.degree == 1
    assert hp.evaluate() == Fraction(1, 5)


def test_kampe_single_term():
    assert kampe_unit(2.5, (0, 3), (0, 4), 5.5, 1.5, 2.5, 0, 0) == 1


def test_kampe_collapses_to_single_sum():
    # m = 0 leaves a 3F2 over i with (c0)_i/(d0)_i carried along
    c0, d0 = Fraction(13, 3), Fraction(22, 3)
    upper = (-1, Fraction(13))
    double = kampe_unit(c0, upper, (0, Fraction(7)), d0, Fraction(11), Fraction(6), 1, 0)
    single = hyp3f2_unit(-1, Fraction(13), c0, Fraction(11), d0)
    assert double == single


def test_kampe_pole_in_coupled_parameter():
    with pytest.raises(DomainError):
        kampe_unit(1, (-2, 3), (-2, 3), -1, 5, 5, 2, 2)


# -- identities as properties --------------------------------------------------

@settings(max_examples=60)
@given(st.integers(0, 8), st.floats(0.3, 6.0), st.floats(0.3, 6.0), st.sampled_from([0.1, 0.3, 0.7]))
def test_pfaff_transformation(n, b, c, z):
    lhs = hyp2f1_terminating(n, b, c, z)
    rhs = (1 - z) ** (c + n - b) * hyp2f1_series(c + n, c - b, c, z)
    assert abs(lhs - rhs) <= 1e-10 * max(abs(lhs), abs(rhs), 1e-12)


@given(st.integers(1, 8), rationals, rationals.filter(lambda c: nonpositive_int(c) is None),
       st.fractions(-1, 1, max_denominator=20))
def test_contiguous_relation_is_exact(n, beta, gamma, z):
    if nonpositive_int(gamma) is not None or any(gamma + k == 0 for k in range(n + 1)):
        return
    f = lambda al, be: sum(terminating_terms([al, be], [gamma], z))  # noqa: E731
    alpha = -n
    value = ((gamma - alpha - beta) * f(alpha, beta) + alpha * (1 - z) * f(alpha + 1, beta)
             - (gamma - beta) * f(alpha, beta - 1))
    assert value == 0


@given(st.integers(2, 8), st.integers(0, 3), st.integers(0, 3), rationals, rationals)
def test_vanishing_3f2(m, ell, s, a, b):
    if not 1 <= ell + s <= m - 1:
        return
    lower = (a - ell, b - s)
    if any(nonpositive_int(x) is not None and nonpositive_int(x) < m for x in lower):
        return
    assert hyp3f2_unit(-m, a, b, *lower) == 0


@given(st.integers(1, 6), rationals, rationals, st.fractions(1, 20, max_denominator=9),
       st.fractions(1, 20, max_denominator=9))
def test_thomae_transformation_terminating(k, a, b, d, e):
    s = d + e - a - b
    if not s > 0:
        return
    lhs = hyp3f2_unit(a, b, -k, d, e)
    rhs = pochhammer(s, k) / pochhammer(d, k) * hyp3f2_unit(e - a, e - b, -k, s, e)
    assert lhs == rhs
