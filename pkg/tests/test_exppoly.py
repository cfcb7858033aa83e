import json
import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hulthen_lab import hulthen
from hulthen_lab.errors import DomainError, InexactDivisionError, UsageError
from hulthen_lab.exppoly import ExpPoly, divide_exact, factor_exact, wronskian
from hulthen_lab.hulthen import ReducedParams

Q = Fraction(3, 2)
small = st.fractions(-4, 4, max_denominator=6)
coeff_lists = st.lists(small, min_size=1, max_size=4)


@st.composite
def exppolys(draw, q=Q, max_terms=3):
    terms = draw(st.lists(st.tuples(small, coeff_lists), min_size=0, max_size=max_terms))
    return ExpPoly(q, tuple((a, tuple(p)) for a, p in terms))


def one_minus_t(q, alpha=0, power=1):
    coeffs = [math.comb(power, k) * (-1) ** k for k in range(power + 1)]
    return ExpPoly.single(q, alpha, coeffs)


# -- canonical form and arithmetic examples ------------------------------------

def test_add_examples():
    f = ExpPoly.single(Q, -1, (1, 2))
    assert f + ExpPoly.zero(Q) == f
    assert ExpPoly.constant(Q, 1) + ExpPoly.single(Q, 0, (0, 1)) == ExpPoly.single(Q, 0, (1, 1))
    two = ExpPoly.single(1, 1, (1,)) + ExpPoly.single(1, 2, (1,))
    assert len(two.terms) == 2 and two(0.0) == pytest.approx(2.0)


def test_mul_examples():
    f = one_minus_t(Q)
    assert f * ExpPoly.constant(Q, 1) == f
    assert f * f == ExpPoly.single(Q, 0, (1, -2, 1))
    g = one_minus_t(Q, alpha=-2)
    assert g * g == ExpPoly.single(Q, -4, (1, -2, 1))


def test_float_mode_merges_close_exponents_and_trims():
    f = ExpPoly(2.0, ((1.0, (1.0, 0.0)), (1.0 + 1e-13, (2.0, 1e-20))))
    assert f.terms == ((1.0, (3.0,)),)


def test_mismatched_q_is_usage_error():
    with pytest.raises(UsageError):
        ExpPoly.constant(1, 1) + ExpPoly.constant(2, 1)


def test_differentiate_examples():
    alpha = Fraction(-7, 3)
    assert ExpPoly.single(Q, alpha, (1,)).derivative() == ExpPoly.single(Q, alpha, (alpha,))
    assert one_minus_t(Q, alpha=-2).derivative() == ExpPoly.single(Q, -2, (-2, 3))


def test_log_second_derivative_of_ground_state():
    # (log psi)'' = (psi'' psi - psi'^2) / psi^2 should equal -q e^r / (e^r - q)^2
    q = 1.3
    psi = hulthen.eigenfunction(ReducedParams(9.0, q), 0)
    r = np.linspace(math.log(q) + 0.05, 8, 40)
    d1, d2 = psi.derivative()(r), psi.derivative(2)(r)
    value = psi(r)
    er = np.exp(r)
    assert np.allclose((d2 * value - d1**2) / value**2, -q * er / (er - q) ** 2, rtol=1e-10)


def test_wronskian_examples():
    f = ExpPoly.single(Q, Fraction(1, 2), (1, 3))
    assert wronskian([f]) == f
    a, b = Fraction(-1, 3), Fraction(5, 2)
    w = wronskian([ExpPoly.single(Q, a, (1,)), ExpPoly.single(Q, b, (1,))])
    assert w == ExpPoly.single(Q, a + b, (b - a,))


def test_wronskian_size_limits():
    with pytest.raises(UsageError):
        wronskian([])
    with pytest.raises(UsageError):
        wronskian([ExpPoly.constant(Q, 1)] * 7)


def test_first_chain_state_from_wronskian():
    p = ReducedParams(12, 1)
    seed = hulthen.eigenfunction(p, 0)
    psi = divide_exact(wronskian([seed, hulthen.eigenfunction(p, 1)]), seed)
    assert psi == ExpPoly.single(1, -2, (Fraction(7, 2), -7, Fraction(7, 2)))


def test_divide_exact_examples():
    f = ExpPoly.single(Q, 1, (2, 5))
    assert divide_exact(f, ExpPoly.constant(Q, 1)) == f
    num, den = one_minus_t(Q, -4, 4), one_minus_t(Q, -2, 2)
    assert divide_exact(num, den) == one_minus_t(Q, -2, 2)


def test_divide_exact_reports_remainder():
    with pytest.raises(InexactDivisionError):
        divide_exact(ExpPoly.single(Q, 0, (1, 0, 1)), one_minus_t(Q))
    with pytest.raises(InexactDivisionError):
        divide_exact(ExpPoly.single(1.5, 0, (1.0, 0.0, 1.0)), ExpPoly.single(1.5, 0, (1.0, -1.0)))
    with pytest.raises(UsageError):
        divide_exact(ExpPoly.constant(Q, 1), ExpPoly(Q, ((0, (1,)), (1, (1,)))))


def test_evaluate_examples():
    assert one_minus_t(Q)(math.log(1.5)) == 0.0
    assert ExpPoly.single(2, 1, (1,))(0.0 + math.log(2)) == pytest.approx(2.0)
    assert ExpPoly.single(0.5, 1, (1,))(0.0) == 1.0
    psi = hulthen.eigenfunction(ReducedParams(12, 1), 0)
    assert psi(1.0) == pytest.approx(math.exp(-5.5) * (1 - math.exp(-1)), rel=1e-14)
    assert psi(1.0) == pytest.approx(0.0025833, abs=1e-7)


def test_evaluate_rejects_points_outside_domain():
    with pytest.raises(DomainError):
        one_minus_t(Q)(0.0)


def test_evaluate_accepts_arrays():
    f = ExpPoly.single(Q, -1, (1, -1))
    r = np.array([1.0, 2.0, 3.0])
    assert np.allclose(f(r), [f(x) for x in r])


def test_factored_form_keeps_accuracy_near_unit_t():
    # (1-t)^8 expanded cancels catastrophically near t = 1
    exact = one_minus_t(Fraction(1), 0, 8)
    r = 1e-3
    expected = (-math.expm1(-r)) ** 8
    assert exact(r) == pytest.approx(expected, rel=1e-12)
    assert exact.to_float()(r) == pytest.approx(expected, rel=1e-12)
    fac = factor_exact(tuple(exact.terms[0][1]))
    assert fac.unit_order == 8 and fac.roots == ()


def test_json_round_trip_exact_and_float():
    f = ExpPoly(Q, ((Fraction(-5, 2), (1, Fraction(-7, 3))), (1, (2,))))
    assert ExpPoly.from_json(f.to_json()) == f
    g = f.to_float()
    data = json.loads(g.to_json())
    assert set(data) == {"q", "terms"} and set(data["terms"][0]) == {"alpha", "coeffs"}
    assert ExpPoly.from_json(g.to_json()) == g


def test_state_round_trip_reproduces_samples():
    psi = hulthen.eigenfunction(ReducedParams(30.0, 1.7), 3)
    back = ExpPoly.from_json(psi.to_json())
    r = np.linspace(math.log(1.7), 15, 101)
    assert np.allclose(back(r), psi(r), rtol=1e-12, atol=1e-12 * np.max(np.abs(psi(r))))


# -- properties -------------------------------------------------------------------

sample_r = st.floats(math.log(1.5), 12.0)


@settings(max_examples=60)
@given(exppolys(), exppolys(), st.lists(sample_r, min_size=1, max_size=8))
def test_evaluate_is_a_ring_homomorphism(f, g, rs):
    r = np.array(rs)
    fv, gv = f(r), g(r)
    scale_add = np.abs(fv) + np.abs(gv) + 1e-300
    assert np.all(np.abs((f + g)(r) - (fv + gv)) <= 1e-12 * scale_add)
    assert np.all(np.abs((f * g)(r) - fv * gv) <= 1e-12 * (np.abs(fv * gv) + 1e-300) + 1e-12 * scale_add**2)


@settings(max_examples=60)
@given(exppolys(max_terms=2), st.floats(math.log(1.5) + 0.1, 6.0))
def test_derivative_matches_central_difference(f, r):
    h = 1e-5
    fd = (f(r + h) - f(r - h)) / (2 * h)
    exact = f.derivative()(r)
    # differencing noise ~ eps |f| / h on top of the relative tolerance
    noise = 1e3 * np.finfo(float).eps * max(abs(f(r + h)), abs(f(r - h))) / h
    assert abs(exact - fd) <= 1e-7 * abs(exact) + noise


@given(exppolys(), st.tuples(small, coeff_lists.filter(lambda p: any(p))))
def test_divide_exact_inverts_multiplication(f, term):
    g = ExpPoly.single(Q, term[0], term[1])
    assert divide_exact(f * g, g) == f


@given(exppolys(), exppolys())
def test_arithmetic_is_exact_and_commutative(f, g):
    assert f + g == g + f
    assert f * g == g * f
    assert (f + g) - g == f


@pytest.mark.parametrize("params", [ReducedParams(50, 2), ReducedParams(Fraction(41, 2), Fraction(6, 5))])
@pytest.mark.parametrize("j", [1, 2])
def test_crum_wronskian_identity(params, j):
    fs = [hulthen.eigenfunction(params, k) for k in range(j + 1)]
    g = hulthen.eigenfunction(params, j + 1)
    lhs = wronskian(fs[:j]) * wronskian(fs + [g])
    rhs = wronskian([wronskian(fs), wronskian(fs[:j] + [g])])
    assert lhs == rhs


def test_crum_wronskian_identity_in_floats():
    p = ReducedParams(30.0, 1.7)
    fs = [hulthen.eigenfunction(p, k) for k in range(3)]
    g = hulthen.eigenfunction(p, 3)
    lhs = wronskian(fs[:2]) * wronskian(fs + [g])
    rhs = wronskian([wronskian(fs), wronskian(fs[:2] + [g])])
    diff = (lhs - rhs).max_abs_coeff()
    assert diff <= 1e-9 * lhs.max_abs_coeff()
