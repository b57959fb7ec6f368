import math
from fractions import Fraction as F

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ehrenfest.exact import (
    Jet,
    binomial,
    expm1_rational,
    format_rational,
    format_significant,
    jet_from_derivatives,
    parse_rational,
)

rationals = st.fractions(min_value=-10, max_value=10, max_denominator=40)


def test_binomial_values():
    assert binomial(5, 2) == 10
    assert binomial(7, 0) == 1
    assert binomial(4, 6) == 0
    assert binomial(4, -1) == 0


def test_binomial_rejects_negative_n():
    with pytest.raises(ValueError):
        binomial(-1, 0)


@given(st.integers(min_value=0, max_value=25), st.integers(min_value=-5, max_value=30))
def test_binomial_matches_factorials(n, m):
    if 0 <= m <= n:
        expected = math.factorial(n) // (math.factorial(m) * math.factorial(n - m))
    else:
        expected = 0
    assert binomial(n, m) == expected


@given(rationals, rationals, rationals)
def test_rational_field_axioms(a, b, c):
    assert (a + b) + c == a + (b + c)
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c
    if b != 0:
        assert a * b / b == a


@given(rationals)
def test_serialization_roundtrip(q):
    text = format_rational(q)
    assert parse_rational(text) == q
    if q.denominator == 1:
        assert "/" not in text


def test_format_significant():
    assert format_significant(F(1, 3), 5) == "0.33333"
    assert format_significant(F(10), 4) == "10"


# --- jets -----------------------------------------------------------------


def test_jet_polynomial_identity():
    one_plus = Jet((1, 1, 0))
    one_minus = Jet((1, -1, 0))
    assert one_plus * one_minus == Jet((1, 0, -1))


def test_jet_geometric_series():
    one = Jet.constant(1, 3)
    denom = Jet((1, -1, 0, 0))
    assert one / denom == Jet((1, 1, 1, 1))


def test_jet_division_identity():
    j = Jet((1, 1, 0, 0, 0))
    assert j / j == Jet.constant(1, 4)


jet_coeffs = st.lists(rationals, min_size=2, max_size=7)


@settings(max_examples=200)
@given(jet_coeffs, jet_coeffs)
def test_jet_mul_div_roundtrip(a_coeffs, b_coeffs):
    order = min(len(a_coeffs), len(b_coeffs)) - 1
    a = Jet(a_coeffs[: order + 1])
    b = Jet(b_coeffs[: order + 1])
    if b.coeffs[0] == 0:
        with pytest.raises(ZeroDivisionError):
            a / b
    else:
        assert (a * b) / b == a


def test_compose_scaled_expm1():
    outer = Jet.variable(3)
    inner = Jet.scaled_expm1(2, 3)
    assert outer.compose(inner) == Jet((0, 2, 1, F(1, 3)))


def test_compose_constant_outer():
    outer = Jet.constant(F(7, 3), 4)
    inner = Jet((0, 1, 2, 0, 1))
    assert outer.compose(inner) == outer


def test_compose_square_outer():
    order = 3
    outer = Jet.variable(order) * Jet.variable(order)
    inner = Jet((0, 1, 1, 0))
    assert outer.compose(inner) == Jet((0, 0, 1, 2))


def _poly_mul(p, q, order):
    out = [F(0)] * (order + 1)
    for i, a in enumerate(p):
        for j, b in enumerate(q):
            if i + j <= order:
                out[i + j] += a * b
    return out


@settings(max_examples=100)
@given(st.integers(min_value=0, max_value=6), st.lists(rationals, min_size=7, max_size=7))
def test_compose_monomial_matches_expansion(power, inner_coeffs):
    order = 6
    inner_coeffs = [F(0)] + inner_coeffs[1:]
    inner = Jet(inner_coeffs)
    mono = [F(0)] * (order + 1)
    mono[power] = F(1)
    composed = Jet(mono).compose(inner)
    # brute-force truncated polynomial power
    expected = [F(1)] + [F(0)] * order
    for _ in range(power):
        expected = _poly_mul(expected, inner_coeffs, order)
    assert list(composed.coeffs) == expected


def test_compose_requires_zero_inner_constant():
    with pytest.raises(ValueError):
        Jet.variable(2).compose(Jet((1, 1, 0)))


def test_order_mismatch_rejected():
    with pytest.raises(ValueError):
        Jet((1, 2)) + Jet((1, 2, 3))


def test_derivatives_roundtrip():
    j = jet_from_derivatives([F(1), F(2), F(6), F(24)])
    assert j == Jet((1, 2, 3, 4))
    assert j.derivative_at_zero(3) == 24


# --- rational expm1 -------------------------------------------------------


@given(st.floats(min_value=1e-6, max_value=30, allow_nan=False))
def test_expm1_rational_tracks_float(x):
    approx = expm1_rational(F(x), F(1, 10**20))
    assert math.isclose(float(approx), math.expm1(x), rel_tol=1e-12)


def test_expm1_rational_precision_budget():
    x = F(1, 3)
    coarse = expm1_rational(x, F(1, 10**12))
    fine = expm1_rational(x, F(1, 10**40))
    assert abs(coarse - fine) <= fine / 10**12
    assert expm1_rational(F(0)) == 0
    with pytest.raises(ValueError):
        expm1_rational(F(-1))
