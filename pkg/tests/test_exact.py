import json
import math
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from heatspec.exact import ExactValue, as_exact, as_fraction, four_pi_power, parse_exact

fractions = st.builds(Fraction, st.integers(-10**4, 10**4), st.integers(1, 50))
exps = st.integers(-4, 4)
values = st.builds(ExactValue, fractions, exps)


def test_zero_is_canonical():
    assert ExactValue(0, 3) == ExactValue(0)
    assert ExactValue(0, 3).pi_half_exponent == 0


def test_mixing_pi_powers_in_a_sum_raises():
    with pytest.raises(ValueError):
        ExactValue(1, 1) + ExactValue(1, 2)


def test_float_operands_are_rejected():
    with pytest.raises(TypeError):
        ExactValue(1) + 0.5
    with pytest.raises(TypeError):
        ExactValue(1) < 0.5


def test_irrational_value_has_no_fraction():
    with pytest.raises(ValueError):
        ExactValue.sqrt_pi().as_fraction()


@pytest.mark.parametrize(
    "text,expected",
    [
        ("pi", ExactValue(1, 2)),
        ("2pi", ExactValue(2, 2)),
        ("2*pi", ExactValue(2, 2)),
        ("pi/2", ExactValue(Fraction(1, 2), 2)),
        ("1/2", ExactValue(Fraction(1, 2))),
        ("0.25", ExactValue(Fraction(1, 4))),
        ("-pi", ExactValue(-1, 2)),
        ("3", ExactValue(3)),
    ],
)
def test_parse_exact(text, expected):
    assert parse_exact(text) == expected


@pytest.mark.parametrize("bad", ["", "pie", "1/2/3x", "sqrt(2)"])
def test_parse_exact_rejects_garbage(bad):
    with pytest.raises(ValueError):
        parse_exact(bad)


def test_as_fraction_uses_shortest_float_repr():
    assert as_fraction(0.1) == Fraction(1, 10)
    with pytest.raises(ValueError):
        as_fraction(float("nan"))


def test_four_pi_power_matches_float():
    for h in range(-6, 7):
        assert float(four_pi_power(h)) == pytest.approx((4 * math.pi) ** (h / 2), rel=1e-14)


@pytest.mark.parametrize(
    "value,text",
    [
        (ExactValue(Fraction(1, 128), 1), "1/128*sqrt(pi)"),
        (ExactValue(-1, 1), "-sqrt(pi)"),
        (ExactValue(2, 2), "2*pi"),
        (ExactValue(1, 4), "pi^2"),
        (ExactValue(3, 3), "3*pi^(3/2)"),
        (ExactValue(0), "0"),
    ],
)
def test_str(value, text):
    assert str(value) == text


@given(values)
def test_json_round_trip(v):
    assert ExactValue.from_json(json.loads(json.dumps(v.to_json()))) == v


@given(values, values)
def test_product_matches_float(x, y):
    assert float(x * y) == pytest.approx(float(x) * float(y), rel=1e-12, abs=1e-300)


@given(fractions, fractions, exps)
def test_sum_matches_float(a, b, k):
    x, y = ExactValue(a, k), ExactValue(b, k)
    assert float(x + y) == pytest.approx(float(x) + float(y), rel=1e-12, abs=1e-12)


@given(values, values)
def test_order_agrees_with_float_when_comparable(x, y):
    if x.is_zero() or y.is_zero() or x.pi_half_exponent == y.pi_half_exponent:
        assert (x < y) == (float(x) < float(y)) or math.isclose(float(x), float(y))


@given(values.filter(lambda v: not v.is_zero()))
def test_division_inverts_multiplication(x):
    assert (x * x) / x == x
    assert x ** -1 * x == ExactValue(1)


def test_as_exact_accepts_strings_and_numbers():
    assert as_exact("pi") == ExactValue.pi()
    assert as_exact(Fraction(1, 3)) == ExactValue(Fraction(1, 3))
    assert as_exact(2) == ExactValue(2)
