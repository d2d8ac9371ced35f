import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from elzaki_qm.elzaki import Expr, Term, parse_expr, parse_prefix_expr
from elzaki_qm.elzaki.expr import gamma_normalised_power
from elzaki_qm.errors import ParseError, UnsupportedTermError
from elzaki_qm.special_functions import bessel_j0, gamma, kummer_1f1

TS = np.array([0.0, 0.3, 1.1, 2.5])


@pytest.mark.parametrize(
    "text, fn",
    [
        ("t^3", lambda t: t**3),
        ("2t^2*exp(-t)", lambda t: 2 * t * t * np.exp(-t)),
        ("sin(2t)+cos(3*t)", lambda t: np.sin(2 * t) + np.cos(3 * t)),
        ("sinh(t)*cosh(0.5t)", lambda t: np.sinh(t) * np.cosh(0.5 * t)),
        ("exp(0.3t)*sin(t)*t", lambda t: np.exp(0.3 * t) * np.sin(t) * t),
        ("sin(2t+1)", lambda t: np.sin(2 * t + 1)),
        ("(1+t)^2/4", lambda t: (1 + t) ** 2 / 4),
        ("J0(2t)", lambda t: bessel_j0(2 * t)),
        ("t^0.5*exp(-t)", lambda t: np.sqrt(t) * np.exp(-t)),
        ("t*1F1(0.5, 2, 3t)", lambda t: t * kummer_1f1(0.5, 2.0, 3 * t)),
        ("pi*t", lambda t: math.pi * t),
        ("sqrt(2)*t/gamma(3)", lambda t: math.sqrt(2) * t / 2),
    ],
)
def test_parse_and_evaluate(text, fn):
    f = parse_expr(text)
    assert np.allclose(f(TS), fn(TS), rtol=1e-12, atol=1e-14)


def test_heaviside_is_delayed_argument():
    # H(t-a) multiplies functions of (t-a) when written with the shifted argument
    f = parse_expr("H(t-1)*t")
    assert f(0.5) == 0.0
    assert f(2.0) == pytest.approx(2.0)


def test_delta_has_no_pointwise_value():
    f = parse_expr("delta(t-2)")
    assert f.has_impulse
    with pytest.raises(UnsupportedTermError):
        f(1.0)


@pytest.mark.parametrize("text, pos", [("t^-2", 1), ("sin(t^2)", 0), ("2+", 2), ("foo(t)", 0), ("1/t", 1), ("cos(3t", 6)])
def test_parse_errors_carry_position(text, pos):
    with pytest.raises(ParseError) as info:
        parse_expr(text)
    assert info.value.position == pos


def test_canonical_merges_and_sorts():
    f = parse_expr("t + cos(t) + 2t - cos(t)")
    assert str(f) == "3*t"
    g = parse_expr("exp(t)*t^2 + 1 + t")
    assert str(g) == "1 + t + t^2*exp(t)"


def test_hyperbolic_expand_to_exponentials():
    assert parse_expr("2cosh(t)").is_close(parse_expr("exp(t) + exp(-t)"))
    assert parse_expr("sinh(t)^2").is_close(parse_expr("0.5cosh(2t) - 0.5"))


def test_product_of_oscillators():
    f = parse_expr("sin(t)*cos(t)")
    assert f.is_close(parse_expr("0.5*sin(2t)"))


def test_kummer_reductions():
    # a = 0, a = -n, b - a = -n and the elementary integer case
    assert Expr.kummer(0.0, 2.0, 1.0).is_close(Expr.power(1))
    assert Expr.kummer(-1.0, 2.0, 2.0).is_close(parse_expr("t - t^2"))
    assert Expr.kummer(3.0, 2.0, 1.0).is_close(parse_expr("t*exp(t)*(1 + t/2)"))
    assert Expr.kummer(1.0, 2.0, 1.0).is_close(parse_expr("exp(t) - 1"))


def test_gamma_normalised_power():
    f = gamma_normalised_power(2.5)
    assert f(2.0) == pytest.approx(2.0**1.5 / gamma(2.5))


def test_term_validation():
    with pytest.raises(UnsupportedTermError):
        Term(1.0, -1.5)
    with pytest.raises(UnsupportedTermError):
        Term(1.0, 2.0, kind="1f1", freq=1.0, f11_a=0.5, f11_b=2.0)


def test_growth_rate():
    assert parse_expr("exp(2t)*sin(t) + cosh(3t)").growth_rate == pytest.approx(3.0)


def test_prefix_round_trip_example():
    f = parse_expr("2t^2*exp(-t) + 3*sin(2t+1) - H(t-1)*t + delta(t-0.5)")
    assert parse_prefix_expr(f.to_prefix()) == f
    assert parse_expr(f.to_prefix()) == f


def test_prefix_malformed():
    with pytest.raises(ParseError):
        parse_prefix_expr("(sum (term 1.0 (t 0.0)")


# printed coefficients carry 12 significant digits, so draw short decimals
coeffs = st.integers(-300, 300).filter(lambda k: k != 0).map(lambda k: k / 100)
rates = st.integers(-150, 150).map(lambda k: k / 100)
kinds = st.sampled_from(["1", "sin", "cos", "sinh", "cosh"])


@st.composite
def grammar_exprs(draw, max_terms=3):
    out = Expr()
    for _ in range(draw(st.integers(1, max_terms))):
        f = Expr.power(draw(st.integers(0, 3)), draw(coeffs)) * Expr.exp(draw(rates))
        kind = draw(kinds)
        if kind != "1":
            f = f * Expr.osc(kind, draw(st.integers(20, 200)) / 100)
        out = out + f
    return out


@given(grammar_exprs())
def test_prefix_round_trip_property(f):
    assert parse_prefix_expr(f.to_prefix()) == f


@given(grammar_exprs())
def test_infix_print_round_trip(f):
    g = parse_expr(str(f))
    assert g.is_close(f, rel=1e-9)


@given(grammar_exprs(), grammar_exprs())
def test_arithmetic_matches_pointwise(f, g):
    ts = np.array([0.1, 0.7, 1.6])
    assert np.allclose((f + g)(ts), f(ts) + g(ts), rtol=1e-9, atol=1e-9)
    assert np.allclose((f * g)(ts), f(ts) * g(ts), rtol=1e-9, atol=1e-9)
    assert np.allclose((f - g)(ts), f(ts) - g(ts), rtol=1e-9, atol=1e-9)


@given(grammar_exprs())
def test_canonical_is_idempotent(f):
    assert f.canonical() == f
