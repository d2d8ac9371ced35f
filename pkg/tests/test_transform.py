import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from elzaki_qm.checks import convolution_gap, convolution_pairs
from elzaki_qm.elzaki import (
    Expr,
    TransformExpr,
    appendix_table,
    convolve,
    derivative_image,
    elzaki_numeric,
    elzaki_quad,
    elzaki_transform,
    inverse_elzaki,
    laplace_dual,
    parse_expr,
    parse_prefix_transform,
    shifted_transform,
    t_multiplied_image,
)
from elzaki_qm.elzaki.table import relative_gap, table_samples
from elzaki_qm.errors import DomainError, UnsupportedTermError


@pytest.mark.parametrize(
    "text, image",
    [
        ("1", "u^2"),
        ("t^2", "2*u^4"),
        ("t^3", "6*u^5"),
        ("exp(0.5t)", "u^2/(1 - 0.5*u)"),
        ("exp(2t)*t", "u^3/(1 - 2*u)^2"),
        ("cos(t)", "u^2/(1 + u^2)"),
        ("sin(2t)", "2*u^3/(1 + 4*u^2)"),
        ("J0(2t)", "u^2/sqrt(1 + 4*u^2)"),
        ("H(t-1)", "u^2*exp(-1/u)"),
        ("delta(t-2)", "u*exp(-2/u)"),
        ("t*sin(2t)", "4*u^4/(1 + 4*u^2)^2"),
    ],
)
def test_forward_examples(text, image):
    assert str(elzaki_transform(text)) == image


def test_fractional_power_image():
    T = elzaki_transform("t^1.5")
    assert T.evaluate(0.3) == pytest.approx(math.gamma(2.5) * 0.3**3.5, rel=1e-13)


def test_cosh_numerator_is_u_squared():
    T = elzaki_transform("cosh(2t)")
    for u in (0.1, 0.3):
        assert T.evaluate(u) == pytest.approx(u * u / (1 - 4 * u * u), rel=1e-13)


def test_evaluation_outside_region_raises():
    T = elzaki_transform("exp(2t)")
    with pytest.raises(DomainError, match="convergence radius 0.5"):
        T.evaluate(0.6)
    with pytest.raises(DomainError):
        T.evaluate(-0.1)


@pytest.mark.parametrize("f, u, expected", [(lambda t: np.ones_like(t), 0.5, 0.25), (lambda t: t, 1.0, 1.0), (lambda t: np.exp(0.5 * t), 0.5, 1 / 3)])
def test_numeric_transform(f, u, expected):
    assert elzaki_numeric(f, u) == pytest.approx(expected, rel=1e-12)


def test_laplace_dual_examples():
    assert laplace_dual(lambda s: 1 / s, 0.5) == pytest.approx(0.25)
    assert laplace_dual(lambda s: 2 / s**3, 2.0) == pytest.approx(32.0)
    assert laplace_dual(lambda s: 1 / (s - 0.25), 2.0) == pytest.approx(8.0)
    with pytest.raises(DomainError):
        laplace_dual(lambda s: 1 / s, 0.0)


# ----------------------------------------------------------------- table
ROWS = appendix_table()


@pytest.mark.parametrize("row", ROWS, ids=[r.name for r in ROWS])
def test_table_row_against_quadrature_and_laplace(row):
    us = [u for u in (0.1, 0.3) if u < row.radius]
    for s in table_samples(row, us):
        assert relative_gap(s["symbolic"], s["quadrature"]) <= 1e-6
        assert relative_gap(s["symbolic"], s["laplace_dual"]) <= 1e-10


@pytest.mark.parametrize("row", ROWS, ids=[r.name for r in ROWS])
def test_table_row_round_trip(row):
    assert inverse_elzaki(row.image).is_close(row.f)
    if not row.f.has_impulse:
        assert elzaki_transform(row.f).is_close(row.image)


# ----------------------------------------------------------------- rules
def test_derivative_examples():
    assert str(derivative_image(elzaki_transform("exp(2t)"), 1, [1.0])) == "2*u^2/(1 - 2*u)"
    assert str(derivative_image(elzaki_transform("t"), 1, [0.0])) == "u^2"
    assert str(derivative_image(elzaki_transform("cos(t)"), 2, [1.0, 0.0])) == "-u^2/(1 + u^2)"
    with pytest.raises(DomainError):
        derivative_image(elzaki_transform("t"), 2, [0.0])


def test_t_multiplication_examples():
    one = TransformExpr.monomial(2.0)
    assert [str(t_multiplied_image(one, k)) for k in (1, 2, 3)] == ["u^3", "2*u^4", "6*u^5"]
    assert str(t_multiplied_image(elzaki_transform("exp(3t)"), 1)) == "u^3/(1 - 3*u)^2"
    with pytest.raises(UnsupportedTermError):
        t_multiplied_image(one, 4)


def _power_exp(k: int, r: float) -> Expr:
    return Expr.power(k) * Expr.exp(r)


def _derivative(k: int, r: float) -> Expr:
    out = Expr.exp(r, r) * Expr.power(k)
    if k:
        out = out + Expr.power(k - 1, float(k)) * Expr.exp(r)
    return out


ks = st.integers(0, 4)
rs = st.integers(-20, 20).map(lambda j: j / 10)


@given(ks, rs)
def test_derivative_rule_property(k, r):
    # d/dt (t^k e^{rt}) checked against the first-derivative rule
    T = elzaki_transform(_power_exp(k, r))
    value_at_zero = 1.0 if k == 0 else 0.0
    lhs = derivative_image(T, 1, [value_at_zero])
    rhs = elzaki_transform(_derivative(k, r))
    us = [0.1, 0.2, 0.3]
    for u in us:
        assert relative_gap(lhs.evaluate(u), rhs.evaluate(u)) <= 1e-10 or abs(lhs.evaluate(u) - rhs.evaluate(u)) < 1e-14


@given(ks, rs, st.integers(1, 3))
def test_t_multiplication_property(k, r, m):
    lhs = t_multiplied_image(elzaki_transform(_power_exp(k, r)), m)
    rhs = elzaki_transform(_power_exp(k + m, r))
    for u in (0.1, 0.2, 0.3):
        assert relative_gap(lhs.evaluate(u), rhs.evaluate(u)) <= 1e-10


@given(ks, rs, st.integers(-20, 20).map(lambda j: j / 10))
def test_shift_property(k, r, a):
    f = _power_exp(k, r)
    lhs = shifted_transform(elzaki_transform(f), a)
    rhs = elzaki_transform(f * Expr.exp(-a))
    for u in (0.05, 0.1, 0.2):
        assert relative_gap(lhs.evaluate(u), rhs.evaluate(u)) <= 1e-10


def test_shift_examples():
    one = TransformExpr.monomial(2.0)
    assert str(shifted_transform(one, 0.7)) == "u^2/(1 + 0.7*u)"
    assert str(shifted_transform(TransformExpr.monomial(3.0), 1.0)) == "u^3/(1 + u)^2"
    assert shifted_transform(one, 0.0) is one


def test_shift_against_quadrature():
    T = shifted_transform(elzaki_transform("sin(2t)"), 0.5)
    g = parse_expr("exp(-0.5t)*sin(2t)")
    for u in (0.1, 0.3, 0.8):
        assert relative_gap(T.evaluate(u), elzaki_quad(g, u)) <= 1e-6


# ----------------------------------------------------------------- convolution
def test_convolution_examples():
    assert str(convolve("1", "1")) == "t"
    assert str(convolve("t", "1")) == "0.5*t^2"
    assert str(convolve("t", "exp(t)")) == "-1 + exp(t) - t"


def test_convolution_against_quadrature():
    from scipy import integrate

    G, H = parse_expr("sin(t)"), parse_expr("t*exp(-0.5t)")
    conv = convolve(G, H)
    for t in (0.4, 1.7, 3.2):
        ref = integrate.quad(lambda s: G(t - s) * H(s), 0.0, t, epsabs=0, epsrel=1e-13)[0]
        assert conv(t) == pytest.approx(ref, rel=1e-10)


def test_close_rates_keep_kummer_form():
    # expanding would divide by powers of the small rate gap
    f = convolve(parse_expr("t^2*exp(0.68t)"), parse_expr("t*exp(0.65t)"))
    assert "1F1" in str(f)
    from scipy import integrate

    ref = integrate.quad(lambda s: (1.5 - s) ** 2 * math.exp(0.68 * (1.5 - s)) * s * math.exp(0.65 * s), 0, 1.5, epsrel=1e-13)[0]
    assert f(1.5) == pytest.approx(ref, rel=1e-11)


@pytest.mark.parametrize("i", range(20))
def test_convolution_theorem_fixed_pairs(i):
    G, H = convolution_pairs()[i]
    assert convolution_gap(G, H, (0.11, 0.17, 0.23, 0.29, 0.35)) <= 1e-8


coeff = st.integers(50, 200).map(lambda j: j / 100)
rate = st.integers(-100, 100).map(lambda j: j / 100)
freq = st.integers(30, 150).map(lambda j: j / 100)


@st.composite
def conv_factor(draw):
    f = Expr.power(draw(st.integers(0, 2)), draw(coeff)) * Expr.exp(draw(rate))
    kind = draw(st.sampled_from(["1", "sin", "cos", "sinh", "cosh"]))
    if kind != "1":
        f = f * Expr.osc(kind, draw(freq))
    return f


@settings(max_examples=40)
@given(conv_factor(), conv_factor())
def test_convolution_theorem_property(G, H):
    assert convolution_gap(G, H, (0.11, 0.17, 0.23, 0.29, 0.35)) <= 1e-8


def test_convolution_close_frequencies():
    G, H = parse_expr("0.5*sin(0.3t)"), parse_expr("0.5*t*sin(0.31t)")
    assert convolution_gap(G, H, (0.11, 0.17, 0.23, 0.29, 0.35)) <= 1e-8


@pytest.mark.parametrize("u", [0.05, 0.1, 0.3, 0.45])
def test_combined_matches_terms(u):
    for src, exact in [("cosh(2t)", u**2 / (1 - 4 * u**2)), ("sinh(t) + 3cos(2t)", u**3 / (1 - u**2) + 3 * u**2 / (1 + 4 * u**2))]:
        T = elzaki_transform(src)
        assert T.combined().evaluate(u) == pytest.approx(exact, rel=1e-12)
        assert T.evaluate(u) == pytest.approx(exact, rel=1e-12)


def test_convolution_rejects_steps():
    with pytest.raises(UnsupportedTermError):
        convolve("H(t-1)", "t")
    with pytest.raises(UnsupportedTermError):
        convolve("delta(t-1)", "t")


# ----------------------------------------------------------------- inverse
def test_inverse_examples():
    assert str(inverse_elzaki(TransformExpr.monomial(3.0))) == "t"
    assert str(inverse_elzaki(elzaki_transform("cos(t)"))) == "cos(t)"
    assert str(inverse_elzaki(elzaki_transform("J0(2t)"))) == "J0(2*t)"


@given(conv_factor())
def test_inverse_round_trip_property(f):
    assert inverse_elzaki(elzaki_transform(f)).is_close(f, rel=1e-8)


def test_image_prefix_round_trip():
    T = elzaki_transform("t*sin(2t) + H(t-1) + J0(t) + t^1.5")
    assert parse_prefix_transform(T.to_prefix()).is_close(T)


def test_laplace_dual_reference_values():
    assert laplace_dual(lambda s: s / (s * s + 1), 1.0) == pytest.approx(0.5)
    assert laplace_dual(lambda s: 1 / s**2, 2.0) == pytest.approx(8.0)
    assert laplace_dual(lambda s: 1 / (s - 0.5), 1.0) == pytest.approx(2.0)


def test_beta_weighted_convolution():
    # e^{-Bt} t^(s-1)/G(s) * e^{Bt} t^(r-1)/G(r) = e^{-Bt} t^(s+r-1)/G(s+r) 1F1(r; s+r; 2Bt)
    from elzaki_qm.special_functions import gamma, kummer_1f1

    B, sig, rho = 0.8, 1.5, 2.3
    G = Expr.power(sig - 1, 1 / gamma(sig)) * Expr.exp(-B)
    H = Expr.power(rho - 1, 1 / gamma(rho)) * Expr.exp(B)
    conv = convolve(G, H)
    for t in (0.3, 1.2, 4.0):
        ref = math.exp(-B * t) * t ** (sig + rho - 1) / gamma(sig + rho) * kummer_1f1(rho, sig + rho, 2 * B * t)
        assert conv(t) == pytest.approx(ref, rel=1e-12)


@given(conv_factor(), conv_factor(), st.floats(-2, 2), st.floats(-2, 2))
def test_linearity(f, g, alpha, beta):
    lhs = elzaki_transform(f * alpha + g * beta) if alpha or beta else None
    for u in (0.1, 0.2):
        rhs = alpha * elzaki_transform(f).evaluate(u) + beta * elzaki_transform(g).evaluate(u)
        direct = alpha * elzaki_numeric(f, u) + beta * elzaki_numeric(g, u)
        assert rhs == pytest.approx(direct, rel=1e-8, abs=1e-12)
        if lhs is not None:
            assert lhs.evaluate(u) == pytest.approx(rhs, rel=1e-9, abs=1e-13)


@pytest.mark.parametrize("row", [r for r in ROWS if r.radius > 0.5], ids=lambda r: r.name)
def test_table_row_numeric_at_half(row):
    s = table_samples(row, [0.5])[0]
    assert relative_gap(s["symbolic"], s["quadrature"]) <= 1e-6
