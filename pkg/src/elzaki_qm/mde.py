"""Transform-space solution of the model equation.

The model equation is::

    y chi'' + A chi' + (C - B^2 y) chi = 0,    chi(0) = 0,  B > 0.

Its image satisfies ``(1 - B^2 u^2) T' + ((A - 3)/u + C + B^2 u) T = 0``, which
integrates to ``T = K u^(3-A) (1 + B u)^(-(p + C/B)) (1 - B u)^(-p)`` with
``p = -(A - 2 + C/B)/2``. Writing T as ``K (1/u) g(u) h(u)`` and inverting with
the convolution theorem gives the Kummer-function solution; single-valuedness
of ``(1 - B u)^(-p)`` demands ``p = -n``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .elzaki.expr import Expr
from .elzaki.image import TransformExpr
from .elzaki.operator import ImageOperator
from .elzaki.transform import convolve, derivative_image, inverse_elzaki, t_multiplied_image
from .errors import DomainError
from .exppoly import ExpPoly, kummer_exppoly
from .special_functions import gamma, kummer_1f1

QUANT_TOL = 1e-9


@dataclass(frozen=True)
class MdeParams:
    A: float
    B: float
    C: float

    def __post_init__(self):
        if not self.B > 0.0:
            raise DomainError(f"the decay parameter B must be positive, got {self.B:g}")

    @property
    def p(self) -> float:
        return -(self.A - 2.0 + self.C / self.B) / 2.0 + 0.0


@dataclass(frozen=True)
class TransformFactors:
    """``T(u) = K (1/u) g(u) h(u)`` with

    ``g = u^(p + C/B + 1) / (1 + B u)^(p + C/B)`` and ``h = u^(p + 1) / (1 - B u)^p``.
    """

    p: float
    B: float
    g_num_power: float
    g_den_power: float
    h_num_power: float
    h_den_power: float

    def g(self) -> TransformExpr:
        return TransformExpr.term(1.0, self.g_num_power, [((1.0, self.B), -self.g_den_power)])

    def h(self) -> TransformExpr:
        return TransformExpr.term(1.0, self.h_num_power, [((1.0, -self.B), -self.h_den_power)])

    def image(self, K: float = 1.0) -> TransformExpr:
        return TransformExpr.monomial(-1.0, K) * self.g() * self.h()


def transform_space_solution(params: MdeParams) -> TransformFactors:
    """Return p and the g/h factorisation of the image of chi."""
    if not params.B > 0.0:
        raise DomainError("B must be positive")
    p, cb = params.p, params.C / params.B
    return TransformFactors(p, params.B, p + cb + 1.0, p + cb, p + 1.0, p)


def image_equation(params: MdeParams, slope: float = 1.0) -> ImageOperator:
    """Transformed model equation assembled from the derivative rules.

    ``slope`` is chi'(0); it cancels, so the returned operator has no
    inhomogeneous part for any value.
    """
    A, B, C = params.A, params.B, params.C
    X = ImageOperator.identity()
    d1 = derivative_image(X, 1, [0.0])
    d2 = derivative_image(X, 2, [0.0, slope])
    return t_multiplied_image(d2, 1) + d1.scaled(A) + X.scaled(C) + t_multiplied_image(X, 1).scaled(-B * B)


def derived_image(params: MdeParams) -> TransformExpr:
    """Solve :func:`image_equation` directly (unit integration constant)."""
    return image_equation(params).solve()


def quantization_condition(params: MdeParams, n: int) -> float:
    """Residual ``p + n``; zero when the state with n radial nodes is allowed."""
    if n < 0:
        raise DomainError("n must be a non-negative integer")
    return params.p + n


@dataclass(frozen=True)
class ClosedFormChi:
    """``K exp(-B y) y^(b-1) 1F1(p; b; 2 B y) / Gamma(b)`` with ``b = 2p + C/B``.

    ``K`` defaults to 1 and is fixed later by normalisation.
    """

    decay: float
    power_exponent: float
    f11_a: float
    f11_b: float
    f11_scale: float
    n: int
    K: float = 1.0
    normalization_pending: bool = True

    @property
    def prefactor(self) -> float:
        return self.K / gamma(self.f11_b)

    def __call__(self, y):
        y = np.asarray(y, dtype=float)
        val = self.prefactor * np.exp(-self.decay * y) * y**self.power_exponent * kummer_1f1(self.f11_a, self.f11_b, self.f11_scale * y)
        return float(val) if val.ndim == 0 else val

    def exppoly(self) -> ExpPoly:
        return kummer_exppoly(self.prefactor, self.power_exponent, self.decay, 1, self.n, self.f11_b, self.f11_scale)

    def as_expr(self) -> Expr:
        """The same function as a grammar expression in t = y."""
        ep = self.exppoly()
        out = Expr()
        for c, e in ep.terms:
            out = out + Expr.power(e, c) * Expr.exp(-self.decay)
        return out


def closed_form_chi(params: MdeParams, n: int) -> ClosedFormChi:
    """Quantised real-space solution with n nodes.

    Raises:
        DomainError: p is not -n, or C/B - 2n <= 0 (non-normalisable state).
    """
    if n < 0 or int(n) != n:
        raise DomainError("n must be a non-negative integer")
    p, cb = params.p, params.C / params.B
    if abs(p + n) > QUANT_TOL * max(1.0, abs(p)):
        raise DomainError(f"parameters are not quantised for n={n}: p = {p:.12g}, expected {-n}")
    b = cb - 2.0 * n
    if not b > 0.0:
        raise DomainError(f"C/B - 2n = {b:.6g} must be positive for n={n}; the state is not normalisable")
    return ClosedFormChi(params.B, b - 1.0, -float(n), b, 2.0 * params.B, int(n))


def chi_by_convolution(params: MdeParams) -> Expr:
    """General (unquantised) solution by convolving the inverses of g and h.

    Requires ``p > 0`` and ``p + C/B > 0`` so that both factors invert to
    locally integrable functions; the result is the Kummer form with K = 1.
    """
    f = transform_space_solution(params)
    if f.p <= 0.0 or f.g_den_power <= 0.0:
        raise DomainError("the convolution route needs p > 0 and p + C/B > 0")
    G = inverse_elzaki(f.g())
    H = inverse_elzaki(f.h())
    return convolve(G, H)


def chi_by_inversion(params: MdeParams) -> Expr:
    """Inverse transform of ``(1/u) g h`` taken in one step."""
    return inverse_elzaki(transform_space_solution(params).image())


def _five_point(f, y: float, h: float) -> tuple[float, float, float]:
    ys = y + h * np.arange(-2, 3)
    v = np.asarray(f(ys), dtype=float)
    d1 = (v[0] - 8.0 * v[1] + 8.0 * v[3] - v[4]) / (12.0 * h)
    d2 = (-v[0] + 16.0 * v[1] - 30.0 * v[2] + 16.0 * v[3] - v[4]) / (12.0 * h * h)
    return float(v[2]), d1, d2


def mde_residual(chi, params: MdeParams, y: float, h: float | None = None, analytic: bool = False) -> float:
    """``|y chi'' + A chi' + (C - B^2 y) chi|`` at ``y``.

    Derivatives come from 5-point central differences with
    ``h = 1e-4 max(1, y)`` unless ``analytic`` is set, in which case the
    closed form is differentiated exactly.
    """
    if not y > 0.0:
        raise DomainError("y must be positive")
    if analytic:
        ep = chi.exppoly()
        v, d1, d2 = ep(y), ep.derivative()(y), ep.nth_derivative(2)(y)
    else:
        h = 1e-4 * max(1.0, y) if h is None else h
        v, d1, d2 = _five_point(chi, y, h)
    A, B, C = params.A, params.B, params.C
    return abs(y * d2 + A * d1 + (C - B * B * y) * v)


def residual_tolerance(chi, y: float) -> float:
    return 1e-6 * max(1.0, abs(float(chi(y))))


def quantised_params(B: float, C: float, n: int) -> MdeParams:
    """The A that makes p = -n for given B, C."""
    return MdeParams(2.0 + 2.0 * n - C / B, B, C)


__all__ = [
    "MdeParams",
    "TransformFactors",
    "ClosedFormChi",
    "transform_space_solution",
    "image_equation",
    "derived_image",
    "quantization_condition",
    "closed_form_chi",
    "chi_by_convolution",
    "chi_by_inversion",
    "mde_residual",
    "residual_tolerance",
    "quantised_params",
]
