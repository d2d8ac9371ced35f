"""Reference table of Elzaki transform pairs.

Each row carries the function, its image written out directly from the
closed formula (not produced by :func:`elzaki_transform`), the matching
Laplace image where one exists, and an independent quadrature of the defining
integral. Tests and ``elzaki-qm verify`` compare all four.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

from scipy import integrate

from ..special_functions import gamma
from .expr import Expr, Term
from .image import TransformExpr
from .transform import elzaki_numeric, elzaki_quad, laplace_dual


@dataclass(frozen=True)
class TableRow:
    name: str
    f: Expr
    image: TransformExpr
    laplace: Callable[[float], float] | None
    quadrature: Callable[[float], float]

    @property
    def radius(self) -> float:
        return self.image.radius()


def _delta_quadrature(a: float) -> Callable[[float], float]:
    # narrow normalised Gaussian standing in for delta(t - a)
    width = 1e-5

    def q(u: float) -> float:
        g = lambda t: math.exp(-0.5 * ((t - a) / width) ** 2 - t / u) / (width * math.sqrt(2.0 * math.pi))
        lo = max(0.0, a - 12.0 * width)
        return u * integrate.quad(g, lo, a + 12.0 * width, points=[a], epsabs=0.0, epsrel=1e-12)[0]

    return q


def appendix_table(a: float = 0.7, b: float = 1.3, n: int = 3, order: float = 2.5, delay: float = 0.4) -> list[TableRow]:
    """Table rows instantiated at the given parameters.

    Args:
        a: rate / frequency parameter used by most rows.
        b: second frequency for the damped oscillator rows.
        n: integer order for the power rows.
        order: the real order ``a`` of the ``t^(a-1)/Gamma(a)`` row.
        delay: shift of the Heaviside and delta rows.
    """
    T = TransformExpr.term
    fact = math.factorial
    quad2 = (1.0, 0.0, a * a)
    damped = (1.0, -2.0 * a, a * a + b * b)

    def gl(f: Expr, alpha: float = 0.0):
        return lambda u: elzaki_numeric(f, u, nodes=64, alpha=alpha)

    def piecewise(f: Expr, at: float):
        return lambda u: elzaki_quad(f, u, breakpoints=(at,))

    rows = []

    def add(name, f, image, laplace, quadrature=None):
        rows.append(TableRow(name, f, image, laplace, quadrature or gl(f)))

    add("t^n", Expr.power(n), T(fact(n), n + 2), lambda s: fact(n) / s ** (n + 1))
    f = Expr.power(order - 1.0, 1.0 / gamma(order))
    add("t^(a-1)/Gamma(a)", f, T(1.0, order + 1.0), lambda s: s**-order, gl(f, order - 1.0))
    add("exp(a t)", Expr.exp(a), T(1.0, 2, [((1.0, -a), -1)]), lambda s: 1.0 / (s - a))
    add(
        "t^(n-1) exp(a t)/(n-1)!",
        Expr.power(n - 1) * Expr.exp(a) / fact(n - 1),
        T(1.0, n + 1, [((1.0, -a), -n)]),
        lambda s: (s - a) ** -n,
    )
    add("sin(a t)", Expr.osc("sin", a), T(a, 3, [(quad2, -1)]), lambda s: a / (s * s + a * a))
    add("cos(a t)", Expr.osc("cos", a), T(1.0, 2, [(quad2, -1)]), lambda s: s / (s * s + a * a))
    add("sinh(a t)", Expr.osc("sinh", a), T(a, 3, [((1.0, 0.0, -a * a), -1)]), lambda s: a / (s * s - a * a))
    # numerator u^2, forced by L[cosh at] = s/(s^2 - a^2)
    add("cosh(a t)", Expr.osc("cosh", a), T(1.0, 2, [((1.0, 0.0, -a * a), -1)]), lambda s: s / (s * s - a * a))
    add(
        "exp(a t) sin(b t)",
        Expr.exp(a) * Expr.osc("sin", b),
        T(b, 3, [(damped, -1)]),
        lambda s: b / ((s - a) ** 2 + b * b),
    )
    add(
        "exp(a t) cos(b t)",
        Expr.exp(a) * Expr.osc("cos", b),
        T(1.0, 2, [((1.0, -a), 1), (damped, -1)]),
        lambda s: (s - a) / ((s - a) ** 2 + b * b),
    )
    # the denominator is squared, as d/ds of a/(s^2 + a^2) shows
    add(
        "t sin(a t)",
        Expr.power(1) * Expr.osc("sin", a),
        T(2.0 * a, 4, [(quad2, -2)]),
        lambda s: 2.0 * a * s / (s * s + a * a) ** 2,
    )
    f = Expr.heaviside(delay)
    add("H(t-a)", f, T(1.0, 2, delay=delay), lambda s: math.exp(-delay * s) / s, piecewise(f, delay))
    add("delta(t-a)", Expr.delta(delay), T(1.0, 1, delay=delay), lambda s: math.exp(-delay * s), _delta_quadrature(delay))
    add("J0(a t)", Expr.osc("j0", a), T(1.0, 2, [(quad2, -0.5)]), lambda s: 1.0 / math.sqrt(s * s + a * a))
    # delayed form: (t-a)^(n-1)/Gamma(n) H(t-a)
    f = Expr.of(Term(1.0 / gamma(n), float(n - 1), step="H", delay=delay))
    add(
        "(t-a)^(n-1)/Gamma(n) H(t-a)",
        f,
        T(1.0, n + 1, delay=delay),
        lambda s: math.exp(-delay * s) / s**n,
        piecewise(f, delay),
    )
    return rows


def table_samples(row: TableRow, us=(0.1, 0.3)) -> list[dict]:
    """Symbolic, quadrature and Laplace-dual values of a row at each u."""
    out = []
    for u in us:
        entry = {"u": float(u), "symbolic": float(row.image.evaluate(u)), "quadrature": float(row.quadrature(u))}
        if row.laplace is not None:
            entry["laplace_dual"] = laplace_dual(row.laplace, u)
        out.append(entry)
    return out


def relative_gap(x: float, y: float) -> float:
    scale = max(abs(x), abs(y))
    return 0.0 if scale == 0.0 else abs(x - y) / scale
