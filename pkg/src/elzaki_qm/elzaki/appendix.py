"""Worked problems solved end to end in transform space.

Each solver builds the transformed equation with :class:`ImageOperator`, solves
it for T(u), and inverts. Nothing about the answer is typed in by hand.

A caution on uniqueness: for ``y'' + x y' - y = 0, y(0) = 0, y'(0) = 1`` the
transformed equation ``T' + (1/u^3 - 3/u) T = 1`` is solved by ``u^3`` and also
by ``u^3 + c u^3 exp(1/(2u^2))``; only ``c = 0`` is an image of a class-A
function. :func:`nonunique_example` returns that operator for inspection.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from ..errors import DomainError
from .expr import Expr
from .image import TransformExpr
from .operator import ImageOperator
from .transform import derivative_image, inverse_elzaki, t_multiplied_image


def bessel_image_equation(a: float, slope: float = 0.0) -> ImageOperator:
    """Transformed ``x y'' + y' + a^2 x y = 0`` with ``y(0) = 1, y'(0) = slope``.

    The unknown slope drops out of the result, which is why the problem is
    well posed with only ``y(0)`` given.
    """
    Y = ImageOperator.identity()
    y1 = derivative_image(Y, 1, [1.0])
    y2 = derivative_image(Y, 2, [1.0, slope])
    return t_multiplied_image(y2, 1) + y1 + t_multiplied_image(Y, 1).scaled(a * a)


def bessel_image(a: float) -> TransformExpr:
    """Image of the regular solution with ``y(0) = 1``."""
    if a == 0.0:
        raise DomainError("the Bessel demo needs a != 0")
    T = bessel_image_equation(a).solve()
    # y(0) is the coefficient of u^2 as u -> 0
    lead = sum(t.coeff for t in T.terms if t.power == 2.0)
    return T * (1.0 / lead)


def solve_bessel_zeroth(a: float) -> Expr:
    """Solve ``x y'' + y' + a^2 x y = 0, y(0) = 1``; returns ``J0(a x)``."""
    return inverse_elzaki(bessel_image(a))


def shm_image(omega: float, y0: float, yp0: float) -> TransformExpr:
    if omega <= 0.0:
        raise DomainError("omega must be positive")
    Y = ImageOperator.identity()
    op = derivative_image(Y, 2, [y0, yp0]) + Y.scaled(omega * omega)
    return op.solve()


def solve_shm(omega: float, y0: float, yp0: float) -> Expr:
    """Solve ``y'' + omega^2 y = 0`` with ``y(0) = y0, y'(0) = yp0``."""
    return inverse_elzaki(shm_image(omega, y0, yp0))


@dataclass(frozen=True)
class WellLevel:
    m: int
    k: float
    energy: float


def infinite_square_well_levels(width: float, count: int, hbar: float = 1.0, mass: float = 1.0) -> list[WellLevel]:
    """Levels of a particle confined to ``0 <= x <= width``.

    Inside the well ``psi'' + k^2 psi = 0`` with ``psi(0) = 0``; the
    oscillator solution is ``psi'(0) sin(k x)/k`` and ``psi(width) = 0`` fixes
    ``k_m = m pi / width`` with ``E_m = hbar^2 k_m^2 / (2 mass)``.
    """
    if width <= 0.0 or count < 1:
        raise DomainError("width must be positive and count at least 1")
    levels = []
    for m in range(1, count + 1):
        k = m * math.pi / width
        levels.append(WellLevel(m, k, hbar * hbar * k * k / (2.0 * mass)))
    return levels


def nonunique_example() -> ImageOperator:
    """Transformed ``y'' + x y' - y = 0`` with ``y(0) = 0, y'(0) = 1``."""
    Y = ImageOperator.identity()
    y1 = derivative_image(Y, 1, [0.0])
    y2 = derivative_image(Y, 2, [0.0, 1.0])
    return y2 + t_multiplied_image(y1, 1) + Y.scaled(-1.0)


_OSC_AT_ZERO = {"1": (1.0, 0.0), "sin": (0.0, 1.0), "cos": (1.0, 0.0), "sinh": (0.0, 1.0), "cosh": (1.0, 0.0), "j0": (1.0, 0.0)}


def value_and_slope_at_zero(f: Expr) -> tuple[float, float]:
    """Exact ``f(0)`` and ``f'(0)`` for undelayed terms with integer powers."""
    value = slope = 0.0
    for t in f.terms:
        if t.step or t.kind not in _OSC_AT_ZERO or t.power != int(t.power):
            raise DomainError("initial values need undelayed elementary terms with integer powers")
        osc0, osc1 = _OSC_AT_ZERO[t.kind]
        if t.power == 0:
            value += t.coeff * osc0
            slope += t.coeff * (t.rate * osc0 + t.freq * osc1)
        elif t.power == 1:
            slope += t.coeff * osc0
    return float(value), float(slope)
