"""Functions of the form exp(-k x^d) * sum_j c_j x^(e_j), with exact derivatives.

Every quantised closed form in this package (the MDE solution chi(y) and the
radial functions R(r)) is a power times a decaying exponential or Gaussian times
a terminating 1F1 polynomial, so it expands into this shape.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class ExpPoly:
    """``exp(-decay * x**degree) * sum(c * x**e for c, e in terms)``.

    ``degree`` is 1 (exponential) or 2 (Gaussian-type).
    """

    terms: tuple[tuple[float, float], ...]
    decay: float
    degree: int = 1

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        total = np.zeros_like(x)
        for c, e in self.terms:
            total = total + c * x**e
        out = np.exp(-self.decay * x**self.degree) * total
        return float(out) if out.ndim == 0 else out

    def derivative(self) -> "ExpPoly":
        acc: dict[float, float] = {}
        d = self.degree
        for c, e in self.terms:
            if e != 0.0:
                acc[e - 1.0] = acc.get(e - 1.0, 0.0) + c * e
            acc[e + d - 1.0] = acc.get(e + d - 1.0, 0.0) - c * self.decay * d
        terms = tuple(sorted((c, e) for e, c in acc.items() if c != 0.0))
        return ExpPoly(terms, self.decay, d)

    def nth_derivative(self, order: int) -> "ExpPoly":
        out = self
        for _ in range(order):
            out = out.derivative()
        return out

    def scaled(self, factor: float) -> "ExpPoly":
        return ExpPoly(tuple((c * factor, e) for c, e in self.terms), self.decay, self.degree)


def kummer_exppoly(
    prefactor: float,
    power: float,
    decay: float,
    degree: int,
    n: int,
    b: float,
    scale: float,
) -> ExpPoly:
    """Expand ``prefactor * x^power * exp(-decay x^degree) * 1F1(-n; b; scale x^degree)``."""
    from .special_functions import kummer_polynomial_coefficients

    coeffs = kummer_polynomial_coefficients(n, b)
    terms = tuple(
        (prefactor * c * scale**j, power + degree * j) for j, c in enumerate(coeffs)
    )
    return ExpPoly(terms, decay, degree)
