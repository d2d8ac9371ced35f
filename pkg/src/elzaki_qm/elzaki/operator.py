"""Transformed linear ODEs in the image variable.

An :class:`ImageOperator` stands for ``sum_j c_j(u) T^(j)(u) + r(u)``, the
image of a linear differential expression in f. Starting from the identity
(``T`` itself) and applying :func:`derivative_image` and
:func:`t_multiplied_image` builds the transformed equation term by term, which
is how the first-order equations for the model equation and the Bessel problem
are obtained here rather than typed in by hand.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numpy.polynomial import polynomial as npoly

from ..errors import UnsupportedTermError
from .image import TransformExpr


@dataclass(frozen=True)
class ImageOperator:
    coeffs: tuple[TransformExpr, ...]
    rhs: TransformExpr = TransformExpr()

    @classmethod
    def identity(cls) -> "ImageOperator":
        return cls((TransformExpr.monomial(0.0),))

    @property
    def order(self) -> int:
        nz = [j for j, c in enumerate(self.coeffs) if c.terms]
        return max(nz, default=-1)

    def scaled(self, s) -> "ImageOperator":
        s = s if isinstance(s, TransformExpr) else TransformExpr.monomial(0.0, float(s))
        return ImageOperator(tuple((c * s).combined() for c in self.coeffs), (self.rhs * s).combined())

    def shifted(self, r: TransformExpr) -> "ImageOperator":
        return ImageOperator(self.coeffs, (self.rhs + r).combined())

    def __add__(self, other: "ImageOperator") -> "ImageOperator":
        n = max(len(self.coeffs), len(other.coeffs))
        pad = lambda cs: list(cs) + [TransformExpr()] * (n - len(cs))
        coeffs = tuple((a + b).combined() for a, b in zip(pad(self.coeffs), pad(other.coeffs)))
        return ImageOperator(coeffs, (self.rhs + other.rhs).combined())

    def differentiated(self) -> "ImageOperator":
        """d/du of the whole expression: c_j' T^(j) + c_j T^(j+1)."""
        out = [TransformExpr()] * (len(self.coeffs) + 1)
        for j, c in enumerate(self.coeffs):
            out[j] = out[j] + c.derivative()
            out[j + 1] = out[j + 1] + c
        return ImageOperator(tuple(x.combined() for x in out), self.rhs.derivative().combined())

    def apply(self, T: TransformExpr) -> TransformExpr:
        """Residual of the equation for a candidate image T."""
        total = self.rhs
        for j, c in enumerate(self.coeffs):
            if c.terms:
                total = total + c * T.derivative(j)
        return total.combined()

    def solve(self) -> TransformExpr:
        """Solve an algebraic or first-order homogeneous image equation.

        The first-order solution is returned with unit multiplicative constant.
        """
        order = self.order
        if order == 0:
            return (-self.rhs / self.coeffs[0]).combined()
        if order == 1 and not self.rhs.terms:
            return solve_first_order(self.coeffs[1], self.coeffs[0])
        raise UnsupportedTermError("only algebraic or first-order homogeneous image equations are solved")

    def __str__(self) -> str:
        names = ["T", "T'", "T''", "T'''"]
        parts = [f"({c})*{names[j]}" for j, c in enumerate(self.coeffs) if c.terms]
        if self.rhs.terms:
            parts.append(f"({self.rhs})")
        return " + ".join(parts) + " = 0"


def _laurent(expr: TransformExpr) -> dict[int, float]:
    out: dict[int, float] = {}
    for t in expr.combined().terms:
        if t.delay or not t.is_rational or any(e < 0 for _, e in t.factors):
            raise UnsupportedTermError("coefficients must be Laurent polynomials in u")
        poly = np.array([t.coeff])
        for p, e in t.factors:
            poly = npoly.polymul(poly, npoly.polypow(p, int(round(e))))
        base = int(round(t.power))
        for j, c in enumerate(poly):
            out[base + j] = out.get(base + j, 0.0) + float(c)
    return {k: v for k, v in out.items() if v != 0.0}


def solve_first_order(c1: TransformExpr, c0: TransformExpr) -> TransformExpr:
    """Integrate ``c1 T' + c0 T = 0`` by partial fractions of ``-c0/c1``.

    Simple poles at ``u = r`` give ``(1 - u/r)^res``, a simple pole at 0 gives
    ``u^res``, a double pole at 0 gives ``exp(-a/u)``; conjugate poles with real
    residues combine into a real quadratic factor.
    """
    num_l, den_l = {k: -v for k, v in _laurent(c0).items()}, _laurent(c1)
    if not den_l:
        raise UnsupportedTermError("leading coefficient vanishes identically")
    low = min(list(num_l) + list(den_l))
    N = np.zeros(max(list(num_l) + [low]) - low + 1)
    D = np.zeros(max(den_l) - low + 1)
    for k, v in num_l.items():
        N[k - low] = v
    for k, v in den_l.items():
        D[k - low] = v
    while len(N) > 1 and len(D) > 1 and N[0] == 0.0 and D[0] == 0.0:
        N, D = N[1:], D[1:]
    z = int(np.nonzero(D)[0][0])
    Dt = D[z:]
    if np.any(N) and len(np.trim_zeros(N, "b")) >= len(D):
        raise UnsupportedTermError("polynomial part in T'/T integrates to exp(polynomial)")
    power, delay = 0.0, 0.0
    if z == 1:
        power = npoly.polyval(0.0, N) / Dt[0]
    elif z == 2:
        n0, n1 = N[0], (N[1] if len(N) > 1 else 0.0)
        d0, d1 = Dt[0], (Dt[1] if len(Dt) > 1 else 0.0)
        delay = n0 / d0
        power = (n1 * d0 - n0 * d1) / d0**2
    elif z > 2:
        raise UnsupportedTermError("pole of order above two at u = 0")
    roots = np.roots(Dt[::-1]) if len(Dt) > 1 else np.array([])
    for i in range(len(roots)):
        for j in range(i):
            if abs(roots[i] - roots[j]) <= 1e-9 * max(1.0, abs(roots[i])):
                raise UnsupportedTermError("repeated roots in the leading coefficient")
    dD = npoly.polyder(D)
    factors, seen = [], set()
    for i, r in enumerate(roots):
        if i in seen:
            continue
        res = npoly.polyval(r, N) / npoly.polyval(r, dD)
        if abs(r.imag) <= 1e-12 * abs(r):
            factors.append(((1.0, -1.0 / r.real), res.real))
            continue
        if abs(res.imag) > 1e-9 * max(1.0, abs(res)):
            raise UnsupportedTermError("complex residues leave the grammar")
        j = int(np.argmin(np.abs(roots - np.conj(r))))
        seen.add(j)
        inv = 1.0 / r
        factors.append(((1.0, -2.0 * inv.real, abs(inv) ** 2), res.real))
    if not math.isfinite(power):
        raise UnsupportedTermError("singular leading coefficient")
    return TransformExpr.term(1.0, power, factors, delay)
