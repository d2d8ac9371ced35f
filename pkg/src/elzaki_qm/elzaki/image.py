"""Symbolic functions of the transform variable u.

A :class:`TransformTerm` is::

    coeff * u^power * prod_i P_i(u)^(e_i) * exp(-delay/u)

where every ``P_i`` is a polynomial stored as an ascending coefficient tuple
with constant term 1 (so ``(1, -2)`` is ``1 - 2u`` and ``(1, 0, 9)`` is
``1 + 9u^2``). Exponents may be negative or fractional, which covers the
rational rows of the transform table as well as ``(1 + a^2 u^2)^(-1/2)`` and
the Kummer images ``(1 + B u)^(-sigma) (1 - B u)^(-rho)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from fractions import Fraction

import numpy as np
from numpy.polynomial import polynomial as npoly

from ..errors import DomainError, UnsupportedTermError
from .expr import _snap, fmt, is_int

Poly = tuple[float, ...]
ZERO_TOL = 1e-11


def _trim(c) -> np.ndarray:
    c = np.atleast_1d(np.asarray(c, dtype=float))
    scale = np.max(np.abs(c)) if c.size else 0.0
    nz = np.nonzero(np.abs(c) > 1e-14 * scale)[0] if scale > 0 else []
    if len(nz) == 0:
        return np.zeros(1)
    return c[: nz[-1] + 1]


def normalize_poly(coeffs) -> tuple[float, int, Poly]:
    """Split a polynomial into ``scale * u^shift * P(u)`` with ``P(0) = 1``."""
    c = _trim(coeffs)
    if not np.any(c):
        raise DomainError("zero polynomial cannot be a factor")
    shift = int(np.nonzero(c)[0][0])
    c = c[shift:]
    scale = float(c[0])
    poly = tuple(_snap(x / scale) for x in c)
    return scale, shift, poly


def poly_str(p: Poly, var: str = "u") -> str:
    parts = []
    for j, c in enumerate(p):
        if c == 0.0:
            continue
        mono = "" if j == 0 else (var if j == 1 else f"{var}^{j}")
        mag = abs(c)
        if mono and fmt(mag) == "1":
            body = mono
        elif mono:
            body = f"{fmt(mag)}*{mono}"
        else:
            body = fmt(mag)
        if not parts:
            parts.append(("-" if c < 0 else "") + body)
        else:
            parts.append((" - " if c < 0 else " + ") + body)
    return "".join(parts)


def _exp_str(e: float) -> str:
    f = Fraction(e).limit_denominator(64)
    if abs(float(f) - e) < 1e-12 and f.denominator != 1:
        return f"({f.numerator}/{f.denominator})"
    return fmt(e)


@dataclass(frozen=True)
class TransformTerm:
    coeff: float = 1.0
    power: float = 0.0
    factors: tuple[tuple[Poly, float], ...] = ()
    delay: float = 0.0

    @classmethod
    def build(cls, coeff: float, power: float, factors, delay: float = 0.0) -> "TransformTerm":
        """Normalise raw (coefficients, exponent) pairs into a canonical term."""
        acc: dict[Poly, float] = {}
        for coeffs, e in factors:
            if e == 0.0:
                continue
            scale, shift, poly = normalize_poly(coeffs)
            if scale < 0.0 and not is_int(e):
                raise DomainError("non-integer power of a polynomial that is negative at u = 0")
            coeff *= scale**e
            power += shift * e
            if len(poly) > 1:
                acc[poly] = acc.get(poly, 0.0) + e
        items = tuple(sorted((p, _snap(e)) for p, e in acc.items() if abs(e) > 1e-13))
        return cls(float(coeff), _snap(power), items, _snap(delay))

    # -- structure ---------------------------------------------------------
    def shape_key(self) -> tuple:
        return (self.power, self.factors, self.delay)

    @property
    def is_rational(self) -> bool:
        return is_int(self.power) and all(is_int(e) for _, e in self.factors)

    def radius(self) -> float:
        """Largest u such that (0, u) lies inside the convergence region."""
        worst = 0.0
        for p, e in self.factors:
            if e > 0 and is_int(e):
                continue
            for root in np.roots(p[::-1]):
                worst = max(worst, (1.0 / root).real)
        return math.inf if worst <= 0.0 else 1.0 / worst

    # -- algebra ---------------------------------------------------------------
    def __mul__(self, other: "TransformTerm") -> "TransformTerm":
        return TransformTerm.build(
            self.coeff * other.coeff,
            self.power + other.power,
            list(self.factors) + list(other.factors),
            self.delay + other.delay,
        )

    def scaled(self, s: float) -> "TransformTerm":
        return replace(self, coeff=self.coeff * s)

    def __pow__(self, k: float) -> "TransformTerm":
        if self.coeff < 0.0 and not is_int(k):
            raise DomainError("non-integer power of a negative coefficient")
        return TransformTerm.build(self.coeff**k, self.power * k, [(p, e * k) for p, e in self.factors], self.delay * k)

    def derivative(self) -> list["TransformTerm"]:
        out = []
        if self.power != 0.0:
            out.append(TransformTerm.build(self.coeff * self.power, self.power - 1.0, self.factors, self.delay))
        for i, (p, e) in enumerate(self.factors):
            dp = npoly.polyder(np.asarray(p))
            others = [f for j, f in enumerate(self.factors) if j != i] + [(p, e - 1.0)]
            for j, c in enumerate(dp):
                if c != 0.0:
                    out.append(TransformTerm.build(self.coeff * e * c, self.power + j, others, self.delay))
        if self.delay != 0.0:
            out.append(TransformTerm.build(self.coeff * self.delay, self.power - 2.0, self.factors, self.delay))
        return out

    def __call__(self, u):
        u = np.asarray(u, dtype=float)
        val = self.coeff * np.power(u, self.power)
        for p, e in self.factors:
            val = val * np.power(npoly.polyval(u, p), e)
        if self.delay:
            val = val * np.exp(-self.delay / u)
        return val

    # -- text ------------------------------------------------------------------
    def body_str(self) -> tuple[float, str]:
        """Return (coefficient, printed factors) with the sign left to the caller."""
        num, den = [], []
        if self.power > 0:
            num.append("u" if self.power == 1 else f"u^{_exp_str(self.power)}")
        elif self.power < 0:
            den.append("u" if self.power == -1 else f"u^{_exp_str(-self.power)}")
        for p, e in self.factors:
            s = f"({poly_str(p)})"
            if e > 0:
                num.append(s if e == 1 else f"{s}^{_exp_str(e)}")
            elif e == -1:
                den.append(s)
            elif e == -0.5:
                den.append(f"sqrt{s}")
            else:
                den.append(f"{s}^{_exp_str(-e)}")
        if self.delay:
            num.append(f"exp(-{fmt(self.delay)}/u)")
        mag = abs(self.coeff)
        if not num:
            top = fmt(mag)
        elif fmt(mag) == "1":
            top = "*".join(num)
        else:
            top = fmt(mag) + "*" + "*".join(num)
        if not den:
            return self.coeff, top
        bottom = den[0] if len(den) == 1 else "(" + "*".join(den) + ")"
        return self.coeff, f"{top}/{bottom}"

    def to_prefix(self) -> str:
        parts = [f"(term {self.coeff!r} (u {self.power!r})"]
        for p, e in self.factors:
            parts.append(f" (poly {e!r} " + " ".join(repr(c) for c in p) + ")")
        if self.delay:
            parts.append(f" (expinv {self.delay!r})")
        return "".join(parts) + ")"


def _signature(t: TransformTerm) -> tuple:
    frac = lambda e: _snap(e - math.floor(e + 1e-12))
    return (t.delay, frac(t.power), tuple((p, frac(e)) for p, e in t.factors if not is_int(e)))


@dataclass(frozen=True)
class TransformExpr:
    """Immutable sum of :class:`TransformTerm` objects."""

    terms: tuple[TransformTerm, ...] = ()

    @classmethod
    def term(cls, coeff: float = 1.0, power: float = 0.0, factors=(), delay: float = 0.0) -> "TransformExpr":
        return cls((TransformTerm.build(coeff, power, factors, delay),)).merged()

    @classmethod
    def monomial(cls, power: float, coeff: float = 1.0) -> "TransformExpr":
        return cls.term(coeff, power)

    # -- algebra -------------------------------------------------------------
    def merged(self) -> "TransformExpr":
        acc: dict[tuple, TransformTerm] = {}
        for t in self.terms:
            k = t.shape_key()
            acc[k] = t if k not in acc else replace(acc[k], coeff=acc[k].coeff + t.coeff)
        scale = max((abs(t.coeff) for t in acc.values()), default=0.0)
        kept = [t for t in acc.values() if abs(t.coeff) > 1e-13 * scale]
        return TransformExpr(tuple(sorted(kept, key=lambda t: (t.delay, t.power, t.factors))))

    def __add__(self, other) -> "TransformExpr":
        if not isinstance(other, TransformExpr):
            other = TransformExpr.monomial(0.0, float(other)) if other else TransformExpr()
        return TransformExpr(self.terms + other.terms).merged()

    __radd__ = __add__

    def __neg__(self) -> "TransformExpr":
        return TransformExpr(tuple(t.scaled(-1.0) for t in self.terms))

    def __sub__(self, other) -> "TransformExpr":
        if not isinstance(other, TransformExpr):
            other = TransformExpr.monomial(0.0, float(other))
        return self + (-other)

    def __mul__(self, other) -> "TransformExpr":
        if not isinstance(other, TransformExpr):
            s = float(other)
            return TransformExpr(tuple(t.scaled(s) for t in self.terms)).merged()
        return TransformExpr(tuple(a * b for a in self.terms for b in other.terms)).merged()

    __rmul__ = __mul__

    def __truediv__(self, other) -> "TransformExpr":
        if not isinstance(other, TransformExpr):
            return self * (1.0 / float(other))
        single = other.combined()
        if len(single.terms) != 1:
            raise UnsupportedTermError("division by a sum that does not combine into one term")
        return self * TransformExpr((single.terms[0] ** -1.0,))

    def __pow__(self, k: float) -> "TransformExpr":
        single = self.combined()
        if len(single.terms) != 1:
            raise UnsupportedTermError("only single-term images can be raised to a power")
        return TransformExpr((single.terms[0] ** k,))

    def derivative(self, order: int = 1) -> "TransformExpr":
        out = self
        for _ in range(order):
            out = TransformExpr(tuple(d for t in out.terms for d in t.derivative())).merged()
        return out

    def combined(self) -> "TransformExpr":
        """Bring terms that differ only by integer exponents over a common denominator.

        Common polynomial factors between the resulting numerator and the
        denominators are cancelled, so ``u^3/(1-au) + a u^4/(1-au)^2``
        collapses to ``u^3/(1-au)^2``.
        """
        groups: dict[tuple, list[TransformTerm]] = {}
        for t in self.terms:
            groups.setdefault(_signature(t), []).append(t)
        out = []
        for terms in groups.values():
            out.extend(_combine_group(terms))
        return TransformExpr(tuple(out)).merged()

    # -- evaluation --------------------------------------------------------------
    def radius(self) -> float:
        return min((t.radius() for t in self.terms), default=math.inf)

    def evaluate(self, u, check: bool = True):
        """Numeric value at ``u``; outside the convergence region raises DomainError."""
        arr = np.asarray(u, dtype=float)
        if check:
            if np.any(arr <= 0.0):
                raise DomainError("the transform variable must be positive")
            rad = self.radius()
            if np.any(arr >= rad):
                raise DomainError(f"u must lie below the convergence radius {rad:.12g}")
        total = np.zeros_like(arr)
        for t in self.terms:
            total = total + t(arr)
        if not np.all(np.isfinite(total)):
            raise DomainError("transform image is not finite at the requested u")
        return float(total) if total.ndim == 0 else total

    __call__ = evaluate

    def is_close(self, other: "TransformExpr", samples=None, rel: float = 1e-10) -> bool:
        """Numeric identity check at sample points inside both regions."""
        rad = min(self.radius(), other.radius())
        top = min(rad * 0.9, 2.0) if math.isfinite(rad) else 2.0
        us = np.linspace(0.05, 1.0, 7) * top if samples is None else np.asarray(samples, dtype=float)
        a, b = self.evaluate(us), other.evaluate(us)
        return bool(np.all(np.abs(a - b) <= rel * np.maximum(np.abs(a), np.abs(b)) + 1e-300))

    # -- text ----------------------------------------------------------------------
    def __str__(self) -> str:
        if not self.terms:
            return "0"
        out = []
        for i, t in enumerate(self.terms):
            c, body = t.body_str()
            if i == 0:
                out.append(("-" if c < 0 else "") + body)
            else:
                out.append((" - " if c < 0 else " + ") + body)
        return "".join(out)

    def __repr__(self) -> str:
        return f"TransformExpr({self})"

    def to_prefix(self) -> str:
        return "(sum" + "".join(" " + t.to_prefix() for t in self.terms) + ")"


def _combine_group(terms: list[TransformTerm]) -> list[TransformTerm]:
    if len(terms) == 1:
        return terms
    delay = terms[0].delay
    polys = sorted({p for t in terms for p, _ in t.factors})
    expo = [{p: e for p, e in t.factors} for t in terms]
    low_u = min(t.power for t in terms)
    low = {p: min(d.get(p, 0.0) for d in expo) for p in polys}
    num, size = np.zeros(1), np.zeros(1)
    for t, d in zip(terms, expo):
        piece = np.zeros(int(round(t.power - low_u)) + 1)
        piece[-1] = t.coeff
        for p in polys:
            k = int(round(d.get(p, 0.0) - low[p]))
            for _ in range(k):
                piece = npoly.polymul(piece, p)
        num = npoly.polyadd(num, piece)
        size = npoly.polyadd(size, np.abs(piece))
    # coefficients that cancelled down to roundoff are zero; polyadd trims, so realign lengths
    width = max(len(num), len(size))
    num, size = np.pad(num, (0, width - len(num))), np.pad(size, (0, width - len(size)))
    num = np.where(np.abs(num) <= ZERO_TOL * size, 0.0, num)
    num = _trim(num)
    if not np.any(np.abs(num) > ZERO_TOL * max(abs(t.coeff) for t in terms)):
        return []
    # cancel denominators that divide the numerator exactly
    for p in polys:
        while low[p] < 0:
            q, r = npoly.polydiv(num, np.asarray(p))
            if np.max(np.abs(_trim(r)), initial=0.0) > ZERO_TOL * np.max(np.abs(num)):
                break
            num = _trim(q)
            low[p] += 1
    factors = [(p, e) for p, e in low.items()] + [(tuple(num), 1.0)]
    return [TransformTerm.build(1.0, low_u, factors, delay)]
