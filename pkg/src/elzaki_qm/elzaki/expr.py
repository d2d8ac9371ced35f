"""Closed grammar of real-space functions f(t).

A term is::

    coeff * t^power * exp(rate*t) * osc * [step]

with ``osc`` one of ``1, sin(b t), cos(b t), sinh(b t), cosh(b t), J0(b t)`` or
a Kummer factor ``1F1(a; b; kappa t)`` (whose power must equal ``b - 1``).
``step`` is empty, ``H`` or ``delta``. A Heaviside term is *delayed*: it means
``base(t - delay) * H(t - delay)`` where ``base`` is the same term without the
step, exactly like the table row ``(t-a)^(n-1)/Gamma(n) H(t-a)``. A delta term
is ``coeff * delta(t - delay)``. Literal products such as ``t * H(t - 1)`` are
rewritten into delayed form by :meth:`Expr.__mul__`.

Canonical form (see :meth:`Expr.canonical`) expands sinh/cosh into
exponentials, folds signs of frequencies, reduces Kummer factors that are
elementary, merges like terms and sorts by (power, rate, oscillator).
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, replace

import numpy as np

from ..errors import UnsupportedTermError
from ..special_functions import beta, bessel_j0, gamma, kummer_1f1, kummer_polynomial_coefficients

ONE, SIN, COS, SINH, COSH, J0, KUMMER = "1", "sin", "cos", "sinh", "cosh", "j0", "1f1"
KINDS = (ONE, SIN, COS, SINH, COSH, J0, KUMMER)
DECOMPOSABLE = (ONE, SIN, COS, SINH, COSH)
_KIND_ORDER = {k: i for i, k in enumerate(KINDS)}
_STEP_ORDER = {"": 0, "H": 1, "delta": 2}

INT_TOL = 1e-9
DROP_TOL = 1e-13


# real rate gaps below this keep integer-power convolutions in Kummer form
EXPAND_MIN_GAP = 0.5


def _snap(x: float) -> float:
    """Round structural parameters so that 0.1 + 0.2 and 0.3 compare equal."""
    if x == 0.0:
        return 0.0
    return float(f"{x:.13g}")


def is_int(x: float, tol: float = INT_TOL) -> bool:
    return abs(x - round(x)) <= tol


def fmt(x: float) -> str:
    """Compact, locale-independent number formatting used by every printer."""
    if is_int(x, 1e-12) and abs(x) < 1e15:
        return str(int(round(x)))
    return f"{x:.12g}"


def _scaled(x: float, v: str) -> str:
    if x == 1.0:
        return v
    if x == -1.0:
        return "-" + v
    return f"{fmt(x)}*{v}"


@dataclass(frozen=True)
class Term:
    coeff: float = 1.0
    power: float = 0.0
    rate: float = 0.0
    kind: str = ONE
    freq: float = 0.0
    f11_a: float = 0.0
    f11_b: float = 0.0
    step: str = ""
    delay: float = 0.0

    def __post_init__(self):
        if self.kind not in KINDS:
            raise UnsupportedTermError(f"unknown oscillator kind {self.kind!r}")
        if self.step not in _STEP_ORDER:
            raise UnsupportedTermError(f"unknown step factor {self.step!r}")
        if self.power <= -1.0 and self.step != "delta":
            raise UnsupportedTermError(f"t^{self.power:g} is not locally integrable")
        if self.kind == KUMMER and abs(self.power - (self.f11_b - 1.0)) > 1e-12:
            raise UnsupportedTermError("a 1F1(a; b; kappa t) factor must carry t^(b-1)")
        if self.step and self.delay < 0.0:
            raise UnsupportedTermError("step factors need a non-negative delay")

    # -- structure -----------------------------------------------------
    @property
    def base(self) -> "Term":
        return replace(self, step="", delay=0.0)

    @property
    def decomposable(self) -> bool:
        return self.kind in DECOMPOSABLE

    def shape_key(self) -> tuple:
        return (self.power, self.rate, self.kind, self.freq, self.f11_a, self.f11_b, self.step, self.delay)

    def sort_key(self) -> tuple:
        return (
            self.power,
            self.rate,
            _KIND_ORDER[self.kind],
            self.freq,
            self.f11_a,
            self.f11_b,
            _STEP_ORDER[self.step],
            self.delay,
        )

    @property
    def growth_rate(self) -> float:
        """Exponential growth rate bounding |f(t)| (class-A constant 1/q)."""
        if self.step == "delta":
            return 0.0
        g = self.rate
        if self.kind in (SINH, COSH):
            g += abs(self.freq)
        elif self.kind == KUMMER:
            g += max(self.freq, 0.0)
        return g

    # -- evaluation ----------------------------------------------------
    def _base_value(self, t):
        t = np.asarray(t, dtype=float)
        with np.errstate(divide="ignore", invalid="ignore"):
            val = self.coeff * np.power(t, self.power) * np.exp(self.rate * t)
        k, b = self.kind, self.freq
        if k == SIN:
            val = val * np.sin(b * t)
        elif k == COS:
            val = val * np.cos(b * t)
        elif k == SINH:
            val = val * np.sinh(b * t)
        elif k == COSH:
            val = val * np.cosh(b * t)
        elif k == J0:
            val = val * bessel_j0(b * t)
        elif k == KUMMER:
            val = val * kummer_1f1(self.f11_a, self.f11_b, b * t)
        return val

    def __call__(self, t):
        if self.step == "delta":
            raise UnsupportedTermError("delta(t - a) has no pointwise value")
        t = np.asarray(t, dtype=float)
        if self.step == "H":
            shifted = t - self.delay
            inside = shifted >= 0.0
            safe = np.where(inside, shifted, 0.0)
            return np.where(inside, self._base_value(safe), 0.0)
        return self._base_value(t)

    # -- printing --------------------------------------------------------
    def _factors(self) -> list[str]:
        v = "t" if self.step != "H" or self.delay == 0.0 else f"(t-{fmt(self.delay)})"
        out = []
        if self.step == "delta":
            return [f"delta(t-{fmt(self.delay)})" if self.delay else "delta(t)"]
        if self.power != 0.0:
            out.append(v if self.power == 1.0 else f"{v}^{fmt(self.power)}")
        if self.rate != 0.0:
            out.append(f"exp({_scaled(self.rate, v)})")
        if self.kind in (SIN, COS, SINH, COSH):
            out.append(f"{self.kind}({_scaled(self.freq, v)})")
        elif self.kind == J0:
            out.append(f"J0({_scaled(self.freq, v)})")
        elif self.kind == KUMMER:
            out.append(f"1F1({fmt(self.f11_a)},{fmt(self.f11_b)},{_scaled(self.freq, v)})")
        if self.step == "H" and self.delay:
            out.append(f"H(t-{fmt(self.delay)})")
        return out

    def to_prefix(self) -> str:
        osc = {
            ONE: "(one)",
            J0: f"(j0 {self.freq!r})",
            KUMMER: f"(1f1 {self.f11_a!r} {self.f11_b!r} {self.freq!r})",
        }.get(self.kind, f"({self.kind} {self.freq!r})")
        step = f" ({self.step} {self.delay!r})" if self.step else ""
        return f"(term {self.coeff!r} (t {self.power!r}) (exp {self.rate!r}) {osc}{step})"


# ---------------------------------------------------------------------------
# complex-exponential components: c * t^k * exp(lam t)
# ---------------------------------------------------------------------------
Component = tuple[complex, float, complex]


def components(term: Term) -> list[Component]:
    """Split an undelayed decomposable term into complex exponentials."""
    if not term.decomposable or term.step:
        raise UnsupportedTermError(f"term {term} has no exponential decomposition")
    c, k, r, b = term.coeff, term.power, term.rate, term.freq
    if term.kind == ONE:
        return [(complex(c), k, complex(r))]
    if term.kind == SIN:
        return [(c / 2j, k, complex(r, b)), (-c / 2j, k, complex(r, -b))]
    if term.kind == COS:
        return [(c / 2, k, complex(r, b)), (c / 2, k, complex(r, -b))]
    if term.kind == SINH:
        return [(c / 2, k, complex(r + b)), (-c / 2, k, complex(r - b))]
    return [(c / 2, k, complex(r + b)), (c / 2, k, complex(r - b))]


def _close(a: complex, b: complex) -> bool:
    return abs(a - b) <= 1e-10 * max(1.0, abs(a), abs(b))


def recombine(comps: list[Component], step: str = "", delay: float = 0.0) -> list[Term]:
    """Collect complex exponentials back into real sin/cos/exponential terms."""
    groups: list[list] = []  # [power, re, |im|, c_plus, c_minus]
    for c, k, lam in comps:
        re, im = lam.real, lam.imag
        if abs(im) <= 1e-12 * max(1.0, abs(re)):
            im = 0.0
        for g in groups:
            if abs(g[0] - k) <= 1e-12 and _close(g[1], re) and _close(g[2], abs(im)):
                break
        else:
            g = [k, re, abs(im), 0j, 0j]
            groups.append(g)
        if im >= 0.0:
            g[3] += c
        else:
            g[4] += c
    out = []
    for k, re, im, cp, cm in groups:
        if im == 0.0:
            out.append(Term((cp + cm).real, k, re, step=step, delay=delay))
            continue
        cos_c = (cp + cm).real
        sin_c = (1j * (cp - cm)).real
        if cos_c != 0.0:
            out.append(Term(cos_c, k, re, COS, im, step=step, delay=delay))
        if sin_c != 0.0:
            out.append(Term(sin_c, k, re, SIN, im, step=step, delay=delay))
    return out


def shift_components(comps: list[Component], a: float) -> list[Component]:
    """Rewrite g(t) as a function of s = t - a, i.e. return g(s + a)."""
    if a == 0.0:
        return list(comps)
    out = []
    for c, k, lam in comps:
        if not is_int(k):
            raise UnsupportedTermError("fractional powers cannot be re-expanded about a shifted origin")
        k = int(round(k))
        scale = c * cmath.exp(lam * a)
        for j in range(k + 1):
            out.append((scale * math.comb(k, j) * a ** (k - j), float(j), lam))
    return out


def convolve_components(x: Component, y: Component) -> tuple[list[Component], list[Term]]:
    """Closed form of (c1 t^k1 e^{l1 t}) * (c2 t^k2 e^{l2 t}) on [0, t].

    Uses the beta-integral formula
    int_0^t (t-s)^(k1) s^(k2) e^(d s) ds = B(k1+1, k2+1) t^(k1+k2+1) 1F1(k2+1; k1+k2+2; d t),
    which stays elementary for integer powers or d = 0, and otherwise yields a
    Kummer term. For integer powers with real rates closer than
    ``EXPAND_MIN_GAP`` the Kummer term is kept too: the elementary expansion
    carries powers of 1/d that cancel catastrophically.
    """
    c1, k1, l1 = x
    c2, k2, l2 = y
    c = c1 * c2
    d = l2 - l1
    if abs(d) <= 1e-12 * max(1.0, abs(l1), abs(l2)):
        return [(c * beta(k1 + 1.0, k2 + 1.0), k1 + k2 + 1.0, l1)], []
    real = l1.imag == 0.0 and l2.imag == 0.0 and abs(c.imag) <= 1e-14 * abs(c)
    if is_int(k1) and is_int(k2) and not (real and abs(d) < EXPAND_MIN_GAP):
        k1i, k2i = int(round(k1)), int(round(k2))
        out: list[Component] = []
        for j in range(k1i + 1):
            w = c * math.comb(k1i, j) * (-1) ** j
            m = k2i + j
            fm = math.factorial(m)
            # int_0^t s^m e^{d s} ds = e^{d t} sum_i (-1)^(m-i) m!/i! t^i / d^(m-i+1) - (-1)^m m!/d^(m+1)
            for i in range(m + 1):
                coef = w * (-1) ** (m - i) * fm / (math.factorial(i) * d ** (m - i + 1))
                out.append((coef, float(k1i - j + i), l2))
            out.append((-w * (-1) ** m * fm / d ** (m + 1), float(k1i - j), l1))
        return out, []
    if not real:
        raise UnsupportedTermError("convolution of oscillating terms with fractional powers leaves the grammar")
    b = k1 + k2 + 2.0
    kt = Term(
        c.real * beta(k1 + 1.0, k2 + 1.0),
        b - 1.0,
        l1.real,
        KUMMER,
        d.real,
        f11_a=k2 + 1.0,
        f11_b=b,
    )
    return [], canonical_kummer(kt)


def canonical_kummer(term: Term) -> list[Term]:
    """Normalise a Kummer term: kappa > 0 and elementary cases expanded."""
    a, b, kappa = term.f11_a, term.f11_b, term.freq
    c, r = term.coeff, term.rate
    if kappa == 0.0 or abs(a) <= INT_TOL:
        return [Term(c, b - 1.0, r, step=term.step, delay=term.delay)]
    if kappa < 0.0:
        # Kummer transformation 1F1(a;b;x) = e^x 1F1(b-a;b;-x)
        a, r, kappa = b - a, r + kappa, -kappa
    if round(a) <= 0 and is_int(a):
        n = -int(round(a))
        coeffs = kummer_polynomial_coefficients(n, b)
        return [
            Term(c * cj * kappa**j, b - 1.0 + j, r, step=term.step, delay=term.delay)
            for j, cj in enumerate(coeffs)
        ]
    if round(b - a) <= 0 and is_int(b - a):
        n = -int(round(b - a))
        coeffs = kummer_polynomial_coefficients(n, b)
        return [
            Term(c * cj * (-kappa) ** j, b - 1.0 + j, r + kappa, step=term.step, delay=term.delay)
            for j, cj in enumerate(coeffs)
        ]
    if is_int(a) and is_int(b - a) and kappa >= EXPAND_MIN_GAP:
        # t^(b-1) 1F1(a;b;kappa t) = [t^(b-a-1) e^{rt}] * [t^(a-1) e^{(r+kappa)t}] / B(b-a, a)
        ai, bai = int(round(a)), int(round(b - a))
        comps, _ = convolve_components(
            (complex(c / beta(bai, ai)), float(bai - 1), complex(r)),
            (1.0 + 0j, float(ai - 1), complex(r + kappa)),
        )
        return recombine(comps, term.step, term.delay)
    return [Term(c, b - 1.0, r, KUMMER, kappa, a, b, term.step, term.delay)]


# ---------------------------------------------------------------------------
# Expr
# ---------------------------------------------------------------------------
def _multiply_terms(x: Term, y: Term) -> list[Term]:
    if x.step == "delta" and y.step == "delta":
        raise UnsupportedTermError("product of two delta functions")
    if y.step == "delta":
        x, y = y, x
    if x.step == "delta":
        # g(t) delta(t - a) = g(a) delta(t - a)
        a = x.delay
        if y.step == "H" and abs(a - y.delay) <= 1e-15:
            raise UnsupportedTermError("delta(t-a) * H(t-a) is ambiguous")
        val = float(y(a))
        return [Term(x.coeff * val, step="delta", delay=a)] if val != 0.0 else []
    if not x.step and not y.step:
        return _multiply_plain(x, y)
    # at least one Heaviside factor: write both bases about the later origin
    m = max(x.delay if x.step else 0.0, y.delay if y.step else 0.0)
    parts = []
    for term in (x, y):
        own = term.delay if term.step else 0.0
        base = term.base
        if m - own == 0.0:
            parts.append(("plain", base))
        elif base.decomposable:
            parts.append(("comps", shift_components(components(base), m - own)))
        else:
            raise UnsupportedTermError("J0/1F1 factors cannot be shifted inside the grammar")
    if parts[0][0] == "plain" and parts[1][0] == "plain":
        prod = _multiply_plain(parts[0][1], parts[1][1])
    else:
        cx = parts[0][1] if parts[0][0] == "comps" else components(parts[0][1])
        cy = parts[1][1] if parts[1][0] == "comps" else components(parts[1][1])
        prod = recombine([(a * b, k + l, p + q) for a, k, p in cx for b, l, q in cy])
    return [replace(t, step="H", delay=m) if m > 0.0 else t for t in prod]


def _multiply_plain(x: Term, y: Term) -> list[Term]:
    if x.decomposable and y.decomposable:
        cx, cy = components(x), components(y)
        return recombine([(a * b, k + l, p + q) for a, k, p in cx for b, l, q in cy])
    if not x.decomposable and not y.decomposable:
        raise UnsupportedTermError("product of two J0/1F1 factors leaves the grammar")
    atom, other = (x, y) if not x.decomposable else (y, x)
    if other.kind != ONE:
        raise UnsupportedTermError("J0/1F1 factors only combine with powers and exponentials")
    if other.power != 0.0 and atom.kind == KUMMER:
        raise UnsupportedTermError("a 1F1 factor fixes its own power of t")
    return [replace(atom, coeff=atom.coeff * other.coeff, power=atom.power + other.power, rate=atom.rate + other.rate)]


@dataclass(frozen=True)
class Expr:
    """Immutable sum of :class:`Term` objects."""

    terms: tuple[Term, ...] = ()

    # -- constructors ----------------------------------------------------
    @classmethod
    def of(cls, *terms: Term) -> "Expr":
        return cls(tuple(terms))

    @classmethod
    def constant(cls, c: float) -> "Expr":
        return cls((Term(c),)) if c != 0.0 else cls()

    @classmethod
    def power(cls, k: float, coeff: float = 1.0) -> "Expr":
        return cls((Term(coeff, k),))

    @classmethod
    def exp(cls, rate: float, coeff: float = 1.0) -> "Expr":
        return cls((Term(coeff, 0.0, rate),))

    @classmethod
    def osc(cls, kind: str, freq: float, coeff: float = 1.0) -> "Expr":
        return cls((Term(coeff, 0.0, 0.0, kind, freq),))

    @classmethod
    def heaviside(cls, delay: float) -> "Expr":
        if delay == 0.0:
            return cls.constant(1.0)
        return cls((Term(1.0, step="H", delay=delay),))

    @classmethod
    def delta(cls, delay: float = 0.0) -> "Expr":
        return cls((Term(1.0, step="delta", delay=delay),))

    @classmethod
    def kummer(cls, a: float, b: float, kappa: float, coeff: float = 1.0, rate: float = 0.0) -> "Expr":
        """``coeff * t^(b-1) * exp(rate t) * 1F1(a; b; kappa t)``."""
        return cls((Term(coeff, b - 1.0, rate, KUMMER, kappa, a, b),))

    # -- algebra -----------------------------------------------------------
    def __add__(self, other: "Expr | float") -> "Expr":
        if not isinstance(other, Expr):
            other = Expr.constant(float(other))
        return Expr(self.terms + other.terms).canonical()

    __radd__ = __add__

    def __neg__(self) -> "Expr":
        return Expr(tuple(replace(t, coeff=-t.coeff) for t in self.terms))

    def __sub__(self, other: "Expr | float") -> "Expr":
        if not isinstance(other, Expr):
            other = Expr.constant(float(other))
        return self + (-other)

    def __rsub__(self, other: float) -> "Expr":
        return Expr.constant(float(other)) - self

    def __mul__(self, other: "Expr | float") -> "Expr":
        if not isinstance(other, Expr):
            s = float(other)
            return Expr(tuple(replace(t, coeff=t.coeff * s) for t in self.terms)).canonical()
        out: list[Term] = []
        for x in self.terms:
            for y in other.terms:
                out.extend(_multiply_terms(x, y))
        return Expr(tuple(out)).canonical()

    __rmul__ = __mul__

    def __truediv__(self, s: float) -> "Expr":
        return self * (1.0 / float(s))

    # -- canonical form ------------------------------------------------------
    def canonical(self) -> "Expr":
        """Canonical representative (see module docstring)."""
        pending: list[Term] = []
        for t in self.terms:
            if t.coeff == 0.0:
                continue
            if t.step == "delta":
                pending.append(Term(t.coeff, step="delta", delay=_snap(t.delay)))
            elif t.kind in (SINH, COSH):
                pending.extend(recombine(components(t.base), t.step, t.delay))
            elif t.kind in (SIN, COS, J0) and t.freq == 0.0:
                if t.kind != SIN:
                    pending.append(replace(t, kind=ONE))
            elif t.kind in (SIN, COS, J0) and t.freq < 0.0:
                sign = -1.0 if t.kind == SIN else 1.0
                pending.append(replace(t, coeff=sign * t.coeff, freq=-t.freq))
            elif t.kind == KUMMER:
                pending.extend(canonical_kummer(t))
            elif t.kind == ONE and t.freq != 0.0:
                pending.append(replace(t, freq=0.0))
            else:
                pending.append(t)
        merged: dict[tuple, Term] = {}
        for t in pending:
            t = replace(
                t,
                power=_snap(t.power),
                rate=_snap(t.rate),
                freq=_snap(t.freq),
                f11_a=_snap(t.f11_a),
                f11_b=_snap(t.f11_b),
                delay=_snap(t.delay),
            )
            if t.step == "H" and t.delay == 0.0:
                t = replace(t, step="")
            key = t.shape_key()
            if key in merged:
                merged[key] = replace(merged[key], coeff=merged[key].coeff + t.coeff)
            else:
                merged[key] = t
        scale = max((abs(t.coeff) for t in merged.values()), default=0.0)
        kept = [t for t in merged.values() if abs(t.coeff) > DROP_TOL * scale]
        return Expr(tuple(sorted(kept, key=Term.sort_key)))

    # -- evaluation ------------------------------------------------------------
    @property
    def has_impulse(self) -> bool:
        return any(t.step == "delta" for t in self.terms)

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        total = np.zeros_like(t)
        for term in self.terms:
            total = total + term(t)
        return float(total) if total.ndim == 0 else total

    @property
    def growth_rate(self) -> float:
        return max((t.growth_rate for t in self.terms), default=0.0)

    def is_close(self, other: "Expr", rel: float = 1e-9) -> bool:
        """Structural equality of canonical forms up to coefficient tolerance."""
        a, b = self.canonical().terms, other.canonical().terms
        if len(a) != len(b):
            return False
        for x, y in zip(a, b):
            if x.shape_key() != y.shape_key():
                return False
            if abs(x.coeff - y.coeff) > rel * max(abs(x.coeff), abs(y.coeff)):
                return False
        return True

    # -- text --------------------------------------------------------------------
    def __str__(self) -> str:
        if not self.terms:
            return "0"
        pieces = []
        for i, t in enumerate(self.terms):
            factors = t._factors()
            c = t.coeff
            sign = "-" if c < 0 else "+"
            mag = abs(c)
            if not factors:
                body = fmt(mag)
            elif fmt(mag) == "1":
                body = "*".join(factors)
            else:
                body = fmt(mag) + "*" + "*".join(factors)
            if i == 0:
                pieces.append(("-" if c < 0 else "") + body)
            else:
                pieces.append(f" {sign} {body}")
        return "".join(pieces)

    def __repr__(self) -> str:
        return f"Expr({self})"

    def to_prefix(self) -> str:
        return "(sum" + "".join(" " + t.to_prefix() for t in self.terms) + ")"


def gamma_normalised_power(a: float) -> Expr:
    """The table row t^(a-1)/Gamma(a), a > 0."""
    return Expr.power(a - 1.0, 1.0 / gamma(a))
