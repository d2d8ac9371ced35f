"""Forward and inverse Elzaki transforms, with the operational rules.

The Elzaki transform of f is ``T(u) = u * int_0^inf f(t) exp(-t/u) dt``. It
relates to the Laplace transform F(s) by ``T(u) = u F(1/u)``, which is how the
inverse is organised: an image term is rewritten as a product of powers of
``(s - lambda)`` and then matched against a handful of closed inverse forms.
"""

from __future__ import annotations

import math
from typing import Callable

import numpy as np
from numpy.polynomial import polynomial as npoly
from scipy import integrate
from scipy.special import roots_genlaguerre

from ..errors import DomainError, NotInvertibleError, UnsupportedTermError
from ..special_functions import gamma
from .expr import (
    COS,
    J0,
    KUMMER,
    ONE,
    SIN,
    Expr,
    Term,
    components,
    convolve_components,
    is_int,
    recombine,
)
from .image import TransformExpr, TransformTerm

ROOT_CLUSTER_TOL = 1e-7
# partial-fraction components this far below the leading one are roundoff
PF_NOISE = 1e-11


def _as_expr(f) -> Expr:
    if isinstance(f, str):
        from .parse import parse_expr

        f = parse_expr(f)
    if not isinstance(f, Expr):
        raise UnsupportedTermError(f"expected an Expr, got {type(f).__name__}")
    return f.canonical()


# ---------------------------------------------------------------------------
# forward transform
# ---------------------------------------------------------------------------
def _t_times(T: TransformExpr) -> TransformExpr:
    u1, u2 = TransformExpr.monomial(1.0), TransformExpr.monomial(2.0)
    return u2 * T.derivative() - u1 * T


def _base_image(term: Term) -> TransformExpr:
    c, k, r, b = term.coeff, term.power, term.rate, term.freq
    if term.kind == ONE:
        return TransformExpr.term(c * gamma(k + 1.0), k + 2.0, [((1.0, -r), -(k + 1.0))])
    if term.kind == KUMMER:
        a, bb = term.f11_a, term.f11_b
        return TransformExpr.term(
            c * gamma(bb), bb + 1.0, [((1.0, -r), a - bb), ((1.0, -(r + b)), -a)]
        )
    if not is_int(k):
        raise UnsupportedTermError(f"fractional power t^{k:g} times {term.kind} has no table image")
    quad = (1.0, -2.0 * r, r * r + b * b)
    if term.kind == SIN:
        image = TransformExpr.term(c * b, 3.0, [(quad, -1.0)])
    elif term.kind == COS:
        image = TransformExpr.term(c, 2.0, [((1.0, -r), 1.0), (quad, -1.0)])
    elif term.kind == J0:
        image = TransformExpr.term(c, 2.0, [(quad, -0.5)])
    else:
        # sinh/cosh only reach here from a non-canonical term
        return sum((_base_image(t) for t in recombine(components(term))), TransformExpr())
    for _ in range(int(round(k))):
        image = _t_times(image)
    return image.combined()


def _term_image(term: Term) -> TransformExpr:
    if term.step == "delta":
        return TransformExpr.term(term.coeff, 1.0, delay=term.delay)
    image = _base_image(term.base)
    if term.step == "H" and term.delay:
        image = TransformExpr(tuple(TransformTerm.build(t.coeff, t.power, t.factors, t.delay + term.delay) for t in image.terms))
    return image


def elzaki_transform(f) -> TransformExpr:
    """Symbolic image E[f](u) of an expression in the grammar.

    Args:
        f: an :class:`Expr` or its infix text.

    Raises:
        UnsupportedTermError: a term has no image inside the grammar.
    """
    f = _as_expr(f)
    out = TransformExpr()
    for term in f.terms:
        out = out + _term_image(term)
    return out


def elzaki_numeric(f: Callable, u: float, nodes: int = 64, alpha: float = 0.0) -> float:
    """``u^2 * int_0^inf f(u s) exp(-s) ds`` by generalised Gauss-Laguerre quadrature.

    With ``alpha != 0`` the weight is ``s^alpha exp(-s)``, so integrands such
    as ``t^(a-1)`` are integrated exactly; ``f`` is still the full function.
    """
    if not u > 0.0:
        raise DomainError("the transform variable must be positive")
    s, w = roots_genlaguerre(nodes, alpha)
    with np.errstate(all="ignore"):
        vals = np.asarray(f(u * s), dtype=float) / s**alpha
        total = u * u * float(np.sum(w * vals))
    if not math.isfinite(total):
        raise DomainError(f"quadrature of the transform integral is not finite at u={u:g}")
    return total


def elzaki_quad(f: Callable, u: float, breakpoints=()) -> float:
    """Adaptive-quadrature variant for piecewise integrands (Heaviside rows).

    A grammar expression is multiplied by ``exp(-t/u)`` symbolically first, so
    growing exponentials never overflow on their own.
    """
    if not u > 0.0:
        raise DomainError("the transform variable must be positive")
    edges = [0.0] + sorted(b for b in breakpoints if b > 0.0)
    if isinstance(f, Expr):
        damped = f * Expr.exp(-1.0 / u)
        g = lambda t: float(damped(t))
    else:
        g = lambda t: float(f(t)) * math.exp(-t / u)
    total = 0.0
    for lo, hi in zip(edges, edges[1:]):
        total += integrate.quad(g, lo, hi, epsabs=0.0, epsrel=1e-12, limit=200)[0]
    total += integrate.quad(g, edges[-1], math.inf, epsabs=0.0, epsrel=1e-12, limit=200)[0]
    total *= u
    if not math.isfinite(total):
        raise DomainError(f"quadrature of the transform integral is not finite at u={u:g}")
    return total


def laplace_dual(F: Callable[[float], float], u: float) -> float:
    """Elzaki image from a Laplace image: ``u * F(1/u)``."""
    if not u > 0.0:
        raise DomainError("the transform variable must be positive")
    val = u * F(1.0 / u)
    if not np.isfinite(val):
        raise DomainError(f"Laplace image is not finite at s={1.0 / u:g}")
    return float(val)


# ---------------------------------------------------------------------------
# operational rules
# ---------------------------------------------------------------------------
def derivative_image(Tf, n: int, initial_values):
    """Image of the n-th derivative: ``T/u^n - sum_k u^(2-n+k) f^(k)(0)``.

    ``Tf`` may be a :class:`TransformExpr` or an :class:`ImageOperator`.
    """
    from .operator import ImageOperator

    initial_values = list(initial_values)
    if n < 1:
        raise DomainError("derivative order must be at least 1")
    if len(initial_values) != n:
        raise DomainError(f"expected {n} initial values, got {len(initial_values)}")
    boundary = TransformExpr()
    for k, v in enumerate(initial_values):
        if v:
            boundary = boundary + TransformExpr.monomial(2.0 - n + k, float(v))
    scale = TransformExpr.monomial(-float(n))
    if isinstance(Tf, ImageOperator):
        return Tf.scaled(scale).shifted(-boundary)
    return (Tf * scale - boundary).combined()


def t_multiplied_image(Tfn, power: int):
    """Image of ``t^power f`` for power 1, 2 or 3.

    power 1: ``u^2 T' - u T``; power 2: ``u^4 T''``; power 3: ``u^6 T''' + 3 u^5 T''``.
    """
    from .operator import ImageOperator

    if power not in (1, 2, 3):
        raise UnsupportedTermError(f"t-multiplication supports powers 1, 2, 3, not {power}")
    mono = TransformExpr.monomial
    if isinstance(Tfn, ImageOperator):
        d = Tfn.differentiated
        if power == 1:
            return d().scaled(mono(2.0)) + Tfn.scaled(mono(1.0, -1.0))
        if power == 2:
            return d().differentiated().scaled(mono(4.0))
        d2 = d().differentiated()
        return d2.differentiated().scaled(mono(6.0)) + d2.scaled(mono(5.0, 3.0))
    if power == 1:
        out = mono(2.0) * Tfn.derivative() - mono(1.0) * Tfn
    elif power == 2:
        out = mono(4.0) * Tfn.derivative(2)
    else:
        out = mono(6.0) * Tfn.derivative(3) + mono(5.0, 3.0) * Tfn.derivative(2)
    return out.combined()


def shifted_transform(Tf: TransformExpr, a: float) -> TransformExpr:
    """Image of ``exp(-a t) f(t)``: ``(1 + a u) T(u / (1 + a u))``."""
    if a == 0.0:
        return Tf
    out = []
    for t in Tf.terms:
        exponent = 1.0 - t.power
        factors = []
        for p, e in t.factors:
            deg = len(p) - 1
            q = np.zeros(1)
            for j, c in enumerate(p):
                q = npoly.polyadd(q, c * npoly.polymul(_monomial(j), npoly.polypow([1.0, a], deg - j)))
            factors.append((tuple(q), e))
            exponent -= e * deg
        factors.append(((1.0, a), exponent))
        out.append(TransformTerm.build(t.coeff * math.exp(-a * t.delay), t.power, factors, t.delay))
    return TransformExpr(tuple(out)).merged()


def _monomial(j: int) -> np.ndarray:
    m = np.zeros(j + 1)
    m[j] = 1.0
    return m


def convolve(G, H) -> Expr:
    """Closed form of ``(G * H)(t) = int_0^t G(t - s) H(s) ds``.

    Raises:
        UnsupportedTermError: a factor is delayed, an impulse, a J0/1F1 term,
            or the integral leaves the grammar.
    """
    G, H = _as_expr(G), _as_expr(H)
    comps, atoms = [], []
    for x in G.terms:
        for y in H.terms:
            if x.step or y.step:
                raise UnsupportedTermError("Heaviside and delta terms are excluded from convolution")
            for cx in components(x):
                for cy in components(y):
                    c, a = convolve_components(cx, cy)
                    comps.extend(c)
                    atoms.extend(a)
    return Expr(tuple(recombine(comps)) + tuple(atoms)).canonical()


# ---------------------------------------------------------------------------
# inverse transform
# ---------------------------------------------------------------------------
def _s_domain(term: TransformTerm) -> list[tuple[complex, float]]:
    """Write s T(1/s) as ``coeff * prod (s - lambda)^(-nu)``; returns (lambda, nu) pairs."""
    pairs: list[tuple[complex, float]] = [(0j, term.power - 1.0)]
    for p, e in term.factors:
        pairs[0] = (0j, pairs[0][1] + e * (len(p) - 1))
        for root in np.roots(np.asarray(p[::-1], dtype=float)):
            pairs.append((1.0 / complex(root), -e))
    merged: list[list] = []
    for lam, nu in pairs:
        for m in merged:
            if abs(m[0] - lam) <= ROOT_CLUSTER_TOL * max(1.0, abs(lam)):
                m[1] += nu
                break
        else:
            merged.append([lam, nu])
    out = []
    for lam, nu in merged:
        if abs(lam.imag) <= 1e-12 * max(1.0, abs(lam.real)):
            lam = complex(lam.real, 0.0)
        if abs(nu - round(nu)) <= 1e-9:
            nu = float(round(nu))
        if nu != 0.0:
            out.append((lam, nu))
    return out


def _taylor(poly: np.ndarray, at: complex, order: int) -> list[complex]:
    out, p = [], poly.astype(complex)
    for j in range(order):
        out.append(npoly.polyval(at, p) / math.factorial(j))
        p = npoly.polyder(p) if len(p) > 1 else np.zeros(1, dtype=complex)
    return out


def _series_mul(a: list[complex], b: list[complex]) -> list[complex]:
    n = len(a)
    return [sum(a[i] * b[j - i] for i in range(j + 1)) for j in range(n)]


def _invert_rational(c: float, pairs) -> tuple[list, float]:
    """Partial fractions; returns (components, impulse coefficient)."""
    num = np.array([c], dtype=complex)
    poles = []
    for lam, nu in pairs:
        if nu < 0:
            for _ in range(int(-nu)):
                num = npoly.polymul(num, [-lam, 1.0])
        else:
            poles.append((lam, int(nu)))
    den = np.array([1.0], dtype=complex)
    for lam, q in poles:
        for _ in range(q):
            den = npoly.polymul(den, [-lam, 1.0])
    impulse = 0.0
    if len(num) >= len(den):
        quo, num = npoly.polydiv(num, den)
        if len(quo) > 1 and np.max(np.abs(quo[1:])) > 1e-12 * np.max(np.abs(quo)):
            raise NotInvertibleError("image grows faster than u, the inverse would need derivatives of delta")
        impulse = complex(quo[0]).real
    comps = []
    for i, (lam, q) in enumerate(poles):
        series = _taylor(num, lam, q)
        for j, (other, q2) in enumerate(poles):
            if j == i:
                continue
            d = lam - other
            factor = [_binom_neg(q2, k) * d ** (-q2 - k) for k in range(q)]
            series = _series_mul(series, factor)
        # sizes on the pole's own time scale 1/|lam|; drop roundoff residue
        scale = abs(lam) if lam != 0 else 1.0
        sizes = [abs(series[q - j]) / math.factorial(j - 1) * scale ** (1 - j) for j in range(1, q + 1)]
        floor = PF_NOISE * max(sizes)
        for j in range(1, q + 1):
            coef = series[q - j]
            if coef != 0 and sizes[j - 1] > floor:
                comps.append((coef / math.factorial(j - 1), float(j - 1), lam))
    return comps, impulse


def _binom_neg(q: int, k: int) -> float:
    """Generalised binomial coefficient C(-q, k)."""
    out = 1.0
    for i in range(k):
        out *= (-q - i) / (i + 1)
    return out


def _invert_special(c: float, pairs) -> list[Term]:
    nonint = [(lam, nu) for lam, nu in pairs if not is_int(nu)]
    # conjugate pair at nu = 1/2: exp(alpha t) J0(beta t)
    if len(pairs) == 2 and all(abs(nu - 0.5) < 1e-12 for _, nu in pairs):
        (l1, _), (l2, _) = pairs
        if l1.imag != 0.0 and abs(l1 - l2.conjugate()) <= 1e-9 * max(1.0, abs(l1)):
            return [Term(c, 0.0, l1.real, J0, abs(l1.imag))]
    if any(lam.imag != 0.0 for lam, _ in pairs):
        raise NotInvertibleError("fractional powers of complex factors have no inverse in the grammar")
    if len(nonint) == 1:
        lam, nu = nonint[0]
        num = np.array([c], dtype=complex)
        for other, nu2 in pairs:
            if other == lam:
                continue
            if nu2 > 0:
                break
            for _ in range(int(-nu2)):
                num = npoly.polymul(num, [-other, 1.0])
        else:
            out = []
            for i, ni in enumerate(_taylor(num, lam, len(num))):
                if abs(ni) == 0.0:
                    continue
                if nu - i <= 0.0:
                    raise NotInvertibleError("the image decays too slowly to be a locally integrable function")
                out.append(Term(ni.real / gamma(nu - i), nu - i - 1.0, lam.real))
            return out
    if len(pairs) == 2:
        (l1, n1), (l2, n2) = sorted(pairs, key=lambda x: x[0].real)
        total = n1 + n2
        if total <= 0.0:
            raise NotInvertibleError("the image decays too slowly to be a locally integrable function")
        return [Term(c / gamma(total), total - 1.0, l1.real, KUMMER, (l2 - l1).real, n2, total)]
    raise NotInvertibleError("image is not a product of at most two singular factors")


def inverse_elzaki(Tf: TransformExpr) -> Expr:
    """Inverse transform into the expression grammar.

    Rational image terms are split into partial fractions; terms with
    fractional exponents are matched against ``t^(a-1) e^(lambda t)/Gamma(a)``,
    the Kummer convolution form and ``exp(alpha t) J0(beta t)``.

    Raises:
        NotInvertibleError: the image has no preimage inside the grammar.
    """
    terms: list[Term] = []
    by_delay: dict[float, list[tuple]] = {}
    for t in Tf.terms:
        by_delay.setdefault(t.delay, [])
        pairs = _s_domain(t)
        if all(is_int(nu) for _, nu in pairs):
            comps, impulse = _invert_rational(t.coeff, pairs)
            by_delay[t.delay].append(("r", comps, impulse))
        else:
            by_delay[t.delay].append(("s", _invert_special(t.coeff, pairs)))
    for delay, items in by_delay.items():
        comps, impulse, plain = [], 0.0, []
        for item in items:
            if item[0] == "r":
                comps.extend(item[1])
                impulse += item[2]
            else:
                plain.extend(item[1])
        step = "H" if delay else ""
        group = recombine(comps, step, delay) + [
            Term(x.coeff, x.power, x.rate, x.kind, x.freq, x.f11_a, x.f11_b, step, delay) for x in plain
        ]
        if impulse:
            group.append(Term(impulse, step="delta", delay=delay))
        terms.extend(group)
    return Expr(tuple(terms)).canonical()
