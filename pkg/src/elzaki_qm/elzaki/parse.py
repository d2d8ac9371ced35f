"""Text formats for expressions.

Infix syntax (what the CLI accepts)::

    expr   := term (('+' | '-') term)*
    term   := unary (('*' | '/') unary | atom)*      # juxtaposition multiplies: 2t
    unary  := '-' unary | power
    power  := atom ('^' unary)?
    atom   := number | 't' | 'pi' | '(' expr ')' | name '(' expr (',' expr)* ')'

with functions ``exp sin cos sinh cosh J0 H delta 1F1 sqrt gamma``. Function
arguments must be affine in t (``alpha*t + beta``); ``1F1(a, b, kappa*t)``
has to be multiplied by ``t^(b-1)`` to stay inside the grammar. Division and
non-integer exponents are only allowed where the result stays in the grammar.

Prefix syntax (deterministic serialisation) mirrors the data model::

    (sum (term COEFF (t POWER) (exp RATE) (OSC ...) [(H DELAY) | (delta DELAY)]) ...)
    (sum (term COEFF (u POWER) (poly EXPONENT c0 c1 ...)* [(expinv DELAY)]) ...)

where OSC is ``(one)``, ``(sin b)``, ``(cos b)``, ``(sinh b)``, ``(cosh b)``,
``(j0 b)`` or ``(1f1 a b kappa)``.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass

from ..errors import ElzakiError, ParseError
from ..special_functions import gamma
from .expr import J0, KUMMER, ONE, Expr, Term
from .image import TransformExpr, TransformTerm

_TOKEN = re.compile(
    r"\s*(?:(?P<f11>1F1)|(?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)|(?P<name>[A-Za-z_][A-Za-z_0-9]*)|(?P<op>[-+*/^(),]))"
)
_FUNCS = {"exp", "sin", "cos", "sinh", "cosh", "J0", "j0", "H", "delta", "1F1", "hyp1f1", "sqrt", "gamma"}


@dataclass(frozen=True)
class _Tok:
    kind: str
    text: str
    pos: int


@dataclass(frozen=True)
class _KummerFactor:
    """A bare 1F1(a; b; kappa t) waiting for its t^(b-1) partner."""

    a: float
    b: float
    kappa: float
    pos: int


def _tokenize(text: str) -> list[_Tok]:
    toks, i = [], 0
    while i < len(text):
        if text[i].isspace():
            i += 1
            continue
        m = _TOKEN.match(text, i)
        if not m or m.end() == i:
            raise ParseError(f"unexpected character {text[i]!r}", i)
        kind = m.lastgroup
        start = m.start(kind)
        tok_text = m.group(kind)
        toks.append(_Tok("name" if kind == "f11" else kind, tok_text, start))
        i = m.end()
    toks.append(_Tok("end", "", len(text)))
    return toks


def _constant(e: Expr) -> float | None:
    if not e.terms:
        return 0.0
    if len(e.terms) == 1:
        t = e.terms[0]
        if t.power == 0.0 and t.rate == 0.0 and t.kind == ONE and not t.step:
            return t.coeff
    return None


def _affine(e: Expr) -> tuple[float, float] | None:
    alpha = beta = 0.0
    for t in e.terms:
        if t.rate != 0.0 or t.kind != ONE or t.step or t.power not in (0.0, 1.0):
            return None
        if t.power == 1.0:
            alpha += t.coeff
        else:
            beta += t.coeff
    return alpha, beta


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.toks = _tokenize(text)
        self.i = 0

    @property
    def tok(self) -> _Tok:
        return self.toks[self.i]

    def take(self, text: str | None = None) -> _Tok:
        t = self.tok
        if text is not None and t.text != text:
            want = text or "end of input"
            got = t.text or "end of input"
            raise ParseError(f"expected {want!r}, found {got!r}", t.pos)
        self.i += 1
        return t

    def run(self) -> Expr:
        if self.tok.kind == "end":
            raise ParseError("empty expression", 0)
        val = self.expr()
        if self.tok.kind != "end":
            raise ParseError(f"unexpected {self.tok.text!r}", self.tok.pos)
        return self.finish(val, 0)

    def finish(self, v, pos: int) -> Expr:
        if isinstance(v, _KummerFactor):
            return self.mul(Expr.constant(1.0), v, v.pos)
        return v

    def expr(self):
        pos = self.tok.pos
        val = self.term()
        while self.tok.text in ("+", "-"):
            op = self.take()
            rhs = self.finish(self.term(), op.pos)
            val = self.finish(val, pos)
            val = val + rhs if op.text == "+" else val - rhs
        return val

    def term(self):
        val = self.unary()
        while True:
            t = self.tok
            if t.text == "*":
                self.take()
                val = self.mul(val, self.unary(), t.pos)
            elif t.text == "/":
                self.take()
                rhs = self.finish(self.unary(), t.pos)
                c = _constant(rhs)
                if c is None:
                    raise ParseError("division is only defined by a constant", t.pos)
                if c == 0.0:
                    raise ParseError("division by zero", t.pos)
                val = self.finish(val, t.pos) / c
            elif t.kind in ("num", "name") or t.text == "(":
                val = self.mul(val, self.power(), t.pos)
            else:
                return val

    def mul(self, x, y, pos: int):
        if isinstance(x, _KummerFactor) and isinstance(y, _KummerFactor):
            raise ParseError("product of two 1F1 factors leaves the grammar", pos)
        if isinstance(x, _KummerFactor):
            x, y = y, x
        if isinstance(y, _KummerFactor):
            if len(x.terms) != 1 or x.terms[0].kind != ONE or x.terms[0].step:
                raise ParseError("1F1 must multiply a single power/exponential term", pos)
            t = x.terms[0]
            if abs(t.power - (y.b - 1.0)) > 1e-12:
                raise ParseError(f"1F1(a, b, .) must carry t^(b-1) = t^{y.b - 1.0:g}", pos)
            return Expr((Term(t.coeff, t.power, t.rate, KUMMER, y.kappa, y.a, y.b),)).canonical()
        try:
            return x * y
        except ElzakiError as exc:
            raise ParseError(str(exc), pos) from None

    def unary(self):
        if self.tok.text == "-":
            t = self.take()
            val = self.finish(self.unary(), t.pos)
            return -val
        if self.tok.text == "+":
            self.take()
            return self.unary()
        return self.power()

    def power(self):
        base = self.atom()
        if self.tok.text != "^":
            return base
        t = self.take()
        expo = _constant(self.finish(self.unary(), t.pos))
        if expo is None:
            raise ParseError("exponent must be a constant", t.pos)
        base = self.finish(base, t.pos)
        c = _constant(base)
        if c is not None:
            return Expr.constant(c**expo)
        if len(base.terms) == 1 and base.terms[0].kind == ONE and not base.terms[0].step:
            b = base.terms[0]
            if b.coeff > 0.0 or float(expo).is_integer():
                try:
                    return Expr((Term(b.coeff**expo, b.power * expo, b.rate * expo),))
                except ElzakiError as exc:
                    raise ParseError(str(exc), t.pos) from None
        if float(expo).is_integer() and expo >= 0:
            out = Expr.constant(1.0)
            for _ in range(int(expo)):
                out = self.mul(out, base, t.pos)
            return out
        raise ParseError("non-integer power of a sum leaves the grammar", t.pos)

    def atom(self):
        t = self.tok
        if t.kind == "num":
            self.take()
            return Expr.constant(float(t.text))
        if t.text == "(":
            self.take()
            val = self.expr()
            self.take(")")
            return val
        if t.kind == "name":
            self.take()
            if t.text == "t":
                return Expr.power(1.0)
            if t.text == "pi":
                return Expr.constant(math.pi)
            if t.text not in _FUNCS:
                raise ParseError(f"unknown name {t.text!r}", t.pos)
            self.take("(")
            args = [self.expr()]
            while self.tok.text == ",":
                self.take()
                args.append(self.expr())
            self.take(")")
            return self.call(t, [self.finish(a, t.pos) for a in args])
        got = t.text or "end of input"
        raise ParseError(f"unexpected {got!r}", t.pos)

    def call(self, t: _Tok, args: list[Expr]):
        name = "J0" if t.text == "j0" else ("1F1" if t.text == "hyp1f1" else t.text)
        want = 3 if name == "1F1" else 1
        if len(args) != want:
            raise ParseError(f"{name} takes {want} argument(s), got {len(args)}", t.pos)
        if name in ("sqrt", "gamma"):
            c = _constant(args[0])
            if c is None:
                raise ParseError(f"{name} needs a constant argument", t.pos)
            try:
                return Expr.constant(math.sqrt(c) if name == "sqrt" else gamma(c))
            except (ValueError, ElzakiError) as exc:
                raise ParseError(str(exc), t.pos) from None
        if name == "1F1":
            a, b = _constant(args[0]), _constant(args[1])
            lin = _affine(args[2])
            if a is None or b is None or lin is None or lin[1] != 0.0:
                raise ParseError("1F1 needs constant a, b and an argument kappa*t", t.pos)
            return _KummerFactor(a, b, lin[0], t.pos)
        lin = _affine(args[0])
        if lin is None:
            raise ParseError(f"argument of {name} must be affine in t", t.pos)
        alpha, beta = lin
        if name == "exp":
            return Expr.exp(alpha, math.exp(beta))
        if name in ("sin", "cos", "sinh", "cosh"):
            # expand f(alpha t + beta) by the addition theorems
            return _addition(name, alpha, beta)
        if name == "J0":
            if beta != 0.0:
                raise ParseError("J0 argument must be proportional to t", t.pos)
            return Expr.osc(J0, alpha)
        if alpha <= 0.0:
            raise ParseError(f"{name} argument must increase with t", t.pos)
        delay = -beta / alpha
        if delay < 0.0:
            raise ParseError(f"{name} needs a non-negative delay", t.pos)
        if name == "H":
            return Expr.heaviside(delay)
        return Expr.delta(delay) / alpha


def _addition(name: str, alpha: float, beta: float) -> Expr:
    if name == "sin":
        return Expr.osc("sin", alpha, math.cos(beta)) + Expr.osc("cos", alpha, math.sin(beta))
    if name == "cos":
        return Expr.osc("cos", alpha, math.cos(beta)) - Expr.osc("sin", alpha, math.sin(beta))
    if name == "sinh":
        return Expr.osc("sinh", alpha, math.cosh(beta)) + Expr.osc("cosh", alpha, math.sinh(beta))
    return Expr.osc("cosh", alpha, math.cosh(beta)) + Expr.osc("sinh", alpha, math.sinh(beta))


def parse_expr(text: str) -> Expr:
    """Parse infix text into a canonical :class:`Expr`.

    Raises:
        ParseError: with the 0-based column of the offending token.
    """
    if text.lstrip().startswith("(sum"):
        return parse_prefix_expr(text)
    return _Parser(text).run().canonical()


# ---------------------------------------------------------------------------
# prefix notation
# ---------------------------------------------------------------------------
def _read_sexpr(text: str):
    toks = [(m.group(), m.start()) for m in re.finditer(r"\(|\)|[^\s()]+", text)]
    pos = 0

    def read():
        nonlocal pos
        if pos >= len(toks):
            raise ParseError("unexpected end of input", len(text))
        tok, at = toks[pos]
        pos += 1
        if tok == "(":
            items = []
            while pos < len(toks) and toks[pos][0] != ")":
                items.append(read())
            if pos >= len(toks):
                raise ParseError("missing ')'", len(text))
            pos += 1
            return (items, at)
        if tok == ")":
            raise ParseError("unexpected ')'", at)
        return (tok, at)

    tree = read()
    if pos != len(toks):
        raise ParseError("trailing input", toks[pos][1])
    return tree


def _num(node) -> float:
    tok, at = node
    if isinstance(tok, list):
        raise ParseError("expected a number", at)
    try:
        return float(tok)
    except ValueError:
        raise ParseError(f"expected a number, found {tok!r}", at) from None


def _head(node, name: str, size: int | None = None):
    items, at = node
    if not isinstance(items, list) or not items or items[0][0] != name:
        raise ParseError(f"expected ({name} ...)", at)
    if size is not None and len(items) != size + 1:
        raise ParseError(f"({name} ...) takes {size} field(s)", at)
    return items[1:]


def parse_prefix_expr(text: str) -> Expr:
    """Inverse of :meth:`Expr.to_prefix`."""
    terms = []
    for node in _head(_read_sexpr(text), "sum"):
        fields = _head(node, "term")
        if len(fields) not in (4, 5):
            raise ParseError("(term ...) takes 4 or 5 fields", node[1])
        coeff = _num(fields[0])
        power = _num(_head(fields[1], "t", 1)[0])
        rate = _num(_head(fields[2], "exp", 1)[0])
        osc_items, at = fields[3]
        if not isinstance(osc_items, list) or not osc_items:
            raise ParseError("expected an oscillator", at)
        kind = osc_items[0][0]
        args = [_num(x) for x in osc_items[1:]]
        freq = a = b = 0.0
        if kind == "one" and not args:
            kind = ONE
        elif kind in ("sin", "cos", "sinh", "cosh", "j0") and len(args) == 1:
            freq = args[0]
        elif kind == "1f1" and len(args) == 3:
            a, b, freq = args
        else:
            raise ParseError(f"bad oscillator ({kind} ...)", at)
        step, delay = "", 0.0
        if len(fields) == 5:
            s_items, s_at = fields[4]
            if not isinstance(s_items, list) or len(s_items) != 2 or s_items[0][0] not in ("H", "delta"):
                raise ParseError("expected (H d) or (delta d)", s_at)
            step, delay = s_items[0][0], _num(s_items[1])
        try:
            terms.append(Term(coeff, power, rate, kind, freq, a, b, step, delay))
        except ElzakiError as exc:
            raise ParseError(str(exc), node[1]) from None
    return Expr(tuple(terms)).canonical()


def parse_prefix_transform(text: str) -> TransformExpr:
    """Inverse of :meth:`TransformExpr.to_prefix`."""
    terms = []
    for node in _head(_read_sexpr(text), "sum"):
        fields = _head(node, "term")
        if len(fields) < 2:
            raise ParseError("(term ...) needs a coefficient and (u ...)", node[1])
        coeff = _num(fields[0])
        power = _num(_head(fields[1], "u", 1)[0])
        factors, delay = [], 0.0
        for f in fields[2:]:
            items, at = f
            if isinstance(items, list) and items and items[0][0] == "poly":
                vals = [_num(x) for x in items[1:]]
                if len(vals) < 2:
                    raise ParseError("(poly e c0 ...) needs coefficients", at)
                factors.append((tuple(vals[1:]), vals[0]))
            elif isinstance(items, list) and items and items[0][0] == "expinv":
                delay = _num(_head(f, "expinv", 1)[0])
            else:
                raise ParseError("expected (poly ...) or (expinv ...)", at)
        terms.append(TransformTerm.build(coeff, power, factors, delay))
    return TransformExpr(tuple(terms)).merged()
