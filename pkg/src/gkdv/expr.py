"""Scalar expressions in the single variable ``u``.

The nonlinearity f(u) of the equation is handled everywhere as an
:class:`Expr` tree: parsed from text, evaluated (on floats or numpy
arrays), differentiated symbolically and lightly simplified.

Grammar::

    expr   := term (("+"|"-") term)*
    term   := factor (("*"|"/") factor)*
    factor := "-" factor | power
    power  := atom ("^" factor)?
    atom   := NUMBER | "u" | FUNC "(" expr ")" | "(" expr ")"
    FUNC   := "exp" | "log" | "sin" | "cos" | "abs"
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Union

import numpy as np

from gkdv.errors import DomainError, ExprSyntaxError, UnknownIdentifier

Real = Union[float, np.ndarray]


class Expr:
    """Base node. Subclasses are frozen dataclasses, hence hashable and immutable."""

    def __call__(self, u):
        return evaluate(self, u)

    def __str__(self) -> str:
        return to_text(self)


@dataclass(frozen=True, repr=True)
class Constant(Expr):
    value: float


@dataclass(frozen=True)
class Variable(Expr):
    pass


@dataclass(frozen=True)
class Add(Expr):
    children: tuple


@dataclass(frozen=True)
class Mul(Expr):
    children: tuple


@dataclass(frozen=True)
class Neg(Expr):
    child: Expr


@dataclass(frozen=True)
class Div(Expr):
    num: Expr
    den: Expr


@dataclass(frozen=True)
class Pow(Expr):
    base: Expr
    exponent: Expr


@dataclass(frozen=True)
class Exp(Expr):
    child: Expr


@dataclass(frozen=True)
class Log(Expr):
    child: Expr


@dataclass(frozen=True)
class Sin(Expr):
    child: Expr


@dataclass(frozen=True)
class Cos(Expr):
    child: Expr


@dataclass(frozen=True)
class Abs(Expr):
    child: Expr


FUNCTIONS = {"exp": Exp, "log": Log, "sin": Sin, "cos": Cos, "abs": Abs}

ZERO = Constant(0.0)
ONE = Constant(1.0)
U = Variable()


# ---------------------------------------------------------------- parsing

_TOKEN = re.compile(
    r"\s*(?:(?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)"
    r"|(?P<name>[A-Za-z_][A-Za-z_0-9]*)"
    r"|(?P<op>[-+*/^()]))"
)


def _tokenize(text: str):
    tokens = []
    pos = 0
    raw = text.encode()
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        m = _TOKEN.match(text, pos)
        if m is None or m.end() == pos:
            offset = len(text[:pos].encode()) + (len(text[pos:]) - len(text[pos:].lstrip()))
            raise ExprSyntaxError(f"unexpected character {text[pos:].lstrip()[:1]!r}", offset)
        kind = m.lastgroup
        start = m.start(kind)
        tokens.append((kind, m.group(kind), len(text[:start].encode())))
        pos = m.end()
    tokens.append(("end", "", len(raw)))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def take(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect(self, value: str):
        kind, val, off = self.take()
        if val != value or kind == "end":
            got = "end of input" if kind == "end" else repr(val)
            raise ExprSyntaxError(f"expected {value!r}, got {got}", off)

    def expr(self) -> Expr:
        terms = [self.term()]
        while self.peek()[1] in ("+", "-") and self.peek()[0] == "op":
            op = self.take()[1]
            t = self.term()
            terms.append(t if op == "+" else Neg(t))
        return terms[0] if len(terms) == 1 else Add(tuple(terms))

    def term(self) -> Expr:
        node = self.factor()
        factors = [node]
        while self.peek()[0] == "op" and self.peek()[1] in ("*", "/"):
            op = self.take()[1]
            rhs = self.factor()
            if op == "*":
                factors.append(rhs)
            else:
                left = factors[0] if len(factors) == 1 else Mul(tuple(factors))
                factors = [Div(left, rhs)]
        return factors[0] if len(factors) == 1 else Mul(tuple(factors))

    def factor(self) -> Expr:
        kind, val, _ = self.peek()
        if kind == "op" and val == "-":
            self.take()
            return Neg(self.factor())
        return self.power()

    def power(self) -> Expr:
        base = self.atom()
        kind, val, _ = self.peek()
        if kind == "op" and val == "^":
            self.take()
            return Pow(base, self.factor())
        return base

    def atom(self) -> Expr:
        kind, val, off = self.take()
        if kind == "num":
            return Constant(float(val))
        if kind == "name":
            if val == "u":
                return U
            if val in FUNCTIONS:
                self.expect("(")
                inner = self.expr()
                self.expect(")")
                return FUNCTIONS[val](inner)
            raise UnknownIdentifier(f"unknown identifier {val!r}", off)
        if kind == "op" and val == "(":
            inner = self.expr()
            self.expect(")")
            return inner
        got = "end of input" if kind == "end" else repr(val)
        raise ExprSyntaxError(f"unexpected {got}", off)


def parse(text: str) -> Expr:
    """Parse ``text`` into an expression tree.

    Raises :class:`ExprSyntaxError` or :class:`UnknownIdentifier`, both
    carrying the byte offset of the offending token.
    """
    p = _Parser(text)
    e = p.expr()
    kind, val, off = p.peek()
    if kind != "end":
        raise ExprSyntaxError(f"unexpected {val!r}", off)
    return e


def as_expr(f) -> Expr:
    if isinstance(f, Expr):
        return f
    if isinstance(f, str):
        return parse(f)
    if isinstance(f, (int, float)):
        return Constant(float(f))
    raise TypeError(f"cannot interpret {f!r} as an expression")


# ------------------------------------------------------------- evaluation

def _fail(node, msg, u, mask):
    arr = np.asarray(u, dtype=float)
    where = float(arr) if arr.ndim == 0 else float(arr[np.argmax(mask)])
    raise DomainError(f"{msg} in {to_text(node)}", node=node, where=where)


def _eval(e: Expr, u):
    if isinstance(e, Constant):
        return e.value
    if isinstance(e, Variable):
        return u
    if isinstance(e, Add):
        out = _eval(e.children[0], u)
        for c in e.children[1:]:
            out = out + _eval(c, u)
        return out
    if isinstance(e, Mul):
        out = _eval(e.children[0], u)
        for c in e.children[1:]:
            out = out * _eval(c, u)
        return out
    if isinstance(e, Neg):
        return -_eval(e.child, u)
    if isinstance(e, Div):
        num = _eval(e.num, u)
        den = _eval(e.den, u)
        bad = np.asarray(den) == 0
        if np.any(bad):
            _fail(e, "division by zero", u, bad)
        return num / den
    if isinstance(e, Pow):
        base = _eval(e.base, u)
        ex = _eval(e.exponent, u)
        b = np.asarray(base, dtype=float)
        x = np.asarray(ex, dtype=float)
        neg = (b < 0) & (np.floor(x) != x)
        if np.any(neg):
            _fail(e, "non-integer power of negative base", u, np.broadcast_to(neg, np.broadcast(b, x).shape))
        zero = (b == 0) & (x < 0)
        if np.any(zero):
            _fail(e, "negative power of zero", u, np.broadcast_to(zero, np.broadcast(b, x).shape))
        with np.errstate(over="ignore"):
            out = np.power(b, x)
        return out if out.ndim else float(out)
    if isinstance(e, Exp):
        with np.errstate(over="ignore"):
            return np.exp(_eval(e.child, u))
    if isinstance(e, Log):
        arg = _eval(e.child, u)
        bad = np.asarray(arg) <= 0
        if np.any(bad):
            _fail(e, "logarithm of non-positive value", u, bad)
        return np.log(arg)
    if isinstance(e, Sin):
        return np.sin(_eval(e.child, u))
    if isinstance(e, Cos):
        return np.cos(_eval(e.child, u))
    if isinstance(e, Abs):
        return np.abs(_eval(e.child, u))
    raise TypeError(f"unknown node {e!r}")


def evaluate(e: Expr, u: Real) -> Real:
    """Evaluate ``e`` at a float or elementwise over an array.

    Scalars in give a Python float out; arrays give an array of the same
    shape. Leaving the real domain raises :class:`DomainError` naming the
    failing node and the first offending ``u``.
    """
    if np.ndim(u) == 0:
        return float(_eval(e, float(u)))
    arr = np.asarray(u, dtype=float)
    return np.broadcast_to(np.asarray(_eval(e, arr), dtype=float), arr.shape).copy()


# Spec-facing alias; ``eval`` itself is a builtin we do not shadow.
eval_expr = evaluate


# ---------------------------------------------------------- differentiation

def _mul(*xs) -> Expr:
    return Mul(tuple(xs))


def _d(e: Expr) -> Expr:
    if isinstance(e, Constant):
        return ZERO
    if isinstance(e, Variable):
        return ONE
    if isinstance(e, Add):
        return Add(tuple(_d(c) for c in e.children))
    if isinstance(e, Mul):
        terms = []
        for i, c in enumerate(e.children):
            rest = list(e.children)
            rest[i] = _d(c)
            terms.append(Mul(tuple(rest)))
        return Add(tuple(terms))
    if isinstance(e, Neg):
        return Neg(_d(e.child))
    if isinstance(e, Div):
        # (n/d)' = n'/d - n d'/d^2
        return Add((Div(_d(e.num), e.den),
                    Neg(Div(_mul(e.num, _d(e.den)), Pow(e.den, Constant(2.0))))))
    if isinstance(e, Pow):
        if isinstance(e.exponent, Constant):
            n = e.exponent.value
            return _mul(Constant(n), Pow(e.base, Constant(n - 1.0)), _d(e.base))
        # b^x = exp(x log b)
        return _mul(e, Add((_mul(_d(e.exponent), Log(e.base)),
                            Div(_mul(e.exponent, _d(e.base)), e.base))))
    if isinstance(e, Exp):
        return _mul(e, _d(e.child))
    if isinstance(e, Log):
        return Div(_d(e.child), e.child)
    if isinstance(e, Sin):
        return _mul(Cos(e.child), _d(e.child))
    if isinstance(e, Cos):
        return Neg(_mul(Sin(e.child), _d(e.child)))
    if isinstance(e, Abs):
        # sign(x) x', undefined at x = 0
        return _mul(Div(e.child, e), _d(e.child))
    raise TypeError(f"unknown node {e!r}")


def diff(e: Expr, n: int = 1) -> Expr:
    """n-th symbolic derivative with respect to u (simplified after each pass)."""
    e = simplify(e)
    for _ in range(n):
        e = simplify(_d(e))
    return e


# ----------------------------------------------------------- simplification

def _const(e) -> float | None:
    return e.value if isinstance(e, Constant) else None


def _fold(fn, x: float) -> float | None:
    try:
        v = fn(x)
    except (ValueError, OverflowError, ZeroDivisionError):
        return None
    return v if math.isfinite(v) else None


def simplify(e: Expr) -> Expr:
    """Constant folding and removal of neutral/absorbing elements.

    Folding is skipped whenever it would hide a domain error
    (e.g. ``log(0)`` stays symbolic).
    """
    if isinstance(e, (Constant, Variable)):
        return e
    if isinstance(e, Add):
        kids = []
        acc = 0.0
        for c in (simplify(c) for c in e.children):
            if isinstance(c, Add):
                for cc in c.children:
                    if isinstance(cc, Constant):
                        acc += cc.value
                    else:
                        kids.append(cc)
            elif isinstance(c, Constant):
                acc += c.value
            else:
                kids.append(c)
        if acc != 0.0 or not kids:
            kids.append(Constant(acc))
        return kids[0] if len(kids) == 1 else Add(tuple(kids))
    if isinstance(e, Mul):
        kids = []
        acc = 1.0
        for c in (simplify(c) for c in e.children):
            parts = c.children if isinstance(c, Mul) else (c,)
            for p in parts:
                if isinstance(p, Constant):
                    acc *= p.value
                elif isinstance(p, Neg):
                    acc = -acc
                    if isinstance(p.child, Constant):
                        acc *= p.child.value
                    else:
                        kids.append(p.child)
                else:
                    kids.append(p)
        if acc == 0.0:
            return ZERO
        if not kids:
            return Constant(acc)
        if acc == -1.0:
            inner = kids[0] if len(kids) == 1 else Mul(tuple(kids))
            return Neg(inner)
        if acc != 1.0:
            kids.insert(0, Constant(acc))
        return kids[0] if len(kids) == 1 else Mul(tuple(kids))
    if isinstance(e, Neg):
        c = simplify(e.child)
        if isinstance(c, Constant):
            return Constant(-c.value)
        if isinstance(c, Neg):
            return c.child
        return Neg(c)
    if isinstance(e, Div):
        n, d = simplify(e.num), simplify(e.den)
        cn, cd = _const(n), _const(d)
        if cd == 1.0:
            return n
        if cn == 0.0 and cd != 0.0:
            return ZERO
        if cn is not None and cd not in (None, 0.0):
            return Constant(cn / cd)
        if cd not in (None, 0.0):
            return simplify(Mul((Constant(1.0 / cd), n)))
        return Div(n, d)
    if isinstance(e, Pow):
        b, x = simplify(e.base), simplify(e.exponent)
        cb, cx = _const(b), _const(x)
        if cx == 1.0:
            return b
        if cx == 0.0:
            return ONE
        if cb is not None and cx is not None:
            v = _fold(lambda y: math.pow(y, cx), cb) if not (cb == 0 and cx < 0) else None
            if v is not None:
                return Constant(v)
        return Pow(b, x)
    fns = {Exp: math.exp, Log: math.log, Sin: math.sin, Cos: math.cos, Abs: abs}
    for cls, fn in fns.items():
        if isinstance(e, cls):
            c = simplify(e.child)
            if isinstance(c, Constant):
                v = _fold(fn, c.value)
                if v is not None:
                    return Constant(v)
            return cls(c)
    raise TypeError(f"unknown node {e!r}")


def substitute(e: Expr, inner: Expr) -> Expr:
    """Return e(inner(u)), i.e. every occurrence of u replaced by ``inner``."""
    if isinstance(e, Variable):
        return inner
    if isinstance(e, Constant):
        return e
    if isinstance(e, (Add, Mul)):
        return type(e)(tuple(substitute(c, inner) for c in e.children))
    if isinstance(e, Div):
        return Div(substitute(e.num, inner), substitute(e.den, inner))
    if isinstance(e, Pow):
        return Pow(substitute(e.base, inner), substitute(e.exponent, inner))
    return type(e)(substitute(e.child, inner))


# ------------------------------------------------------------- printing

def _num(x: float) -> str:
    if x.is_integer() and abs(x) < 1e15:
        return str(int(x))
    return repr(x)


_PREC = {Add: 1, Mul: 2, Div: 2, Neg: 3, Pow: 4}


def _prec(e: Expr) -> int:
    if isinstance(e, Constant) and e.value < 0:
        return 3
    return _PREC.get(type(e), 5)


def _wrap(e: Expr, min_prec: int) -> str:
    s = to_text(e)
    return f"({s})" if _prec(e) < min_prec else s


def to_text(e: Expr) -> str:
    """Render in the input grammar; ``parse(to_text(e))`` evaluates identically."""
    if isinstance(e, Constant):
        return _num(e.value)
    if isinstance(e, Variable):
        return "u"
    if isinstance(e, Add):
        out = to_text(e.children[0])
        for c in e.children[1:]:
            if isinstance(c, Neg):
                out += " - " + _wrap(c.child, 2)
            elif isinstance(c, Constant) and c.value < 0:
                out += " - " + _num(-c.value)
            else:
                out += " + " + _wrap(c, 2)
        return out
    if isinstance(e, Mul):
        return "*".join(_wrap(c, 3) for c in e.children)
    if isinstance(e, Div):
        return f"{_wrap(e.num, 2)}/{_wrap(e.den, 3)}"
    if isinstance(e, Neg):
        return "-" + _wrap(e.child, 3)
    if isinstance(e, Pow):
        return f"{_wrap(e.base, 5)}^{_wrap(e.exponent, 3)}"
    for name, cls in FUNCTIONS.items():
        if isinstance(e, cls):
            return f"{name}({to_text(e.child)})"
    raise TypeError(f"unknown node {e!r}")
