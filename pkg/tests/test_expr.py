import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import CORPUS
from gkdv.errors import DomainError, ExprSyntaxError, UnknownIdentifier
from gkdv.expr import (U, Add, Constant, Log, Mul, Neg, Pow, Variable, diff, evaluate, parse,
                       simplify, substitute, to_text)

# Hand-written reference implementations of the corpus, independent of the parser.
REFERENCE = {
    "1": lambda u: 1.0 + 0 * u,
    "u": lambda u: u,
    "2 + u^3": lambda u: 2 + u**3,
    "1 + exp(2*u)": lambda u: 1 + np.exp(2 * u),
    "3*log(u-1)": lambda u: 3 * np.log(u - 1),
    "sin(u)": np.sin,
    "1 + u^2": lambda u: 1 + u**2,
    "exp(u)": np.exp,
    "u*cos(u) - 2/(3+u)": lambda u: u * np.cos(u) - 2 / (3 + u),
    "abs(u-2)^1.5": lambda u: np.abs(u - 2) ** 1.5,
}


def test_parse_shapes():
    assert parse("u") == Variable()
    assert parse("1 + u^2") == Add((Constant(1.0), Pow(U, Constant(2.0))))
    assert parse("0.5*log(u-1)") == Mul((Constant(0.5), Log(Add((U, Neg(Constant(1.0)))))))


def test_precedence():
    assert evaluate(parse("2^3^2"), 0.0) == 512.0  # right associative
    assert evaluate(parse("-u^2"), 3.0) == -9.0  # unary minus looser than ^
    assert evaluate(parse("2^-1"), 0.0) == 0.5
    assert evaluate(parse("8/2/2"), 0.0) == 2.0
    assert evaluate(parse("1 - 2 - 3"), 0.0) == -4.0
    assert evaluate(parse("1.5e2*u"), 2.0) == 300.0


@pytest.mark.parametrize("text,offset", [("1 +", 3), ("u)", 1), ("(u", 2), ("2 ** u", 3)])
def test_syntax_error_offset(text, offset):
    with pytest.raises(ExprSyntaxError) as exc:
        parse(text)
    assert exc.value.offset == offset


def test_unknown_identifier():
    with pytest.raises(UnknownIdentifier) as exc:
        parse("1 + tan(u)")
    assert exc.value.offset == 4
    with pytest.raises(UnknownIdentifier):
        parse("x")


def test_eval_examples():
    assert evaluate(parse("u^2"), 3) == 9
    assert evaluate(parse("exp(u)"), 0) == 1
    with pytest.raises(DomainError) as exc:
        evaluate(parse("log(u-1)"), 1)
    assert "log" in str(exc.value.node)


@pytest.mark.parametrize("text,u", [("1/u", 0.0), ("u^0.5", -1.0), ("u^-1", 0.0)])
def test_eval_domain_errors(text, u):
    with pytest.raises(DomainError):
        evaluate(parse(text), u)


def test_eval_array_reports_first_bad_point():
    with pytest.raises(DomainError) as exc:
        evaluate(parse("log(u)"), np.array([1.0, 2.0, -3.0, -4.0]))
    assert exc.value.where == -3.0


def test_integer_power_of_negative_base():
    assert evaluate(parse("u^3"), -2.0) == -8.0


@pytest.mark.parametrize("text,dom", CORPUS)
def test_eval_matches_reference(text, dom, rng):
    u = rng.uniform(*dom, 100)
    got = evaluate(parse(text), u)
    ref = REFERENCE[text](u)
    assert np.allclose(got, ref, rtol=1e-12, atol=1e-300)


def test_diff_examples():
    d = diff(parse("u^2"))
    for u in (-1.0, 0.5, 2.0):
        assert evaluate(d, u) == pytest.approx(2 * u, abs=1e-15)
    d = diff(parse("exp(2*u)"))
    for u in (-1.0, 0.0, 0.7):
        assert evaluate(d, u) == pytest.approx(2 * math.exp(2 * u), rel=1e-15)
    d4 = diff(parse("sin(u)"), 4)
    for u in np.linspace(-3, 3, 7):
        assert evaluate(d4, u) == pytest.approx(math.sin(u), abs=1e-15)


def test_diff_abs_away_from_zero():
    d = diff(parse("abs(u)"))
    assert evaluate(d, -2.0) == -1.0
    assert evaluate(d, 3.0) == 1.0


def test_diff_variable_exponent():
    d = diff(parse("u^u"))
    u = 1.7
    assert evaluate(d, u) == pytest.approx(u**u * (math.log(u) + 1), rel=1e-14)


@pytest.mark.parametrize("text,dom", CORPUS)
def test_diff_against_finite_differences(text, dom, rng):
    e = parse(text)
    d = diff(e)
    lo, hi = dom
    pad = 0.05 * (hi - lo)
    h = 1e-5
    for u in rng.uniform(lo + pad, hi - pad, 20):
        fd = (evaluate(e, u + h) - evaluate(e, u - h)) / (2 * h)
        val = evaluate(d, u)
        assert abs(val - fd) <= 1e-6 * (1 + abs(val))


def test_simplify_examples():
    assert simplify(parse("0*u + 1")) == Constant(1.0)
    assert simplify(parse("u^1")) == Variable()
    assert simplify(parse("exp(0)*u")) == Variable()


def test_simplify_keeps_domain_errors():
    e = simplify(parse("log(0 - 1)"))
    with pytest.raises(DomainError):
        evaluate(e, 0.0)


@pytest.mark.parametrize("text,dom", CORPUS)
def test_simplify_and_round_trip_preserve_values(text, dom, rng):
    e = parse(text)
    u = rng.uniform(*dom, 50)
    ref = evaluate(e, u)
    assert np.allclose(evaluate(simplify(e), u), ref, rtol=1e-13)
    assert np.allclose(evaluate(parse(to_text(e)), u), ref, rtol=1e-13)


def test_substitute():
    e = substitute(parse("u^2 + 1"), parse("u - 1"))
    assert evaluate(e, 3.0) == 5.0


coeff = st.floats(-5, 5, allow_nan=False).map(lambda x: round(x, 3))


@given(a=coeff, b=coeff, c=coeff, u=st.floats(-2, 2))
def test_polynomial_property(a, b, c, u):
    text = f"({a}) + ({b})*u + ({c})*u^2"
    e = parse(text)
    assert evaluate(e, u) == pytest.approx(a + b * u + c * u * u, abs=1e-12)
    assert evaluate(diff(e), u) == pytest.approx(b + 2 * c * u, abs=1e-12)
    assert evaluate(diff(e, 3), u) == 0.0


@given(st.recursive(
    st.sampled_from(["u", "1", "2.5", "(u+1)"]),
    lambda inner: st.tuples(inner, st.sampled_from(["+", "-", "*"]), inner).map(
        lambda t: f"({t[0]} {t[1]} {t[2]})")
    | inner.map(lambda s: f"sin({s})") | inner.map(lambda s: f"exp(-({s})^2)"),
    max_leaves=6))
def test_random_trees_simplify_and_print(text):
    e = parse(text)
    for u in (-0.7, 0.0, 0.4):
        v = evaluate(e, u)
        assert evaluate(simplify(e), u) == pytest.approx(v, rel=1e-12, abs=1e-12)
        assert evaluate(parse(to_text(e)), u) == pytest.approx(v, rel=1e-12, abs=1e-12)
