from fractions import Fraction

import pytest

from twistq.literals import LiteralError, parse, tokenize
from twistq.model import build
from twistq.scenario import load_scenario, shipped


@pytest.fixture(scope="module")
def ev():
    return build(load_scenario(shipped("moyal2d"))).evaluator()


def test_module_literal(ev):
    v = ev("e1*(x1^2) + e2*(h*x2)")
    assert v == ev("(x1*x1)*e1 + h*x2*e2")
    assert str(v) == "h*e2*x2 + e1*x1^2"


def test_form_literal(ev):
    w = ev("(x1^2)*dx1^dx2")
    assert w == ev("x1*x1*(dx1^dx2)")
    assert ev("dx2^dx1") == ev("-(dx1^dx2)")


def test_tensor_and_exp(ev):
    F = ev("exp(h*X1 (x) X2)")
    assert F == ev("X1^0 (x) 1 + h*X1 (x) X2 + h^2/2*X1^2 (x) X2^2 + h^3/6*X1^3 (x) X2^3")


def test_numbers_are_exact(ev):
    assert ev("1/3 + 1/6") == Fraction(1, 2)
    assert ev("2^10") == 1024


@pytest.mark.parametrize("text, col, fragment", [
    ("h^4*x1", 0, "h^4 exceeds truncation order 3"),
    ("x1 + @", 5, "unexpected character"),
    ("x1 + dx1", 3, "cannot add"),
    ("(x1", 3, "expected ')'"),
    ("foo*x1", 0, "unknown name 'foo'"),
    ("x1^(1/2)", 5, "nonnegative integer"),
    ("x1/x2", 2, "nonzero number"),
    ("bar(x1)", 0, "unknown function"),
])
def test_errors_are_located(ev, text, col, fragment):
    with pytest.raises(LiteralError) as info:
        ev(text)
    assert fragment in info.value.message
    assert info.value.col == col


def test_tokens_keep_columns():
    toks = tokenize("x1 (x) h^2")
    assert [(t.text, t.col) for t in toks if t.text] == [("x1", 0), ("(x)", 3), ("h", 7), ("^", 8), ("2", 9)]


def test_precedence():
    # '^' binds tighter than '*', which binds tighter than '+'
    ast = parse("a + b*c^2")
    assert ast[2] == "+"
    assert ast[4][2] == "*"
    assert ast[4][4][2] == "^"
