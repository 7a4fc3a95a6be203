"""Element and operator literals used in scenario files.

Grammar (loosest binding first)::

    expr   := term (('+' | '-') term)*
    term   := tensor (('*' | '/' | 'o') tensor)*
    tensor := unary ('(x)' unary)*
    unary  := '-' unary | power
    power  := atom ('^' unary)?
    atom   := NUMBER | NAME | NAME '(' expr (',' expr)* ')' | '(' expr ')' | '[' list ']'

``^`` with an integer exponent is a power, between forms it is the wedge.
``o`` composes operators.  Parsing yields a small AST whose nodes carry the
column of their first character, so evaluation errors stay located.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction

from .hopf import HopfAlgebra, TensorPower, tensor
from .linear import Element
from .modalg import FreeBimodule, ModuleAlgebra, right_mul
from .scalars import Scalar, ScalarRing


class LiteralError(ValueError):
    """A malformed or ill-typed literal; ``col`` is a 0-based offset into the text."""

    def __init__(self, message: str, col: int = 0):
        super().__init__(message)
        self.message = message
        self.col = col


_TOKEN = re.compile(r"\s*(?:(?P<num>\d+)|(?P<name>[A-Za-z_][A-Za-z0-9_]*)"
                    r"|(?P<op>\(x\)|->|[-+*/^(),\[\]]))")


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    col: int


def tokenize(text: str) -> list[Token]:
    out, pos = [], 0
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        m = _TOKEN.match(text, pos)
        if not m:
            col = len(text) - len(text[pos:].lstrip())
            raise LiteralError(f"unexpected character {text[col]!r}", col)
        kind = m.lastgroup
        start = m.start(kind)
        out.append(Token(kind, m.group(kind), start))
        pos = m.end()
    out.append(Token("end", "", len(text)))
    return out


# AST nodes are tuples: (kind, col, ...)


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.toks = tokenize(text)
        self.i = 0

    @property
    def tok(self) -> Token:
        return self.toks[self.i]

    def take(self, text: str | None = None) -> Token:
        t = self.tok
        if text is not None and t.text != text:
            found = t.text or "end of literal"
            raise LiteralError(f"expected {text!r}, found {found!r}", t.col)
        self.i += 1
        return t

    def parse(self):
        if self.tok.kind == "end":
            raise LiteralError("empty literal", 0)
        node = self.expr()
        if self.tok.kind != "end":
            raise LiteralError(f"unexpected {self.tok.text!r}", self.tok.col)
        return node

    def expr(self):
        node = self.term()
        while self.tok.text in ("+", "-"):
            t = self.take()
            node = ("bin", t.col, t.text, node, self.term())
        return node

    def term(self):
        node = self.tensor()
        while self.tok.text in ("*", "/", "o"):
            t = self.take()
            node = ("bin", t.col, t.text, node, self.tensor())
        return node

    def tensor(self):
        node = self.unary()
        while self.tok.text == "(x)":
            t = self.take()
            node = ("bin", t.col, "(x)", node, self.unary())
        return node

    def unary(self):
        if self.tok.text == "-":
            t = self.take()
            return ("neg", t.col, self.unary())
        if self.tok.text == "+":
            self.take()
            return self.unary()
        return self.power()

    def power(self):
        node = self.atom()
        if self.tok.text == "^":
            t = self.take()
            node = ("bin", t.col, "^", node, self.unary())
        return node

    def atom(self):
        t = self.tok
        if t.kind == "num":
            self.take()
            return ("num", t.col, Fraction(int(t.text)))
        if t.kind == "name" and t.text != "o":
            self.take()
            if self.tok.text == "(":
                self.take("(")
                args = [] if self.tok.text == ")" else self.arglist(")")
                self.take(")")
                return ("call", t.col, t.text, args)
            return ("name", t.col, t.text)
        if t.text == "(":
            self.take()
            node = self.expr()
            self.take(")")
            return node
        if t.text == "[":
            self.take()
            items = [] if self.tok.text == "]" else self.arglist("]")
            self.take("]")
            return ("list", t.col, items)
        found = t.text or "end of literal"
        raise LiteralError(f"unexpected {found!r}", t.col)

    def arglist(self, close: str):
        items = [self.expr()]
        while self.tok.text == ",":
            self.take()
            items.append(self.expr())
        if self.tok.text != close:
            found = self.tok.text or "end of literal"
            raise LiteralError(f"expected ',' or {close!r}, found {found!r}", self.tok.col)
        return items


def parse(text: str):
    return _Parser(text).parse()


# ---------------------------------------------------------------------------
# Element evaluation


def _is_number(x) -> bool:
    return isinstance(x, (Fraction, Scalar))


def _has_one(x: Element) -> bool:
    return hasattr(x.space, "one")


class ElementEvaluator:
    """Evaluate literal ASTs to scalars and elements.

    ``env`` maps names to elements or numbers; ``h`` is the formal parameter
    and any explicit ``h^k`` with ``k`` above the truncation order is an error.
    """

    def __init__(self, ring: ScalarRing, env: dict, wedge=None, functions=None):
        self.ring = ring
        self.env = env
        self.wedge = wedge
        self.functions = functions or {}

    def __call__(self, text: str):
        return self.eval(parse(text))

    def eval(self, node):
        kind, col = node[0], node[1]
        if kind == "num":
            return node[2]
        if kind == "name":
            name = node[2]
            if name == "h":
                if self.ring.order < 1:
                    raise LiteralError("h exceeds truncation order 0", col)
                return self.ring.h
            if name not in self.env:
                raise LiteralError(f"unknown name {name!r}", col)
            return self.env[name]
        if kind == "neg":
            return self._mul(Fraction(-1), self.eval(node[2]), col)
        if kind == "call":
            fn = self.functions.get(node[2])
            if fn is None:
                raise LiteralError(f"unknown function {node[2]!r}", col)
            args = [self.eval(a) for a in node[3]]
            try:
                return fn(*args)
            except LiteralError:
                raise
            except (ValueError, TypeError) as exc:
                raise LiteralError(f"{node[2]}: {exc}", col) from None
        if kind == "list":
            return [self.eval(a) for a in node[2]]
        op, lhs, rhs = node[2], node[3], node[4]
        if op == "^":
            return self._pow(lhs, rhs, col)
        a, b = self.eval(lhs), self.eval(rhs)
        if op == "+":
            return self._add(a, b, col)
        if op == "-":
            return self._add(a, self._mul(Fraction(-1), b, col), col)
        if op == "*":
            return self._mul(a, b, col)
        if op == "/":
            if not _is_number(b) or not b:
                raise LiteralError("can only divide by a nonzero number", col)
            inv = 1 / b if isinstance(b, Fraction) else b.inverse()
            return self._mul(a, inv, col)
        if op == "(x)":
            return self._tensor(a, b, col)
        raise LiteralError(f"operator {op!r} is not allowed here", col)

    def _scalar(self, x) -> Scalar:
        return self.ring(x) if isinstance(x, Fraction) else x

    def _add(self, a, b, col):
        if isinstance(a, list) or isinstance(b, list):
            raise LiteralError("cannot add lists", col)
        if _is_number(a) and _is_number(b):
            return a + b
        if _is_number(a):
            a, b = b, a
        if _is_number(b):
            if not _has_one(a):
                raise LiteralError(f"cannot add a number to an element of {a.space.name}", col)
            return a + a.space.one().scale(self._scalar(b))
        if a.space is not b.space:
            raise LiteralError(f"cannot add elements of {a.space.name} and {b.space.name}", col)
        return a + b

    def _mul(self, a, b, col):
        if _is_number(a) and _is_number(b):
            return a * b
        if _is_number(a):
            return b.scale(self._scalar(a))
        if _is_number(b):
            return a.scale(self._scalar(b))
        if isinstance(a, list) or isinstance(b, list):
            raise LiteralError("cannot multiply lists", col)
        if a.space is b.space and hasattr(a.space, "mul_keys"):
            return a * b
        if isinstance(a.space, FreeBimodule) and b.space is getattr(a.space, "A", None):
            return right_mul(a, b)
        if isinstance(b.space, FreeBimodule) and a.space is getattr(b.space, "A", None):
            return right_mul(b, a)
        raise LiteralError(f"cannot multiply elements of {a.space.name} and {b.space.name}", col)

    def _pow(self, lhs, rhs, col):
        e = self.eval(rhs)
        if isinstance(e, Fraction):
            if e.denominator != 1 or e < 0:
                raise LiteralError("exponent must be a nonnegative integer", rhs[1])
            k = int(e)
            if lhs[0] == "name" and lhs[2] == "h" and k > self.ring.order:
                raise LiteralError(f"h^{k} exceeds truncation order {self.ring.order}", lhs[1])
            base = self.eval(lhs)
            if isinstance(base, Element):
                if not _has_one(base):
                    raise LiteralError(f"elements of {base.space.name} have no powers", col)
                return base ** k
            return base ** k
        base = self.eval(lhs)
        if self.wedge is not None and isinstance(base, Element) and isinstance(e, Element):
            try:
                return self.wedge(base, e)
            except TypeError as exc:
                raise LiteralError(str(exc), col) from None
        raise LiteralError("'^' needs an integer exponent or two forms", col)

    def _tensor(self, a, b, col):
        spaces = [x.space for x in (a, b) if isinstance(x, Element)]
        if not spaces:
            raise LiteralError("'(x)' needs at least one Hopf element", col)
        base = spaces[0].base if isinstance(spaces[0], TensorPower) else spaces[0]
        if not isinstance(base, HopfAlgebra):
            raise LiteralError("'(x)' is only defined for Hopf elements", col)

        def lift(x):
            if _is_number(x):
                return base.one().scale(self._scalar(x))
            sp = x.space
            b = sp.base if isinstance(sp, TensorPower) else sp
            if b is not base:
                raise LiteralError("'(x)' of elements of different Hopf algebras", col)
            return x
        return tensor(lift(a), lift(b))


def evaluate(text: str, ring: ScalarRing, env: dict, **kw):
    return ElementEvaluator(ring, env, **kw)(text)


def module_names(A: ModuleAlgebra) -> dict:
    """Literal names of the basis of a module algebra."""
    from .modalg import FinFunAlgebra, PolyAlgebra
    if isinstance(A, PolyAlgebra):
        return {v: A.var(i) for i, v in enumerate(A.variables)}
    if isinstance(A, FinFunAlgebra):
        return {f"d_{g}": A.delta(g) for g in A.labels}
    return {}
