"""Exact coefficients: rationals, or formal series in ``h`` truncated at ``h^N``.

A :class:`Scalar` stores ``N + 1`` :class:`~fractions.Fraction` coefficients.
``N = 0`` is plain rational arithmetic.  Scalars of different truncation
orders never mix silently; the arithmetic raises :class:`OrderMismatch`.
"""

from __future__ import annotations

import re
from fractions import Fraction
from numbers import Rational


class OrderMismatch(ValueError):
    """Raised when scalars of different truncation orders are combined."""


class Scalar:
    __slots__ = ("coeffs", "_hash")

    def __init__(self, coeffs):
        coeffs = tuple(Fraction(c) for c in coeffs)
        if not coeffs:
            raise ValueError("a scalar needs at least the h^0 coefficient")
        self.coeffs = coeffs
        self._hash = None

    @classmethod
    def _raw(cls, coeffs: tuple) -> "Scalar":
        s = object.__new__(cls)
        s.coeffs = coeffs
        s._hash = None
        return s

    @property
    def order(self) -> int:
        return len(self.coeffs) - 1

    def _coerce(self, other) -> "Scalar | None":
        if isinstance(other, Scalar):
            if len(other.coeffs) != len(self.coeffs):
                raise OrderMismatch(
                    f"truncation orders differ: {self.order} vs {other.order}")
            return other
        if isinstance(other, (int, Rational)):
            return Scalar._raw((Fraction(other),) + (Fraction(0),) * self.order)
        return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return Scalar._raw(tuple(a + b for a, b in zip(self.coeffs, o.coeffs)))

    __radd__ = __add__

    def __neg__(self):
        return Scalar._raw(tuple(-a for a in self.coeffs))

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return Scalar._raw(tuple(a - b for a, b in zip(self.coeffs, o.coeffs)))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Rational)) and not isinstance(other, Scalar):
            f = Fraction(other)
            return Scalar._raw(tuple(a * f for a in self.coeffs))
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        a, b = self.coeffs, o.coeffs
        n = len(a)
        if n == 1:
            return Scalar._raw((a[0] * b[0],))
        out = [Fraction(0)] * n
        for i, ai in enumerate(a):
            if ai:
                for j in range(n - i):
                    bj = b[j]
                    if bj:
                        out[i + j] += ai * bj
        return Scalar._raw(tuple(out))

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, (int, Rational)) and not isinstance(other, Scalar):
            f = Fraction(other)
            return Scalar._raw(tuple(a / f for a in self.coeffs))
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self * o.inverse()

    def __pow__(self, k: int):
        if k < 0:
            return self.inverse() ** (-k)
        result = self._coerce(1)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def inverse(self) -> "Scalar":
        """Series inverse; needs an invertible constant term."""
        a = self.coeffs
        if a[0] == 0:
            raise ZeroDivisionError(f"{self} is not a unit")
        inv = [Fraction(0)] * len(a)
        inv[0] = 1 / a[0]
        for k in range(1, len(a)):
            acc = sum((a[i] * inv[k - i] for i in range(1, k + 1)), Fraction(0))
            inv[k] = -acc * inv[0]
        return Scalar._raw(tuple(inv))

    def __eq__(self, other):
        if isinstance(other, Scalar):
            return self.coeffs == other.coeffs
        if isinstance(other, (int, Rational)):
            return self.coeffs[0] == other and not any(self.coeffs[1:])
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(self.coeffs)
        return self._hash

    def __bool__(self):
        return any(self.coeffs)

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def valuation(self) -> int | None:
        """Lowest power of h with nonzero coefficient, ``None`` for zero."""
        for i, c in enumerate(self.coeffs):
            if c:
                return i
        return None

    def truncate(self, order: int) -> "Scalar":
        if order > self.order:
            raise OrderMismatch(f"cannot raise truncation order {self.order} to {order}")
        return Scalar._raw(self.coeffs[: order + 1])

    def is_constant(self) -> bool:
        return not any(self.coeffs[1:])

    def __repr__(self):
        return f"Scalar({self})"

    def __str__(self):
        return format_scalar(self)


def _fmt_rational(q: Fraction) -> str:
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def format_scalar(s: Scalar) -> str:
    parts = []
    for k, c in enumerate(s.coeffs):
        if not c:
            continue
        mag = abs(c)
        if k == 0:
            body = _fmt_rational(mag)
        else:
            hpow = "h" if k == 1 else f"h^{k}"
            body = hpow if mag == 1 else f"{_fmt_rational(mag)}*{hpow}"
        if not parts:
            parts.append(body if c > 0 else f"-{body}")
        else:
            parts.append(("+ " if c > 0 else "- ") + body)
    return " ".join(parts) if parts else "0"


class ScalarRing:
    """The coefficient ring Q[h]/(h^(N+1)) for a fixed truncation order."""

    def __init__(self, order: int):
        if order < 0:
            raise ValueError("truncation order must be >= 0")
        self.order = order
        self.zero = Scalar._raw((Fraction(0),) * (order + 1))
        self.one = self(1)
        self.h = self.monomial(1) if order >= 1 else self.zero

    def __call__(self, value) -> Scalar:
        if isinstance(value, Scalar):
            if value.order != self.order:
                raise OrderMismatch(
                    f"scalar has truncation order {value.order}, ring has {self.order}")
            return value
        if isinstance(value, str):
            return parse_scalar(value, self.order)
        return Scalar._raw((Fraction(value),) + (Fraction(0),) * self.order)

    def monomial(self, k: int, coeff=1) -> Scalar:
        coeffs = [Fraction(0)] * (self.order + 1)
        if k <= self.order:
            coeffs[k] = Fraction(coeff)
        return Scalar._raw(tuple(coeffs))

    def __eq__(self, other):
        return isinstance(other, ScalarRing) and other.order == self.order

    def __hash__(self):
        return hash(("ScalarRing", self.order))

    def __repr__(self):
        return f"ScalarRing(order={self.order})"


_TERM = re.compile(
    r"""\s*(?P<sign>[+-])?\s*
        (?:(?P<num>\d+(?:/\d+)?)\s*(?P<star>\*)?\s*)?
        (?P<h>h(?:\s*\^\s*(?P<pow>\d+))?)?\s*""",
    re.VERBOSE,
)


def parse_scalar(text: str, order: int) -> Scalar:
    """Parse ``c0 + c1*h + ... + cN*h^N``.

    Raises ``ValueError`` for malformed text and for a nonzero term above
    ``h^order``.
    """
    coeffs = [Fraction(0)] * (order + 1)
    pos, n, first = 0, len(text), True
    if not text.strip():
        raise ValueError("empty scalar literal")
    while pos < n:
        m = _TERM.match(text, pos)
        if not m or m.end() == pos or (not m.group("num") and not m.group("h")):
            raise ValueError(f"bad scalar literal {text!r} at column {pos + 1}")
        if not first and not m.group("sign"):
            raise ValueError(f"missing operator in {text!r} at column {pos + 1}")
        if m.group("star") and not m.group("h"):
            raise ValueError(f"dangling '*' in {text!r}")
        c = Fraction(m.group("num")) if m.group("num") else Fraction(1)
        if m.group("sign") == "-":
            c = -c
        k = 0
        if m.group("h"):
            k = int(m.group("pow")) if m.group("pow") else 1
        if k > order:
            if c:
                raise ValueError(f"term h^{k} exceeds truncation order {order}")
        else:
            coeffs[k] += c
        pos, first = m.end(), False
    return Scalar(coeffs)
