"""Finite K-linear combinations over a keyed basis.

Every algebraic object in the package (Hopf elements, tensors, polynomials,
module elements, forms) is an :class:`Element`: a space plus a dict from basis
keys to nonzero :class:`~twistq.scalars.Scalar` coefficients.  The dict never
stores zeros, so equal elements compare equal by their terms.
"""

from __future__ import annotations

from numbers import Rational

from .scalars import Scalar, ScalarRing


class SpaceMismatch(TypeError):
    """Raised when elements of different spaces are combined."""


def add_into(acc: dict, key, coeff: Scalar) -> None:
    """``acc[key] += coeff``, dropping the entry when it cancels."""
    old = acc.get(key)
    if old is None:
        if coeff:
            acc[key] = coeff
        return
    new = old + coeff
    if new:
        acc[key] = new
    else:
        del acc[key]


def add_scaled(acc: dict, terms: dict, coeff: Scalar | None = None) -> None:
    if coeff is None:
        for k, c in terms.items():
            add_into(acc, k, c)
    else:
        for k, c in terms.items():
            add_into(acc, k, c * coeff)


class Space:
    """A free K-module with a keyed basis.

    Subclasses may define ``mul_keys(k1, k2) -> dict`` to make the space an
    algebra, and ``act_key(hkey, key) -> dict`` for a left Hopf action.
    """

    def __init__(self, ring: ScalarRing, name: str = ""):
        self.ring = ring
        self.name = name

    def element(self, terms: dict) -> "Element":
        return Element(self, {k: c for k, c in terms.items() if c})

    def zero(self) -> "Element":
        return Element(self, {})

    def basis(self, key) -> "Element":
        return Element(self, {key: self.ring.one})

    def format_key(self, key) -> str:
        return str(key)

    def sort_key(self, key):
        return repr(key)

    def __repr__(self):
        return f"<{type(self).__name__} {self.name}>"


class Element:
    __slots__ = ("space", "terms")

    def __init__(self, space: Space, terms: dict):
        self.space = space
        self.terms = terms

    @property
    def ring(self) -> ScalarRing:
        return self.space.ring

    def _check(self, other: "Element") -> None:
        if other.space is not self.space:
            raise SpaceMismatch(f"{self.space!r} vs {other.space!r}")

    def __add__(self, other):
        if not isinstance(other, Element):
            return NotImplemented
        self._check(other)
        acc = dict(self.terms)
        add_scaled(acc, other.terms)
        return Element(self.space, acc)

    def __sub__(self, other):
        if not isinstance(other, Element):
            return NotImplemented
        self._check(other)
        acc = dict(self.terms)
        for k, c in other.terms.items():
            add_into(acc, k, -c)
        return Element(self.space, acc)

    def __neg__(self):
        return Element(self.space, {k: -c for k, c in self.terms.items()})

    def scale(self, c) -> "Element":
        if not isinstance(c, Scalar):
            c = self.ring(c)
        if not c:
            return self.space.zero()
        out = {}
        for k, v in self.terms.items():
            p = v * c
            if p:
                out[k] = p
        return Element(self.space, out)

    def __mul__(self, other):
        if isinstance(other, Element):
            self._check(other)
            mul = getattr(self.space, "mul_keys", None)
            if mul is None:
                raise TypeError(f"{self.space!r} has no product")
            acc: dict = {}
            for k1, c1 in self.terms.items():
                for k2, c2 in other.terms.items():
                    add_scaled(acc, mul(k1, k2), c1 * c2)
            return Element(self.space, acc)
        if isinstance(other, (Scalar, int, Rational)):
            return self.scale(other)
        return NotImplemented

    def __rmul__(self, other):
        if isinstance(other, (Scalar, int, Rational)):
            return self.scale(other)
        return NotImplemented

    def __pow__(self, k: int):
        if k < 0:
            raise ValueError("negative powers are not supported")
        result = self.space.one()
        for _ in range(k):
            result = result * self
        return result

    def __eq__(self, other):
        if not isinstance(other, Element):
            return NotImplemented
        return other.space is self.space and other.terms == self.terms

    def __hash__(self):
        return hash((id(self.space), frozenset(self.terms.items())))

    def __bool__(self):
        return bool(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def coefficient(self, key) -> Scalar:
        return self.terms.get(key, self.ring.zero)

    def items(self):
        return self.terms.items()

    def sorted_items(self):
        return sorted(self.terms.items(), key=lambda kv: self.space.sort_key(kv[0]))

    def __str__(self):
        return format_element(self)

    def __repr__(self):
        return f"Element({self.space.name}: {self})"


def format_element(x: Element) -> str:
    if not x.terms:
        return "0"
    parts = []
    for k, c in x.sorted_items():
        basis = x.space.format_key(k)
        if c == 1:
            body = basis
        elif c == -1:
            body = "-" + basis
        else:
            cs = str(c)
            simple = sum(1 for q in c.coeffs if q) == 1
            if basis == "1":
                body = cs if simple else f"({cs})"
            else:
                body = f"{cs}*{basis}" if simple else f"({cs})*{basis}"
        parts.append(body)
    out = parts[0]
    for p in parts[1:]:
        out += f" - {p[1:]}" if p.startswith("-") else f" + {p}"
    return out


def linear_map(x: Element, fn, target: Space) -> Element:
    """Extend ``fn: key -> dict`` linearly to ``x``; the result lives in ``target``."""
    acc: dict = {}
    for k, c in x.terms.items():
        add_scaled(acc, fn(k), c)
    return Element(target, acc)



def rational_inverse(M: list[list]) -> list[list]:
    """Inverse of a square matrix of rationals by Gauss-Jordan elimination."""
    from fractions import Fraction
    n = len(M)
    A = [[Fraction(v) for v in row] + [Fraction(int(i == j)) for j in range(n)]
         for i, row in enumerate(M)]
    for col in range(n):
        piv = next((r for r in range(col, n) if A[r][col] != 0), None)
        if piv is None:
            raise ValueError("singular matrix")
        A[col], A[piv] = A[piv], A[col]
        p = A[col][col]
        A[col] = [v / p for v in A[col]]
        for r in range(n):
            if r != col and A[r][col] != 0:
                f = A[r][col]
                A[r] = [a - f * b for a, b in zip(A[r], A[col])]
    return [row[n:] for row in A]
