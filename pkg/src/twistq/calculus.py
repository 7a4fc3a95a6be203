"""Exterior differential calculus over polynomial algebras and its deformation."""

from __future__ import annotations

import itertools

from .checks import CheckReport
from .linear import Element, SpaceMismatch, add_into
from .modalg import (FreeBimodule, PolyAlgebra, StarStructure, act, act_key,
                     probe_elements, probe_tuples)


class Forms(FreeBimodule):
    """All forms ``sum dx_I . a_I``; labels are strictly increasing index tuples."""

    def __init__(self, A: PolyAlgebra):
        labels = [I for n in range(A.n + 1) for I in itertools.combinations(range(A.n), n)]
        base = FreeBimodule.trivial(A, labels)
        super().__init__(A, labels, base._basis_action, name="Omega")

    def format_label(self, label):
        if not label:
            return "1"
        return "^".join(f"d{self.A.variables[i]}" for i in label)

    def sort_key(self, key):
        return (len(key[0]), self.A.sort_key(key[1]), key[0])

    def form_degree(self, key) -> int:
        return len(key[0])

    def homogeneous_probe_keys(self, form_degree: int, degree: int):
        return [k for k in self.probe_keys(degree) if len(k[0]) == form_degree]


def _merge(I, J):
    """Sign and sorted union of two index tuples, or ``(0, None)`` on overlap."""
    if set(I) & set(J):
        return 0, None
    seq = list(I) + list(J)
    sign = 1
    for a, b in itertools.combinations(range(len(seq)), 2):
        if seq[a] > seq[b]:
            sign = -sign
    return sign, tuple(sorted(seq))


class DiffCalculus:
    """``(Omega, ^, d)`` with generators acting coefficient-wise (``X |> dx_i = 0``)."""

    def __init__(self, A: PolyAlgebra):
        if not isinstance(A, PolyAlgebra):
            raise SpaceMismatch("differential calculi need a polynomial algebra")
        self.A = A
        self.omega = Forms(A)
        self._wedge_memo: dict = {}
        self._d_memo: dict = {}

    def function(self, a: Element) -> Element:
        """``a`` as a 0-form."""
        return self.omega.vec((), a)

    def dx(self, i: int) -> Element:
        return self.omega.vec((i,))

    def form(self, label, a: Element | None = None) -> Element:
        return self.omega.vec(tuple(label), a)

    def degree(self, x: Element) -> int:
        degs = {len(k[0]) for k in x.terms}
        if len(degs) > 1:
            raise ValueError("form is not homogeneous")
        return degs.pop() if degs else 0

    def _wedge_keys(self, k1, k2):
        hit = self._wedge_memo.get((k1, k2))
        if hit is None:
            (I, a), (J, b) = k1, k2
            sign, L = _merge(I, J)
            hit = {}
            if sign:
                for m, c in self.A.mul_keys(a, b).items():
                    hit[(L, m)] = c * sign
            self._wedge_memo[(k1, k2)] = hit
        return hit

    def wedge(self, x: Element, y: Element) -> Element:
        if x.space is not self.omega or y.space is not self.omega:
            raise SpaceMismatch("wedge of non-forms")
        acc: dict = {}
        for k1, c1 in x.terms.items():
            for k2, c2 in y.terms.items():
                for k, c in self._wedge_keys(k1, k2).items():
                    add_into(acc, k, c * c1 * c2)
        return Element(self.omega, acc)

    def _d_key(self, key):
        hit = self._d_memo.get(key)
        if hit is None:
            I, a = key
            hit = {}
            for i in range(self.A.n):
                sign, L = _merge((i,), I)
                if not sign:
                    continue
                for m, c in self.A.derivative(i, a).items():
                    add_into(hit, (L, m), c * sign)
            self._d_memo[key] = hit
        return hit

    def d(self, x: Element) -> Element:
        if x.space is self.A:
            x = self.function(x)
        acc: dict = {}
        for k, c in x.terms.items():
            for kk, cc in self._d_key(k).items():
                add_into(acc, kk, c * cc)
        return Element(self.omega, acc)


class StarCalculus:
    """A calculus viewed in a frame: the wedge is deformed, ``d`` is unchanged."""

    def __init__(self, calc: DiffCalculus, frame: StarStructure):
        self.calc = calc
        self.frame = frame
        self.A = calc.A
        self.omega = calc.omega

    def wedge(self, x: Element, y: Element) -> Element:
        return self.frame.bilinear(self.calc.wedge, x, y, "wedge")

    def d(self, x: Element) -> Element:
        return self.calc.d(x)

    def function(self, a):
        return self.calc.function(a)

    def degree(self, x):
        return self.calc.degree(x)


def deform_calculus(calc: DiffCalculus, s: StarStructure) -> StarCalculus:
    return StarCalculus(calc, s)


def wedge(calc, x, y):
    return calc.wedge(x, y)


def d(calc, x):
    return calc.d(x)


def _homogeneous_pairs(omega: Forms, degree: int):
    for x, y in probe_tuples([omega, omega], degree):
        yield x, y, len(next(iter(x.terms))[0]), len(next(iter(y.terms))[0])


def calculus_check(view: StarCalculus, hprobes, degree: int,
                   report: CheckReport | None = None, prefix: str = "calculus") -> CheckReport:
    """Differential calculus axioms for the frame's wedge, with the frame's coproduct."""
    report = report if report is not None else CheckReport()
    s = view.frame
    om = view.omega
    probes = probe_elements(om, degree)
    with report.check(f"{prefix}.dd") as c:
        for x in probes:
            c.equal(view.d(view.d(x)), om.zero(), omega=x)
    with report.check(f"{prefix}.leibniz") as c:
        for x, y, p, _ in _homogeneous_pairs(om, degree):
            rhs = view.wedge(view.d(x), y) + view.wedge(x, view.d(y)).scale((-1) ** p)
            c.equal(view.d(view.wedge(x, y)), rhs, omega=x, eta=y)
    with report.check(f"{prefix}.assoc") as c:
        for x, y, z in probe_tuples([om, om, om], degree):
            c.equal(view.wedge(view.wedge(x, y), z), view.wedge(x, view.wedge(y, z)),
                    omega=x, eta=y, zeta=z)
    with report.check(f"{prefix}.functions") as c:
        # degree-0 forms wedge like the frame's module actions
        for a, x in probe_tuples([view.A, om], degree):
            c.equal(view.wedge(view.function(a), x), s.left(a, x), a=a, omega=x)
            c.equal(view.wedge(x, view.function(a)), s.right(x, a), a=a, omega=x)
    with report.check(f"{prefix}.covariance") as c:
        for xi in hprobes:
            for x in probes:
                c.equal(act(xi, view.d(x)), view.d(act(xi, x)), xi=xi, omega=x)
            for x, y in probe_tuples([om, om], degree):
                rhs = om.zero()
                for (h1, h2), k in s.structure.coproduct(xi).terms.items():
                    rhs = rhs + view.wedge(act_key(h1, x), act_key(h2, y)).scale(k)
                c.equal(act(xi, view.wedge(x, y)), rhs, xi=xi, omega=x, eta=y)
    with report.check(f"{prefix}.top") as c:
        top = tuple(range(view.A.n))
        for i in range(view.A.n):
            c.equal(view.wedge(view.calc.dx(i), view.calc.form(top)), om.zero(), i=i)
    return report


def graded_quasi_commutative(view: StarCalculus, degree: int, R=None,
                             report: CheckReport | None = None,
                             prefix: str = "calculus.quasicomm") -> CheckReport:
    """``w ^ w' = (-1)^(pq) (Rbar^a |> w') ^ (Rbar_a |> w)`` on homogeneous probe pairs."""
    report = report if report is not None else CheckReport()
    R = R or view.frame.R
    with report.check(prefix) as c:
        for x, y, p, q in _homogeneous_pairs(view.omega, degree):
            rhs = view.omega.zero()
            for (r1, r2), k in R.R_inv.terms.items():
                rhs = rhs + view.wedge(act_key(r1, y), act_key(r2, x)).scale(k)
            c.equal(view.wedge(x, y), rhs.scale((-1) ** (p * q)), omega=x, eta=y)
    return report
