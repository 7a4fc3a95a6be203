"""Linear maps between modules under the adjoint action, and their star deformation.

Operators are expression trees evaluated lazily on basis keys; each node
memoises its values on keys.  Equality of operators is extensional on probes.
"""

from __future__ import annotations

import itertools
from fractions import Fraction

from .checks import CheckReport
from .linear import Element, SpaceMismatch, add_into, add_scaled, rational_inverse
from .modalg import (FinFunAlgebra, FreeBimodule, ModuleAlgebra, StarStructure, act, act_key,
                     probe_elements, probe_tuples, right_mul)


class Op:
    """K-linear map ``dom -> cod`` defined on basis keys."""

    name = "op"

    def __init__(self, dom, cod):
        self.dom = dom
        self.cod = cod
        self._memo: dict = {}

    def key(self, k) -> Element:
        out = self._memo.get(k)
        if out is None:
            out = self._memo[k] = self.eval_key(k)
            if out.space is not self.cod:
                raise SpaceMismatch(f"{self.name} produced {out.space!r}, expected {self.cod!r}")
        return out

    def eval_key(self, k) -> Element:
        raise NotImplementedError

    def __call__(self, x: Element) -> Element:
        if x.space is not self.dom:
            raise SpaceMismatch(f"{self.name} expects {self.dom!r}, got {x.space!r}")
        acc: dict = {}
        for k, c in x.terms.items():
            add_scaled(acc, self.key(k).terms, c)
        return Element(self.cod, acc)

    def __add__(self, other: "Op") -> "Op":
        return LinComb([(1, self), (1, other)])

    def __sub__(self, other: "Op") -> "Op":
        return LinComb([(1, self), (-1, other)])

    def __neg__(self):
        return LinComb([(-1, self)])

    def scale(self, c) -> "Op":
        return LinComb([(c, self)])

    def __matmul__(self, other: "Op") -> "Op":
        return Compose(self, other)

    def __repr__(self):
        return f"<{self.name}: {self.dom.name} -> {self.cod.name}>"


class Identity(Op):
    name = "id"

    def __init__(self, space):
        super().__init__(space, space)

    def eval_key(self, k):
        return self.dom.basis(k)


class Retag(Op):
    """Identity on keys between two spaces with the same basis."""

    name = "retag"

    def eval_key(self, k):
        return self.cod.basis(k)


class FunctionOp(Op):
    def __init__(self, dom, cod, fn, name="fn"):
        super().__init__(dom, cod)
        self.fn = fn
        self.name = name

    def eval_key(self, k):
        return self.fn(self.dom.basis(k))


class BasisMatrix(Op):
    """Right-A-linear map ``e_i . a -> sum_j f_j . (m_ji a)`` between free bimodules.

    ``matrix[(j, i)]`` holds ``m_ji`` as an element of ``A``; missing entries are zero.
    """

    name = "matrix"

    def __init__(self, dom: FreeBimodule, cod: FreeBimodule, matrix: dict):
        super().__init__(dom, cod)
        if dom.A is not cod.A:
            raise SpaceMismatch("matrix between modules over different algebras")
        self.matrix = {k: v for k, v in matrix.items() if v}

    def eval_key(self, k):
        i, ak = k
        a = self.dom.A.basis(ak)
        out = self.cod.zero()
        for j in self.cod.labels:
            m = self.matrix.get((j, i))
            if m is not None:
                out = out + self.cod.vec(j, m * a)
        return out


class LeftMul(Op):
    """``l_a`` in a frame: ``v -> a . v`` (or ``a * v``)."""

    name = "lmul"

    def __init__(self, a: Element, module, frame: StarStructure):
        super().__init__(module, module)
        self.a = a
        self.frame = frame

    def eval_key(self, k):
        v = self.dom.basis(k)
        if isinstance(self.dom, ModuleAlgebra):
            return self.frame.mul(self.a, v)
        return self.frame.left(self.a, v)


class RightMul(Op):
    name = "rmul"

    def __init__(self, a: Element, module, frame: StarStructure):
        super().__init__(module, module)
        self.a = a
        self.frame = frame

    def eval_key(self, k):
        v = self.dom.basis(k)
        if isinstance(self.dom, ModuleAlgebra):
            return self.frame.mul(v, self.a)
        return self.frame.right(v, self.a)


class HopfAct(Op):
    name = "act"

    def __init__(self, xi: Element, space):
        super().__init__(space, space)
        self.xi = xi

    def eval_key(self, k):
        return act(self.xi, self.dom.basis(k))


class Compose(Op):
    name = "compose"

    def __init__(self, P: Op, Q: Op):
        if Q.cod is not P.dom:
            raise SpaceMismatch(f"cannot compose {P!r} after {Q!r}")
        super().__init__(Q.dom, P.cod)
        self.P, self.Q = P, Q

    def eval_key(self, k):
        return self.P(self.Q.key(k))


class LinComb(Op):
    name = "lincomb"

    def __init__(self, terms):
        terms = list(terms)
        dom, cod = terms[0][1].dom, terms[0][1].cod
        for _, P in terms:
            if P.dom is not dom or P.cod is not cod:
                raise SpaceMismatch("linear combination of maps with different types")
        super().__init__(dom, cod)
        ring = dom.ring
        self.terms = [(ring(c), P) for c, P in terms]

    def eval_key(self, k):
        out = self.cod.zero()
        for c, P in self.terms:
            out = out + P.key(k).scale(c)
        return out


class Adjoint(Op):
    """``xi |> P = xi_1 |> o P o S(xi_2) |>`` for the given Hopf structure."""

    name = "adjoint"

    def __init__(self, xi: Element, P: Op, structure):
        super().__init__(P.dom, P.cod)
        self.xi, self.P, self.structure = xi, P, structure
        st = structure
        self._legs = []
        for (h1, h2), c in st.coproduct(xi).terms.items():
            self._legs.append((c, h1, st.antipode(st.base.basis(h2))))

    def eval_key(self, k):
        v = self.dom.basis(k)
        out = self.cod.zero()
        for c, h1, s2 in self._legs:
            out = out + act_key(h1, self.P(act(s2, v))).scale(c)
        return out


def adjoint(xi: Element, P: Op, structure) -> Op:
    return Adjoint(xi, P, structure)


def compose(P: Op, Q: Op) -> Op:
    return Compose(P, Q)


def classical_structure(s: StarStructure):
    return getattr(s.structure, "parent", s.H)


def _basis_h(s, k):
    return s.H.basis(k)


def star_compose(s: StarStructure, P: Op, Q: Op) -> Op:
    """``P o* Q = (fbar^a |> P) o (fbar_a |> Q)``."""
    if s.twist is None:
        return Compose(P, Q)
    cl = classical_structure(s)
    return LinComb([(c, Compose(Adjoint(_basis_h(s, f1), P, cl), Adjoint(_basis_h(s, f2), Q, cl)))
                    for (f1, f2), c in s.twist.F_inv.terms.items()])


def star_lmul(s: StarStructure, a: Element, P: Op) -> Op:
    """``a * P = (fbar^a |> a) . (fbar_a |> P)`` where ``a . P = l_a o P``."""
    cl = classical_structure(s)
    plain = classical_frame(s)
    if s.twist is None:
        return Compose(LeftMul(a, P.cod, plain), P)
    return LinComb([(c, Compose(LeftMul(act_key(f1, a), P.cod, plain),
                                Adjoint(_basis_h(s, f2), P, cl)))
                    for (f1, f2), c in s.twist.F_inv.terms.items()])


def star_rmul(s: StarStructure, P: Op, a: Element) -> Op:
    """``P * a = (fbar^a |> P) . (fbar_a |> a)`` where ``P . a = P o l_a``."""
    cl = classical_structure(s)
    plain = classical_frame(s)
    if s.twist is None:
        return Compose(P, LeftMul(a, P.dom, plain))
    return LinComb([(c, Compose(Adjoint(_basis_h(s, f1), P, cl),
                                LeftMul(act_key(f2, a), P.dom, plain)))
                    for (f1, f2), c in s.twist.F_inv.terms.items()])


def classical_frame(s: StarStructure) -> StarStructure:
    """The undeformed frame over the same backend (cached on ``s``)."""
    cl = s.__dict__.get("_classical_frame")
    if cl is None:
        cl = s._classical_frame = StarStructure.classical(s.H, getattr(s, "base_R", None))
    return cl


def D_F(s: StarStructure, P: Op) -> Op:
    """``D_F(P) = (fbar^a |> P) o fbar_a |>``.

    Deformed modules share elements and action with the classical ones, so
    the result has the same domain and codomain as ``P``.
    """
    if s.twist is None:
        return P
    cl = classical_structure(s)
    body = LinComb([(c, Compose(Adjoint(_basis_h(s, f1), P, cl), HopfAct(_basis_h(s, f2), P.dom)))
                    for (f1, f2), c in s.twist.F_inv.terms.items()])
    body.name = f"D_F({P.name})"
    return body


def D_F_inverse(s: StarStructure, P: Op) -> Op:
    """``(f^a |>_F P) o f_a |>``: the same construction for ``F^-1`` as a twist of ``H^F``."""
    if s.twist is None:
        return P
    body = LinComb([(c, Compose(Adjoint(_basis_h(s, f1), P, s.structure), HopfAct(_basis_h(s, f2), P.dom)))
                    for (f1, f2), c in s.twist.F.terms.items()])
    body.name = f"D_F^-1({P.name})"
    return body


def phi(s: StarStructure, *factors) -> Op:
    """``V* (x) W* -> (V (x)_A W)*``, ``v (x) w -> (fbar^a |> v) (x)_A (fbar_a |> w)``.

    The domain holds K-level representatives; the value is the quotient normal form.
    """
    dom = s.tensor_space(factors)
    return FunctionOp(dom, s.quotient(factors), s.project, name="phi")


def phi_inverse(s: StarStructure, *factors) -> Op:
    q = s.quotient(factors)
    return FunctionOp(q, s.tensor_space(factors), s.lift, name="phi^-1")


# ---------------------------------------------------------------------------
# Extensional comparison and checks


def equal_on(rec, P: Op, Q: Op, probes, **inputs) -> bool:
    ok = True
    for x in probes:
        ok &= rec.equal(P(x), Q(x), op=inputs.get("op", P.name), v=x,
                        **{k: v for k, v in inputs.items() if k != "op"})
    return ok


def phi_check(s: StarStructure, V, W, degree: int, hprobes=(),
              report: CheckReport | None = None, prefix: str = "phi") -> CheckReport:
    """``phi`` is well defined on relation probes and is a linear isomorphism."""
    report = report if report is not None else CheckReport()
    A = V.A
    f, fi = phi(s, V, W), phi_inverse(s, V, W)
    with report.check(f"{prefix}.welldefined") as c:
        for v, a, w in probe_tuples([V, A, W], degree):
            rel = s.otimes(s.right(v, a), w) - s.otimes(v, s.left(a, w))
            c.equal(f(rel), f.cod.zero(), v=v, a=a, w=w)
    with report.check(f"{prefix}.roundtrip") as c:
        for y in probe_elements(f.cod, degree):
            c.equal(f(fi(y)), y, y=y)
    with report.check(f"{prefix}.linear") as c:
        for v, w, a in probe_tuples([V, W, A], degree):
            c.equal(f(s.otimes(v, s.right(w, a))), s.right(f(s.otimes(v, w)), a), v=v, w=w, a=a)
            c.equal(f(s.otimes(s.left(a, v), w)), s.left(a, f(s.otimes(v, w))), v=v, w=w, a=a)
    with report.check(f"{prefix}.equivariant") as c:
        for xi in hprobes:
            for v, w in probe_tuples([V, W], degree):
                t = s.otimes(v, w)
                c.equal(f(act(xi, t)), act(xi, f(t)), xi=xi, v=v, w=w)
    return report


def check_DF_structure(s: StarStructure, ops, degree: int, hprobes, apro=None,
                       report: CheckReport | None = None, prefix: str = "homdef",
                       deformed_structure=None) -> CheckReport:
    """Intertwining properties of ``D_F`` on a list of operators.

    ``ops`` holds ``(P, right_linear)`` pairs.  ``deformed_structure``
    replaces ``H^F`` in the equivariance check (fault injection).
    """
    report = report if report is not None else CheckReport()
    dstruct = deformed_structure or s.structure
    cl = classical_structure(s)
    ops = list(ops)
    apro = apro if apro is not None else probe_elements(ops[0][0].dom.A, 1)

    def probes(sp):
        return probe_elements(sp, degree)

    with report.check(f"{prefix}.composition") as c:
        for (P, _), (Q, _) in itertools.product(ops, repeat=2):
            if Q.cod is P.dom:
                lhs = D_F(s, star_compose(s, P, Q))
                rhs = Compose(D_F(s, P), D_F(s, Q))
                equal_on(c, lhs, rhs, probes(lhs.dom), op=f"{P.name} o* {Q.name}")
    with report.check(f"{prefix}.bimodule") as c:
        for P, _ in ops:
            D = D_F(s, P)
            for a in apro:
                equal_on(c, D_F(s, star_lmul(s, a, P)), Compose(LeftMul(a, D.cod, s), D),
                         probes(D.dom), op=P.name, a=a, side="left")
                equal_on(c, D_F(s, star_rmul(s, P, a)), Compose(D, LeftMul(a, D.dom, s)),
                         probes(D.dom), op=P.name, a=a, side="right")
    with report.check(f"{prefix}.equivariance") as c:
        for P, _ in ops:
            for xi in hprobes:
                equal_on(c, D_F(s, Adjoint(xi, P, cl)), Adjoint(xi, D_F(s, P), dstruct),
                         probes(P.dom), op=P.name, xi=xi)
    with report.check(f"{prefix}.rightlinear") as c:
        for P, lin in ops:
            if not lin:
                continue
            D = D_F(s, P)
            for v, a in probe_tuples([D.dom, D.dom.A], degree):
                c.equal(D(s.right(v, a)), s.right(D(v), a), op=P.name, v=v, a=a)
    with report.check(f"{prefix}.roundtrip") as c:
        for P, _ in ops:
            D = D_F(s, P)
            equal_on(c, D_F_inverse(s, D), P, probes(P.dom), op=P.name, direction="inv o D")
            equal_on(c, D_F(s, D_F_inverse(s, P)), P, probes(P.dom), op=P.name, direction="D o inv")
    return report


def adjoint_check(s: StarStructure, ops, degree: int, hprobes,
                  report: CheckReport | None = None, prefix: str = "homdef.adjoint") -> CheckReport:
    """Module and module-algebra laws of the adjoint action of the frame."""
    report = report if report is not None else CheckReport()
    st = s.structure
    one = s.H.one()
    with report.check(f"{prefix}.unit") as c:
        for P, _ in ops:
            equal_on(c, Adjoint(one, P, st), P, probe_elements(P.dom, degree), op=P.name)
    with report.check(f"{prefix}.action") as c:
        for P, _ in ops:
            for xi, zeta in itertools.product(hprobes, repeat=2):
                equal_on(c, Adjoint(xi, Adjoint(zeta, P, st), st), Adjoint(xi * zeta, P, st),
                         probe_elements(P.dom, degree), op=P.name, xi=xi, zeta=zeta)
    with report.check(f"{prefix}.composition") as c:
        for (P, _), (Q, _) in itertools.product(ops, repeat=2):
            if Q.cod is not P.dom:
                continue
            for xi in hprobes:
                rhs = LinComb([(k, Compose(Adjoint(st.base.basis(h1), P, st),
                                           Adjoint(st.base.basis(h2), Q, st)))
                               for (h1, h2), k in st.coproduct(xi).terms.items()])
                equal_on(c, Adjoint(xi, Compose(P, Q), st), rhs,
                         probe_elements(Q.dom, degree), op=f"{P.name} o {Q.name}", xi=xi)
    return report


def _h0_solver(V: FreeBimodule, Phi):
    """Inverse of the h^0 part of ``Phi``, applied to a coordinate dict.

    Polynomial twists are ``1 + O(h)`` so the h^0 part is the identity; on
    finite function algebras it is inverted exactly over the full basis.
    """
    A = V.A
    if not isinstance(A, FinFunAlgebra):
        return V.from_coefficients
    keys = V.probe_keys(0)
    idx = {k: n for n, k in enumerate(keys)}
    M = [[Fraction(0)] * len(keys) for _ in keys]
    for col, k in enumerate(keys):
        for i, a in Phi(V.basis(k)).items():
            for ak, c in a.terms.items():
                M[idx[(i, ak)]][col] = c.coeffs[0]
    Minv = rational_inverse(M)

    def apply(coords: dict) -> Element:
        flat = {(i, ak): c for i, a in coords.items() for ak, c in a.terms.items()}
        acc: dict = {}
        for r, k in enumerate(keys):
            for src, c in flat.items():
                m = Minv[r][idx[src]]
                if m:
                    add_into(acc, k, c * m)
        return Element(V, acc)
    return apply


def dual_module_check(s: StarStructure, V: FreeBimodule, degree: int,
                      report: CheckReport | None = None, prefix: str = "homdef.dual") -> CheckReport:
    """``D_F`` of the coordinate functionals of ``V`` is a dual basis of ``V*``.

    The functionals are right-A*-linear, and with ``b_j`` solving
    ``D_F(e^i)(b_j) = delta_ij`` every probe satisfies ``v = sum_j b_j * D_F(e^i)(v)``.
    """
    report = report if report is not None else CheckReport()
    A = V.A
    R1 = A.regular()
    coord = {i: BasisMatrix(V, R1, {("1", i): A.one()}) for i in V.labels}
    D = {i: D_F(s, coord[i]) for i in V.labels}

    def to_A(x):
        return Element(A, {k: c for (_, k), c in x.terms.items()})

    def Phi(v):
        return {i: to_A(D[i](v)) for i in V.labels}

    with report.check(f"{prefix}.rightlinear") as c:
        for i in V.labels:
            for v, a in probe_tuples([V, A], degree):
                c.equal(to_A(D[i](s.right(v, a))), s.mul(to_A(D[i](v)), a), functional=i, v=v, a=a)
    correct = _h0_solver(V, Phi)
    basis = {}
    for j in V.labels:
        b = V.vec(j)
        # Newton steps with the h^0 part of Phi; exact after order + 1 rounds
        for _ in range(V.ring.order + 1):
            err = Phi(b)
            err[j] = err[j] - A.one()
            b = b - correct(err)
        basis[j] = b
    with report.check(f"{prefix}.basis") as c:
        for j in V.labels:
            got = Phi(basis[j])
            for i in V.labels:
                c.equal(got[i], A.one() if i == j else A.zero(), functional=i, vector=j)
        for v in probe_elements(V, degree):
            coords = Phi(v)
            recon = V.zero()
            for j in V.labels:
                recon = recon + s.right(basis[j], coords[j])
            c.equal(recon, v, v=v)
    return report
