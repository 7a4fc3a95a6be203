"""Right connections with their quantization; the braided sum on tensor products over A."""

from __future__ import annotations

import random

from .braid import braid_blocks, require_quasi_commutative
from .calculus import DiffCalculus
from .checks import CheckReport, PreconditionFailed
from .homdef import (Adjoint, BasisMatrix, D_F, D_F_inverse, LinComb, Op,
                     classical_frame)
from .linear import Element, SpaceMismatch
from .modalg import (FreeBimodule, StarStructure, act, act_key, probe_elements,
                     probe_tuples, right_mul)
from .tensor import flat_factors


class Connection(Op):
    """``nabla(e_i . a) = sum_j (e_j (x)_A omega_ji) . a + e_i (x)_A da``.

    ``omega`` maps ``(j, i)`` to a 1-form; missing entries are zero.
    """

    name = "nabla"

    def __init__(self, V: FreeBimodule, calc: DiffCalculus, omega: dict, name: str = "nabla"):
        self.frame = StarStructure.classical(V.hopf)
        super().__init__(V, self.frame.quotient([V, calc.omega]))
        self.V, self.calc = V, calc
        self.name = name
        for (j, i), w in omega.items():
            if w.space is not calc.omega or any(len(k[0]) != 1 for k in w.terms):
                raise SpaceMismatch(f"connection coefficient ({j},{i}) is not a 1-form")
        self.omega = {k: w for k, w in omega.items() if w}

    def basis_value(self, i) -> Element:
        out = self.cod.zero()
        for j in self.V.labels:
            w = self.omega.get((j, i))
            if w is not None:
                out = out + self.frame.otimes_A(self.V.vec(j), w)
        return out

    def eval_key(self, k):
        i, ak = k
        a = self.V.A.basis(ak)
        return (right_mul(self.basis_value(i), a)
                + self.frame.otimes_A(self.V.vec(i), self.calc.d(a)))

    def plus(self, other: dict, name: str | None = None) -> "Connection":
        """``nabla + P`` for ``P`` given by a 1-form matrix (an element of ``Hom_A(V, V (x)_A Omega)``)."""
        omega = dict(self.omega)
        for k, w in other.items():
            omega[k] = omega[k] + w if k in omega else w
        return Connection(self.V, self.calc, omega, name or f"{self.name}+P")


def hom_from_forms(V: FreeBimodule, calc: DiffCalculus, forms: dict) -> Op:
    """The right-A-linear map ``e_i -> sum_j e_j (x)_A forms[(j, i)]``."""
    cl = StarStructure.classical(V.hopf)
    cod = cl.quotient([V, calc.omega])
    matrix: dict = {}
    for (j, i), w in forms.items():
        for (I, ak), c in w.terms.items():
            key = ((j, I), i)
            add = V.A.basis(ak).scale(c)
            matrix[key] = matrix[key] + add if key in matrix else add
    return BasisMatrix(V, cod, matrix)


def trivial_connection(V: FreeBimodule, calc: DiffCalculus) -> Connection:
    return Connection(V, calc, {}, name="d")


def random_connection(V: FreeBimodule, calc: DiffCalculus, rng: random.Random,
                      max_degree: int = 1, density: float = 0.5, name: str = "nabla") -> Connection:
    """Sparse 1-form coefficients with small integer entries and low-degree monomials."""
    A = calc.A
    monos = A.probe_keys(max_degree)
    omega = {}
    for j in V.labels:
        for i in V.labels:
            w = calc.omega.zero()
            for var in range(A.n):
                for m in monos:
                    if rng.random() < density / len(monos):
                        w = w + calc.form((var,), A.basis(m)).scale(rng.choice([-2, -1, 1, 2, 3]))
            if w:
                omega[(j, i)] = w
    return Connection(V, calc, omega, name=name)


def D_tilde(s: StarStructure, nabla: Op) -> Op:
    """``phi^-1 o D_F(nabla)``; quotient elements are stored through ``phi``, so this is ``D_F``."""
    return D_F(s, nabla)


def D_tilde_inverse(s: StarStructure, nabla: Op) -> Op:
    return D_F_inverse(s, nabla)


def leibniz_check(frame: StarStructure, nabla: Op, calc, degree: int, rec) -> None:
    """``nabla(v a) = nabla(v) a + v (x)_A da`` in the frame."""
    A = calc.A
    for v, a in probe_tuples([nabla.dom, A], degree):
        lhs = nabla(frame.right(v, a))
        rhs = frame.right(nabla(v), a) + frame.otimes_A(v, calc.d(a))
        rec.equal(lhs, rhs, nabla=nabla.name, v=v, a=a)


def connection_check(s: StarStructure, connections, calc: DiffCalculus, degree: int,
                     hom_forms=None, report: CheckReport | None = None,
                     prefix: str = "conn", parts=("leibniz", "dtilde", "affine")) -> CheckReport:
    """Leibniz rule and quantization for a list of classical connections.

    ``hom_forms`` maps a module to the 1-form matrix of an element of
    ``Hom_A(V, V (x)_A Omega)`` (a dict, or a callable taking the module).
    """
    report = report if report is not None else CheckReport()
    cl = classical_frame(s)
    if "leibniz" in parts:
        with report.check(f"{prefix}.leibniz", note=f"{len(connections)} connections") as c:
            for nb in connections:
                leibniz_check(cl, nb, calc, degree, c)
    if "dtilde" in parts:
        with report.check(f"{prefix}.dtilde.leibniz", note=f"{len(connections)} connections") as c:
            for nb in connections:
                leibniz_check(s, D_tilde(s, nb), calc, degree, c)
        with report.check(f"{prefix}.dtilde.roundtrip") as c:
            for nb in connections:
                back = D_tilde_inverse(s, D_tilde(s, nb))
                for v in probe_elements(nb.dom, degree):
                    c.equal(back(v), nb(v), nabla=nb.name, v=v)
                for i in nb.V.labels:
                    c.equal(back(nb.V.vec(i)), nb.basis_value(i), nabla=nb.name, basis=i)
                fwd = D_tilde(s, D_tilde_inverse(s, nb))
                for v in probe_elements(nb.dom, degree):
                    c.equal(fwd(v), nb(v), nabla=nb.name, v=v, direction="D o inv")
    if "affine" in parts and hom_forms is not None:
        with report.check(f"{prefix}.affine", note=f"{len(connections)} connections") as c:
            for nb in connections:
                forms = hom_forms(nb.V) if callable(hom_forms) else hom_forms
                P = hom_from_forms(nb.V, calc, forms)
                shifted = nb.plus(forms)
                leibniz_check(cl, shifted, calc, degree, c)
                diff = shifted - nb
                Dd = D_tilde(s, shifted) - D_tilde(s, nb)
                DP = D_tilde(s, P)
                for v in probe_elements(nb.dom, degree):
                    c.equal(diff(v), P(v), nabla=nb.name, v=v)
                    c.equal(Dd(v), DP(v), nabla=nb.name, v=v, side="quantized")
                for v, a in probe_tuples([nb.dom, calc.A], degree):
                    c.equal(DP(s.right(v, a)), s.right(DP(v), a), v=v, a=a, side="Hom_A*")
    return report


TAU_FAULTS = ("swapped-legs", "first-leg-only")


def tau_inverse_term(frame: StarStructure, x: Element, w: Element, fault: str | None = None) -> Element:
    """``tau^-1(x (x)_A w)`` for ``x`` in ``... (x)_A Omega`` and ``w`` a (composite) factor.

    The last leg of ``x`` braids past the legs of ``w``.  ``fault`` selects a
    deliberately wrong braiding: ``swapped-legs`` uses ``(R^a |> w) (x) (R_a |> x)``,
    ``first-leg-only`` lets ``R`` act on the first leg of a composite ``w`` only.
    """
    t = frame.otimes(x, w)
    n = len(flat_factors([x.space]))
    m = len(flat_factors([w.space]))
    R = frame.R.swapped() if fault == "swapped-legs" else None
    return frame.project(braid_blocks(frame, t, n - 1, n, n + m, R, inverse=True,
                                      first_leg_only=fault == "first-leg-only"))


def braided_left_leibniz_check(frame: StarStructure, nablas, calc, degree: int,
                               report: CheckReport | None = None,
                               prefix: str = "conn.braidedleibniz") -> CheckReport:
    """``nabla(a w) = (Rbar^a |> a)(Rbar_a |> nabla)(w) + tau^-1(da (x)_A w)``."""
    report = report if report is not None else CheckReport()
    st = frame.structure
    with report.check(prefix, note=f"{len(nablas)} connections") as c:
        doms = list({id(nb.dom): nb.dom for nb in nablas}.values())
        require_quasi_commutative(frame, doms + [calc.omega], degree)
        for nb in nablas:
            legs = [(k, r1, Adjoint(frame.H.basis(r2), nb, st))
                    for (r1, r2), k in frame.R.R_inv.terms.items()]
            for a, w in probe_tuples([calc.A, nb.dom], degree):
                lhs = nb(frame.left(a, w))
                rhs = tau_inverse_term(frame, calc.d(a), w)
                for k, r1, adn in legs:
                    rhs = rhs + frame.left(act_key(r1, a), adn(w)).scale(k)
                c.equal(lhs, rhs, nabla=nb.name, a=a, w=w)
    return report


class Oplus(Op):
    """``(nabla_V (+)_R nabla_W)`` on ``V (x)_A W`` (either factor may be composite).

    ``tau^-1_23(nabla_V(v) (x)_A w) + (Rbar^a |> v) (x)_A (Rbar_a |> nabla_W)(w)``.
    ``fault`` is passed to :func:`tau_inverse_term`.
    """

    name = "oplus"

    def __init__(self, frame: StarStructure, nV: Op, nW: Op, fault: str | None = None):
        self.frame = frame
        dom = frame.quotient([nV.dom, nW.dom])
        omega = nV.cod.factors[-1]
        super().__init__(dom, frame.quotient([nV.dom, nW.dom, omega]))
        self.nV, self.nW, self.fault = nV, nW, fault
        self._n = len(flat_factors([nV.dom]))
        self._legs = [(k, frame.H.basis(r1), Adjoint(frame.H.basis(r2), nW, frame.structure))
                      for (r1, r2), k in frame.R.R_inv.terms.items()]
        self.name = f"({nV.name} (+) {nW.name})"

    def _block(self, factors, keys):
        fr = self.frame
        if len(factors) == 1:
            return factors[0].basis(keys[0])
        return fr.project(Element(fr.tensor_space(factors), {keys: fr.H.ring.one}))

    def on_tensor(self, t: Element) -> Element:
        """The formula on a K-level representative."""
        fr = self.frame
        n = self._n
        fac = t.space.factors
        out = self.cod.zero()
        for key, c in t.terms.items():
            v = self._block(fac[:n], key[:n])
            w = self._block(fac[n:], key[n:])
            term = tau_inverse_term(fr, self.nV(v), w, self.fault)
            for k, r1, adW in self._legs:
                term = term + fr.otimes_A(act(r1, v), adW(w)).scale(k)
            out = out + term.scale(c)
        return out

    def eval_key(self, k):
        return self.on_tensor(self.frame.lift(self.dom.basis(k)))


def oplus(frame: StarStructure, nV: Op, nW: Op, fault: str | None = None) -> Op:
    return Oplus(frame, nV, nW, fault)


class ReducedSum(Op):
    """``tau^-1_23 (nabla_V (x) id) + id (x) nabla_W``; equals the braided sum for equivariant ``nabla_W``."""

    name = "reduced"

    def __init__(self, frame: StarStructure, nV: Op, nW: Op):
        self.inner = Oplus(frame, nV, nW)
        super().__init__(self.inner.dom, self.inner.cod)
        self.frame, self.nV, self.nW = frame, nV, nW

    def eval_key(self, k):
        fr = self.frame
        inner = self.inner
        t = fr.lift(self.dom.basis(k))
        n = inner._n
        fac = t.space.factors
        out = self.cod.zero()
        for key, c in t.terms.items():
            v = inner._block(fac[:n], key[:n])
            w = inner._block(fac[n:], key[n:])
            term = tau_inverse_term(fr, self.nV(v), w) + fr.otimes_A(v, self.nW(w))
            out = out + term.scale(c)
        return out


def oplus_check(frame: StarStructure, nV: Op, nW: Op, calc, degree: int,
                report: CheckReport | None = None, prefix: str = "conn.oplus",
                fault: str | None = None) -> CheckReport:
    """Well-definedness on relation probes and the Leibniz rule of the braided sum."""
    report = report if report is not None else CheckReport()
    S = Oplus(frame, nV, nW, fault)
    with report.check(f"{prefix}.welldefined") as c:
        require_quasi_commutative(frame, [nW.dom, calc.omega], degree)
        V, W = nV.dom, nW.dom
        for v, a, w in probe_tuples([V, calc.A, W], degree):
            rel = frame.otimes(frame.right(v, a), w) - frame.otimes(v, frame.left(a, w))
            c.equal(S.on_tensor(rel), S.cod.zero(), v=v, a=a, w=w)
    with report.check(f"{prefix}.leibniz") as c:
        leibniz_check(frame, S, calc, degree, c)
    return report


def oplus_associativity_check(frame: StarStructure, nV: Op, nW: Op, nZ: Op, degree: int,
                              report: CheckReport | None = None, prefix: str = "conn.oplus.assoc",
                              fault: str | None = None) -> CheckReport:
    report = report if report is not None else CheckReport()
    with report.check(prefix) as c:
        left = Oplus(frame, Oplus(frame, nV, nW, fault), nZ, fault)
        right = Oplus(frame, nV, Oplus(frame, nW, nZ, fault), fault)
        if left.dom is not right.dom:
            raise SpaceMismatch("bracketings live on different spaces")
        for x in probe_elements(left.dom, degree):
            c.equal(left(x), right(x), x=x)
    return report


def equivariant_reduction_check(frame: StarStructure, nV: Op, nW: Op, degree: int, hprobes,
                                report: CheckReport | None = None,
                                prefix: str = "conn.oplus.equivariant") -> CheckReport:
    """For ``nabla_W`` equivariant in the frame, the braided sum is the unbraided one."""
    report = report if report is not None else CheckReport()
    st = frame.structure
    with report.check(prefix) as c:
        for xi in hprobes:
            e = st.counit(xi)
            for w in probe_elements(nW.dom, degree):
                if Adjoint(xi, nW, st)(w) != nW(w).scale(e):
                    raise PreconditionFailed(f"{nW.name} is not equivariant at xi={xi}")
        S, Rd = Oplus(frame, nV, nW), ReducedSum(frame, nV, nW)
        for x in probe_elements(S.dom, degree):
            c.equal(S(x), Rd(x), x=x)
    return report


def check_connection_deformation_diagram(s: StarStructure, nV: Connection, nW: Connection,
                                         degree: int, report: CheckReport | None = None,
                                         prefix: str = "conn.diagram",
                                         top_frame: StarStructure | None = None) -> CheckReport:
    """``phi o (D~(nabla_V) (+)_RF D~(nabla_W)) = D_F(nabla_V (+)_R nabla_W) o phi``.

    ``top_frame`` replaces the star frame on the top edge (fault injection).
    """
    report = report if report is not None else CheckReport()
    cl = classical_frame(s)
    top_fr = top_frame or s
    top = Oplus(top_fr, D_tilde(s, nV), D_tilde(s, nW))
    bottom = D_F(s, Oplus(cl, nV, nW))
    with report.check(prefix) as c:
        for x in probe_elements(top.dom, degree):
            c.equal(top(x), bottom(x), x=x)
    return report
