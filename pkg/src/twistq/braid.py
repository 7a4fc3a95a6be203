"""Braidings, the R-tensor product of maps, and its descent to tensor products over A."""

from __future__ import annotations

import itertools

from .checks import CheckReport, PreconditionFailed
from .homdef import Adjoint, Compose, D_F, FunctionOp, LinComb, Op, classical_frame
from .linear import Element, SpaceMismatch, add_into, add_scaled
from .modalg import (StarStructure, act, probe_elements, probe_tuples,
                     quasi_commutative_algebra, quasi_commutative_bimodule)
from .tensor import QuotientA, TensorK, phi_K, flat_factors
from .twist import RMatrix


def _block_action(structure, factors, hkey, keys, first_leg_only=False) -> dict:
    """``h |> (x1 (x) ... (x) xn)`` on a block of legs, via the iterated coproduct.

    ``first_leg_only`` acts on ``x1`` alone (fault injection).
    """
    if len(keys) == 1 or first_leg_only:
        first = {(k,): c for k, c in factors[0].act_cached(hkey, keys[0]).items()}
        return {k + tuple(keys[1:]): c for k, c in first.items()}
    out: dict = {}
    for legs, c in structure.iterated_coproduct_key(hkey, len(keys)).items():
        partial = {(): c}
        for f, h, k in zip(factors, legs, keys):
            image = f.act_cached(h, k)
            nxt: dict = {}
            for p, a in partial.items():
                for q, b in image.items():
                    add_into(nxt, p + (q,), a * b)
            partial = nxt
            if not partial:
                break
        add_scaled(out, partial)
    return out


def braid_blocks(frame: StarStructure, t: Element, start: int, mid: int, end: int,
                 R: RMatrix | None = None, inverse: bool = False,
                 first_leg_only: bool = False) -> Element:
    """Braid legs ``[start:mid]`` past ``[mid:end]`` of a K-tensor.

    ``tau(x (x) y) = (Rbar^a |> y) (x) (Rbar_a |> x)`` and
    ``tau^-1(x (x) y) = (R_a |> y) (x) (R^a |> x)``.
    """
    R = R or frame.R
    sp = t.space
    fac = sp.factors
    fx, fy = fac[start:mid], fac[mid:end]
    new_factors = fac[:start] + fy + fac[start:mid] + fac[end:]
    target = frame.tensor_space(new_factors)
    st = frame.structure
    acc: dict = {}
    if inverse:
        terms = [(c, r2, r1) for (r1, r2), c in R.R.terms.items()]
    else:
        terms = [(c, r1, r2) for (r1, r2), c in R.R_inv.terms.items()]
    for key, c in t.terms.items():
        kx, ky = key[start:mid], key[mid:end]
        head, tail = key[:start], key[end:]
        for d, hy, hx in terms:
            ay = _block_action(st, fy, hy, ky, first_leg_only)
            if not ay:
                continue
            ax = _block_action(st, fx, hx, kx, first_leg_only)
            for ky2, e in ay.items():
                for kx2, f in ax.items():
                    add_into(acc, head + ky2 + kx2 + tail, c * d * e * f)
    return Element(target, acc)


def tau(frame: StarStructure, t: Element, R: RMatrix | None = None) -> Element:
    """``tau_R`` on a two-fold K-tensor (or on blocks given by a ``(x)`` of tensors)."""
    return braid_blocks(frame, t, 0, 1, t.space.rank, R)


def tau_inverse(frame: StarStructure, t: Element, R: RMatrix | None = None) -> Element:
    return braid_blocks(frame, t, 0, t.space.rank - 1, t.space.rank, R, inverse=True)


def braid_relations_check(frame: StarStructure, U, V, W, degree: int, hprobes=(),
                          R: RMatrix | None = None, report: CheckReport | None = None,
                          prefix: str = "braid") -> CheckReport:
    """Hexagon relations, invertibility and H-linearity of ``tau_R``."""
    report = report if report is not None else CheckReport()
    with report.check(f"{prefix}.relations") as c:
        for u, v, w in probe_tuples([U, V, W], degree):
            t = frame.otimes(u, v, w)
            # tau_(12)3 = tau_12 o tau_23
            lhs = braid_blocks(frame, t, 0, 2, 3, R)
            rhs = braid_blocks(frame, braid_blocks(frame, t, 1, 2, 3, R), 0, 1, 2, R)
            c.equal(lhs, rhs, u=u, v=v, w=w, relation="(12)3")
            # tau_1(23) = tau_23 o tau_12
            lhs = braid_blocks(frame, t, 0, 1, 3, R)
            rhs = braid_blocks(frame, braid_blocks(frame, t, 0, 1, 2, R), 1, 2, 3, R)
            c.equal(lhs, rhs, u=u, v=v, w=w, relation="1(23)")
    with report.check(f"{prefix}.inverse") as c:
        for v, w in probe_tuples([V, W], degree):
            t = frame.otimes(v, w)
            c.equal(tau_inverse(frame, tau(frame, t, R), R), t, v=v, w=w)
            c.equal(tau(frame, tau_inverse(frame, t, R), R), t, v=v, w=w)
    with report.check(f"{prefix}.equivariant") as c:
        for xi in hprobes:
            for v, w in probe_tuples([V, W], degree):
                t = frame.otimes(v, w)
                c.equal(act(xi, tau(frame, t, R)), tau(frame, act(xi, t), R), xi=xi, v=v, w=w)
    return report


# ---------------------------------------------------------------------------
# Tensor products of maps


def _block_element(frame, factors, keys) -> Element:
    """The element of a (possibly composite) factor given by a block of keys."""
    if len(factors) == 1:
        return factors[0].basis(keys[0])
    t = Element(frame.tensor_space(factors), {keys: frame.H.ring.one})
    return t


def _operand(frame, P: Op, factors, keys) -> Element:
    x = _block_element(frame, factors, keys)
    if isinstance(P.dom, QuotientA):
        x = frame.project(x)
    return x


class TensorOp(Op):
    """``P (x) Q`` on a K-tensor, no braiding."""

    name = "tensor"

    def __init__(self, frame: StarStructure, P: Op, Q: Op):
        super().__init__(frame.tensor_space([P.dom, Q.dom]), frame.tensor_space([P.cod, Q.cod]))
        self.frame, self.P, self.Q = frame, P, Q
        self._n = len(flat_factors([P.dom]))

    def eval_key(self, k):
        fx = self.dom.factors
        n = self._n
        x = _operand(self.frame, self.P, fx[:n], k[:n])
        y = _operand(self.frame, self.Q, fx[n:], k[n:])
        return self.frame.otimes(self.P(x), self.Q(y))


class RTensor(Op):
    """``P (x)_R Q = (P o Rbar^a |>) (x) (Rbar_a |> Q)`` on a K-tensor."""

    name = "rtensor"

    def __init__(self, frame: StarStructure, P: Op, Q: Op, R: RMatrix | None = None):
        super().__init__(frame.tensor_space([P.dom, Q.dom]), frame.tensor_space([P.cod, Q.cod]))
        self.frame, self.P, self.Q = frame, P, Q
        R = R or frame.R
        H = frame.H
        self._n = len(flat_factors([P.dom]))
        self._legs = [(c, H.basis(r1), Adjoint(H.basis(r2), Q, frame.structure))
                      for (r1, r2), c in R.R_inv.terms.items()]

    def eval_key(self, k):
        fx = self.dom.factors
        n = self._n
        x = _operand(self.frame, self.P, fx[:n], k[:n])
        y = _operand(self.frame, self.Q, fx[n:], k[n:])
        out = self.cod.zero()
        for c, r1, adQ in self._legs:
            out = out + self.frame.otimes(self.P(act(r1, x)), adQ(y)).scale(c)
        return out


def rtensor(frame: StarStructure, P: Op, Q: Op, R: RMatrix | None = None) -> Op:
    return RTensor(frame, P, Q, R)


def rtensor_via_braiding(frame: StarStructure, P: Op, Q: Op, R: RMatrix | None = None) -> Op:
    """``(P (x) id) o tau o (Q (x) id) o tau^-1``, for maps between single modules."""
    dom = frame.tensor_space([P.dom, Q.dom])

    def fn(t):
        s = tau_inverse(frame, t, R)
        s = _apply_first(frame, Q, s)
        s = tau(frame, s, R)
        return _apply_first(frame, P, s)
    return FunctionOp(dom, frame.tensor_space([P.cod, Q.cod]), fn, name="rtensor.braided")


def _apply_first(frame, P: Op, t: Element) -> Element:
    out = None
    for key, c in t.terms.items():
        x = t.space.factors[0].basis(key[0])
        rest = Element(frame.tensor_space(t.space.factors[1:]), {key[1:]: frame.H.ring.one}) \
            if len(key) > 2 else t.space.factors[1].basis(key[1])
        term = frame.otimes(P(x), rest).scale(c)
        out = term if out is None else out + term
    return out if out is not None else frame.tensor_space([P.cod] + list(t.space.factors[1:])).zero()


class OverA(Op):
    """Descent of a K-level map on ``V (x) W`` to ``V (x)_A W`` through lift and project."""

    name = "overA"

    def __init__(self, frame: StarStructure, K_op: Op):
        dom = frame.quotient(K_op.dom.factors)
        cod = frame.quotient(K_op.cod.factors)
        super().__init__(dom, cod)
        self.frame, self.K_op = frame, K_op

    def eval_key(self, k):
        t = self.frame.lift(self.dom.basis(k))
        return self.frame.project(self.K_op(t))


def rtensor_over_A(frame: StarStructure, P: Op, Q: Op, R: RMatrix | None = None) -> Op:
    return OverA(frame, RTensor(frame, P, Q, R))


def right_on_last(frame: StarStructure, t: Element, a: Element) -> Element:
    """``(v (x) w) . a = v (x) (w . a)`` in the frame."""
    sp = t.space
    last = sp.factors[-1]
    acc: dict = {}
    for key, c in t.terms.items():
        w = frame.right(last.basis(key[-1]), a)
        for k, d in w.terms.items():
            add_into(acc, key[:-1] + (k,), c * d)
    return Element(sp, acc)


def _ops_equal(rec, lhs: Op, rhs: Op, probes, **inputs):
    for x in probes:
        rec.equal(lhs(x), rhs(x), x=x, **inputs)


def check_rtensor(frame: StarStructure, pairs, degree: int, hprobes,
                  report: CheckReport | None = None, prefix: str = "rtensor") -> CheckReport:
    """Properties of ``(x)_R`` on a list of operator pairs ``(P, Q, Q_right_linear, Q_equivariant)``."""
    report = report if report is not None else CheckReport()
    with report.check(f"{prefix}.braided_form") as c:
        for P, Q, _, _ in pairs:
            _ops_equal(c, RTensor(frame, P, Q), rtensor_via_braiding(frame, P, Q),
                       probe_elements(frame.tensor_space([P.dom, Q.dom]), degree),
                       P=P.name, Q=Q.name)
    with report.check(f"{prefix}.identity") as c:
        seen = set()
        for P, Q, _, _ in pairs:
            if (id(P.dom), id(Q.dom)) in seen:
                continue
            seen.add((id(P.dom), id(Q.dom)))
            from .homdef import Identity
            I = RTensor(frame, Identity(P.dom), Identity(Q.dom))
            for t in probe_elements(I.dom, degree):
                c.equal(I(t), t, t=t)
    with report.check(f"{prefix}.rightlinear") as c:
        for P, Q, lin, _ in pairs:
            if not lin:
                continue
            T = RTensor(frame, P, Q)
            A = Q.dom.A
            for t in probe_elements(T.dom, degree):
                for a in probe_elements(A, 1):
                    c.equal(T(right_on_last(frame, t, a)), right_on_last(frame, T(t), a),
                            P=P.name, Q=Q.name, t=t, a=a)
    with report.check(f"{prefix}.equivariant") as c:
        for P, Q, _, eq in pairs:
            if not eq:
                continue
            _ops_equal(c, RTensor(frame, P, Q), TensorOp(frame, P, Q),
                       probe_elements(frame.tensor_space([P.dom, Q.dom]), degree),
                       P=P.name, Q=Q.name)
    with report.check(f"{prefix}.covariance") as c:
        st = frame.structure
        for P, Q, _, _ in pairs:
            T = RTensor(frame, P, Q)
            for xi in hprobes:
                rhs = LinComb([(k, RTensor(frame, Adjoint(st.base.basis(h1), P, st),
                                           Adjoint(st.base.basis(h2), Q, st)))
                               for (h1, h2), k in st.coproduct(xi).terms.items()])
                _ops_equal(c, Adjoint(xi, T, st), rhs, probe_elements(T.dom, degree),
                           P=P.name, Q=Q.name, xi=xi)
    return report


def check_composition_law(frame: StarStructure, P: Op, Q: Op, Pt: Op, Qt: Op, T: Op,
                          degree: int, report: CheckReport | None = None,
                          prefix: str = "rtensor.composition") -> CheckReport:
    """``(Pt (x)_R Qt) o (P (x)_R Q) = (Pt o (Rbar^a |> P)) (x)_R ((Rbar_a |> Qt) o Q)`` and associativity."""
    report = report if report is not None else CheckReport()
    st = frame.structure
    H = frame.H
    with report.check(prefix) as c:
        lhs = Compose(RTensor(frame, Pt, Qt), RTensor(frame, P, Q))
        rhs = LinComb([(k, RTensor(frame, Compose(Pt, Adjoint(H.basis(r1), P, st)),
                                   Compose(Adjoint(H.basis(r2), Qt, st), Q)))
                       for (r1, r2), k in frame.R.R_inv.terms.items()])
        _ops_equal(c, lhs, rhs, probe_elements(lhs.dom, degree),
                   P=P.name, Q=Q.name, Pt=Pt.name, Qt=Qt.name)
    with report.check(f"{prefix}.assoc") as c:
        left = RTensor(frame, RTensor(frame, P, Q), T)
        right = RTensor(frame, P, RTensor(frame, Q, T))
        _ops_equal(c, left, right, probe_elements(left.dom, degree),
                   P=P.name, Q=Q.name, T=T.name)
    return report


def require_quasi_commutative(frame: StarStructure, modules, degree: int) -> None:
    A = modules[0].A
    rep = quasi_commutative_algebra(frame, A, degree)
    for M in modules:
        quasi_commutative_bimodule(frame, M, degree, report=rep)
    if not rep.passed:
        bad = rep.failures[0]
        raise PreconditionFailed(f"{bad.name} fails at {bad.witness['inputs']}")


def check_rtensor_over_A(frame: StarStructure, pairs, degree: int,
                         report: CheckReport | None = None, prefix: str = "rtensor.overA") -> CheckReport:
    """Well-definedness on relation probes, right-A-linearity and the composition law over A.

    ``pairs`` holds ``(P, Q)`` of right-A-linear maps; composable consecutive
    pairs are also used for the composition law.
    """
    report = report if report is not None else CheckReport()
    with report.check(f"{prefix}.welldefined") as c:
        for P, Q in pairs:
            require_quasi_commutative(frame, [Q.dom, Q.cod], degree)
            T = RTensor(frame, P, Q)
            A = P.dom.A
            for v, a, w in probe_tuples([P.dom, A, Q.dom], degree):
                rel = frame.otimes(frame.right(v, a), w) - frame.otimes(v, frame.left(a, w))
                c.equal(frame.project(T(rel)), frame.quotient([P.cod, Q.cod]).zero(),
                        P=P.name, Q=Q.name, v=v, a=a, w=w)
    with report.check(f"{prefix}.rightlinear") as c:
        for P, Q in pairs:
            T = rtensor_over_A(frame, P, Q)
            for x, a in probe_tuples([T.dom, T.dom.A], degree):
                c.equal(T(frame.right(x, a)), frame.right(T(x), a), P=P.name, Q=Q.name, x=x, a=a)
    with report.check(f"{prefix}.composition") as c:
        st = frame.structure
        H = frame.H
        for (P, Q), (Pt, Qt) in itertools.product(pairs, repeat=2):
            if Pt.dom is not P.cod or Qt.dom is not Q.cod:
                continue
            lhs = Compose(rtensor_over_A(frame, Pt, Qt), rtensor_over_A(frame, P, Q))
            rhs = LinComb([(k, rtensor_over_A(frame, Compose(Pt, Adjoint(H.basis(r1), P, st)),
                                              Compose(Adjoint(H.basis(r2), Qt, st), Q)))
                           for (r1, r2), k in frame.R.R_inv.terms.items()])
            _ops_equal(c, lhs, rhs, probe_elements(lhs.dom, degree), P=P.name, Q=Q.name)
    return report


def _dressed(s: StarStructure, cl: StarStructure, P: Op, Q: Op, dress: bool) -> Op:
    if not dress:
        return RTensor(cl, P, Q)
    st = cl.structure
    H = s.H
    return LinComb([(k, RTensor(cl, Adjoint(H.basis(f1), P, st), Adjoint(H.basis(f2), Q, st)))
                    for (f1, f2), k in s.twist.F_inv.terms.items()])


def check_rtensor_deformation_diagram(s: StarStructure, P: Op, Q: Op, degree: int,
                                      report: CheckReport | None = None, prefix: str = "rtensor.diagram",
                                      dress: bool = True, over_A: bool = True) -> CheckReport:
    """Both commuting squares relating ``(x)_(R^F)`` of ``D_F`` images to ``D_F`` of ``(x)_R``.

    Over K: ``phi o (D_F(P) (x)_RF D_F(Q)) = D_F((fbar^a |> P) (x)_R (fbar_a |> Q)) o phi``.
    Over A the same square with quotient maps.  ``dress=False`` drops the
    ``fbar`` dressing on the bottom edge (fault injection).
    """
    report = report if report is not None else CheckReport()
    cl = classical_frame(s)
    top = RTensor(s, D_F(s, P), D_F(s, Q))
    bottom = D_F(s, _dressed(s, cl, P, Q, dress))
    with report.check(f"{prefix}.K") as c:
        for t in probe_elements(top.dom, degree):
            c.equal(phi_K(s, top(t), cl), bottom(phi_K(s, t, cl)), t=t, P=P.name, Q=Q.name)
    if over_A:
        with report.check(f"{prefix}.A") as c:
            top_A = OverA(s, top)
            bottom_A = D_F(s, OverA(cl, _dressed(s, cl, P, Q, dress)))
            for x in probe_elements(top_A.dom, degree):
                # quotient elements are stored through phi, so phi is the identity here
                c.equal(top_A(x), bottom_A(x), x=x, P=P.name, Q=Q.name)
    return report
