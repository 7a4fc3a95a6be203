from hypothesis import given, settings
from hypothesis import strategies as st

from twistq.braid import (RTensor, TensorOp, braid_relations_check, check_composition_law,
                          check_rtensor, check_rtensor_deformation_diagram, check_rtensor_over_A,
                          rtensor_over_A, rtensor_via_braiding, tau, tau_inverse)
from twistq.faults import drop_h2
from twistq.homdef import BasisMatrix, D_F, Identity, LeftMul
from twistq.modalg import probe_elements

from conftest import moyal
from oracle import braided_swap, tensor_to_sympy, to_sympy

M = moyal(3)


def poly(max_deg=2):
    keys = [(i, j) for i in range(max_deg + 1) for j in range(max_deg + 1 - i)]
    return st.dictionaries(st.sampled_from(keys), st.integers(-3, 3), min_size=1, max_size=3).map(
        lambda d: M.A.element({k: M.K(c) for k, c in d.items() if c}))


def same(P, Q, degree=1):
    return all(P(v) == Q(v) for v in probe_elements(P.dom, degree))


def test_tau_on_generators(m3):
    s, K = m3.s, m3.K
    one = m3.A.one()
    expected = s.otimes(m3.x2, m3.x1) - s.otimes(one, one).scale(K.h)
    assert tau(s, s.otimes(m3.x1, m3.x2)) == expected


def test_trivial_braiding_is_the_flip(m2):
    v, w = m2.V.vec("e2", m2.x1), m2.W.vec("f1", m2.x2)
    assert tau(m2.cl, m2.cl.otimes(v, w)) == m2.cl.otimes(w, v)


@settings(max_examples=30, deadline=None)
@given(poly(), poly())
def test_tau_matches_closed_formula(a, b):
    s = M.s
    got = tensor_to_sympy(tau(s, s.otimes(a, b)))
    assert got == braided_swap(to_sympy(a), to_sympy(b), 3)
    assert tau_inverse(s, tau(s, s.otimes(a, b))) == s.otimes(a, b)


def test_braid_relations(m2):
    rep = braid_relations_check(m2.s, m2.V, m2.W, m2.Z, 1, m2.H.probes(1))
    assert rep.passed
    assert braid_relations_check(m2.cl, m2.V, m2.W, m2.Z, 1).passed


def test_dropping_h2_breaks_braid_relations(m2):
    bad = drop_h2(m2.s.R)
    # probes bound the total degree; the h^2 defect needs x1^2 (x) x2^2
    rep = braid_relations_check(m2.s, m2.A, m2.A, m2.A, 4, R=bad)
    assert not rep.passed
    assert rep["braid.inverse"].witness["h_order"] == 2


def test_rtensor_trivial_r_is_plain_tensor(m2):
    P, Q = LeftMul(m2.x1, m2.V, m2.cl), BasisMatrix(m2.W, m2.W, {("f1", "f2"): m2.x2})
    assert same(RTensor(m2.cl, P, Q), TensorOp(m2.cl, P, Q))


def test_rtensor_identity(m2):
    I = RTensor(m2.s, Identity(m2.V), Identity(m2.W))
    assert all(I(t) == t for t in probe_elements(I.dom, 1))


def test_rtensor_moyal_correction(m2):
    s = m2.s
    P, Q = LeftMul(m2.x1, m2.A, m2.cl), LeftMul(m2.x2, m2.A, m2.cl)
    T = RTensor(s, P, Q)
    assert same(T, rtensor_via_braiding(s, P, Q), 2)
    one = m2.A.one()
    assert T(s.otimes(one, one)) == s.otimes(m2.x1, m2.x2)
    # Rbar = exp(h (X1 (x) X2 - X2 (x) X1)); only X1 |> v (x) X2 |> x2 survives
    t = s.otimes(m2.x1, one)
    assert T(t) == s.otimes(m2.x1 ** 2, m2.x2) + s.otimes(m2.x1, one).scale(m2.K.h)
    assert T(t) != TensorOp(s, P, Q)(t)


def test_rtensor_checks(m2):
    s = m2.s
    P = D_F(s, LeftMul(m2.x1, m2.V, m2.cl))
    Q = D_F(s, BasisMatrix(m2.W, m2.W, {("f1", "f1"): m2.x1, ("f2", "f1"): m2.x2}))
    rep = check_rtensor(s, [(P, Q, True, False)], 1, m2.H.probes(1))
    assert rep.passed


def test_equivariant_rtensor_is_plain(m2):
    s = m2.s
    P = LeftMul(m2.x1, m2.V, m2.cl)
    Q = Identity(m2.W)
    assert same(RTensor(s, P, Q), TensorOp(s, P, Q))


def test_composition_law(m2):
    s = m2.s
    P = LeftMul(m2.x1, m2.A, m2.cl)
    Q = LeftMul(m2.x2, m2.A, m2.cl)
    assert check_composition_law(s, P, Q, Q, P, P, 1).passed


def test_rtensor_over_A(m2):
    s = m2.s
    P = D_F(s, BasisMatrix(m2.V, m2.V, {("e1", "e2"): m2.x2}))
    Q = D_F(s, LeftMul(m2.x1, m2.W, m2.cl))
    assert check_rtensor_over_A(s, [(P, Q)], 1).passed
    I = rtensor_over_A(s, Identity(m2.V), Identity(m2.W))
    assert all(I(x) == x for x in probe_elements(I.dom, 1))


def test_deformation_diagram(m2):
    P = LeftMul(m2.x1, m2.V, m2.cl)
    Q = BasisMatrix(m2.W, m2.W, {("f1", "f1"): m2.x1, ("f2", "f1"): m2.x2 ** 2})
    assert check_rtensor_deformation_diagram(m2.s, P, Q, 1).passed
    rep = check_rtensor_deformation_diagram(m2.s, P, Q, 1, dress=False)
    assert rep["rtensor.diagram.K"].status == "fail"
    assert rep["rtensor.diagram.K"].witness["h_order"] == 1
