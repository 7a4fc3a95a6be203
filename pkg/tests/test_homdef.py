import random

import pytest

from twistq.checks import CheckReport
from twistq.homdef import (Adjoint, BasisMatrix, D_F, D_F_inverse, HopfAct, Identity, LeftMul,
                           RightMul, adjoint, adjoint_check, check_DF_structure, classical_structure,
                           dual_module_check, phi, phi_check, phi_inverse, star_compose)
from twistq.linear import SpaceMismatch
from twistq.modalg import StarStructure, act, probe_elements
from twistq.twist import trivial_twist


def same(P, Q, degree=2):
    return all(P(v) == Q(v) for v in probe_elements(P.dom, degree))


def test_unit_adjoint_is_identity(m2):
    P = BasisMatrix(m2.V, m2.V, {("e1", "e1"): m2.x1, ("e2", "e1"): m2.x2 ** 2})
    assert same(adjoint(m2.H.one(), P, m2.H), P)


def test_adjoint_on_identity_is_counit(m2):
    I = Identity(m2.V)
    for xi in m2.H.probes(2):
        eps = m2.H.counit(xi)
        assert all(adjoint(xi, I, m2.H)(v) == v.scale(eps) for v in probe_elements(m2.V, 2))


def test_adjoint_on_left_multiplication(m2):
    a = m2.x1 ** 2 * m2.x2
    L = LeftMul(a, m2.A, m2.cl)
    for xi in m2.H.probes(2):
        assert same(adjoint(xi, L, m2.H), LeftMul(act(xi, a), m2.A, m2.cl), 3)


def test_star_compose_of_left_multiplications(m2):
    L1, L2 = LeftMul(m2.x1, m2.A, m2.cl), LeftMul(m2.x2, m2.A, m2.cl)
    assert same(star_compose(m2.s, L1, L2), LeftMul(m2.s.mul(m2.x1, m2.x2), m2.A, m2.cl), 3)


def test_star_compose_trivial_twist_and_identity(m2):
    s = StarStructure.deformed(trivial_twist(m2.H))
    P = LeftMul(m2.x1, m2.V, m2.cl)
    Q = BasisMatrix(m2.V, m2.V, {("e2", "e1"): m2.x2})
    assert same(star_compose(s, P, Q), P @ Q)
    assert same(star_compose(m2.s, Identity(m2.V), Q), Q)


def test_star_compose_domain_mismatch(m2):
    P = LeftMul(m2.x1, m2.V, m2.cl)
    Q = LeftMul(m2.x1, m2.W, m2.cl)
    with pytest.raises(SpaceMismatch):
        star_compose(m2.s, P, Q)(m2.W.vec("f1"))


def test_D_F_of_left_multiplication_is_star_left_multiplication(m3):
    for a in (m3.x1, m3.x2, m3.x1 * m3.x2):
        for M in (m3.A, m3.V, m3.W):
            assert same(D_F(m3.s, LeftMul(a, M, m3.cl)), LeftMul(a, M, m3.s))


def test_D_F_trivial_cases(m2):
    P = BasisMatrix(m2.W, m2.W, {("f1", "f2"): m2.x1})
    assert same(D_F(StarStructure.deformed(trivial_twist(m2.H)), P), P)
    assert same(D_F(m2.s, Identity(m2.V)), Identity(m2.V))


def test_moyal_round_trip(m3):
    L = LeftMul(m3.x1, m3.V, m3.cl)
    assert same(D_F_inverse(m3.s, D_F(m3.s, L)), L)
    assert same(D_F(m3.s, D_F_inverse(m3.s, L)), L)


def test_klein_round_trip_on_random_matrix(klein):
    rng = random.Random(5)
    A, V = klein.A, klein.V
    fns = [A.delta(g) for g in "eabc"] + [A.one()]
    P = BasisMatrix(V, V, {(j, i): rng.choice(fns).scale(rng.choice([-1, 1, 2]))
                           for i in V.labels for j in V.labels})
    # exhaustive: the probe set at degree 0 is the full K-basis of V
    assert same(D_F_inverse(klein.s, D_F(klein.s, P)), P, 0)
    assert same(D_F(klein.s, D_F_inverse(klein.s, P)), P, 0)


def test_D_F_structure_on_mixed_operators(m2):
    cl = m2.cl
    P = BasisMatrix(m2.V, m2.V, {("e1", "e1"): m2.x1, ("e2", "e1"): m2.A.one(), ("e2", "e2"): m2.x2 ** 2})
    ops = [(P, True), (LeftMul(m2.x2, m2.V, cl), True), (RightMul(m2.x1, m2.V, cl), True),
           (LeftMul(m2.x1, m2.V, cl) @ P - P.scale(2), True),
           (HopfAct(m2.X1, m2.V) @ P, False)]
    rep = check_DF_structure(m2.s, ops, 1, m2.H.probes(1))
    assert rep.passed, rep.failures
    assert {r.name for r in rep.results} == {
        "homdef.composition", "homdef.bimodule", "homdef.equivariance",
        "homdef.rightlinear", "homdef.roundtrip"}


def test_wrong_antipode_detected(m2):
    from twistq.faults import corrupt_antipode
    ops = [(LeftMul(m2.x1, m2.V, m2.cl), True)]
    rep = check_DF_structure(m2.s, ops, 1, m2.H.probes(1), deformed_structure=corrupt_antipode(m2.s.structure))
    assert rep["homdef.equivariance"].status == "fail"


def test_adjoint_laws(m2):
    ops = [(LeftMul(m2.x1, m2.V, m2.cl), True), (BasisMatrix(m2.V, m2.V, {("e1", "e2"): m2.x2}), True)]
    assert adjoint_check(m2.s, ops, 1, m2.H.probes(1)).passed


def test_phi_formula(m3):
    s, cl, K = m3.s, m3.cl, m3.K
    v, w = m3.V.vec("e1", m3.x1), m3.W.vec("f1", m3.x2)
    # fbar = exp(-h X1 (x) X2): X1 |> (e1 x1) = e1, X2 |> (f1 x2) = f1 x2 + f1, higher terms vanish
    expected = cl.otimes_A(m3.V.vec("e1"), m3.W.vec("f1", m3.x1 * m3.x2 - (m3.x2 + m3.A.one()).scale(K.h)))
    assert phi(s, m3.V, m3.W)(s.otimes(v, w)) == expected


def test_phi_trivial_twist_is_projection(m2):
    s = StarStructure.deformed(trivial_twist(m2.H))
    v, w = m2.V.vec("e2", m2.x1), m2.W.vec("f2", m2.x2)
    assert phi(s, m2.V, m2.W)(s.otimes(v, w)) == m2.cl.otimes_A(v, w)


def test_phi_round_trip_and_checks(m2):
    f, fi = phi(m2.s, m2.V, m2.W), phi_inverse(m2.s, m2.V, m2.W)
    for y in probe_elements(f.cod, 2):
        assert f(fi(y)) == y
    rep = phi_check(m2.s, m2.V, m2.W, 2, m2.H.probes(1))
    assert rep.passed
    assert rep["phi.welldefined"].probes >= 50


def test_dual_basis(m2, klein):
    assert dual_module_check(m2.s, m2.V, 2).passed
    assert dual_module_check(klein.s, klein.V, 1).passed


def test_classical_structure_of_star_frame(m2):
    assert classical_structure(m2.s) is m2.H
