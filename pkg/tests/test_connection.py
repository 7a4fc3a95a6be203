import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from twistq.checks import CheckReport
from twistq.connection import (Connection, D_tilde, D_tilde_inverse, braided_left_leibniz_check,
                               check_connection_deformation_diagram, connection_check,
                               equivariant_reduction_check, leibniz_check, oplus,
                               oplus_associativity_check, oplus_check, random_connection,
                               trivial_connection)
from twistq.faults import trivial_braiding
from twistq.linear import SpaceMismatch
from twistq.modalg import FreeBimodule, StarStructure, probe_elements
from twistq.twist import trivial_twist

from conftest import moyal

M = moyal(2)


def test_d_on_functions(m2):
    R1 = m2.A.regular()
    nabla = trivial_connection(R1, m2.calc)
    expected = m2.cl.otimes_A(R1.vec("1"), m2.calc.form((0,), m2.x1.scale(2)))
    assert nabla(R1.vec("1", m2.x1 ** 2)) == expected


def test_basis_values(m2):
    C = m2.calc
    omega = {("e1", "e1"): C.form((0,), m2.x2), ("e2", "e1"): C.dx(1)}
    nabla = Connection(m2.V, C, omega)
    expected = m2.cl.otimes_A(m2.V.vec("e1"), omega[("e1", "e1")]) + m2.cl.otimes_A(m2.V.vec("e2"), C.dx(1))
    assert nabla(m2.V.vec("e1")) == expected


def test_rank_one_leibniz_expansion(m2):
    C = m2.calc
    V = FreeBimodule.trivial(m2.A, ["e1"])
    nabla = Connection(V, C, {("e1", "e1"): C.dx(1)})
    expected = m2.cl.otimes_A(V.vec("e1"), C.form((1,), m2.x1) + C.dx(0))
    assert nabla(V.vec("e1", m2.x1)) == expected


def test_coefficients_must_be_one_forms(m2):
    with pytest.raises(SpaceMismatch):
        Connection(m2.V, m2.calc, {("e1", "e1"): m2.calc.form((0, 1))})


def _leibniz(frame, nabla, degree=2):
    rec = CheckReport()
    with rec.check("leibniz") as c:
        leibniz_check(frame, nabla, M.calc, degree, c)
    return rec.passed


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 10_000), st.sampled_from(["V", "W", "Z"]))
def test_random_connections_satisfy_leibniz(seed, name):
    V = getattr(M, name)
    nabla = random_connection(V, M.calc, random.Random(seed))
    assert _leibniz(M.cl, nabla)
    assert _leibniz(M.s, D_tilde(M.s, nabla))


def test_dtilde_of_d_on_generators(m2):
    R1 = m2.A.regular()
    Dd = D_tilde(m2.s, trivial_connection(R1, m2.calc))
    for i, x in enumerate((m2.x1, m2.x2)):
        assert Dd(R1.vec("1", x)) == m2.s.otimes_A(R1.vec("1"), m2.calc.dx(i))


def test_dtilde_trivial_twist(m2):
    s = StarStructure.deformed(trivial_twist(m2.H))
    nabla = random_connection(m2.V, m2.calc, random.Random(1))
    assert all(D_tilde(s, nabla)(v) == nabla(v) for v in probe_elements(m2.V, 2))


def test_dtilde_with_invariant_basis(m2):
    C = m2.calc
    V = FreeBimodule.trivial(m2.A, ["e1"])
    # X1 annihilates x2 dx1 and d is equivariant, so every fbar^a |> nabla with a > 0 vanishes
    nabla = Connection(V, C, {("e1", "e1"): C.form((0,), m2.x2)})
    D = D_tilde(m2.s, nabla)
    assert all(D(v) == nabla(v) for v in probe_elements(V, 3))
    # with x1 dx1 the order-h term -h (X1 |> nabla)(X2 |> v) survives on e1 x2
    nabla = Connection(V, C, {("e1", "e1"): C.form((0,), m2.x1)})
    D = D_tilde(m2.s, nabla)
    v = V.vec("e1", m2.x2)
    assert D(v) == nabla(v) - m2.cl.otimes_A(V.vec("e1"), C.dx(0)).scale(m2.K.h)
    assert D_tilde_inverse(m2.s, D)(v) == nabla(v)


def test_connection_suite(m2):
    rng = random.Random(3)
    conns = [random_connection(V, m2.calc, rng) for V in (m2.V, m2.W)]
    forms = lambda V: {(V.labels[0], V.labels[-1]): m2.calc.form((1,), m2.x1)}
    rep = connection_check(m2.s, conns, m2.calc, 1, hom_forms=forms)
    assert rep.passed
    assert set(rep.names()) == {"conn.leibniz", "conn.dtilde.leibniz", "conn.dtilde.roundtrip", "conn.affine"}


def test_braided_left_leibniz_for_every_connection(m2):
    rng = random.Random(11)
    conns = [random_connection(V, m2.calc, rng) for V in (m2.V, m2.W, m2.V)]
    assert braided_left_leibniz_check(m2.cl, conns, m2.calc, 1).passed
    assert braided_left_leibniz_check(m2.s, [D_tilde(m2.s, nb) for nb in conns], m2.calc, 1).passed


def test_oplus_of_d_on_functions(m2):
    cl = m2.cl
    R1 = m2.A.regular()
    d = trivial_connection(R1, m2.calc)
    S = oplus(cl, d, d)
    one = R1.vec("1")
    for a in (m2.x1, m2.x1 * m2.x2 ** 2):
        x = cl.otimes_A(one, R1.vec("1", a))
        assert S(x) == cl.otimes_A(one, one, m2.calc.d(a))


def test_oplus_of_d_and_connection(m2):
    cl = m2.cl
    R1 = m2.A.regular()
    nW = random_connection(m2.W, m2.calc, random.Random(4))
    S = oplus(cl, trivial_connection(R1, m2.calc), nW)
    for w in probe_elements(m2.W, 1):
        assert S(cl.otimes_A(R1.vec("1"), w)) == cl.otimes_A(R1.vec("1"), nW(w))


def test_oplus_checks(m2):
    rng = random.Random(8)
    nV, nW, nZ = (random_connection(V, m2.calc, rng) for V in (m2.V, m2.W, m2.Z))
    assert oplus_check(m2.cl, nV, nW, m2.calc, 1).passed
    s = m2.s
    dV, dW, dZ = (D_tilde(s, nb) for nb in (nV, nW, nZ))
    assert oplus_check(s, dV, dW, m2.calc, 1).passed
    assert oplus_associativity_check(s, dV, dW, dZ, 1).passed


def test_tau_faults(m2):
    rng = random.Random(8)
    nV, nW, nZ = (D_tilde(m2.s, random_connection(V, m2.calc, rng)) for V in (m2.V, m2.W, m2.Z))
    assert not oplus_check(m2.s, nV, nW, m2.calc, 1, fault="swapped-legs").passed
    assert not oplus_associativity_check(m2.s, nV, nW, nZ, 1, fault="first-leg-only").passed


def test_equivariant_reduction(m2):
    nV = D_tilde(m2.s, random_connection(m2.V, m2.calc, random.Random(2)))
    dW = D_tilde(m2.s, trivial_connection(m2.W, m2.calc))
    assert equivariant_reduction_check(m2.s, nV, dW, 1, m2.H.probes(1)).passed


def test_equivariance_precondition(m2):
    nV = random_connection(m2.V, m2.calc, random.Random(2))
    nW = Connection(m2.W, m2.calc, {("f1", "f1"): m2.calc.form((0,), m2.x1)})
    rep = equivariant_reduction_check(m2.cl, nV, nW, 1, m2.H.probes(1))
    assert rep["conn.oplus.equivariant"].status == "skipped-precondition"


def test_connection_deformation_diagram(m2):
    rng = random.Random(5)
    nV, nW = random_connection(m2.V, m2.calc, rng), random_connection(m2.W, m2.calc, rng)
    assert check_connection_deformation_diagram(m2.s, nV, nW, 1).passed
    rep = check_connection_deformation_diagram(m2.s, nV, nW, 1, top_frame=trivial_braiding(m2.s))
    r = rep["conn.diagram"]
    assert r.status == "fail" and r.witness["h_order"] == 1
