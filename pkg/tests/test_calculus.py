import pytest

from twistq.calculus import DiffCalculus, calculus_check, deform_calculus, graded_quasi_commutative
from twistq.linear import SpaceMismatch
from twistq.modalg import FinFunAlgebra, StarStructure
from twistq.twist import trivial_rmatrix, trivial_twist


def test_d_of_product(m2):
    C = m2.calc
    f = C.function
    assert C.d(f(m2.x1 * m2.x2)) == C.form((0,), m2.x2) + C.form((1,), m2.x1)


def test_wedge_antisymmetry(m2):
    C = m2.calc
    assert C.wedge(C.dx(0), C.dx(0)) == C.omega.zero()
    assert C.wedge(C.dx(1), C.dx(0)) == C.form((0, 1)).scale(-1)


def test_d_squared_vanishes(m2):
    C = m2.calc
    assert C.d(C.d(C.function(m2.x1 ** 2))) == C.omega.zero()


def test_degree_overflow_is_zero(m2):
    C = m2.calc
    top = C.form((0, 1), m2.x1)
    assert C.wedge(C.dx(0), top) == C.omega.zero()


def test_star_wedge_on_constant_forms(m3):
    S = m3.star_calc
    assert S.wedge(m3.calc.dx(0), m3.calc.dx(1)) == m3.calc.form((0, 1))


def test_star_wedge_with_coefficients(m3):
    # fbar = exp(-h X1 (x) X2) acts on coefficients only; X1 |> x2 = 0 kills every correction here
    C, S, K = m3.calc, m3.star_calc, m3.K
    a = C.form((0,), m3.x2)
    b = C.form((1,), m3.x1)
    assert S.wedge(a, b) == C.form((0, 1), m3.x1 * m3.x2)
    # reversed order: (X1 |> x1)(X2 |> x2) = 1 gives the order-h term
    c, e = C.form((1,), m3.x1), C.form((0,), m3.x2)
    assert S.wedge(c, e) == C.form((0, 1), m3.A.one().scale(K.h) - m3.x1 * m3.x2)


def test_trivial_twist_calculus_is_classical(m2):
    S = deform_calculus(m2.calc, StarStructure.deformed(trivial_twist(m2.H)))
    x = m2.calc.form((0,), m2.x1 * m2.x2)
    y = m2.calc.form((1,), m2.x1)
    assert S.wedge(x, y) == m2.calc.wedge(x, y)


def test_calculus_axioms(m2):
    hp = m2.H.probes(1)
    assert calculus_check(deform_calculus(m2.calc, m2.cl), hp, 2).passed
    assert calculus_check(m2.star_calc, hp, 2).passed


def test_graded_quasi_commutativity(m2):
    classical = deform_calculus(m2.calc, m2.cl)
    assert graded_quasi_commutative(classical, 2).passed
    assert graded_quasi_commutative(m2.star_calc, 2).passed
    rep = graded_quasi_commutative(m2.star_calc, 2, R=trivial_rmatrix(m2.s.structure))
    r = rep["calculus.quasicomm"]
    assert r.status == "fail" and r.witness["h_order"] == 1


def test_calculus_needs_polynomials(klein):
    with pytest.raises(SpaceMismatch):
        DiffCalculus(klein.A)
    assert isinstance(klein.A, FinFunAlgebra)
