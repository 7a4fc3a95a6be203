from fractions import Fraction

from twistq.hopf import AbelianPBW, coproduct, hopf_check, tensor
from twistq.scalars import ScalarRing
from twistq.twist import (Twist, deform_hopf, dequantize, exponential_twist, make_twist,
                          r_matrix_from_twist, rmatrix_check, tensor_inverse, trivial_rmatrix,
                          trivial_twist, twist_check)

from oracle import Xs, Ys, exp_series, h, hopf2_to_sympy, hopf_to_sympy

X1, X2 = Xs
Y1, Y2 = Ys


def test_exponential_twist_expansion(m3):
    assert hopf2_to_sympy(m3.t.F) == exp_series(h * X1 * Y2, 3)
    assert hopf2_to_sympy(m3.t.F_inv) == exp_series(-h * X1 * Y2, 3)


def test_trivial_twist_passes_and_changes_nothing(m3):
    t = trivial_twist(m3.H)
    assert twist_check(t).passed
    d = deform_hopf(t)
    for x in m3.H.probes(2):
        assert d.coproduct(x) == coproduct(x)
        assert d.antipode(x) == m3.H.antipode(x)
    assert d.chi == m3.H.one()


def test_moyal_twist_valid(m3):
    rep = twist_check(m3.t)
    assert rep.passed
    assert [r.name for r in rep.results] == ["twist.invertible", "twist.cocycle", "twist.normalization"]


def test_truncated_twist_fails_cocycle_at_order_two():
    K = ScalarRing(3)
    H = AbelianPBW(K, ["X1", "X2"])
    one = H.one()
    F = tensor(one, one) + tensor(H.gen(0), H.gen(0)).scale(K.h)
    rep = twist_check(Twist(F, tensor_inverse(F)))
    cocycle = rep["twist.cocycle"]
    assert cocycle.status == "fail"
    assert cocycle.witness["h_order"] == 2


def test_deformed_coproduct_of_generator(m3):
    one = m3.H.one()
    for X in (m3.X1, m3.X2):
        assert m3.hopf.coproduct(X) == tensor(X, one) + tensor(one, X)


def test_moyal_chi(m3):
    # chi = f^a S(f_a): S flips the sign of each X2, legs multiply
    expected = exp_series(-h * X1 * X2, 3)
    assert hopf_to_sympy(m3.hopf.chi) == expected
    assert hopf_to_sympy(m3.hopf.chi_inv) == exp_series(h * X1 * X2, 3)


def test_moyal_deformed_hopf_axioms(m3):
    assert hopf_check(m3.hopf, m3.H.probes(3)).passed


def test_dequantize(m3):
    assert dequantize(m3.hopf, m3.H.probes(4)).passed


def test_corrupted_inverse_fails_dequantize(m3):
    bad = Twist(m3.t.F, m3.t.F_inv + tensor(m3.H.one(), m3.H.one()).scale(m3.K.h))
    rep = twist_check(bad)
    assert rep["twist.invertible"].status == "fail"


def test_moyal_rmatrix(m3):
    R = r_matrix_from_twist(m3.t, trivial_rmatrix(m3.H))
    # F_21 F^-1 = exp(h X2 (x) X1) exp(-h X1 (x) X2)
    assert hopf2_to_sympy(R.R) == exp_series(h * (X2 * Y1 - X1 * Y2), 3)
    assert R.triangular
    assert rmatrix_check(R, m3.H.probes(3), expect_triangular=True).passed


def test_trivial_rmatrix_from_trivial_twist(m3):
    R = r_matrix_from_twist(trivial_twist(m3.H), trivial_rmatrix(m3.H))
    assert R.R == tensor(m3.H.one(), m3.H.one())


def test_klein_twist(klein):
    G = klein.G
    assert twist_check(klein.t).passed
    assert hopf_check(klein.hopf, G.probes()).passed
    assert dequantize(klein.hopf, G.probes()).passed


def test_klein_chi(klein):
    # F = sum c(x, y) e_x (x) e_y over character idempotents, S(e_y) = e_y and
    # e_x e_y = delta e_x, so chi = sum_x c(x, x) e_x = 1 - 2 e_x0 where x0(a) = x0(b) = -1
    G = klein.G
    e, a, b, c = (G.basis(g) for g in "eabc")
    expected = (e + a + b - c).scale(Fraction(1, 2))
    assert klein.hopf.chi == expected
    assert klein.hopf.chi * klein.hopf.chi == e


def test_klein_rmatrix_triangular(klein):
    R = r_matrix_from_twist(klein.t, trivial_rmatrix(klein.G))
    assert R.triangular
    assert rmatrix_check(R, klein.G.probes(), expect_triangular=True).passed


def test_make_twist_computes_inverse(m3):
    t = make_twist(m3.t.F)
    assert t.F_inv == m3.t.F_inv
