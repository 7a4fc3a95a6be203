"""Independent reference computations in sympy.

Polynomials in x1, x2 with X_i acting as d/dx_i; the twist exp(h X1 (x) X2)
gives closed formulas for every deformed product that are evaluated here
without touching the library's twist machinery.
"""

import sympy as sp

h, x1, x2 = sp.symbols("h x1 x2")
X = (x1, x2)


def truncate(expr, order):
    expr = sp.expand(expr)
    return sp.expand(sum(expr.coeff(h, k) * h**k for k in range(order + 1)))


def to_sympy(el):
    """Polynomial algebra element -> sympy expression in h, x1, x2."""
    out = 0
    for key, c in el.terms.items():
        coeff = sum(sp.Rational(q.numerator, q.denominator) * h**k for k, q in enumerate(c.coeffs))
        out += coeff * x1**key[0] * x2**key[1]
    return sp.expand(out)


def tensor_to_sympy(el, rename=("y1", "y2")):
    """A (x) A element -> expression with the second leg in fresh variables."""
    y1, y2 = sp.symbols(rename)
    out = 0
    for (k1, k2), c in el.terms.items():
        coeff = sum(sp.Rational(q.numerator, q.denominator) * h**k for k, q in enumerate(c.coeffs))
        out += coeff * x1**k1[0] * x2**k1[1] * y1**k2[0] * y2**k2[1]
    return sp.expand(out)


def bidiff(f, g, i, j, k):
    """(d_i^k f)(d_j^k g)."""
    return sp.diff(f, X[i], k) * sp.diff(g, X[j], k)


def moyal_star(f, g, order, theta=1):
    """f * g for fbar = exp(-h theta X1 (x) X2)."""
    out = sum((-h * theta) ** k / sp.factorial(k) * bidiff(f, g, 0, 1, k) for k in range(order + 1))
    return truncate(out, order)


def braided_swap(f, g, order, theta=1):
    """tau(f (x) g) = Rbar^a |> g (x) Rbar_a |> f with Rbar = exp(h theta (X1 (x) X2 - X2 (x) X1)).

    Returned as an expression with the second leg in y1, y2.
    """
    y1, y2 = sp.symbols("y1 y2")
    gx = g
    fy = f.subs({x1: y1, x2: y2}, simultaneous=True)
    out = 0
    for a in range(order + 1):
        for b in range(order + 1 - a):
            # (X1 (x) X2)^a (-X2 (x) X1)^b / a! b!
            term = sp.diff(gx, x1, a, x2, b) * sp.diff(fy, y2, a, y1, b)
            out += (h * theta) ** (a + b) * (-1) ** b / (sp.factorial(a) * sp.factorial(b)) * term
    return truncate(out, order)


Xs = sp.symbols("X1 X2")
Ys = sp.symbols("Y1 Y2")


def _coeff(c):
    return sum(sp.Rational(q.numerator, q.denominator) * h**k for k, q in enumerate(c.coeffs))


def hopf_to_sympy(el):
    """Abelian PBW element -> polynomial in X1, X2."""
    return sp.expand(sum(_coeff(c) * Xs[0]**k[0] * Xs[1]**k[1] for k, c in el.terms.items()))


def hopf2_to_sympy(el):
    """H (x) H element -> polynomial with the second leg in Y1, Y2."""
    return sp.expand(sum(_coeff(c) * Xs[0]**a[0] * Xs[1]**a[1] * Ys[0]**b[0] * Ys[1]**b[1]
                         for (a, b), c in el.terms.items()))


def exp_series(z, order):
    return truncate(sum(z**k / sp.factorial(k) for k in range(order + 1)), order)
