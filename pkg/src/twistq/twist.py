"""Twists, the twisted Hopf structure, and R-matrices."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from math import factorial

from .checks import CheckReport
from .hopf import (FiniteDimHopf, HopfStructure, embed, flip, leg_map,
                   multiply_legs, on_leg, tensor)
from .linear import Element, rational_inverse


class InvalidTwist(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class Twist:
    """``F = f^a (x) f_a`` together with ``F^-1 = fbar^a (x) fbar_a``."""

    F: Element
    F_inv: Element

    @property
    def base(self):
        return self.F.space.base

    def inverse_twist(self) -> "Twist":
        return Twist(self.F_inv, self.F)


def unit_tensor(H, rank: int = 2) -> Element:
    return tensor(*([H.one()] * rank))


def exp_tensor(T: Element) -> Element:
    """``sum_k T^k / k!``; ``T`` must vanish mod h so the series truncates."""
    ring = T.ring
    if any(c.coeffs[0] for c in T.terms.values()):
        raise InvalidTwist("exponent must be divisible by h")
    out = T.space.one()
    power = T.space.one()
    for k in range(1, ring.order + 1):
        power = power * T
        if power.is_zero():
            break
        out = out + power.scale(Fraction(1, factorial(k)))
    return out


def tensor_inverse(T: Element) -> Element:
    """Inverse in ``H (x) H`` (Neumann series in h around an invertible h^0 part)."""
    sp = T.space
    one = sp.one()
    ring = T.ring
    const = sp.element({k: ring(c.coeffs[0]) for k, c in T.terms.items()})
    if const == one:
        c_inv = one
    else:
        c_inv = _invert_finite(const)
    # T = T0 (1 + E) with E divisible by h
    E = c_inv * T - one
    inv = one
    power = one
    for _ in range(ring.order):
        power = -(power * E)
        if power.is_zero():
            break
        inv = inv + power
    inv = inv * c_inv
    if inv * T != one or T * inv != one:
        raise InvalidTwist("tensor is not invertible")
    return inv


def _invert_finite(T: Element) -> Element:
    """Invert an h-free element of a finite-dimensional tensor power by Gauss-Jordan."""
    sp = T.space
    base = sp.base
    if not isinstance(base, FiniteDimHopf):
        raise InvalidTwist("h^0 part is not the unit and the algebra is infinite-dimensional")
    keys = list(itertools.product(base.labels, repeat=sp.rank))
    idx = {k: i for i, k in enumerate(keys)}
    n = len(keys)
    # column j = T * e_j (right multiplication by basis vectors)
    M = [[Fraction(0)] * n for _ in range(n)]
    for j, kj in enumerate(keys):
        col = T * sp.basis(kj)
        for k, c in col.terms.items():
            M[idx[k]][j] = c.coeffs[0]
    target = [Fraction(0)] * n
    for k, c in sp.one().terms.items():
        target[idx[k]] = c.coeffs[0]
    try:
        Minv = rational_inverse(M)
    except ValueError:
        raise InvalidTwist("singular h^0 part") from None
    sol = [sum((Minv[i][j] * target[j] for j in range(n)), Fraction(0)) for i in range(n)]
    ring = T.ring
    return sp.element({keys[i]: ring(sol[i]) for i in range(n)})


def make_twist(F: Element, F_inv: Element | None = None) -> Twist:
    return Twist(F, F_inv if F_inv is not None else tensor_inverse(F))


def trivial_twist(H) -> Twist:
    one = unit_tensor(H)
    return Twist(one, one)


def exponential_twist(H, i: int, j: int, theta=1) -> Twist:
    """``exp(h theta X_i (x) X_j)`` on an abelian PBW backend."""
    ring = H.ring
    T = tensor(H.gen(i), H.gen(j)).scale(ring.h * theta)
    return Twist(exp_tensor(T), exp_tensor(-T))


def group_characters(G: FiniteDimHopf) -> list[dict]:
    """All +-1 valued characters of a finite group (rational characters only)."""
    table = G.group["table"]
    labels = G.labels
    chars = []
    for values in itertools.product((1, -1), repeat=len(labels)):
        chi = dict(zip(labels, values))
        if all(chi[table[a][b]] == chi[a] * chi[b] for a in labels for b in labels):
            chars.append(chi)
    return chars


def character_idempotent(G: FiniteDimHopf, chi: dict) -> Element:
    n = len(G.labels)
    return G.element({g: G.ring(Fraction(chi[g], n)) for g in G.labels})


def bicharacter_twist(G: FiniteDimHopf, left: str, right: str) -> Twist:
    """``sum c(chi, psi) e_chi (x) e_psi`` with ``c = -1`` iff ``chi(left) = psi(right) = -1``.

    ``c`` is a bicharacter on the character group, hence a 2-cocycle, and
    ``c^2 = 1`` makes the twist its own inverse.
    """
    chars = group_characters(G)
    if len(chars) != len(G.labels):
        raise InvalidTwist("group characters are not all rational; need an elementary abelian 2-group")
    sp = G.tensor_space(2)
    F = sp.zero()
    for chi, psi in itertools.product(chars, repeat=2):
        c = -1 if (chi[left] == -1 and psi[right] == -1) else 1
        F = F + tensor(character_idempotent(G, chi), character_idempotent(G, psi)).scale(c)
    return Twist(F, F)


def twist_check(t: Twist, structure=None, report: CheckReport | None = None,
                prefix: str = "twist") -> CheckReport:
    """Invertibility, 2-cocycle and normalization, as exact tensor identities."""
    report = report if report is not None else CheckReport()
    structure = structure or t.base
    F, Fi = t.F, t.F_inv
    H = t.base
    one2 = unit_tensor(H)
    with report.check(f"{prefix}.invertible") as c:
        c.equal(F * Fi, one2, F=F, F_inv=Fi)
        c.equal(Fi * F, one2, F=F, F_inv=Fi)
    with report.check(f"{prefix}.cocycle") as c:
        lhs = embed(F, 3, (0, 1)) * leg_map(F, on_leg(structure, "coproduct", 0, 2))
        rhs = embed(F, 3, (1, 2)) * leg_map(F, on_leg(structure, "coproduct", 1, 2))
        c.equal(lhs, rhs, F=F)
    with report.check(f"{prefix}.normalization") as c:
        c.equal(leg_map(F, on_leg(structure, "counit", 0, 2)), H.one(), F=F)
        c.equal(leg_map(F, on_leg(structure, "counit", 1, 2)), H.one(), F=F)
    return report


class DeformedHopf(HopfStructure):
    """``(H, mu, F Delta F^-1, eps, chi S chi^-1)`` over a parent structure.

    The parent is usually a backend; a :class:`DeformedHopf` parent gives the
    twice-twisted structure used for dequantization.
    """

    def __init__(self, parent, twist: Twist):
        self.parent = parent
        self.twist = twist
        self.base = parent.base
        S = parent.antipode
        F, Fi = twist.F, twist.F_inv
        self.chi = multiply_legs(leg_map(F, on_leg(parent, "antipode", 1, 2)))
        self.chi_inv = multiply_legs(leg_map(Fi, on_leg(parent, "antipode", 0, 2)))
        self._S = S

    def counit(self, x):
        return self.parent.counit(x)

    def coproduct_key(self, k):
        x = self.base.basis(k)
        return (self.twist.F * self.parent.coproduct(x) * self.twist.F_inv).terms

    def antipode_key(self, k):
        x = self.base.basis(k)
        return (self.chi * self._S(x) * self.chi_inv).terms


def deform_hopf(t: Twist, structure=None) -> DeformedHopf:
    structure = structure or t.base
    rep = twist_check(t, structure)
    if not rep.passed:
        bad = rep.failures[0]
        raise InvalidTwist(f"{bad.name} fails: {bad.witness}")
    return DeformedHopf(structure, t)


def dequantize(d: DeformedHopf, probes, report: CheckReport | None = None,
               prefix: str = "dequantize") -> CheckReport:
    """Check that ``F^-1`` twists ``H^F`` back to the parent structure on probes."""
    report = report if report is not None else CheckReport()
    inv = d.twist.inverse_twist()
    twist_check(inv, d, report, prefix=f"{prefix}.inverse_twist")
    back = DeformedHopf(d, inv)
    parent = d.parent
    with report.check(f"{prefix}.coproduct") as c:
        for x in probes:
            c.equal(back.coproduct(x), parent.coproduct(x), xi=x)
    with report.check(f"{prefix}.antipode") as c:
        for x in probes:
            c.equal(back.antipode(x), parent.antipode(x), xi=x)
    with report.check(f"{prefix}.chi") as c:
        c.equal(d.chi * d.chi_inv, d.base.one(), chi=d.chi)
        c.equal(d.chi_inv * d.chi, d.base.one(), chi=d.chi)
    return report


@dataclass(eq=False)
class RMatrix:
    """Universal R-matrix ``R = R^a (x) R_a`` of a given Hopf structure."""

    R: Element
    R_inv: Element
    structure: object
    triangular: bool = field(init=False)

    def __post_init__(self):
        self.triangular = flip(self.R) == self.R_inv

    def swapped(self) -> "RMatrix":
        """``R_21`` in place of ``R`` (fault injection: braiding on the wrong legs)."""
        return RMatrix(flip(self.R), flip(self.R_inv), self.structure)


def trivial_rmatrix(structure) -> RMatrix:
    one = unit_tensor(structure.base)
    return RMatrix(one, one, structure)


def r_matrix_from_twist(t: Twist, base_R: RMatrix, deformed: DeformedHopf | None = None) -> RMatrix:
    """``R^F = F_21 R F^-1`` with inverse ``F R^-1 F_21^-1``."""
    deformed = deformed or DeformedHopf(base_R.structure, t)
    R = flip(t.F) * base_R.R * t.F_inv
    R_inv = t.F * base_R.R_inv * flip(t.F_inv)
    one = unit_tensor(t.base)
    if R * R_inv != one:
        raise ValueError("R-matrix from twist is not invertible")
    return RMatrix(R, R_inv, deformed)


def rmatrix_check(rm: RMatrix, probes, report: CheckReport | None = None,
                  prefix: str = "rmatrix", expect_triangular: bool | None = None) -> CheckReport:
    """Quasi-cocommutativity, quasitriangularity, standard properties and Yang-Baxter."""
    report = report if report is not None else CheckReport()
    st = rm.structure
    R, Ri = rm.R, rm.R_inv
    H = st.base
    one2 = unit_tensor(H)
    with report.check(f"{prefix}.invertible") as c:
        c.equal(R * Ri, one2, R=R)
        c.equal(Ri * R, one2, R=R)
    with report.check(f"{prefix}.quasi_cocommutative") as c:
        for x in probes:
            d = st.coproduct(x)
            c.equal(flip(d), R * d * Ri, xi=x)
    with report.check(f"{prefix}.quasitriangular") as c:
        c.equal(leg_map(R, on_leg(st, "coproduct", 0, 2)),
                embed(R, 3, (0, 2)) * embed(R, 3, (1, 2)), R=R, law="(D x id)R = R13 R23")
        c.equal(leg_map(R, on_leg(st, "coproduct", 1, 2)),
                embed(R, 3, (0, 2)) * embed(R, 3, (0, 1)), R=R, law="(id x D)R = R13 R12")
    with report.check(f"{prefix}.counit") as c:
        c.equal(leg_map(R, on_leg(st, "counit", 0, 2)), H.one(), R=R)
        c.equal(leg_map(R, on_leg(st, "counit", 1, 2)), H.one(), R=R)
    with report.check(f"{prefix}.antipode") as c:
        c.equal(leg_map(R, on_leg(st, "antipode", 0, 2)), Ri, R=R, law="(S x id)R = R^-1")
        c.equal(leg_map(Ri, on_leg(st, "antipode", 1, 2)), R, R=R, law="(id x S)R^-1 = R")
    with report.check(f"{prefix}.yang_baxter") as c:
        R12, R13, R23 = embed(R, 3, (0, 1)), embed(R, 3, (0, 2)), embed(R, 3, (1, 2))
        c.equal(R12 * R13 * R23, R23 * R13 * R12, R=R)
    if expect_triangular is not None:
        with report.check(f"{prefix}.triangular") as c:
            c.true(rm.triangular == expect_triangular, R=R,
                   expected=expect_triangular, found=rm.triangular)
    return report
