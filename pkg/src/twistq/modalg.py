"""Module algebras and free bimodules with their star deformations.

A *frame* (:class:`StarStructure`) bundles the data that the constructions
are written against: a Hopf structure (classical or twisted), an R-matrix and
the products.  The classical frame uses ``(H, R, .)``; the star frame uses
``(H^F, R^F, *)`` on the same underlying elements.  Every check in the
package is written once and run in either frame.
"""

from __future__ import annotations

import itertools
from fractions import Fraction
from math import factorial

from .checks import CheckReport
from .hopf import AbelianPBW, FiniteDimHopf, HopfStructure, flip
from .linear import Element, Space, SpaceMismatch, add_into, add_scaled
from .twist import (DeformedHopf, RMatrix, Twist, r_matrix_from_twist,
                    trivial_rmatrix)


class IncompatibleAction(TypeError):
    pass


def act(xi: Element, x: Element) -> Element:
    """Left Hopf action ``xi |> x`` on any module space."""
    sp = x.space
    hop = getattr(sp, "hopf", None)
    if hop is None or xi.space is not hop:
        raise IncompatibleAction(f"{xi.space!r} does not act on {sp!r}")
    acc: dict = {}
    for hk, c in xi.terms.items():
        for k, d in x.terms.items():
            add_scaled(acc, sp.act_cached(hk, k), c * d)
    return Element(sp, acc)


def act_key(hkey, x: Element) -> Element:
    """Action of a single Hopf basis key."""
    sp = x.space
    acc: dict = {}
    for k, d in x.terms.items():
        add_scaled(acc, sp.act_cached(hkey, k), d)
    return Element(sp, acc)


class ModuleSpace(Space):
    """A space with a left action of ``hopf``; subclasses define ``act_key``."""

    hopf: object

    def act_cached(self, hkey, key) -> dict:
        memo = self.__dict__.setdefault("_act_memo", {})
        out = memo.get((hkey, key))
        if out is None:
            out = memo[(hkey, key)] = self.act_key(hkey, key)
        return out

    def degree(self, key) -> int:
        return 0

    def probe_keys(self, degree: int) -> list:
        raise NotImplementedError


# ---------------------------------------------------------------------------
# Module algebras


class ModuleAlgebra(ModuleSpace):
    """Commutative H-module algebra with a keyed basis."""

    def one(self) -> Element:
        return self.basis(self.unit_key)

    def regular(self) -> "FreeBimodule":
        """``A`` as a free bimodule of rank one on the label ``1``."""
        reg = self.__dict__.get("_regular")
        if reg is None:
            reg = self._regular = FreeBimodule.trivial(self, ["1"], name=self.name)
        return reg


class PolyAlgebra(ModuleAlgebra):
    """``K[x1..xn]``; generator ``i`` of an abelian PBW backend acts as ``d/dx_i``."""

    def __init__(self, hopf: AbelianPBW, variables):
        variables = tuple(variables)
        super().__init__(hopf.ring, "K[" + ",".join(variables) + "]")
        if not isinstance(hopf, AbelianPBW):
            raise IncompatibleAction("polynomial algebras need an abelian PBW backend")
        if hopf.m > len(variables):
            raise IncompatibleAction("more generators than variables")
        self.hopf = hopf
        self.variables = variables
        self.n = len(variables)
        self.unit_key = (0,) * self.n

    def var(self, i: int) -> Element:
        return self.basis(tuple(1 if j == i else 0 for j in range(self.n)))

    def named(self, name: str) -> Element:
        return self.var(self.variables.index(name))

    def mul_keys(self, a, b):
        return {tuple(x + y for x, y in zip(a, b)): self.ring.one}

    def act_key(self, hkey, key):
        c = 1
        out = list(key)
        for i, e in enumerate(hkey):
            if e > out[i]:
                return {}
            c *= factorial(out[i]) // factorial(out[i] - e)
            out[i] -= e
        return {tuple(out): self.ring.one * c}

    def derivative(self, i: int, key) -> dict:
        e = key[i]
        if not e:
            return {}
        out = list(key)
        out[i] -= 1
        return {tuple(out): self.ring.one * e}

    def degree(self, key) -> int:
        return sum(key)

    def probe_keys(self, degree: int):
        keys = [k for k in itertools.product(range(degree + 1), repeat=self.n)
                if sum(k) <= degree]
        return sorted(keys, key=self.sort_key)

    def format_key(self, key):
        parts = []
        for name, e in zip(self.variables, key):
            if e == 1:
                parts.append(name)
            elif e > 1:
                parts.append(f"{name}^{e}")
        return "*".join(parts) if parts else "1"

    def sort_key(self, key):
        return (sum(key), tuple(-e for e in key))


class FinFunAlgebra(ModuleAlgebra):
    """Functions on a finite group, basis ``delta_g``; ``(g |> f)(x) = f(x g)``."""

    def __init__(self, hopf: FiniteDimHopf):
        if not isinstance(hopf, FiniteDimHopf) or hopf.group is None:
            raise IncompatibleAction("function algebras need a group algebra backend")
        super().__init__(hopf.ring, f"Fun({hopf.name})")
        self.hopf = hopf
        self.labels = hopf.labels
        self._table = hopf.group["table"]
        self._inverse = hopf.group["inverse"]
        self.unit_key = None

    def one(self) -> Element:
        return self.element({g: self.ring.one for g in self.labels})

    def delta(self, g) -> Element:
        return self.basis(g)

    def mul_keys(self, a, b):
        return {a: self.ring.one} if a == b else {}

    def act_key(self, hkey, key):
        return {self._table[key][self._inverse[hkey]]: self.ring.one}

    def probe_keys(self, degree: int = 0):
        return list(self.labels)

    def format_key(self, key):
        return f"d_{key}"

    def sort_key(self, key):
        return self.labels.index(key)


def algebra_units(A: ModuleAlgebra) -> dict:
    """Terms of the unit element."""
    return A.one().terms


# ---------------------------------------------------------------------------
# Free bimodules


class FreeBimodule(ModuleSpace):
    """Free module ``sum e_l . A`` with ``a . e_l = e_l . a``.

    Keys are ``(label, akey)``.  ``basis_action(hkey, label)`` returns
    ``xi |> e_label`` as ``{(label', akey): coeff}``; the action on a general
    key follows the compatibility law with the coproduct of the backend.
    """

    def __init__(self, A: ModuleAlgebra, labels, basis_action, name: str = "V"):
        super().__init__(A.ring, name)
        self.A = A
        self.hopf = A.hopf
        self.labels = tuple(labels)
        self._index = {l: i for i, l in enumerate(self.labels)}
        self._basis_action = basis_action

    @classmethod
    def trivial(cls, A, labels, name="V"):
        H = A.hopf
        one_keys = algebra_units(A)

        def basis_action(hkey, label):
            e = H.counit_key(hkey)
            return {(label, k): e * c for k, c in one_keys.items()} if e else {}
        return cls(A, labels, basis_action, name)

    @classmethod
    def from_matrices(cls, A: ModuleAlgebra, labels, matrices: dict, name="V"):
        """Generator ``k`` acts by ``e_i -> sum_j e_j M_k[j][i]``; the matrices must commute."""
        H = A.hopf
        labels = tuple(labels)
        n = len(labels)
        mats = [_matrix(matrices.get(i, None), n) for i in range(H.m)]
        for P, Q in itertools.combinations(mats, 2):
            if _matmul(P, Q) != _matmul(Q, P):
                raise IncompatibleAction("generator matrices do not commute")
        one_keys = algebra_units(A)
        cache = {}

        def power(hkey):
            M = cache.get(hkey)
            if M is None:
                M = _identity(n)
                for i, e in enumerate(hkey):
                    for _ in range(e):
                        M = _matmul(M, mats[i])
                cache[hkey] = M
            return M

        def basis_action(hkey, label):
            M = power(hkey)
            i = labels.index(label)
            out = {}
            for j in range(n):
                if M[j][i]:
                    for k, c in one_keys.items():
                        out[(labels[j], k)] = c * M[j][i]
            return out
        mod = cls(A, labels, basis_action, name)
        mod.matrices = mats
        return mod

    @classmethod
    def from_representation(cls, A: ModuleAlgebra, labels, rep: dict, name="V"):
        """Group element ``g`` acts by ``e_i -> sum_j e_j rho(g)[j][i]``."""
        H = A.hopf
        labels = tuple(labels)
        n = len(labels)
        table = H.group["table"]
        mats = {g: _matrix(rep.get(g), n) if g != H.group["identity"] else _identity(n)
                for g in H.labels}
        for g, k in itertools.product(H.labels, repeat=2):
            if _matmul(mats[g], mats[k]) != mats[table[g][k]]:
                raise IncompatibleAction(f"not a representation at ({g}, {k})")
        one_keys = algebra_units(A)

        def basis_action(hkey, label):
            M = mats[hkey]
            i = labels.index(label)
            return {(labels[j], k): c * M[j][i]
                    for j in range(n) if M[j][i] for k, c in one_keys.items()}
        mod = cls(A, labels, basis_action, name)
        mod.matrices = mats
        return mod

    def vec(self, label, a: Element | None = None) -> Element:
        if a is None:
            a = self.A.one()
        if a.space is not self.A:
            raise SpaceMismatch("coefficient is not in the base algebra")
        return Element(self, {(label, k): c for k, c in a.terms.items()})

    def from_coefficients(self, coeffs: dict) -> Element:
        acc: dict = {}
        for label, a in coeffs.items():
            add_scaled(acc, self.vec(label, a).terms)
        return Element(self, acc)

    def coefficient_of(self, x: Element, label) -> Element:
        return Element(self.A, {k: c for (l, k), c in x.terms.items() if l == label})

    def right_keys(self, key, akey) -> dict:
        label, k = key
        return {(label, m): c for m, c in self.A.mul_keys(k, akey).items()}

    def act_key(self, hkey, key):
        label, k = key
        out: dict = {}
        H = self.hopf
        A = self.A
        for (h1, h2), c in H.coproduct_terms(hkey).items():
            moved = self._basis_action(h1, label)
            if not moved:
                continue
            acted = A.act_cached(h2, k)
            for (l2, k2), d in moved.items():
                for k3, e in acted.items():
                    for k4, f in A.mul_keys(k2, k3).items():
                        add_into(out, (l2, k4), c * d * e * f)
        return out

    def degree(self, key):
        return self.A.degree(key[1])

    def probe_keys(self, degree: int):
        return [(l, k) for l in self.labels for k in self.A.probe_keys(degree)]

    def format_label(self, label) -> str:
        return str(label)

    def format_key(self, key):
        label, k = key
        ls = self.format_label(label)
        ks = self.A.format_key(k)
        if ks == "1":
            return ls
        if ls == "1":
            return ks
        return f"{ls}*{ks}"

    def sort_key(self, key):
        return (self.A.sort_key(key[1]), self._index.get(key[0], 0))


def _matrix(rows, n):
    if rows is None:
        return [[Fraction(0)] * n for _ in range(n)]
    M = [[Fraction(v) for v in row] for row in rows]
    if len(M) != n or any(len(r) != n for r in M):
        raise ValueError(f"matrix must be {n}x{n}")
    return M


def _identity(n):
    return [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]


def _matmul(P, Q):
    n = len(P)
    return [[sum((P[i][k] * Q[k][j] for k in range(n)), Fraction(0)) for j in range(n)]
            for i in range(n)]


def right_mul(v: Element, a: Element) -> Element:
    """Classical ``v . a`` (equal to ``a . v``)."""
    M = v.space
    if a.space is not M.A:
        raise SpaceMismatch("coefficient is not in the base algebra")
    acc: dict = {}
    for k1, c1 in v.terms.items():
        for k2, c2 in a.terms.items():
            add_scaled(acc, M.right_keys(k1, k2), c1 * c2)
    return Element(M, acc)


# ---------------------------------------------------------------------------
# Frames


class StarStructure:
    """Products, Hopf structure and R-matrix used by every construction.

    ``twist=None`` gives the classical frame.  Otherwise products are
    deformed by ``F^-1`` and the Hopf structure and R-matrix are the twisted
    ones; elements are shared with the classical frame.
    """

    def __init__(self, H, structure, R: RMatrix, twist: Twist | None = None,
                 name: str = "classical"):
        self.H = H
        self.structure = structure
        self.R = R
        self.twist = twist
        self.name = name
        self._bil_memo: dict = {}
        self._tensors: dict = {}
        self._G: dict = {}

    @classmethod
    def classical(cls, H, R: RMatrix | None = None) -> "StarStructure":
        return cls(H, H, R or trivial_rmatrix(H), None, "classical")

    @classmethod
    def deformed(cls, twist: Twist, R: RMatrix | None = None,
                 structure=None) -> "StarStructure":
        H = twist.base
        base_R = R or trivial_rmatrix(H)
        st = structure or DeformedHopf(base_R.structure, twist)
        out = cls(H, st, r_matrix_from_twist(twist, base_R, st), twist, "star")
        out.base_R = base_R
        return out

    def with_rmatrix(self, R: RMatrix) -> "StarStructure":
        """Same products and structure, different braiding (used by fault injection)."""
        out = StarStructure(self.H, self.structure, R, self.twist, self.name)
        out.__dict__.update({k: v for k, v in self.__dict__.items()
                             if k in ("base_R", "_classical_frame")})
        out._bil_memo = self._bil_memo
        out._G = self._G
        return out

    @property
    def is_classical(self) -> bool:
        return self.twist is None

    # -- products ---------------------------------------------------------

    def bilinear(self, op, x: Element, y: Element, tag: str) -> Element:
        """``op`` deformed by the frame: ``op(fbar^a |> x, fbar_a |> y)``.

        ``op`` works on elements; results on basis pairs are memoised under
        ``tag``.
        """
        if self.twist is None:
            return op(x, y)
        memo = self._bil_memo
        acc: dict = {}
        target = None
        for kx, cx in x.terms.items():
            for ky, cy in y.terms.items():
                mk = (tag, id(x.space), id(y.space), kx, ky)
                hit = memo.get(mk)
                if hit is None:
                    bx, by = x.space.basis(kx), y.space.basis(ky)
                    res = None
                    for (f1, f2), c in self.twist.F_inv.terms.items():
                        term = op(act_key(f1, bx), act_key(f2, by)).scale(c)
                        res = term if res is None else res + term
                    hit = memo[mk] = res
                target = hit.space
                add_scaled(acc, hit.terms, cx * cy)
        if target is None:
            target = op(x.space.zero(), y.space.zero()).space
        return Element(target, acc)

    def mul(self, a: Element, b: Element) -> Element:
        return self.bilinear(lambda p, q: p * q, a, b, "mul")

    def left(self, a: Element, v: Element) -> Element:
        return self.bilinear(lambda p, q: right_mul(q, p), a, v, "left")

    def right(self, v: Element, a: Element) -> Element:
        return self.bilinear(right_mul, v, a, "right")

    # -- tensors ----------------------------------------------------------

    def tensor_space(self, factors):
        from .tensor import TensorK, flat_factors
        factors = flat_factors(factors)
        key = tuple(id(f) for f in factors)
        sp = self._tensors.get(key)
        if sp is None:
            sp = self._tensors[key] = TensorK(factors, self.structure)
        return sp

    def quotient(self, factors):
        from .tensor import quotient_space
        return quotient_space(factors)

    def otimes(self, *xs: Element) -> Element:
        """K-level tensor of module elements, flattening nested tensors and quotients."""
        from .tensor import otimes_lifted
        return otimes_lifted(self, xs)

    def otimes_A(self, *xs: Element) -> Element:
        return self.project(self.otimes(*xs))

    def G(self, k: int) -> Element:
        from .tensor import phi_tensor
        return phi_tensor(self, k)

    def project(self, t: Element) -> Element:
        from .tensor import project
        return project(self, t)

    def lift(self, x: Element) -> Element:
        from .tensor import lift
        return lift(self, x)

    def __repr__(self):
        return f"<StarStructure {self.name}>"


def star_product(s: StarStructure, a: Element, b: Element) -> Element:
    return s.mul(a, b)


def star_left(s: StarStructure, a: Element, v: Element) -> Element:
    return s.left(a, v)


def star_right(s: StarStructure, v: Element, a: Element) -> Element:
    return s.right(v, a)


# ---------------------------------------------------------------------------
# Probes


def probe_elements(space, degree: int) -> list[Element]:
    return [space.basis(k) for k in space.probe_keys(degree)]


def probe_tuples(spaces, degree: int):
    """Basis tuples whose degrees add up to at most ``degree``."""
    keysets = [sp.probe_keys(degree) for sp in spaces]
    for combo in itertools.product(*keysets):
        if sum(sp.degree(k) for sp, k in zip(spaces, combo)) <= degree:
            yield tuple(sp.basis(k) for sp, k in zip(spaces, combo))


def R_terms(R: Element):
    """Pure terms ``(coeff, leg0 key, leg1 key)`` of a rank-2 tensor."""
    return [(c, k[0], k[1]) for k, c in R.terms.items()]


# ---------------------------------------------------------------------------
# Checks


def module_algebra_check(A: ModuleAlgebra, hprobes, degree: int,
                         report: CheckReport | None = None,
                         prefix: str = "modalg.algebra") -> CheckReport:
    report = report if report is not None else CheckReport()
    H = A.hopf
    probes = probe_elements(A, degree)
    with report.check(f"{prefix}.action") as c:
        for xi, zeta in itertools.product(hprobes, repeat=2):
            for a in probes:
                c.equal(act(xi, act(zeta, a)), act(xi * zeta, a), xi=xi, zeta=zeta, a=a)
    with report.check(f"{prefix}.module_algebra") as c:
        for xi in hprobes:
            c.equal(act(xi, A.one()), A.one().scale(H.counit(xi)), xi=xi)
            for a, b in probe_tuples([A, A], degree):
                d = H.coproduct(xi)
                rhs = A.zero()
                for (h1, h2), k in d.terms.items():
                    rhs = rhs + (act_key(h1, a) * act_key(h2, b)).scale(k)
                c.equal(act(xi, a * b), rhs, xi=xi, a=a, b=b)
    return report


def bimodule_check(V: FreeBimodule, hprobes, degree: int,
                   report: CheckReport | None = None, prefix: str | None = None) -> CheckReport:
    report = report if report is not None else CheckReport()
    prefix = prefix or f"modalg.bimodule.{V.name}"
    H = V.hopf
    with report.check(f"{prefix}.action") as c:
        for xi, zeta in itertools.product(hprobes, repeat=2):
            for v in probe_elements(V, degree):
                c.equal(act(xi, act(zeta, v)), act(xi * zeta, v), xi=xi, zeta=zeta, v=v)
    with report.check(f"{prefix}.compatibility") as c:
        for xi in hprobes:
            for v, a in probe_tuples([V, V.A], degree):
                rhs = V.zero()
                for (h1, h2), k in H.coproduct(xi).terms.items():
                    rhs = rhs + right_mul(act_key(h1, v), act_key(h2, a)).scale(k)
                c.equal(act(xi, right_mul(v, a)), rhs, xi=xi, v=v, a=a)
    return report


def _covariant_rhs(s: StarStructure, xi: Element, x, y, op):
    out = None
    for (h1, h2), k in s.structure.coproduct(xi).terms.items():
        term = op(act_key(h1, x), act_key(h2, y)).scale(k)
        out = term if out is None else out + term
    return out


def star_algebra_check(s: StarStructure, A: ModuleAlgebra, hprobes, degree: int,
                       report: CheckReport | None = None, prefix: str = "star") -> CheckReport:
    """Associativity, unit and ``H^F``-covariance of the frame product on ``A``."""
    report = report if report is not None else CheckReport()
    one = A.one()
    with report.check(f"{prefix}.assoc") as c:
        for a, b, d in probe_tuples([A, A, A], degree):
            c.equal(s.mul(s.mul(a, b), d), s.mul(a, s.mul(b, d)), a=a, b=b, c=d)
    with report.check(f"{prefix}.unit") as c:
        for a in probe_elements(A, degree):
            c.equal(s.mul(one, a), a, a=a)
            c.equal(s.mul(a, one), a, a=a)
    with report.check(f"{prefix}.covariance") as c:
        for xi in hprobes:
            for a, b in probe_tuples([A, A], degree):
                c.equal(act(xi, s.mul(a, b)), _covariant_rhs(s, xi, a, b, s.mul),
                        xi=xi, a=a, b=b)
    if s.twist is not None:
        with report.check(f"{prefix}.dequantize") as c:
            # twisting the star product back with F recovers the classical one
            for a, b in probe_tuples([A, A], degree):
                back = A.zero()
                for (f1, f2), k in s.twist.F.terms.items():
                    back = back + s.mul(act_key(f1, a), act_key(f2, b)).scale(k)
                c.equal(back, a * b, a=a, b=b)
    return report


def star_bimodule_check(s: StarStructure, V: FreeBimodule, hprobes, degree: int,
                        report: CheckReport | None = None, prefix: str | None = None) -> CheckReport:
    """Module laws, bimodule compatibility, unit and covariance of the frame actions on ``V``."""
    report = report if report is not None else CheckReport()
    prefix = prefix or f"star.bimodule.{V.name}"
    A = V.A
    one = A.one()
    with report.check(f"{prefix}.module_laws") as c:
        for a, b, v in probe_tuples([A, A, V], degree):
            c.equal(s.left(s.mul(a, b), v), s.left(a, s.left(b, v)), a=a, b=b, v=v)
            c.equal(s.right(s.right(v, a), b), s.right(v, s.mul(a, b)), v=v, a=a, b=b)
    with report.check(f"{prefix}.compatibility") as c:
        for a, v, b in probe_tuples([A, V, A], degree):
            c.equal(s.right(s.left(a, v), b), s.left(a, s.right(v, b)), a=a, v=v, b=b)
    with report.check(f"{prefix}.unit") as c:
        for v in probe_elements(V, degree):
            c.equal(s.left(one, v), v, v=v)
            c.equal(s.right(v, one), v, v=v)
    with report.check(f"{prefix}.covariance") as c:
        for xi in hprobes:
            for a, v in probe_tuples([A, V], degree):
                c.equal(act(xi, s.left(a, v)), _covariant_rhs(s, xi, a, v, s.left),
                        xi=xi, a=a, v=v)
                c.equal(act(xi, s.right(v, a)), _covariant_rhs(s, xi, v, a, s.right),
                        xi=xi, a=a, v=v)
    return report


def _braided_swap(R: RMatrix, x: Element, y: Element, op) -> Element:
    """``op(Rbar^a |> y, Rbar_a |> x)``."""
    out = None
    for c, r1, r2 in R_terms(R.R_inv):
        term = op(act_key(r1, y), act_key(r2, x)).scale(c)
        out = term if out is None else out + term
    return out


def quasi_commutative_algebra(s: StarStructure, A: ModuleAlgebra, degree: int,
                              R: RMatrix | None = None, report: CheckReport | None = None,
                              prefix: str = "star.quasicomm.A") -> CheckReport:
    """``a b = (Rbar^a |> b)(Rbar_a |> a)`` for the frame product on probe pairs."""
    report = report if report is not None else CheckReport()
    R = R or s.R
    with report.check(prefix) as c:
        for a, b in probe_tuples([A, A], degree):
            c.equal(s.mul(a, b), _braided_swap(R, a, b, s.mul), a=a, b=b)
    return report


def quasi_commutative_bimodule(s: StarStructure, V: FreeBimodule, degree: int,
                               R: RMatrix | None = None, report: CheckReport | None = None,
                               prefix: str | None = None) -> CheckReport:
    """``v a = (Rbar^a |> a)(Rbar_a |> v)`` and ``a v = (Rbar^a |> v)(Rbar_a |> a)``."""
    report = report if report is not None else CheckReport()
    R = R or s.R
    prefix = prefix or f"star.quasicomm.{V.name}"
    with report.check(prefix) as c:
        for v, a in probe_tuples([V, V.A], degree):
            c.equal(s.right(v, a), _braided_swap(R, v, a, s.left), v=v, a=a)
            c.equal(s.left(a, v), _braided_swap(R, a, v, s.right), a=a, v=v)
    return report
