"""Hopf algebras with explicit Sweedler legs.

Two backends share one interface:

* :class:`AbelianPBW` -- the enveloping algebra of an abelian Lie algebra on
  generators ``X1..Xm``, basis = PBW monomials (exponent tuples), primitive
  generators.
* :class:`FiniteDimHopf` -- structure-constant tables on a finite basis, with a
  :meth:`FiniteDimHopf.group_algebra` constructor from a Cayley table.

A *Hopf structure* is anything with ``base``, ``mul``, ``one``, ``coproduct``,
``counit``, ``antipode``; the backends are the classical structures and
:class:`twistq.twist.DeformedHopf` is the twisted one on the same elements.
Tensors ``H^{(x) r}`` are elements of :class:`TensorPower` spaces whose keys are
r-tuples of backend keys.
"""

from __future__ import annotations

import itertools
from math import comb

from .checks import CheckReport
from .linear import Element, Space, SpaceMismatch, add_into, add_scaled
from .scalars import Scalar, ScalarRing


class TensorPower(Space):
    """``H (x) ... (x) H`` with the leg-wise product."""

    def __init__(self, base: "HopfAlgebra", rank: int):
        super().__init__(base.ring, f"{base.name}^{rank}")
        self.base = base
        self.rank = rank

    def mul_keys(self, k1, k2):
        out = {(): self.ring.one}
        for a, b in zip(k1, k2):
            leg = self.base.mul_keys(a, b)
            nxt: dict = {}
            for prefix, c in out.items():
                for k, d in leg.items():
                    add_into(nxt, prefix + (k,), c * d)
            out = nxt
        return out

    def one(self) -> Element:
        return tensor(*([self.base.one()] * self.rank))

    def format_key(self, key) -> str:
        return " (x) ".join(self.base.format_key(k) for k in key)

    def sort_key(self, key):
        return tuple(self.base.sort_key(k) for k in key)


class HopfStructure:
    """Element-level Hopf operations built from key-level ones.

    Subclasses provide ``base`` and ``coproduct_key`` / ``antipode_key``.
    Results are memoised per key; structures are immutable once built.
    """

    base: "HopfAlgebra"

    def _memo(self, name: str) -> dict:
        store = self.__dict__.setdefault("_memos", {})
        return store.setdefault(name, {})

    def one(self) -> Element:
        return self.base.one()

    def mul(self, a: Element, b: Element) -> Element:
        return a * b

    def counit(self, x: Element) -> Scalar:
        self.base.require(x)
        total = self.base.ring.zero
        for k, c in x.terms.items():
            total = total + c * self.base.counit_key(k)
        return total

    def coproduct(self, x: Element) -> Element:
        self.base.require(x)
        memo = self._memo("coproduct")
        acc: dict = {}
        for k, c in x.terms.items():
            d = memo.get(k)
            if d is None:
                d = memo[k] = self.coproduct_key(k)
            add_scaled(acc, d, c)
        return Element(self.base.tensor_space(2), acc)

    def antipode(self, x: Element) -> Element:
        self.base.require(x)
        memo = self._memo("antipode")
        acc: dict = {}
        for k, c in x.terms.items():
            d = memo.get(k)
            if d is None:
                d = memo[k] = self.antipode_key(k)
            add_scaled(acc, d, c)
        return Element(self.base, acc)

    def coproduct_terms(self, k) -> dict:
        memo = self._memo("coproduct")
        d = memo.get(k)
        if d is None:
            d = memo[k] = self.coproduct_key(k)
        return d

    def iterated_coproduct_key(self, k, legs: int) -> dict:
        """``(Delta (x) id ...) ... Delta`` of a basis key, as ``{tuple: coeff}``."""
        memo = self._memo("iterated")
        hit = memo.get((k, legs))
        if hit is not None:
            return hit
        if legs == 1:
            out = {(k,): self.base.ring.one}
        elif legs == 2:
            out = self.coproduct_terms(k)
        else:
            out = {}
            for key, c in self.iterated_coproduct_key(k, legs - 1).items():
                for (a, b), d in self.coproduct_terms(key[0]).items():
                    add_into(out, (a, b) + key[1:], c * d)
        memo[(k, legs)] = out
        return out

    def iterated_coproduct(self, x: Element, legs: int) -> Element:
        acc: dict = {}
        for k, c in x.terms.items():
            add_scaled(acc, self.iterated_coproduct_key(k, legs), c)
        return Element(self.base.tensor_space(legs), acc)


class HopfAlgebra(Space, HopfStructure):
    """Common plumbing for backends; a backend is its own classical structure."""

    def __init__(self, ring: ScalarRing, name: str):
        Space.__init__(self, ring, name)
        self._tensor_spaces: dict[int, TensorPower] = {}

    @property
    def base(self) -> "HopfAlgebra":
        return self

    def require(self, x: Element) -> None:
        if x.space is not self:
            raise SpaceMismatch(f"element of {x.space!r} used with {self!r}")

    def tensor_space(self, rank: int) -> TensorPower:
        sp = self._tensor_spaces.get(rank)
        if sp is None:
            sp = self._tensor_spaces[rank] = TensorPower(self, rank)
        return sp

    def one(self) -> Element:
        return Element(self, dict(self.unit_terms()))

    def scalar(self, c) -> Element:
        return self.one().scale(c)

    def probes(self, degree: int | None = None) -> list[Element]:
        return [self.basis(k) for k in self.probe_keys(degree)]


class AbelianPBW(HopfAlgebra):
    """U(g) for abelian g: commutative polynomials in primitive generators."""

    def __init__(self, ring: ScalarRing, generators):
        generators = tuple(generators)
        super().__init__(ring, "U(" + ",".join(generators) + ")")
        self.generators = generators
        self.m = len(generators)
        self._zero_key = (0,) * self.m

    def gen(self, i: int) -> Element:
        key = tuple(1 if j == i else 0 for j in range(self.m))
        return self.basis(key)

    def named(self, name: str) -> Element:
        return self.gen(self.generators.index(name))

    def unit_terms(self):
        return {self._zero_key: self.ring.one}

    def mul_keys(self, a, b):
        return {tuple(x + y for x, y in zip(a, b)): self.ring.one}

    def coproduct_key(self, k):
        out = {}
        one = self.ring.one
        for beta in itertools.product(*(range(a + 1) for a in k)):
            c = 1
            for a, b in zip(k, beta):
                c *= comb(a, b)
            rest = tuple(a - b for a, b in zip(k, beta))
            out[(beta, rest)] = one * c
        return out

    def counit_key(self, k):
        return self.ring.one if not any(k) else self.ring.zero

    def antipode_key(self, k):
        return {k: self.ring.one if sum(k) % 2 == 0 else -self.ring.one}

    def degree(self, k) -> int:
        return sum(k)

    def probe_keys(self, degree=None):
        if degree is None:
            raise ValueError("an infinite-dimensional backend needs a probe degree")
        keys = [k for k in itertools.product(range(degree + 1), repeat=self.m)
                if sum(k) <= degree]
        return sorted(keys, key=lambda k: (sum(k), tuple(-e for e in k)))

    def format_key(self, key):
        parts = []
        for name, e in zip(self.generators, key):
            if e == 1:
                parts.append(name)
            elif e > 1:
                parts.append(f"{name}^{e}")
        return "*".join(parts) if parts else "1"

    def sort_key(self, key):
        return (sum(key), tuple(-e for e in key))


class FiniteDimHopf(HopfAlgebra):
    """Hopf algebra given by structure-constant tables on a finite basis.

    Tables hold rationals; ``mul[(a, b)]`` and ``antipode[a]`` map to
    ``{label: q}``, ``coproduct[a]`` to ``{(b, c): q}``, ``counit[a]`` to ``q``.
    """

    def __init__(self, ring, labels, mul, unit, coproduct, counit, antipode,
                 name="H", group=None):
        super().__init__(ring, name)
        self.labels = tuple(labels)
        self._index = {l: i for i, l in enumerate(self.labels)}

        def conv(d):
            return {k: ring(v) for k, v in d.items() if v}

        self._mul = {k: conv(v) for k, v in mul.items()}
        self._unit = conv(unit)
        self._coproduct = {k: conv(v) for k, v in coproduct.items()}
        self._counit = {k: ring(v) for k, v in counit.items()}
        self._antipode = {k: conv(v) for k, v in antipode.items()}
        # Cayley table when the basis is a group; used by module algebras.
        self.group = group

    @classmethod
    def group_algebra(cls, ring: ScalarRing, labels, table, name="K[G]"):
        """K[G] from a Cayley table ``table[a][b] = a*b`` (labels as strings)."""
        labels = tuple(labels)
        identity = None
        for a in labels:
            if all(table[a][b] == b for b in labels):
                identity = a
        if identity is None:
            raise ValueError("Cayley table has no identity element")
        inverse = {}
        for a in labels:
            inv = [b for b in labels if table[a][b] == identity]
            if len(inv) != 1:
                raise ValueError(f"element {a} has no unique inverse")
            inverse[a] = inv[0]
        mul = {(a, b): {table[a][b]: 1} for a in labels for b in labels}
        return cls(ring, labels, mul, {identity: 1},
                   {a: {(a, a): 1} for a in labels},
                   {a: 1 for a in labels},
                   {a: {inverse[a]: 1} for a in labels},
                   name=name,
                   group={"table": {a: dict(table[a]) for a in labels},
                          "identity": identity, "inverse": inverse})

    def unit_terms(self):
        return self._unit

    def mul_keys(self, a, b):
        return self._mul.get((a, b), {})

    def coproduct_key(self, k):
        return self._coproduct.get(k, {})

    def counit_key(self, k):
        return self._counit.get(k, self.ring.zero)

    def antipode_key(self, k):
        return self._antipode.get(k, {})

    def probe_keys(self, degree=None):
        return list(self.labels)

    def format_key(self, key):
        return str(key)

    def sort_key(self, key):
        return self._index.get(key, len(self.labels))

    def with_antipode(self, label, value: dict) -> "FiniteDimHopf":
        """Copy with one antipode table entry replaced (fault injection)."""
        anti = {k: dict(v) for k, v in self._antipode.items()}
        anti[label] = value
        return FiniteDimHopf(self.ring, self.labels,
                             {k: dict(v) for k, v in self._mul.items()},
                             dict(self._unit),
                             {k: dict(v) for k, v in self._coproduct.items()},
                             dict(self._counit), anti,
                             name=self.name + "'", group=self.group)


# ---------------------------------------------------------------------------
# Leg bookkeeping on tensor powers


def tensor(*factors: Element) -> Element:
    """Pure tensor of Hopf elements or tensors (legs concatenate)."""
    base = None
    legs = []
    for f in factors:
        sp = f.space
        if isinstance(sp, TensorPower):
            b, r = sp.base, sp.rank
            legs.append({k: c for k, c in f.terms.items()})
        else:
            b, r = sp, 1
            legs.append({(k,): c for k, c in f.terms.items()})
        if base is None:
            base = b
        elif b is not base:
            raise SpaceMismatch("tensor factors from different Hopf algebras")
    out = {(): base.ring.one}
    for leg in legs:
        nxt: dict = {}
        for p, c in out.items():
            for k, d in leg.items():
                add_into(nxt, p + k, c * d)
        out = nxt
    rank = sum((f.space.rank if isinstance(f.space, TensorPower) else 1) for f in factors)
    return Element(base.tensor_space(rank), out)


def leg_map(T: Element, fns, base: HopfAlgebra | None = None) -> Element:
    """Apply ``fns[i]: key -> {tuple: coeff}`` to leg ``i`` (``None`` = identity).

    The output rank is the total length of the produced tuples, so coproducts
    (2-tuples) and counits (empty tuples) on individual legs are both allowed.
    A result of rank 0 is returned as a :class:`~twistq.scalars.Scalar`.
    """
    sp = T.space
    base = base or sp.base
    acc: dict = {}
    one = base.ring.one
    for key, c in T.terms.items():
        partial = {(): c}
        for k, fn in zip(key, fns):
            image = {(k,): one} if fn is None else fn(k)
            nxt: dict = {}
            for p, a in partial.items():
                for q, b in image.items():
                    add_into(nxt, p + q, a * b)
            partial = nxt
            if not partial:
                break
        add_scaled(acc, partial)
    if not acc:
        rank = _rank_after(sp.rank, fns, base)
    else:
        rank = len(next(iter(acc)))
    if rank == 0:
        return acc.get((), base.ring.zero)
    if rank == 1:
        return Element(base, {k[0]: c for k, c in acc.items()})
    return Element(base.tensor_space(rank), acc)


def _rank_after(rank, fns, base):
    # Probe each leg map on the unit to learn its output rank.
    total = 0
    unit_key = next(iter(base.unit_terms()))
    for fn in fns:
        if fn is None:
            total += 1
        else:
            image = fn(unit_key)
            total += len(next(iter(image))) if image else 1
    return total


def permute(T: Element, perm) -> Element:
    """Leg ``i`` of the result is leg ``perm[i]`` of ``T``."""
    acc = {tuple(k[p] for p in perm): c for k, c in T.terms.items()}
    return Element(T.space, acc)


def flip(T: Element) -> Element:
    return permute(T, (1, 0))


def embed(T: Element, rank: int, positions) -> Element:
    """Place the legs of ``T`` at ``positions`` of a rank-``rank`` tensor, units elsewhere."""
    sp = T.space
    base = sp.base if isinstance(sp, TensorPower) else sp
    unit = base.unit_terms()
    keys = T.terms.items() if isinstance(sp, TensorPower) else (
        ((k,), c) for k, c in T.terms.items())
    acc: dict = {}
    for key, c in keys:
        partial = {(): c}
        it = iter(key)
        for i in range(rank):
            image = {next(it): base.ring.one} if i in positions else unit
            nxt: dict = {}
            for p, a in partial.items():
                for q, b in image.items():
                    add_into(nxt, p + (q,), a * b)
            partial = nxt
        add_scaled(acc, partial)
    return Element(base.tensor_space(rank), acc)


def multiply_legs(T: Element) -> Element:
    """``mu: H (x) H -> H``."""
    base = T.space.base
    acc: dict = {}
    for (a, b), c in T.terms.items():
        add_scaled(acc, base.mul_keys(a, b), c)
    return Element(base, acc)


def legs(T: Element):
    """Iterate ``(coeff, [leg elements])`` over the pure terms of a tensor."""
    base = T.space.base
    for key, c in T.sorted_items():
        yield c, [base.basis(k) for k in key]


def on_leg(structure, op: str, leg: int, rank: int):
    """Leg function list applying ``coproduct``/``counit``/``antipode`` on one leg."""
    if op == "coproduct":
        fn = structure.coproduct_terms
    elif op == "counit":
        def fn(k):
            return {(): structure.counit(structure.base.basis(k))}
    elif op == "antipode":
        def fn(k):
            return {(kk,): c for kk, c in structure.antipode(structure.base.basis(k)).terms.items()}
    else:
        raise ValueError(op)
    return [fn if i == leg else None for i in range(rank)]


# ---------------------------------------------------------------------------
# Element-level conveniences matching the operation names


def hopf_mul(a: Element, b: Element) -> Element:
    if a.space is not b.space:
        raise SpaceMismatch("Hopf elements from different backends")
    return a * b


def coproduct(a: Element, structure=None) -> Element:
    return (structure or a.space).coproduct(a)


def counit(a: Element, structure=None) -> Scalar:
    return (structure or a.space).counit(a)


def antipode(a: Element, structure=None) -> Element:
    return (structure or a.space).antipode(a)


def hopf_check(structure, probes, report: CheckReport | None = None,
               prefix: str = "hopf") -> CheckReport:
    """Verify the Hopf axioms and standard antipode consequences on ``probes``.

    Each axiom becomes one result line; failures carry the first probe that
    violates it.
    """
    report = report if report is not None else CheckReport()
    H = structure.base
    one = structure.one()
    Delta = structure.coproduct
    S = structure.antipode
    eps = structure.counit

    if isinstance(H, FiniteDimHopf):
        basis = [H.basis(k) for k in H.labels]
        with report.check(f"{prefix}.associativity") as c:
            for a, b, d in itertools.product(basis, repeat=3):
                c.equal((a * b) * d, a * (b * d), a=a, b=b, c=d)
        with report.check(f"{prefix}.unit") as c:
            for a in basis:
                c.equal(one * a, a, a=a)
                c.equal(a * one, a, a=a)

    with report.check(f"{prefix}.coassociativity") as c:
        for x in probes:
            d = Delta(x)
            lhs = leg_map(d, on_leg(structure, "coproduct", 0, 2))
            rhs = leg_map(d, on_leg(structure, "coproduct", 1, 2))
            c.equal(lhs, rhs, xi=x)
    with report.check(f"{prefix}.counit") as c:
        for x in probes:
            d = Delta(x)
            c.equal(leg_map(d, on_leg(structure, "counit", 0, 2)), x, xi=x)
            c.equal(leg_map(d, on_leg(structure, "counit", 1, 2)), x, xi=x)
    with report.check(f"{prefix}.antipode") as c:
        for x in probes:
            d = Delta(x)
            target = one.scale(eps(x))
            c.equal(multiply_legs(leg_map(d, on_leg(structure, "antipode", 0, 2))), target, xi=x)
            c.equal(multiply_legs(leg_map(d, on_leg(structure, "antipode", 1, 2))), target, xi=x)
    with report.check(f"{prefix}.coproduct_multiplicative") as c:
        c.equal(Delta(one), tensor(one, one), xi=one)
        for x, y in itertools.product(probes, repeat=2):
            c.equal(Delta(x * y), Delta(x) * Delta(y), xi=x, zeta=y)
    with report.check(f"{prefix}.counit_multiplicative") as c:
        c.equal(eps(one), H.ring.one, xi=one)
        for x, y in itertools.product(probes, repeat=2):
            c.equal(eps(x * y), eps(x) * eps(y), xi=x, zeta=y)
    with report.check(f"{prefix}.antipode_antihomomorphism") as c:
        c.equal(S(one), one, xi=one)
        for x, y in itertools.product(probes, repeat=2):
            c.equal(S(x * y), S(y) * S(x), xi=x, zeta=y)
    with report.check(f"{prefix}.antipode_coproduct") as c:
        for x in probes:
            lhs = leg_map(Delta(x), on_leg(structure, "antipode", 0, 2))
            lhs = leg_map(lhs, on_leg(structure, "antipode", 1, 2))
            c.equal(lhs, flip(Delta(S(x))), xi=x)
    with report.check(f"{prefix}.antipode_counit") as c:
        for x in probes:
            c.equal(eps(S(x)), eps(x), xi=x)
    return report


def klein_group(ring: ScalarRing) -> FiniteDimHopf:
    """K[Z2 x Z2] on labels e, a, b, c."""
    labels = ("e", "a", "b", "c")
    vec = {"e": (0, 0), "a": (1, 0), "b": (0, 1), "c": (1, 1)}
    back = {v: k for k, v in vec.items()}
    table = {x: {y: back[((vec[x][0] + vec[y][0]) % 2, (vec[x][1] + vec[y][1]) % 2)]
                 for y in labels} for x in labels}
    return FiniteDimHopf.group_algebra(ring, labels, table, name="K[Z2xZ2]")

