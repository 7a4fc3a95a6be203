"""Tensor products over K and over A.

``TensorK`` is the K-level tensor of module spaces; its Hopf action comes
from the iterated coproduct of a chosen structure, so the classical tensor
(``Delta``) and the deformed one (``Delta^F``) are distinct spaces with the
same keys.

Tensor products over ``A`` of free commutative bimodules are free again, with
basis ``e_i (x) f_j``; :class:`QuotientA` stores that normal form.  In a star
frame an element of ``V* (x)_A* W*`` is stored by its image under the
canonical isomorphism onto ``(V (x)_A W)*``, namely the classical projection of
``G_k |> t`` where ``G_2 = F^-1`` and
``G_{k+1} = (Delta^(k) (x) id)(F^-1) (G_k (x) 1)``.  Nested products are
flattened, so bracketings coincide as spaces.
"""

from __future__ import annotations

import itertools

from .hopf import embed, leg_map
from .linear import Element, SpaceMismatch, add_into, add_scaled
from .modalg import FreeBimodule, ModuleSpace


class TensorK(ModuleSpace):
    def __init__(self, factors, structure):
        factors = tuple(factors)
        super().__init__(factors[0].ring, " (x) ".join(f.name for f in factors))
        self.factors = factors
        self.structure = structure
        self.hopf = factors[0].hopf
        self.rank = len(factors)

    def act_key(self, hkey, key):
        out: dict = {}
        for legs, c in self.structure.iterated_coproduct_key(hkey, self.rank).items():
            partial = {(): c}
            for f, h, k in zip(self.factors, legs, key):
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

    def degree(self, key):
        return sum(f.degree(k) for f, k in zip(self.factors, key))

    def probe_keys(self, degree: int):
        keysets = [f.probe_keys(degree) for f in self.factors]
        return [combo for combo in itertools.product(*keysets)
                if self.degree(combo) <= degree]

    def format_key(self, key):
        return " (x) ".join(f"({f.format_key(k)})" for f, k in zip(self.factors, key))

    def sort_key(self, key):
        return tuple(f.sort_key(k) for f, k in zip(self.factors, key))


class QuotientA(FreeBimodule):
    """``V1 (x)_A ... (x)_A Vk`` in right-coefficient normal form ``(e_l1 (x) ... (x) e_lk) . a``."""

    def __init__(self, factors):
        factors = tuple(factors)
        A = factors[0].A
        for f in factors:
            if not isinstance(f, FreeBimodule) or f.A is not A:
                raise SpaceMismatch("tensor over A needs free bimodules over one algebra")
        labels = tuple(itertools.product(*(f.labels for f in factors)))
        self.factors = factors
        self._classical = TensorK(factors, A.hopf)
        super().__init__(A, labels, self._label_action,
                         name=" (x)_A ".join(f.name for f in factors))

    def _label_action(self, hkey, labels):
        t = Element(self._classical, lift_terms(self, {(labels, k): c for k, c in self.A.one().terms.items()}))
        acted = {}
        for k, c in t.terms.items():
            add_scaled(acted, self._classical.act_cached(hkey, k), c)
        return project_terms(self, acted)

    def format_label(self, label):
        return " (x) ".join(f.format_label(l) for f, l in zip(self.factors, label))

    def format_key(self, key):
        label, k = key
        ls = self.format_label(label)
        ks = self.A.format_key(k)
        return f"({ls})" if ks == "1" else f"({ls})*{ks}"


def flat_factors(factors) -> tuple:
    out = []
    for f in factors:
        if isinstance(f, (QuotientA, TensorK)):
            out.extend(f.factors)
        else:
            out.append(f)
    return tuple(out)


def quotient_space(factors):
    factors = flat_factors(factors)
    if len(factors) == 1:
        return factors[0]
    A = factors[0].A
    store = A.__dict__.setdefault("_quotients", {})
    key = tuple(id(f) for f in factors)
    q = store.get(key)
    if q is None:
        q = store[key] = QuotientA(factors)
    return q


def project_terms(q: QuotientA, terms: dict) -> dict:
    """Classical projection of K-tensor terms onto the normal form."""
    A = q.A
    out: dict = {}
    for key, c in terms.items():
        labels = tuple(l for l, _ in key)
        partial = {key[0][1]: c}
        for _, k in key[1:]:
            nxt: dict = {}
            for p, a in partial.items():
                for m, b in A.mul_keys(p, k).items():
                    add_into(nxt, m, a * b)
            partial = nxt
        for m, a in partial.items():
            add_into(out, (labels, m), a)
    return out


def lift_terms(q: QuotientA, terms: dict) -> dict:
    """Classical lift ``(e_l1 . 1) (x) ... (x) (e_lk . a)``."""
    unit = q.A.one().terms
    out: dict = {}
    k = len(q.factors)
    for (labels, ak), c in terms.items():
        partial = {(): c}
        for i, l in enumerate(labels):
            image = {(l, ak): q.ring.one} if i == k - 1 else {(l, u): d for u, d in unit.items()}
            nxt: dict = {}
            for p, a in partial.items():
                for kk, b in image.items():
                    add_into(nxt, p + (kk,), a * b)
            partial = nxt
        add_scaled(out, partial)
    return out


def act_legs(T: Element, t: Element) -> Element:
    """Leg-wise action of a rank-k Hopf tensor on a k-fold tensor."""
    sp = t.space
    acc: dict = {}
    for hkeys, c in T.terms.items():
        for key, d in t.terms.items():
            partial = {(): c * d}
            for f, h, k in zip(sp.factors, hkeys, key):
                image = f.act_cached(h, k)
                nxt: dict = {}
                for p, a in partial.items():
                    for q, b in image.items():
                        add_into(nxt, p + (q,), a * b)
                partial = nxt
                if not partial:
                    break
            add_scaled(acc, partial)
    return Element(sp, acc)


def phi_tensor(frame, k: int):
    """``(G_k, G_k^-1)`` for the frame's twist."""
    hit = frame._G.get(k)
    if hit is not None:
        return hit
    tw = frame.twist
    parent = getattr(frame.structure, "parent", frame.H)
    if k == 2:
        out = (tw.F_inv, tw.F)
    else:
        G, Gi = phi_tensor(frame, k - 1)

        def it(key):
            return parent.iterated_coproduct_key(key, k - 1)
        step = leg_map(tw.F_inv, [it, None])
        step_inv = leg_map(tw.F, [it, None])
        pos = tuple(range(k - 1))
        out = (step * embed(G, k, pos), embed(Gi, k, pos) * step_inv)
    frame._G[k] = out
    return out


def project(frame, t: Element) -> Element:
    sp = t.space
    if not isinstance(sp, TensorK):
        return t
    q = quotient_space(sp.factors)
    if frame.twist is not None:
        t = act_legs(phi_tensor(frame, sp.rank)[0], t)
    return Element(q, project_terms(q, t.terms))


def lift(frame, x: Element) -> Element:
    q = x.space
    if not isinstance(q, QuotientA):
        return x
    t = Element(frame.tensor_space(q.factors), lift_terms(q, x.terms))
    if frame.twist is not None:
        t = act_legs(phi_tensor(frame, len(q.factors))[1], t)
    return t


def _as_tensor_terms(frame, x: Element):
    sp = x.space
    if isinstance(sp, QuotientA):
        return lift(frame, x).terms, sp.factors
    if isinstance(sp, TensorK):
        return x.terms, sp.factors
    return {(k,): c for k, c in x.terms.items()}, (sp,)


def otimes_lifted(frame, xs) -> Element:
    acc = {(): frame.H.ring.one}
    factors: tuple = ()
    for x in xs:
        terms, fs = _as_tensor_terms(frame, x)
        factors += fs
        nxt: dict = {}
        for p, a in acc.items():
            for k, b in terms.items():
                add_into(nxt, p + k, a * b)
        acc = nxt
    return Element(frame.tensor_space(factors), acc)


def retag(x: Element, space) -> Element:
    """Same keys, different space (e.g. classical versus deformed tensor flavour)."""
    return Element(space, dict(x.terms))


def phi_K(frame, t: Element, classical) -> Element:
    """``F^-1 |>`` (generally ``G_k |>``) from the deformed K-tensor to the classical one."""
    return retag(act_legs(phi_tensor(frame, t.space.rank)[0], t),
                 classical.tensor_space(t.space.factors))


def phi_K_inverse(frame, t: Element) -> Element:
    return retag(act_legs(phi_tensor(frame, t.space.rank)[1], t),
                 frame.tensor_space(t.space.factors))


def legs_of(t: Element):
    """Pure terms ``(coeff, [leg elements])`` of a K-tensor."""
    sp = t.space
    for key, c in t.sorted_items():
        yield c, [f.basis(k) for f, k in zip(sp.factors, key)]
