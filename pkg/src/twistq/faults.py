"""Named fault injections; each one must make a specific check fail."""

from __future__ import annotations

from .hopf import HopfStructure
from .scenario import ScenarioError, Section
from .twist import RMatrix, Twist, trivial_rmatrix, unit_tensor

# name -> (suite that must fail, what is corrupted)
FAULTS = {
    "antipode-entry": ("hopf", "the antipode of one basis element is negated"),
    "twist-inverse": ("twist", "F^-1 is perturbed by h (1 (x) 1), or doubled at order 0"),
    "adjoint-antipode": ("homdef", "the deformed adjoint action uses S^F with one basis element negated"),
    "quasicomm-trivial-r": ("star", "quasi-commutativity of A* is tested against R = 1 (x) 1"),
    "rmatrix-drop-h2": ("braid", "the h^2 terms of R^F and its inverse are dropped"),
    "rtensor-undressed": ("rtensor.diagram", "the fbar dressing of P and Q on the bottom edge is omitted"),
    "tau-swapped-legs": ("conn.oplus", "the braiding in the connection sum uses R_21 in place of R"),
    "tau-first-leg": ("conn.oplus.assoc", "R acts on the first leg of a composite factor only"),
    "diagram-top-trivial-r": ("conn.diagram", "the top edge of the connection square uses R = 1 (x) 1"),
}


def validate(names, section: Section | None = None) -> tuple:
    out = []
    for n in names:
        if n not in FAULTS:
            if section is not None and section.entry("inject") is not None:
                raise section.entry("inject").error(f"unknown fault {n!r}")
            raise ScenarioError(f"unknown fault {n!r}", source="--fault")
        if n not in out:
            out.append(n)
    return tuple(sorted(out))


class CorruptedAntipode(HopfStructure):
    """``structure`` with ``S(key)`` negated."""

    def __init__(self, structure, key):
        self.inner = structure
        self.base = structure.base
        self.key = key

    def coproduct_key(self, k):
        return self.inner.coproduct_terms(k)

    def antipode_key(self, k):
        terms = self.inner.antipode(self.base.basis(k)).terms
        if k == self.key:
            return {kk: -c for kk, c in terms.items()}
        return terms


def corrupt_antipode(structure):
    """Negate the antipode on the first non-unit basis key; works for deformed structures too."""
    H = structure.base
    unit = next(iter(H.unit_terms()))
    return CorruptedAntipode(structure, next(k for k in H.probe_keys(1) if k != unit))


def perturb_inverse(t: Twist) -> Twist:
    ring = t.F.ring
    one = unit_tensor(t.base)
    bad = t.F_inv + one.scale(ring.h) if ring.order >= 1 else t.F_inv.scale(2)
    return Twist(t.F, bad)


def drop_h2(R: RMatrix) -> RMatrix:
    def cut(T):
        sp = T.space
        out = {}
        for k, c in T.terms.items():
            coeffs = list(c.coeffs)
            if len(coeffs) > 2:
                coeffs[2] = 0
            v = type(c)(coeffs)
            if v:
                out[k] = v
        return sp.element(out)
    return RMatrix(cut(R.R), cut(R.R_inv), R.structure)


def trivial_braiding(frame):
    return frame.with_rmatrix(trivial_rmatrix(frame.structure))
