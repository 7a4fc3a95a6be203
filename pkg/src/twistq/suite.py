"""Named check suites and the scenario runner.

A suite is a function of a :class:`Context` returning a :class:`CheckReport`.
Suite names form a dotted hierarchy; selecting ``conn`` runs every ``conn.*``
suite.  ``[checks]`` may override the truncation order and probe degree per
suite with ``<suite>.truncation`` and ``<suite>.probe_degree``.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field

from . import faults as F
from .braid import (braid_relations_check, check_composition_law, check_rtensor,
                    check_rtensor_deformation_diagram, check_rtensor_over_A)
from .calculus import StarCalculus, calculus_check, graded_quasi_commutative
from .checks import SKIPPED, CheckReport, CheckResult, PreconditionFailed
from .connection import (D_tilde, braided_left_leibniz_check,
                         check_connection_deformation_diagram, connection_check,
                         equivariant_reduction_check, oplus_associativity_check,
                         oplus_check, trivial_connection)
from .homdef import (Adjoint, BasisMatrix, Compose, D_F, HopfAct, Identity, LeftMul,
                     LinComb, RightMul, adjoint_check, check_DF_structure, dual_module_check,
                     phi_check)
from .hopf import AbelianPBW, hopf_check
from .model import HomDecl, Model, build, sampled_connections
from .modalg import (PolyAlgebra, bimodule_check, module_algebra_check, probe_elements,
                     quasi_commutative_algebra, quasi_commutative_bimodule, star_algebra_check,
                     star_bimodule_check)
from .scenario import Scenario, ScenarioError, parse_int, split_list
from .twist import (DeformedHopf, InvalidTwist, deform_hopf, dequantize, rmatrix_check,
                    trivial_rmatrix, twist_check)


@dataclass
class Context:
    model: Model
    degree: int
    seed: int
    faults: tuple
    cache: dict = field(default_factory=dict)

    @property
    def s(self):
        return self.model.star

    @property
    def cl(self):
        return self.model.classical

    def hprobes(self, degree: int | None = None):
        H = self.model.H
        d = self.degree if degree is None else degree
        return H.probes(d) if isinstance(H, AbelianPBW) else H.probes()

    def option(self, key: str):
        sec = self.model.scenario.section("checks")
        return sec.entry(key) if sec is not None else None


@dataclass
class Suite:
    name: str
    fn: object
    needs: tuple
    doc: str


SUITES: dict[str, Suite] = {}


def suite(name: str, needs=(), doc: str = ""):
    def deco(fn):
        SUITES[name] = Suite(name, fn, tuple(needs), doc or (fn.__doc__ or "").strip())
        return fn
    return deco


def _missing(model: Model, needs) -> str | None:
    for n in needs:
        if n == "algebra" and model.A is None:
            return "scenario declares no [algebra]"
        if n == "calculus" and model.calc is None:
            return "scenario declares no [calculus]"
        if n.startswith("modules:"):
            k = int(n.split(":")[1])
            if len(model.modules) < k:
                return f"needs {k} declared bimodules"
        if n == "homs" and not any(h.right_linear for h in model.homs.values()):
            return "needs a right-linear [hom.*]"
    return None


# ---------------------------------------------------------------------------
# Shared object selection


def _modules(ctx: Context, k: int):
    mods = list(ctx.model.modules.values())
    return [mods[i % len(mods)] for i in range(k)]


def _connections(ctx: Context):
    """Declared connections followed by the seeded samples."""
    if "connections" not in ctx.cache:
        e = ctx.option("connections")
        count = parse_int(e, 0) if e is not None else 0
        ctx.cache["connections"] = (list(ctx.model.connections.values())
                                    + sampled_connections(ctx.model, count, ctx.seed))
    return ctx.cache["connections"]


def _named_connections(ctx: Context, key: str, k: int):
    e = ctx.option(key)
    pool = _connections(ctx)
    if e is not None:
        by_name = {nb.name: nb for nb in pool}
        out = []
        for name, off in split_list(e):
            if name not in by_name:
                raise e.error(f"unknown connection {name!r}", off)
            out.append(by_name[name])
        if len(out) != k:
            raise e.error(f"{key} needs {k} connections")
        return out
    out = []
    for M in _modules(ctx, k):
        nb = next((n for n in pool if n.V is M and n not in out), None)
        if nb is None:
            nb = trivial_connection(M, ctx.model.calc)
        out.append(nb)
    return out


def _pair(ctx: Context):
    e = ctx.option("rtensor.pair")
    homs = ctx.model.homs
    if e is not None:
        names = [n for n, _ in split_list(e)]
        for name, off in split_list(e):
            if name not in homs:
                raise e.error(f"unknown hom {name!r}", off)
        if len(names) != 2:
            raise e.error("rtensor.pair needs two homs")
        P, Q = (homs[n] for n in names)
    else:
        lin = [h for h in homs.values() if h.right_linear]
        P, Q = lin[0], lin[1] if len(lin) > 1 else lin[0]
    if not (P.right_linear and Q.right_linear):
        raise PreconditionFailed("rtensor pair must be right-A-linear")
    return P.op, Q.op


def _is_equivariant(ctx: Context, Q, structure) -> bool:
    for xi in ctx.hprobes(1):
        e = structure.counit(xi)
        ad = Adjoint(xi, Q, structure)
        for w in probe_elements(Q.dom, ctx.degree):
            if ad(w) != Q(w).scale(e):
                return False
    return True


def _operators(ctx: Context):
    """Declared homs plus seeded probe operators up to ``[checks] operators``."""
    if "operators" in ctx.cache:
        return ctx.cache["operators"]
    m = ctx.model
    e = ctx.option("operators")
    target = parse_int(e, 1) if e is not None else 0
    ops = [(h.op, h.right_linear) for h in m.homs.values()]
    rng = random.Random(ctx.seed)
    A, cl = m.A, m.classical
    gens = [A.basis(k) for k in A.probe_keys(1) if A.degree(k) == 1] if isinstance(A, PolyAlgebra) \
        else [A.basis(k) for k in A.probe_keys(0)]
    spaces = list(m.modules.values()) + [A.regular()]

    def random_matrix(M):
        mat = {}
        for j in M.labels:
            for i in M.labels:
                if rng.random() < 0.6:
                    a = A.one().scale(rng.choice([-1, 1, 2])) if rng.random() < 0.5 else rng.choice(gens)
                    mat[(j, i)] = a
        return BasisMatrix(M, M, mat)

    k = 0
    while len(ops) < target:
        M = spaces[k % len(spaces)]
        kind = (k // len(spaces)) % 5
        if kind == 0:
            ops.append((random_matrix(M), True))
        elif kind == 1:
            ops.append((LeftMul(rng.choice(gens), M, cl), True))
        elif kind == 2:
            P, L = random_matrix(M), LeftMul(rng.choice(gens), M, cl)
            mixed = LinComb([(1, Compose(P, L)), (rng.choice([-1, 2]), P)])
            mixed.name = "mixed"
            ops.append((mixed, True))
        elif kind == 3:
            ops.append((RightMul(rng.choice(gens), M, cl), True))
        else:
            xi = rng.choice(ctx.hprobes(1)[1:] or ctx.hprobes(1))
            ops.append((Compose(HopfAct(xi, M), random_matrix(M)), False))
        k += 1
    ctx.cache["operators"] = ops
    return ops


# ---------------------------------------------------------------------------
# Suites


@suite("hopf")
def _hopf(ctx: Context) -> CheckReport:
    """Hopf axioms of the backend on H-probes."""
    H = ctx.model.H
    st = F.corrupt_antipode(H) if "antipode-entry" in ctx.faults else H
    return hopf_check(st, ctx.hprobes(), prefix="hopf")


def _twist(ctx: Context):
    t = ctx.model.twist
    return F.perturb_inverse(t) if "twist-inverse" in ctx.faults else t


@suite("twist")
def _twist_suite(ctx: Context) -> CheckReport:
    """Twist conditions on F and the Hopf axioms of H^F."""
    t = _twist(ctx)
    rep = twist_check(t, prefix="twist")
    with rep.check("twist.deformed") as c:
        try:
            deform_hopf(t)
        except InvalidTwist as exc:
            raise PreconditionFailed(str(exc)) from None
        c.true(True)
    if rep.passed:
        hopf_check(DeformedHopf(t.base, t), ctx.hprobes(), rep, prefix="twist.deformed")
    return rep


@suite("dequantize")
def _dequantize(ctx: Context) -> CheckReport:
    """Twisting H^F by F^-1 recovers H."""
    t = _twist(ctx)
    rep = CheckReport()
    if not twist_check(t).passed:
        with rep.check("dequantize"):
            raise PreconditionFailed("F is not a twist")
        return rep
    return dequantize(DeformedHopf(t.base, t), ctx.hprobes(), rep)


@suite("rmatrix")
def _rmatrix(ctx: Context) -> CheckReport:
    """Triangular structure of H and of H^F (R^F = F_21 R F^-1), including Yang-Baxter."""
    m = ctx.model
    rep = rmatrix_check(m.base_R, ctx.hprobes(), prefix="rmatrix.base",
                        expect_triangular=True)
    return rmatrix_check(m.star.R, ctx.hprobes(), rep, prefix="rmatrix",
                         expect_triangular=m.base_R.triangular)


@suite("modalg", needs=("algebra",))
def _modalg(ctx: Context) -> CheckReport:
    """A is an H-module algebra and every declared module an H-equivariant bimodule."""
    m = ctx.model
    hp = ctx.hprobes()
    rep = module_algebra_check(m.A, hp, ctx.degree)
    for V in m.modules.values():
        bimodule_check(V, hp, ctx.degree, rep)
    return rep


@suite("star", needs=("algebra",))
def _star(ctx: Context) -> CheckReport:
    """Star product and star actions: associativity, unit, covariance, quasi-commutativity."""
    m, s = ctx.model, ctx.s
    hp = ctx.hprobes()
    rep = star_algebra_check(s, m.A, hp, ctx.degree, prefix="star")
    for V in m.modules.values():
        star_bimodule_check(s, V, hp, ctx.degree, rep)
    R = trivial_rmatrix(s.structure) if "quasicomm-trivial-r" in ctx.faults else None
    quasi_commutative_algebra(s, m.A, ctx.degree, R, rep)
    for V in m.modules.values():
        quasi_commutative_bimodule(s, V, ctx.degree, R, rep)
    return rep


@suite("homdef", needs=("algebra", "modules:1"))
def _homdef(ctx: Context) -> CheckReport:
    """D_F on probe operators; adjoint action laws; dual module basis."""
    m, s = ctx.model, ctx.s
    ops = _operators(ctx)
    hp = ctx.hprobes()
    apro = [m.A.basis(k) for k in m.A.probe_keys(1)]
    deformed = F.corrupt_antipode(s.structure) if "adjoint-antipode" in ctx.faults else None
    rep = check_DF_structure(s, ops, ctx.degree, hp, apro, deformed_structure=deformed)
    rep.results[0].note = f"{len(ops)} operators"
    declared = [(h.op, h.right_linear) for h in m.homs.values()] or ops[:2]
    adjoint_check(s, declared, ctx.degree, ctx.hprobes(1), rep)
    for V in m.modules.values():
        dual_module_check(s, V, ctx.degree, rep, prefix=f"homdef.dual.{V.name}")
    return rep


@suite("phi", needs=("algebra", "modules:1"))
def _phi(ctx: Context) -> CheckReport:
    """phi: V* (x)_A* W* -> (V (x)_A W)* is well defined, bijective, A*-linear and equivariant."""
    rep = CheckReport()
    mods = list(ctx.model.modules.values())
    pairs = list(zip(mods, mods[1:])) or [(mods[0], mods[0])]
    for V, W in pairs:
        phi_check(ctx.s, V, W, ctx.degree, ctx.hprobes(1), rep, prefix=f"phi.{V.name}.{W.name}")
    return rep


@suite("calculus", needs=("calculus",))
def _calculus(ctx: Context) -> CheckReport:
    """Classical and deformed differential calculus; graded quasi-commutativity."""
    C = ctx.model.calc
    hp = ctx.hprobes()
    rep = calculus_check(StarCalculus(C, ctx.cl), hp, ctx.degree, prefix="calculus.classical")
    view = StarCalculus(C, ctx.s)
    calculus_check(view, hp, ctx.degree, rep, prefix="calculus")
    graded_quasi_commutative(view, ctx.degree, report=rep, prefix="calculus.quasicomm")
    return rep


@suite("braid.relations", needs=("algebra", "modules:1"))
def _braid(ctx: Context) -> CheckReport:
    """tau_R: hexagon relations, invertibility, H-linearity."""
    s = ctx.s
    if "rmatrix-drop-h2" in ctx.faults:
        s = s.with_rmatrix(F.drop_h2(s.R))
    U, V, W = _modules(ctx, 3)
    return braid_relations_check(s, U, V, W, ctx.degree, ctx.hprobes(1), prefix="braid")


@suite("rtensor", needs=("algebra", "homs"))
def _rtensor(ctx: Context) -> CheckReport:
    """R-tensor product of D_F images: braided form, identity, linearity, covariance."""
    s = ctx.s
    P, Q = _pair(ctx)
    DP, DQ = D_F(s, P), D_F(s, Q)
    pairs = [(DP, DQ, True, _is_equivariant(ctx, DQ, s.structure)),
             (DQ, DP, True, _is_equivariant(ctx, DP, s.structure)),
             (DP, Identity(DQ.dom), True, True)]
    return check_rtensor(s, pairs, ctx.degree, ctx.hprobes(1))


@suite("rtensor.composition", needs=("algebra", "homs"))
def _rtensor_comp(ctx: Context) -> CheckReport:
    """Braided composition law and associativity of the R-tensor product."""
    s = ctx.s
    P, Q = _pair(ctx)
    DP, DQ = D_F(s, P), D_F(s, Q)
    Pt = DP if DP.dom is DP.cod else Identity(DP.cod)
    Qt = DQ if DQ.dom is DQ.cod else Identity(DQ.cod)
    return check_composition_law(s, DP, DQ, Pt, Qt, DP, ctx.degree)


@suite("rtensor.overA", needs=("algebra", "homs"))
def _rtensor_overA(ctx: Context) -> CheckReport:
    """R-tensor product over A*: well defined on the quotient, right-linear, composition."""
    s = ctx.s
    P, Q = _pair(ctx)
    return check_rtensor_over_A(s, [(D_F(s, P), D_F(s, Q))], ctx.degree)


@suite("rtensor.diagram", needs=("algebra", "homs"))
def _rtensor_diagram(ctx: Context) -> CheckReport:
    """D_F intertwines the R-tensor products over K and over A."""
    P, Q = _pair(ctx)
    return check_rtensor_deformation_diagram(ctx.s, P, Q, ctx.degree,
                                             dress="rtensor-undressed" not in ctx.faults)


def _hom_forms(ctx: Context):
    C = ctx.model.calc
    A = C.A

    def forms(V):
        out = {}
        for n, (j, i) in enumerate((j, i) for j in V.labels for i in V.labels):
            var = n % A.n
            out[(j, i)] = C.form((var,), A.var((var + 1) % A.n).scale(n + 1))
        return out
    return forms


@suite("conn.leibniz", needs=("calculus", "modules:1"))
def _conn_leibniz(ctx: Context) -> CheckReport:
    """Right Leibniz rule of declared and sampled connections."""
    return connection_check(ctx.s, _connections(ctx), ctx.model.calc, ctx.degree,
                            parts=("leibniz",))


@suite("conn.dtilde", needs=("calculus", "modules:1"))
def _conn_dtilde(ctx: Context) -> CheckReport:
    """D~_F gives star connections, with exact inverse."""
    return connection_check(ctx.s, _connections(ctx), ctx.model.calc, ctx.degree,
                            parts=("dtilde",))


@suite("conn.affine", needs=("calculus", "modules:1"))
def _conn_affine(ctx: Context) -> CheckReport:
    """Connections form an affine space over Hom_A and D~_F respects it."""
    return connection_check(ctx.s, _connections(ctx), ctx.model.calc, ctx.degree,
                            hom_forms=_hom_forms(ctx), parts=("affine",))


@suite("conn.braidedleibniz", needs=("calculus", "modules:1"))
def _conn_braided(ctx: Context) -> CheckReport:
    """Braided left Leibniz rule for every connection, classical and quantized."""
    s, C = ctx.s, ctx.model.calc
    nablas = _connections(ctx)
    rep = braided_left_leibniz_check(ctx.cl, nablas, C, ctx.degree,
                                     prefix="conn.braidedleibniz.classical")
    quantized = [D_tilde(s, nb) for nb in nablas]
    return braided_left_leibniz_check(s, quantized, C, ctx.degree, rep)


@suite("conn.oplus", needs=("calculus", "modules:2"))
def _conn_oplus(ctx: Context) -> CheckReport:
    """The braided sum is well defined on V (x)_A W and is a connection."""
    s, C = ctx.s, ctx.model.calc
    nV, nW = _named_connections(ctx, "conn.pair", 2)
    rep = oplus_check(ctx.cl, nV, nW, C, ctx.degree, prefix="conn.oplus.classical")
    fault = "swapped-legs" if "tau-swapped-legs" in ctx.faults else None
    return oplus_check(s, D_tilde(s, nV), D_tilde(s, nW), C, ctx.degree, rep, fault=fault)


@suite("conn.oplus.assoc", needs=("calculus", "modules:2"))
def _conn_assoc(ctx: Context) -> CheckReport:
    """Associativity of the braided sum on a triple product."""
    s = ctx.s
    trip = _named_connections(ctx, "conn.triple", 3)
    fault = "first-leg-only" if "tau-first-leg" in ctx.faults else None
    return oplus_associativity_check(s, *(D_tilde(s, nb) for nb in trip), ctx.degree, fault=fault)


@suite("conn.oplus.equivariant", needs=("calculus", "modules:2"))
def _conn_equiv(ctx: Context) -> CheckReport:
    """With an equivariant second connection the braided sum is the plain tensor connection."""
    s = ctx.s
    nV, _ = _named_connections(ctx, "conn.pair", 2)
    W = _modules(ctx, 2)[1]
    dW = trivial_connection(W, ctx.model.calc)
    return equivariant_reduction_check(s, D_tilde(s, nV), D_tilde(s, dW), ctx.degree, ctx.hprobes(1))


@suite("conn.diagram", needs=("calculus", "modules:2"))
def _conn_diagram(ctx: Context) -> CheckReport:
    """D~_F intertwines the braided sums of H and of H^F."""
    s = ctx.s
    nV, nW = _named_connections(ctx, "conn.pair", 2)
    top = F.trivial_braiding(s) if "diagram-top-trivial-r" in ctx.faults else None
    return check_connection_deformation_diagram(s, nV, nW, ctx.degree, top_frame=top)


# ---------------------------------------------------------------------------
# Runner


def select(selectors, names=None) -> list[str]:
    """Suites matching any selector: exact name or dotted prefix."""
    names = list(SUITES) if names is None else names
    out = []
    for sel in selectors:
        hit = [n for n in names if n == sel or n.startswith(sel + ".")]
        if not hit:
            raise ScenarioError(f"unknown suite {sel!r}", source="--suite")
        out.extend(n for n in hit if n not in out)
    return out


def _override(sc: Scenario, name: str, key: str, default: int, minimum: int) -> int:
    sec = sc.section("checks")
    if sec is None:
        return default
    # the most specific matching prefix wins
    parts = name.split(".")
    for n in range(len(parts), 0, -1):
        e = sec.entry(".".join(parts[:n]) + "." + key)
        if e is not None:
            return parse_int(e, minimum)
    return default


def planned(sc: Scenario, suites=None) -> tuple[list[str], bool]:
    """Suites to run and whether they were requested explicitly."""
    if suites:
        return select(suites), True
    sec = sc.section("checks")
    e = sec.entry("suites") if sec is not None else None
    if e is not None:
        items = split_list(e)
        for name, off in items:
            try:
                select([name])
            except ScenarioError:
                raise e.error(f"unknown suite {name!r}", off) from None
        return select([n for n, _ in items]), True
    return list(SUITES), False


def run_checks(sc: Scenario, suites=None, seed: int | None = None, faults=(),
               progress=None) -> CheckReport:
    """Run the selected suites; results are sorted by name."""
    try:
        return _run(sc, suites, seed, faults, progress)
    except ScenarioError as exc:
        if exc.line > 0:
            exc.source = sc.source
        raise


def _run(sc, suites, seed, faults, progress) -> CheckReport:
    seed = sc.seed if seed is None else seed
    names, explicit = planned(sc, suites)
    models: dict = {}
    caches: dict = {}
    report = CheckReport()
    for name in names:
        st = SUITES[name]
        N = _override(sc, name, "truncation", sc.truncation, 0)
        D = _override(sc, name, "probe_degree", sc.probe_degree, 1)
        model = models.get(N)
        if model is None:
            model = models[N] = build(sc, N, faults)
        reason = _missing(model, st.needs)
        if reason is not None:
            if explicit:
                report.results.append(CheckResult(name, SKIPPED, note=reason,
                                                  params={"truncation": N, "probe_degree": D}))
            continue
        ctx = Context(model, D, seed, model.faults, cache=caches.setdefault(N, {}))
        if progress:
            progress(name)
        try:
            part = st.fn(ctx)
        except PreconditionFailed as exc:
            part = CheckReport([CheckResult(name, SKIPPED, note=str(exc))])
        for r in part.results:
            r.params = {"truncation": N, "probe_degree": D}
        report.extend(part)
    out = report.sorted()
    declared = sc.section("faults")
    inject = declared.entry("inject") if declared is not None else None
    names_f = [n for n, _ in split_list(inject)] if inject is not None else []
    out.header = {"scenario": sc.name, "truncation": sc.truncation,
                  "probe_degree": sc.probe_degree, "seed": seed, "suites": names,
                  "faults": list(F.validate(names_f + list(faults), declared))}
    return out
