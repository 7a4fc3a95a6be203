"""Build the algebraic objects described by a scenario at a given truncation order."""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction

from .calculus import DiffCalculus
from .connection import Connection, random_connection, trivial_connection
from .homdef import (BasisMatrix, Compose, HopfAct, Identity, LeftMul, LinComb, Op,
                     RightMul, FunctionOp, classical_frame)
from .hopf import AbelianPBW, FiniteDimHopf, HopfAlgebra, TensorPower, klein_group
from .linear import Element, Space
from .literals import ElementEvaluator, LiteralError, module_names, parse
from .modalg import (FinFunAlgebra, FreeBimodule, IncompatibleAction, PolyAlgebra,
                     StarStructure)
from .scalars import Scalar, ScalarRing
from .scenario import Entry, Scenario, ScenarioError, Section, parse_int, split_list
from .twist import (InvalidTwist, RMatrix, Twist, bicharacter_twist, exp_tensor,
                    make_twist, r_matrix_from_twist, tensor_inverse, trivial_rmatrix,
                    trivial_twist, twist_check)

_ALLOWED = {
    "scenario": {"name", "truncation", "probe_degree", "seed"},
    "hopf.abelian": {"generators"},
    "hopf.finite": {"group", "basis", "unit", "row.*", "mul.*", "coproduct.*", "counit.*", "antipode.*"},
    "algebra": {"kind", "variables"},
    "calculus": {"variables"},
    "twist": {"F", "F_inv"},
    "rmatrix": {"R", "R_inv", "RF"},
    "bimodule": {"basis", "*"},
    "hom": {"domain", "codomain", "matrix", "expr"},
    "connection": {"module", "omega"},
    "checks": {"suites", "connections", "operators", "rtensor.pair", "conn.pair", "conn.triple", "*.truncation",
               "*.probe_degree"},
    "faults": {"inject"},
}


def _check_keys(sec: Section) -> None:
    allowed = _ALLOWED.get(sec.kind)
    if allowed is None:
        return
    for key, e in sec.entries.items():
        ok = key in allowed or "*" in allowed
        ok = ok or any(a.endswith(".*") and key.startswith(a[:-1]) for a in allowed)
        ok = ok or any(a.startswith("*.") and key.endswith(a[1:]) for a in allowed)
        if not ok:
            raise ScenarioError(f"unknown key '{key}' in [{sec.name}]", e.line, e.col - len(key) - 3
                                if e.col > len(key) + 3 else 1)


@dataclass
class HomDecl:
    op: Op
    right_linear: bool


@dataclass
class Model:
    """Everything a check suite needs, built at one truncation order."""

    scenario: Scenario
    ring: ScalarRing
    H: HopfAlgebra
    A: object = None
    calc: DiffCalculus | None = None
    twist: Twist | None = None
    base_R: RMatrix | None = None
    star: StarStructure | None = None
    classical: StarStructure | None = None
    modules: dict = field(default_factory=dict)
    homs: dict = field(default_factory=dict)
    connections: dict = field(default_factory=dict)
    env: dict = field(default_factory=dict)
    faults: tuple = ()

    @property
    def order(self) -> int:
        return self.ring.order

    def evaluator(self) -> ElementEvaluator:
        return ElementEvaluator(self.ring, self.env, wedge=self.calc.wedge if self.calc else None,
                                functions={"exp": exp_tensor})

    def hprobes(self, degree: int) -> list[Element]:
        return self.H.probes(degree)


# ---------------------------------------------------------------------------
# Literal helpers


def literal(model_or_ev, e: Entry, text: str | None = None, offset: int = 0):
    ev = model_or_ev.evaluator() if isinstance(model_or_ev, Model) else model_or_ev
    text = e.value if text is None else text
    try:
        return ev.eval(parse(text))
    except LiteralError as exc:
        raise e.error(exc.message, offset + exc.col) from None


def _names(e: Entry) -> list[str]:
    out = []
    for item, off in split_list(e):
        if not item.replace("_", "a").isalnum() or item[0].isdigit():
            raise e.error(f"bad name {item!r}", off)
        out.append(item)
    return out


def _element_in(value, space, e: Entry, what: str, offset: int = 0) -> Element:
    """Coerce a literal value (number or element) into ``space``."""
    if isinstance(value, (Fraction, Scalar)):
        if not hasattr(space, "one"):
            if value == 0:
                return space.zero()
            raise e.error(f"{what}: a number is not an element of {space.name}", offset)
        c = space.ring(value) if isinstance(value, Fraction) else value
        return space.one().scale(c)
    if isinstance(value, Element) and value.space is space:
        return value
    got = value.space.name if isinstance(value, Element) else type(value).__name__
    raise e.error(f"{what}: expected an element of {space.name}, got {got}", offset)


def _matrix(model: Model, e: Entry, rows: int, cols: int, space, what: str):
    value = literal(model, e)
    if not isinstance(value, list) or len(value) != rows or any(
            not isinstance(r, list) or len(r) != cols for r in value):
        raise e.error(f"{what} must be a {rows}x{cols} matrix")
    return [[_element_in(x, space, e, what) for x in row] for row in value]


# ---------------------------------------------------------------------------
# Hopf algebra


def _build_hopf(sc: Scenario, ring: ScalarRing) -> HopfAlgebra:
    ab, fin = sc.section("hopf.abelian"), sc.section("hopf.finite")
    if (ab is None) == (fin is None):
        sec = ab or fin or sc.section("scenario")
        raise sec.error("declare exactly one of [hopf.abelian] and [hopf.finite]")
    if ab is not None:
        gens = _names(ab.require("generators"))
        return AbelianPBW(ring, gens)
    g = fin.entry("group")
    if g is not None:
        if g.value != "klein":
            raise g.error(f"unknown group {g.value!r}")
        return klein_group(ring)
    labels = _names(fin.require("basis"))
    rows = {k[4:]: e for k, e in fin.entries.items() if k.startswith("row.")}
    if rows:
        table = {}
        for a in labels:
            e = rows.get(a)
            if e is None:
                raise fin.error(f"missing row.{a}")
            row = _names(e)
            if len(row) != len(labels) or any(x not in labels for x in row):
                raise e.error(f"row.{a} must list {len(labels)} basis labels")
            table[a] = dict(zip(labels, row))
        try:
            return FiniteDimHopf.group_algebra(ring, labels, table, name="K[G]")
        except ValueError as exc:
            raise fin.error(str(exc)) from None
    return _build_tables(fin, ring, labels)


def _rational_terms(value, e: Entry, what: str) -> dict:
    terms = value.terms if isinstance(value, Element) else ({} if value == 0 else None)
    if terms is None:
        raise e.error(f"{what} must be a combination of basis elements")
    out = {}
    for k, c in terms.items():
        if not c.is_constant():
            raise e.error(f"{what} must not depend on h")
        out[k] = c.coeffs[0]
    return out


def _build_tables(fin: Section, ring: ScalarRing, labels) -> FiniteDimHopf:
    """General structure-constant tables; literals are linear combinations of labels."""
    shell = FiniteDimHopf(ring, labels, {}, {}, {}, {}, {}, name="H")
    ev = ElementEvaluator(ring, {l: shell.basis(l) for l in labels})

    def get(key, what):
        e = fin.entry(key)
        if e is None:
            raise fin.error(f"missing {key}")
        return _rational_terms(literal(ev, e), e, what)

    mul = {(a, b): get(f"mul.{a}.{b}", "product") for a in labels for b in labels}
    unit = get("unit", "unit")
    coproduct = {a: get(f"coproduct.{a}", "coproduct") for a in labels}
    antipode = {a: get(f"antipode.{a}", "antipode") for a in labels}
    counit = {}
    for a in labels:
        e = fin.entry(f"counit.{a}")
        if e is None:
            raise fin.error(f"missing counit.{a}")
        v = literal(ev, e)
        if not isinstance(v, Fraction):
            raise e.error("counit must be a rational number")
        counit[a] = v
    return FiniteDimHopf(ring, labels, mul, unit, coproduct, counit, antipode, name="H")


# ---------------------------------------------------------------------------
# Build


def _add_names(env: dict, names: dict, e: Entry | Section) -> None:
    for k, v in names.items():
        if k in env or k == "h" or k == "o":
            raise e.error(f"name {k!r} is already in use")
        env[k] = v


def build(sc: Scenario, truncation: int | None = None, faults=None) -> Model:
    for sec in sc.sections.values():
        _check_keys(sec)
    order = sc.truncation if truncation is None else truncation
    ring = ScalarRing(order)
    H = _build_hopf(sc, ring)
    model = Model(sc, ring, H)
    env = model.env
    if isinstance(H, AbelianPBW):
        _add_names(env, {g: H.gen(i) for i, g in enumerate(H.generators)}, sc.section("hopf.abelian"))
    else:
        _add_names(env, {l: H.basis(l) for l in H.labels}, sc.section("hopf.finite"))

    params = sc.section("params")
    if params is not None:
        for key, e in params.entries.items():
            v = literal(model, e)
            if not isinstance(v, (Fraction, Scalar)):
                raise e.error(f"parameter {key} must be a number")
            _add_names(env, {key: v}, e)

    _build_algebra(model)
    _build_calculus(model)
    _build_twist(model)
    _build_modules(model)
    _build_homs(model)
    _build_connections(model)
    fsec = sc.section("faults")
    declared = []
    if fsec is not None and fsec.entry("inject") is not None:
        declared = [n for n, _ in split_list(fsec.entry("inject"))]
    from .faults import validate
    model.faults = validate(tuple(declared) + tuple(faults or ()), fsec)
    return model


def _build_algebra(model: Model) -> None:
    sec = model.scenario.section("algebra")
    if sec is None:
        return
    kind = sec.get("kind", "polynomial")
    H = model.H
    try:
        if kind == "polynomial":
            A = PolyAlgebra(H, _names(sec.require("variables")))
        elif kind == "functions":
            A = FinFunAlgebra(H)
        else:
            raise sec.require("kind").error(f"unknown algebra kind {kind!r}")
    except IncompatibleAction as exc:
        raise sec.error(str(exc)) from None
    model.A = A
    _add_names(model.env, module_names(A), sec)


def _build_calculus(model: Model) -> None:
    sec = model.scenario.section("calculus")
    if sec is None:
        return
    if not isinstance(model.A, PolyAlgebra):
        raise sec.error("a calculus needs a polynomial [algebra]")
    e = sec.require("variables")
    n = parse_int(e, 1)
    if n != model.A.n:
        raise e.error(f"calculus has {n} variables, the algebra has {model.A.n}")
    C = model.calc = DiffCalculus(model.A)
    _add_names(model.env, {f"d{v}": C.dx(i) for i, v in enumerate(model.A.variables)}, sec)


def _build_twist(model: Model) -> None:
    sc = model.scenario
    H = model.H
    sec = sc.section("twist")
    ev = model.evaluator()

    def bichar(a, b):
        keys = []
        for x in (a, b):
            if not isinstance(x, Element) or x.space is not H or len(x.terms) != 1:
                raise ValueError("arguments must be basis elements")
            keys.append(next(iter(x.terms)))
        if not isinstance(H, FiniteDimHopf) or H.group is None:
            raise ValueError("bicharacter twists need a group algebra")
        return bicharacter_twist(H, *keys)

    ev.functions["bicharacter"] = bichar
    if sec is None or sec.get("F", "trivial") == "trivial":
        t = trivial_twist(H)
    else:
        e = sec.require("F")
        v = literal(ev, e)
        if isinstance(v, Twist):
            t = v
        else:
            F = _element_in(v, H.tensor_space(2), e, "F")
            ei = sec.entry("F_inv")
            try:
                if ei is not None:
                    t = make_twist(F, _element_in(literal(ev, ei), H.tensor_space(2), ei, "F_inv"))
                else:
                    t = make_twist(F)
            except InvalidTwist as exc:
                raise e.error(str(exc)) from None
    model.twist = t
    rsec = sc.section("rmatrix")
    base_R = trivial_rmatrix(H)
    if rsec is not None and rsec.get("R", "trivial") != "trivial":
        e = rsec.require("R")
        R = _element_in(literal(ev, e), H.tensor_space(2), e, "R")
        ei = rsec.entry("R_inv")
        try:
            Ri = (_element_in(literal(ev, ei), H.tensor_space(2), ei, "R_inv")
                  if ei is not None else tensor_inverse(R))
        except InvalidTwist as exc:
            raise e.error(str(exc)) from None
        base_R = RMatrix(R, Ri, H)
    model.base_R = base_R
    s = StarStructure.deformed(t, base_R)
    if rsec is not None and rsec.get("RF", "from_twist") != "from_twist":
        e = rsec.require("RF")
        if e.value == "trivial":
            s = s.with_rmatrix(trivial_rmatrix(s.structure))
        else:
            R = _element_in(literal(ev, e), H.tensor_space(2), e, "RF")
            try:
                s = s.with_rmatrix(RMatrix(R, tensor_inverse(R), s.structure))
            except InvalidTwist as exc:
                raise e.error(str(exc)) from None
    model.star = s
    model.classical = classical_frame(s)


def _rules(model: Model, sec: Section, labels, key: str, e: Entry):
    """``src -> combination, ...`` to a matrix ``M[j][i]`` (``e_i -> sum_j e_j M[j][i]``)."""
    shell = Space(model.ring, sec.label)
    ev = ElementEvaluator(model.ring, {l: shell.basis(l) for l in labels})
    n = len(labels)
    M = [[Fraction(0)] * n for _ in range(n)]
    if e.value == "0":
        return M
    for item, off in split_list(e):
        src, arrow, rhs = item.partition("->")
        src = src.strip()
        if not arrow:
            raise e.error("rule must read 'label -> combination'", off)
        if src not in labels:
            raise e.error(f"{src!r} is not a basis label of {sec.label}", off)
        i = labels.index(src)
        rhs_off = off + item.index("->") + 2
        rhs_off += len(rhs) - len(rhs.lstrip())
        v = literal(ev, e, rhs.strip(), rhs_off)
        for lab, c in _rational_terms(v, e, f"image of {src}").items():
            M[labels.index(lab)][i] += c
    return M


def _build_modules(model: Model) -> None:
    A, H = model.A, model.H
    for sec in model.scenario.prefixed("bimodule"):
        if A is None:
            raise sec.error("bimodules need an [algebra]")
        labels = _names(sec.require("basis"))
        actions = {k: e for k, e in sec.entries.items() if k != "basis"}
        for k, e in actions.items():
            if k not in (H.generators if isinstance(H, AbelianPBW) else H.labels):
                raise e.error(f"{k!r} is not a Hopf generator")
        try:
            if isinstance(H, AbelianPBW):
                mats = {H.generators.index(k): _rules(model, sec, labels, k, e)
                        for k, e in actions.items()}
                V = FreeBimodule.from_matrices(A, labels, mats, name=sec.label)
            else:
                ident = [[Fraction(int(i == j)) for j in range(len(labels))] for i in range(len(labels))]
                rep = {g: _rules(model, sec, labels, g, actions[g]) if g in actions else ident
                       for g in H.labels}
                V = FreeBimodule.from_representation(A, labels, rep, name=sec.label)
        except IncompatibleAction as exc:
            raise sec.error(f"[{sec.name}]: {exc}") from None
        if sec.label in model.modules:
            raise sec.error(f"module name {sec.label!r} is already in use")
        model.modules[sec.label] = V
        _add_names(model.env, {l: V.vec(l) for l in labels}, sec)


def module_by_name(model: Model, name: str, e: Entry, offset: int = 0):
    if name in model.modules:
        return model.modules[name]
    if name == "A" and model.A is not None:
        return model.A.regular()
    if name == "Omega" and model.calc is not None:
        return model.calc.omega
    raise e.error(f"unknown module {name!r}", offset)


def _build_homs(model: Model) -> None:
    for sec in model.scenario.prefixed("hom"):
        de = sec.require("domain")
        dom = module_by_name(model, de.value, de)
        ce = sec.entry("codomain")
        cod = module_by_name(model, ce.value, ce) if ce is not None else dom
        me, xe = sec.entry("matrix"), sec.entry("expr")
        if (me is None) == (xe is None):
            raise sec.error(f"[{sec.name}] needs exactly one of 'matrix' and 'expr'")
        if me is not None:
            rows = _matrix(model, me, len(cod.labels), len(dom.labels), model.A, "matrix entry")
            matrix = {(j, i): rows[r][c] for r, j in enumerate(cod.labels)
                      for c, i in enumerate(dom.labels) if rows[r][c]}
            decl = HomDecl(BasisMatrix(dom, cod, matrix), True)
        else:
            decl = _op_expr(model, xe, dom)
            if decl.op.cod is not cod:
                raise xe.error(f"expression maps into {decl.op.cod.name}, not {cod.name}")
        decl.op.name = sec.label
        model.homs[sec.label] = decl


def _op_expr(model: Model, e: Entry, dom) -> HomDecl:
    """Operator expressions: ``lmul(a)``, ``rmul(a)``, ``act(xi)``, ``d``, ``id``, hom names,
    combined with ``o``, ``+``, ``-`` and scalar factors."""
    ev = model.evaluator()
    cl = model.classical

    def on(node, space):
        kind, col = node[0], node[1]
        try:
            if kind == "name":
                name = node[2]
                if name == "id":
                    return HomDecl(Identity(space), True)
                if name == "d":
                    if model.calc is None or space is not model.calc.omega:
                        raise LiteralError("'d' acts on Omega", col)
                    C = model.calc
                    return HomDecl(FunctionOp(space, space, C.d, "d"), False)
                if name in model.homs:
                    h = model.homs[name]
                    if h.op.dom is not space:
                        raise LiteralError(f"{name} is not defined on {space.name}", col)
                    return h
                raise LiteralError(f"unknown operator {name!r}", col)
            if kind == "call":
                fname, args = node[2], node[3]
                if len(args) != 1:
                    raise LiteralError(f"{fname} takes one argument", col)
                if fname in ("lmul", "rmul"):
                    a = _element_in(ev.eval(args[0]), model.A, e, fname, args[0][1])
                    if fname == "lmul":
                        return HomDecl(LeftMul(a, space, cl), True)
                    return HomDecl(RightMul(a, space, cl), True)
                if fname == "act":
                    xi = _element_in(ev.eval(args[0]), model.H, e, "act", args[0][1])
                    return HomDecl(HopfAct(xi, space), False)
                raise LiteralError(f"unknown operator {fname!r}", col)
            if kind == "neg":
                inner = on(node[2], space)
                return HomDecl(LinComb([(model.ring(-1), inner.op)]), inner.right_linear)
            if kind == "bin":
                op = node[2]
                if op == "o":
                    right = on(node[4], space)
                    left = on(node[3], right.op.cod)
                    return HomDecl(Compose(left.op, right.op), left.right_linear and right.right_linear)
                if op in ("+", "-"):
                    a, b = on(node[3], space), on(node[4], space)
                    if a.op.cod is not b.op.cod:
                        raise LiteralError("sum of operators with different codomains", col)
                    sign = model.ring(1 if op == "+" else -1)
                    return HomDecl(LinComb([(model.ring.one, a.op), (sign, b.op)]),
                                   a.right_linear and b.right_linear)
                if op == "*":
                    c = ev.eval(node[3])
                    if not isinstance(c, (Fraction, Scalar)):
                        raise LiteralError("operators can only be scaled by numbers", col)
                    inner = on(node[4], space)
                    c = model.ring(c) if isinstance(c, Fraction) else c
                    return HomDecl(LinComb([(c, inner.op)]), inner.right_linear)
            raise LiteralError("not an operator expression", col)
        except LiteralError as exc:
            raise e.error(exc.message, exc.col) from None

    try:
        tree = parse(e.value)
    except LiteralError as exc:
        raise e.error(exc.message, exc.col) from None
    return on(tree, dom)


def _build_connections(model: Model) -> None:
    for sec in model.scenario.prefixed("connection"):
        if model.calc is None:
            raise sec.error("connections need a [calculus]")
        me = sec.require("module")
        V = module_by_name(model, me.value, me)
        if not isinstance(V, FreeBimodule) or V is model.calc.omega:
            raise me.error("connections live on declared bimodules")
        oe = sec.entry("omega")
        if oe is None or oe.value == "0":
            nb = trivial_connection(V, model.calc)
        else:
            n = len(V.labels)
            rows = _matrix(model, oe, n, n, model.calc.omega, "connection coefficient")
            omega = {(j, i): rows[r][c] for r, j in enumerate(V.labels)
                     for c, i in enumerate(V.labels) if rows[r][c]}
            try:
                nb = Connection(V, model.calc, omega)
            except TypeError as exc:
                raise oe.error(str(exc)) from None
        nb.name = sec.label
        model.connections[sec.label] = nb


def sampled_connections(model: Model, count: int, seed: int) -> list[Connection]:
    """``count`` seeded random connections, cycling over the declared modules."""
    rng = random.Random(seed)
    mods = list(model.modules.values())
    return [random_connection(mods[k % len(mods)], model.calc, rng, name=f"sample{k}")
            for k in range(count)]
