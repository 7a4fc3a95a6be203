"""Acceptance criteria 1 to 7, one test each; the run ends with one PASS/FAIL line per criterion."""

import time

import pytest

from twistq.checks import FAIL, PASS
from twistq.homdef import BasisMatrix, LeftMul, LinComb
from twistq.model import build
from twistq.report import emit_machine
from twistq.scenario import load_scenario, shipped
from twistq.suite import Context, _connections, _operators, run_checks


def criterion(n):
    def deco(fn):
        fn.criterion = n
        return fn
    return deco


@pytest.fixture(scope="module")
def moyal():
    return load_scenario(shipped("moyal2d"))


@pytest.fixture(scope="module")
def klein():
    return load_scenario(shipped("klein"))


@pytest.fixture(scope="module")
def full(moyal):
    """The full moyal2d run, shared by criteria 2 to 7."""
    return run_checks(moyal)


def pick(report, *prefixes):
    return [r for r in report.results if any(r.name == p or r.name.startswith(p + ".") for p in prefixes)]


def all_pass(results):
    assert results
    bad = [(r.name, r.status, r.witness) for r in results if r.status != PASS]
    assert not bad, bad


def localized_failure(report, prefix):
    failed = [r for r in pick(report, prefix) if r.status == FAIL]
    assert failed, f"no failure under {prefix}"
    for r in failed:
        w = r.witness
        assert w["inputs"] and "lhs" in w and "rhs" in w
    return failed


@criterion(1)
def test_criterion_1_hopf_and_twist(moyal, klein):
    """Hopf and twist suites pass on moyal2d and klein in under 60 s"""
    start = time.perf_counter()
    suites = ["hopf", "twist", "dequantize", "rmatrix"]
    m = run_checks(moyal, suites)
    k = run_checks(klein, suites)
    elapsed = time.perf_counter() - start
    for rep in (m, k):
        all_pass(rep.results)
        names = {r.name for r in rep.results}
        assert {"hopf.antipode", "twist.cocycle", "twist.deformed.antipode", "dequantize.coproduct",
                "rmatrix.yang_baxter", "rmatrix.triangular"} <= names
    assert (m.header["truncation"], m.header["probe_degree"]) == (3, 4)
    assert elapsed < 60, elapsed


@criterion(2)
def test_criterion_2_star_structures(full, moyal):
    """Star associativity and quasi-commutativity pass; trivial R fails at order h"""
    all_pass(pick(full, "star"))
    names = {r.name for r in pick(full, "star")}
    assert {"star.assoc", "star.covariance", "star.quasicomm.A", "star.quasicomm.V",
            "star.quasicomm.W"} <= names
    bad = run_checks(moyal, ["star"], faults=["quasicomm-trivial-r"])
    failed = localized_failure(bad, "star.quasicomm.A")
    assert min(r.witness["h_order"] for r in failed) == 1


@criterion(3)
def test_criterion_3_quantization_map(full, moyal):
    """D_F passes on at least 20 probe operators of all three kinds"""
    homdef = pick(full, "homdef")
    all_pass(homdef)
    names = {r.name for r in homdef}
    assert {"homdef.composition", "homdef.bimodule", "homdef.equivariance", "homdef.rightlinear",
            "homdef.roundtrip"} <= names
    model = build(moyal, 3)
    ops = [op for op, _ in _operators(Context(model, 2, moyal.seed, ()))]
    assert len(ops) >= 20
    assert any(isinstance(op, BasisMatrix) for op in ops)
    assert any(isinstance(op, LeftMul) for op in ops)
    assert any(isinstance(op, LinComb) for op in ops)
    comp = next(r for r in homdef if r.name == "homdef.composition")
    assert int(comp.note.split()[0]) >= 20


@criterion(4)
def test_criterion_4_phi_and_calculus(full):
    """phi well-defined on at least 50 relation probes and the deformed calculus passes"""
    all_pass(pick(full, "phi", "calculus"))
    welldef = [r for r in pick(full, "phi") if r.name.endswith(".welldefined")]
    assert max(r.probes for r in welldef) >= 50
    names = {r.name for r in pick(full, "calculus")}
    assert {"calculus.dd", "calculus.leibniz", "calculus.covariance", "calculus.quasicomm"} <= names


@criterion(5)
def test_criterion_5_connections(full, moyal):
    """Connection suite passes on at least 10 sampled connections"""
    conn = pick(full, "conn")
    all_pass(conn)
    names = {r.name for r in conn}
    assert {"conn.leibniz", "conn.dtilde.leibniz", "conn.dtilde.roundtrip", "conn.braidedleibniz",
            "conn.oplus.welldefined", "conn.oplus.leibniz", "conn.oplus.assoc",
            "conn.oplus.equivariant"} <= names
    model = build(moyal, 3)
    pool = _connections(Context(model, 2, moyal.seed, ()))
    sampled = [nb for nb in pool if nb not in model.connections.values()]
    assert len(sampled) >= 10
    for name in ("conn.leibniz", "conn.braidedleibniz"):
        r = next(r for r in conn if r.name == name)
        assert int(r.note.split()[0]) == len(pool)


@criterion(6)
def test_criterion_6_diagrams(full, moyal):
    """Both deformation squares commute at N = 2 and fail with witnesses under faults"""
    squares = pick(full, "rtensor.diagram", "conn.diagram")
    all_pass(squares)
    assert {r.name for r in squares} >= {"rtensor.diagram.K", "rtensor.diagram.A", "conn.diagram"}
    assert all(r.params["truncation"] == 2 for r in squares)
    bad = run_checks(moyal, ["rtensor.diagram"], faults=["rtensor-undressed"])
    assert {r.name for r in localized_failure(bad, "rtensor.diagram")} == {"rtensor.diagram.K",
                                                                          "rtensor.diagram.A"}
    bad = run_checks(moyal, ["conn.diagram"], faults=["diagram-top-trivial-r"])
    localized_failure(bad, "conn.diagram")


@criterion(7)
def test_criterion_7_determinism(full, moyal):
    """Two full runs with the same seed give byte-identical machine reports"""
    again = run_checks(load_scenario(shipped("moyal2d")), seed=moyal.seed)
    assert emit_machine(full) == emit_machine(again)
    assert full.passed
