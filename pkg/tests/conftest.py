from types import SimpleNamespace

import pytest

from twistq.calculus import DiffCalculus, deform_calculus
from twistq.homdef import classical_frame
from twistq.hopf import AbelianPBW, klein_group
from twistq.modalg import FinFunAlgebra, FreeBimodule, PolyAlgebra, StarStructure
from twistq.scalars import ScalarRing
from twistq.twist import bicharacter_twist, deform_hopf, exponential_twist


def moyal(order):
    K = ScalarRing(order)
    H = AbelianPBW(K, ["X1", "X2"])
    A = PolyAlgebra(H, ["x1", "x2"])
    t = exponential_twist(H, 0, 1)
    s = StarStructure.deformed(t)
    calc = DiffCalculus(A)
    V = FreeBimodule.from_matrices(A, ["e1", "e2"], {0: [[0, 1], [0, 0]]}, name="V")
    W = FreeBimodule.from_matrices(A, ["f1", "f2"], {1: [[1, 0], [0, -1]]}, name="W")
    Z = FreeBimodule.from_matrices(A, ["g1"], {1: [[2]]}, name="Z")
    return SimpleNamespace(K=K, H=H, A=A, t=t, s=s, cl=classical_frame(s), calc=calc,
                           star_calc=deform_calculus(calc, s), V=V, W=W, Z=Z,
                           x1=A.var(0), x2=A.var(1), X1=H.gen(0), X2=H.gen(1),
                           hopf=deform_hopf(t))


@pytest.fixture(scope="session")
def m2():
    return moyal(2)


@pytest.fixture(scope="session")
def m3():
    return moyal(3)


@pytest.fixture(scope="session")
def klein():
    K = ScalarRing(1)
    G = klein_group(K)
    t = bicharacter_twist(G, "a", "b")
    s = StarStructure.deformed(t)
    A = FinFunAlgebra(G)
    V = FreeBimodule.from_representation(
        A, ["v1", "v2"],
        {"a": [[0, 1], [1, 0]], "b": [[-1, 0], [0, -1]], "c": [[0, -1], [-1, 0]]}, name="V")
    return SimpleNamespace(K=K, G=G, t=t, s=s, cl=classical_frame(s), A=A, V=V,
                           hopf=deform_hopf(t), d=A.delta)


# one line per acceptance criterion, taken from the real test outcome
_CRITERIA = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    n = getattr(item.function, "criterion", None)
    if n is None:
        return
    doc = (item.function.__doc__ or "").strip().splitlines()[0]
    if rep.when == "call" or rep.failed:
        prev = _CRITERIA.get(n, ("passed", doc))[0]
        status = "failed" if rep.failed or prev == "failed" else ("skipped" if rep.skipped else "passed")
        _CRITERIA[n] = (status, doc)


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_CRITERIA):
        status, doc = _CRITERIA[n]
        terminalreporter.write_line(f"criterion {n}: {'PASS' if status == 'passed' else 'FAIL'}  {doc}")
