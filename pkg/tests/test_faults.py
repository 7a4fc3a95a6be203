import pytest

from twistq.checks import FAIL
from twistq.faults import FAULTS
from twistq.scenario import load_scenario, shipped
from twistq.suite import run_checks

# klein is cheap; the rest need polynomial data or connections
SCENARIO = {"antipode-entry": "klein", "twist-inverse": "klein", "adjoint-antipode": "klein"}


@pytest.fixture(scope="module")
def scenarios():
    return {n: load_scenario(shipped(n)) for n in ("klein", "moyal2d")}


@pytest.mark.parametrize("fault", list(FAULTS))
def test_fault_breaks_its_target(scenarios, fault):
    target = FAULTS[fault][0]
    sc = scenarios[SCENARIO.get(fault, "moyal2d")]
    clean = run_checks(sc, [target])
    assert clean.passed, [r.name for r in clean.failures]
    bad = run_checks(sc, [target], faults=[fault])
    failed = [r for r in bad.results if r.status == FAIL]
    assert failed, fault
    assert all(r.name == target or r.name.startswith(target + ".") for r in failed)
    assert bad.header["faults"] == [fault]
    for r in failed:
        assert "h_order" in r.witness


def test_faults_are_deduplicated(scenarios):
    r = run_checks(scenarios["klein"], ["hopf"], faults=["antipode-entry", "antipode-entry"])
    assert r.header["faults"] == ["antipode-entry"]
