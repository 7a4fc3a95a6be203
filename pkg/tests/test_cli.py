import json

import pytest

from twistq.checks import FAIL, CheckReport, CheckResult
from twistq.cli import ENV_SUITES, main
from twistq.faults import FAULTS
from twistq.report import emit_human, emit_machine, parse_machine_report, summary
from twistq.suite import SUITES


def run(capsys, *argv):
    rc = main(list(argv))
    out, err = capsys.readouterr()
    return rc, out, err


def test_pass_exit_zero(capsys, monkeypatch):
    monkeypatch.delenv(ENV_SUITES, raising=False)
    rc, out, _ = run(capsys, "check", "klein", "--suite", "hopf,twist")
    assert rc == 0
    assert out.rstrip().endswith("0 failed, 0 skipped of %d checks" % out.count(" pass "))
    assert "scenario: klein" in out


def test_fault_exit_one_with_witness(capsys):
    rc, out, _ = run(capsys, "check", "klein", "--suite", "hopf", "--fault", "antipode-entry")
    assert rc == 1
    assert "witness for hopf." in out
    assert "h_order = 0" in out


@pytest.mark.parametrize("argv, fragment", [
    (["check", "/no/such/file.scn"], "cannot read scenario"),
    (["check", "klein", "--suite", "bogus"], "--suite: unknown suite 'bogus'"),
    (["check", "klein", "--fault", "bogus"], "--fault: unknown fault 'bogus'"),
])
def test_usage_errors_exit_two(capsys, argv, fragment):
    rc, out, err = run(capsys, *argv)
    assert rc == 2
    assert out == ""
    assert err.startswith("error: ") and fragment in err


def test_bad_format_exits_two(capsys):
    with pytest.raises(SystemExit) as info:
        main(["check", "klein", "--format", "xml"])
    assert info.value.code == 2


def test_env_suites_selected_and_echoed(capsys, monkeypatch):
    monkeypatch.setenv(ENV_SUITES, "hopf")
    rc, out, _ = run(capsys, "check", "klein", "--format", "machine")
    assert rc == 0
    recs = [json.loads(l) for l in out.splitlines()]
    assert recs[0][ENV_SUITES] == "hopf"
    assert all(r["name"].startswith("hopf.") for r in recs[1:-1])


def test_flag_beats_env(capsys, monkeypatch):
    monkeypatch.setenv(ENV_SUITES, "hopf")
    rc, out, _ = run(capsys, "check", "klein", "--suite", "twist", "--format", "machine")
    recs = [json.loads(l) for l in out.splitlines()]
    assert all(r["name"].startswith("twist.") for r in recs[1:-1])
    assert recs[0][ENV_SUITES] == "hopf"


def test_machine_round_trip(capsys, monkeypatch):
    monkeypatch.delenv(ENV_SUITES, raising=False)
    rc, out, _ = run(capsys, "check", "klein", "--suite", "hopf,phi", "--format", "machine",
                     "--fault", "antipode-entry")
    report = parse_machine_report(out)
    assert emit_machine(report) == out
    assert summary(report)["failed"] > 0


def test_listings(capsys):
    rc, out, _ = run(capsys, "suites")
    assert rc == 0 and out.split() == list(SUITES)
    rc, out, _ = run(capsys, "faults")
    assert rc == 0 and [l.split()[0] for l in out.splitlines()] == list(FAULTS)


def test_progress_goes_to_stderr(capsys):
    rc, out, err = run(capsys, "check", "klein", "--suite", "hopf", "--progress")
    assert "running hopf" in err and "running" not in out


def test_empty_report():
    r = CheckReport([], {"scenario": "x"})
    text = emit_machine(r)
    assert [json.loads(l)["record"] for l in text.splitlines()] == ["header", "summary"]
    assert parse_machine_report(text).results == []
    assert emit_human(r).endswith("0 passed, 0 failed, 0 skipped of 0 checks\n")


def test_parse_rejects_tampering():
    r = CheckReport([CheckResult("a", FAIL, 3, {"inputs": {"a": "x1"}, "h_order": 1}, "")],
                    {"scenario": "x"})
    lines = emit_machine(r).splitlines()
    with pytest.raises(ValueError, match="summary"):
        parse_machine_report("\n".join([lines[0], lines[2]]))
    with pytest.raises(ValueError, match="unexpected"):
        parse_machine_report("\n".join([lines[1], lines[0], lines[2]]))
    with pytest.raises(ValueError, match="header and a summary"):
        parse_machine_report(lines[0])


def test_human_witness_block():
    w = {"inputs": {"a": "x1", "b": "x2"}, "lhs": "x1*x2", "rhs": "x1*x2 + h", "h_order": 1}
    text = emit_human(CheckReport([CheckResult("star.quasicomm", FAIL, 5, w, "")], {}))
    assert "witness for star.quasicomm:\n  input a = x1\n  input b = x2\n" in text
    assert "  h_order = 1\n" in text
