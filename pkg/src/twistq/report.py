"""Report emitters: a human table and line-delimited JSON records."""

from __future__ import annotations

import json

from .checks import FAIL, PASS, SKIPPED, CheckReport, CheckResult

FORMATS = ("human", "machine")


def summary(report: CheckReport) -> dict:
    counts = {s: sum(r.status == s for r in report.results) for s in (PASS, FAIL, SKIPPED)}
    return {"total": len(report.results), "passed": counts[PASS], "failed": counts[FAIL],
            "skipped": counts[SKIPPED], "status": "fail" if counts[FAIL] else "pass"}


def _check_record(r: CheckResult) -> dict:
    # wall time is left out so that reports are byte-stable
    return {"record": "check", "name": r.name, "status": r.status, "probes": r.probes,
            "witness": r.witness, "note": r.note, "params": r.params}


def emit_machine(report: CheckReport) -> str:
    lines = [dict(report.header, record="header")]
    lines += [_check_record(r) for r in report.results]
    lines.append(dict(summary(report), record="summary"))
    return "".join(json.dumps(x, sort_keys=True, ensure_ascii=False) + "\n" for x in lines)


def parse_machine_report(text: str) -> CheckReport:
    """Inverse of :func:`emit_machine` (wall times come back as zero)."""
    header, results, seen_summary = None, [], False
    for n, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        rec = json.loads(line)
        kind = rec.pop("record", None)
        if kind == "header" and header is None and not results:
            header = rec
        elif kind == "check" and header is not None and not seen_summary:
            results.append(CheckResult(rec["name"], rec["status"], rec["probes"],
                                       rec["witness"], rec["note"], params=rec["params"]))
        elif kind == "summary" and header is not None and not seen_summary:
            seen_summary = True
            out = CheckReport(results, header)
            if rec != summary(out):
                raise ValueError(f"line {n}: summary does not match the check records")
        else:
            raise ValueError(f"line {n}: unexpected {kind!r} record")
    if header is None or not seen_summary:
        raise ValueError("report needs a header and a summary record")
    return CheckReport(results, header)


def _fmt_header(header: dict) -> list[str]:
    out = []
    for k in sorted(header):
        v = header[k]
        if isinstance(v, list):
            v = ", ".join(map(str, v)) or "-"
        out.append(f"{k}: {v}")
    return out


def emit_human(report: CheckReport) -> str:
    lines = _fmt_header(report.header)
    if report.results:
        width = max(len(r.name) for r in report.results)
        width = max(width, len("check"))
        lines.append("")
        lines.append(f"{'check':<{width}}  {'status':<20}  {'probes':>7}  {'N':>2}  {'D':>2}  {'time':>7}")
        lines.append("-" * (width + 48))
        for r in report.results:
            N = r.params.get("truncation", "")
            D = r.params.get("probe_degree", "")
            lines.append(f"{r.name:<{width}}  {r.status:<20}  {r.probes:>7}  {N!s:>2}  {D!s:>2}"
                         f"  {r.seconds:>6.2f}s" + (f"  {r.note}" if r.note else ""))
    for r in report.failures:
        lines.append("")
        lines.append(f"witness for {r.name}:")
        w = r.witness or {}
        for k, v in (w.get("inputs") or {}).items():
            lines.append(f"  input {k} = {v}")
        for k in ("lhs", "rhs", "h_order"):
            if k in w:
                lines.append(f"  {k} = {w[k]}")
    s = summary(report)
    lines.append("")
    lines.append(f"{s['passed']} passed, {s['failed']} failed, {s['skipped']} skipped"
                 f" of {s['total']} checks")
    return "\n".join(lines) + "\n"


def emit_report(report: CheckReport, fmt: str = "human") -> str:
    if fmt == "machine":
        return emit_machine(report)
    if fmt == "human":
        return emit_human(report)
    raise ValueError(f"unknown report format {fmt!r}")
