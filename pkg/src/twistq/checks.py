"""Check results and the per-property comparison recorder."""

from __future__ import annotations

import time
from contextlib import contextmanager
from dataclasses import dataclass, field

from .linear import Element
from .scalars import Scalar

PASS, FAIL, SKIPPED = "pass", "fail", "skipped-precondition"


class PreconditionFailed(Exception):
    """A check could not run because its hypotheses do not hold."""


@dataclass
class CheckResult:
    name: str
    status: str
    probes: int = 0
    witness: dict | None = None
    note: str = ""
    seconds: float = 0.0
    # run parameters (truncation, probe degree) filled in by the suite runner
    params: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return self.status != FAIL


@dataclass
class CheckReport:
    results: list[CheckResult] = field(default_factory=list)
    header: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(r.ok for r in self.results)

    @property
    def failures(self) -> list[CheckResult]:
        return [r for r in self.results if r.status == FAIL]

    def names(self) -> list[str]:
        return [r.name for r in self.results]

    def __getitem__(self, name: str) -> CheckResult:
        for r in self.results:
            if r.name == name:
                return r
        raise KeyError(name)

    def __contains__(self, name: str) -> bool:
        return any(r.name == name for r in self.results)

    def extend(self, other: "CheckReport") -> "CheckReport":
        self.results.extend(other.results)
        return self

    def sorted(self) -> "CheckReport":
        return CheckReport(sorted(self.results, key=lambda r: r.name), dict(self.header))

    @contextmanager
    def check(self, name: str, note: str = ""):
        rec = Recorder(name, note)
        start = time.perf_counter()
        try:
            yield rec
        except PreconditionFailed as exc:
            rec.skipped = str(exc)
        rec.seconds = time.perf_counter() - start
        self.results.append(rec.result())


def h_order(diff) -> int | None:
    """Lowest power of h carrying a nonzero coefficient of ``diff``."""
    if isinstance(diff, Scalar):
        return diff.valuation()
    if isinstance(diff, Element):
        vals = [c.valuation() for c in diff.terms.values()]
        return min(vals) if vals else None
    return None


def _show(x) -> str:
    return str(x)


class Recorder:
    """Counts probes for one property and keeps the first counterexample."""

    def __init__(self, name: str, note: str = ""):
        self.name = name
        self.note = note
        self.count = 0
        self.witness: dict | None = None
        self.failed = False
        self.skipped: str | None = None
        self.seconds = 0.0

    def equal(self, lhs, rhs, **inputs) -> bool:
        self.count += 1
        if lhs == rhs:
            return True
        self.failed = True
        if self.witness is None:
            w = {"inputs": {k: _show(v) for k, v in inputs.items()},
                 "lhs": _show(lhs), "rhs": _show(rhs)}
            try:
                order = h_order(lhs - rhs)
            except Exception:
                order = None
            if order is not None:
                w["h_order"] = order
            self.witness = w
        return False

    def true(self, cond: bool, **inputs) -> bool:
        self.count += 1
        if cond:
            return True
        self.failed = True
        if self.witness is None:
            self.witness = {"inputs": {k: _show(v) for k, v in inputs.items()}}
        return False

    def result(self) -> CheckResult:
        if self.skipped is not None:
            return CheckResult(self.name, SKIPPED, self.count, None,
                               self.skipped, self.seconds)
        status = FAIL if self.failed else PASS
        return CheckResult(self.name, status, self.count, self.witness,
                           self.note, self.seconds)
