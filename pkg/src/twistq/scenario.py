"""Scenario files: a line-oriented ``[section]`` / ``key = value`` format.

Comments start with ``#``.  A value whose brackets are unbalanced continues on
the following lines.  Every entry remembers where its value starts, so errors
found while building the model point at a line and column.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from pathlib import Path

SECTIONS = ("scenario", "hopf.abelian", "hopf.finite", "algebra", "calculus", "params",
            "twist", "rmatrix", "checks", "faults")
PREFIXED = ("bimodule", "hom", "connection")


class ScenarioError(ValueError):
    """Syntax or reference error located at ``line``:``col`` (1-based)."""

    def __init__(self, message: str, line: int = 0, col: int = 0, source: str = "<scenario>"):
        self.message, self.line, self.col, self.source = message, line, col, source
        super().__init__(str(self))

    def __str__(self):
        if self.line <= 0:
            return f"{self.source}: {self.message}"
        return f"{self.source}:{self.line}:{self.col}: {self.message}"


@dataclass
class Entry:
    key: str
    value: str
    line: int
    col: int
    # (offset into value, line, col) for continuation lines
    segments: list = field(default_factory=list)

    def locate(self, offset: int) -> tuple[int, int]:
        line, col, base = self.line, self.col, 0
        for off, ln, c in self.segments:
            if offset >= off:
                line, col, base = ln, c, off
        return line, col + offset - base

    def error(self, message: str, offset: int = 0) -> ScenarioError:
        line, col = self.locate(offset)
        return ScenarioError(message, line, col)


@dataclass
class Section:
    name: str
    line: int
    entries: dict = field(default_factory=dict)

    @property
    def kind(self) -> str:
        return self.name.split(".", 1)[0] if self.name.split(".", 1)[0] in PREFIXED else self.name

    @property
    def label(self) -> str:
        return self.name.split(".", 1)[1] if "." in self.name else ""

    def get(self, key: str, default=None):
        e = self.entries.get(key)
        return e.value if e is not None else default

    def entry(self, key: str) -> Entry | None:
        return self.entries.get(key)

    def require(self, key: str) -> Entry:
        e = self.entries.get(key)
        if e is None:
            raise ScenarioError(f"[{self.name}] needs '{key}'", self.line, 1)
        return e

    def error(self, message: str) -> ScenarioError:
        return ScenarioError(message, self.line, 1)


@dataclass
class Scenario:
    """Parsed scenario text; :func:`twistq.model.build` turns it into objects."""

    sections: dict
    source: str = "<scenario>"
    text: str = ""

    def section(self, name: str) -> Section | None:
        return self.sections.get(name)

    def prefixed(self, kind: str) -> list[Section]:
        return [s for s in self.sections.values() if s.kind == kind and s.label]

    def _int(self, key: str, default=None, minimum: int = 0) -> int:
        sec = self.sections.get("scenario")
        e = sec.entry(key) if sec else None
        if e is None:
            if default is None:
                raise ScenarioError(f"[scenario] needs '{key}'", sec.line if sec else 1, 1)
            return default
        return parse_int(e, minimum)

    @property
    def name(self) -> str:
        sec = self.sections.get("scenario")
        return (sec.get("name") if sec else None) or Path(self.source).stem

    @property
    def truncation(self) -> int:
        return self._int("truncation", minimum=0)

    @property
    def probe_degree(self) -> int:
        return self._int("probe_degree", minimum=1)

    @property
    def seed(self) -> int:
        return self._int("seed", default=0)


def parse_int(e: Entry, minimum: int = 0) -> int:
    try:
        v = int(e.value)
    except ValueError:
        raise e.error(f"'{e.key}' must be an integer") from None
    if v < minimum:
        raise e.error(f"'{e.key}' must be >= {minimum}")
    return v


def split_list(e: Entry) -> list[tuple[str, int]]:
    """Comma-separated items with their offsets; brackets protect commas."""
    out, depth, start = [], 0, 0
    text = e.value
    for i, ch in enumerate(text + ","):
        if ch in "([":
            depth += 1
        elif ch in ")]":
            depth -= 1
        elif ch == "," and depth == 0:
            item = text[start:i]
            stripped = item.strip()
            if stripped:
                out.append((stripped, start + len(item) - len(item.lstrip())))
            elif i < len(text) or out:
                raise e.error("empty list item", start)
            start = i + 1
    return out


_HEADER = re.compile(r"^\s*\[\s*([A-Za-z0-9_.]+)\s*\]\s*$")
_ENTRY = re.compile(r"^(\s*)([A-Za-z_][A-Za-z0-9_.]*)\s*=\s*")
_SECTION_NAME = re.compile(r"^[A-Za-z_][A-Za-z0-9_]*$")


def _strip_comment(line: str) -> str:
    i = line.find("#")
    return line if i < 0 else line[:i]


def _balance(text: str) -> int:
    return sum(text.count(c) for c in "([") - sum(text.count(c) for c in ")]")


def parse_text(text: str, source: str = "<scenario>") -> Scenario:
    """Syntax only: sections and located entries."""
    sections: dict = {}
    current: Section | None = None
    pending: Entry | None = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = _strip_comment(raw).rstrip()
        if pending is not None:
            if not line.strip():
                continue
            lead = len(line) - len(line.lstrip())
            pending.segments.append((len(pending.value) + 1, lineno, lead + 1))
            pending.value += " " + line.strip()
            if _balance(pending.value) <= 0:
                pending = None
            continue
        if not line.strip():
            continue
        m = _HEADER.match(line)
        if m:
            name = m.group(1)
            head, _, label = name.partition(".")
            if name not in SECTIONS and not (head in PREFIXED and _SECTION_NAME.match(label or "")):
                raise ScenarioError(f"unknown section [{name}]", lineno, line.index(name) + 1, source)
            if name in sections:
                raise ScenarioError(f"duplicate section [{name}]", lineno, 1, source)
            current = sections[name] = Section(name, lineno)
            continue
        m = _ENTRY.match(line)
        if not m:
            col = len(line) - len(line.lstrip()) + 1
            raise ScenarioError("expected '[section]' or 'key = value'", lineno, col, source)
        if current is None:
            raise ScenarioError("entry outside of a section", lineno, 1, source)
        key = m.group(2)
        if key in current.entries:
            raise ScenarioError(f"duplicate key '{key}'", lineno, len(m.group(1)) + 1, source)
        value = line[m.end():].strip()
        entry = Entry(key, value, lineno, m.end() + 1)
        if not value:
            raise ScenarioError(f"'{key}' has no value", lineno, m.end() + 1, source)
        current.entries[key] = entry
        if _balance(value) > 0:
            pending = entry
        elif _balance(value) < 0:
            raise ScenarioError("unbalanced closing bracket", lineno, m.end() + 1, source)
    if pending is not None:
        raise ScenarioError(f"unterminated value for '{pending.key}'", pending.line, pending.col, source)
    sc = Scenario(sections, source, text)
    if "scenario" not in sections:
        raise ScenarioError("missing [scenario] section", 1, 1, source)
    # header values are validated eagerly
    try:
        sc.truncation, sc.probe_degree, sc.seed
    except ScenarioError as exc:
        exc.source = source
        raise
    return sc


def parse_scenario(text: str, source: str = "<scenario>") -> Scenario:
    """Parse and validate: every literal and reference must resolve at the declared order."""
    from .model import build
    sc = parse_text(text, source)
    try:
        build(sc)
    except ScenarioError as exc:
        exc.source = source
        raise
    return sc


def load_scenario(path) -> Scenario:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except (OSError, UnicodeDecodeError) as exc:
        raise ScenarioError(f"cannot read scenario: {getattr(exc, 'strerror', None) or exc}", 0, 0, str(path)) from None
    return parse_scenario(text, str(path))


def shipped(name: str) -> Path:
    """Path of a scenario shipped with the package (``moyal2d``, ``klein``)."""
    return Path(__file__).with_name("scenarios") / f"{name}.scn"
