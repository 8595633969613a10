"""The 12 defect-correlated source properties counted per Puppet script.

All keyword counts are token-level and blind to comments and string
literals; URL counting is the one exception and scans the whole body,
comments and strings included.
"""

from __future__ import annotations

import csv
import re
from collections import Counter
from dataclasses import dataclass, fields
from typing import Iterable

from .errors import DataError
from .lexer import COMMENT, OPERATOR, STRING, WORD, SourceScript, tokenize

_URL_RE = re.compile(r"https?://[^\s'\"]+")

DEFECTIVE = "defective"
NEUTRAL = "neutral"
LABELS = (DEFECTIVE, NEUTRAL)


@dataclass(frozen=True)
class PropertyVector:
    """Non-negative counts of the 12 measured source properties."""

    attribute: int = 0  # '=>' operators
    command: int = 0  # word 'cmd', case-insensitive
    comment: int = 0
    ensure: int = 0
    file: int = 0
    file_mode: int = 0  # word 'mode'
    hard_coded_string: int = 0
    include: int = 0
    lines_of_code: int = 0  # non-blank physical lines
    require: int = 0
    ssh_key: int = 0  # word 'ssh_authorized_key'
    url: int = 0

    def as_dict(self) -> dict[str, int]:
        return {f: getattr(self, f) for f in PROPERTY_NAMES}

    def as_tuple(self) -> tuple[int, ...]:
        return tuple(getattr(self, f) for f in PROPERTY_NAMES)


PROPERTY_NAMES: tuple[str, ...] = tuple(f.name for f in fields(PropertyVector))

CSV_HEADER = ["script_path", *PROPERTY_NAMES, "label"]

# case-sensitive word -> property it increments
_KEYWORDS = {
    "ensure": "ensure",
    "file": "file",
    "mode": "file_mode",
    "include": "include",
    "require": "require",
    "ssh_authorized_key": "ssh_key",
}


@dataclass
class PropertyRow:
    script_path: str
    vector: PropertyVector
    label: str | None = None  # DEFECTIVE, NEUTRAL, or None when unknown

    def __post_init__(self):
        if self.label is not None and self.label not in LABELS:
            raise DataError(f"bad label {self.label!r} for {self.script_path}")


def extract(script: SourceScript) -> PropertyVector:
    """Count the 12 properties for one script. Pure and total."""
    stream = tokenize(script)
    counts = Counter(name for name in (
        _KEYWORDS.get(t.text) for t in stream.tokens if t.kind == WORD
    ) if name is not None)
    words = [t.text for t in stream.tokens if t.kind == WORD]
    return PropertyVector(
        attribute=sum(1 for t in stream.tokens
                      if t.kind == OPERATOR and t.text == "=>"),
        command=sum(1 for w in words if w.lower() == "cmd"),
        comment=sum(1 for t in stream.tokens if t.kind == COMMENT),
        ensure=counts["ensure"],
        file=counts["file"],
        file_mode=counts["file_mode"],
        hard_coded_string=sum(1 for t in stream.tokens if t.kind == STRING),
        include=counts["include"],
        lines_of_code=sum(1 for ln in script.body.split("\n") if ln.strip()),
        require=counts["require"],
        ssh_key=counts["ssh_key"],
        url=len(_URL_RE.findall(script.body)),
    )


def extract_corpus(scripts: Iterable[SourceScript]) -> list[PropertyRow]:
    """Extract every script, unlabeled, output sorted by path."""
    scripts = list(scripts)
    seen: set[str] = set()
    for s in scripts:
        if s.path in seen:
            raise DataError(f"duplicate script path: {s.path}")
        seen.add(s.path)
    return [PropertyRow(s.path, extract(s))
            for s in sorted(scripts, key=lambda s: s.path)]


def write_property_csv(rows: Iterable[PropertyRow], path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(CSV_HEADER)
        for row in rows:
            writer.writerow([row.script_path, *row.vector.as_tuple(),
                             row.label or ""])


def read_property_csv(path) -> list[PropertyRow]:
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != CSV_HEADER:
            raise DataError(f"unexpected property CSV header in {path}")
        rows = []
        for lineno, rec in enumerate(reader, start=2):
            if len(rec) != len(CSV_HEADER):
                raise DataError(f"{path}:{lineno}: expected "
                                f"{len(CSV_HEADER)} fields, got {len(rec)}")
            try:
                vec = PropertyVector(**{
                    name: int(value)
                    for name, value in zip(PROPERTY_NAMES, rec[1:-1])
                })
            except ValueError as exc:
                raise DataError(f"{path}:{lineno}: {exc}") from exc
            rows.append(PropertyRow(rec[0], vec, rec[-1] or None))
    return rows
