"""Turn exported repository history plus defect labels into labeled script sets.

Inputs are plain files produced outside this package: a JSON-lines commit
export, an issue-summary CSV, and a commit-label CSV. Labels are human work;
nothing here infers defectiveness from text.
"""

from __future__ import annotations

import csv
import json
import re
from dataclasses import dataclass, field
from typing import Callable, Iterable, Mapping

from .errors import DataError
from .properties import DEFECTIVE, NEUTRAL

MONTH_SECONDS = 30 * 86400

MIN_IAC_FILE_RATIO = 0.11
MIN_COMMITS_PER_MONTH = 2.0

# matches "#123", "bug 123", "issue 123"; ids are two or more digits
ISSUE_ID_RE = re.compile(r"(#|bug\s*|issue\s*)(\d{2,})", re.IGNORECASE)


@dataclass(frozen=True)
class CommitRecord:
    sha: str
    message: str
    timestamp: float  # UTC epoch seconds
    changed_paths: tuple[str, ...]


@dataclass(frozen=True)
class RepoStats:
    total_files: int
    iac_files: int
    first_commit: float
    last_commit: float
    commit_count: int


@dataclass(frozen=True)
class CommitLabel:
    sha: str
    is_defect_related: bool


@dataclass(frozen=True)
class XCM:
    """A commit message extended with the summaries of referenced issues."""

    sha: str
    text: str
    issue_ids: tuple[str, ...]
    missing_ids: tuple[str, ...] = ()  # referenced but absent from the mapping


@dataclass(frozen=True)
class CriteriaCheck:
    passed: bool
    reason: str | None = None  # "criteria-2" or "criteria-3" on failure


@dataclass
class LabelReport:
    labels: dict[str, str]  # path -> DEFECTIVE | NEUTRAL
    skipped_shas: tuple[str, ...] = field(default_factory=tuple)


def passes_criteria(stats: RepoStats) -> CriteriaCheck:
    """Repository selection: enough IaC files and enough commit activity.

    criteria-2: at least 11% of the files are IaC scripts.
    criteria-3: at least two commits per 30-day month of history.
    """
    if stats.total_files <= 0:
        raise ValueError("total_files must be positive")
    if stats.iac_files / stats.total_files < MIN_IAC_FILE_RATIO:
        return CriteriaCheck(False, "criteria-2")
    span = stats.last_commit - stats.first_commit
    months = max(1, -(-int(span) // MONTH_SECONDS))
    if stats.commit_count / months < MIN_COMMITS_PER_MONTH:
        return CriteriaCheck(False, "criteria-3")
    return CriteriaCheck(True)


def build_xcm(commit: CommitRecord, issues: Mapping[str, str]) -> XCM:
    """Append referenced issue summaries to the commit message.

    Issue ids found in the message but missing from the mapping are kept in
    issue_ids (and listed in missing_ids) but contribute no text.
    """
    ids: list[str] = []
    for match in ISSUE_ID_RE.finditer(commit.message):
        issue_id = match.group(2)
        if issue_id not in ids:
            ids.append(issue_id)
    parts = [commit.message]
    missing = []
    for issue_id in ids:
        if issue_id in issues:
            parts.append(issues[issue_id])
        else:
            missing.append(issue_id)
    return XCM(sha=commit.sha, text="\n".join(parts), issue_ids=tuple(ids),
               missing_ids=tuple(missing))


def is_iac_path(path: str) -> bool:
    return path.endswith(".pp")


def label_scripts(commits: Iterable[CommitRecord],
                  labels: Iterable[CommitLabel],
                  iac_path_filter: Callable[[str], bool] = is_iac_path,
                  ) -> LabelReport:
    """Mark an IaC path defective when any defect-related commit touched it.

    Every other IaC path seen in any commit is neutral. Commits without a
    label still contribute neutral paths but are skipped for defect
    determination and reported.
    """
    by_sha: dict[str, CommitLabel] = {}
    for lab in labels:
        if lab.sha in by_sha:
            raise DataError(f"duplicate label for commit {lab.sha}")
        by_sha[lab.sha] = lab
    seen: set[str] = set()
    defective: set[str] = set()
    skipped: list[str] = []
    for commit in commits:
        touched = [p for p in commit.changed_paths if iac_path_filter(p)]
        seen.update(touched)
        label = by_sha.get(commit.sha)
        if label is None:
            skipped.append(commit.sha)
            continue
        if label.is_defect_related:
            defective.update(touched)
    result = {p: DEFECTIVE if p in defective else NEUTRAL for p in seen}
    return LabelReport(labels=result, skipped_shas=tuple(skipped))


def read_commits_jsonl(path) -> list[CommitRecord]:
    """Parse a commit export: one JSON object per line with keys
    sha, message, timestamp, paths."""
    commits = []
    seen: set[str] = set()
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise DataError(f"{path}:{lineno}: malformed JSON: {exc}") from exc
            try:
                commit = CommitRecord(
                    sha=str(obj["sha"]),
                    message=str(obj["message"]),
                    timestamp=float(obj["timestamp"]),
                    changed_paths=tuple(str(p) for p in obj["paths"]),
                )
            except (KeyError, TypeError, ValueError) as exc:
                raise DataError(f"{path}:{lineno}: bad commit record: {exc}") from exc
            if not commit.sha:
                raise DataError(f"{path}:{lineno}: empty sha")
            if commit.timestamp <= 0:
                raise DataError(f"{path}:{lineno}: non-positive timestamp")
            if commit.sha in seen:
                raise DataError(f"{path}:{lineno}: duplicate sha {commit.sha}")
            seen.add(commit.sha)
            commits.append(commit)
    return commits


def read_issues_csv(path) -> dict[str, str]:
    """issue_id,summary rows into a mapping."""
    issues: dict[str, str] = {}
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != ["issue_id", "summary"]:
            raise DataError(f"unexpected issues CSV header in {path}")
        for lineno, rec in enumerate(reader, start=2):
            if len(rec) != 2:
                raise DataError(f"{path}:{lineno}: expected 2 fields")
            issue_id, summary = rec
            if issue_id in issues:
                raise DataError(f"{path}:{lineno}: duplicate issue_id {issue_id}")
            issues[issue_id] = summary
    return issues


def read_labels_csv(path) -> list[CommitLabel]:
    """sha,is_defect_related rows; values are the strings true/false."""
    labels = []
    seen: set[str] = set()
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != ["sha", "is_defect_related"]:
            raise DataError(f"unexpected labels CSV header in {path}")
        for lineno, rec in enumerate(reader, start=2):
            if len(rec) != 2:
                raise DataError(f"{path}:{lineno}: expected 2 fields")
            sha, flag = rec
            if sha in seen:
                raise DataError(f"{path}:{lineno}: duplicate sha {sha}")
            seen.add(sha)
            if flag not in ("true", "false"):
                raise DataError(f"{path}:{lineno}: bad flag {flag!r}")
            labels.append(CommitLabel(sha, flag == "true"))
    return labels


def read_path_labels_csv(path) -> dict[str, str]:
    """path,label rows (the output format of the mine command)."""
    out: dict[str, str] = {}
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != ["path", "label"]:
            raise DataError(f"unexpected path-label CSV header in {path}")
        for lineno, rec in enumerate(reader, start=2):
            if len(rec) != 2:
                raise DataError(f"{path}:{lineno}: expected 2 fields")
            p, label = rec
            if label not in (DEFECTIVE, NEUTRAL):
                raise DataError(f"{path}:{lineno}: bad label {label!r}")
            if p in out:
                raise DataError(f"{path}:{lineno}: duplicate path {p}")
            out[p] = label
    return out
