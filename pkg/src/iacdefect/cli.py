"""Command-line pipeline: extract, mine, analyze, evaluate, compare.

Exit codes: 0 success, 2 empty input, 3 data violation, 64 usage error.
Every command is deterministic given its flags and input bytes.
"""

from __future__ import annotations

import argparse
import csv
import sys
from dataclasses import dataclass
from pathlib import Path

from . import learners, mining, properties, stats
from .errors import DataError, EmptyInputError
from .features import bow_preprocess
from .lexer import read_script

EXIT_OK = 0
EXIT_EMPTY = 2
EXIT_DATA = 3
EXIT_USAGE = 64


@dataclass
class RunConfig:
    command: str
    inputs: list[Path]
    out: Path
    labels: Path | None = None
    xcm_out: Path | None = None
    corpus: Path | None = None
    features: str = "properties"
    learner: str = "cart"
    seed: int = 42
    alpha: float = 0.05
    variance_target: float = 0.95
    folds: int = 10
    repeats: int = 10

    def __post_init__(self):
        if self.folds < 2:
            raise DataError("--folds must be at least 2")
        if self.repeats < 1:
            raise DataError("--repeats must be at least 1")
        if not 0 < self.alpha < 1:
            raise DataError("--alpha must be in (0, 1)")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _folds_arg(value: str) -> int:
    folds = int(value)
    if folds < 2:
        raise argparse.ArgumentTypeError("must be at least 2")
    return folds


def _repeats_arg(value: str) -> int:
    repeats = int(value)
    if repeats < 1:
        raise argparse.ArgumentTypeError("must be at least 1")
    return repeats


def _alpha_arg(value: str) -> float:
    alpha = float(value)
    if not 0 < alpha < 1:
        raise argparse.ArgumentTypeError("must be in (0, 1)")
    return alpha


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="iacdefect",
                     description="Defect analysis for Puppet manifests")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("extract", help="count the 12 properties per script")
    p.add_argument("corpus_dir", type=Path)
    p.add_argument("--labels", type=Path,
                   help="path,label CSV used to fill the label column")
    p.add_argument("--out", type=Path, required=True)

    p = sub.add_parser("mine", help="label scripts from commit history")
    p.add_argument("commits_jsonl", type=Path)
    p.add_argument("issues_csv", type=Path)
    p.add_argument("labels_csv", type=Path)
    p.add_argument("--out", type=Path, required=True)
    p.add_argument("--xcm-out", type=Path,
                   help="where to write the sha,xcm_text,issue_ids dump "
                        "(default: <out>.xcm.csv)")

    p = sub.add_parser("analyze", help="per-property defect statistics")
    p.add_argument("dataset_csv", type=Path)
    p.add_argument("--alpha", type=_alpha_arg, default=0.05)
    p.add_argument("--out", type=Path, required=True)

    p = sub.add_parser("evaluate", help="cross-validated prediction report")
    p.add_argument("dataset", type=Path,
                   help="labeled property CSV, or a path,label CSV with "
                        "--features bow")
    p.add_argument("--features", choices=("properties", "bow"),
                   default="properties")
    p.add_argument("--learner", choices=learners.LEARNER_KINDS,
                   required=True)
    p.add_argument("--corpus", type=Path,
                   help="script root for --features bow")
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--folds", type=_folds_arg, default=10)
    p.add_argument("--repeats", type=_repeats_arg, default=10)
    p.add_argument("--variance-target", type=float, default=0.95)
    p.add_argument("--out", type=Path, required=True)

    p = sub.add_parser("compare", help="Scott-Knott ranking of reports")
    p.add_argument("reports", type=Path, nargs="+")
    p.add_argument("--alpha", type=_alpha_arg, default=0.05)
    p.add_argument("--out", type=Path, required=True)
    return parser


def cmd_extract(cfg: RunConfig) -> int:
    corpus_dir = cfg.inputs[0]
    paths = sorted(corpus_dir.rglob("*.pp"))
    scripts = []
    skipped = 0
    for path in paths:
        rel = path.relative_to(corpus_dir).as_posix()
        try:
            scripts.append(read_script(path, name=rel))
        except OSError as exc:
            skipped += 1
            print(f"warning: skipping unreadable {rel}: {exc}",
                  file=sys.stderr)
    rows = properties.extract_corpus(scripts)
    if cfg.labels is not None:
        by_path = mining.read_path_labels_csv(cfg.labels)
        for row in rows:
            row.label = by_path.get(row.script_path)
    properties.write_property_csv(rows, cfg.out)
    if skipped:
        print(f"warning: skipped {skipped} unreadable file(s)",
              file=sys.stderr)
    if not rows:
        print(f"no .pp files under {corpus_dir}", file=sys.stderr)
        return EXIT_EMPTY
    print(f"wrote {len(rows)} rows to {cfg.out}")
    return EXIT_OK


def cmd_mine(cfg: RunConfig) -> int:
    commits_path, issues_path, labels_path = cfg.inputs
    commits = mining.read_commits_jsonl(commits_path)
    issues = mining.read_issues_csv(issues_path)
    labels = mining.read_labels_csv(labels_path)

    xcm_out = cfg.xcm_out or cfg.out.with_suffix(cfg.out.suffix + ".xcm.csv")
    missing = 0
    with open(xcm_out, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["sha", "xcm_text", "issue_ids"])
        for commit in commits:
            xcm = mining.build_xcm(commit, issues)
            missing += len(xcm.missing_ids)
            writer.writerow([xcm.sha, xcm.text, ";".join(xcm.issue_ids)])

    report = mining.label_scripts(commits, labels)
    with open(cfg.out, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["path", "label"])
        for path in sorted(report.labels):
            writer.writerow([path, report.labels[path]])

    if missing:
        print(f"warning: {missing} issue reference(s) had no summary",
              file=sys.stderr)
    if report.skipped_shas:
        print(f"warning: {len(report.skipped_shas)} commit(s) without a "
              "label were skipped", file=sys.stderr)
    print(f"wrote {len(report.labels)} paths to {cfg.out} "
          f"and XCMs to {xcm_out}")
    return EXIT_OK


def cmd_analyze(cfg: RunConfig) -> int:
    rows = properties.read_property_csv(cfg.inputs[0])
    if not rows:
        raise EmptyInputError(f"no rows in {cfg.inputs[0]}")
    defective = [r for r in rows if r.label == properties.DEFECTIVE]
    neutral = [r for r in rows if r.label == properties.NEUTRAL]
    if not defective or not neutral:
        raise DataError("analysis needs both defective and neutral rows")
    cfg_stats = stats.StatConfig(alpha=cfg.alpha)
    with open(cfg.out, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["property", "p_value", "delta", "magnitude",
                         "reject_null"])
        for name in properties.PROPERTY_NAMES:
            x = [getattr(r.vector, name) for r in defective]
            y = [getattr(r.vector, name) for r in neutral]
            test = stats.mann_whitney_one_sided(x, y, cfg_stats)
            effect = stats.cliffs_delta(x, y)
            writer.writerow([name, test.p_value, effect.delta,
                             effect.magnitude,
                             "true" if test.reject_null else "false"])
    print(f"wrote statistics for {len(properties.PROPERTY_NAMES)} "
          f"properties to {cfg.out}")
    return EXIT_OK


def _load_dataset(cfg: RunConfig) -> learners.LabeledDataset:
    if cfg.features == "properties":
        rows = properties.read_property_csv(cfg.inputs[0])
        labeled = [r for r in rows if r.label is not None]
        if len(labeled) < len(rows):
            print(f"note: ignoring {len(rows) - len(labeled)} unlabeled "
                  "row(s)", file=sys.stderr)
        if not labeled:
            raise EmptyInputError(f"no labeled rows in {cfg.inputs[0]}")
        return learners.dataset_from_rows(labeled)
    if cfg.corpus is None:
        raise DataError("--features bow requires --corpus")
    by_path = mining.read_path_labels_csv(cfg.inputs[0])
    if not by_path:
        raise EmptyInputError(f"no rows in {cfg.inputs[0]}")
    ids, labels, tokens = [], [], []
    for rel in sorted(by_path):
        path = cfg.corpus / rel
        if not path.is_file():
            raise DataError(f"script {rel} not found under {cfg.corpus}")
        script = read_script(path, name=rel)
        ids.append(rel)
        labels.append(1 if by_path[rel] == properties.DEFECTIVE else 0)
        tokens.append(bow_preprocess(script.body))
    return learners.LabeledDataset(script_ids=ids, labels=labels,
                                   tokens=tokens)


def cmd_evaluate(cfg: RunConfig) -> int:
    dataset = _load_dataset(cfg)
    spec = learners.LearnerSpec(kind=cfg.learner, seed=cfg.seed)
    report = learners.cross_validate(spec, cfg.features, dataset,
                                     seed=cfg.seed, folds=cfg.folds,
                                     repeats=cfg.repeats,
                                     variance_target=cfg.variance_target)
    with open(cfg.out, "w", encoding="utf-8", newline="") as fh:
        fh.write(learners.report_to_json(report))
    for event in report.events:
        print(f"note: {event}", file=sys.stderr)
    med = report.medians
    print(f"{cfg.learner}/{cfg.features}: precision={med['precision']:.3f} "
          f"recall={med['recall']:.3f} auc={med['auc']:.3f} f={med['f']:.3f}")
    return EXIT_OK


def cmd_compare(cfg: RunConfig) -> int:
    reports = []
    for path in cfg.inputs:
        with open(path, encoding="utf-8") as fh:
            reports.append((path, learners.report_from_json(fh.read())))
    counts = {(r.folds, r.repeats) for _, r in reports}
    if len(counts) != 1:
        raise DataError("reports have mismatched fold counts")

    names = []
    for path, _ in reports:
        name = path.stem
        if name in names:
            name = f"{name}#{names.count(name) + 1}"
        names.append(name)

    cfg_stats = stats.StatConfig(alpha=cfg.alpha)
    with open(cfg.out, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["measure", "rank", "treatment"])
        for measure in learners.MEASURES:
            treatments = {name: report.raw[measure]
                          for name, (_, report) in zip(names, reports)}
            ranking = stats.scott_knott_esd(treatments, cfg_stats)
            for rank, group in enumerate(ranking.groups, start=1):
                for name in group:
                    writer.writerow([measure, rank, name])
    print(f"wrote rankings for {len(learners.MEASURES)} measures "
          f"to {cfg.out}")
    return EXIT_OK


def _config_from_args(args) -> RunConfig:
    inputs = {
        "extract": lambda: [args.corpus_dir],
        "mine": lambda: [args.commits_jsonl, args.issues_csv,
                         args.labels_csv],
        "analyze": lambda: [args.dataset_csv],
        "evaluate": lambda: [args.dataset],
        "compare": lambda: list(args.reports),
    }[args.command]()
    return RunConfig(
        command=args.command,
        inputs=inputs,
        out=args.out,
        labels=getattr(args, "labels", None),
        xcm_out=getattr(args, "xcm_out", None),
        corpus=getattr(args, "corpus", None),
        features=getattr(args, "features", "properties"),
        learner=getattr(args, "learner", "cart"),
        seed=getattr(args, "seed", 42),
        alpha=getattr(args, "alpha", 0.05),
        variance_target=getattr(args, "variance_target", 0.95),
        folds=getattr(args, "folds", 10),
        repeats=getattr(args, "repeats", 10),
    )


_COMMANDS = {
    "extract": cmd_extract,
    "mine": cmd_mine,
    "analyze": cmd_analyze,
    "evaluate": cmd_evaluate,
    "compare": cmd_compare,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = _config_from_args(args)
        for path in cfg.inputs:
            if not path.exists():
                parser.error(f"input does not exist: {path}")
        return _COMMANDS[cfg.command](cfg)
    except EmptyInputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_EMPTY
    except DataError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA


def cli_entry() -> None:
    sys.exit(main())
