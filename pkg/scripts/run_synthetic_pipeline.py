#!/usr/bin/env python3
"""End-to-end demo on a generated corpus.

Builds a synthetic Puppet repository with a planted defect signal (defective
scripts are longer and carry more attributes and hard-coded strings), fakes
the matching commit export and label files, then drives the CLI through
mine -> extract -> analyze -> evaluate -> compare and prints the artifacts.

Usage: python scripts/run_synthetic_pipeline.py --out /tmp/demo [--seed 42]
"""

import argparse
import csv
import json
from pathlib import Path

import numpy as np

from iacdefect.cli import main as cli

NEUTRAL_SERVICES = ["ntp", "cron", "rsyslog", "sshd", "postfix"]
DEFECT_SERVICES = ["nova", "glance", "keystone", "haproxy", "rabbitmq"]


def make_script(rng, defective: bool) -> str:
    # defect-prone scripts are bigger on average, with plenty of overlap
    if defective and rng.rand() < 0.3:
        defective = False  # some defective scripts look perfectly ordinary
    service = rng.choice(DEFECT_SERVICES if defective else NEUTRAL_SERVICES)
    n_resources = rng.randint(3, 9) if defective else rng.randint(1, 5)
    lines = [f"# managed configuration for {service}",
             f"class {service} {{"]
    for i in range(n_resources):
        lines.append(f"  file {{ '/etc/{service}/conf_{i}.cfg':")
        lines.append("    ensure => present,")
        if rng.rand() < (0.8 if defective else 0.35):
            lines.append(f"    mode   => '0{rng.randint(6, 8)}44',")
            lines.append(f"    source => 'https://files.example.org/"
                         f"{service}/{i}.cfg',")
        lines.append("  }")
    for i in range(rng.randint(1, 5) if defective else rng.randint(0, 2)):
        lines.append(f"  $opt_{i} = 'value_{rng.randint(0, 99)}'")
    lines.append(f"  include {service}::params")
    lines.append("}")
    return "\n".join(lines) + "\n"


def build_world(out: Path, seed: int, n_scripts: int = 60):
    rng = np.random.RandomState(seed)
    corpus = out / "corpus"
    corpus.mkdir(parents=True, exist_ok=True)

    defective_paths, neutral_paths = [], []
    for i in range(n_scripts):
        defective = i % 2 == 0
        rel = f"modules/m{i:02d}/init.pp"
        path = corpus / rel
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(make_script(rng, defective), encoding="utf-8")
        (defective_paths if defective else neutral_paths).append(rel)

    commits, labels, issues = [], [], {}
    ts = 1_500_000_000
    for sha_n, rel in enumerate(defective_paths):
        sha = f"bad{sha_n:03d}"
        issue_id = str(1000 + sha_n)
        commits.append({"sha": sha,
                        "message": f"fix broken config, bug {issue_id}",
                        "timestamp": ts + sha_n * 3600, "paths": [rel]})
        labels.append((sha, "true"))
        issues[issue_id] = f"service fails to start with config {sha_n}"
    for sha_n, rel in enumerate(neutral_paths):
        sha = f"ok{sha_n:03d}"
        commits.append({"sha": sha, "message": "routine refresh",
                        "timestamp": ts + (sha_n + 500) * 3600,
                        "paths": [rel]})
        labels.append((sha, "false"))

    (out / "commits.jsonl").write_text(
        "".join(json.dumps(c) + "\n" for c in commits), encoding="utf-8")
    with (out / "issues.csv").open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["issue_id", "summary"])
        for issue_id in sorted(issues):
            writer.writerow([issue_id, issues[issue_id]])
    with (out / "labels.csv").open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["sha", "is_defect_related"])
        writer.writerows(labels)
    return corpus


def run(argv) -> int:
    print("$ iacdefect " + " ".join(argv))
    code = cli(argv)
    if code != 0:
        raise SystemExit(f"command failed with exit code {code}")
    return code


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", type=Path, required=True)
    parser.add_argument("--seed", type=int, default=42)
    parser.add_argument("--repeats", type=int, default=3,
                        help="cross-validation repetitions (10 in the full "
                             "protocol; fewer keeps the demo quick)")
    args = parser.parse_args()
    out = args.out
    corpus = build_world(out, args.seed)

    path_labels = out / "path_labels.csv"
    run(["mine", str(out / "commits.jsonl"), str(out / "issues.csv"),
         str(out / "labels.csv"), "--out", str(path_labels)])

    dataset = out / "dataset.csv"
    run(["extract", str(corpus), "--labels", str(path_labels),
         "--out", str(dataset)])

    run(["analyze", str(dataset), "--out", str(out / "property_stats.csv")])
    print((out / "property_stats.csv").read_text())

    reports = []
    for learner in ("cart", "logreg", "rf"):
        report = out / f"report_{learner}_properties.json"
        run(["evaluate", str(dataset), "--learner", learner,
             "--seed", str(args.seed), "--repeats", str(args.repeats),
             "--out", str(report)])
        reports.append(report)
    bow_report = out / "report_cart_bow.json"
    run(["evaluate", str(path_labels), "--features", "bow",
         "--corpus", str(corpus), "--learner", "cart",
         "--seed", str(args.seed), "--repeats", str(args.repeats),
         "--out", str(bow_report)])
    reports.append(bow_report)

    run(["compare", *map(str, reports), "--out", str(out / "ranking.csv")])
    print((out / "ranking.csv").read_text())
    print(f"artifacts written under {out}")


if __name__ == "__main__":
    main()
