import sys
from pathlib import Path

from hypothesis import settings

sys.path.insert(0, str(Path(__file__).parent))

settings.register_profile("iacdefect", deadline=None)
settings.load_profile("iacdefect")

_ACCEPTANCE_FILE = "test_acceptance.py"
_acceptance_outcomes: dict[str, str] = {}


def pytest_runtest_logreport(report):
    if _ACCEPTANCE_FILE not in report.nodeid:
        return
    if report.when == "call" or (report.when == "setup" and report.skipped):
        name = report.nodeid.split("::")[-1]
        _acceptance_outcomes[name] = report.outcome.upper()


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not _acceptance_outcomes:
        return
    terminalreporter.section("acceptance criteria")
    for name in sorted(_acceptance_outcomes):
        outcome = _acceptance_outcomes[name]
        label = {"PASSED": "PASS", "FAILED": "FAIL",
                 "SKIPPED": "SKIP"}.get(outcome, outcome)
        terminalreporter.write_line(f"{name}: {label}")
