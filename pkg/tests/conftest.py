import pytest
from hypothesis import settings

from _synth import (
    make_balanced_reference,
    make_benchmark_reference,
    make_fully_gendered_reference,
    make_letter_reference,
)

settings.register_profile("ci", derandomize=True, max_examples=60, deadline=None)
settings.load_profile("ci")


@pytest.fixture(scope="session")
def benchmark_reference():
    return make_benchmark_reference()


@pytest.fixture(scope="session")
def balanced_reference():
    return make_balanced_reference()


@pytest.fixture(scope="session")
def letter_reference():
    return make_letter_reference()


@pytest.fixture(scope="session")
def fully_gendered_reference():
    return make_fully_gendered_reference()


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    """One pass/fail line per acceptance check, printed after the run."""
    rows = {}
    for outcome, label in (("passed", "PASS"), ("failed", "FAIL"), ("skipped", "SKIP")):
        for report in terminalreporter.stats.get(outcome, []):
            nodeid = getattr(report, "nodeid", "")
            if "test_acceptance.py" not in nodeid:
                continue
            if outcome != "skipped" and report.when != "call":
                continue
            name = nodeid.split("::")[-1]
            rows[name] = label
    if rows:
        terminalreporter.write_sep("-", "acceptance checks")
        for name in sorted(rows):
            terminalreporter.write_line(f"{rows[name]:<4} {name}")
