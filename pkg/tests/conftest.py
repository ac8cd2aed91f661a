import pytest

ACCEPTANCE_LINES = []


@pytest.fixture
def criterion_log():
    """Collector for one-line acceptance verdicts, replayed after the run."""

    def record(line: str) -> None:
        ACCEPTANCE_LINES.append(line)

    return record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if ACCEPTANCE_LINES:
        terminalreporter.write_sep("-", "acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
