from pathlib import Path

import pytest

from pldiag.oracle import parse_spec_text
from pldiag.syntax import parse_program, parse_query

PROGRAMS = Path(__file__).resolve().parent.parent / "programs"
GOLDEN = Path(__file__).resolve().parent / "golden"

# One line per acceptance criterion, printed after the test run.
ACCEPTANCE_LINES: list[str] = []


def record_acceptance(line: str) -> None:
    ACCEPTANCE_LINES.append(line)


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.line(line)


def atom(text: str):
    q = parse_query(text)
    assert len(q.atoms) == 1
    return q.atoms[0]


@pytest.fixture(scope="session")
def app_prog():
    return parse_program((PROGRAMS / "app.pl").read_text())


@pytest.fixture(scope="session")
def even_bug():
    return parse_program((PROGRAMS / "even_bug.pl").read_text())


@pytest.fixture(scope="session")
def even_missing():
    return parse_program((PROGRAMS / "even_missing.pl").read_text())


@pytest.fixture(scope="session")
def even_spec():
    return parse_spec_text((PROGRAMS / "even.spec").read_text())


@pytest.fixture(scope="session")
def isort_bug():
    return parse_program((PROGRAMS / "isort_bug.pl").read_text())


@pytest.fixture(scope="session")
def isort_spec():
    return parse_spec_text((PROGRAMS / "isort.spec").read_text())
