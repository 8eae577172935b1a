import contextlib
from pathlib import Path

import pytest

from switchset.paradox import StratifiedTable

DATA = Path(__file__).parent / "data"


@pytest.fixture
def data_dir():
    return DATA


@pytest.fixture
def table1():
    return StratifiedTable.from_rows(
        ("Lisa", "Bart"),
        ("Week 1", "Week 2"),
        [[(0, 0, 1), (3, 4, 5)], [(1, 1, 4), (2, 3, 3)]],
    )


ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def criterion(request):
    """Context manager that records one PASS/FAIL line per acceptance criterion."""
    reporter = request.config.pluginmanager.get_plugin("terminalreporter")

    @contextlib.contextmanager
    def check(number, title):
        try:
            yield
        except BaseException as exc:
            line = f"criterion {number:>2} FAIL  {title}: {type(exc).__name__}: {exc}".splitlines()[0]
            raise
        else:
            line = f"criterion {number:>2} PASS  {title}"
        finally:
            ACCEPTANCE_LINES.append(line)
            if reporter is not None:
                reporter.write_line("")
                reporter.write_line(line)

    return check


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
