import pytest

_CRITERIA: dict = {}


@pytest.fixture
def criterion():
    """``criterion(k, ok, detail)`` prints and records one line per criterion."""
    def record(k, ok, detail=""):
        line = f"criterion {k:>2}: {'PASS' if ok else 'FAIL'}  {detail}".rstrip()
        _CRITERIA[k] = line
        print(line)
        return ok
    return record


def pytest_terminal_summary(terminalreporter):
    if _CRITERIA:
        terminalreporter.section("acceptance criteria")
        for k in sorted(_CRITERIA):
            terminalreporter.write_line(_CRITERIA[k])
