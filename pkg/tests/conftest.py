import pytest

_LINES = []


@pytest.fixture(scope="session")
def criterion():
    """Record a pass/fail line for one acceptance criterion.

    Use as ``with criterion("name") as detail: ...``; ``detail`` is a list the
    body may append short facts to.
    """
    from contextlib import contextmanager

    @contextmanager
    def record(name):
        detail = []
        try:
            yield detail
        except BaseException:
            _LINES.append(f"FAIL  {name}  {'; '.join(detail)}")
            raise
        _LINES.append(f"PASS  {name}  {'; '.join(detail)}")

    return record


def pytest_terminal_summary(terminalreporter):
    if _LINES:
        terminalreporter.section("acceptance criteria")
        for line in _LINES:
            terminalreporter.write_line(line)
