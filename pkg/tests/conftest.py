import numpy as np
import pytest

_LINES = []


@pytest.fixture
def report(capsys):
    """Print one acceptance line immediately and keep it for the summary."""

    def _report(name, ok, detail=""):
        line = f"{'PASS' if ok else 'FAIL'} {name}" + (f"  {detail}" if detail else "")
        _LINES.append(line)
        with capsys.disabled():
            print("\n" + line)
        return ok

    return _report


def pytest_terminal_summary(terminalreporter):
    if _LINES:
        terminalreporter.section("acceptance criteria")
        for line in _LINES:
            terminalreporter.write_line(line)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
