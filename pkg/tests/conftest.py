import numpy as np
import pytest

_REPORT_KEY = pytest.StashKey[list]()


def pytest_configure(config):
    config.stash[_REPORT_KEY] = []


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = config.stash.get(_REPORT_KEY, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)


@pytest.fixture
def report(request):
    """Record a one-line PASS/FAIL verdict shown in the terminal summary."""
    lines = request.config.stash[_REPORT_KEY]

    def _report(label: str, ok: bool, detail: str = ""):
        line = f"[{'PASS' if ok else 'FAIL'}] {label}" + (f" ({detail})" if detail else "")
        lines.append(line)
        print(line)
        return ok

    return _report


@pytest.fixture
def rng():
    return np.random.default_rng(20240917)
