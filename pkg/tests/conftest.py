import pytest

from critperc.lattice import LatticeGeometry

_ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def unit():
    return LatticeGeometry(1.0)


@pytest.fixture
def report():
    """Record a one-line acceptance verdict; all lines are echoed in the terminal summary."""
    def record(number: int, title: str, passed: bool, detail: str) -> None:
        line = f"[{'PASS' if passed else 'FAIL'}] criterion {number:2d} {title}: {detail}"
        _ACCEPTANCE_LINES.append(line)
        print(line)
    return record


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(_ACCEPTANCE_LINES, key=lambda s: int(s.split()[2])):
            terminalreporter.write_line(line)
