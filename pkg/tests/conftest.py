import numpy as np
import pytest

from forrkit.boolfn import TruthTable


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def and2():
    """f = x1 x2 in the +-1 convention; self-dual bent on two variables."""
    return TruthTable(2, [1, 1, 1, -1])


@pytest.fixture
def f_w():
    """[+1,+1,-1,+1]: W = (2,-2,2,2)."""
    return TruthTable(2, [1, 1, -1, 1])


_ACCEPTANCE: list[str] = []


@pytest.fixture
def criterion():
    """Record and print one PASS/FAIL line, then assert it."""
    def report(num: int, title: str, ok: bool, detail: str = "") -> None:
        line = f"criterion {num:2d} {'PASS' if ok else 'FAIL'}: {title}" + (f" ({detail})" if detail else "")
        print(line)
        _ACCEPTANCE.append(line)
        assert ok, line
    return report


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in sorted(_ACCEPTANCE):
            terminalreporter.write_line(line)
