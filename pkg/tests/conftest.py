import numpy as np
import pytest

import sclerolab as sl

ACCEPTANCE_RESULTS: dict[int, tuple[bool, str]] = {}


@pytest.fixture
def acceptance():
    """Record one acceptance criterion's verdict for the terminal summary."""

    def record(number: int, passed: bool, detail: str) -> None:
        ACCEPTANCE_RESULTS[number] = (passed, detail)

    return record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE_RESULTS):
        passed, detail = ACCEPTANCE_RESULTS[number]
        word = "PASS" if passed else "FAIL"
        terminalreporter.write_line(f"ACCEPTANCE {number:02d} {word}  {detail}")


@pytest.fixture(scope="session")
def ref_params() -> sl.ModelParams:
    """The reference parameter set used throughout the pattern experiments."""
    return sl.ModelParams(a=3.0, chi=1.0, eps0=0.03125, delta=1.0, beta=1.0)


@pytest.fixture(scope="session")
def square() -> sl.RectDomain:
    return sl.RectDomain(np.pi, np.pi)


@pytest.fixture(scope="session")
def grid64(square) -> sl.Grid:
    return sl.Grid(square, 64, 64)
