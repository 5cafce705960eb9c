import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from solitonprop.soliton_core import SolitonParams  # noqa: E402


@pytest.fixture
def one_soliton():
    return SolitonParams.from_wavenumbers([1.0])


@pytest.fixture
def two_soliton():
    return SolitonParams.from_wavenumbers([1.0, 2.0])


@pytest.fixture
def three_soliton():
    return SolitonParams.from_wavenumbers([1.0, 2.0, 3.0])


@pytest.fixture
def four_soliton():
    return SolitonParams.from_wavenumbers([0.5, 1.0, 1.5, 2.0])


ACCEPTANCE: dict[int, tuple[bool, str]] = {}


@pytest.fixture
def criterion(request):
    """Record one acceptance line: ``criterion(n, passed, detail)``."""

    def record(n, passed, detail):
        ACCEPTANCE[n] = (bool(passed), detail)
        print(f"criterion {n}: {'PASS' if passed else 'FAIL'} ({detail})")
        return passed

    return record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        passed, detail = ACCEPTANCE[n]
        terminalreporter.write_line(f"criterion {n}: {'PASS' if passed else 'FAIL'}  {detail}")
