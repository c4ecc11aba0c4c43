import pathlib
import sys

import pytest

from seugrade.fixtures import fix_a, fix_b

REPO_ROOT = pathlib.Path(__file__).resolve().parent.parent
FIXTURE_DIR = REPO_ROOT / "fixtures"


@pytest.fixture(scope="session")
def sr2():
    """Two-stage shift register, 1 input, 1 output, 4-cycle bench."""
    return fix_a()


@pytest.fixture(scope="session")
def gated():
    """Single flop gated to the output by an AND, 4-cycle bench."""
    return fix_b()


@pytest.fixture(scope="session")
def fixture_dir():
    return FIXTURE_DIR


def pytest_terminal_summary(terminalreporter):
    """Replay the acceptance verdict lines after the test summary; stdout
    printed inside passing tests is captured and would otherwise be lost."""
    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "VERDICTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
