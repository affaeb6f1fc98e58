import math
import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from sfqlink.transmon import TransmonSpec, rotation_y  # noqa: E402


@pytest.fixture
def qubit3():
    """5 GHz transmon, 200 MHz (4%) anharmonicity, 100 fF / 100 aF."""
    return TransmonSpec.from_ghz(5.0, 200.0, levels=3)


@pytest.fixture
def qubit2():
    return TransmonSpec.from_ghz(5.0, 200.0, levels=2)


@pytest.fixture
def half_pi_y():
    return rotation_y(math.pi / 2)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod is None or not getattr(mod, "LINES", None):
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(mod.LINES):
        terminalreporter.write_line(mod.LINES[n])
