import json

import pytest

from halfspace_nls.cli import main
from halfspace_nls.grid import Grid2D, read_binary
from halfspace_nls.ground_state import radial_ground_state
from halfspace_nls.nonlinearity import NonlinearityCtx

ACCEPTANCE_LINES = []


@pytest.fixture(scope="session")
def gs2():
    """Ground state for p = 3 in the plane."""
    return radial_ground_state(3.0, 2)


@pytest.fixture(scope="session")
def ctx31():
    return NonlinearityCtx(3.0, 1.0)


@pytest.fixture(scope="session")
def small_grid():
    return Grid2D(16.0, 16.0, 0.25)


@pytest.fixture(scope="session")
def default_solve(tmp_path_factory):
    """Full CLI solve at the default launch parameters (a couple of minutes)."""
    out = tmp_path_factory.mktemp("solve")
    code = main(["solve", "--p", "3", "--c", "1", "--out", str(out)])
    report = json.loads((out / "report.json").read_text())
    u = read_binary(out / "fields" / "u_star.bin")
    return code, report["result"], u, out


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
