import pytest

from cryoamp.cli import builtin_path
from cryoamp.netlist import parse

ACCEPTANCE_LINES: list[str] = []


def load_builtin(name: str):
    return parse(builtin_path(name).read_text())


@pytest.fixture(scope="session")
def amp():
    return load_builtin("two_stage_amp.cir")


@pytest.fixture(scope="session")
def amp_op(amp):
    from cryoamp.dc import solve_op

    return solve_op(amp)


@pytest.fixture(scope="session")
def amp_lin(amp, amp_op):
    from cryoamp.ac import linearize

    return linearize(amp, amp_op)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
