import sys

import pytest

from homapprox import system_from_strings


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "ACCEPTANCE_LINES", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def sys3():
    """3-dimensional worked example with sin/cos coefficients."""
    return system_from_strings(
        3,
        ["0", "-sin(x1)^2", "2*x1^2*sin(t)"],
        ["-cos(x1)", "t^2", "-x2"],
    )


@pytest.fixture(scope="session")
def sys3_drift():
    """Same system with an extra -2*t*x1 drift term in the second
    component; its autonomous approximation exists."""
    return system_from_strings(
        3,
        ["0", "-sin(x1)^2 - 2*t*x1", "2*x1^2*sin(t)"],
        ["-cos(x1)", "t^2", "-x2"],
    )


@pytest.fixture(scope="session")
def sys_scalar():
    return system_from_strings(1, ["0"], ["1"])


@pytest.fixture(scope="session")
def sys_deep():
    """Two states, second reachable only through an order-9 bracket."""
    return system_from_strings(2, ["0", "x1^8"], ["1", "0"])
