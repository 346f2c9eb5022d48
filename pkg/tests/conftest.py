import pytest

from loopframes.oracle import default_chart, desitter_components

ACCEPTANCE_LINES = []


@pytest.fixture(scope="session")
def chart64():
    return default_chart(64, 64)


@pytest.fixture(scope="session")
def chart128():
    return default_chart(128, 128)


@pytest.fixture(scope="session")
def cf64(chart64):
    return desitter_components(chart64)


@pytest.fixture(scope="session")
def cf128(chart128):
    return desitter_components(chart128)


@pytest.fixture(scope="session")
def acceptance_log():
    return ACCEPTANCE_LINES


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
