import pytest

from cohlab import catalog


@pytest.fixture(scope="session")
def instances():
    return catalog.all_instances()


def pytest_terminal_summary(terminalreporter):
    from test_acceptance import RESULTS

    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for n in sorted(RESULTS):
            terminalreporter.write_line(RESULTS[n])
