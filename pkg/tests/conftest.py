import pytest

from malcev_forge.catalog import BUILTIN_NAMES, builtin


@pytest.fixture(scope="session")
def builtins():
    return {name: builtin(name) for name in BUILTIN_NAMES}


@pytest.fixture(scope="session")
def m7(builtins):
    return builtins["m7"]


@pytest.fixture(scope="session")
def m7_paper(builtins):
    return builtins["m7-paper"]


_outcomes = {}


def pytest_runtest_logreport(report):
    if report.when == "call" or report.failed:
        name = report.nodeid.split("::")[-1]
        if "test_criterion_" in name:
            _outcomes[name] = _outcomes.get(name, True) and report.passed


def pytest_terminal_summary(terminalreporter):
    if not _outcomes:
        return
    from test_acceptance import summary_lines

    terminalreporter.section("acceptance criteria")
    for line in summary_lines(_outcomes):
        terminalreporter.write_line(line)
