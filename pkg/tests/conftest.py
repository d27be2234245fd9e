import pytest

from csdjwt.bench import BENCH_IAT, World

# Verification clock for credentials issued at BENCH_IAT.
NOW = BENCH_IAT + 1


@pytest.fixture(scope="session")
def world():
    return World(seed=0)


@pytest.fixture(scope="session")
def issuer(world):
    return world.issuer


@pytest.fixture(scope="session")
def holder(world):
    return world.holder


@pytest.fixture(scope="session")
def verifier(world):
    return world.verifier


@pytest.fixture(scope="session")
def registry(world):
    return world.registry


# One summary line per acceptance criterion, with the measured values each
# test attached through ``record_property``.
_acceptance = []


def pytest_runtest_logreport(report):
    if "test_acceptance.py" in report.nodeid and (report.when == "call" or report.failed):
        _acceptance.append((report.nodeid.split("::")[-1], report.outcome, dict(report.user_properties)))


def pytest_terminal_summary(terminalreporter):
    if not _acceptance:
        return
    terminalreporter.section("acceptance criteria")
    for name, outcome, props in _acceptance:
        detail = ", ".join(f"{k}={v}" for k, v in props.items())
        terminalreporter.write_line(f"{'PASS' if outcome == 'passed' else 'FAIL'}  {name}  {detail}".rstrip())
