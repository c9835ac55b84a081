import numpy as np
import pytest

from cylq import AngleGrid, make_fiducial, parity_weight, weight_from_state

ACCEPTANCE = {}


@pytest.fixture(scope="session")
def grid():
    return AngleGrid(256)


@pytest.fixture(scope="session")
def phi():
    return make_fiducial("vonmises:2", 16)


@pytest.fixture(scope="session")
def cs(phi):
    return weight_from_state(phi)


@pytest.fixture(scope="session")
def parity():
    return parity_weight()


@pytest.fixture
def rng(request):
    # one stream per test, stable across runs and test order
    return np.random.default_rng([sum(map(ord, request.node.name))])


def pytest_runtest_logreport(report):
    if report.when == "call" and "test_acceptance.py" in report.nodeid:
        name = report.nodeid.split("::")[-1].split("[")[0]
        if name.startswith("test_criterion_"):
            # a parametrized criterion passes only if every case passes
            ok = ACCEPTANCE.get(name, True) and report.outcome == "passed"
            ACCEPTANCE[name] = ok


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for name in sorted(ACCEPTANCE, key=lambda n: int(n.split("_")[2])):
        _, _, num, *title = name.split("_")
        verdict = "PASS" if ACCEPTANCE[name] else "FAIL"
        terminalreporter.write_line(f"criterion {num:>2} {' '.join(title):<32} {verdict}")
