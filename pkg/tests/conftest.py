import pytest
from hypothesis import HealthCheck, settings

from holescan.cvbw import CvbwEngine
from holescan.fir_design import design_prototype

settings.register_profile("default", deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

# property tests that back the 1000-case acceptance requirement
PROPERTY_CASES = 1000


@pytest.fixture(scope="session")
def prototype():
    return design_prototype()


@pytest.fixture(scope="session")
def engine(prototype):
    return CvbwEngine(prototype)


def pytest_terminal_summary(terminalreporter):
    from test_acceptance import RESULTS
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in RESULTS:
            terminalreporter.write_line(line)
