import os

import pytest
from hypothesis import HealthCheck, settings

from ricewaves import BumpConvolutionCovariance, GaussianCovariance, RingSpectrum

settings.register_profile("default", deadline=None, max_examples=40,
                          suppress_health_check=[HealthCheck.too_slow])
settings.register_profile("thorough", deadline=None, max_examples=400)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: Monte Carlo or oracle re-derivation taking more than a few seconds")


@pytest.fixture(scope="session")
def bump():
    return BumpConvolutionCovariance(2.0, 5)


@pytest.fixture(scope="session")
def gauss():
    return GaussianCovariance(1.0, 1.0)


@pytest.fixture(scope="session")
def ring():
    return RingSpectrum(1.0)


_VERDICTS = pytest.StashKey[list]()


@pytest.fixture
def report_criterion(request):
    """Record a one-line verdict that is echoed in the terminal summary."""
    lines = request.config.stash.setdefault(_VERDICTS, [])

    def record(number: int, passed: bool, text: str, seconds: float | None = None):
        timing = "" if seconds is None else f" [{seconds:.1f} s]"
        lines.append((number, f"{'PASS' if passed else 'FAIL'} criterion {number}: {text}{timing}"))
        return passed

    return record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = config.stash.get(_VERDICTS, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for _, line in sorted(lines):
            terminalreporter.write_line(line)
