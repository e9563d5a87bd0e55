import numpy as np
import pytest

from lockedopo import min_threshold_point, point_covariances


@pytest.fixture
def covs():
    def make(kappa, mu, rho, sigma, omegas, branch=1):
        point = min_threshold_point(kappa, mu, rho, sigma, branch)
        return point, point_covariances(point, np.atleast_1d(omegas))

    return make


def identity_cov(omega=1.0):
    from lockedopo.fluctuations import CovarianceMatrix

    return CovarianceMatrix(omega, np.eye(4))


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
