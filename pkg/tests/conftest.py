import sys
import numpy as np
import pytest

from gauss_squeeze.model import SqueezedBath, SystemParams


@pytest.fixture
def fig2_params():
    return SystemParams(kappa=0.1, gamma_m=1e-6, g0=1e-4, g_minus=0.01, g_plus=0.002, n_th=0.0)


@pytest.fixture
def fast_params():
    """A strongly damped point that relaxes within a few hundred time units."""
    return SystemParams(kappa=0.3, gamma_m=0.02, g_minus=0.05, g_plus=0.02, n_th=2.0)


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


def random_stable_point(rng, max_ratio=0.9):
    """Random stable RWA parameters with moderate stiffness, plus a random bath."""
    g_minus = rng.uniform(0.01, 0.1)
    params = SystemParams(
        kappa=rng.uniform(0.05, 0.5),
        gamma_m=rng.uniform(0.005, 0.05),
        g_minus=g_minus,
        g_plus=rng.uniform(0.0, max_ratio) * g_minus,
        n_th=rng.uniform(0.0, 10.0),
    )
    bath = SqueezedBath(r=rng.uniform(0.0, 1.5), theta=rng.uniform(0.0, 2 * np.pi))
    return params, bath


def pytest_terminal_summary(terminalreporter):
    module = sys.modules.get("test_acceptance")
    if module is None or not module.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(module.RESULTS):
        terminalreporter.write_line(module.RESULTS[number])
