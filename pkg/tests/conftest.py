import pytest

from dlscontrol.duffing import DuffingParams
from dlscontrol.experiments import run_preset

# The canonical runs are deterministic and moderately expensive (the
# h=0.001 presets take a few seconds each), so they are shared across the
# whole session.


@pytest.fixture(scope="session")
def base_params() -> DuffingParams:
    return DuffingParams(omega=1.0, epsilon=0.1, alpha=1.5, zeta=0.025)


@pytest.fixture(scope="session")
def run_fig1():
    return run_preset("fig1")


@pytest.fixture(scope="session")
def run_fig2():
    return run_preset("fig2")


@pytest.fixture(scope="session")
def run_fig3():
    return run_preset("fig3")


@pytest.fixture(scope="session")
def run_fig4():
    return run_preset("fig4")


@pytest.fixture(scope="session")
def run_fig5():
    return run_preset("fig5")
