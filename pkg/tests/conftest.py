import pathlib

import pytest

from glidersim.config import load_scenario

REPO = pathlib.Path(__file__).resolve().parent.parent
SCENARIOS = REPO / "scenarios"


@pytest.fixture(scope="session")
def default_scenario():
    return load_scenario(SCENARIOS / "default.yaml")


@pytest.fixture(scope="session")
def default_glider(default_scenario):
    return default_scenario.glider


@pytest.fixture(scope="session", autouse=True)
def warm_kernels(default_scenario):
    """Trigger JIT compilation once so timed tests measure steady state."""
    from glidersim.environment import GliderEnv

    env = GliderEnv(default_scenario)
    env.reset(0)
    env.step((0.0, 0.0))
    return None
