import numpy as np
import pytest

from urllc_admission.model import Scenario, SystemConfig

# lines collected by the acceptance suite, echoed in the terminal summary
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


def random_channels(rng: np.random.Generator, n: int, T: int, scale: float = 1e-2) -> np.ndarray:
    return scale * (rng.standard_normal((n, T)) + 1j * rng.standard_normal((n, T))) / np.sqrt(2)


def make_scenario(K: int, J: int, T: int = 4, seed: int = 0, scale: float = 1e-2) -> Scenario:
    rng = np.random.default_rng(seed)
    return Scenario(random_channels(rng, K, T, scale), random_channels(rng, J, T, scale),
                    rng.uniform(10, 100, K + J), seed)


@pytest.fixture
def default_config() -> SystemConfig:
    return SystemConfig()


@pytest.fixture
def small_config() -> SystemConfig:
    return SystemConfig(num_embb=4, num_urllc=2)
