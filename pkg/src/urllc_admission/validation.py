"""Input checks shared by the estimators and the command line."""
from __future__ import annotations

from typing import Any, Mapping

import numpy as np

from .model import ConfigError, Scenario, SystemConfig, Violation, config_from_dict, validate_config


def check_config(config: SystemConfig | Mapping[str, Any] | None) -> SystemConfig:
    """Return a valid ``SystemConfig`` or raise ``ConfigError`` listing every problem.

    ``None`` means the default parameters; a mapping is parsed like a
    config file.
    """
    if config is None:
        config = SystemConfig()
    elif isinstance(config, Mapping):
        config = config_from_dict(dict(config))
    elif not isinstance(config, SystemConfig):
        raise TypeError(f"expected SystemConfig or mapping, got {type(config).__name__}")
    problems = validate_config(config)
    if problems:
        raise ConfigError(problems)
    return config


def check_scenario(scenario: Scenario, config: SystemConfig | None = None) -> Scenario:
    """Channels must be finite and nonzero and, given ``config``, sized to match it."""
    if not isinstance(scenario, Scenario):
        raise TypeError(f"expected Scenario, got {type(scenario).__name__}")
    problems: list[Violation] = []
    for name, H in (("embb_channels", scenario.embb_channels), ("urllc_channels", scenario.urllc_channels)):
        H = np.asarray(H)
        if not np.all(np.isfinite(H)):
            problems.append(Violation(name, "contains non-finite entries"))
        elif H.size and np.any(np.linalg.norm(H, axis=1) == 0):
            problems.append(Violation(name, "contains an all-zero channel"))
    if config is not None:
        if scenario.num_embb != config.num_embb:
            problems.append(Violation("num_embb", f"scenario has {scenario.num_embb}, config {config.num_embb}"))
        if scenario.num_urllc != config.num_urllc:
            problems.append(Violation("num_urllc", f"scenario has {scenario.num_urllc}, config {config.num_urllc}"))
        if scenario.num_antennas != config.num_antennas:
            problems.append(Violation("num_antennas",
                                      f"scenario has {scenario.num_antennas}, config {config.num_antennas}"))
    if problems:
        raise ConfigError(problems)
    return scenario
