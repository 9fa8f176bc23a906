"""Admission control for eMBB users sharing a MISO downlink with URLLC users."""
from .admission import run
from .channel import generate_scenario, load_scenario, save_scenario
from .estimators import AdmissionControl, ExhaustiveSearch
from .model import (AdmissionResult, ConfigError, Scenario, SolutionPoint, SystemConfig, dbm_to_watts,
                    load_config, save_config, validate_config, watts_to_dbm)
from .oracle import exhaustive_max_admitted, subset_feasible
from .subsolver import solve_subproblem
from .validation import check_config, check_scenario

__all__ = [
    "AdmissionControl", "AdmissionResult", "ConfigError", "ExhaustiveSearch", "Scenario", "SolutionPoint",
    "SystemConfig", "check_config", "check_scenario", "dbm_to_watts", "exhaustive_max_admitted",
    "generate_scenario", "load_config", "load_scenario", "run", "save_config", "save_scenario",
    "solve_subproblem", "subset_feasible", "validate_config", "watts_to_dbm",
]
__version__ = "0.1.0"
