"""Domain types, units and parameter validation.

All quantities are SI (W, Hz, s, bits).  dBm, MHz, Mbps and ms are only
accepted when reading a config file, see :func:`config_from_dict`.
"""
from __future__ import annotations

import dataclasses
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Iterable, Literal

import numpy as np

SPLIT_MODES = ("fixed", "free")
PATHLOSS_MODES = ("power", "amplitude")

# eMBB share of B_total for the two bandwidth-split cases
CASES = {1: 0.75, 2: 0.5}


def dbm_to_watts(p_dbm: float) -> float:
    """Convert a power in dBm to watts."""
    return 10.0 ** ((p_dbm - 30.0) / 10.0)


def watts_to_dbm(p_w: float) -> float:
    return 10.0 * math.log10(p_w) + 30.0


@dataclass(frozen=True)
class SystemConfig:
    """Scalar system parameters plus algorithm knobs.

    Defaults reproduce the single-cell simulation setup: 4 antennas,
    8 eMBB and 8 URLLC users, 33 dBm, 200 MHz, half the band for eMBB.
    """

    num_antennas: int = 4
    num_embb: int = 8
    num_urllc: int = 8
    total_power: float = dbm_to_watts(33.0)
    total_bandwidth: float = 200e6
    noise_psd: float = dbm_to_watts(-83.98)
    target_rate: float = 200e6
    frame_duration: float = 0.1e-3
    tx_duration: float = 0.05e-3
    max_delay: float = 1e-3
    packet_loss: float = 1e-5
    eps_c: float = 5e-6
    eps_q: float = 5e-6
    arrival_rate: float = 0.2
    packet_size: float = 160.0
    pathloss_exponent: float = 2.0
    reference_distance: float = 1.0
    distance_range: tuple[float, float] = (10.0, 100.0)
    split_mode: Literal["fixed", "free"] = "fixed"
    embb_fraction: float = 0.5
    delta: float = 1e-3
    stop_threshold: float = 1e-3
    admit_tolerance: float = 1e-4
    max_outer_iters: int = 30
    # "power": alpha is the exponent of the power gain (|h|^2 ~ r^-alpha);
    # "amplitude": h itself scales as r^-alpha.
    pathloss_mode: Literal["power", "amplitude"] = "power"
    uniform_urllc_bandwidth: bool = False
    power_tiebreak: bool = True
    damping: float = 0.0
    min_bandwidth: float = 1e3

    def replace(self, **changes: Any) -> "SystemConfig":
        return dataclasses.replace(self, **changes)

    @property
    def queue_delay(self) -> float:
        """End-to-end queueing delay budget D_max - 2 T_f."""
        return self.max_delay - 2.0 * self.frame_duration

    @property
    def embb_bandwidth(self) -> float | None:
        """Fixed eMBB bandwidth in Hz, or None when it is a decision variable."""
        if self.split_mode == "fixed":
            return self.embb_fraction * self.total_bandwidth
        return None

    @property
    def urllc_bandwidth(self) -> float | None:
        if self.split_mode == "fixed":
            return self.total_bandwidth - self.embb_fraction * self.total_bandwidth
        return None

    def to_dict(self) -> dict[str, Any]:
        d = dataclasses.asdict(self)
        d["distance_range"] = list(self.distance_range)
        return d


@dataclass(frozen=True)
class Violation:
    field: str
    message: str

    def __str__(self) -> str:
        return f"{self.field}: {self.message}"


def validate_config(config: SystemConfig) -> list[Violation]:
    """Return every violated invariant of ``config`` (empty list means ok)."""
    out: list[Violation] = []

    def bad(name: str, msg: str) -> None:
        out.append(Violation(name, msg))

    if not isinstance(config.num_antennas, (int, np.integer)) or config.num_antennas < 1:
        bad("num_antennas", "must be an integer >= 1")
    for name in ("num_embb", "num_urllc", "max_outer_iters"):
        v = getattr(config, name)
        if not isinstance(v, (int, np.integer)) or v < 0:
            bad(name, "must be a non-negative integer")
    if isinstance(config.max_outer_iters, (int, np.integer)) and config.max_outer_iters == 0:
        bad("max_outer_iters", "must be positive")

    positive = (
        "total_power", "total_bandwidth", "noise_psd", "frame_duration",
        "tx_duration", "max_delay", "arrival_rate", "packet_size",
        "reference_distance", "delta", "stop_threshold", "admit_tolerance",
        "min_bandwidth",
    )
    for name in positive:
        v = getattr(config, name)
        if not (math.isfinite(v) and v > 0):
            bad(name, f"must be positive and finite, got {v!r}")
    if not (math.isfinite(config.target_rate) and config.target_rate >= 0):
        bad("target_rate", "must be non-negative")
    if not (config.pathloss_exponent >= 0):
        bad("pathloss_exponent", "must be non-negative")

    if not (config.eps_c > 0 and config.eps_q > 0):
        bad("eps_c/eps_q", "both error budgets must be positive")
    if not math.isclose(config.eps_c + config.eps_q, config.packet_loss, rel_tol=1e-9, abs_tol=0.0):
        bad("packet_loss", "eps_c + eps_q must equal packet_loss")
    if not (0 < config.packet_loss <= 1):
        bad("packet_loss", "must lie in (0, 1]")
    if not config.queue_delay > 0:
        bad("max_delay", "max_delay - 2*frame_duration must be positive")
    if config.tx_duration > config.frame_duration:
        bad("tx_duration", "must not exceed frame_duration")

    r_min, r_max = config.distance_range
    if not (r_min >= config.reference_distance > 0 and r_max >= r_min):
        bad("distance_range", "need reference_distance <= r_min <= r_max")

    if config.split_mode not in SPLIT_MODES:
        bad("split_mode", f"must be one of {SPLIT_MODES}")
    elif config.split_mode == "fixed" and not (0 < config.embb_fraction < 1):
        bad("embb_fraction", "must lie in (0, 1)")
    if config.uniform_urllc_bandwidth and config.split_mode != "fixed":
        bad("uniform_urllc_bandwidth", "requires split_mode='fixed'")
    if config.pathloss_mode not in PATHLOSS_MODES:
        bad("pathloss_mode", f"must be one of {PATHLOSS_MODES}")
    if not (0 <= config.damping < 1):
        bad("damping", "must lie in [0, 1)")
    return out


class ConfigError(ValueError):
    def __init__(self, violations: Iterable[Violation]):
        self.violations = list(violations)
        super().__init__("; ".join(str(v) for v in self.violations))


# config-file unit suffixes -> converter to SI
_UNIT_SUFFIXES = {
    "_dbm": dbm_to_watts,
    "_dbm_per_hz": dbm_to_watts,
    "_mhz": lambda v: v * 1e6,
    "_mbps": lambda v: v * 1e6,
    "_ms": lambda v: v * 1e-3,
}


def config_from_dict(data: dict[str, Any]) -> SystemConfig:
    """Build a config from a flat mapping of field names.

    A key may carry a unit suffix, e.g. ``total_power_dbm`` or
    ``total_bandwidth_mhz``; values are converted to SI.  Unknown keys raise
    ``KeyError``.
    """
    names = {f.name for f in dataclasses.fields(SystemConfig)}
    kwargs: dict[str, Any] = {}
    for key, value in data.items():
        if key in names:
            kwargs[key] = value
            continue
        for suffix in sorted(_UNIT_SUFFIXES, key=len, reverse=True):
            base = key[: -len(suffix)]
            if key.endswith(suffix) and base in names:
                kwargs[base] = _UNIT_SUFFIXES[suffix](float(value))
                break
        else:
            raise KeyError(f"unknown config key {key!r}")
    if "distance_range" in kwargs:
        kwargs["distance_range"] = tuple(float(v) for v in kwargs["distance_range"])
    if "packet_loss" in kwargs and "eps_c" not in kwargs and "eps_q" not in kwargs:
        kwargs["eps_c"] = kwargs["eps_q"] = kwargs["packet_loss"] / 2.0
    return SystemConfig(**kwargs)


def load_config(path: str | Path) -> SystemConfig:
    """Read a JSON config file; missing keys keep their defaults."""
    with open(path) as fh:
        return config_from_dict(json.load(fh))


def save_config(config: SystemConfig, path: str | Path) -> None:
    with open(path, "w") as fh:
        json.dump(config.to_dict(), fh, indent=2, sort_keys=True)
        fh.write("\n")


@dataclass(frozen=True)
class Scenario:
    """Channel realisation for one topology.

    ``embb_channels`` has shape (K, T) and ``urllc_channels`` shape (J, T);
    row k is the channel vector h_k.  ``distances`` lists eMBB users first.
    """

    embb_channels: np.ndarray
    urllc_channels: np.ndarray
    distances: np.ndarray
    seed: int

    def __post_init__(self) -> None:
        for name in ("embb_channels", "urllc_channels"):
            arr = np.array(getattr(self, name), dtype=complex, ndmin=2)
            arr.flags.writeable = False
            object.__setattr__(self, name, arr)
        d = np.array(self.distances, dtype=float)
        d.flags.writeable = False
        object.__setattr__(self, "distances", d)
        if self.embb_channels.shape[1] != self.urllc_channels.shape[1]:
            raise ValueError("eMBB and URLLC channels differ in antenna count")

    @property
    def num_embb(self) -> int:
        return self.embb_channels.shape[0]

    @property
    def num_urllc(self) -> int:
        return self.urllc_channels.shape[0]

    @property
    def num_antennas(self) -> int:
        return self.embb_channels.shape[1]

    def subset(self, embb: Iterable[int]) -> "Scenario":
        """Scenario restricted to the given eMBB users (URLLC users kept)."""
        idx = np.asarray(sorted(embb), dtype=int)
        K = self.num_embb
        return Scenario(
            embb_channels=self.embb_channels[idx],
            urllc_channels=self.urllc_channels,
            distances=np.concatenate([self.distances[idx], self.distances[K:]]),
            seed=self.seed,
        )


@dataclass(frozen=True)
class SolutionPoint:
    """One iterate of the sequential convex loop, in SI units.

    Beamformers are complex arrays of shape (K, T) and (J, T) whose squared
    row norms are transmit powers in watts.
    """

    embb_beamformers: np.ndarray
    urllc_beamformers: np.ndarray
    embb_bandwidth: float
    urllc_bandwidths: np.ndarray
    interference: np.ndarray
    slack: np.ndarray

    def __post_init__(self) -> None:
        for name in ("embb_beamformers", "urllc_beamformers"):
            arr = np.array(getattr(self, name), dtype=complex)
            arr.flags.writeable = False
            object.__setattr__(self, name, arr)
        for name in ("urllc_bandwidths", "interference", "slack"):
            arr = np.array(getattr(self, name), dtype=float).reshape(-1)
            arr.flags.writeable = False
            object.__setattr__(self, name, arr)
        object.__setattr__(self, "embb_bandwidth", float(self.embb_bandwidth))

    @property
    def total_power(self) -> float:
        return float(np.sum(np.abs(self.embb_beamformers) ** 2)
                     + np.sum(np.abs(self.urllc_beamformers) ** 2))

    @property
    def used_bandwidth(self) -> float:
        return float(self.embb_bandwidth + np.sum(self.urllc_bandwidths))


@dataclass(frozen=True)
class TraceRecord:
    iteration: int
    objective: float
    admitted_count: int
    max_violation: float


@dataclass(frozen=True)
class AdmissionResult:
    admitted: tuple[int, ...]
    objective_trace: list[float]
    final_point: SolutionPoint | None
    per_user_sinr: np.ndarray
    per_user_snr: np.ndarray
    outer_iterations: int
    status: Literal["converged", "max_iters", "urllc_infeasible"]
    trace: list[TraceRecord] = field(default_factory=list)

    @property
    def num_admitted(self) -> int:
        return len(self.admitted)
