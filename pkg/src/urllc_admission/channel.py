"""Seeded user placement and i.i.d. Rayleigh MISO channels with path loss."""
from __future__ import annotations

from pathlib import Path

import numpy as np

from .model import Scenario, SystemConfig


def path_loss_gain(r: float | np.ndarray, r0: float, alpha: float) -> float | np.ndarray:
    """Distance gain (r/r0)^-alpha; requires r >= r0 > 0."""
    if not r0 > 0:
        raise ValueError("reference distance must be positive")
    r_arr = np.asarray(r, dtype=float)
    if np.any(r_arr < r0):
        raise ValueError("distance below the reference distance")
    if alpha < 0:
        raise ValueError("path loss exponent must be non-negative")
    out = (r_arr / r0) ** (-alpha)
    return float(out) if out.ndim == 0 else out


def complex_normal(rng: np.random.Generator, shape: tuple[int, ...]) -> np.ndarray:
    """CN(0, 1) entries: real and imaginary parts i.i.d. N(0, 1/2)."""
    re = rng.standard_normal(shape)
    im = rng.standard_normal(shape)
    return (re + 1j * im) * np.sqrt(0.5)


def amplitude_gain(r: np.ndarray, config: SystemConfig) -> np.ndarray:
    g = path_loss_gain(r, config.reference_distance, config.pathloss_exponent)
    if config.pathloss_mode == "power":
        return np.sqrt(g)
    return np.asarray(g)


def generate_scenario(config: SystemConfig, seed: int) -> Scenario:
    """Draw one topology and channel realisation.

    Draw order is fixed: eMBB distances, URLLC distances, eMBB fading,
    URLLC fading, all from one PCG64 stream seeded with ``seed``.
    """
    K, J, T = config.num_embb, config.num_urllc, config.num_antennas
    rng = np.random.Generator(np.random.PCG64(np.uint64(seed % 2**64)))
    r_min, r_max = config.distance_range
    d_e = rng.uniform(r_min, r_max, K)
    d_u = rng.uniform(r_min, r_max, J)
    c_e = complex_normal(rng, (K, T))
    c_u = complex_normal(rng, (J, T))
    h_e = amplitude_gain(d_e, config)[:, None] * c_e
    h_u = amplitude_gain(d_u, config)[:, None] * c_u
    return Scenario(
        embb_channels=h_e.reshape(K, T),
        urllc_channels=h_u.reshape(J, T),
        distances=np.concatenate([d_e, d_u]),
        seed=int(seed),
    )


def save_scenario(scenario: Scenario, path: str | Path) -> None:
    """Write a scenario as whitespace-separated text.

    Header ``# seed K J T``; then one row per user (eMBB first) holding the
    distance followed by the T real parts and T imaginary parts of h.
    """
    K, J, T = scenario.num_embb, scenario.num_urllc, scenario.num_antennas
    H = np.vstack([scenario.embb_channels.reshape(K, T), scenario.urllc_channels.reshape(J, T)])
    rows = np.column_stack([scenario.distances, H.real, H.imag]) if K + J else np.zeros((0, 1 + 2 * T))
    with open(path, "w") as fh:
        fh.write(f"# {scenario.seed} {K} {J} {T}\n")
        for row in rows:
            fh.write(" ".join(repr(float(v)) for v in row) + "\n")


def load_scenario(path: str | Path) -> Scenario:
    with open(path) as fh:
        header = fh.readline().split()
        seed, K, J, T = (int(v) for v in header[1:5])
        data = np.array([[float(v) for v in line.split()] for line in fh if line.strip()])
    data = data.reshape(K + J, 1 + 2 * T)
    H = data[:, 1:1 + T] + 1j * data[:, 1 + T:]
    return Scenario(H[:K].reshape(K, T), H[K:].reshape(J, T), data[:, 0], seed)
