"""Exhaustive-search baseline over eMBB subsets.

URLLC users get an equal share of the URLLC band and maximum-ratio
beamformers at their minimum power.  Whatever power remains goes to the
eMBB subset, whose minimum-power beamformers come from the uplink/downlink
duality fixed point: the uplink powers q solve

    q_k = gamma_k / h_k^H (I + sum_{i != k} q_i h_i h_i^H)^{-1} h_k

with noise-normalised channels, and sum(q) equals the least total downlink
power.  The iteration rises monotonically from q = 0, so a running sum above
the available budget proves infeasibility.
"""
from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass, field

import numpy as np

from . import qos
from .model import ConfigError, Scenario, SolutionPoint, SystemConfig, Violation

logger = logging.getLogger(__name__)

MAX_ORACLE_USERS = 12


@dataclass(frozen=True)
class PowerMinResult:
    """Least-power eMBB beamformers for a fixed subset."""

    feasible: bool | None  # None when the fixed point did not settle
    beamformers: np.ndarray | None
    power: float
    iterations: int


@dataclass(frozen=True)
class SubsetCheck:
    feasible: bool | None
    witness: SolutionPoint | None
    embb_power: float
    urllc_power: float

    @property
    def indeterminate(self) -> bool:
        return self.feasible is None

    @property
    def total_power(self) -> float:
        return self.embb_power + self.urllc_power


@dataclass(frozen=True)
class OracleRecord:
    mask: int
    feasible: bool | None
    power: float


@dataclass
class OracleResult:
    size: int
    subset: tuple[int, ...]
    witness: SolutionPoint | None
    power: float
    indeterminate: bool = False
    records: list[OracleRecord] = field(default_factory=list)


def min_power_beamforming(H: np.ndarray, gamma: float | np.ndarray, noise: float,
                          budget: float = np.inf, *, tol: float = 1e-12,
                          max_iter: int = 20000) -> PowerMinResult:
    """Minimise sum ||m_k||^2 subject to SINR_k >= gamma_k.

    ``H`` holds one channel per row, ``noise`` is the receiver noise power.
    Stops early with ``feasible=False`` once the least power provably
    exceeds ``budget``.
    """
    H = np.asarray(H, dtype=complex)
    K = H.shape[0]
    if K == 0:
        return PowerMinResult(True, H.copy(), 0.0, 0)
    T = H.shape[1]
    gamma = np.broadcast_to(np.asarray(gamma, dtype=float), (K,)).copy()
    if noise <= 0 or np.any(gamma < 0):
        raise ValueError("noise must be positive and SINR targets non-negative")
    Hn = H / np.sqrt(noise)
    limit = budget / noise if np.isfinite(budget) else np.inf
    q = np.zeros(K)
    settled = False
    it = 0
    for it in range(1, max_iter + 1):
        S = np.eye(T, dtype=complex) + (Hn.T * q) @ Hn.conj()
        Sinv = np.linalg.inv(S)
        # h_k^H S_k^{-1} h_k with S_k = S - q_k h_k h_k^H, by Sherman-Morrison
        a = np.real(np.einsum("kt,ts,ks->k", Hn.conj(), Sinv, Hn))
        a_k = a / (1.0 - q * a)
        q_new = gamma / a_k
        if q_new.sum() > limit * (1.0 + 1e-9):
            return PowerMinResult(False, None, float(q_new.sum() * noise), it)
        change = float(np.max(np.abs(q_new - q)))
        q = q_new
        if change <= tol * max(1.0, float(q.max())):
            settled = True
            break
    if not settled:
        return PowerMinResult(None, None, float(q.sum() * noise), it)
    # receive directions from the uplink MMSE filters
    S = np.eye(T, dtype=complex) + (Hn.T * q) @ Hn.conj()
    U = np.linalg.solve(S, Hn.T).T
    U /= np.linalg.norm(U, axis=1, keepdims=True)
    G = np.abs(Hn.conj() @ U.T) ** 2  # G[k, i] = |h_k^H u_i|^2
    A = -G.copy()
    A[np.diag_indices(K)] = np.diag(G) / np.where(gamma > 0, gamma, 1.0)
    rhs = np.where(gamma > 0, 1.0, 0.0)
    try:
        p = np.linalg.solve(A, rhs)
    except np.linalg.LinAlgError:
        return PowerMinResult(None, None, float(q.sum() * noise), it)
    p = np.where(gamma > 0, p, 0.0)
    if np.any(p < -1e-9 * max(1.0, float(np.abs(p).max()))):
        return PowerMinResult(None, None, float(q.sum() * noise), it)
    p = np.maximum(p, 0.0)
    M = np.sqrt(p)[:, None] * U
    power = float(p.sum())
    return PowerMinResult(power <= budget * (1.0 + 1e-9), M, power, it)


def _require_fixed(config: SystemConfig) -> None:
    if config.split_mode != "fixed":
        raise ConfigError([Violation("split_mode", "the oracle needs a fixed eMBB/URLLC split")])


def urllc_minimum_powers(scenario: Scenario, config: SystemConfig) -> tuple[np.ndarray, np.ndarray]:
    """Uniform URLLC bandwidths and the matching minimum MRT powers."""
    J = scenario.num_urllc
    if J == 0:
        return np.zeros(0), np.zeros(0)
    bu = np.full(J, config.urllc_bandwidth / J)
    gamma_u = qos.urllc_targets(config, bu).snr_thresholds
    gain = np.sum(np.abs(np.asarray(scenario.urllc_channels)) ** 2, axis=1)
    return bu, gamma_u * config.noise_psd * bu / gain


def subset_feasible(subset, scenario: Scenario, config: SystemConfig) -> SubsetCheck:
    """Can every user in ``subset`` and every URLLC user be served at once?

    ``feasible`` is None when the power-minimisation did not settle.
    """
    _require_fixed(config)
    idx = tuple(sorted(int(k) for k in subset))
    K, T = scenario.num_embb, scenario.num_antennas
    if any(k < 0 or k >= K for k in idx):
        raise IndexError("subset index out of range")
    bu, pu = urllc_minimum_powers(scenario, config)
    p_urllc = float(pu.sum())
    if p_urllc > config.total_power:
        return SubsetCheck(False, None, np.inf, p_urllc)
    be = config.embb_bandwidth
    gamma = qos.embb_target_sinr(config.target_rate, be)
    Hs = np.asarray(scenario.embb_channels)[list(idx)].reshape(len(idx), T)
    res = min_power_beamforming(Hs, gamma, config.noise_psd * be, config.total_power - p_urllc)
    if not res.feasible:
        return SubsetCheck(res.feasible, None, res.power, p_urllc)
    Me = np.zeros((K, T), dtype=complex)
    Me[list(idx)] = res.beamformers
    Hu = np.asarray(scenario.urllc_channels)
    Mu = (np.sqrt(pu) / np.maximum(np.linalg.norm(Hu, axis=1), 1e-300))[:, None] * Hu if len(pu) else Hu.copy()
    gains = np.abs(np.asarray(scenario.embb_channels).conj() @ Me.T) ** 2 if K else np.zeros((0, 0))
    beta = gains.sum(axis=1) - np.diag(gains) + config.noise_psd * be if K else np.zeros(0)
    slack = np.maximum(0.0, gamma - np.diag(gains) / beta) if K else np.zeros(0)
    slack[list(idx)] = 0.0
    witness = SolutionPoint(Me, Mu, be, bu, beta, slack)
    return SubsetCheck(True, witness, res.power, p_urllc)


def _mask(subset: tuple[int, ...]) -> int:
    return sum(1 << k for k in subset)


def exhaustive_max_admitted(scenario: Scenario, config: SystemConfig, *,
                            prune: bool = True) -> OracleResult:
    """Largest jointly feasible eMBB subset.

    Subsets are scanned from the largest size down.  All subsets of the
    winning size are checked and the one with the least eMBB power wins,
    lowest indices breaking exact ties.  With ``prune`` set, supersets of
    infeasible single users are skipped; that never changes the answer
    because feasibility is closed under taking subsets.
    """
    _require_fixed(config)
    K = scenario.num_embb
    if K > MAX_ORACLE_USERS:
        raise ConfigError([Violation("num_embb", f"exhaustive search allows at most {MAX_ORACLE_USERS} eMBB users")])
    records: list[OracleRecord] = []
    empty = subset_feasible((), scenario, config)
    records.append(OracleRecord(0, empty.feasible, empty.total_power))
    if not empty.feasible:
        return OracleResult(0, (), empty.witness, empty.total_power, empty.indeterminate, records)
    candidates = list(range(K))
    if prune:
        candidates = []
        for k in range(K):
            chk = subset_feasible((k,), scenario, config)
            records.append(OracleRecord(_mask((k,)), chk.feasible, chk.total_power))
            if chk.feasible is not False:
                candidates.append(k)
    indeterminate = False
    for size in range(len(candidates), 0, -1):
        best: tuple[float, tuple[int, ...], SubsetCheck] | None = None
        for subset in itertools.combinations(candidates, size):
            chk = subset_feasible(subset, scenario, config)
            records.append(OracleRecord(_mask(subset), chk.feasible, chk.total_power))
            if chk.feasible is None:
                indeterminate = True
            elif chk.feasible and (best is None or chk.embb_power < best[0]):
                best = (chk.embb_power, subset, chk)
        if best is not None:
            _, subset, chk = best
            return OracleResult(size, subset, chk.witness, chk.total_power, indeterminate, records)
    return OracleResult(0, (), empty.witness, empty.total_power, indeterminate, records)
