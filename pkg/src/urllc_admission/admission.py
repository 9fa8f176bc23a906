"""Outer sequential convex loop: reweighted slack minimisation."""
from __future__ import annotations

import logging
import math

import numpy as np

from . import qos
from .linearize import ExpansionPoint, log_surrogate
from .model import AdmissionResult, Scenario, SolutionPoint, SystemConfig, TraceRecord
from .subsolver import solve_subproblem

logger = logging.getLogger(__name__)


def count_admitted(s: np.ndarray, admit_tolerance: float) -> tuple[int, tuple[int, ...]]:
    """Users whose slack is at most ``admit_tolerance`` (0-based indices)."""
    idx = tuple(int(k) for k in np.flatnonzero(np.asarray(s, dtype=float) <= admit_tolerance))
    return len(idx), idx


def initial_point(scenario: Scenario, config: SystemConfig) -> SolutionPoint:
    """Maximum-ratio beamformers with equal power for every user.

    The eMBB/URLLC split follows the config (half/half when free); URLLC
    users share their part evenly.  beta is the exact interference plus
    noise and s the SINR shortfall, so the point meets the eMBB rows.
    """
    K, J, T = scenario.num_embb, scenario.num_urllc, scenario.num_antennas
    n_users = K + J
    p_each = config.total_power / n_users if n_users else 0.0

    def mrt(H: np.ndarray) -> np.ndarray:
        H = np.asarray(H, dtype=complex).reshape(-1, T)
        norms = np.linalg.norm(H, axis=1, keepdims=True)
        return math.sqrt(p_each) * H / np.where(norms > 0, norms, 1.0)

    if config.split_mode == "fixed":
        be = config.embb_bandwidth
        bu_total = config.total_bandwidth - be
    else:
        be = config.total_bandwidth / 2.0
        bu_total = config.total_bandwidth / 2.0
    bu = np.full(J, bu_total / J) if J else np.zeros(0)
    Me = mrt(scenario.embb_channels)
    Mu = mrt(scenario.urllc_channels)
    gains = np.abs(np.asarray(scenario.embb_channels).conj() @ Me.T) ** 2 if K else np.zeros((0, 0))
    beta = gains.sum(axis=1) - np.diag(gains) + config.noise_psd * be if K else np.zeros(0)
    sinr = np.diag(gains) / beta if K else np.zeros(0)
    gamma = qos.embb_target_sinr(config.target_rate, be)
    s = np.maximum(0.0, gamma - sinr)
    return SolutionPoint(Me, Mu, be, bu, beta, s)


def anchor_from(point: SolutionPoint) -> ExpansionPoint:
    return ExpansionPoint(
        embb_beamformers=point.embb_beamformers,
        interference=point.interference,
        urllc_beamformers=point.urllc_beamformers,
        urllc_bandwidths=point.urllc_bandwidths,
        slack=point.slack,
        embb_bandwidth=point.embb_bandwidth,
    )


def initialize(scenario: Scenario, config: SystemConfig) -> ExpansionPoint:
    return anchor_from(initial_point(scenario, config))


def _blend(old: SolutionPoint, new: SolutionPoint, keep: float) -> SolutionPoint:
    mix = lambda a, b: keep * np.asarray(a) + (1.0 - keep) * np.asarray(b)  # noqa: E731
    return SolutionPoint(
        mix(old.embb_beamformers, new.embb_beamformers),
        mix(old.urllc_beamformers, new.urllc_beamformers),
        float(mix(old.embb_bandwidth, new.embb_bandwidth)),
        mix(old.urllc_bandwidths, new.urllc_bandwidths),
        mix(old.interference, new.interference),
        mix(old.slack, new.slack),
    )


def _final_report(point: SolutionPoint, scenario: Scenario, config: SystemConfig):
    sinr = qos.all_embb_sinr(point, scenario, config) if scenario.num_embb else np.zeros(0)
    snr = qos.all_urllc_snr(point, scenario, config) if scenario.num_urllc else np.zeros(0)
    return sinr, snr


def run(scenario: Scenario, config: SystemConfig) -> AdmissionResult:
    """Iterate linearise-and-solve until the log-sum objective settles.

    Stops when two consecutive values of sum_k log(s_k + delta) differ by
    less than ``config.stop_threshold`` (the first solve is compared with
    the initial point) or after ``config.max_outer_iters`` solves.
    """
    anchor = initialize(scenario, config)
    prev_point: SolutionPoint | None = None
    f_prev = log_surrogate(anchor.slack, config.delta)
    trace: list[TraceRecord] = []
    objective_trace: list[float] = []
    status = "max_iters"
    point: SolutionPoint | None = None
    for p in range(1, config.max_outer_iters + 1):
        rep = solve_subproblem(scenario, config, anchor)
        for line in rep.log:
            logger.debug("iter %d: %s", p, line)
        if rep.status == "infeasible" or rep.solution is None:
            if p == 1:
                return AdmissionResult((), [], None, np.zeros(0), np.zeros(0), 0, "urllc_infeasible")
            status = "solver_failure"
            break
        if rep.status != "optimal":
            logger.warning("subproblem %d finished with status %s (violation %.2e)",
                           p, rep.status, rep.max_constraint_violation)
            if rep.max_constraint_violation > 1e-6:
                status = "solver_failure"
                break
        point = rep.solution
        if config.damping > 0 and prev_point is not None:
            point = _blend(prev_point, point, config.damping)
        f = log_surrogate(point.slack, config.delta)
        objective_trace.append(f)
        n_adm, _ = count_admitted(point.slack, config.admit_tolerance)
        trace.append(TraceRecord(p, f, n_adm, rep.max_constraint_violation))
        anchor = anchor_from(point)
        prev_point = point
        if abs(f - f_prev) < config.stop_threshold:
            status = "converged"
            break
        f_prev = f
    if point is None:
        return AdmissionResult((), objective_trace, None, np.zeros(0), np.zeros(0),
                               len(trace), status, trace)
    _, admitted = count_admitted(point.slack, config.admit_tolerance)
    sinr, snr = _final_report(point, scenario, config)
    return AdmissionResult(admitted, objective_trace, point, sinr, snr, len(trace), status, trace)
