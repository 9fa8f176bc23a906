"""Closed-form QoS math: SINR/SNR, rates, targets and effective bandwidth."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .model import Scenario, SolutionPoint, SystemConfig

LN2 = math.log(2.0)

# Rational approximation of the standard normal quantile (P. J. Acklam).
_A = (-3.969683028665376e+01, 2.209460984245205e+02, -2.759285104469687e+02,
      1.383577518672690e+02, -3.066479806614716e+01, 2.506628277459239e+00)
_B = (-5.447609879822406e+01, 1.615858368580409e+02, -1.556989798598866e+02,
      6.680131188771972e+01, -1.328068155288572e+01)
_C = (-7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e+00,
      -2.549671010229528e+00, 4.374664141464968e+00, 2.938163982698783e+00)
_D = (7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e+00,
      3.754408661907416e+00)
_P_LOW = 0.02425


def q_function(x: float) -> float:
    """Upper tail of the standard normal, Q(x) = P[N(0,1) > x]."""
    return 0.5 * math.erfc(x / math.sqrt(2.0))


def _acklam_lower(p: float) -> float:
    # Phi^{-1}(p) for p in (0, 0.5]
    if p < _P_LOW:
        q = math.sqrt(-2.0 * math.log(p))
        num = ((((_C[0] * q + _C[1]) * q + _C[2]) * q + _C[3]) * q + _C[4]) * q + _C[5]
        den = (((_D[0] * q + _D[1]) * q + _D[2]) * q + _D[3]) * q + 1.0
        return num / den
    q = p - 0.5
    r = q * q
    num = (((((_A[0] * r + _A[1]) * r + _A[2]) * r + _A[3]) * r + _A[4]) * r + _A[5]) * q
    den = ((((_B[0] * r + _B[1]) * r + _B[2]) * r + _B[3]) * r + _B[4]) * r + 1.0
    return num / den


def q_inv(p: float) -> float:
    """Inverse Q-function: the x with Q(x) = p, for 0 < p < 1.

    Acklam's rational approximation followed by one Newton step on Q; the
    step works on the tail probability directly so it keeps relative
    accuracy for p around 1e-9.
    """
    if not (0.0 < p < 1.0):
        raise ValueError(f"q_inv needs 0 < p < 1, got {p!r}")
    if p > 0.5:
        return -q_inv(1.0 - p)
    x = -_acklam_lower(p)
    pdf = math.exp(-0.5 * x * x) / math.sqrt(2.0 * math.pi)
    return x + (q_function(x) - p) / pdf


def embb_sinr(point: SolutionPoint, k: int, scenario: Scenario, config: SystemConfig) -> float:
    """SINR of eMBB user ``k`` under beamformers and bandwidth of ``point``."""
    b = point.embb_bandwidth
    if not b > 0:
        raise ValueError("eMBB bandwidth must be positive")
    h = scenario.embb_channels[k]
    gains = np.abs(point.embb_beamformers @ h.conj()) ** 2
    interference = gains.sum() - gains[k]
    return float(gains[k] / (interference + config.noise_psd * b))


def urllc_snr(point: SolutionPoint, j: int, scenario: Scenario, config: SystemConfig) -> float:
    b = point.urllc_bandwidths[j]
    if not b > 0:
        raise ValueError("URLLC bandwidth must be positive")
    h = scenario.urllc_channels[j]
    return float(abs(np.vdot(h, point.urllc_beamformers[j])) ** 2 / (config.noise_psd * b))


def all_embb_sinr(point: SolutionPoint, scenario: Scenario, config: SystemConfig) -> np.ndarray:
    return np.array([embb_sinr(point, k, scenario, config) for k in range(scenario.num_embb)])


def all_urllc_snr(point: SolutionPoint, scenario: Scenario, config: SystemConfig) -> np.ndarray:
    return np.array([urllc_snr(point, j, scenario, config) for j in range(scenario.num_urllc)])


def embb_rate(sinr: float, bandwidth: float) -> float:
    """Shannon rate in bits/s."""
    return bandwidth * math.log2(1.0 + sinr)


def embb_target_sinr(target_rate: float, bandwidth: float) -> float:
    if not bandwidth > 0:
        raise ValueError("eMBB bandwidth must be positive")
    return math.expm1(target_rate * LN2 / bandwidth)


def effective_bandwidth(packet_size: float, frame_duration: float, eps_q: float,
                        queue_delay: float, arrival_rate: float) -> float:
    """Effective bandwidth (bits/frame) of Poisson packet arrivals.

    ``arrival_rate`` is in packets per frame; ``frame_duration`` and
    ``queue_delay`` share a time unit so only their ratio matters.
    """
    for name, v in (("packet_size", packet_size), ("frame_duration", frame_duration),
                    ("eps_q", eps_q), ("queue_delay", queue_delay),
                    ("arrival_rate", arrival_rate)):
        if not v > 0:
            raise ValueError(f"{name} must be positive")
    if not eps_q < 1:
        raise ValueError("eps_q must be < 1")
    log_term = frame_duration * math.log(1.0 / eps_q)
    return packet_size * log_term / (queue_delay * math.log1p(log_term / (arrival_rate * queue_delay)))


def config_effective_bandwidth(config: SystemConfig) -> float:
    return effective_bandwidth(config.packet_size, config.frame_duration, config.eps_q,
                               config.queue_delay, config.arrival_rate)


def urllc_snr_threshold(eb: float, tau: float, bandwidth: float, eps_c: float) -> float:
    """SNR a URLLC user needs on ``bandwidth`` Hz to carry ``eb`` bits/frame.

    Uses the worst-case dispersion V = 1, so the resulting finite-blocklength
    rate is never below ``eb``.
    """
    n = tau * bandwidth
    if not n > 0:
        raise ValueError("blocklength tau*b must be positive")
    return math.expm1(eb * LN2 / n + math.sqrt(1.0 / n) * q_inv(eps_c))


def urllc_rate_fbl(sinr: float, tau: float, bandwidth: float, eps_c: float) -> float:
    """Normal-approximation achievable rate in bits/frame (may be negative)."""
    n = tau * bandwidth
    if not n > 0:
        raise ValueError("blocklength tau*b must be positive")
    dispersion = 1.0 - 1.0 / (1.0 + sinr) ** 2
    return n / LN2 * (math.log1p(sinr) - math.sqrt(dispersion / n) * q_inv(eps_c))


def reported_urllc_rate(sinr: float, tau: float, bandwidth: float, eps_c: float) -> float:
    """:func:`urllc_rate_fbl` clamped at zero, for reporting only."""
    return max(0.0, urllc_rate_fbl(sinr, tau, bandwidth, eps_c))


@dataclass(frozen=True)
class UrllcQosTargets:
    effective_bandwidth: float
    snr_thresholds: np.ndarray
    dispersion: float = 1.0 - 1e-12

    def __post_init__(self) -> None:
        if not self.effective_bandwidth > 0:
            raise ValueError("effective bandwidth must be positive")
        if np.any(np.asarray(self.snr_thresholds) <= 0):
            raise ValueError("SNR thresholds must be positive")
        if not 0 <= self.dispersion < 1:
            raise ValueError("dispersion must lie in [0, 1)")


def urllc_targets(config: SystemConfig, bandwidths: np.ndarray) -> UrllcQosTargets:
    eb = config_effective_bandwidth(config)
    th = np.array([urllc_snr_threshold(eb, config.tx_duration, b, config.eps_c)
                   for b in np.atleast_1d(bandwidths)])
    return UrllcQosTargets(eb, th)
