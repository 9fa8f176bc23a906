"""First-order surrogates used by the sequential convex loop.

Complex beamformers are treated as 2T real coordinates (real parts, then
imaginary parts).  Under that convention the gradient of m -> |h^H m|^2 is
2 h h^H m, and the tangent plane of a quadratic-over-linear function is a
global under-estimator.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np


def to_real(x: np.ndarray) -> np.ndarray:
    x = np.asarray(x, dtype=complex)
    return np.concatenate([x.real, x.imag], axis=-1)


def to_complex(v: np.ndarray) -> np.ndarray:
    v = np.asarray(v, dtype=float)
    T = v.shape[-1] // 2
    return v[..., :T] + 1j * v[..., T:]


@dataclass(frozen=True)
class ExpansionPoint:
    """Anchor of the linearisations: (m_e, beta, m_u, b_u, s)."""

    embb_beamformers: np.ndarray
    interference: np.ndarray
    urllc_beamformers: np.ndarray
    urllc_bandwidths: np.ndarray
    slack: np.ndarray
    # warm-start value only; no linearisation involves the eMBB bandwidth
    embb_bandwidth: float | None = None

    def __post_init__(self) -> None:
        if np.any(np.asarray(self.interference) <= 0):
            raise ValueError("anchor interference terms must be positive")
        if np.any(np.asarray(self.urllc_bandwidths) <= 0):
            raise ValueError("anchor URLLC bandwidths must be positive")
        if np.any(np.asarray(self.slack) < 0):
            raise ValueError("anchor slacks must be non-negative")


def _gain(m: np.ndarray, h: np.ndarray) -> float:
    return float(abs(np.vdot(h, m)) ** 2)


def g_value(m: np.ndarray, beta: float, h: np.ndarray) -> float:
    """|h^H m|^2 / beta."""
    if not beta > 0:
        raise ValueError("beta must be positive")
    return _gain(m, h) / beta


def g_gradient(m_hat: np.ndarray, beta_hat: float, h: np.ndarray) -> tuple[np.ndarray, float]:
    """Real gradient of g at (m_hat, beta_hat): (d/d[Re m, Im m], d/d beta)."""
    if not beta_hat > 0:
        raise ValueError("beta_hat must be positive")
    a = np.vdot(h, m_hat)
    grad_m = to_real(2.0 * h * a / beta_hat)
    return grad_m, -float(abs(a) ** 2) / beta_hat**2


def g_lin(m: np.ndarray, beta: float, m_hat: np.ndarray, beta_hat: float, h: np.ndarray) -> float:
    """Tangent-plane under-estimator of g anchored at (m_hat, beta_hat)."""
    grad_m, grad_b = g_gradient(m_hat, beta_hat, h)
    dm = to_real(np.asarray(m) - np.asarray(m_hat))
    return g_value(m_hat, beta_hat, h) + float(grad_m @ dm) + grad_b * (beta - beta_hat)


def z_value(m: np.ndarray, b: float, h: np.ndarray, noise_psd: float) -> float:
    """URLLC SNR |h^H m|^2 / (N0 b)."""
    if not (b > 0 and noise_psd > 0):
        raise ValueError("bandwidth and noise PSD must be positive")
    return _gain(m, h) / (noise_psd * b)


def z_gradient(m_hat: np.ndarray, b_hat: float, h: np.ndarray,
               noise_psd: float) -> tuple[np.ndarray, float]:
    if not (b_hat > 0 and noise_psd > 0):
        raise ValueError("bandwidth and noise PSD must be positive")
    a = np.vdot(h, m_hat)
    grad_m = to_real(2.0 * h * a / (noise_psd * b_hat))
    return grad_m, -float(abs(a) ** 2) / (noise_psd * b_hat**2)


def z_lin(m: np.ndarray, b: float, m_hat: np.ndarray, b_hat: float, h: np.ndarray,
          noise_psd: float) -> float:
    grad_m, grad_b = z_gradient(m_hat, b_hat, h, noise_psd)
    dm = to_real(np.asarray(m) - np.asarray(m_hat))
    return z_value(m_hat, b_hat, h, noise_psd) + float(grad_m @ dm) + grad_b * (b - b_hat)


def objective_lin(s: np.ndarray, s_hat: np.ndarray, delta: float) -> float:
    """Linearised log-sum objective with its constant part dropped."""
    return float(np.sum(np.asarray(s) / (np.asarray(s_hat) + delta)))


def log_surrogate(s: np.ndarray, delta: float) -> float:
    """Concave sparsity surrogate sum_k log(s_k + delta)."""
    return float(np.sum(np.log(np.asarray(s, dtype=float) + delta)))
