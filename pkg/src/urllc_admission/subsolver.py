"""Convex inner problem of the admission loop.

Decision variables are the eMBB slacks s, eMBB beamformers, interference
auxiliaries beta, the eMBB bandwidth (free split only), URLLC beamformers
and URLLC bandwidths (unless fixed uniform).  Everything is solved in
scaled units:

    x = m / sqrt(P_total),  b~ = b / B_total,  beta~ = beta / (N0 B_total),
    h~ = h * sqrt(P_total / (N0 B_total)),

under which SINR expressions keep their form and all budgets become 1.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Literal

import numpy as np

from . import linearize, qos
from .barrier import BarrierResult, barrier_minimize, find_interior, linear_objective
from .linearize import ExpansionPoint, to_complex, to_real
from .model import Scenario, SolutionPoint, SystemConfig

FEAS_TOL = 1e-6
KKT_TOL = 1e-6
BETA_TROUBLE = 1e6
BETA_CAP = 1e7
SLACK_CAP = 1e6

Status = Literal["optimal", "infeasible", "max_iters", "numerical_trouble"]


@dataclass
class SubproblemReport:
    solution: SolutionPoint | None
    objective: float
    max_constraint_violation: float
    kkt_residual: float
    inner_iterations: int
    status: Status
    log: list[str] = field(default_factory=list)


def _real_blocks(H: np.ndarray) -> np.ndarray:
    """(n, T) complex channels -> (n, 2, 2T) maps v -> (Re h^H x, Im h^H x)."""
    hr, hi = H.real, H.imag
    return np.stack([np.concatenate([hr, hi], axis=1),
                     np.concatenate([-hi, hr], axis=1)], axis=1)


class ScaledProblem:
    """Constraint system of the linearised subproblem in scaled units."""

    def __init__(self, scenario: Scenario, config: SystemConfig, anchor: ExpansionPoint):
        K, J, T = scenario.num_embb, scenario.num_urllc, scenario.num_antennas
        self.K, self.J, self.T = K, J, T
        TT = 2 * T
        self.TT = TT
        P, B, N0 = config.total_power, config.total_bandwidth, config.noise_psd
        self.p_scale = P
        self.b_scale = B
        self.beta_scale = N0 * B
        ch = math.sqrt(P / (N0 * B))
        He = np.asarray(scenario.embb_channels, dtype=complex).reshape(K, T) * ch
        Hu = np.asarray(scenario.urllc_channels, dtype=complex).reshape(J, T) * ch
        self.He, self.Hu = He, Hu
        self.Ue = _real_blocks(He)
        self.Uu = _real_blocks(Hu)
        self.Ae = np.einsum("kat,kau->ktu", self.Ue, self.Ue)

        self.free = config.split_mode == "free"
        self.uniform = (not self.free) and config.uniform_urllc_bandwidth
        self.be_fixed = None if self.free else config.embb_fraction
        self.rho = config.target_rate * qos.LN2 / B
        eb = qos.config_effective_bandwidth(config)
        n_scale = config.tx_duration * B
        self.ua = eb * qos.LN2 / n_scale
        self.uc = qos.q_inv(config.eps_c) / math.sqrt(n_scale)
        self.bmin = config.min_bandwidth / B
        self.bu_fixed = (1.0 - self.be_fixed) / J if (self.uniform and J) else None

        # anchor in scaled units
        xe_hat = np.asarray(anchor.embb_beamformers, dtype=complex).reshape(K, T) / math.sqrt(P)
        xu_hat = np.asarray(anchor.urllc_beamformers, dtype=complex).reshape(J, T) / math.sqrt(P)
        self.beta_hat = np.asarray(anchor.interference, dtype=float) / self.beta_scale
        self.bu_hat = np.asarray(anchor.urllc_bandwidths, dtype=float) / B
        if self.uniform:
            self.bu_hat = np.full(J, self.bu_fixed)
        self.s_hat = np.asarray(anchor.slack, dtype=float)
        self.be_hat = None if anchor.embb_bandwidth is None else anchor.embb_bandwidth / B
        self.weights = 1.0 / (self.s_hat + config.delta)
        self.ve_hat = to_real(xe_hat)
        self.vu_hat = to_real(xu_hat)

        # affine surrogate coefficients from the analytic gradients
        self.ce = np.zeros((K, TT))
        self.ae = np.zeros(K)
        self.g0 = np.zeros(K)
        for k in range(K):
            gm, gb = linearize.g_gradient(xe_hat[k], self.beta_hat[k], He[k])
            self.ce[k], self.ae[k] = gm, -gb
            self.g0[k] = linearize.g_value(xe_hat[k], self.beta_hat[k], He[k])
        self.cu = np.zeros((J, TT))
        self.au = np.zeros(J)
        self.z0 = np.zeros(J)
        for j in range(J):
            gm, gb = linearize.z_gradient(xu_hat[j], self.bu_hat[j], Hu[j], 1.0)
            self.cu[j], self.au[j] = gm, -gb
            self.z0[j] = linearize.z_value(xu_hat[j], self.bu_hat[j], Hu[j], 1.0)
        # g_hat(v, beta) = ce.v - ae*beta + const (const is ~0 for these functions)
        self.g_const = self.g0 - np.einsum("kt,kt->k", self.ce, self.ve_hat) + self.ae * self.beta_hat
        self.z_const = self.z0 - np.einsum("jt,jt->j", self.cu, self.vu_hat) + self.au * self.bu_hat

        # variable layout
        o = 0
        self.i_s = slice(o, o + K); o += K
        self.i_xe = slice(o, o + K * TT); o += K * TT
        self.i_beta = slice(o, o + K); o += K
        self.i_be = None
        if self.free:
            self.i_be = o; o += 1
        self.i_xu = slice(o, o + J * TT); o += J * TT
        self.i_bu = None
        if not self.uniform:
            self.i_bu = slice(o, o + J); o += J
        self.n = o
        self.bw_row = self.free or (not self.uniform and J > 0)
        self.n_bmin = (J if self.i_bu is not None else 0) + (1 if self.free else 0)
        self.extra: tuple[np.ndarray, float] | None = None

        # constraint row layout
        r = 0
        self.r_a = slice(r, r + K); r += K
        self.r_b = slice(r, r + K); r += K
        self.r_c = slice(r, r + J); r += J
        self.r_bw = None
        if self.bw_row:
            self.r_bw = r; r += 1
        self.r_p = r; r += 1
        self.r_s0 = slice(r, r + K); r += K
        self.r_sc = slice(r, r + K); r += K
        self.r_bmin = slice(r, r + self.n_bmin); r += self.n_bmin
        self.r_bcap = slice(r, r + K); r += K
        self.m_base = r
        self.m = r

    def add_linear_constraint(self, a: np.ndarray, bound: float) -> None:
        """Append a single ``a.z - bound <= 0`` row."""
        self.extra = (np.asarray(a, dtype=float), float(bound))
        self.m = self.m_base + 1

    # -- unpacking ----------------------------------------------------
    def unpack(self, z: np.ndarray):
        K, J, TT = self.K, self.J, self.TT
        s = z[self.i_s]
        Ve = z[self.i_xe].reshape(K, TT)
        beta = z[self.i_beta]
        be = z[self.i_be] if self.free else self.be_fixed
        Vu = z[self.i_xu].reshape(J, TT)
        bu = z[self.i_bu] if self.i_bu is not None else np.full(J, self.bu_fixed if J else 0.0)
        return s, Ve, beta, be, Vu, bu

    def pack(self, s, Ve, beta, be, Vu, bu) -> np.ndarray:
        z = np.zeros(self.n)
        z[self.i_s] = s
        z[self.i_xe] = np.asarray(Ve).reshape(-1)
        z[self.i_beta] = beta
        if self.free:
            z[self.i_be] = be
        z[self.i_xu] = np.asarray(Vu).reshape(-1)
        if self.i_bu is not None:
            z[self.i_bu] = bu
        return z

    # -- pieces --------------------------------------------------------
    def embb_target(self, be: float) -> float:
        with np.errstate(over="ignore"):
            return float(np.expm1(self.rho / be))

    def _urllc_u(self, bu: np.ndarray):
        u = self.ua / bu + self.uc / np.sqrt(bu)
        du = -self.ua / bu**2 - 0.5 * self.uc * bu**-1.5
        d2u = 2.0 * self.ua / bu**3 + 0.75 * self.uc * bu**-2.5
        return u, du, d2u

    def urllc_target(self, bu: np.ndarray) -> np.ndarray:
        with np.errstate(over="ignore"):
            return np.expm1(self.ua / bu + self.uc / np.sqrt(bu))

    def gains(self, Ve: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Y[k, i] = (Re, Im) of h_k^H x_i; G[k, i] = |h_k^H x_i|^2."""
        Y = np.einsum("kat,it->kia", self.Ue, Ve)
        return Y, np.sum(Y * Y, axis=-1)

    def values(self, z: np.ndarray) -> np.ndarray:
        s, Ve, beta, be, Vu, bu = self.unpack(z)
        if (self.free and not be > 0) or np.any(bu <= 0):
            return np.full(self.m, np.inf)
        f = np.empty(self.m)
        _, Gm = self.gains(Ve)
        interf = Gm.sum(axis=1) - np.diag(Gm) if self.K else np.zeros(0)
        g_hat = np.einsum("kt,kt->k", self.ce, Ve) - self.ae * beta + self.g_const
        f[self.r_a] = self.embb_target(be) - s - g_hat
        f[self.r_b] = interf + be - beta
        z_hat = np.einsum("jt,jt->j", self.cu, Vu) - self.au * bu + self.z_const
        f[self.r_c] = self.urllc_target(bu) - z_hat
        if self.r_bw is not None:
            f[self.r_bw] = (be + bu.sum() - 1.0) if self.free else (bu.sum() - (1.0 - self.be_fixed))
        f[self.r_p] = np.sum(Ve * Ve) + np.sum(Vu * Vu) - 1.0
        f[self.r_s0] = -s
        f[self.r_sc] = s - SLACK_CAP
        low = []
        if self.i_bu is not None:
            low.append(self.bmin - bu)
        if self.free:
            low.append(np.array([self.bmin - be]))
        if low:
            f[self.r_bmin] = np.concatenate(low)
        f[self.r_bcap] = beta - BETA_CAP
        if self.extra is not None:
            f[self.m_base] = self.extra[0] @ z - self.extra[1]
        f[~np.isfinite(f)] = np.inf
        return f

    def jacobian(self, z: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        K, J, TT = self.K, self.J, self.TT
        f = self.values(z)
        s, Ve, beta, be, Vu, bu = self.unpack(z)
        G = np.zeros((self.m, self.n))
        ks = np.arange(K)
        xe0 = self.i_xe.start
        xu0 = self.i_xu.start
        # eMBB surrogate rows
        ra = self.r_a.start
        G[ra + ks, self.i_s.start + ks] = -1.0
        for k in range(K):
            G[ra + k, xe0 + k * TT: xe0 + (k + 1) * TT] = -self.ce[k]
        G[ra + ks, self.i_beta.start + ks] = self.ae
        if self.free:
            psi = math.exp(min(self.rho / be, 700.0))
            G[self.r_a, self.i_be] = -psi * self.rho / be**2
        # interference rows: d/dv_i |h_k^H x_i|^2 = 2 U_k^T Y[k, i]
        rb = self.r_b.start
        if K:
            Y, _ = self.gains(Ve)
            D = 2.0 * np.einsum("kat,kia->kit", self.Ue, Y)
            D[ks, ks] = 0.0
            G[rb:rb + K, xe0:xe0 + K * TT] = D.reshape(K, K * TT)
        G[rb + ks, self.i_beta.start + ks] = -1.0
        if self.free:
            G[self.r_b, self.i_be] = 1.0
        # URLLC rows
        rc = self.r_c.start
        for j in range(J):
            G[rc + j, xu0 + j * TT: xu0 + (j + 1) * TT] = -self.cu[j]
        if self.i_bu is not None and J:
            u, du, _ = self._urllc_u(bu)
            js = np.arange(J)
            G[rc + js, self.i_bu.start + js] = np.exp(np.minimum(u, 700.0)) * du + self.au
        if self.r_bw is not None:
            if self.free:
                G[self.r_bw, self.i_be] = 1.0
            if self.i_bu is not None:
                G[self.r_bw, self.i_bu] = 1.0
        G[self.r_p, self.i_xe] = 2.0 * z[self.i_xe]
        G[self.r_p, self.i_xu] = 2.0 * z[self.i_xu]
        G[self.r_s0.start + ks, self.i_s.start + ks] = -1.0
        G[self.r_sc.start + ks, self.i_s.start + ks] = 1.0
        r = self.r_bmin.start
        if self.i_bu is not None:
            js = np.arange(J)
            G[r + js, self.i_bu.start + js] = -1.0
            r += J
        if self.free:
            G[r, self.i_be] = -1.0
        G[self.r_bcap.start + ks, self.i_beta.start + ks] = 1.0
        if self.extra is not None:
            G[self.m_base] = self.extra[0]
        return f, G

    def hessian(self, z: np.ndarray, w: np.ndarray) -> np.ndarray:
        K, J, TT = self.K, self.J, self.TT
        s, Ve, beta, be, Vu, bu = self.unpack(z)
        H = np.zeros((self.n, self.n))
        xe0 = self.i_xe.start
        if K:
            wb = w[self.r_b]
            S = np.einsum("k,ktu->tu", wb, self.Ae)
            for i in range(K):
                sl = slice(xe0 + i * TT, xe0 + (i + 1) * TT)
                H[sl, sl] = 2.0 * (S - wb[i] * self.Ae[i])
        wp = w[self.r_p]
        idx = np.r_[np.arange(self.i_xe.start, self.i_xe.stop), np.arange(self.i_xu.start, self.i_xu.stop)]
        H[idx, idx] += 2.0 * wp
        if self.free:
            r = self.rho
            psi = math.exp(min(r / be, 700.0))
            H[self.i_be, self.i_be] += psi * (r * r / be**4 + 2.0 * r / be**3) * np.sum(w[self.r_a])
        if self.i_bu is not None and J:
            u, du, d2u = self._urllc_u(bu)
            js = np.arange(J)
            ii = self.i_bu.start + js
            H[ii, ii] += np.exp(np.minimum(u, 700.0)) * (du * du + d2u) * w[self.r_c]
        return H

    # -- conversion -----------------------------------------------------
    def anchor_start(self) -> np.ndarray:
        be = self.be_fixed
        if self.free:
            be = 0.5 if self.be_hat is None else self.be_hat
        return self.pack(self.s_hat, self.ve_hat, self.beta_hat, be, self.vu_hat, self.bu_hat)

    def to_solution(self, z: np.ndarray) -> SolutionPoint:
        s, Ve, beta, be, Vu, bu = self.unpack(z)
        rp = math.sqrt(self.p_scale)
        return SolutionPoint(
            embb_beamformers=to_complex(Ve).reshape(self.K, self.T) * rp,
            urllc_beamformers=to_complex(Vu).reshape(self.J, self.T) * rp,
            embb_bandwidth=float(be) * self.b_scale,
            urllc_bandwidths=np.asarray(bu, dtype=float) * self.b_scale,
            interference=np.asarray(beta, dtype=float) * self.beta_scale,
            slack=np.maximum(np.asarray(s, dtype=float), 0.0),
        )

    def from_solution(self, point: SolutionPoint) -> np.ndarray:
        rp = math.sqrt(self.p_scale)
        return self.pack(
            np.asarray(point.slack, dtype=float),
            to_real(np.asarray(point.embb_beamformers).reshape(self.K, self.T) / rp),
            np.asarray(point.interference, dtype=float) / self.beta_scale,
            point.embb_bandwidth / self.b_scale,
            to_real(np.asarray(point.urllc_beamformers).reshape(self.J, self.T) / rp),
            np.asarray(point.urllc_bandwidths, dtype=float) / self.b_scale,
        )

    def slack_objective(self) -> np.ndarray:
        c = np.zeros(self.n)
        c[self.i_s] = self.weights
        return c

    def power_objective(self):
        idx = np.r_[np.arange(self.i_xe.start, self.i_xe.stop), np.arange(self.i_xu.start, self.i_xu.stop)]
        hess = np.zeros((self.n, self.n))
        hess[idx, idx] = 2.0

        def f(z: np.ndarray):
            g = np.zeros(self.n)
            g[idx] = 2.0 * z[idx]
            return float(z[idx] @ z[idx]), g, hess
        return f


def _repair_slack(prob: ScaledProblem, z: np.ndarray, margin: float = 1e-3) -> np.ndarray:
    """Raise s so the eMBB rows hold strictly; other rows are untouched."""
    z = z.copy()
    s, Ve, beta, be, Vu, bu = prob.unpack(z)
    g_hat = np.einsum("kt,kt->k", prob.ce, Ve) - prob.ae * beta + prob.g_const
    need = prob.embb_target(be) - g_hat
    z[prob.i_s] = np.maximum(np.maximum(s, need + margin), margin)
    return z


def _polish_slack(prob: ScaledProblem, z: np.ndarray) -> np.ndarray:
    """Lower each s_k to the least value its eMBB row allows.

    s_k appears only in its own row and the objective increases in s, so
    this is exact and removes the 1/t offset the barrier leaves on s.
    """
    z = z.copy()
    s, Ve, beta, be, Vu, bu = prob.unpack(z)
    g_hat = np.einsum("kt,kt->k", prob.ce, Ve) - prob.ae * beta + prob.g_const
    z[prob.i_s] = np.minimum(s, np.maximum(prob.embb_target(be) - g_hat, 0.0))
    return z


def _interior_pull(prob: ScaledProblem, z: np.ndarray, shrink: float = 1e-3) -> np.ndarray:
    """Move a boundary point (e.g. the previous optimum) slightly inward.

    Only eMBB quantities move: the beamformers shrink, beta is lifted above
    the interference it bounds and s absorbs the lost SINR.  URLLC rows are
    left alone because they may be tight at the optimum.
    """
    s, Ve, beta, be, Vu, bu = prob.unpack(z)
    Ve = (1.0 - shrink) * Ve
    zz = prob.pack(s, Ve, beta, be, Vu, bu)
    _, Gm = prob.gains(Ve)
    interf = Gm.sum(axis=1) - np.diag(Gm) if prob.K else np.zeros(0)
    zz[prob.i_beta] = np.minimum(np.maximum(beta, (1.0 + shrink) * (interf + be) + 1e-12), 0.5 * BETA_CAP)
    return _repair_slack(prob, zz)


def _phase1_start(prob: ScaledProblem, z: np.ndarray) -> np.ndarray:
    """Shrink budgets slightly and lift beta so only genuine conflicts remain."""
    s, Ve, beta, be, Vu, bu = prob.unpack(z)
    Ve = 0.9 * Ve
    Vu = 0.9 * Vu
    if prob.free:
        be = min(max(be, 2 * prob.bmin), 0.9)
    bu = np.maximum(bu, 2 * prob.bmin)
    if prob.i_bu is not None and prob.J:
        room = (1.0 - be) * 0.9
        if bu.sum() > room:
            bu = bu * room / bu.sum()
    zz = prob.pack(s, Ve, beta, be, Vu, bu)
    _, Gm = prob.gains(Ve)
    interf = Gm.sum(axis=1) - np.diag(Gm) if prob.K else np.zeros(0)
    beta = np.maximum(beta, 1.1 * (interf + be) + 1e-9)
    zz[prob.i_beta] = np.minimum(beta, 0.5 * BETA_CAP)
    return _repair_slack(prob, zz)


def _audit(prob: ScaledProblem, z: np.ndarray) -> float:
    f = prob.values(z)[: prob.m_base]
    return float(max(0.0, f.max())) if f.size else 0.0


def solve_subproblem(scenario: Scenario, config: SystemConfig, anchor: ExpansionPoint,
                     *, start: SolutionPoint | None = None, gap_tol: float = 1e-8,
                     max_newton: int = 200) -> SubproblemReport:
    """Solve the linearised convex subproblem around ``anchor``.

    ``start`` is a warm-start point (usually the previous solution, which is
    strictly feasible for this subproblem).  Without it the anchor itself is
    tried and a phase-1 search runs when it is not strictly feasible.

    Among optimal slack vectors the one with the least transmit power is
    returned when ``config.power_tiebreak`` is set.
    """
    log: list[str] = []
    if config.total_power <= 0:
        return _zero_power_report(scenario, config, anchor)
    prob = ScaledProblem(scenario, config, anchor)
    z_raw = prob.from_solution(start) if start is not None else prob.anchor_start()
    # the raw start is feasible up to rounding when it is a previous optimum
    warm = bool(np.all(prob.values(z_raw) <= 1e-12))
    iters = 0
    z0 = _interior_pull(prob, z_raw)
    if not np.all(prob.values(z0) < 0):
        z_try = _repair_slack(prob, z_raw)
        if np.all(prob.values(z_try) < 0):
            z0 = z_try
        else:
            ph = find_interior(prob, _phase1_start(prob, z0), max_newton=max_newton)
            iters += ph.newton_iterations
            log.append(f"phase1 feasible={ph.feasible} sigma={ph.sigma:.3e} steps={ph.newton_iterations}")
            if not ph.feasible:
                return SubproblemReport(None, math.inf, ph.sigma, math.inf, iters, "infeasible", log)
            z0 = ph.z
    c = prob.slack_objective()
    res = barrier_minimize(linear_objective(c), prob, z0, gap_tol=gap_tol, max_newton=max_newton)
    iters += res.newton_iterations
    log.append(f"stage1 status={res.status} obj={res.objective:.6e} gap={res.gap:.1e} steps={res.newton_iterations}")
    z_int = res.z  # strictly interior; stage 2 starts here
    z1 = _polish_slack(prob, z_int)
    # best-of safeguard: never end above the previous optimum by more than rounding
    if warm and c @ z_raw < c @ z1 - 1e-10 * max(1.0, abs(float(c @ z1))):
        z1 = z_raw
        z_int = None
    status: Status = res.status  # type: ignore[assignment]
    kkt = res.kkt_residual
    power1 = float(np.sum(z1[prob.i_xe] ** 2) + np.sum(z1[prob.i_xu] ** 2))
    # a binding power budget means every optimal point already uses full power
    if (config.power_tiebreak and status == "optimal" and prob.n and power1 < 1.0 - 1e-6
            and z_int is not None):
        obj1 = float(c @ z_int)
        prob.add_linear_constraint(c, obj1 + 1e-12 * max(1.0, abs(obj1)) + 1e-13)
        res2 = barrier_minimize(prob.power_objective(), prob, z_int, gap_tol=gap_tol, max_newton=max_newton)
        iters += res2.newton_iterations
        log.append(f"stage2 status={res2.status} power={res2.objective:.6e} steps={res2.newton_iterations}")
        z2 = _polish_slack(prob, res2.z)
        if (res2.status == "optimal" and res2.objective <= power1
                and c @ z2 <= c @ z1 + 1e-10 * max(1.0, abs(float(c @ z1)))):
            z1 = z2
    viol = _audit(prob, z1)
    s, Ve, beta, be, Vu, bu = prob.unpack(z1)
    # rejected users may carry any beta their slack absorbs; only admitted
    # users need a physically sensible interference level
    if np.any(beta[s <= config.admit_tolerance] > BETA_TROUBLE):
        status = "numerical_trouble"
        log.append("interference auxiliary exceeded its sanity bound")
    if status == "optimal" and (viol > FEAS_TOL or kkt > KKT_TOL):
        status = "numerical_trouble"
    return SubproblemReport(prob.to_solution(z1), float(c @ z1), viol, kkt, iters, status, log)


def _zero_power_report(scenario: Scenario, config: SystemConfig,
                       anchor: ExpansionPoint) -> SubproblemReport:
    """Closed form for P_total = 0: nothing can be transmitted."""
    K, J, T = scenario.num_embb, scenario.num_urllc, scenario.num_antennas
    be = config.embb_bandwidth if config.split_mode == "fixed" else config.total_bandwidth / 2
    gamma = qos.embb_target_sinr(config.target_rate, be)
    bu = np.full(J, (config.total_bandwidth - be) / J) if J else np.zeros(0)
    point = SolutionPoint(np.zeros((K, T), complex), np.zeros((J, T), complex), be, bu,
                          np.full(K, config.noise_psd * be), np.full(K, gamma))
    if J:
        return SubproblemReport(point, math.inf, math.inf, math.inf, 0, "infeasible",
                                ["zero power budget cannot serve URLLC users"])
    w = 1.0 / (np.asarray(anchor.slack) + config.delta)
    return SubproblemReport(point, float(w @ point.slack), 0.0, 0.0, 0, "optimal")


@dataclass
class FeasibilityReport:
    """Signed slacks (>= 0 means satisfied) per constraint family, scaled units."""

    slacks: dict[str, np.ndarray]

    @property
    def max_violation(self) -> float:
        worst = [float(-v.min()) for v in self.slacks.values() if v.size]
        return max([0.0] + worst)

    def violated(self, tol: float = FEAS_TOL) -> list[str]:
        return [name for name, v in self.slacks.items() if v.size and v.min() < -tol]


def check_feasibility(point: SolutionPoint, scenario: Scenario, config: SystemConfig,
                      anchor: ExpansionPoint) -> FeasibilityReport:
    """Audit ``point`` against the linearised and the original constraints."""
    prob = ScaledProblem(scenario, config, anchor)
    K, J = prob.K, prob.J
    z = prob.from_solution(point)
    s, Ve, beta, be, Vu, bu = prob.unpack(z)
    if not prob.free:
        be = point.embb_bandwidth / prob.b_scale
    if prob.uniform:
        bu = np.asarray(point.urllc_bandwidths) / prob.b_scale
    xe = to_complex(Ve)
    xu = to_complex(Vu)
    gamma_e = prob.embb_target(be) if be > 0 else math.inf
    _, Gm = prob.gains(Ve)
    interf = Gm.sum(axis=1) - np.diag(Gm) if K else np.zeros(0)
    g_hat = np.array([linearize.g_lin(xe[k], beta[k], to_complex(prob.ve_hat[k]), prob.beta_hat[k], prob.He[k])
                      for k in range(K)])
    g_true = np.array([linearize.g_value(xe[k], beta[k], prob.He[k]) if beta[k] > 0 else 0.0
                       for k in range(K)])
    with np.errstate(divide="ignore", invalid="ignore"):
        gamma_u = prob.urllc_target(np.maximum(bu, 1e-300))
    z_hat = np.array([linearize.z_lin(xu[j], bu[j], to_complex(prob.vu_hat[j]), prob.bu_hat[j], prob.Hu[j], 1.0)
                      for j in range(J)])
    z_true = np.array([linearize.z_value(xu[j], bu[j], prob.Hu[j], 1.0) if bu[j] > 0 else 0.0
                       for j in range(J)])
    power = float(np.sum(Ve * Ve) + np.sum(Vu * Vu))
    return FeasibilityReport({
        "embb_surrogate": s + g_hat - gamma_e,
        "interference": beta - interf - be,
        "urllc_surrogate": z_hat - gamma_u,
        "embb_original": s + g_true - gamma_e,
        "urllc_original": z_true - gamma_u,
        "bandwidth": np.array([1.0 - be - float(np.sum(bu))]),
        "power": np.array([1.0 - power]),
        "slack_nonneg": np.asarray(point.slack, dtype=float),
        "bandwidth_nonneg": np.concatenate([np.asarray(bu) - prob.bmin if J else np.zeros(0),
                                            [be - prob.bmin] if prob.free else []]),
    })
