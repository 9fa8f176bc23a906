"""Log-barrier interior-point method for small smooth convex problems.

The problem is ``minimize f0(z) s.t. f_i(z) < 0`` where the caller supplies
values, Jacobian and a weighted sum of constraint Hessians.  Each centering
step runs damped Newton with a backtracking line search that never leaves
the strict interior.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Callable, Protocol

import numpy as np
import scipy.linalg
import scipy.optimize

logger = logging.getLogger(__name__)

Objective = Callable[[np.ndarray], tuple[float, np.ndarray, "np.ndarray | None"]]


class ConstraintSystem(Protocol):
    n: int
    m: int

    def values(self, z: np.ndarray) -> np.ndarray: ...

    def jacobian(self, z: np.ndarray) -> tuple[np.ndarray, np.ndarray]: ...

    def hessian(self, z: np.ndarray, weights: np.ndarray) -> np.ndarray: ...


@dataclass
class BarrierResult:
    z: np.ndarray
    objective: float
    gap: float
    kkt_residual: float
    newton_iterations: int
    status: str  # "optimal" | "max_iters" | "numerical_trouble"
    history: list[tuple[float, int, float]]  # (t, newton steps, objective)


def linear_objective(c: np.ndarray) -> Objective:
    def f(z: np.ndarray):
        return float(c @ z), c, None
    return f


def _newton_direction(H: np.ndarray, g: np.ndarray) -> np.ndarray | None:
    diag = np.sqrt(np.maximum(np.abs(np.diag(H)), 1e-300))
    Hs = H / diag[:, None] / diag[None, :]
    gs = g / diag
    try:
        cf = scipy.linalg.cho_factor(Hs, check_finite=False)
        dz = -scipy.linalg.cho_solve(cf, gs, check_finite=False)
    except (np.linalg.LinAlgError, scipy.linalg.LinAlgError, ValueError):
        try:
            dz = -np.linalg.lstsq(Hs + 1e-12 * np.eye(len(g)), gs, rcond=None)[0]
        except np.linalg.LinAlgError:
            return None
    dz = dz / diag
    return dz if np.all(np.isfinite(dz)) else None


def centering(objective: Objective, cons: ConstraintSystem, z: np.ndarray, t: float,
              max_steps: int, newton_tol: float = 1e-7,
              stop: Callable[[np.ndarray, np.ndarray], bool] | None = None):
    """Minimise t*f0 + barrier from strictly feasible ``z``.

    Returns (z, steps, ok) where ok is False on numerical failure.
    """
    steps = 0
    while steps < max_steps:
        f, G = cons.jacobian(z)
        d = -1.0 / f
        f0, g0, H0 = objective(z)
        grad = t * g0 + G.T @ d
        H = cons.hessian(z, d) + (G.T * (d * d)) @ G
        if H0 is not None:
            H = H + t * H0
        dz = _newton_direction(H, grad)
        if dz is None:
            return z, steps, False
        dec2 = -float(grad @ dz)
        if dec2 < 0:
            # indefinite solve; fall back to scaled gradient step
            dz = -grad / np.maximum(np.abs(np.diag(H)), 1e-300)
            dec2 = -float(grad @ dz)
        if dec2 / 2.0 <= newton_tol:
            return z, steps, True
        step = 1.0
        while True:
            zn = z + step * dz
            fn = cons.values(zn)
            # fraction-to-boundary: no slack may shrink by more than 100x
            if np.all(fn < 0.01 * f):
                # barrier change relative to z; avoids cancellation at large t
                dphi = t * (objective(zn)[0] - f0) - float(np.sum(np.log(fn / f)))
                if dphi <= -0.01 * step * dec2:
                    break
            step *= 0.5
            if step < 1e-14:
                # no progress possible at working precision
                return z, steps, dec2 / 2.0 <= 1e-6
        z = zn
        steps += 1
        if step < 1e-4 and dec2 < 1.0:
            # inside the quadratic region yet only tiny steps pass the line
            # search: the point is centred to working precision
            return z, steps, True
        if stop is not None and stop(z, fn):
            return z, steps, True
    return z, steps, False


def initial_t(objective: Objective, cons: ConstraintSystem, z: np.ndarray,
              t_min: float = 1.0, t_max: float = 1e12) -> float:
    """Barrier weight for which ``z`` is closest to the central path.

    Minimises the Newton-norm of t*grad f0 + grad(barrier) over t.
    """
    f, G = cons.jacobian(z)
    d = -1.0 / f
    _, g0, H0 = objective(z)
    q = G.T @ d
    H = cons.hessian(z, d) + (G.T * (d * d)) @ G
    a = _newton_direction(H, g0)
    if a is None:
        return t_min
    # a = -H^{-1} g0, so g0'H^{-1}q = -a'q and g0'H^{-1}g0 = -a'g0
    denom = -float(a @ g0)
    if denom <= 0:
        return t_min
    t = float(a @ q) / denom
    return float(np.clip(t, t_min, t_max))


def kkt_residual(objective: Objective, cons: ConstraintSystem, z: np.ndarray, t: float) -> float:
    """Relative KKT error at ``z`` using the better of two multiplier estimates.

    Candidates are the barrier multipliers -1/(t f) and a non-negative
    least-squares fit of stationarity and complementarity; the score is the larger
    of the stationarity and complementarity errors.
    """
    f, G = cons.jacobian(z)
    _, g0, _ = objective(z)
    if g0.size == 0:
        return 0.0
    scale = max(1.0, float(np.max(np.abs(g0))))
    obj_scale = max(1.0, abs(float(objective(z)[0])))

    def score(lam: np.ndarray) -> float:
        stat = float(np.max(np.abs(g0 + G.T @ lam))) / scale
        comp = float(np.max(lam * np.abs(f))) / obj_scale if lam.size else 0.0
        return max(stat, comp)

    best = score(-1.0 / (t * f))
    try:
        # stationarity and complementarity stacked into one NNLS fit
        A = np.vstack([G.T / scale, np.diag(np.abs(f)) / obj_scale])
        b = np.concatenate([-g0 / scale, np.zeros(f.size)])
        lam_ls, _ = scipy.optimize.nnls(A, b, maxiter=50 * G.shape[0])
        best = min(best, score(lam_ls))
    except RuntimeError:
        pass
    return best


def barrier_minimize(objective: Objective, cons: ConstraintSystem, z0: np.ndarray, *,
                     t0: float | None = None, mu: float = 10.0, gap_tol: float = 1e-8,
                     accept_gap: float = 1e-6, max_newton: int = 200,
                     newton_tol: float = 1e-7) -> BarrierResult:
    """Barrier path following from a strictly feasible ``z0``."""
    z = np.array(z0, dtype=float)
    if not np.all(cons.values(z) < 0):
        raise ValueError("starting point is not strictly feasible")
    m = cons.m
    t = initial_t(objective, cons, z, t_max=m / gap_tol) if t0 is None else t0
    total = 0
    history: list[tuple[float, int, float]] = []
    status = "optimal"
    while True:
        z, steps, ok = centering(objective, cons, z, t, max_newton - total, newton_tol)
        total += steps
        history.append((t, steps, objective(z)[0]))
        if not ok:
            status = "max_iters" if total >= max_newton else "numerical_trouble"
            break
        if m / t <= gap_tol:
            break
        t *= mu
    gap = m / t
    if status != "optimal" and gap <= accept_gap:
        status = "optimal"
    kkt = kkt_residual(objective, cons, z, t)
    return BarrierResult(z, objective(z)[0], gap, kkt, total, status, history)


class _Phase1System:
    """Constraints f_i(z) - sigma over the augmented variable (z, sigma)."""

    def __init__(self, cons: ConstraintSystem):
        self.cons = cons
        self.n = cons.n + 1
        self.m = cons.m

    def values(self, y: np.ndarray) -> np.ndarray:
        return self.cons.values(y[:-1]) - y[-1]

    def jacobian(self, y: np.ndarray):
        f, G = self.cons.jacobian(y[:-1])
        return f - y[-1], np.hstack([G, -np.ones((G.shape[0], 1))])

    def hessian(self, y: np.ndarray, weights: np.ndarray) -> np.ndarray:
        H = np.zeros((self.n, self.n))
        H[:-1, :-1] = self.cons.hessian(y[:-1], weights)
        return H


@dataclass
class Phase1Result:
    z: np.ndarray
    feasible: bool
    sigma: float
    newton_iterations: int


def find_interior(cons: ConstraintSystem, z0: np.ndarray, *, mu: float = 10.0,
                  max_newton: int = 200, tol: float = 1e-10) -> Phase1Result:
    """Minimise the maximum constraint value to find a strictly feasible point.

    Stops at the end of the first centering step whose point is strictly
    feasible, which keeps it away from the boundary.
    """
    z0 = np.array(z0, dtype=float)
    f = cons.values(z0)
    if not np.all(np.isfinite(f)):
        raise ValueError("phase-1 start lies outside the constraint domain")
    if np.all(f < 0):
        return Phase1Result(z0, True, float(f.max()), 0)
    sys1 = _Phase1System(cons)
    y = np.append(z0, f.max() + 1.0)
    c = np.zeros(sys1.n)
    c[-1] = 1.0
    obj = linear_objective(c)

    t = 1.0
    total = 0
    while total < max_newton:
        y, steps, ok = centering(obj, sys1, y, t, max_newton - total)
        total += steps
        fz = cons.values(y[:-1])
        if np.all(fz < 0):
            return Phase1Result(y[:-1], True, float(fz.max()), total)
        # lower bound on min sigma from the barrier duality gap
        if y[-1] - sys1.m / t > 0 or (not ok and total < max_newton):
            break
        if sys1.m / t < tol:
            break
        t *= mu
    fz = cons.values(y[:-1])
    return Phase1Result(y[:-1], False, float(fz.max()), total)
