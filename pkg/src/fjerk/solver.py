"""Predictor-corrector integration of Caputo fractional systems.

Adams-Bashforth-Moulton product-integration scheme: rectangle-rule predictor,
trapezoid-rule corrector (one pass), with per-equation orders and an optional
short-memory truncation of the history convolution.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy.special import gamma as _gamma

from .exceptions import DivergenceError, InvalidConfig, TangentCollapse
from .model import JerkParams, OrderSpec

__all__ = [
    "SolveConfig",
    "Trajectory",
    "TangentLog",
    "AbmWeights",
    "abm_weights",
    "caputo_abm",
    "integrate",
    "integrate_with_tangent",
]


@dataclass(frozen=True)
class SolveConfig:
    """Step size, horizon, initial state and history-memory policy.

    ``memory_window`` is the short-memory window in time units; ``None``
    keeps the full history (O(N^2) work overall).
    """

    h: float = 0.005
    t_end: float = 300.0
    initial_state: tuple[float, float, float] = (0.0, 0.0, 0.0)
    memory_window: float | None = None

    def __post_init__(self):
        if self.h <= 0:
            raise InvalidConfig(f"step size must be positive, got h={self.h}")
        if self.t_end < self.h:
            raise InvalidConfig(f"t_end={self.t_end} shorter than one step h={self.h}")
        if self.memory_window is not None and self.memory_window < 10 * self.h:
            raise InvalidConfig(
                f"short-memory window {self.memory_window} below 10*h={10 * self.h}"
            )

    @property
    def n_steps(self) -> int:
        return int(round(self.t_end / self.h))

    @property
    def memory_steps(self) -> int | None:
        if self.memory_window is None:
            return None
        return int(round(self.memory_window / self.h))


@dataclass(frozen=True)
class Trajectory:
    """Uniformly sampled solution path."""

    t: np.ndarray
    states: np.ndarray  # shape (len(t), 3)
    config: SolveConfig
    orders: OrderSpec

    @property
    def x(self) -> np.ndarray:
        return self.states[:, 0]

    @property
    def y(self) -> np.ndarray:
        return self.states[:, 1]

    @property
    def z(self) -> np.ndarray:
        return self.states[:, 2]


@dataclass(frozen=True)
class TangentLog:
    """Per-renormalization log stretch factors of the three tangent directions."""

    renorm_times: np.ndarray
    log_norms: np.ndarray  # shape (n_renorms, 3)


@dataclass(frozen=True)
class AbmWeights:
    """Product-integration weights for one order alpha.

    ``predictor[k]`` is the rectangle-rule weight at history lag k.
    ``corrector[k]`` is the trapezoid-rule weight at lag k >= 1, with
    ``corrector[0]`` the weight of the new (corrected) node itself.
    ``boundary[n]`` is the extra trapezoid weight of the j=0 node when
    computing the state at step n+1.
    """

    alpha: float
    h: float
    predictor: np.ndarray
    corrector: np.ndarray
    boundary: np.ndarray


def abm_weights(alpha: float, n: int, h: float) -> AbmWeights:
    """Weights of the predictor-corrector scheme for lags 0..n-1.

    Discretizes the convolution with kernel (t - tau)^(alpha-1) / Gamma(alpha):
    the predictor uses piecewise-constant (rectangle) product integration, the
    corrector piecewise-linear (trapezoid).
    """
    if not 0.0 < alpha <= 1.0:
        raise ValueError(f"alpha must lie in (0, 1], got {alpha}")
    if n < 1:
        raise ValueError(f"need at least one step, got n={n}")
    k = np.arange(n, dtype=float)
    ha = h**alpha
    predictor = ha / _gamma(alpha + 1.0) * ((k + 1.0) ** alpha - k**alpha)
    c = ha / _gamma(alpha + 2.0)
    corrector = np.empty(n)
    corrector[0] = c
    kk = k[1:]
    corrector[1:] = c * ((kk + 1.0) ** (alpha + 1.0) - 2.0 * kk ** (alpha + 1.0)
                         + (kk - 1.0) ** (alpha + 1.0))
    boundary = c * (k ** (alpha + 1.0) - (k - alpha) * (k + 1.0) ** alpha)
    return AbmWeights(alpha, h, predictor, corrector, boundary)


class _AlphaGroup:
    """Shared weight tables and history for all components of one order."""

    __slots__ = ("cols", "c_now", "a0", "Wb", "WaR", "F")

    def __init__(self, alpha: float, cols: np.ndarray, n: int, h: float):
        w = abm_weights(alpha, n + 1, h)  # lags 0..n
        self.cols = cols
        self.c_now = w.corrector[0]
        self.a0 = w.boundary
        # Reversed layouts so every step's convolution is a contiguous slice:
        # Wb[i] = predictor[n-1-i]; WaR[i] = corrector[n-i].
        self.Wb = w.predictor[n - 1::-1].copy()
        self.WaR = w.corrector[:0:-1].copy()  # lags n..1
        self.F = np.empty((n + 1, len(cols)))


@np.errstate(over="ignore", invalid="ignore")
def caputo_abm(
    rhs: Callable[[float, np.ndarray], np.ndarray],
    alphas: Sequence[float],
    y0: Sequence[float],
    h: float,
    n_steps: int,
    memory_steps: int | None = None,
    renorm_every: int | None = None,
    renorm_cols: np.ndarray | None = None,
    renorm_shape: tuple[int, int] | None = None,
) -> tuple[np.ndarray, np.ndarray, TangentLog | None]:
    """Integrate D^alpha_i y_i = rhs_i(t, y) with y(0) = y0.

    One predictor-corrector pass per step; each component uses the weight
    table of its own order. When ``renorm_every`` is set, the components in
    ``renorm_cols`` (interpreted as a matrix of ``renorm_shape`` whose columns
    are tangent vectors) are re-orthonormalized by QR every so many steps; the
    linear history and effective initial condition are transformed alongside,
    which is exact for linear tangent dynamics.
    """
    y0 = np.asarray(y0, dtype=float).copy()
    d = y0.size
    alphas = np.asarray(alphas, dtype=float)
    if alphas.size != d:
        raise ValueError("one order per component required")
    N = n_steps
    t = h * np.arange(N + 1)
    Y = np.empty((N + 1, d))
    Y[0] = y0

    groups = []
    for alpha in sorted(set(alphas.tolist())):
        cols = np.nonzero(alphas == alpha)[0]
        groups.append(_AlphaGroup(alpha, cols, N, h))

    f0 = np.asarray(rhs(0.0, y0), dtype=float)
    for g in groups:
        g.F[0] = f0[g.cols]

    log_times: list[float] = []
    log_norms: list[np.ndarray] = []
    if renorm_every is not None:
        rcols = np.asarray(renorm_cols)
        rshape = renorm_shape

    K = memory_steps
    yp = np.empty(d)
    yc = np.empty(d)
    for n in range(N):
        jmin = 0 if K is None else max(0, n + 1 - K)
        tn1 = t[n + 1]
        yp[:] = y0
        for g in groups:
            i0 = N - 1 - n + jmin
            yp[g.cols] += np.dot(g.Wb[i0:], g.F[jmin:n + 1])
        fp = rhs(tn1, yp)
        yc[:] = y0
        for g in groups:
            if jmin == 0:
                acc = g.a0[n] * g.F[0]
                if n >= 1:
                    acc = acc + np.dot(g.WaR[N - n:], g.F[1:n + 1])
            else:
                acc = np.dot(g.WaR[N - n + jmin - 1:], g.F[jmin:n + 1])
            yc[g.cols] += acc + g.c_now * fp[g.cols]
        if not np.all(np.isfinite(yc)):
            raise DivergenceError(tn1)
        fn = rhs(tn1, yc)
        Y[n + 1] = yc
        for g in groups:
            g.F[n + 1] = fn[g.cols]

        if renorm_every is not None and (n + 1) % renorm_every == 0:
            Phi = yc[rcols].reshape(rshape)
            Q, R = np.linalg.qr(Phi)
            sign = np.sign(np.diag(R))
            sign[sign == 0.0] = 1.0
            Q *= sign
            R = (R.T * sign).T
            diag = np.diag(R)
            if np.any(diag < 1e-300):
                raise TangentCollapse(f"stretch factor underflow at t = {tn1:g}")
            log_times.append(tn1)
            log_norms.append(np.log(diag))
            Rinv = np.linalg.inv(R)
            yc[rcols] = Q.reshape(-1)
            Y[n + 1] = yc
            y0[rcols] = (y0[rcols].reshape(rshape) @ Rinv).reshape(-1)
            # Right-multiplying past tangent states (and hence their linear
            # RHS values) by Rinv keeps the stored history consistent.
            for g in groups:
                mask = np.isin(g.cols, rcols)
                gi = np.nonzero(mask)[0]
                if gi.size == 0:
                    continue
                rows = g.F[jmin:n + 2]
                block = rows[:, gi].reshape(rows.shape[0], -1, rshape[1])
                rows[:, gi] = (block @ Rinv).reshape(rows.shape[0], -1)
            fn2 = rhs(tn1, yc)
            for g in groups:
                g.F[n + 1] = fn2[g.cols]

    log = None
    if renorm_every is not None:
        log = TangentLog(np.asarray(log_times), np.asarray(log_norms).reshape(-1, rshape[1]))
    return t, Y, log


def integrate(params: JerkParams, orders: OrderSpec, cfg: SolveConfig) -> Trajectory:
    """Solve the jerk system; each equation uses its own order's weights."""
    a, b, eps = params.a, params.b, params.epsilon

    def rhs(t, s):
        return np.array(
            [s[1], s[2], -eps * eps - b * s[1] - a * eps * s[2] + s[0] * s[0]]
        )

    t, Y, _ = caputo_abm(
        rhs, orders.alphas, cfg.initial_state, cfg.h, cfg.n_steps, cfg.memory_steps
    )
    return Trajectory(t, Y, cfg, orders)


def integrate_with_tangent(
    params: JerkParams,
    orders: OrderSpec,
    cfg: SolveConfig,
    renorm_every: int = 200,
) -> tuple[Trajectory, TangentLog]:
    """Co-integrate three tangent vectors under the linearized flow.

    The tangent matrix (columns = directions) follows the Jacobian of the
    vector field evaluated along the trajectory, with the same per-equation
    fractional orders; Gram-Schmidt (QR) renormalization runs every
    ``renorm_every`` steps and the log stretch factors are recorded.
    """
    if renorm_every < 1:
        raise InvalidConfig(f"renorm_every must be >= 1, got {renorm_every}")
    a, b, eps = params.a, params.b, params.epsilon
    a1, a2, a3 = orders.alphas
    alphas = np.array([a1, a2, a3, a1, a1, a1, a2, a2, a2, a3, a3, a3])
    y0 = np.concatenate([np.asarray(cfg.initial_state, float), np.eye(3).reshape(-1)])

    def rhs(t, s):
        x, y, z = s[0], s[1], s[2]
        Phi = s[3:].reshape(3, 3)
        out = np.empty(12)
        out[0] = y
        out[1] = z
        out[2] = -eps * eps - b * y - a * eps * z + x * x
        # J @ Phi with J rows (0,1,0), (0,0,1), (2x,-b,-a*eps)
        out[3:6] = Phi[1]
        out[6:9] = Phi[2]
        out[9:12] = 2.0 * x * Phi[0] - b * Phi[1] - a * eps * Phi[2]
        return out

    t, Y, log = caputo_abm(
        rhs,
        alphas,
        y0,
        cfg.h,
        cfg.n_steps,
        cfg.memory_steps,
        renorm_every=renorm_every,
        renorm_cols=np.arange(3, 12),
        renorm_shape=(3, 3),
    )
    traj = Trajectory(t, Y[:, :3], cfg, orders)
    return traj, log
