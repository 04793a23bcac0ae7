"""Ridge and elastic-net fits on a support, plus the radius/penalty schedules.

Fits work from sufficient statistics (Gram matrix, ``X^T y``, ``y^T y``) so
that an arm's data can be re-restricted to a smaller support without
revisiting every stored row.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from numpy.typing import ArrayLike, NDArray

from .errors import ConvergenceError, ScheduleError
from .linalg import IndexSet, as_index_set

CD_TOL = 1e-10
CD_MAX_SWEEPS = 100_000
KKT_TOL = 1e-6


@dataclass(frozen=True)
class NoiseAndBounds:
    """Noise scale and norm bounds on contexts and arm parameters.

    ``L_2`` enters the ridge radius, ``L_inf`` the elastic-net penalty and
    radius. ``b`` bounds ``||beta||_1``; ``b_2`` bounds ``||beta||_2`` and
    defaults to ``b`` (always valid since the 2-norm never exceeds the 1-norm).
    """

    sigma: float
    L_inf: float
    L_2: float
    L_1: float
    b: float
    b_2: float | None = None

    def __post_init__(self):
        for name in ("sigma", "L_inf", "L_2", "L_1", "b"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be strictly positive")
        if self.b_2 is None:
            object.__setattr__(self, "b_2", self.b)
        elif not self.b_2 > 0:
            raise ValueError("b_2 must be strictly positive")

    @classmethod
    def from_box(cls, lower: ArrayLike, upper: ArrayLike, sigma: float, b: float,
                 b_2: float | None = None) -> "NoiseAndBounds":
        """Context norm bounds implied by a box ``lower <= x <= upper``."""
        m = np.maximum(np.abs(np.asarray(lower, float)), np.abs(np.asarray(upper, float)))
        return cls(sigma=sigma, L_inf=float(m.max()), L_2=float(np.sqrt(np.sum(m**2))),
                   L_1=float(m.sum()), b=b, b_2=b_2)


@dataclass(frozen=True)
class RegressionData:
    """Sufficient statistics of ``{(x_H, y)}`` on a support ``H``.

    ``gram``, ``xty`` are full-dimensional but zero outside ``H``.
    """

    gram: NDArray[np.float64]
    xty: NDArray[np.float64]
    yty: float
    n: int
    H: IndexSet
    d: int = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "d", int(self.xty.shape[0]))

    @classmethod
    def from_rows(cls, X: ArrayLike, y: ArrayLike, H) -> "RegressionData":
        X = np.atleast_2d(np.asarray(X, dtype=float))
        y = np.asarray(y, dtype=float).ravel()
        H = as_index_set(H, X.shape[1])
        if X.shape[0] != y.shape[0]:
            raise ValueError("X and y have different numbers of rows")
        mask = np.zeros(X.shape[1], dtype=bool)
        mask[list(H)] = True
        if X.size and np.any(X[:, ~mask] != 0):
            raise ValueError("rows have entries outside the support H")
        return cls(gram=X.T @ X, xty=X.T @ y, yty=float(y @ y), n=int(X.shape[0]), H=H)

    @classmethod
    def empty(cls, d: int, H) -> "RegressionData":
        return cls(gram=np.zeros((d, d)), xty=np.zeros(d), yty=0.0, n=0, H=as_index_set(H, d))

    def restricted(self, H) -> "RegressionData":
        """Same rows restricted to a sub-support of ``H``."""
        H = as_index_set(H, self.d)
        if not set(H) <= set(self.H):
            raise ValueError("can only restrict to a subset of the current support")
        keep = np.asarray(H, dtype=int)
        gram = np.zeros_like(self.gram)
        gram[np.ix_(keep, keep)] = self.gram[np.ix_(keep, keep)]
        xty = np.zeros_like(self.xty)
        xty[keep] = self.xty[keep]
        return RegressionData(gram=gram, xty=xty, yty=self.yty, n=self.n, H=H)


def ridge_fit(data: RegressionData, alpha: float) -> NDArray[np.float64]:
    """Minimizer of ``||y - X b||^2 + alpha ||b||^2`` with support in ``H``."""
    if not alpha > 0:
        raise ValueError("ridge_fit needs alpha > 0")
    beta = np.zeros(data.d)
    keep = np.asarray(data.H, dtype=int)
    if data.n == 0 or keep.size == 0:
        return beta
    block = data.gram[np.ix_(keep, keep)] + alpha * np.eye(keep.size)
    beta[keep] = np.linalg.solve(block, data.xty[keep])
    return beta


def elastic_net_objective(data: RegressionData, beta: ArrayLike, alpha: float, lam: float) -> float:
    """``(1/n)[||y - X b||^2 + 2 alpha ||b||^2] + lam ||b||_1``."""
    beta = np.asarray(beta, dtype=float)
    rss = data.yty - 2.0 * beta @ data.xty + beta @ data.gram @ beta
    return float((rss + 2.0 * alpha * beta @ beta) / data.n + lam * np.abs(beta).sum())


def elastic_net_kkt_residual(data: RegressionData, beta: ArrayLike, alpha: float, lam: float) -> float:
    """Largest violation of the elastic-net stationarity conditions over ``H``."""
    beta = np.asarray(beta, dtype=float)
    keep = np.asarray(data.H, dtype=int)
    if keep.size == 0:
        return 0.0
    grad = (-2.0 * (data.xty - data.gram @ beta) + 4.0 * alpha * beta) / data.n
    g, b = grad[keep], beta[keep]
    active = b != 0
    res_active = np.abs(g[active] + lam * np.sign(b[active]))
    res_zero = np.maximum(np.abs(g[~active]) - lam, 0.0)
    return float(max(res_active.max(initial=0.0), res_zero.max(initial=0.0)))


def elastic_net_fit(
    data: RegressionData,
    alpha: float,
    lam: float,
    beta0: ArrayLike | None = None,
    tol: float = CD_TOL,
    max_sweeps: int = CD_MAX_SWEEPS,
    kkt_tol: float = KKT_TOL,
) -> NDArray[np.float64]:
    """Elastic-net estimate by cyclic coordinate descent with soft-thresholding.

    Parameters
    ----------
    data : RegressionData
        Restricted sample, ``n >= 1``.
    alpha, lam : float
        Ridge and L1 penalties of the objective
        ``(1/n)[||y - X b||^2 + 2 alpha ||b||^2] + lam ||b||_1``.
    beta0 : array, optional
        Warm start; entries outside ``data.H`` are ignored.
    tol : float
        Stop once a full sweep moves no coordinate by more than ``tol``.
    kkt_tol : float
        Accepted stationarity residual, relative to ``max(lam, 1)``.

    Raises
    ------
    ConvergenceError
        If ``max_sweeps`` sweeps pass without meeting ``tol`` and ``kkt_tol``.
    """
    if alpha < 0 or lam < 0:
        raise ValueError("alpha and lam must be non-negative")
    if data.n < 1:
        raise ValueError("elastic_net_fit needs at least one row")
    keep = np.asarray(data.H, dtype=int)
    beta = np.zeros(data.d)
    if keep.size == 0:
        return beta

    G = np.ascontiguousarray(data.gram[np.ix_(keep, keep)])
    c = data.xty[keep].tolist()
    diag = np.diag(G).tolist()
    b = np.zeros(keep.size) if beta0 is None else np.asarray(beta0, dtype=float)[keep].copy()
    g = G @ b  # running G b
    thresh = 0.5 * data.n * lam
    denom = [gq + 2.0 * alpha for gq in diag]
    cols = [G[:, q] for q in range(keep.size)]
    limit = kkt_tol * max(lam, 1.0)

    sweeps = 0
    while True:
        sweeps += 1
        max_step = 0.0
        for q in range(keep.size):
            old = b[q]
            z = c[q] - (g[q] - diag[q] * old)
            if denom[q] <= 0.0:
                new = 0.0
            elif z > thresh:
                new = (z - thresh) / denom[q]
            elif z < -thresh:
                new = (z + thresh) / denom[q]
            else:
                new = 0.0
            step = new - old
            if step != 0.0:
                b[q] = new
                g += cols[q] * step
                if abs(step) > max_step:
                    max_step = abs(step)
        if max_step <= tol:
            beta[keep] = b
            residual = elastic_net_kkt_residual(data, beta, alpha, lam)
            if residual <= limit:
                return beta
            g = G @ b  # refresh accumulated drift and keep sweeping
        if sweeps >= max_sweeps:
            beta[keep] = b
            raise ConvergenceError("elastic net did not converge",
                                   elastic_net_kkt_residual(data, beta, alpha, lam), sweeps)


def failure_budget(K: int, delta: float, n: int) -> float:
    """Per-update failure probability ``delta / (K (1 + n)^2)``."""
    if K < 1 or not 0 < delta < 1 or n < 0:
        raise ValueError("need K >= 1, 0 < delta < 1, n >= 0")
    return delta / (K * (1 + n) ** 2)


def ridge_radius(h: int, n: int, cfg: NoiseAndBounds, alpha: float, delta: float, K: int,
                 theta_prev: float = 1.0) -> float:
    """Ridge confidence radius, clamped so radii never decrease and stay >= 1."""
    if h < 0 or n < 0 or theta_prev < 1:
        raise ValueError("need h >= 0, n >= 0, theta_prev >= 1")
    budget = failure_budget(K, delta, n)
    log_term = math.log((1.0 + n * cfg.L_2**2 / alpha) / budget)
    formula = cfg.sigma * math.sqrt(h * log_term) + math.sqrt(alpha) * cfg.b_2
    return max(theta_prev, 1.0, formula)


def _elnet_log(n: int, d: int, K: int, delta: float) -> float:
    if n < 1:
        raise ScheduleError("elastic-net schedule is undefined before the first pull (n = 0)")
    return math.log(4.0 * d * K * n**2 / delta)


def elnet_lambda(n: int, d: int, K: int, delta: float, cfg: NoiseAndBounds,
                 rescale_by_d: bool = False) -> float:
    log_term = _elnet_log(n, d, K, delta)
    lam = 4.0 * cfg.sigma * cfg.L_inf * math.sqrt(2.0 / n * log_term)
    return lam / d if rescale_by_d else lam


def elnet_radius(n: int, d: int, K: int, delta: float, cfg: NoiseAndBounds, alpha: float,
                 theta_prev: float = 1.0, rescaled: bool = False,
                 beta_hat_norm1: float = 0.0) -> float:
    """Elastic-net confidence radius, with the same monotone clamp as the ridge one.

    With ``rescaled`` the L1 penalty was divided by ``d``; the first term then
    uses ``(b + ||beta_hat||_1) d`` in place of ``b``.
    """
    if not 0 < delta < 1 or theta_prev < 1:
        raise ValueError("need 0 < delta < 1 and theta_prev >= 1")
    root = math.sqrt(2.0 * n * _elnet_log(n, d, K, delta))
    scale = (cfg.b + beta_hat_norm1) * d if rescaled else cfg.b
    formula = math.sqrt(6.0 * cfg.sigma * cfg.L_inf * scale * root + 4.0 * alpha * cfg.b**2)
    return max(theta_prev, 1.0, formula)
