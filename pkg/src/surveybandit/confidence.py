"""Ellipsoidal confidence sets with shrinking supports.

A :class:`ConfidenceSet` is ``{beta : ||beta - center||_design <= radius,
supp(beta) within support}``. :func:`alg_confidence` produces the next set of
an arm after it is pulled: it first drops coordinates that cannot reach
``beta_min`` anywhere in the current set, then refits on what is left.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import TYPE_CHECKING

import numpy as np
from numpy.typing import ArrayLike, NDArray

from . import estimators as est
from .errors import IncompleteObservationError
from .linalg import IndexSet, as_index_set, clamp_small, pinv_on_support, restrict_matrix

if TYPE_CHECKING:
    from .policy import PolicyConfig

MODES = ("ridge", "elastic")


@dataclass(frozen=True, eq=False)
class ConfidenceSet:
    center: NDArray[np.float64]
    radius: float
    support: IndexSet
    design: NDArray[np.float64]
    design_pinv: NDArray[np.float64]
    pulls: int = 0

    @property
    def d(self) -> int:
        return int(self.center.shape[0])

    def contains(self, beta: ArrayLike, tol: float = 1e-9) -> bool:
        """Membership test: support containment and ellipsoid inequality."""
        beta = np.asarray(beta, dtype=float)
        outside = np.ones(self.d, dtype=bool)
        outside[list(self.support)] = False
        if np.any(beta[outside] != 0):
            return False
        diff = beta - self.center
        return float(np.sqrt(max(diff @ self.design @ diff, 0.0))) <= self.radius * (1 + tol)

    def to_record(self) -> dict:
        """Serializable summary; the design is omitted (rebuildable from history)."""
        return {
            "center": [float(v) for v in self.center],
            "radius": float(self.radius),
            "support": [int(q) + 1 for q in self.support],
            "pulls": int(self.pulls),
        }


class ArmHistory:
    """Rewards and support-restricted contexts of one arm, kept as running sums.

    Contexts are restricted to the arm's support at the time they are stored.
    Supports only shrink, so restricting the accumulated Gram matrix later is
    the same as re-restricting every stored row.
    """

    __slots__ = ("gram", "xty", "yty", "n", "_rows")

    def __init__(self, d: int, keep_rows: bool = False):
        self.gram = np.zeros((d, d))
        self.xty = np.zeros(d)
        self.yty = 0.0
        self.n = 0
        self._rows: list[tuple[NDArray[np.float64], float]] | None = [] if keep_rows else None

    def add(self, x_restricted: NDArray[np.float64], y: float) -> "ArmHistory":
        """Return a new history with one more row; ``self`` is left untouched."""
        new = ArmHistory.__new__(ArmHistory)
        new.gram = self.gram + np.outer(x_restricted, x_restricted)
        new.xty = self.xty + y * x_restricted
        new.yty = self.yty + y * y
        new.n = self.n + 1
        new._rows = None if self._rows is None else self._rows + [(x_restricted.copy(), float(y))]
        return new

    @property
    def rows(self) -> list[tuple[NDArray[np.float64], float]]:
        if self._rows is None:
            raise AttributeError("history was created without keep_rows=True")
        return list(self._rows)

    def data(self, H) -> est.RegressionData:
        H = as_index_set(H, self.xty.shape[0])
        full = est.RegressionData(gram=self.gram, xty=self.xty, yty=self.yty, n=self.n,
                                  H=tuple(range(self.xty.shape[0])))
        return full.restricted(H)


def init_confidence(d: int, alpha: float, b: float) -> ConfidenceSet:
    """Prior set ``{beta : ||beta||_{alpha I} <= sqrt(alpha) b}`` on all coordinates."""
    if d < 1 or not alpha > 0 or not b > 0:
        raise ValueError("need d >= 1, alpha > 0, b > 0")
    return ConfidenceSet(
        center=np.zeros(d),
        radius=max(1.0, float(np.sqrt(alpha) * b)),
        support=tuple(range(d)),
        design=alpha * np.eye(d),
        design_pinv=np.eye(d) / alpha,
        pulls=0,
    )


def max_abs_coord(C: ConfidenceSet, q: int) -> float:
    """Exact ``max |beta_q|`` over the set: ``|center_q| + radius sqrt(pinv_qq)``."""
    if q not in C.support:
        return 0.0
    return float(abs(C.center[q]) + C.radius * np.sqrt(max(C.design_pinv[q, q], 0.0)))


def truncate_support(C: ConfidenceSet, beta_min: float, mode: str = "ridge",
                     eps: float = 1e-8) -> IndexSet:
    """Support after dropping coordinates whose largest in-set magnitude is below ``beta_min``.

    In elastic mode a coordinate is only dropped if its current estimate is
    also zero.
    """
    if not beta_min > 0:
        raise ValueError("beta_min must be positive")
    if mode not in MODES:
        raise ValueError(f"unknown mode {mode!r}")
    keep = []
    for q in C.support:
        removable = max_abs_coord(C, q) < beta_min
        if removable and mode == "elastic" and clamp_small(float(C.center[q]), eps) != 0.0:
            removable = False
        if not removable:
            keep.append(q)
    return tuple(keep)


def build_confidence(center: NDArray[np.float64], radius: float, H: IndexSet,
                     gram: NDArray[np.float64], alpha: float, pulls: int,
                     eps: float = 1e-8) -> ConfidenceSet:
    """Assemble a set on ``H`` from a center and the accumulated Gram matrix."""
    d = center.shape[0]
    keep = np.asarray(H, dtype=int)
    c = np.zeros(d)
    c[keep] = center[keep]
    c = clamp_small(c, eps)
    design = restrict_matrix(gram + alpha * np.eye(d), H)
    design = clamp_small(0.5 * (design + design.T), eps)
    return ConfidenceSet(center=c, radius=float(radius), support=H, design=design,
                         design_pinv=pinv_on_support(design, H), pulls=pulls)


def alg_confidence(C_prev: ConfidenceSet, history: ArmHistory, cfg: "PolicyConfig") -> ConfidenceSet:
    """Next confidence set of an arm whose ``history`` includes the latest pull."""
    if history.n == 0:
        return C_prev
    H = truncate_support(C_prev, cfg.beta_min, cfg.mode, cfg.eps_clamp)
    data = history.data(H)
    n = history.n
    if cfg.mode == "ridge":
        center = est.ridge_fit(data, cfg.alpha)
        radius = est.ridge_radius(len(H), n, cfg.bounds, cfg.alpha, cfg.delta, cfg.K, C_prev.radius)
    else:
        lam = est.elnet_lambda(n, cfg.d, cfg.K, cfg.delta, cfg.bounds, cfg.rescale_lambda_by_d)
        center = est.elastic_net_fit(data, cfg.alpha, lam, beta0=C_prev.center)
        center = clamp_small(center, cfg.eps_clamp)
        radius = est.elnet_radius(n, cfg.d, cfg.K, cfg.delta, cfg.bounds, cfg.alpha, C_prev.radius,
                                  rescaled=cfg.rescale_lambda_by_d,
                                  beta_hat_norm1=float(np.abs(center).sum()))
    return build_confidence(center, radius, H, history.gram, cfg.alpha, n, cfg.eps_clamp)


def _observed_on_support(C: ConfidenceSet, x: ArrayLike) -> NDArray[np.float64]:
    x = np.asarray(x, dtype=float)
    keep = list(C.support)
    xs = np.zeros(C.d)
    vals = x[keep]
    if np.any(np.isnan(vals)):
        missing = [q + 1 for q, v in zip(keep, vals) if np.isnan(v)]
        raise IncompleteObservationError(f"coordinates {missing} are in the support but unobserved")
    xs[keep] = vals
    return xs


def ucb_value(C: ConfidenceSet, x: ArrayLike) -> float:
    """``max x^T beta`` over the set; ``x`` may hold NaN outside the support."""
    xs = _observed_on_support(C, x)
    width = float(xs @ C.design_pinv @ xs)
    return float(xs @ C.center + C.radius * np.sqrt(max(width, 0.0)))


def ucb_width(C: ConfidenceSet, x: ArrayLike) -> float:
    """``||x_H||`` in the pseudo-inverse design norm."""
    xs = _observed_on_support(C, x)
    return float(np.sqrt(max(xs @ C.design_pinv @ xs, 0.0)))
