"""Zero-shot survey UCB: query the union of arm supports, pull the best UCB.

Also hosts the regret-bound evaluators used to check simulated runs against
the theory.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Sequence

import numpy as np
from numpy.typing import ArrayLike, NDArray

from .confidence import MODES, ArmHistory, ConfidenceSet, alg_confidence, init_confidence, ucb_value, ucb_width
from .estimators import NoiseAndBounds
from .linalg import EPS_CLAMP, IndexSet

TIE_BREAKS = ("lowest_index", "seeded_random")


@dataclass(frozen=True)
class PolicyConfig:
    mode: str
    beta_min: float
    delta: float
    bounds: NoiseAndBounds
    K: int
    d: int
    alpha: float | None = None  # None -> max(1, L_2)
    eps_clamp: float = EPS_CLAMP
    rescale_lambda_by_d: bool = False
    tie_break: str = "lowest_index"
    tie_seed: int = 0

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}, got {self.mode!r}")
        if self.alpha is None:
            object.__setattr__(self, "alpha", max(1.0, self.bounds.L_2))
        if not self.alpha > 0:
            raise ValueError("alpha must be positive")
        if not self.beta_min > 0:
            raise ValueError("beta_min must be positive")
        if not 0 < self.delta < 1:
            raise ValueError("delta must lie in (0, 1)")
        if self.K < 1 or self.d < 1:
            raise ValueError("K and d must be at least 1")
        if self.tie_break not in TIE_BREAKS:
            raise ValueError(f"tie_break must be one of {TIE_BREAKS}")


@dataclass
class PolicyState:
    """Per-arm confidence sets and histories at the start of step ``t + 1``."""

    sets: list[ConfidenceSet]
    histories: list[ArmHistory]
    t: int = 0
    cum_survey_len: int = 0
    rng: np.random.Generator | None = field(default=None, repr=False)

    @property
    def K(self) -> int:
        return len(self.sets)

    @property
    def pulls(self) -> list[int]:
        return [h.n for h in self.histories]


def init_state(cfg: PolicyConfig, keep_rows: bool = False) -> PolicyState:
    C0 = init_confidence(cfg.d, cfg.alpha, cfg.bounds.b_2)
    rng = np.random.default_rng(cfg.tie_seed) if cfg.tie_break == "seeded_random" else None
    return PolicyState(sets=[C0] * cfg.K, histories=[ArmHistory(cfg.d, keep_rows) for _ in range(cfg.K)],
                       rng=rng)


def select_survey(state: PolicyState) -> IndexSet:
    """Union of all arms' supports: the questions asked this step."""
    out: set[int] = set()
    for C in state.sets:
        out.update(C.support)
    return tuple(sorted(out))


def argmax_tie(values: Sequence[float], tie_break: str = "lowest_index",
               rng: np.random.Generator | None = None) -> int:
    values = np.asarray(values, dtype=float)
    best = np.flatnonzero(values == values.max())
    if tie_break == "seeded_random" and best.size > 1:
        if rng is None:
            raise ValueError("seeded_random tie-breaking needs an rng")
        return int(rng.choice(best))
    return int(best[0])


def ucb_values(state: PolicyState, x_observed: ArrayLike) -> NDArray[np.float64]:
    return np.array([ucb_value(C, x_observed) for C in state.sets])


def select_arm(state: PolicyState, x_observed: ArrayLike, cfg: PolicyConfig | None = None) -> int:
    """0-based index of the arm with the largest UCB.

    ``x_observed`` may carry NaN on coordinates that were not queried.
    """
    tie = cfg.tie_break if cfg is not None else "lowest_index"
    return argmax_tie(ucb_values(state, x_observed), tie, state.rng)


def update(state: PolicyState, arm: int, x_observed: ArrayLike, reward: float,
           cfg: PolicyConfig, survey_len: int | None = None) -> PolicyState:
    """Record the pull and refresh only the pulled arm's confidence set."""
    C = state.sets[arm]
    x = np.asarray(x_observed, dtype=float)
    x_r = np.zeros(cfg.d)
    keep = list(C.support)
    x_r[keep] = x[keep]
    if np.any(np.isnan(x_r)):
        raise ValueError("pulled arm's support was not fully observed")
    history = state.histories[arm].add(x_r, float(reward))
    sets = list(state.sets)
    histories = list(state.histories)
    sets[arm] = alg_confidence(C, history, cfg)
    histories[arm] = history
    if survey_len is None:
        survey_len = len(select_survey(state))
    return replace(state, sets=sets, histories=histories, t=state.t + 1,
                   cum_survey_len=state.cum_survey_len + survey_len)


def instantaneous_regret_bound(C: ConfidenceSet, x: ArrayLike) -> float:
    """``min(2, 2 radius ||x_H||_{D^+})``: regret bound of pulling this arm when every set covers."""
    return min(2.0, 2.0 * C.radius * ucb_width(C, x))


def theoretical_regret_bound(mode: str, T, K: int, d: int, cfg: PolicyConfig):
    """Explicit high-probability cumulative regret bound after ``T`` steps.

    Uses the worst case over how the ``T`` pulls are split among arms, with
    every radius replaced by its value at full support and ``n = T``. ``T``
    may be an array of horizons.
    """
    T_arr = np.asarray(T, dtype=float)
    if np.any(T_arr <= 0) or K <= 0 or d <= 0:
        raise ValueError("T, K and d must be positive")
    bnd = cfg.bounds
    alpha, delta, sigma = cfg.alpha, cfg.delta, bnd.sigma
    L2 = bnd.L_2
    design_log = np.log((d * alpha + T_arr * L2**2) / (d * alpha))
    if mode == "ridge":
        theta = (sigma * np.sqrt(d * np.log((1 + T_arr * L2**2 / alpha) / (delta / (K * (1 + T_arr) ** 2))))
                 + math.sqrt(alpha) * bnd.b_2)
        out = theta * np.sqrt(8 * d * design_log) * np.sqrt(T_arr * K)
    elif mode == "elastic":
        if cfg.rescale_lambda_by_d:
            raise NotImplementedError("no closed-form bound for the rescaled-penalty variant")
        Linf, b = bnd.L_inf, bnd.b
        inner = np.sqrt(2 * np.log(4 * d * K * T_arr**2 / delta)) + 2 * alpha * b / (3 * sigma * Linf)
        out = 4 * T_arr**0.75 * K**0.25 * d**0.5 * np.sqrt(3 * sigma * Linf * b * inner * design_log)
    else:
        raise ValueError(f"unknown mode {mode!r}")
    return float(out) if out.ndim == 0 else out
