"""Interactive surveys: ask one arm's questions at a time and stop early.

An arm that has not been queried yet is dropped as soon as an upper bound on
its UCB, over every context consistent with the answers so far, is no larger
than the best exact UCB among queried arms.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Callable, Iterable

import numpy as np
from numpy.typing import ArrayLike, NDArray

from .confidence import ConfidenceSet, ucb_value
from .linalg import IndexSet, as_index_set
from .policy import PolicyState, select_survey

BOUND_METHODS = ("sound", "heuristic")
# up to this many free coordinates the uncertainty term is maximized exactly
VERTEX_LIMIT = 12


@dataclass(frozen=True)
class ContextBox:
    lower: NDArray[np.float64]
    upper: NDArray[np.float64]

    def __post_init__(self):
        lo = np.asarray(self.lower, dtype=float)
        hi = np.asarray(self.upper, dtype=float)
        if lo.shape != hi.shape or np.any(lo > hi):
            raise ValueError("box needs lower <= upper with matching shapes")
        object.__setattr__(self, "lower", lo)
        object.__setattr__(self, "upper", hi)

    @classmethod
    def unit(cls, d: int) -> "ContextBox":
        return cls(np.zeros(d), np.ones(d))

    @property
    def d(self) -> int:
        return int(self.lower.shape[0])


@dataclass(frozen=True)
class PartialObservation:
    """Answers given so far; ``values`` is NaN off ``queried``."""

    queried: IndexSet
    values: NDArray[np.float64]

    @classmethod
    def empty(cls, d: int) -> "PartialObservation":
        return cls((), np.full(d, np.nan))

    def with_answers(self, idx: Iterable[int], answers: ArrayLike) -> "PartialObservation":
        vals = self.values.copy()
        idx = list(idx)
        vals[idx] = np.asarray(answers, dtype=float)
        return PartialObservation(as_index_set(set(self.queried) | set(idx)), vals)


def _max_convex_quadratic(M: NDArray, fixed: NDArray, free: NDArray, lo: NDArray, hi: NDArray) -> float:
    """Upper bound on ``max y^T M y`` with ``y = fixed`` plus ``free`` coordinates in a box.

    ``M`` is PSD so the objective is convex and the maximum sits on a vertex;
    small problems enumerate vertices, larger ones use a centered relaxation.
    """
    m = free.size
    if m == 0:
        return float(fixed @ M @ fixed)
    if m <= VERTEX_LIMIT:
        corners = np.array(list(itertools.product((0, 1), repeat=m)), dtype=float)
        pts = lo + corners * (hi - lo)
        base = M @ fixed
        Mff = M[np.ix_(free, free)]
        vals = fixed @ base + 2.0 * pts @ base[free] + np.einsum("ij,jk,ik->i", pts, Mff, pts)
        return float(vals.max())
    # y = a + r*s, s in [-1, 1]^m
    mid = 0.5 * (lo + hi)
    half = 0.5 * (hi - lo)
    a = fixed.copy()
    a[free] = mid
    Ma = M @ a
    linear = 2.0 * float(np.abs(Ma[free] * half).sum())
    R = M[np.ix_(free, free)] * np.outer(half, half)
    quad = min(float(np.linalg.eigvalsh(R)[-1]) * m, float(np.abs(R).sum()))
    return float(a @ Ma) + linear + max(quad, 0.0)


def optimistic_bound(C: ConfidenceSet, obs: PartialObservation, box: ContextBox,
                     method: str = "sound") -> float:
    """Upper bound on ``ucb_value(C, x)`` over completions ``x`` of ``obs`` in ``box``.

    The linear part is maximized in closed form. For the width part,
    ``"heuristic"`` evaluates a single context that sets every unqueried
    coordinate to its upper bound; ``"sound"`` maximizes the convex quadratic
    exactly over box vertices (or bounds it when there are many free
    coordinates), so the result is a guaranteed upper bound.
    """
    if method not in BOUND_METHODS:
        raise ValueError(f"method must be one of {BOUND_METHODS}")
    keep = np.asarray(C.support, dtype=int)
    if keep.size == 0:
        return 0.0
    vals = obs.values[keep]
    known = ~np.isnan(vals)
    lo, hi = box.lower[keep], box.upper[keep]
    c = C.center[keep]

    linear = float(c[known] @ vals[known])
    cf = c[~known]
    linear += float(np.where(cf > 0, hi[~known], lo[~known]) @ cf)

    M = C.design_pinv[np.ix_(keep, keep)]
    fixed = np.where(known, vals, 0.0)
    free = np.flatnonzero(~known)
    if method == "heuristic":
        y = fixed.copy()
        y[free] = hi[free]
        quad = float(y @ M @ y)
    else:
        quad = _max_convex_quadratic(M, fixed, free, lo[free], hi[free])
    return linear + C.radius * float(np.sqrt(max(quad, 0.0)))


@dataclass(frozen=True)
class RoundResult:
    arm: int
    queried: IndexSet
    obs: PartialObservation
    ucb: float


def interactive_round(state: PolicyState, user: Callable[[IndexSet], ArrayLike], box: ContextBox,
                      method: str = "sound") -> RoundResult:
    """Run one interactive survey.

    ``user(indices)`` returns the true answers for the requested 0-based
    coordinates. Arms are visited from most to least pulled (ties: lower index
    first); the returned arm has the largest UCB among queried arms.
    """
    pulls = state.pulls
    queue = sorted(range(state.K), key=lambda k: (-pulls[k], k))
    obs = PartialObservation.empty(box.d)
    best_arm, best = -1, -np.inf
    while queue:
        i = queue.pop(0)
        C = state.sets[i]
        new = [q for q in C.support if q not in obs.queried]
        if new:
            obs = obs.with_answers(new, user(tuple(new)))
        u = ucb_value(C, obs.values)
        if u > best or (u == best and i < best_arm):
            best_arm, best = i, u
        queue = [w for w in queue if optimistic_bound(state.sets[w], obs, box, method) > best]
    return RoundResult(arm=best_arm, queried=obs.queried, obs=obs, ucb=best)


def check_queried_within_survey(state: PolicyState, result: RoundResult) -> bool:
    return set(result.queried) <= set(select_survey(state))
