"""Synthetic linear-reward environments and the simulation loop."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from numpy.typing import NDArray

from .errors import InvariantViolation
from .estimators import NoiseAndBounds
from .interactive import ContextBox, interactive_round
from .policy import PolicyConfig, PolicyState, init_state, select_arm, select_survey, ucb_values, update

NOISE_KINDS = ("centered", "uniform")
_CHUNK = 2048


@dataclass(frozen=True)
class Environment:
    """True arm parameters, a box context distribution and uniform reward noise.

    With ``intercept`` set, coordinate 0 is the constant 1 (its box is [1, 1])
    and the remaining ``d - 1`` coordinates are uniform on the box.
    """

    true_betas: NDArray[np.float64]
    box: ContextBox
    noise: str = "centered"
    noise_width: float = 1.0
    intercept: bool = True

    def __post_init__(self):
        betas = np.atleast_2d(np.asarray(self.true_betas, dtype=float))
        object.__setattr__(self, "true_betas", betas)
        if betas.shape[1] != self.box.d:
            raise ValueError("betas and box disagree on the dimension")
        if self.noise not in NOISE_KINDS:
            raise ValueError(f"noise must be one of {NOISE_KINDS}")

    @property
    def K(self) -> int:
        return int(self.true_betas.shape[0])

    @property
    def d(self) -> int:
        return int(self.true_betas.shape[1])

    @property
    def relevant(self) -> tuple[int, ...]:
        return tuple(int(q) for q in np.flatnonzero(np.any(self.true_betas != 0, axis=0)))

    def bounds(self, sigma: float = 1.0, b: float | None = None, b_2: float | None = None) -> NoiseAndBounds:
        """Norm bounds of this context space; ``b`` defaults to the dimension."""
        b = float(self.d) if b is None else b
        return NoiseAndBounds.from_box(self.box.lower, self.box.upper, sigma=sigma, b=b, b_2=b_2)

    def streams(self, seed: int) -> "Streams":
        return Streams(self, seed)


class Streams:
    """Independent context and noise streams derived from one master seed.

    Noise is drawn for every arm at every step, so two policies run on the
    same seed face identical contexts and identical per-arm noise.
    """

    def __init__(self, env: Environment, seed: int):
        ss = np.random.SeedSequence(seed)
        ctx_ss, noise_ss = ss.spawn(2)
        self.env = env
        self._ctx = np.random.default_rng(ctx_ss)
        self._noise = np.random.default_rng(noise_ss)
        self._x = np.empty((0, env.d))
        self._e = np.empty((0, env.K))
        self._pos = 0

    def _refill(self):
        env = self.env
        u = self._ctx.random((_CHUNK, env.d))
        self._x = env.box.lower + u * (env.box.upper - env.box.lower)
        e = self._noise.random((_CHUNK, env.K))
        self._e = (e - 0.5) * env.noise_width if env.noise == "centered" else e * env.noise_width
        self._pos = 0

    def next(self) -> tuple[NDArray[np.float64], NDArray[np.float64]]:
        if self._pos >= self._x.shape[0]:
            self._refill()
        x, e = self._x[self._pos], self._e[self._pos]
        self._pos += 1
        return x, e


def study_environment(K: int = 5, d: int = 50, noise: str = "centered") -> Environment:
    """Arm means ``x1``, ``x2``, ``1 - x1``, ``0``, ``0`` with an intercept at coordinate 0."""
    if K not in (3, 5):
        raise ValueError("K must be 3 or 5")
    if d < 3:
        raise ValueError("d must be at least 3 (intercept, x1, x2)")
    betas = np.zeros((K, d))
    betas[0, 1] = 1.0
    betas[1, 2] = 1.0
    betas[2, 0], betas[2, 1] = 1.0, -1.0
    lower, upper = np.zeros(d), np.ones(d)
    lower[0] = 1.0
    return Environment(betas, ContextBox(lower, upper), noise=noise)


@dataclass
class Trajectory:
    arm: NDArray[np.int64]
    survey_len: NDArray[np.int64]
    reward: NDArray[np.float64]
    regret: NDArray[np.float64]
    chosen_ucb: NDArray[np.float64]
    max_ucb: NDArray[np.float64]
    covered: NDArray[np.bool_]
    final_state: PolicyState | None = field(default=None, repr=False)
    surveys: list[tuple[int, ...]] | None = field(default=None, repr=False)

    @property
    def T(self) -> int:
        return int(self.arm.shape[0])

    @property
    def cum_regret(self) -> NDArray[np.float64]:
        return np.cumsum(self.regret)

    @property
    def cum_survey_len(self) -> NDArray[np.int64]:
        return np.cumsum(self.survey_len)

    @property
    def final_survey(self) -> tuple[int, ...]:
        return select_survey(self.final_state)

    def rows(self):
        """CSV rows ``t, arm, survey_len, cum_survey_len, reward, regret, cum_regret`` (1-based)."""
        cs, cr = self.cum_survey_len, self.cum_regret
        for t in range(self.T):
            yield (t + 1, int(self.arm[t]) + 1, int(self.survey_len[t]), int(cs[t]),
                   float(self.reward[t]), float(self.regret[t]), float(cr[t]))


def run(cfg: PolicyConfig, env: Environment, T: int, seed: int, interactive: bool = False,
        bound_method: str = "sound", track_coverage: bool = False, track_ucb: bool | None = None,
        record_surveys: bool = False, check_invariants: bool = True) -> Trajectory:
    """Simulate ``T`` steps of zero-shot or interactive survey UCB.

    Raises
    ------
    InvariantViolation
        On negative regret, a growing zero-shot survey, or an interactive pick
        that misses the global UCB maximum.
    """
    if T < 1:
        raise ValueError("T must be at least 1")
    if cfg.K != env.K or cfg.d != env.d:
        raise ValueError("policy and environment disagree on K or d")
    if track_ucb is None:
        track_ucb = interactive
    streams = env.streams(seed)
    state = init_state(cfg)
    betas = env.true_betas
    arms = np.empty(T, dtype=np.int64)
    lens = np.empty(T, dtype=np.int64)
    rewards = np.empty(T)
    regrets = np.empty(T)
    chosen_ucb = np.full(T, np.nan)
    max_ucb = np.full(T, np.nan)
    covered = np.ones(T, dtype=bool)
    surveys = [] if record_surveys else None
    prev_len = cfg.d

    for t in range(T):
        x, noise = streams.next()
        survey = select_survey(state)
        if interactive:
            res = interactive_round(state, lambda idx: x[list(idx)], env.box, bound_method)
            arm, queried = res.arm, res.queried
            if check_invariants and not set(queried) <= set(survey):
                raise InvariantViolation("interactive survey asked outside the zero-shot survey", t + 1)
            x_obs = res.obs.values
        else:
            queried = survey
            x_obs = np.full(cfg.d, np.nan)
            x_obs[list(survey)] = x[list(survey)]
            arm = select_arm(state, x_obs, cfg)
            if check_invariants and len(survey) > prev_len:
                raise InvariantViolation("zero-shot survey grew", t + 1)
            prev_len = len(survey)

        if track_ucb:
            all_ucb = ucb_values(state, x)
            max_ucb[t] = all_ucb.max()
            chosen_ucb[t] = all_ucb[arm]
            if check_invariants and chosen_ucb[t] < max_ucb[t] - 1e-10:
                raise InvariantViolation(
                    f"arm {arm + 1} has UCB {chosen_ucb[t]:.12g} below the max {max_ucb[t]:.12g}", t + 1)
        if track_coverage:
            covered[t] = all(C.contains(beta) for C, beta in zip(state.sets, betas))

        means = betas @ x
        regret = float(means.max() - means[arm])
        if check_invariants and regret < -1e-12:
            raise InvariantViolation(f"negative regret {regret}", t + 1)
        reward = float(means[arm] + noise[arm])
        arms[t], lens[t], rewards[t], regrets[t] = arm, len(queried), reward, max(regret, 0.0)
        if surveys is not None:
            surveys.append(tuple(queried))
        state = update(state, arm, x_obs, reward, cfg, survey_len=len(queried))

    return Trajectory(arms, lens, rewards, regrets, chosen_ucb, max_ucb, covered,
                      final_state=state, surveys=surveys)


def coverage_check(trajectories: list[Trajectory]) -> float:
    """Fraction of runs whose true parameters stayed in every set at every step."""
    if not trajectories:
        raise ValueError("no trajectories")
    return float(np.mean([bool(tr.covered.all()) for tr in trajectories]))


@dataclass(frozen=True)
class Curves:
    t: NDArray[np.int64]
    mean_cum_regret: NDArray[np.float64]
    sd_cum_regret: NDArray[np.float64]
    mean_cum_survey_len: NDArray[np.float64]
    sd_cum_survey_len: NDArray[np.float64]

    def rows(self):
        for i in range(self.t.shape[0]):
            yield (int(self.t[i]), float(self.mean_cum_regret[i]), float(self.sd_cum_regret[i]),
                   float(self.mean_cum_survey_len[i]), float(self.sd_cum_survey_len[i]))


def aggregate(trajectories: list[Trajectory]) -> Curves:
    """Per-step mean and (population) standard deviation across runs."""
    if not trajectories:
        raise ValueError("no trajectories")
    lengths = {tr.T for tr in trajectories}
    if len(lengths) != 1:
        raise ValueError(f"trajectories have different lengths {sorted(lengths)}")
    R = np.vstack([tr.cum_regret for tr in trajectories])
    S = np.vstack([tr.cum_survey_len for tr in trajectories]).astype(float)
    T = lengths.pop()
    return Curves(np.arange(1, T + 1), R.mean(0), R.std(0), S.mean(0), S.std(0))
