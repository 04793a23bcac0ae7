"""Oracle and property checks, runnable from the CLI (``surveybandit verify``).

Each check compares the implementation against an independent route
(normal equations, stationarity conditions, sampling the ellipsoid boundary,
Monte Carlo coverage) and reports the observed value next to its tolerance.
"""

from __future__ import annotations

import itertools
import math
import time
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import estimators as est
from .confidence import ConfidenceSet, build_confidence, max_abs_coord, ucb_value
from .interactive import ContextBox, PartialObservation, optimistic_bound
from .policy import PolicyConfig, theoretical_regret_bound
from .simulator import Environment, coverage_check, study_environment, run


@dataclass
class Check:
    name: str
    observed: float
    tolerance: float
    passed: bool
    detail: str = ""

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        extra = f"  {self.detail}" if self.detail else ""
        return f"[{status}] {self.name}: observed={self.observed:.6g} tolerance={self.tolerance:.6g}{extra}"


def _le(name, observed, tol, detail="") -> Check:
    return Check(name, float(observed), float(tol), bool(observed <= tol), detail)


def _ge(name, observed, tol, detail="") -> Check:
    return Check(name, float(observed), float(tol), bool(observed >= tol), detail)


# --------------------------------------------------------------------------- oracles

def random_regression(rng: np.random.Generator, d_max: int = 10, n_max: int = 50):
    d = int(rng.integers(1, d_max + 1))
    n = int(rng.integers(1, n_max + 1))
    H = tuple(sorted(rng.choice(d, size=int(rng.integers(1, d + 1)), replace=False).tolist()))
    X = np.zeros((n, d))
    X[:, list(H)] = rng.random((n, len(H)))
    y = rng.random(n)
    return X, y, H


def fibonacci_sphere(m: int, dim: int) -> np.ndarray:
    """Near-uniform unit directions in 1, 2 or 3 dimensions."""
    if dim == 1:
        return np.array([[1.0], [-1.0]])
    if dim == 2:
        a = np.linspace(0.0, 2 * np.pi, m, endpoint=False)
        return np.column_stack([np.cos(a), np.sin(a)])
    i = np.arange(m) + 0.5
    phi = np.arccos(1 - 2 * i / m)
    golden = np.pi * (1 + 5**0.5) * i
    return np.column_stack([np.cos(golden) * np.sin(phi), np.sin(golden) * np.sin(phi), np.cos(phi)])


def ellipsoid_boundary(C: ConfidenceSet, m: int = 200_000) -> np.ndarray:
    """Points on ``||beta - center||_design = radius`` within the support, from a Cholesky factor."""
    keep = np.asarray(C.support, dtype=int)
    L = np.linalg.cholesky(C.design[np.ix_(keep, keep)])
    u = fibonacci_sphere(m, keep.size)
    pts = np.tile(C.center, (u.shape[0], 1))
    pts[:, keep] += C.radius * np.linalg.solve(L.T, u.T).T
    return pts


def random_confidence_set(rng: np.random.Generator, d_max: int = 3) -> ConfidenceSet:
    d = int(rng.integers(1, d_max + 1))
    H = tuple(sorted(rng.choice(d, size=int(rng.integers(1, d + 1)), replace=False).tolist()))
    n = int(rng.integers(0, 6))
    X = np.zeros((n, d))
    X[:, list(H)] = rng.random((n, len(H)))
    alpha = float(rng.uniform(0.5, 3.0))
    center = np.zeros(d)
    center[list(H)] = rng.normal(0, 0.5, len(H))
    return build_confidence(center, float(rng.uniform(1.0, 3.0)), H, X.T @ X, alpha, n)


# --------------------------------------------------------------------------- suites

def suite_estimators(instances: int = 100, seed: int = 0) -> list[Check]:
    rng = np.random.default_rng(seed)
    ridge_res, kkt_res, dom_zero, dom_ridge, map_gap = 0.0, 0.0, -np.inf, -np.inf, 0.0
    t0 = time.perf_counter()
    for _ in range(instances):
        X, y, H = random_regression(rng)
        data = est.RegressionData.from_rows(X, y, H)
        keep = list(H)
        alpha = float(rng.uniform(0.1, 3.0))
        beta = est.ridge_fit(data, alpha)
        normal = (data.gram + alpha * np.eye(data.d)) @ beta - data.xty
        ridge_res = max(ridge_res, float(np.abs(normal[keep]).max()))

        lam_max = 2.0 / data.n * float(np.abs(data.xty).max())
        lam = float(rng.uniform(0.0, 1.2 * lam_max))
        b_el = est.elastic_net_fit(data, alpha, lam)
        kkt_res = max(kkt_res, est.elastic_net_kkt_residual(data, b_el, alpha, lam) / max(lam, 1.0))
        f = est.elastic_net_objective(data, b_el, alpha, lam)
        dom_zero = max(dom_zero, f - est.elastic_net_objective(data, np.zeros(data.d), alpha, lam))
        ridge_pt = est.ridge_fit(data, 2 * alpha)
        dom_ridge = max(dom_ridge, f - est.elastic_net_objective(data, ridge_pt, alpha, lam))
        map_gap = max(map_gap, float(np.abs(est.elastic_net_fit(data, alpha, 0.0) - ridge_pt).max()))
    elapsed = time.perf_counter() - t0
    return [
        _le("ridge normal-equation residual", ridge_res, 1e-8),
        _le("elastic-net KKT residual (relative to max(lambda, 1))", kkt_res, 1e-6),
        _le("elastic-net objective minus objective at 0", dom_zero, 1e-12),
        _le("elastic-net objective minus objective at ridge point", dom_ridge, 1e-12),
        _le("elastic net with lambda=0 vs ridge with 2*alpha", map_gap, 1e-7),
        _le("runtime seconds", elapsed, 10.0),
    ]


def suite_confidence(instances: int = 50, seed: int = 1) -> list[Check]:
    rng = np.random.default_rng(seed)
    gap_ucb, gap_coord, sound = 0.0, 0.0, 0.0
    t0 = time.perf_counter()
    for _ in range(instances):
        C = random_confidence_set(rng)
        pts = ellipsoid_boundary(C)
        for q in range(C.d):
            brute = float(np.abs(pts[:, q]).max()) if q in C.support else 0.0
            gap_coord = max(gap_coord, abs(max_abs_coord(C, q) - brute))
        for _ in range(5):
            x = rng.random(C.d)
            brute = float((pts @ x).max()) if C.support else 0.0
            u = ucb_value(C, x)
            gap_ucb = max(gap_ucb, abs(u - brute))
            sound = max(sound, brute - u)
    elapsed = time.perf_counter() - t0
    return [
        _le("max_abs_coord vs boundary sampling", gap_coord, 1e-2),
        _le("ucb_value vs boundary sampling", gap_ucb, 1e-2),
        _le("sampled x^T beta above ucb_value", sound, 1e-9),
        _le("runtime seconds", elapsed, 30.0),
    ]


def suite_interactive(instances: int = 30, seed: int = 2, T: int = 400) -> list[Check]:
    rng = np.random.default_rng(seed)
    worst = -np.inf
    grid = np.round(np.arange(0.0, 1.0001, 0.1), 10)
    for _ in range(instances):
        C = random_confidence_set(rng)
        d = C.d
        box = ContextBox.unit(d)
        queried = [q for q in range(d) if rng.random() < 0.4]
        obs = PartialObservation.empty(d).with_answers(queried, rng.random(len(queried)))
        free = [q for q in range(d) if q not in queried]
        best = -np.inf
        for combo in itertools.product(grid, repeat=len(free)):
            x = obs.values.copy()
            x[free] = np.asarray(combo, dtype=float)
            best = max(best, ucb_value(C, x))
        worst = max(worst, best - optimistic_bound(C, obs, box))
    checks = [_le("grid completion UCB minus optimistic bound", worst, 1e-10)]

    env = study_environment(5, 8)
    cfg = PolicyConfig("ridge", 0.3, 0.1, env.bounds(), 5, 8)
    z = run(cfg, env, T, seed=0, track_ucb=True)
    i = run(cfg, env, T, seed=0, interactive=True)
    checks.append(_le("interactive UCB gap to global max", float(np.max(i.max_ucb - i.chosen_ucb)), 1e-10))
    checks.append(_le("interactive minus zero-shot cumulative survey",
                      float(np.max(i.cum_survey_len - z.cum_survey_len)), 0.0))
    return checks


def coverage_env(d: int = 5) -> Environment:
    full = study_environment(3, d)
    return Environment(full.true_betas[:2], full.box)


def suite_coverage(reps: int = 200, T: int = 500, delta: float = 0.1, d: int = 5,
                   modes=("ridge", "elastic")) -> list[Check]:
    env = coverage_env(d)
    checks = []
    for mode in modes:
        t0 = time.perf_counter()
        cfg = PolicyConfig(mode, 0.3, delta, env.bounds(b=float(d), b_2=math.sqrt(d)), env.K, d)
        trs = [run(cfg, env, T, seed=s, track_coverage=True) for s in range(reps)]
        cov = coverage_check(trs)
        checks.append(_ge(f"{mode} coverage over {reps} runs", cov, 1 - delta,
                          f"({time.perf_counter() - t0:.1f}s)"))
    return checks


def summability(K: int = 1, N: int = 10**6) -> float:
    return K * math.fsum(1.0 / (1 + n) ** 2 for n in range(1, N + 1))


def suite_regret(T: int = 3000, seeds=(0, 1), d: int = 10) -> list[Check]:
    env = study_environment(3, d)
    checks = [_le("K * sum 1/(1+n)^2 for n <= 1e6", summability(), 1.0 - 1e-12)]
    for mode in ("ridge", "elastic"):
        cfg = PolicyConfig(mode, 0.3, 0.1, env.bounds(b=float(d), b_2=math.sqrt(d)), 3, d)
        worst = -np.inf
        for s in seeds:
            tr = run(cfg, env, T, seed=s)
            bound = theoretical_regret_bound(mode, np.arange(1, T + 1), 3, d, cfg)
            worst = max(worst, float(np.max(tr.cum_regret / bound)))
        checks.append(_le(f"{mode} max prefix R_t / bound", worst, 1.0))
    return checks


SUITES: dict[str, Callable[[], list[Check]]] = {
    "estimators": suite_estimators,
    "confidence": suite_confidence,
    "interactive": suite_interactive,
    "coverage": suite_coverage,
    "regret": suite_regret,
}
