"""End-to-end acceptance criteria, each run at its stated tolerance.

Every test records a one-line PASS/FAIL summary that is printed at the end of
the pytest session (section "acceptance criteria").
"""

import csv
import time

import numpy as np
import pytest

from surveybandit import cli
from surveybandit.config import RunConfig
from surveybandit.policy import theoretical_regret_bound
from surveybandit.simulator import run
from surveybandit.verify import suite_confidence, suite_coverage, suite_estimators, summability

SEEDS = range(5)
RELEVANT = (0, 1, 2)  # intercept, x1, x2


def desk_config(mode, beta_min, K=3, d=20, T=20_000):
    return RunConfig.from_dict(dict(mode=mode, beta_min=beta_min, K=K, d=d, T=T, seeds=list(SEEDS)))


def run_seeds(cfg):
    env = cfg.environment()
    pc = cfg.policy_config(env)
    out = []
    for s in cfg.seeds:
        t0 = time.perf_counter()
        tr = run(pc, env, cfg.T, s)
        out.append((tr, time.perf_counter() - t0))
    return pc, out


@pytest.fixture(scope="module")
def desk_runs():
    return {mode: run_seeds(desk_config(mode, 0.3)) for mode in ("ridge", "elastic")}


@pytest.fixture(scope="module")
def violated_runs():
    return {mode: run_seeds(desk_config(mode, 1.5)) for mode in ("ridge", "elastic")}


def test_1_estimator_oracles(record):
    checks = suite_estimators(instances=100)
    detail = "; ".join(f"{c.name}={c.observed:.3g} (tol {c.tolerance:.3g})" for c in checks)
    assert record("1 estimator oracles", all(c.passed for c in checks), detail)


def test_2_ellipsoid_oracles(record):
    checks = suite_confidence(instances=50)
    detail = "; ".join(f"{c.name}={c.observed:.3g} (tol {c.tolerance:.3g})" for c in checks)
    assert record("2 ellipsoid oracles", all(c.passed for c in checks), detail)


def test_3_coverage(record):
    t0 = time.perf_counter()
    checks = suite_coverage(reps=200, T=500, delta=0.1, d=5)
    elapsed = time.perf_counter() - t0
    ok = all(c.passed for c in checks) and elapsed < 300
    detail = "; ".join(f"{c.name}={c.observed:.3f} (need >= 0.90)" for c in checks) + f"; {elapsed:.0f}s (< 300s)"
    assert record("3 coverage", ok, detail)


def test_4_regret_containment(desk_runs, record):
    parts, ok = [], True
    for mode, (pc, results) in desk_runs.items():
        T = results[0][0].T
        bound = theoretical_regret_bound(mode, np.arange(1, T + 1), pc.K, pc.d, pc)
        worst_ratio = max(float(np.max(tr.cum_regret / bound)) for tr, _ in results)
        sub = [float((tr.cum_regret[-1] / T) / (tr.cum_regret[999] / 1000)) for tr, _ in results]
        slowest = max(sec for _, sec in results)
        mode_ok = worst_ratio <= 1.0 and max(sub) <= 0.5 and slowest < 300
        ok &= mode_ok
        parts.append(f"{mode}: max R_t/bound={worst_ratio:.4f} (<= 1), "
                     f"(R_T/T)/(R_1000/1000) per seed={[round(s, 3) for s in sub]} (<= 0.5), "
                     f"slowest seed {slowest:.1f}s (< 300s)")
    assert record("4 regret containment and sublinearity", ok, "; ".join(parts))


def test_5_feature_elimination(desk_runs, record):
    parts, ok = [], True
    for mode, (_, results) in desk_runs.items():
        surveys = [tr.final_survey for tr, _ in results]
        hits = sum(s == RELEVANT for s in surveys)
        ok &= hits >= 4
        parts.append(f"{mode}: {hits}/5 seeds end on {{0,1,2}} (need >= 4), final survey sizes "
                     f"{[len(s) for s in surveys]}")
    assert record("5 feature elimination", ok, "; ".join(parts))


def test_6_interactive_equivalence_and_savings(record):
    cfg = desk_config("ridge", 0.3, K=5, d=20, T=10_000)
    env = cfg.environment()
    pc = cfg.policy_config(env)
    zero = run(pc, env, cfg.T, seed=0, track_ucb=True)
    inter = run(pc, env, cfg.T, seed=0, interactive=True)
    gap = float(np.max(inter.max_ucb - inter.chosen_ucb))
    dominated = bool(np.all(inter.cum_survey_len <= zero.cum_survey_len))
    savings = 1.0 - inter.cum_survey_len[-1] / zero.cum_survey_len[-1]
    ok = gap <= 1e-10 and dominated and savings >= 0.05
    detail = (f"max UCB gap={gap:.3g} (<= 1e-10), interactive cum survey <= zero-shot at every step: {dominated}, "
              f"total savings={savings:.2%} (>= 5%)")
    assert record("6 interactive equivalence and savings", ok, detail)


def test_7_robustness_contrast(violated_runs, record):
    _, ridge = violated_runs["ridge"]
    _, elastic = violated_runs["elastic"]
    el_keep = sum(set(RELEVANT) <= set(tr.final_survey) for tr, _ in elastic)
    ridge_drop = sum(not set(RELEVANT) <= set(tr.final_survey) for tr, _ in ridge)
    ridge_R = float(np.mean([tr.cum_regret[-1] for tr, _ in ridge]))
    el_R = float(np.mean([tr.cum_regret[-1] for tr, _ in elastic]))
    ratio = ridge_R / el_R
    ok = el_keep >= 4 and ridge_drop >= 1 and ratio >= 2.0
    detail = (f"elastic keeps all relevant in {el_keep}/5 (need >= 4); ridge drops a relevant feature in "
              f"{ridge_drop}/5 (need >= 1); mean R_T ridge/elastic={ridge_R:.1f}/{el_R:.1f}={ratio:.3f} (need >= 2)")
    assert record("7 robustness contrast (beta_min=1.5)", ok, detail)


def test_8_budget_summability(record):
    total = summability(K=1, N=10**6)
    assert record("8 budget summability", total < 1.0, f"sum={total:.12f} (< 1)")


def _simulate(out, workers):
    return cli.main(["simulate", "--mode", "elastic", "--K", "5", "--d", "8", "--T", "2000", "--seeds", "3",
                     "--interactive", "--workers", str(workers), "--out", str(out)])


def test_9_determinism(tmp_path, record):
    codes = [_simulate(tmp_path / name, w) for name, w in (("a", 1), ("b", 1), ("c", 2))]
    names = ["seed_0.csv", "seed_1.csv", "seed_2.csv", "aggregate.csv"]
    same = all((tmp_path / "a" / n).read_bytes() == (tmp_path / r / n).read_bytes()
               for n in names for r in ("b", "c"))
    ok = codes == [0, 0, 0] and same
    assert record("9 determinism", ok, f"exit codes {codes}; serial/serial/parallel CSVs byte-identical: {same}")


@pytest.mark.slow
def test_10_full_scale_smoke(tmp_path, record):
    t0 = time.perf_counter()
    code = cli.main(["simulate", "--preset", "ridge-k5-bmin0.3", "--out", str(tmp_path)])
    elapsed = time.perf_counter() - t0
    monotone, final_lens = True, []
    for s in SEEDS:
        with (tmp_path / f"seed_{s}.csv").open(encoding="utf-8") as fh:
            rows = list(csv.DictReader(fh))
        cr = np.array([float(r["cum_regret"]) for r in rows])
        cs = np.array([int(r["cum_survey_len"]) for r in rows])
        monotone &= bool(np.all(np.diff(cr) >= 0) and np.all(np.diff(cs) >= 0)) and len(rows) == 100_000
        final_lens.append(int(rows[-1]["survey_len"]))
    ok = code == 0 and elapsed < 1800 and monotone and max(final_lens) < 50
    detail = (f"exit {code}, {elapsed:.0f}s (< 1800s), monotone cumulative curves: {monotone}, "
              f"final per-step survey lengths {final_lens} (need < 50)")
    assert record("10 full-scale smoke run", ok, detail)
