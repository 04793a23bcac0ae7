"""``surveybandit`` command line: ``simulate`` and ``verify``.

Exit codes: 0 success, 1 configuration error, 2 verification failure,
3 runtime invariant violation.
"""

from __future__ import annotations

import argparse
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from .config import PRESETS, RunConfig, preset
from .errors import ConfigError, InvariantViolation
from .policy import theoretical_regret_bound
from .report import plot_curves, write_aggregate_csv, write_trajectory_csv
from .simulator import aggregate, run
from .verify import SUITES

EXIT_OK, EXIT_CONFIG, EXIT_VERIFY, EXIT_INVARIANT = 0, 1, 2, 3
WORKERS_ENV = "SURVEYBANDIT_WORKERS"

# flag name -> config key
_OVERRIDES = {
    "mode": "mode", "beta_min": "beta_min", "delta": "delta", "sigma": "sigma", "b": "b", "b2": "b_2",
    "alpha": "alpha", "K": "K", "d": "d", "T": "T", "bound_method": "bound_method", "noise": "noise",
    "tie_break": "tie_break", "out": "output",
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="surveybandit", description="Survey bandit simulator")
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="run seeded simulations and write CSVs")
    sim.add_argument("--config", help="JSON configuration file")
    sim.add_argument("--preset", choices=sorted(PRESETS), help="preset of the synthetic simulation study")
    sim.add_argument("--mode", choices=["ridge", "elastic"])
    sim.add_argument("--beta-min", dest="beta_min", type=float)
    sim.add_argument("--delta", type=float)
    sim.add_argument("--sigma", type=float)
    sim.add_argument("--b", type=float, help="1-norm bound on arm parameters (default d)")
    sim.add_argument("--b2", type=float, help="2-norm bound on arm parameters (default sqrt(d))")
    sim.add_argument("--alpha", type=float, help="ridge penalty (default max(1, L_2))")
    sim.add_argument("--K", type=int, choices=[3, 5])
    sim.add_argument("--d", type=int)
    sim.add_argument("--T", type=int)
    sim.add_argument("--seeds", type=int, help="number of seeds, 0..N-1")
    sim.add_argument("--seed-list", dest="seed_list", help="explicit comma-separated seeds")
    sim.add_argument("--interactive", action=argparse.BooleanOptionalAction, default=None)
    sim.add_argument("--bound-method", dest="bound_method", choices=["sound", "heuristic"])
    sim.add_argument("--rescale-lambda", dest="rescale", action=argparse.BooleanOptionalAction, default=None)
    sim.add_argument("--noise", choices=["centered", "uniform"])
    sim.add_argument("--tie-break", dest="tie_break", choices=["lowest_index", "seeded_random"])
    sim.add_argument("--out", help="output directory")
    sim.add_argument("--plot", action=argparse.BooleanOptionalAction, default=None,
                     help="also render regret/survey-length figures")
    sim.add_argument("--workers", type=int, help=f"parallel seed workers (default ${WORKERS_ENV} or 1)")

    ver = sub.add_parser("verify", help="run a built-in verification suite")
    ver.add_argument("suite", help=f"one of: {', '.join(SUITES)}")
    return parser


def resolve_config(args: argparse.Namespace) -> RunConfig:
    cfg = preset(args.preset) if args.preset else RunConfig().validate()
    if args.config:
        cfg = RunConfig.load(args.config, base=cfg)
    overrides = {key: getattr(args, flag) for flag, key in _OVERRIDES.items() if getattr(args, flag) is not None}
    if args.seeds is not None:
        overrides["seeds"] = list(range(args.seeds)) if args.seeds > 0 else []
    if args.seed_list is not None:
        try:
            overrides["seeds"] = [int(s) for s in args.seed_list.split(",") if s.strip()]
        except ValueError as exc:
            raise ConfigError(f"seeds: cannot parse {args.seed_list!r}") from exc
    if args.interactive is not None:
        overrides["interactive"] = args.interactive
    if args.rescale is not None:
        overrides["rescale_lambda_by_d"] = args.rescale
    if args.plot is not None:
        overrides["plot"] = args.plot
    return RunConfig.from_dict(overrides, base=cfg)


def _run_seed(cfg: RunConfig, seed: int):
    env = cfg.environment()
    tr = run(cfg.policy_config(env), env, cfg.T, seed, interactive=cfg.interactive,
             bound_method=cfg.bound_method)
    tr.final_state = None
    return tr


def _workers(args) -> int:
    if args.workers is not None:
        return max(1, args.workers)
    try:
        return max(1, int(os.environ.get(WORKERS_ENV, "1")))
    except ValueError:
        raise ConfigError(f"{WORKERS_ENV} must be an integer")


def cmd_simulate(args: argparse.Namespace) -> int:
    cfg = resolve_config(args)
    workers = _workers(args)
    out = Path(cfg.output)
    out.mkdir(parents=True, exist_ok=True)
    (out / "config.json").write_text(cfg.dumps(), encoding="utf-8")

    if workers > 1 and len(cfg.seeds) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            trajectories = list(pool.map(_run_seed, [cfg] * len(cfg.seeds), cfg.seeds))
    else:
        trajectories = [_run_seed(cfg, s) for s in cfg.seeds]

    for seed, tr in zip(cfg.seeds, trajectories):
        write_trajectory_csv(tr, out / f"seed_{seed}.csv")
    curves = aggregate(trajectories)
    write_aggregate_csv(curves, out / "aggregate.csv")
    if cfg.plot:
        plot_curves(curves, out, title=f"{cfg.mode}, beta_min={cfg.beta_min}, K={cfg.K}, d={cfg.d}")

    try:
        bound = f"{theoretical_regret_bound(cfg.mode, cfg.T, cfg.K, cfg.d, cfg.policy_config()):.6g}"
    except NotImplementedError:
        bound = "n/a (rescaled penalty)"
    print(f"mode={cfg.mode} K={cfg.K} d={cfg.d} T={cfg.T} seeds={len(cfg.seeds)} interactive={cfg.interactive}")
    print(f"final cumulative regret (mean): {curves.mean_cum_regret[-1]:.6g}")
    print(f"final cumulative survey length (mean): {curves.mean_cum_survey_len[-1]:.6g}")
    print(f"final per-step survey length: {[int(tr.survey_len[-1]) for tr in trajectories]}")
    print(f"theoretical regret bound at T: {bound}")
    print(f"wrote {out}")
    return EXIT_OK


def cmd_verify(args: argparse.Namespace) -> int:
    if args.suite not in SUITES:
        print(f"unknown suite {args.suite!r}; choose from {', '.join(SUITES)}", file=sys.stderr)
        return EXIT_CONFIG
    checks = SUITES[args.suite]()
    for c in checks:
        print(c.line())
    return EXIT_OK if all(c.passed for c in checks) else EXIT_VERIFY


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_CONFIG
    try:
        if args.command == "simulate":
            return cmd_simulate(args)
        return cmd_verify(args)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except InvariantViolation as exc:
        print(f"invariant violation: {exc}", file=sys.stderr)
        return EXIT_INVARIANT


if __name__ == "__main__":
    sys.exit(main())
