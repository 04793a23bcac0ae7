import csv
import json

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from surveybandit import cli
from surveybandit.config import PRESETS, RunConfig, preset
from surveybandit.errors import ConfigError, InvariantViolation
from surveybandit.report import AGGREGATE_HEADER, TRAJECTORY_HEADER


def simulate(tmp_path, *extra):
    return cli.main(["simulate", "--T", "100", "--seeds", "1", "--d", "6", "--out", str(tmp_path), *extra])


def test_quick_run_writes_csvs(tmp_path, capsys):
    assert simulate(tmp_path) == 0
    lines = (tmp_path / "seed_0.csv").read_text(encoding="utf-8").splitlines()
    assert tuple(lines[0].split(",")) == TRAJECTORY_HEADER and len(lines) == 101
    agg = list(csv.reader((tmp_path / "aggregate.csv").open(encoding="utf-8")))
    assert tuple(agg[0]) == AGGREGATE_HEADER and len(agg) == 101
    assert (tmp_path / "seed_0.csv").read_bytes().endswith(b"\n")
    cfg = RunConfig.load(tmp_path / "config.json")
    assert cfg.T == 100 and cfg.seeds == [0]
    out = capsys.readouterr().out
    assert "final cumulative regret" in out and "theoretical regret bound" in out


def test_plot_flag_writes_figures(tmp_path):
    assert simulate(tmp_path, "--plot") == 0
    for name in ("regret.png", "survey_length.png"):
        assert (tmp_path / name).read_bytes()[:8] == b"\x89PNG\r\n\x1a\n"
    assert not list((tmp_path / "sub").glob("*.png"))


def test_config_file_with_overrides(tmp_path):
    conf = tmp_path / "c.json"
    conf.write_text(json.dumps({"mode": "elastic", "T": 40, "d": 5, "seeds": [3]}))
    out = tmp_path / "o"
    assert cli.main(["simulate", "--config", str(conf), "--T", "20", "--out", str(out)]) == 0
    cfg = RunConfig.load(out / "config.json")
    assert (cfg.mode, cfg.T, cfg.seeds) == ("elastic", 20, [3])
    assert len((out / "seed_3.csv").read_text().splitlines()) == 21


@pytest.mark.parametrize("args", [
    ["simulate", "--beta-min", "-1"],
    ["simulate", "--K", "4"],
    ["simulate", "--seeds", "0"],
    ["simulate", "--config", "/nonexistent/c.json"],
    ["simulate", "--seed-list", "1,x"],
    ["bogus"],
])
def test_bad_configuration_exits_1(args, tmp_path, capsys):
    assert cli.main(args + ["--out", str(tmp_path)] if args[0] == "simulate" else args) == 1


def test_unknown_key_rejected(tmp_path):
    conf = tmp_path / "c.json"
    conf.write_text(json.dumps({"betamin": 0.3}))
    assert cli.main(["simulate", "--config", str(conf), "--out", str(tmp_path)]) == 1
    with pytest.raises(ConfigError, match="betamin"):
        RunConfig.load(conf)


def test_field_level_messages():
    with pytest.raises(ConfigError) as err:
        RunConfig.from_dict({"delta": 2.0, "T": 0})
    assert "delta" in str(err.value) and "T:" in str(err.value)


def test_bad_worker_env(tmp_path, monkeypatch):
    monkeypatch.setenv(cli.WORKERS_ENV, "many")
    assert simulate(tmp_path) == 1


def test_invariant_violation_exits_3(tmp_path, monkeypatch, capsys):
    def boom(*a, **k):
        raise InvariantViolation("negative regret -1", 7)

    monkeypatch.setattr(cli, "run", boom)
    assert simulate(tmp_path) == 3
    assert "step 7" in capsys.readouterr().err


def test_verify_exit_codes(monkeypatch, capsys):
    assert cli.main(["verify", "nope"]) == 1
    assert cli.main(["verify", "estimators"]) == 0
    assert "[PASS]" in capsys.readouterr().out
    from surveybandit.verify import Check
    monkeypatch.setitem(cli.SUITES, "estimators", lambda: [Check("x", 1.0, 0.0, False)])
    assert cli.main(["verify", "estimators"]) == 2


def test_presets_match_simulation_setup():
    cfg = preset("ridge-k3-bmin0.3")
    assert (cfg.mode, cfg.K, cfg.d, cfg.T, cfg.beta_min, len(cfg.seeds)) == ("ridge", 3, 50, 100_000, 0.3, 5)
    cfg = preset("elnet-k5-bmin1.5")
    assert (cfg.mode, cfg.K, cfg.beta_min) == ("elastic", 5, 1.5)
    assert set(PRESETS) >= {"ridge-k3-bmin0.3", "elnet-k5-bmin1.5"}
    with pytest.raises(ConfigError):
        preset("nope")


def test_repeated_runs_are_byte_identical(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    for out in (a, b):
        assert cli.main(["simulate", "--T", "150", "--seeds", "2", "--d", "5", "--mode", "elastic",
                         "--out", str(out)]) == 0
    for name in ("seed_0.csv", "seed_1.csv", "aggregate.csv"):
        assert (a / name).read_bytes() == (b / name).read_bytes()


configs = st.builds(
    dict,
    mode=st.sampled_from(["ridge", "elastic"]),
    beta_min=st.floats(1e-3, 5, allow_nan=False),
    delta=st.floats(1e-3, 0.999),
    b=st.one_of(st.none(), st.floats(0.1, 100)),
    K=st.sampled_from([3, 5]),
    d=st.integers(3, 80),
    T=st.integers(1, 10**6),
    seeds=st.lists(st.integers(0, 2**31), min_size=1, max_size=6),
    interactive=st.booleans(),
    bound_method=st.sampled_from(["sound", "heuristic"]),
    noise=st.sampled_from(["centered", "uniform"]),
    plot=st.booleans(),
)


@settings(max_examples=100)
@given(configs)
def test_config_round_trip(data):
    cfg = RunConfig.from_dict(data)
    again = RunConfig.from_dict(json.loads(cfg.dumps()))
    assert again == cfg and again.dumps() == cfg.dumps()
