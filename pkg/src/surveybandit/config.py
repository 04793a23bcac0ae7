"""Run configuration: validation, presets and JSON round-tripping."""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path
from typing import Any

from .confidence import MODES
from .errors import ConfigError
from .interactive import BOUND_METHODS
from .policy import TIE_BREAKS, PolicyConfig
from .simulator import NOISE_KINDS, Environment, study_environment


@dataclass
class RunConfig:
    mode: str = "ridge"
    beta_min: float = 0.3
    delta: float = 0.1
    sigma: float = 1.0
    b: float | None = None  # None -> d
    b_2: float | None = None  # None -> sqrt(d)
    alpha: float | None = None  # None -> max(1, L_2)
    K: int = 3
    d: int = 50
    T: int = 100_000
    seeds: list[int] = field(default_factory=lambda: list(range(5)))
    interactive: bool = False
    bound_method: str = "sound"
    rescale_lambda_by_d: bool = False
    tie_break: str = "lowest_index"
    eps_clamp: float = 1e-8
    noise: str = "centered"
    output: str = "runs/out"
    plot: bool = False

    def validate(self) -> "RunConfig":
        errors = []

        def need(cond: bool, name: str, msg: str):
            if not cond:
                errors.append(f"{name}: {msg} (got {getattr(self, name)!r})")

        need(self.mode in MODES, "mode", f"must be one of {MODES}")
        need(_num(self.beta_min) and self.beta_min > 0, "beta_min", "must be > 0")
        need(_num(self.delta) and 0 < self.delta < 1, "delta", "must lie in (0, 1)")
        need(_num(self.sigma) and self.sigma > 0, "sigma", "must be > 0")
        for name in ("b", "b_2", "alpha"):
            v = getattr(self, name)
            need(v is None or (_num(v) and v > 0), name, "must be > 0 or null")
        need(self.K in (3, 5), "K", "the study environment supports 3 or 5 arms")
        need(_int(self.d) and self.d >= 3, "d", "must be an integer >= 3")
        need(_int(self.T) and self.T >= 1, "T", "must be an integer >= 1")
        need(isinstance(self.seeds, list) and len(self.seeds) > 0 and all(_int(s) and s >= 0 for s in self.seeds),
             "seeds", "must be a non-empty list of non-negative integers")
        need(isinstance(self.interactive, bool), "interactive", "must be a boolean")
        need(self.bound_method in BOUND_METHODS, "bound_method", f"must be one of {BOUND_METHODS}")
        need(isinstance(self.rescale_lambda_by_d, bool), "rescale_lambda_by_d", "must be a boolean")
        need(self.tie_break in TIE_BREAKS, "tie_break", f"must be one of {TIE_BREAKS}")
        need(_num(self.eps_clamp) and self.eps_clamp >= 0, "eps_clamp", "must be >= 0")
        need(self.noise in NOISE_KINDS, "noise", f"must be one of {NOISE_KINDS}")
        need(isinstance(self.output, str) and self.output != "", "output", "must be a path")
        need(isinstance(self.plot, bool), "plot", "must be a boolean")
        if errors:
            raise ConfigError("invalid configuration:\n  " + "\n  ".join(errors))
        return self

    @classmethod
    def from_dict(cls, data: dict[str, Any], base: "RunConfig | None" = None) -> "RunConfig":
        known = {f.name for f in fields(cls)}
        unknown = sorted(set(data) - known)
        if unknown:
            raise ConfigError(f"unknown configuration keys: {', '.join(unknown)}")
        merged = asdict(base) if base is not None else asdict(cls())
        merged.update(data)
        if isinstance(merged.get("seeds"), int) and not isinstance(merged.get("seeds"), bool):
            merged["seeds"] = list(range(merged["seeds"]))
        return cls(**merged).validate()

    @classmethod
    def load(cls, path: str | Path, base: "RunConfig | None" = None) -> "RunConfig":
        try:
            data = json.loads(Path(path).read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        if not isinstance(data, dict):
            raise ConfigError("config file must hold a JSON object")
        return cls.from_dict(data, base)

    def to_dict(self) -> dict[str, Any]:
        return asdict(self)

    def dumps(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"

    def environment(self) -> Environment:
        return study_environment(self.K, self.d, noise=self.noise)

    def policy_config(self, env: Environment | None = None) -> PolicyConfig:
        env = env or self.environment()
        b = float(self.d) if self.b is None else self.b
        b_2 = math.sqrt(self.d) if self.b_2 is None else self.b_2
        return PolicyConfig(mode=self.mode, beta_min=self.beta_min, delta=self.delta,
                            bounds=env.bounds(sigma=self.sigma, b=b, b_2=b_2), K=self.K, d=self.d,
                            alpha=self.alpha, eps_clamp=self.eps_clamp,
                            rescale_lambda_by_d=self.rescale_lambda_by_d, tie_break=self.tie_break)


def _num(v) -> bool:
    return isinstance(v, (int, float)) and not isinstance(v, bool) and math.isfinite(v)


def _int(v) -> bool:
    return isinstance(v, int) and not isinstance(v, bool)


_STUDY = dict(d=50, T=100_000, seeds=list(range(5)), sigma=1.0, b=50.0, b_2=math.sqrt(50), delta=0.1)

PRESETS: dict[str, dict[str, Any]] = {
    "ridge-k3-bmin0.3": dict(_STUDY, mode="ridge", K=3, beta_min=0.3),
    "ridge-k5-bmin0.3": dict(_STUDY, mode="ridge", K=5, beta_min=0.3),
    "ridge-k5-bmin0.5": dict(_STUDY, mode="ridge", K=5, beta_min=0.5),
    "elnet-k5-bmin0.7": dict(_STUDY, mode="elastic", K=5, beta_min=0.7, rescale_lambda_by_d=True),
    "elnet-k5-bmin1.5": dict(_STUDY, mode="elastic", K=5, beta_min=1.5, rescale_lambda_by_d=True),
}


def preset(name: str) -> RunConfig:
    if name not in PRESETS:
        raise ConfigError(f"unknown preset {name!r}; choose from {', '.join(PRESETS)}")
    return RunConfig.from_dict(dict(PRESETS[name], output=f"runs/{name}"))
